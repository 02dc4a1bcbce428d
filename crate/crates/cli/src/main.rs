use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nlslab_cli::{emit_plotdata, run_file, CliError};

#[derive(Debug, Parser)]
#[command(name = "nlslab", version, about = "Double-power NLS experiments")]
struct Args {
    /// Worker threads for sweeps (defaults to the number of cores).
    #[arg(long, global = true, env = "NLSLAB_THREADS")]
    threads: Option<usize>,

    /// Log every check as it is recorded.
    #[arg(short, long, global = true)]
    verbose: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the experiment described by a TOML config.
    Run {
        config: PathBuf,
        /// Overrides `output_dir` from the config.
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// Write plot-ready columns for a finished run.
    EmitPlotdata {
        run_dir: PathBuf,
        /// Defaults to `<run_dir>/plot`.
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let args = Args::parse();
    env_logger::Builder::new()
        .filter_level(if args.verbose {
            log::LevelFilter::Info
        } else {
            log::LevelFilter::Warn
        })
        .format_timestamp(None)
        .init();
    if let Some(n) = args.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot configure {n} threads: {e}");
            return ExitCode::from(2);
        }
    }
    match execute(args.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn execute(command: Command) -> Result<ExitCode, CliError> {
    match command {
        Command::Run { config, output_dir } => {
            let outcome = run_file(&config, output_dir.as_deref())?;
            print!("{}", outcome.summary.render());
            println!("results in {}", outcome.dir.display());
            Ok(if outcome.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
        Command::EmitPlotdata { run_dir, output_dir } => {
            let out = output_dir.unwrap_or_else(|| run_dir.join("plot"));
            for path in emit_plotdata(&run_dir, &out)? {
                println!("{}", path.display());
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}
