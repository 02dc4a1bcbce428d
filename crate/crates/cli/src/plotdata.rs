//! Plot-ready columnar files derived from a finished run. Nothing is rendered.

use std::fmt::Write as _;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use nlslab::io::read_profile;
use nlslab::{critical_points, norms, ScalingCurve};

use crate::error::CliError;

/// Samples of the scaling curve.
pub const CURVE_SAMPLES: usize = 2000;

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

/// `λ ↦ E(φ^λ)` for the run's ground state, with λ₁..λ₄ in the header and in a
/// separate marker file.
fn scaling_curve(run_dir: &Path, out: &Path, written: &mut Vec<PathBuf>) -> Result<(), CliError> {
    let src = run_dir.join("ground_state.txt");
    if !src.exists() {
        return Ok(());
    }
    let file = std::fs::File::open(&src).map_err(|e| CliError::io(&src, e))?;
    let stored = read_profile(BufReader::new(file)).map_err(|e| CliError::io(&src, std::io::Error::other(e.to_string())))?;
    let rep = norms(&stored.profile, &stored.params).map_err(|e| CliError::io(&src, std::io::Error::other(e.to_string())))?;
    let curve = ScalingCurve::from_norms(&rep.base(), &stored.params);
    let points = critical_points(&curve).ok();
    let (lo, hi) = match &points {
        Some(p) => (p.lambda1 / 4.0, p.lambda4 * 2.0),
        None => (1e-2, 1e1),
    };
    let mut text = String::from("# scaling curve E(phi^lambda), phi^lambda(x) = lambda^(N/2) phi(lambda x)\n");
    let _ = writeln!(text, "# omega = {:?}", stored.params.omega);
    let mut markers = String::from("# name lambda energy\n");
    if let Some(p) = &points {
        for (name, l) in ["lambda1", "lambda2", "lambda3", "lambda4"].iter().zip(p.as_array()) {
            let _ = writeln!(text, "# {name} = {l:?}");
            let _ = writeln!(markers, "{name} {l:e} {:e}", curve.energy(l));
        }
    }
    text.push_str("# columns = lambda energy\n");
    let step = (hi / lo).ln() / (CURVE_SAMPLES - 1) as f64;
    for i in 0..CURVE_SAMPLES {
        let l = lo * (step * i as f64).exp();
        let _ = writeln!(text, "{l:e} {:e}", curve.energy(l));
    }
    let path = out.join("scaling_curve.dat");
    write(&path, &text)?;
    written.push(path);
    if points.is_some() {
        let path = out.join("scaling_markers.dat");
        write(&path, &markers)?;
        written.push(path);
    }
    Ok(())
}

/// `(ω, E(φ_ω), d(ω))` from a sweep.
fn omega_energy(run_dir: &Path, out: &Path, written: &mut Vec<PathBuf>) -> Result<(), CliError> {
    let src = run_dir.join("omega_sweep.csv");
    if !src.exists() {
        return Ok(());
    }
    let csv = read(&src)?;
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap_or_default().split(',').collect();
    let col = |name: &str| header.iter().position(|h| *h == name);
    let (Some(w), Some(e), Some(s)) = (col("omega"), col("energy"), col("action")) else {
        return Err(CliError::io(&src, std::io::Error::other("missing omega/energy/action columns")));
    };
    let mut text = String::from("# columns = omega energy action\n");
    for line in lines {
        let f: Vec<&str> = line.split(',').collect();
        let _ = writeln!(text, "{} {} {}", f[w], f[e], f[s]);
    }
    let path = out.join("omega_energy.dat");
    write(&path, &text)?;
    written.push(path);
    Ok(())
}

/// Trace files re-emitted as bare whitespace columns.
fn traces(run_dir: &Path, out: &Path, written: &mut Vec<PathBuf>) -> Result<(), CliError> {
    let mut names: Vec<String> = std::fs::read_dir(run_dir)
        .map_err(|e| CliError::io(run_dir, e))?
        .filter_map(|e| e.ok())
        .map(|e| e.file_name().to_string_lossy().into_owned())
        .filter(|n| n.starts_with("trace_") && n.ends_with(".txt"))
        .collect();
    names.sort();
    for name in names {
        let src = run_dir.join(&name);
        let body = read(&src)?;
        let mut text = String::new();
        for line in body.lines() {
            if line.starts_with("# verdict") || line.starts_with("# columns") || !line.starts_with('#') {
                text.push_str(line);
                text.push('\n');
            }
        }
        let path = out.join(name.replace(".txt", ".dat"));
        write(&path, &text)?;
        written.push(path);
    }
    Ok(())
}

/// Write plot files for the run in `run_dir` into `out` and return their paths.
pub fn emit_plotdata(run_dir: &Path, out: &Path) -> Result<Vec<PathBuf>, CliError> {
    if !run_dir.join("manifest.json").exists() {
        return Err(CliError::MissingArtifacts(run_dir.to_path_buf()));
    }
    std::fs::create_dir_all(out).map_err(|e| CliError::io(out, e))?;
    let mut written = vec![];
    scaling_curve(run_dir, out, &mut written)?;
    omega_energy(run_dir, out, &mut written)?;
    traces(run_dir, out, &mut written)?;
    if written.is_empty() {
        return Err(CliError::MissingArtifacts(run_dir.to_path_buf()));
    }
    Ok(written)
}
