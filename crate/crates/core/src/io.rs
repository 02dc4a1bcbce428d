//! Columnar text formats for ground-state profiles and evolution traces.
//!
//! Profiles:
//!
//! ```text
//! # nlslab radial-profile v1
//! # dim = 1
//! # a = 1.0
//! ...
//! # columns = r phi dphi
//! 0.00000000000000000e0 1.08605203586600000e0 0.00000000000000000e0
//! ```
//!
//! Numbers are written with 17 significant digits so a round trip is exact.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::evolution::EvolutionTrace;
use crate::groundstate::GroundState;
use crate::params::Parameters;
use crate::profile::RadialProfile;

pub const PROFILE_MAGIC: &str = "# nlslab radial-profile v1";
pub const TRACE_MAGIC: &str = "# nlslab evolution-trace v1";

/// A profile read back from disk.
#[derive(Debug, Clone, PartialEq)]
pub struct StoredProfile {
    pub params: Parameters,
    pub phi0: f64,
    pub profile: RadialProfile,
}

pub fn write_profile<W: Write>(mut w: W, ground: &GroundState) -> Result<()> {
    let p = &ground.params;
    let prof = &ground.profile;
    writeln!(w, "{PROFILE_MAGIC}")?;
    writeln!(w, "# dim = {}", p.dim)?;
    for (k, v) in [
        ("a", p.a),
        ("b", p.b),
        ("p", p.p),
        ("q", p.q),
        ("omega", p.omega),
        ("rmax", prof.rmax()),
        ("phi0", ground.phi0),
        ("tail_rate", prof.tail_rate),
    ] {
        writeln!(w, "# {k} = {v:?}")?;
    }
    writeln!(w, "# samples = {}", prof.len())?;
    writeln!(w, "# columns = r phi dphi")?;
    let slopes = prof.slopes.as_deref();
    for i in 0..prof.len() {
        let d = slopes.map_or(f64::NAN, |s| s[i]);
        writeln!(w, "{:.17e} {:.17e} {:.17e}", prof.r[i], prof.values[i], d)?;
    }
    Ok(())
}

fn format_err(detail: impl Into<String>) -> Error {
    Error::Format {
        kind: "radial-profile",
        detail: detail.into(),
    }
}

pub fn read_profile<R: BufRead>(r: R) -> Result<StoredProfile> {
    let mut lines = r.lines();
    let first = lines.next().transpose()?.unwrap_or_default();
    if first.trim() != PROFILE_MAGIC {
        return Err(format_err(format!("unexpected first line {first:?}")));
    }
    let mut header = std::collections::BTreeMap::new();
    let (mut rs, mut vs, mut ds) = (vec![], vec![], vec![]);
    for (lineno, line) in lines.enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            if let Some((k, v)) = rest.split_once('=') {
                header.insert(k.trim().to_string(), v.trim().to_string());
            }
            continue;
        }
        let cols: Vec<f64> = line
            .split_whitespace()
            .map(|c| c.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| format_err(format!("line {}: {e}", lineno + 2)))?;
        if cols.len() != 3 {
            return Err(format_err(format!("line {}: expected 3 columns", lineno + 2)));
        }
        rs.push(cols[0]);
        vs.push(cols[1]);
        ds.push(cols[2]);
    }
    let num = |k: &str| -> Result<f64> {
        header
            .get(k)
            .ok_or_else(|| format_err(format!("missing header key {k}")))?
            .parse::<f64>()
            .map_err(|e| format_err(format!("header {k}: {e}")))
    };
    let dim = num("dim")? as usize;
    let params = Parameters::new(dim, num("a")?, num("b")?, num("p")?, num("q")?, num("omega")?);
    let samples = num("samples")? as usize;
    if samples != rs.len() {
        return Err(format_err(format!("header says {samples} samples, found {}", rs.len())));
    }
    let slopes = (!ds.iter().any(|d| d.is_nan())).then_some(ds);
    let profile = RadialProfile::with_slopes(rs, vs, slopes, dim)?;
    Ok(StoredProfile {
        params,
        phi0: num("phi0")?,
        profile,
    })
}

/// Trace as columns `t mass energy K_omega P grad_norm virial`, with the
/// parameters, configuration and verdict echoed in the header.
pub fn write_trace<W: Write>(mut w: W, trace: &EvolutionTrace) -> Result<()> {
    writeln!(w, "{TRACE_MAGIC}")?;
    writeln!(w, "# params = {:?}", trace.params)?;
    writeln!(w, "# config = {:?}", trace.config)?;
    writeln!(w, "# verdict = {}", trace.verdict)?;
    writeln!(w, "# trusted_samples = {}", trace.trusted_prefix())?;
    writeln!(w, "# columns = t mass energy K_omega P grad_norm virial")?;
    for i in 0..trace.len() {
        writeln!(
            w,
            "{:.17e} {:.17e} {:.17e} {:.17e} {:.17e} {:.17e} {:.17e}",
            trace.times[i],
            trace.mass[i],
            trace.energy[i],
            trace.k_omega[i],
            trace.p[i],
            trace.grad_norm[i],
            trace.virial[i]
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groundstate::{solve_ground_state, ShootingConfig};

    #[test]
    fn profile_round_trip_is_exact() {
        let g = solve_ground_state(&Parameters::canonical(1.0), &ShootingConfig::default()).unwrap();
        let mut buf = Vec::new();
        write_profile(&mut buf, &g).unwrap();
        let back = read_profile(buf.as_slice()).unwrap();
        assert_eq!(back.params, g.params);
        assert_eq!(back.phi0, g.phi0);
        assert_eq!(back.profile.r, g.profile.r);
        assert_eq!(back.profile.values, g.profile.values);
        assert_eq!(back.profile.slopes, g.profile.slopes);
    }

    #[test]
    fn rejects_foreign_files() {
        let e = read_profile("r,phi\n0,1\n".as_bytes());
        assert!(matches!(e, Err(Error::Format { .. })));
        let truncated = format!("{PROFILE_MAGIC}\n# dim = 1\n0 1 0\n");
        assert!(matches!(read_profile(truncated.as_bytes()), Err(Error::Format { .. })));
    }
}
