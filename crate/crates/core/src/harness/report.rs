use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use super::{EnsembleSummary, HarnessError};

pub const REPORT_HEADER: &str = "theta_true_deg,mu_deg,mu_halfwidth_deg,v_lower,v_upper,X2,accept";

pub fn read_summary(path: &Path) -> Result<EnsembleSummary, HarnessError> {
    let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    serde_json::from_str(&text).map_err(|source| HarnessError::Json {
        path: path.to_owned(),
        source,
    })
}

/// One row per summary, in the given order.
pub fn write_report<W: Write>(summaries: &[EnsembleSummary], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{REPORT_HEADER}")?;
    for s in summaries {
        writeln!(
            out,
            "{:.4},{:.4},{:.4},{:.4},{:.4},{:.2},{}",
            s.theta_true_deg,
            s.mu_deg,
            s.mu_halfwidth_deg,
            s.variance_ci.lower,
            s.variance_ci.upper,
            s.x2,
            s.accept
        )?;
    }
    Ok(())
}

/// Builds the table from `summary.json` files. Written to `out` when given;
/// the table text is returned either way.
pub fn cmd_report(paths: &[PathBuf], out: Option<&Path>) -> Result<String, HarnessError> {
    if paths.is_empty() {
        return Err(HarnessError::EmptyReport);
    }
    let summaries = paths
        .iter()
        .map(|p| read_summary(p))
        .collect::<Result<Vec<_>, _>>()?;
    let mut buf = Vec::new();
    write_report(&summaries, &mut buf).expect("writing to memory");
    let text = String::from_utf8(buf).expect("ascii table");
    if let Some(path) = out {
        fs::write(path, &text).map_err(|e| HarnessError::io(path, e))?;
    }
    Ok(text)
}
