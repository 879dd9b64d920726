use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::ReportFormat;
use crate::error::{LabError, Result};
use crate::rate_and_checks::CheckReport;

/// JSON report document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportFile {
    pub version: String,
    pub reports: Vec<CheckReport>,
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> LabError {
    LabError::Io(std::io::Error::other(format!("{}: {e}", path.display())))
}

pub fn write_json(path: &Path, reports: &[CheckReport]) -> Result<()> {
    let doc = ReportFile { version: env!("CARGO_PKG_VERSION").to_string(), reports: reports.to_vec() };
    let text = serde_json::to_string_pretty(&doc).map_err(|e| io_err(path, e))?;
    fs::write(path, text + "\n").map_err(|e| io_err(path, e))
}

pub fn read_report(path: &Path) -> Result<ReportFile> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    serde_json::from_str(&text).map_err(|e| LabError::Config { path: path.display().to_string(), msg: e.to_string() })
}

fn num(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else {
        format!("{v:e}")
    }
}

/// CSV with columns `name,observed,expected,tol,stderr,pass`.
pub fn write_csv(path: &Path, reports: &[CheckReport]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| io_err(path, e))?;
    w.write_record(["name", "observed", "expected", "tol", "stderr", "pass"]).map_err(|e| io_err(path, e))?;
    for r in reports {
        let se = r.stderr.map(num).unwrap_or_default();
        w.write_record([r.name.clone(), num(r.observed), num(r.expected), num(r.tolerance), se, r.pass.to_string()])
            .map_err(|e| io_err(path, e))?;
    }
    w.flush().map_err(|e| io_err(path, e))
}

/// One whitespace separated file `x empirical theoretical` per report that
/// carries a histogram, named `<stem>_<check>_<k>.dat`.
pub fn write_histograms(dir: &Path, stem: &str, reports: &[CheckReport]) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for (k, r) in reports.iter().enumerate() {
        let Some(h) = &r.histogram else { continue };
        let path = dir.join(format!("{stem}_{}_{k}.dat", r.name));
        let mut f = fs::File::create(&path).map_err(|e| io_err(&path, e))?;
        writeln!(f, "# x empirical theoretical").map_err(|e| io_err(&path, e))?;
        for ((x, e), t) in h.x.iter().zip(&h.empirical).zip(&h.theoretical) {
            writeln!(f, "{x:e} {e:e} {t:e}").map_err(|e| io_err(&path, e))?;
        }
        out.push(path);
    }
    Ok(out)
}

/// Writes `<dir>/<stem>.json` and/or `<dir>/<stem>.csv` plus histogram files.
pub fn emit_report(reports: &[CheckReport], dir: &Path, stem: &str, formats: &[ReportFormat]) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let mut out = Vec::new();
    for f in formats {
        let path = match f {
            ReportFormat::Json => dir.join(format!("{stem}.json")),
            ReportFormat::Csv => dir.join(format!("{stem}.csv")),
        };
        match f {
            ReportFormat::Json => write_json(&path, reports)?,
            ReportFormat::Csv => write_csv(&path, reports)?,
        }
        out.push(path);
    }
    out.extend(write_histograms(dir, stem, reports)?);
    Ok(out)
}
