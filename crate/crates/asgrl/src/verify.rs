//! Recomputes `summary.csv` from the per-seed curve files.

use std::path::Path;

use anyhow::Result;

use crate::output::{existing_curves, read_curve, read_summary, summary_path};
use crate::summary::mean_stderr;

/// Largest accepted difference between a stored and a recomputed value.
pub const TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct VerifyReport {
    pub rows_checked: usize,
    pub curves_checked: usize,
    pub problems: Vec<String>,
}

impl VerifyReport {
    pub fn ok(&self) -> bool {
        self.problems.is_empty()
    }
}

pub fn verify_dir(out: &Path) -> Result<VerifyReport> {
    let mut report = VerifyReport::default();
    for row in read_summary(&summary_path(out))? {
        report.rows_checked += 1;
        let tag = format!("{}/{}", row.domain, row.method);
        let paths = existing_curves(out, &row.domain, &row.method)?;
        let mut finals = Vec::with_capacity(paths.len());
        for path in &paths {
            report.curves_checked += 1;
            let curve = match read_curve(path) {
                Ok(c) => c,
                Err(e) => {
                    report.problems.push(format!("{e:#}"));
                    continue;
                }
            };
            if curve.windows(2).any(|w| w[0].episode >= w[1].episode) {
                report
                    .problems
                    .push(format!("{}: episodes not strictly increasing", path.display()));
            }
            let Some(last) = curve.last() else {
                report.problems.push(format!("{}: no rows", path.display()));
                continue;
            };
            finals.push(last.eval_success);
        }
        if finals.len() != row.seeds {
            report.problems.push(format!(
                "{tag}: summary lists {} seeds, found {} curve files",
                row.seeds,
                finals.len()
            ));
        }
        let (mean, stderr) = mean_stderr(&finals);
        if (mean - row.mean_success).abs() > TOLERANCE {
            report.problems.push(format!(
                "{tag}: mean_success {} but curves give {mean}",
                row.mean_success
            ));
        }
        if (stderr - row.stderr).abs() > TOLERANCE {
            report
                .problems
                .push(format!("{tag}: stderr {} but curves give {stderr}", row.stderr));
        }
    }
    Ok(report)
}
