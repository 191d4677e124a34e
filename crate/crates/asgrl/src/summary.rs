//! Mean and standard error across seeds.

/// Mean and standard error of the mean, using the population standard
/// deviation: `sqrt(Σ(x−μ)²/n) / sqrt(n)`. Empty input gives `(0, 0)`.
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (0.0, 0.0);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt() / n.sqrt())
}

/// Per-checkpoint aggregate of several curves sampled at the same episodes.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvePoint {
    pub episode: usize,
    pub mean_steps: f64,
    pub mean_success: f64,
    pub stderr: f64,
    pub seeds: usize,
}

/// Aggregates `(episode, steps, success)` series point by point. Series
/// shorter than the longest one simply stop contributing.
pub fn aggregate_curves(series: &[Vec<(usize, u64, f64)>]) -> Vec<CurvePoint> {
    let len = series.iter().map(Vec::len).max().unwrap_or(0);
    (0..len)
        .map(|i| {
            let rows: Vec<_> = series.iter().filter_map(|s| s.get(i)).collect();
            let succ: Vec<f64> = rows.iter().map(|r| r.2).collect();
            let (mean_success, stderr) = mean_stderr(&succ);
            CurvePoint {
                episode: rows[0].0,
                mean_steps: rows.iter().map(|r| r.1 as f64).sum::<f64>() / rows.len() as f64,
                mean_success,
                stderr,
                seeds: rows.len(),
            }
        })
        .collect()
}
