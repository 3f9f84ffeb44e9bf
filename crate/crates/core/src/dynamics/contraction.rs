use super::{DynamicsError, WordSource};
use crate::rng;

/// Separation beyond which the two orbits are no longer in one chart.
pub const DEFAULT_CHART_SIZE: f64 = 0.1;

/// Log-distances between the orbits of `q` and a nearby `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct ContractionLog {
    /// `log d(f^k x, f^k q)` for `k = 0..=n`, `-inf` where the points coincide.
    pub log_distances: Vec<f64>,
    /// Least-squares slope of the log-distances before the orbits left the chart.
    pub slope: Option<f64>,
    /// The two starting points are the same point.
    pub coincident: bool,
    /// First step at which the separation exceeded the chart size.
    pub escaped_at: Option<usize>,
}

/// Follows `q` and `x` under the same `n` letters and fits the exponential rate of
/// their separation.
pub fn contraction_check(
    source: WordSource<'_>,
    q: &[f64],
    x: &[f64],
    n: usize,
    seed: u64,
    chart_size: f64,
) -> Result<ContractionLog, DynamicsError> {
    let space = source.space();
    if q.len() != space.dim() || x.len() != space.dim() {
        return Err(DynamicsError::DimensionMismatch {
            expected: space.dim(),
            found: if q.len() != space.dim() { q.len() } else { x.len() },
        });
    }
    let coincident = q == x;
    let mut rng = rng::stream(seed, 0);
    let (mut a, mut b) = (q.to_vec(), x.to_vec());
    let mut log_distances = Vec::with_capacity(n + 1);
    let mut escaped_at = None;
    for k in 0..=n {
        let d = space.distance(&a, &b);
        log_distances.push(if d == 0.0 { f64::NEG_INFINITY } else { d.ln() });
        if escaped_at.is_none() && d > chart_size {
            escaped_at = Some(k);
        }
        if k < n {
            let g = source.next(&mut rng);
            a = g.apply(&a)?;
            b = g.apply(&b)?;
        }
    }
    let usable = escaped_at.unwrap_or(n + 1);
    let slope = if coincident { None } else { fit_slope(&log_distances[..usable]) };
    Ok(ContractionLog { log_distances, slope, coincident, escaped_at })
}

fn fit_slope(ys: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> =
        ys.iter().enumerate().filter(|(_, y)| y.is_finite()).map(|(i, &y)| (i as f64, y)).collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    Some(sxy / sxx)
}
