use std::collections::HashSet;

use super::{EmpiricalMeasure, WalkError};

/// Points this close below a box edge are counted in the box to its right. Large
/// enough to absorb rounding in computed endpoints like `2/3`, small enough that
/// genuine points just left of an edge stay put.
const EDGE_TOLERANCE: f64 = 1e-14;

/// Least-squares slope of `log N(s)` against `log(1/s)`, where `N(s)` counts the
/// boxes of side `s` holding positive mass. One-dimensional spaces only.
pub fn box_dimension(nu: &EmpiricalMeasure, scales: &[f64]) -> Result<f64, WalkError> {
    if nu.dim() != 1 {
        return Err(WalkError::InvalidArgument("box dimension needs a one-dimensional space".into()));
    }
    if scales.len() < 3 {
        return Err(WalkError::DegenerateFit("need at least three scales".into()));
    }
    if scales.iter().any(|s| !(*s > 0.0 && *s <= 1.0)) {
        return Err(WalkError::InvalidArgument("scales must lie in (0, 1]".into()));
    }
    let mut pts = Vec::with_capacity(scales.len());
    for &s in scales {
        let n_boxes = ((1.0 / s).round() as i64).max(1);
        let boxes = nu
            .coords()
            .iter()
            .zip(nu.weights())
            .filter(|(_, w)| **w > 0.0)
            .map(|(x, _)| (((x + EDGE_TOLERANCE) / s).floor() as i64).clamp(0, n_boxes - 1));
        let occupied = if n_boxes <= 1 << 24 {
            let mut seen = vec![false; n_boxes as usize];
            boxes.for_each(|b| seen[b as usize] = true);
            seen.into_iter().filter(|&b| b).count()
        } else {
            boxes.collect::<HashSet<i64>>().len()
        };
        pts.push(((1.0 / s).ln(), (occupied as f64).ln()));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx < 1e-12 {
        return Err(WalkError::DegenerateFit("scales must be distinct".into()));
    }
    Ok(pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / sxx)
}
