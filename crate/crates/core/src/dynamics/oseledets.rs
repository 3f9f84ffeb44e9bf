use nalgebra::DMatrix;

use super::lyapunov::QrAccumulator;
use super::{DynamicsError, WordSource};
use crate::rng;

/// Finite-time estimate of the forward Oseledets filtration at the base point.
///
/// These are approximations: `angle_stability[i]` is the largest principal angle
/// between the estimate of `filtration[i]` after `n` and after `2n` steps.
#[derive(Debug, Clone)]
pub struct OseledetsFlag {
    pub n_steps: usize,
    /// QR exponent estimates over the first `n` steps, descending.
    pub exponents: Vec<f64>,
    /// `filtration[i]`: orthonormal basis of the slow subspace `E^{≤λ_i}`
    /// (`d - i` columns), nested decreasing in `i`.
    pub filtration: Vec<DMatrix<f64>>,
    /// Orthonormal columns ordered from most to least expanded, at the orbit
    /// endpoint after `n` steps.
    pub expanded: DMatrix<f64>,
    pub angle_stability: Vec<f64>,
}

impl OseledetsFlag {
    /// Unit vector along the most expanded direction at the orbit endpoint.
    pub fn unstable_direction(&self) -> Vec<f64> {
        self.expanded.column(0).iter().copied().collect()
    }

    /// Unit vector spanning the slowest subspace at the base point.
    pub fn stable_direction(&self) -> Vec<f64> {
        self.filtration.last().expect("nonempty").column(0).iter().copied().collect()
    }
}

/// Runs `2n` steps from `q0` and estimates the forward filtration from the
/// Jacobians along the orbit.
pub fn oseledets_flag(
    source: WordSource<'_>,
    q0: &[f64],
    n: usize,
    seed: u64,
    gap_threshold: f64,
) -> Result<OseledetsFlag, DynamicsError> {
    if n == 0 {
        return Err(DynamicsError::NoSteps);
    }
    if q0.len() != source.dim() {
        return Err(DynamicsError::DimensionMismatch { expected: source.dim(), found: q0.len() });
    }
    let mut rng = rng::stream(seed, 0);
    let mut q = q0.to_vec();
    let mut jacobians = Vec::with_capacity(2 * n);
    for _ in 0..2 * n {
        let g = source.next(&mut rng);
        jacobians.push(g.jacobian(&q)?);
        q = g.apply(&q)?;
    }
    flag_from_jacobians(&jacobians, n, gap_threshold)
}

/// Same as [`oseledets_flag`] over an explicit cocycle; `jacobians` must hold at
/// least `2n` matrices, applied in order.
pub fn flag_from_jacobians(
    jacobians: &[DMatrix<f64>],
    n: usize,
    gap_threshold: f64,
) -> Result<OseledetsFlag, DynamicsError> {
    if n == 0 || jacobians.len() < 2 * n {
        return Err(DynamicsError::NoSteps);
    }
    let d = jacobians[0].nrows();
    let mut acc = QrAccumulator::new(d);
    for j in &jacobians[..n] {
        acc.push(j)?;
    }
    let report = acc.report(0);
    for i in 0..d.saturating_sub(1) {
        let gap = report.exponents[i] - report.exponents[i + 1];
        if gap < gap_threshold {
            return Err(DynamicsError::GapTooSmall { index: i, gap });
        }
    }
    let expanded = acc.basis().clone();
    let at_n = right_flag(&jacobians[..n]);
    let at_2n = right_flag(&jacobians[..2 * n]);
    let filtration: Vec<DMatrix<f64>> = (0..d).map(|i| at_n.columns(i, d - i).into_owned()).collect();
    let angle_stability = (0..d)
        .map(|i| subspace_angle(&filtration[i], &at_2n.columns(i, d - i).into_owned()))
        .collect();
    Ok(OseledetsFlag { n_steps: n, exponents: report.exponents, filtration, expanded, angle_stability })
}

/// Orthonormal basis whose leading `k` columns span the `k` most expanded right
/// singular directions of `J_last ⋯ J_first`, for every `k`. Computed by QR
/// iteration on the transposed cocycle, which stays accurate when the singular
/// values differ by more than the floating-point range.
fn right_flag(jacobians: &[DMatrix<f64>]) -> DMatrix<f64> {
    let d = jacobians[0].nrows();
    let mut basis = DMatrix::<f64>::identity(d, d);
    for j in jacobians.iter().rev() {
        basis = (j.transpose() * basis).qr().q();
    }
    basis
}

/// Largest principal angle between the column spans of two orthonormal matrices
/// with the same number of columns.
pub fn subspace_angle(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let residual = b - a * (a.transpose() * b);
    let s = residual.singular_values().max();
    s.clamp(0.0, 1.0).asin()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::SystemSpec;

    fn line(v: &[f64]) -> DMatrix<f64> {
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        DMatrix::from_column_slice(v.len(), 1, &v.iter().map(|x| x / n).collect::<Vec<_>>())
    }

    #[test]
    fn cat_map_unstable_line() {
        let a = SystemSpec::toral(&[vec![2, 1], vec![1, 1]]).unwrap();
        let f = oseledets_flag(WordSource::Fixed(&a), &[0.2, 0.6], 40, 0, 0.1).unwrap();
        // top eigenvector of [[2,1],[1,1]] is (φ, 1)
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let top = line(&[phi, 1.0]);
        let u = DMatrix::from_column_slice(2, 1, &f.unstable_direction());
        assert!(subspace_angle(&top, &u) < 1e-6);
        let s = DMatrix::from_column_slice(2, 1, &f.stable_direction());
        assert!(subspace_angle(&line(&[1.0, -phi]), &s) < 1e-6);
        assert!(f.angle_stability.iter().all(|&a| a < 1e-6));
    }

    #[test]
    fn identity_has_no_gap() {
        let id = SystemSpec::toral(&[vec![1, 0], vec![0, 1]]).unwrap();
        assert!(matches!(
            oseledets_flag(WordSource::Fixed(&id), &[0.2, 0.6], 10, 0, 1e-6),
            Err(DynamicsError::GapTooSmall { index: 0, .. })
        ));
    }

    #[test]
    fn diagonal_splitting_is_axes() {
        let d = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 0.5]);
        let f = flag_from_jacobians(&vec![d; 20], 10, 0.1).unwrap();
        let e1 = line(&[1.0, 0.0]);
        let e2 = line(&[0.0, 1.0]);
        let s = DMatrix::from_column_slice(2, 1, &f.stable_direction());
        let u = DMatrix::from_column_slice(2, 1, &f.unstable_direction());
        assert_eq!(subspace_angle(&e2, &s), 0.0);
        assert_eq!(subspace_angle(&e1, &u), 0.0);
    }
}
