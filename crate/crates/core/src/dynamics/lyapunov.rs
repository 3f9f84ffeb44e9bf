use nalgebra::DMatrix;

use super::{DynamicsError, WordSource};
use crate::{parallel, rng};

/// Finite-time Lyapunov spectrum, in nats per step, sorted descending.
#[derive(Debug, Clone, PartialEq)]
pub struct LyapunovReport {
    pub exponents: Vec<f64>,
    pub n_steps: usize,
    pub seed: u64,
    /// `|Σ exponents − (1/n) Σ log|det J||`.
    pub residual: f64,
}

impl LyapunovReport {
    pub fn sum(&self) -> f64 {
        self.exponents.iter().sum()
    }

    pub fn csv_header(dim: usize) -> String {
        let mut cols = vec!["seed".to_string(), "n".to_string()];
        cols.extend((1..=dim).map(|i| format!("lambda{i}")));
        cols.push("residual".into());
        cols.join(",")
    }

    pub fn csv_row(&self) -> String {
        let mut cols = vec![self.seed.to_string(), self.n_steps.to_string()];
        cols.extend(self.exponents.iter().map(|x| format!("{x:.15e}")));
        cols.push(format!("{:.6e}", self.residual));
        cols.join(",")
    }
}

/// Running state of the QR (Benettin) iteration.
pub(crate) struct QrAccumulator {
    basis: DMatrix<f64>,
    log_r: Vec<f64>,
    log_det: f64,
    steps: usize,
}

impl QrAccumulator {
    pub(crate) fn new(dim: usize) -> Self {
        Self { basis: DMatrix::identity(dim, dim), log_r: vec![0.0; dim], log_det: 0.0, steps: 0 }
    }

    pub(crate) fn push(&mut self, jac: &DMatrix<f64>) -> Result<(), DynamicsError> {
        let det = jac.determinant();
        if det == 0.0 || !det.is_finite() {
            return Err(DynamicsError::NonInvertibleJacobian { step: self.steps });
        }
        self.log_det += det.abs().ln();
        let qr = (jac * &self.basis).qr();
        let r = qr.r();
        for (i, acc) in self.log_r.iter_mut().enumerate() {
            let rii = r[(i, i)].abs();
            if rii == 0.0 {
                return Err(DynamicsError::NonInvertibleJacobian { step: self.steps });
            }
            *acc += rii.ln();
        }
        self.basis = qr.q();
        self.steps += 1;
        Ok(())
    }

    /// Forgets the accumulated sums but keeps the current basis.
    pub(crate) fn restart(&mut self) {
        self.log_r.iter_mut().for_each(|x| *x = 0.0);
        self.log_det = 0.0;
        self.steps = 0;
    }

    pub(crate) fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub(crate) fn report(&self, seed: u64) -> LyapunovReport {
        let n = self.steps.max(1) as f64;
        let mut exponents: Vec<f64> = self.log_r.iter().map(|s| s / n).collect();
        let residual = (self.log_r.iter().sum::<f64>() - self.log_det).abs() / n;
        exponents.sort_by(|a, b| b.total_cmp(a));
        LyapunovReport { exponents, n_steps: self.steps, seed, residual }
    }
}

/// QR-reorthogonalized Lyapunov spectrum along `n` steps of the orbit of `q0`.
pub fn lyapunov_qr(
    source: WordSource<'_>,
    q0: &[f64],
    n: usize,
    seed: u64,
) -> Result<LyapunovReport, DynamicsError> {
    lyapunov_qr_after(source, q0, 0, n, seed)
}

/// Like [`lyapunov_qr`], but first runs `transient` uncounted steps so the QR
/// basis can align with the Oseledets directions. Without it the estimate
/// carries an `O(1/n)` bias from the starting frame.
pub fn lyapunov_qr_after(
    source: WordSource<'_>,
    q0: &[f64],
    transient: usize,
    n: usize,
    seed: u64,
) -> Result<LyapunovReport, DynamicsError> {
    if n == 0 {
        return Err(DynamicsError::NoSteps);
    }
    if q0.len() != source.dim() {
        return Err(DynamicsError::DimensionMismatch { expected: source.dim(), found: q0.len() });
    }
    let mut rng = rng::stream(seed, 0);
    let mut acc = QrAccumulator::new(source.dim());
    let mut q = q0.to_vec();
    for step in 0..transient + n {
        if step == transient {
            acc.restart();
        }
        let g = source.next(&mut rng);
        acc.push(&g.jacobian(&q)?)?;
        q = g.apply(&q)?;
    }
    Ok(acc.report(seed))
}

/// How the spectrum is accumulated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LyapunovMethod {
    /// Exact integer products when every generator is a toral automorphism,
    /// floating-point QR otherwise.
    #[default]
    Auto,
    Qr,
    Exact,
}

/// Dispatches on `method`; see [`lyapunov_qr_after`] and [`super::lyapunov_exact`].
pub fn lyapunov_with(
    method: LyapunovMethod,
    source: WordSource<'_>,
    q0: &[f64],
    transient: usize,
    n: usize,
    seed: u64,
) -> Result<LyapunovReport, DynamicsError> {
    match method {
        LyapunovMethod::Qr => lyapunov_qr_after(source, q0, transient, n, seed),
        LyapunovMethod::Exact => super::lyapunov_exact(source, q0, transient, n, seed),
        LyapunovMethod::Auto if super::supports_exact(source) => super::lyapunov_exact(source, q0, transient, n, seed),
        LyapunovMethod::Auto => lyapunov_qr_after(source, q0, transient, n, seed),
    }
}

/// One report per seed, computed in parallel and returned in the order of `seeds`.
pub fn lyapunov_many(
    source: WordSource<'_>,
    q0: &[f64],
    n: usize,
    seeds: &[u64],
) -> Result<Vec<LyapunovReport>, DynamicsError> {
    parallel::map_ordered(seeds, |&s| lyapunov_qr(source, q0, n, s)).into_iter().collect()
}
