use nalgebra::DMatrix;

use super::{ExpansionError, PlaneSpec};
use crate::dynamics::DynamicsError;
use crate::rng;
use crate::walk::WalkMeasure;

/// Default cap on `|supp μ|^N` in exact mode.
pub const DEFAULT_WORD_BUDGET: u64 = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SigmaMode {
    /// Every word of length `N`, in lexicographic order of generator indices.
    Exact { budget: u64 },
    /// `samples` words drawn from `μ^N` using stream `stream` of `seed`.
    MonteCarlo { samples: usize, seed: u64, stream: u64 },
}

impl SigmaMode {
    pub fn exact() -> Self {
        SigmaMode::Exact { budget: DEFAULT_WORD_BUDGET }
    }

    pub fn mc(samples: usize, seed: u64) -> Self {
        SigmaMode::MonteCarlo { samples, seed, stream: 0 }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SigmaMode::Exact { .. } => "exact",
            SigmaMode::MonteCarlo { .. } => "mc",
        }
    }

    pub(crate) fn with_stream(self, s: u64) -> Self {
        match self {
            SigmaMode::MonteCarlo { samples, seed, .. } => SigmaMode::MonteCarlo { samples, seed, stream: s },
            exact => exact,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaEstimate {
    pub value: f64,
    /// Zero in exact mode.
    pub stderr: f64,
    pub words: u64,
    /// Total probability of the words visited (exact mode), or 1.
    pub weight_sum: f64,
}

/// `σ(ξ_P, N) = ∫ log ‖Λ^d D_q f^N (ξ_P)‖ dμ^{*N}(f)`.
pub fn sigma(mu: &WalkMeasure, n: usize, plane: &PlaneSpec, mode: SigmaMode) -> Result<SigmaEstimate, ExpansionError> {
    sigma_frame(mu, n, plane.base(), plane.frame(), mode)
}

/// Same as [`sigma`] for the span of the columns of `frame`, which need not be
/// orthonormal: the result is `∫ log(‖Λ^d J ξ‖ / ‖ξ‖)`.
pub fn sigma_frame(
    mu: &WalkMeasure,
    n: usize,
    base: &[f64],
    frame: &DMatrix<f64>,
    mode: SigmaMode,
) -> Result<SigmaEstimate, ExpansionError> {
    let mut acc = Moments::default();
    let words = visit_words(mu, n, base, std::slice::from_ref(frame), mode, |p, l| acc.push(p, l[0]))?;
    Ok(acc.finish(mode, words))
}

/// Weighted mean, or sample mean with standard error.
#[derive(Default)]
pub(crate) struct Moments {
    weighted: f64,
    weight: f64,
    sum: f64,
    sum_sq: f64,
    count: u64,
}

impl Moments {
    pub(crate) fn push(&mut self, p: f64, x: f64) {
        self.weighted += p * x;
        self.weight += p;
        self.sum += x;
        self.sum_sq += x * x;
        self.count += 1;
    }

    pub(crate) fn finish(&self, mode: SigmaMode, words: u64) -> SigmaEstimate {
        match mode {
            SigmaMode::Exact { .. } => {
                SigmaEstimate { value: self.weighted, stderr: 0.0, words, weight_sum: self.weight }
            }
            SigmaMode::MonteCarlo { .. } => {
                let n = self.count as f64;
                let mean = self.sum / n;
                let var = if self.count > 1 { ((self.sum_sq - n * mean * mean) / (n - 1.0)).max(0.0) } else { 0.0 };
                SigmaEstimate { value: mean, stderr: (var / n).sqrt(), words, weight_sum: 1.0 }
            }
        }
    }
}

/// Tangent frames carried along one word, with accumulated log-volumes.
#[derive(Clone)]
struct Node {
    q: Vec<f64>,
    /// Orthonormal frames and their computed log-volumes (zero up to rounding).
    frames: Vec<(DMatrix<f64>, f64)>,
    logs: Vec<f64>,
    p: f64,
}

/// Orthonormal basis of the column span and `log` of the volume of the columns.
fn orthonormalize(m: DMatrix<f64>) -> (DMatrix<f64>, f64) {
    if m.ncols() == 1 {
        let norm = m.norm();
        return (m / norm, norm.ln());
    }
    let qr = m.qr();
    let vol = qr.r().diagonal().iter().map(|r| r.abs().ln()).sum();
    (qr.q(), vol)
}

fn log_volume(m: &DMatrix<f64>) -> f64 {
    if m.ncols() == 1 {
        return m.norm().ln();
    }
    m.clone().qr().r().diagonal().iter().map(|r| r.abs().ln()).sum()
}

/// Per-generator data reused at every step.
struct Steps<'a> {
    mu: &'a WalkMeasure,
    /// The Jacobian of generators whose Jacobian is constant and whose float
    /// form can be applied without domain checks.
    fixed: Vec<Option<DMatrix<f64>>>,
}

impl<'a> Steps<'a> {
    fn new(mu: &'a WalkMeasure, base: &[f64]) -> Result<Self, ExpansionError> {
        let mut fixed = Vec::with_capacity(mu.len());
        for i in 0..mu.len() {
            let g = mu.generator(i);
            fixed.push(if g.has_constant_jacobian() && g.preserves_unit_interval() { Some(g.jacobian(base)?) } else { None });
        }
        Ok(Steps { mu, fixed })
    }

    fn step(&self, node: &Node, i: usize, depth: usize) -> Result<Node, ExpansionError> {
        let g = self.mu.generator(i);
        let (jac, q) = match &self.fixed[i] {
            Some(j) => {
                let mut q = vec![0.0; node.q.len()];
                self.mu.compiled(i).apply_into(&node.q, &mut q);
                (std::borrow::Cow::Borrowed(j), q)
            }
            None => (std::borrow::Cow::Owned(g.jacobian(&node.q)?), g.apply(&node.q)?),
        };
        let mut frames = Vec::with_capacity(node.frames.len());
        let mut logs = node.logs.clone();
        for ((f, vol), l) in node.frames.iter().zip(logs.iter_mut()) {
            let (q, image_vol) = orthonormalize(jac.as_ref() * f);
            if !image_vol.is_finite() {
                return Err(DynamicsError::NonInvertibleJacobian { step: depth }.into());
            }
            // measured against the same computed volume of the frame, so an
            // isometry that maps the frame to itself bitwise contributes exactly 0
            *l += image_vol - vol;
            let qvol = log_volume(&q);
            frames.push((q, qvol));
        }
        Ok(Node { q, frames, logs, p: node.p * self.mu.probability(i) })
    }
}

/// Calls `leaf(p, log_ratios)` for each word, where `log_ratios[k]` is
/// `log(‖Λ J_w ξ_k‖ / ‖ξ_k‖)` for `frames[k]`. Returns the number of words.
pub(crate) fn visit_words(
    mu: &WalkMeasure,
    n: usize,
    base: &[f64],
    frames: &[DMatrix<f64>],
    mode: SigmaMode,
    mut leaf: impl FnMut(f64, &[f64]),
) -> Result<u64, ExpansionError> {
    if n == 0 {
        return Err(DynamicsError::NoSteps.into());
    }
    let dim = mu.dim();
    if base.len() != dim {
        return Err(DynamicsError::DimensionMismatch { expected: dim, found: base.len() }.into());
    }
    let steps = Steps::new(mu, base)?;
    let mut root = Node { q: base.to_vec(), frames: Vec::new(), logs: Vec::new(), p: 1.0 };
    for f in frames {
        if f.nrows() != dim || f.ncols() == 0 || f.ncols() > dim {
            return Err(ExpansionError::InvalidPlane(format!("frame of shape {:?} in dimension {dim}", f.shape())));
        }
        let vol = log_volume(f);
        if !vol.is_finite() {
            return Err(ExpansionError::InvalidPlane("frame vectors are linearly dependent".into()));
        }
        root.frames.push((f.clone(), vol));
        root.logs.push(0.0);
    }
    match mode {
        SigmaMode::Exact { budget } => {
            let words = (mu.len() as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
            if words > budget as u128 {
                return Err(ExpansionError::BudgetExceeded { words, budget });
            }
            // depth-first, children in generator order: leaves come out lexicographically
            let mut stack = vec![(root, 0usize)];
            while let Some((node, depth)) = stack.pop() {
                if depth == n {
                    leaf(node.p, &node.logs);
                    continue;
                }
                for i in (0..mu.len()).rev() {
                    stack.push((steps.step(&node, i, depth)?, depth + 1));
                }
            }
            Ok(words as u64)
        }
        SigmaMode::MonteCarlo { samples, seed, stream } => {
            if samples == 0 {
                return Err(ExpansionError::InvalidArgument("samples must be positive".into()));
            }
            let mut r = rng::stream(seed, stream);
            for _ in 0..samples {
                let mut node = root.clone();
                for depth in 0..n {
                    node = steps.step(&node, mu.sample_index(&mut r), depth)?;
                }
                leaf(1.0, &node.logs);
            }
            Ok(samples as u64)
        }
    }
}
