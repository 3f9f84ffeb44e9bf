use super::{WalkError, WalkMeasure};
use crate::dynamics::SpaceKind;
use crate::{parallel, rng};

/// Largest point count exact convolution will produce by default.
pub const DEFAULT_CONVOLVE_BUDGET: usize = 1 << 26;

/// Weighted point cloud. Points are stored flat, `dim` coordinates each.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalMeasure {
    space: SpaceKind,
    coords: Vec<f64>,
    weights: Vec<f64>,
}

impl EmpiricalMeasure {
    pub fn new(space: SpaceKind, coords: Vec<f64>, weights: Vec<f64>) -> Result<Self, WalkError> {
        let d = space.dim();
        if coords.len() != d * weights.len() {
            return Err(WalkError::InvalidArgument("coordinate count does not match weights".into()));
        }
        if weights.is_empty() {
            return Err(WalkError::InvalidArgument("empty measure".into()));
        }
        if weights.iter().any(|w| !(*w >= 0.0)) {
            return Err(WalkError::InvalidArgument("weights must be nonnegative".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(WalkError::InvalidArgument(format!("weights sum to {total}, not 1")));
        }
        let inside = |x: &f64| if space.is_periodic() { (0.0..1.0).contains(x) } else { (0.0..=1.0).contains(x) };
        if !coords.iter().all(inside) {
            return Err(WalkError::InvalidArgument("point outside the space".into()));
        }
        Ok(Self { space, coords, weights })
    }

    /// Equal weights.
    pub fn uniform(space: SpaceKind, coords: Vec<f64>) -> Result<Self, WalkError> {
        let n = coords.len() / space.dim().max(1);
        Self::new(space, coords, vec![1.0 / n.max(1) as f64; n])
    }

    pub fn dirac(space: SpaceKind, q: &[f64]) -> Result<Self, WalkError> {
        Self::new(space, q.to_vec(), vec![1.0])
    }

    pub fn space(&self) -> SpaceKind {
        self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        let d = self.dim();
        &self.coords[i * d..(i + 1) * d]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim())
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Concatenation `a·self + b·other`.
    pub fn mix(&self, a: f64, other: &Self, b: f64) -> Result<Self, WalkError> {
        if self.space != other.space {
            return Err(WalkError::SpaceMismatch);
        }
        let coords = [self.coords.as_slice(), other.coords.as_slice()].concat();
        let weights = self.weights.iter().map(|w| a * w).chain(other.weights.iter().map(|w| b * w)).collect();
        Self::new(self.space, coords, weights)
    }

    pub fn csv_header(&self) -> String {
        let mut cols: Vec<String> = (1..=self.dim()).map(|i| format!("x{i}")).collect();
        cols.push("weight".into());
        cols.join(",")
    }

    /// One line per point: coordinates then weight, round-trippable.
    pub fn write_csv<W: std::io::Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{}", self.csv_header())?;
        for (p, w) in self.points().zip(&self.weights) {
            for x in p {
                write!(out, "{x:e},")?;
            }
            writeln!(out, "{w:e}")?;
        }
        Ok(())
    }

    pub fn read_csv(space: SpaceKind, text: &str) -> Result<Self, WalkError> {
        let d = space.dim();
        let mut lines = text.lines();
        lines.next();
        let (mut coords, mut weights) = (Vec::new(), Vec::new());
        for (i, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let vals: Result<Vec<f64>, _> = line.split(',').map(|s| s.trim().parse::<f64>()).collect();
            let vals = vals.map_err(|e| WalkError::InvalidArgument(format!("line {}: {e}", i + 2)))?;
            if vals.len() != d + 1 {
                return Err(WalkError::InvalidArgument(format!("line {}: expected {} columns", i + 2, d + 1)));
            }
            coords.extend_from_slice(&vals[..d]);
            weights.push(vals[d]);
        }
        Self::new(space, coords, weights)
    }
}

/// `ν_{N,q}` sampled by `m` independent paths of length `n` started at `q`.
///
/// Each path records its state at times `burn_in..n`; all samples get equal
/// weight. Path `p` draws from stream `p` of `seed`, and points are ordered by
/// path then time, so the result does not depend on the thread count.
pub fn empirical_measure(
    mu: &WalkMeasure,
    q: &[f64],
    n: usize,
    m: usize,
    seed: u64,
    burn_in: usize,
) -> Result<EmpiricalMeasure, WalkError> {
    if n == 0 || m == 0 {
        return Err(WalkError::InvalidArgument("N and M must be at least 1".into()));
    }
    if burn_in >= n {
        return Err(WalkError::InvalidArgument("burn-in must be less than N".into()));
    }
    let d = mu.dim();
    if q.len() != d {
        return Err(WalkError::Dynamics(crate::dynamics::DynamicsError::DimensionMismatch {
            expected: d,
            found: q.len(),
        }));
    }
    // validates q against the domain
    mu.generator(0).apply(q)?;
    let keep = n - burn_in;
    let paths = parallel::map_range(m, |p| {
        let mut r = rng::stream(seed, p as u64);
        let mut x = q.to_vec();
        let mut y = vec![0.0; d];
        let mut out = Vec::with_capacity(keep * d);
        for t in 0..n {
            if t >= burn_in {
                out.extend_from_slice(&x);
            }
            if t + 1 < n {
                mu.compiled(mu.sample_index(&mut r)).apply_into(&x, &mut y);
                std::mem::swap(&mut x, &mut y);
            }
        }
        out
    });
    let coords = paths.concat();
    let total = keep * m;
    EmpiricalMeasure::new(mu.space(), coords, vec![1.0 / total as f64; total])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConvolveMode {
    /// Every point is pushed by every atom; the result has `|supp μ|·|ν|` points.
    Exact { budget: usize },
    /// One generator drawn per point.
    Sampled { seed: u64 },
}

/// `μ * ν`.
pub fn convolve_push(mu: &WalkMeasure, nu: &EmpiricalMeasure, mode: ConvolveMode) -> Result<EmpiricalMeasure, WalkError> {
    if mu.space() != nu.space() {
        return Err(WalkError::SpaceMismatch);
    }
    let d = nu.dim();
    match mode {
        ConvolveMode::Exact { budget } => {
            let needed = nu.len().saturating_mul(mu.len());
            if needed > budget {
                return Err(WalkError::BudgetExceeded { needed, budget });
            }
            let mut coords = vec![0.0; needed * d];
            let mut weights = Vec::with_capacity(needed);
            let mut out = coords.chunks_exact_mut(d);
            for (p, w) in nu.points().zip(nu.weights()) {
                for i in 0..mu.len() {
                    mu.compiled(i).apply_into(p, out.next().expect("sized above"));
                    weights.push(w * mu.probability(i));
                }
            }
            Ok(EmpiricalMeasure { space: nu.space(), coords, weights })
        }
        ConvolveMode::Sampled { seed } => {
            let mut r = rng::stream(seed, 0);
            let mut coords = vec![0.0; nu.coords.len()];
            for (p, out) in nu.points().zip(coords.chunks_exact_mut(d)) {
                mu.compiled(mu.sample_index(&mut r)).apply_into(p, out);
            }
            Ok(EmpiricalMeasure { space: nu.space(), coords, weights: nu.weights.clone() })
        }
    }
}
