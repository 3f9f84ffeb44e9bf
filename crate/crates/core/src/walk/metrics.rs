use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::{EmpiricalMeasure, WalkError, WalkMeasure};
use crate::dynamics::{CompiledMap, SpaceKind};

/// Frequency cutoff `K` for the Weyl–Fourier metric.
pub const DEFAULT_FOURIER_CUTOFF: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Metric {
    /// Sup distance between CDFs; one-dimensional spaces only.
    Ks,
    /// `max_k |ĉ_k(a) − ĉ_k(b)|` over the frequencies of [`weyl_coefficients`].
    WeylFourier { cutoff: usize },
}

impl Metric {
    pub fn default_for(space: SpaceKind) -> Self {
        match space {
            SpaceKind::Interval | SpaceKind::Circle => Metric::Ks,
            SpaceKind::Torus(_) => Metric::WeylFourier { cutoff: DEFAULT_FOURIER_CUTOFF },
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Metric::Ks => "ks",
            Metric::WeylFourier { .. } => "weyl-fourier",
        }
    }
}

/// Kolmogorov–Smirnov distance between two weighted clouds on a 1-D space.
pub fn ks_distance(a: &EmpiricalMeasure, b: &EmpiricalMeasure) -> Result<f64, WalkError> {
    if a.space() != b.space() {
        return Err(WalkError::SpaceMismatch);
    }
    if a.dim() != 1 {
        return Err(WalkError::InvalidArgument("KS distance needs a one-dimensional space".into()));
    }
    let pos = sorted_atoms(a.coords().iter().copied().zip(a.weights().iter().copied()));
    let neg = sorted_atoms(b.coords().iter().copied().zip(b.weights().iter().map(|w| -w)));
    Ok(ks_sweep(&[pos, neg]))
}

fn sorted_atoms(atoms: impl Iterator<Item = (f64, f64)>) -> Vec<(f64, f64)> {
    let mut v: Vec<(f64, f64)> = atoms.collect();
    // stable sort: linear time on the presorted runs produced by monotone maps
    v.sort_by(|p, q| p.0.total_cmp(&q.0));
    v
}

/// `sup_x |Σ_lists Σ_{atoms ≤ x} w|` over lists sorted by position, with the
/// sign of each list folded into its weights.
fn ks_sweep(lists: &[Vec<(f64, f64)>]) -> f64 {
    let mut heads = vec![0usize; lists.len()];
    let (mut acc, mut sup) = (0.0f64, 0.0f64);
    loop {
        let next = lists
            .iter()
            .zip(&heads)
            .filter_map(|(l, &h)| l.get(h).map(|a| a.0))
            .min_by(|a, b| a.total_cmp(b));
        let Some(x) = next else { break };
        let mut step = 0.0;
        for (l, h) in lists.iter().zip(heads.iter_mut()) {
            // per-list subtotal, so mirrored lists cancel exactly
            let mut sub = 0.0;
            while let Some(&(y, w)) = l.get(*h) {
                if y != x {
                    break;
                }
                sub += w;
                *h += 1;
            }
            step += sub;
        }
        acc += step;
        sup = sup.max(acc.abs());
    }
    sup.min(1.0)
}

fn fourier_of(dim: usize, coords: &[f64], weights: &[f64], cutoff: usize) -> Vec<(f64, f64)> {
    // e^{2πi k x} by repeated multiplication from k = 1
    let mut out = vec![(0.0, 0.0); dim * cutoff];
    for (p, w) in coords.chunks_exact(dim).zip(weights) {
        for (i, &x) in p.iter().enumerate() {
            let (s1, c1) = (TAU * x.fract()).sin_cos();
            let (mut c, mut s) = (c1, s1);
            for acc in &mut out[i * cutoff..(i + 1) * cutoff] {
                acc.0 += w * c;
                acc.1 += w * s;
                (c, s) = (c * c1 - s * s1, s * c1 + c * s1);
            }
        }
    }
    out
}

fn fourier(nu: &EmpiricalMeasure, cutoff: usize) -> Vec<(f64, f64)> {
    fourier_of(nu.dim(), nu.coords(), nu.weights(), cutoff)
}

fn fourier_gap(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x.0 - y.0).hypot(x.1 - y.1)).fold(0.0, f64::max)
}

/// `|Σ_j w_j e^{2πi k·x_j}|` for `k = 1..=cutoff`, along each coordinate axis in
/// turn on tori (coordinate-major order).
pub fn weyl_coefficients(nu: &EmpiricalMeasure, cutoff: usize) -> Result<Vec<f64>, WalkError> {
    if cutoff == 0 {
        return Err(WalkError::InvalidArgument("frequency cutoff must be at least 1".into()));
    }
    Ok(fourier(nu, cutoff).into_iter().map(|(re, im)| re.hypot(im)).collect())
}

pub fn weyl_distance(a: &EmpiricalMeasure, b: &EmpiricalMeasure, cutoff: usize) -> Result<f64, WalkError> {
    if a.space() != b.space() {
        return Err(WalkError::SpaceMismatch);
    }
    if cutoff == 0 {
        return Err(WalkError::InvalidArgument("frequency cutoff must be at least 1".into()));
    }
    Ok(fourier_gap(&fourier(a, cutoff), &fourier(b, cutoff)))
}

pub fn distance(a: &EmpiricalMeasure, b: &EmpiricalMeasure, metric: Metric) -> Result<f64, WalkError> {
    match metric {
        Metric::Ks => ks_distance(a, b),
        Metric::WeylFourier { cutoff } => weyl_distance(a, b, cutoff),
    }
}

fn pushed_coords(map: &CompiledMap, dim: usize, coords: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; coords.len()];
    for (p, o) in coords.chunks_exact(dim).zip(out.chunks_exact_mut(dim)) {
        map.apply_into(p, o);
    }
    out
}

/// `(d(μ * ν, ν), [d(f_* ν, ν) for f in supp μ])`. The pushforwards are
/// computed once and shared by both.
fn residuals(mu: &WalkMeasure, nu: &EmpiricalMeasure, metric: Metric) -> Result<(f64, Vec<f64>), WalkError> {
    if mu.space() != nu.space() {
        return Err(WalkError::SpaceMismatch);
    }
    let d = nu.dim();
    match metric {
        Metric::Ks => {
            if d != 1 {
                return Err(WalkError::InvalidArgument("KS distance needs a one-dimensional space".into()));
            }
            let base = sorted_atoms(nu.coords().iter().copied().zip(nu.weights().iter().map(|w| -w)));
            let xs: Vec<f64> = base.iter().map(|a| a.0).collect();
            let pushes: Vec<Vec<(f64, f64)>> = (0..mu.len())
                .map(|i| {
                    let ys = pushed_coords(mu.compiled(i), 1, &xs);
                    sorted_atoms(ys.into_iter().zip(base.iter().map(|a| -a.1)))
                })
                .collect();
            let invariance = pushes.iter().map(|p| ks_sweep(&[p.clone(), base.clone()])).collect();
            let mut all: Vec<Vec<(f64, f64)>> = pushes
                .into_iter()
                .enumerate()
                .map(|(i, p)| p.into_iter().map(|(x, w)| (x, w * mu.probability(i))).collect())
                .collect();
            all.push(base);
            Ok((ks_sweep(&all), invariance))
        }
        Metric::WeylFourier { cutoff } => {
            if cutoff == 0 {
                return Err(WalkError::InvalidArgument("frequency cutoff must be at least 1".into()));
            }
            let base = fourier(nu, cutoff);
            let pushes: Vec<Vec<(f64, f64)>> = (0..mu.len())
                .map(|i| fourier_of(d, &pushed_coords(mu.compiled(i), d, nu.coords()), nu.weights(), cutoff))
                .collect();
            let invariance = pushes.iter().map(|p| fourier_gap(p, &base)).collect();
            let mixed: Vec<(f64, f64)> = (0..base.len())
                .map(|k| {
                    pushes.iter().enumerate().fold((0.0, 0.0), |(re, im), (i, p)| {
                        (re + mu.probability(i) * p[k].0, im + mu.probability(i) * p[k].1)
                    })
                })
                .collect();
            Ok((fourier_gap(&mixed, &base), invariance))
        }
    }
}

/// `d(μ * ν, ν)`, with `μ * ν` computed exactly.
pub fn stationarity_residual(mu: &WalkMeasure, nu: &EmpiricalMeasure, metric: Metric) -> Result<f64, WalkError> {
    Ok(residuals(mu, nu, metric)?.0)
}

/// `d(f_* ν, ν)` for each generator `f` in the support of `μ`, in atom order.
pub fn invariance_residual(mu: &WalkMeasure, nu: &EmpiricalMeasure, metric: Metric) -> Result<Vec<f64>, WalkError> {
    Ok(residuals(mu, nu, metric)?.1)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub metric: Metric,
    pub stationarity: f64,
    pub invariance: Vec<f64>,
    pub sample_size: usize,
    pub seed: Option<u64>,
}

impl ResidualReport {
    pub fn csv(&self) -> String {
        let mut s = String::from("quantity,generator,metric,value,samples\n");
        s += &format!("stationarity,,{},{:.15e},{}\n", self.metric.name(), self.stationarity, self.sample_size);
        for (i, r) in self.invariance.iter().enumerate() {
            s += &format!("invariance,{i},{},{r:.15e},{}\n", self.metric.name(), self.sample_size);
        }
        s
    }
}

pub fn residual_report(
    mu: &WalkMeasure,
    nu: &EmpiricalMeasure,
    metric: Metric,
    seed: Option<u64>,
) -> Result<ResidualReport, WalkError> {
    let (stationarity, invariance) = residuals(mu, nu, metric)?;
    Ok(ResidualReport { metric, stationarity, invariance, sample_size: nu.len(), seed })
}

fn cell(space: SpaceKind, p: &[f64], bins: usize) -> usize {
    p.iter().fold(0, |acc, &x| {
        let mut b = (x * bins as f64).floor() as isize;
        if space.is_periodic() {
            b = b.rem_euclid(bins as isize);
        }
        acc * bins + b.clamp(0, bins as isize - 1) as usize
    })
}

/// Histogram estimate of `H(f | f(x))` for `f ~ μ`, `x ~ ν`, on `bins` cells per
/// axis. Never exceeds `H(μ)`; equals it when every `f_* ν` has the same
/// histogram.
pub fn posterior_entropy(mu: &WalkMeasure, nu: &EmpiricalMeasure, bins: usize) -> Result<f64, WalkError> {
    if mu.space() != nu.space() {
        return Err(WalkError::SpaceMismatch);
    }
    if bins == 0 {
        return Err(WalkError::InvalidArgument("bins must be positive".into()));
    }
    let cells = bins
        .checked_pow(nu.dim() as u32)
        .filter(|&c| c <= 1 << 24)
        .ok_or_else(|| WalkError::InvalidArgument("too many histogram cells".into()))?;
    let mut hist = vec![vec![0.0f64; cells]; mu.len()];
    let mut y = vec![0.0; nu.dim()];
    for (i, h) in hist.iter_mut().enumerate() {
        for (p, w) in nu.points().zip(nu.weights()) {
            mu.compiled(i).apply_into(p, &mut y);
            h[cell(nu.space(), &y, bins)] += w * mu.probability(i);
        }
    }
    let mut total = 0.0;
    for c in 0..cells {
        let m: f64 = hist.iter().map(|h| h[c]).sum();
        if m > 0.0 {
            total -= hist.iter().filter(|h| h[c] > 0.0).map(|h| h[c] * (h[c] / m).ln()).sum::<f64>();
        }
    }
    Ok(total.max(0.0))
}
