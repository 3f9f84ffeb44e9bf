use std::f64::consts::PI;

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use super::sigma::{visit_words, Moments};
use super::{ExpansionError, PlaneSpec, SigmaEstimate, SigmaMode};
use crate::dynamics::SystemSpec;
use crate::walk::WalkMeasure;
use crate::{parallel, rng};

/// Planes to scan.
#[derive(Debug, Clone)]
pub enum PlaneGrid {
    /// Lines at angles `kπ/count`, `k = 0..count`, in a 2-dimensional tangent space.
    Angular { base: Vec<f64>, count: usize },
    /// `count` uniformly random `d`-planes (Gaussian frames). With `random_bases`
    /// each plane also gets a uniformly random base point; otherwise all sit at `base`.
    Random { base: Vec<f64>, d: usize, count: usize, seed: u64, random_bases: bool },
    Explicit(Vec<PlaneSpec>),
}

/// Nested pairs `P₀ ⊂ P₁` to scan.
#[derive(Debug, Clone)]
pub enum GapGrid {
    /// `P₀` the line at angle `kπ/count`, `P₁` the whole 2-dimensional tangent space.
    Angular { base: Vec<f64>, count: usize },
    /// Random `(d+1)`-planes `P₁` with `P₀` spanned by the first `d` frame vectors.
    Random { base: Vec<f64>, d: usize, count: usize, seed: u64, random_bases: bool },
    Explicit(Vec<(PlaneSpec, PlaneSpec)>),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRow {
    pub plane_id: usize,
    /// Angle in radians for angular grids, otherwise the spanning vectors.
    pub label: String,
    pub sigma: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpansionReport {
    pub n: usize,
    pub d: usize,
    pub mode: String,
    pub margin: f64,
    pub min_sigma: f64,
    pub argmin: usize,
    /// `min_sigma > margin` on the sampled grid.
    pub certificate: bool,
    /// The grid check is backed by a Lipschitz bound covering the gaps between grid points.
    pub rigorous: bool,
    /// Bound on `|dσ/dθ|`, for angular scans of linear toral walks in exact mode.
    pub lipschitz: Option<f64>,
    pub grid_spacing: Option<f64>,
    /// Smallest total word probability over the grid (exact mode).
    pub min_weight_sum: f64,
    pub note: String,
    pub rows: Vec<ScanRow>,
}

impl ExpansionReport {
    pub fn csv(&self) -> String {
        let mut s = String::from("plane_id,angle_or_basis,sigma,stderr\n");
        for r in &self.rows {
            s += &format!("{},{},{:.15e},{:.6e}\n", r.plane_id, r.label, r.sigma, r.stderr);
        }
        s
    }

    fn from_rows(
        n: usize,
        d: usize,
        mode: SigmaMode,
        margin: f64,
        rows: Vec<ScanRow>,
        weights: impl Iterator<Item = f64>,
        linear: bool,
    ) -> Result<Self, ExpansionError> {
        let (argmin, min_sigma) = rows
            .iter()
            .map(|r| r.sigma)
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .ok_or_else(|| ExpansionError::InvalidArgument("empty grid".into()))?;
        let note = if linear {
            "linear toral walk: sigma does not depend on the base point; grid check only".into()
        } else {
            "sampled check over base points and planes, not a proof".into()
        };
        Ok(Self {
            n,
            d,
            mode: mode.name().into(),
            margin,
            min_sigma,
            argmin,
            certificate: min_sigma > margin,
            rigorous: false,
            lipschitz: None,
            grid_spacing: None,
            min_weight_sum: weights.fold(f64::INFINITY, f64::min),
            note,
            rows,
        })
    }
}

fn fmt_vectors(p: &PlaneSpec) -> String {
    p.vectors()
        .iter()
        .map(|v| v.iter().map(|x| format!("{x:.6}")).collect::<Vec<_>>().join(" "))
        .collect::<Vec<_>>()
        .join(";")
}

fn random_plane(base: &[f64], k: usize, seed: u64, id: usize, random_base: bool) -> Result<PlaneSpec, ExpansionError> {
    let mut r = rng::stream(seed, id as u64);
    let dim = base.len();
    let base = if random_base { (0..dim).map(|_| r.random::<f64>()).collect() } else { base.to_vec() };
    let vectors: Vec<Vec<f64>> =
        (0..k).map(|_| (0..dim).map(|_| r.sample::<f64, _>(StandardNormal)).collect()).collect();
    PlaneSpec::new(base, &vectors)
}

fn all_linear(mu: &WalkMeasure) -> bool {
    mu.atoms().iter().all(|(g, _)| matches!(g, SystemSpec::ToralAuto { .. }))
}

/// Minimum of `σ(ξ_P, N)` over a grid of `d`-planes; the certificate holds when
/// the minimum exceeds `margin`.
pub fn uniform_expansion_scan(
    mu: &WalkMeasure,
    n: usize,
    d: usize,
    grid: &PlaneGrid,
    mode: SigmaMode,
    margin: f64,
) -> Result<ExpansionReport, ExpansionError> {
    let (planes, labels): (Vec<PlaneSpec>, Vec<String>) = match grid {
        PlaneGrid::Angular { base, count } => {
            if d != 1 {
                return Err(ExpansionError::InvalidArgument("angular grids hold lines only".into()));
            }
            (0..*count)
                .map(|k| {
                    let theta = k as f64 * PI / *count as f64;
                    PlaneSpec::line(base.clone(), theta).map(|p| (p, format!("{theta:.12}")))
                })
                .collect::<Result<Vec<_>, _>>()?
                .into_iter()
                .unzip()
        }
        PlaneGrid::Random { base, d: k, count, seed, random_bases } => {
            let planes = (0..*count)
                .map(|i| random_plane(base, *k, *seed, i, *random_bases))
                .collect::<Result<Vec<_>, _>>()?;
            let labels = planes.iter().map(fmt_vectors).collect();
            (planes, labels)
        }
        PlaneGrid::Explicit(ps) => (ps.clone(), ps.iter().map(fmt_vectors).collect()),
    };
    if planes.is_empty() {
        return Err(ExpansionError::InvalidArgument("empty grid".into()));
    }
    if let Some(p) = planes.iter().find(|p| p.dim() != d) {
        return Err(ExpansionError::InvalidPlane(format!("expected a {d}-plane, got a {}-plane", p.dim())));
    }
    let ids: Vec<usize> = (0..planes.len()).collect();
    let estimates: Vec<SigmaEstimate> = parallel::map_ordered(&ids, |&i| {
        super::sigma(mu, n, &planes[i], mode.with_stream(i as u64))
    })
    .into_iter()
    .collect::<Result<_, _>>()?;
    let rows = estimates
        .iter()
        .zip(labels)
        .enumerate()
        .map(|(i, (e, label))| ScanRow { plane_id: i, label, sigma: e.value, stderr: e.stderr })
        .collect();
    let linear = all_linear(mu);
    let mut report = ExpansionReport::from_rows(n, d, mode, margin, rows, estimates.iter().map(|e| e.weight_sum), linear)?;
    if let (PlaneGrid::Angular { count, .. }, SigmaMode::Exact { budget }, true) = (grid, mode, linear) {
        let l = angular_lipschitz(mu, n, budget)?;
        let h = PI / *count as f64;
        report.lipschitz = Some(l);
        report.grid_spacing = Some(h);
        report.rigorous = report.min_sigma - l * h / 2.0 > margin;
        report.note = if report.rigorous {
            "linear toral walk: Lipschitz bound covers the grid spacing; certificate is rigorous".into()
        } else {
            "linear toral walk: Lipschitz bound too large for the grid spacing; grid check only".into()
        };
    }
    Ok(report)
}

/// `Σ_w p(w)·(κ_w − 1/κ_w)/2`, with `κ_w` the condition number of the word's
/// matrix, bounds `|dσ/dθ|` for lines in the plane.
fn angular_lipschitz(mu: &WalkMeasure, n: usize, budget: u64) -> Result<f64, ExpansionError> {
    let words = (mu.len() as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if words > budget as u128 {
        return Err(ExpansionError::BudgetExceeded { words, budget });
    }
    let mats: Vec<DMatrix<f64>> = (0..mu.len()).map(|i| mu.generator(i).jacobian(&[0.0, 0.0])).collect::<Result<_, _>>()?;
    let mut stack = vec![(DMatrix::<f64>::identity(2, 2), 1.0f64, 0usize)];
    let mut total = 0.0;
    while let Some((m, p, depth)) = stack.pop() {
        if depth == n {
            let sv = m.singular_values();
            let kappa = sv.max() / sv.min();
            total += p * (kappa - 1.0 / kappa) / 2.0;
            continue;
        }
        for i in (0..mu.len()).rev() {
            stack.push((&mats[i] * &m, p * mu.probability(i), depth + 1));
        }
    }
    Ok(total)
}

/// Minimum of `δ·(σ(ξ_{P₁}, N) − σ(ξ_{P₀}, N))` over nested pairs with
/// `dim P₀ = d`, `dim P₁ = d + 1`. Both planes of a pair are evaluated along the
/// same words.
pub fn uniform_gaps_scan(
    mu: &WalkMeasure,
    n: usize,
    d: usize,
    delta: i8,
    grid: &GapGrid,
    mode: SigmaMode,
    margin: f64,
) -> Result<ExpansionReport, ExpansionError> {
    if delta != 1 && delta != -1 {
        return Err(ExpansionError::InvalidArgument("delta must be +1 or -1".into()));
    }
    let pairs: Vec<(PlaneSpec, PlaneSpec, String)> = match grid {
        GapGrid::Angular { base, count } => {
            if d != 1 || base.len() != 2 {
                return Err(ExpansionError::InvalidArgument("angular gap grids need d = 1 in dimension 2".into()));
            }
            (0..*count)
                .map(|k| {
                    let theta = k as f64 * PI / *count as f64;
                    Ok((PlaneSpec::line(base.clone(), theta)?, PlaneSpec::full(base.clone()), format!("{theta:.12}")))
                })
                .collect::<Result<_, ExpansionError>>()?
        }
        GapGrid::Random { base, d: k, count, seed, random_bases } => (0..*count)
            .map(|i| {
                let p1 = random_plane(base, k + 1, *seed, i, *random_bases)?;
                let p0 = p1.leading(*k)?;
                let label = fmt_vectors(&p1);
                Ok((p0, p1, label))
            })
            .collect::<Result<_, ExpansionError>>()?,
        GapGrid::Explicit(ps) => ps
            .iter()
            .map(|(a, b)| (a.clone(), b.clone(), format!("{}|{}", fmt_vectors(a), fmt_vectors(b))))
            .collect(),
    };
    if pairs.is_empty() {
        return Err(ExpansionError::InvalidArgument("empty grid".into()));
    }
    for (p0, p1, _) in &pairs {
        if p0.dim() != d || p1.dim() != d + 1 {
            return Err(ExpansionError::InvalidPlane(format!(
                "expected nested planes of dimensions {d} and {}, got {} and {}",
                d + 1,
                p0.dim(),
                p1.dim()
            )));
        }
        if !p0.is_contained_in(p1, 1e-9) {
            return Err(ExpansionError::InvalidPlane("P0 is not contained in P1".into()));
        }
    }
    let ids: Vec<usize> = (0..pairs.len()).collect();
    let sign = delta as f64;
    let estimates: Vec<SigmaEstimate> = parallel::map_ordered(&ids, |&i| {
        let (p0, p1, _) = &pairs[i];
        let m = mode.with_stream(i as u64);
        let mut acc = Moments::default();
        let frames = [p0.frame().clone(), p1.frame().clone()];
        let words = visit_words(mu, n, p0.base(), &frames, m, |p, l| acc.push(p, sign * (l[1] - l[0])))?;
        Ok(acc.finish(m, words))
    })
    .into_iter()
    .collect::<Result<_, ExpansionError>>()?;
    let weights: Vec<f64> = estimates.iter().map(|e| e.weight_sum).collect();
    let rows = estimates
        .into_iter()
        .zip(pairs)
        .enumerate()
        .map(|(i, (e, (_, _, label)))| ScanRow { plane_id: i, label, sigma: e.value, stderr: e.stderr })
        .collect();
    ExpansionReport::from_rows(n, d, mode, margin, rows, weights.into_iter(), all_linear(mu))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair() -> WalkMeasure {
        WalkMeasure::uniform(vec![
            SystemSpec::toral(&[vec![2, 1], vec![1, 1]]).unwrap(),
            SystemSpec::toral(&[vec![1, 1], vec![1, 2]]).unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn identity_scan_has_no_certificate() {
        let id = WalkMeasure::dirac(SystemSpec::toral(&[vec![1, 0], vec![0, 1]]).unwrap());
        let grid = PlaneGrid::Angular { base: vec![0.0, 0.0], count: 12 };
        let r = uniform_expansion_scan(&id, 3, 1, &grid, SigmaMode::exact(), 0.0).unwrap();
        assert_eq!(r.min_sigma, 0.0);
        assert!(!r.certificate);
        let g = uniform_gaps_scan(&id, 3, 1, 1, &GapGrid::Angular { base: vec![0.0, 0.0], count: 12 }, SigmaMode::exact(), 0.0)
            .unwrap();
        assert!(g.rows.iter().all(|r| r.sigma == 0.0));
        assert!(!g.certificate);
    }

    #[test]
    fn rotations_do_not_expand() {
        let mu = WalkMeasure::uniform(vec![SystemSpec::rotation(0.1).unwrap(), SystemSpec::rotation(0.37).unwrap()]).unwrap();
        let grid = PlaneGrid::Random { base: vec![0.3], d: 1, count: 5, seed: 1, random_bases: true };
        let r = uniform_expansion_scan(&mu, 6, 1, &grid, SigmaMode::exact(), 0.0).unwrap();
        assert!(r.min_sigma.abs() < 1e-12);
        assert!(!r.certificate);
    }

    #[test]
    fn top_power_of_sl_pair_vanishes() {
        let grid = GapGrid::Angular { base: vec![0.0, 0.0], count: 30 };
        let g = uniform_gaps_scan(&pair(), 5, 1, -1, &grid, SigmaMode::exact(), 0.0).unwrap();
        let s = uniform_expansion_scan(&pair(), 5, 1, &PlaneGrid::Angular { base: vec![0.0, 0.0], count: 30 }, SigmaMode::exact(), 0.0)
            .unwrap();
        for (a, b) in g.rows.iter().zip(&s.rows) {
            assert!((a.sigma - b.sigma).abs() < 1e-12);
        }
        let full = PlaneSpec::full(vec![0.0, 0.0]);
        assert!(super::super::sigma(&pair(), 5, &full, SigmaMode::exact()).unwrap().value.abs() < 1e-12);
    }

    #[test]
    fn lipschitz_recorded_for_linear_angular_scans() {
        let r = uniform_expansion_scan(&pair(), 8, 1, &PlaneGrid::Angular { base: vec![0.0, 0.0], count: 720 }, SigmaMode::exact(), 0.0)
            .unwrap();
        assert!(r.certificate);
        let l = r.lipschitz.unwrap();
        assert!(l > 0.0);
        assert_eq!(r.rigorous, r.min_sigma - l * r.grid_spacing.unwrap() / 2.0 > 0.0);
        assert!(r.csv().lines().count() == 721);
    }

    #[test]
    fn gap_pairs_must_nest() {
        let p0 = PlaneSpec::new(vec![0.0, 0.0, 0.0], &[vec![0.0, 0.0, 1.0]]).unwrap();
        let p1 = PlaneSpec::new(vec![0.0, 0.0, 0.0], &[vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]]).unwrap();
        let mu = WalkMeasure::dirac(SystemSpec::toral(&[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]).unwrap());
        let grid = GapGrid::Explicit(vec![(p0, p1)]);
        assert!(matches!(
            uniform_gaps_scan(&mu, 1, 1, 1, &grid, SigmaMode::exact(), 0.0),
            Err(ExpansionError::InvalidPlane(_))
        ));
    }
}
