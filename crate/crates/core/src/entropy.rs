//! Entropy bookkeeping over supplied Lyapunov data. All logarithms are natural.

use serde::{Deserialize, Serialize};

use crate::walk::WalkMeasure;

/// Tolerance for the sign tests below.
pub const SIGN_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EntropyError {
    #[error("malformed spectrum: {0}")]
    MalformedSpectrum(String),
    #[error("entropies must be nonnegative, got {0}")]
    NegativeEntropy(f64),
}

/// Distinct Lyapunov exponents with multiplicities, and optionally the
/// dimensions of `E₁^λ ⊆ E₂^λ` for two nested invariant bundles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumSummary {
    pub exponents: Vec<f64>,
    pub multiplicities: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e1_dims: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e2_dims: Option<Vec<usize>>,
}

impl SpectrumSummary {
    pub fn new(exponents: Vec<f64>, multiplicities: Vec<usize>) -> Result<Self, EntropyError> {
        let s = Self { exponents, multiplicities, e1_dims: None, e2_dims: None };
        s.validate()?;
        Ok(s)
    }

    pub fn with_bundles(mut self, e1: Vec<usize>, e2: Vec<usize>) -> Result<Self, EntropyError> {
        self.e1_dims = Some(e1);
        self.e2_dims = Some(e2);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), EntropyError> {
        let bad = |m: &str| Err(EntropyError::MalformedSpectrum(m.into()));
        if self.exponents.is_empty() {
            return bad("no exponents");
        }
        if self.multiplicities.len() != self.exponents.len() {
            return bad("one multiplicity per exponent");
        }
        if self.exponents.iter().any(|x| !x.is_finite()) {
            return bad("exponents must be finite");
        }
        if self.exponents.windows(2).any(|w| w[0] <= w[1]) {
            return bad("exponents must be strictly decreasing");
        }
        if self.multiplicities.contains(&0) {
            return bad("multiplicities must be positive");
        }
        for dims in [&self.e1_dims, &self.e2_dims].into_iter().flatten() {
            if dims.len() != self.exponents.len() {
                return bad("one bundle dimension per exponent");
            }
        }
        if let (Some(e1), Some(e2)) = (&self.e1_dims, &self.e2_dims) {
            for ((a, b), m) in e1.iter().zip(e2).zip(&self.multiplicities) {
                if a > b || b > m {
                    return bad("need dim E1 <= dim E2 <= multiplicity for every exponent");
                }
            }
        } else if self.e1_dims.is_some() != self.e2_dims.is_some() {
            return bad("give both bundle profiles or neither");
        }
        Ok(())
    }

    /// Groups a sorted list of exponent estimates: values within `tol` of the
    /// previous one join its class.
    pub fn from_estimates(estimates: &[f64], tol: f64) -> Result<Self, EntropyError> {
        let mut sorted = estimates.to_vec();
        sorted.sort_by(|a, b| b.total_cmp(a));
        let mut classes: Vec<Vec<f64>> = Vec::new();
        for x in sorted {
            match classes.last_mut() {
                Some(c) if c.last().is_some_and(|y| y - x <= tol) => c.push(x),
                _ => classes.push(vec![x]),
            }
        }
        Self::new(
            classes.iter().map(|c| c.iter().sum::<f64>() / c.len() as f64).collect(),
            classes.iter().map(Vec::len).collect(),
        )
    }

    fn weighted_positive(&self, dims: &[usize]) -> f64 {
        self.exponents.iter().zip(dims).filter(|(l, _)| **l > 0.0).map(|(l, d)| l * *d as f64).sum()
    }
}

/// `H(μ) = −Σ p log p`.
pub fn shannon_entropy(mu: &WalkMeasure) -> f64 {
    -(0..mu.len()).map(|i| mu.probability(i)).filter(|&p| p > 0.0).map(|p| p * p.ln()).sum::<f64>()
}

/// `Σ_{λ>0} λ · mult(λ)`.
pub fn pesin_sum(spec: &SpectrumSummary) -> Result<f64, EntropyError> {
    spec.validate()?;
    Ok(spec.weighted_positive(&spec.multiplicities))
}

/// `(Σ_{λ>0} λ·dim E₁^λ, Σ_{λ>0} λ·dim E₂^λ)`.
pub fn ly_bounds(spec: &SpectrumSummary) -> Result<(f64, f64), EntropyError> {
    spec.validate()?;
    match (&spec.e1_dims, &spec.e2_dims) {
        (Some(e1), Some(e2)) => Ok((spec.weighted_positive(e1), spec.weighted_positive(e2))),
        _ => Err(EntropyError::MalformedSpectrum("bundle dimensions E1 and E2 are required".into())),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RelativeEntropyCheck {
    /// `h_rel ≤ H(μ) + 10⁻¹²`.
    pub consistent: bool,
    /// `H(μ) − h_rel`.
    pub gap: f64,
    /// `|gap| ≤ invariance_tol`: the equality case, which holds iff `ν` is invariant.
    pub invariance_consistent: bool,
}

pub fn relative_entropy_bound_check(h_mu: f64, h_rel: f64, invariance_tol: f64) -> Result<RelativeEntropyCheck, EntropyError> {
    for x in [h_mu, h_rel] {
        if !(x >= 0.0) {
            return Err(EntropyError::NegativeEntropy(x));
        }
    }
    let gap = h_mu - h_rel;
    Ok(RelativeEntropyCheck {
        consistent: h_rel <= h_mu + SIGN_TOLERANCE,
        gap,
        invariance_consistent: gap.abs() <= invariance_tol,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainLink {
    pub statement: String,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs − rhs`; the link holds when this is `≥ −10⁻¹²`.
    pub slack: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StiffnessVerdict {
    /// `Σ λ · dim Z^λ` over all exponents.
    pub signed_sum: f64,
    pub consistent: bool,
    pub links: Vec<ChainLink>,
}

fn link(statement: &str, lhs: f64, rhs: f64) -> ChainLink {
    let slack = lhs - rhs;
    ChainLink { statement: statement.into(), lhs, rhs, slack, holds: slack >= -SIGN_TOLERANCE }
}

/// Checks `h − H(μ) ≥ Σ λ·dim Z^λ ≥ 0` where the multiplicities of `z` are the
/// dimensions `dim Z^λ`. The first link is checked only when the fibre entropy
/// `h` is supplied.
pub fn stiffness_chain(h_mu: f64, z: &SpectrumSummary, fibre_entropy: Option<f64>) -> Result<StiffnessVerdict, EntropyError> {
    z.validate()?;
    if !(h_mu >= 0.0) {
        return Err(EntropyError::NegativeEntropy(h_mu));
    }
    let signed_sum: f64 = z.exponents.iter().zip(&z.multiplicities).map(|(l, d)| l * *d as f64).sum();
    let mut links = Vec::new();
    if let Some(h) = fibre_entropy {
        links.push(link("h - H(mu) >= sum lambda dim Z", h - h_mu, signed_sum));
    }
    links.push(link("sum lambda dim Z >= 0", signed_sum, 0.0));
    Ok(StiffnessVerdict { signed_sum, consistent: signed_sum >= -SIGN_TOLERANCE, links })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::SystemSpec;
    use crate::subres::rational::frac;

    fn lam() -> f64 {
        ((3.0 + 5f64.sqrt()) / 2.0).ln()
    }

    #[test]
    fn shannon_values() {
        let f = SystemSpec::rotation(0.1).unwrap();
        let g = SystemSpec::rotation(0.2).unwrap();
        assert_eq!(shannon_entropy(&WalkMeasure::dirac(f.clone())), 0.0);
        let u = WalkMeasure::uniform(vec![f.clone(), g.clone()]).unwrap();
        assert!((shannon_entropy(&u) - 2f64.ln()).abs() < 1e-15);
        let w = WalkMeasure::new(vec![(f, frac(1, 3)), (g, frac(2, 3))]).unwrap();
        assert!((shannon_entropy(&w) - (3f64.ln() - 2.0 / 3.0 * 2f64.ln())).abs() < 1e-15);
    }

    #[test]
    fn pesin_values() {
        assert_eq!(pesin_sum(&SpectrumSummary::new(vec![-0.1, -2.0], vec![1, 1]).unwrap()).unwrap(), 0.0);
        let cat = SpectrumSummary::new(vec![lam(), -lam()], vec![1, 1]).unwrap();
        assert_eq!(pesin_sum(&cat).unwrap(), lam());
        let diag = SpectrumSummary::new(vec![2f64.ln(), -4f64.ln()], vec![2, 1]).unwrap();
        assert!((pesin_sum(&diag).unwrap() - 2.0 * 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn ly_sandwich() {
        let s = SpectrumSummary::new(vec![lam(), -lam()], vec![1, 1]).unwrap();
        let eq = s.clone().with_bundles(vec![1, 0], vec![1, 0]).unwrap();
        let (lo, hi) = ly_bounds(&eq).unwrap();
        assert_eq!(lo, hi);
        assert_eq!(hi, lam());
        let wide = s.clone().with_bundles(vec![0, 0], vec![1, 0]).unwrap();
        assert_eq!(ly_bounds(&wide).unwrap(), (0.0, lam()));
        assert!(s.clone().with_bundles(vec![1, 0], vec![0, 0]).is_err());
        assert!(s.clone().with_bundles(vec![2, 0], vec![2, 0]).is_err());
        assert!(ly_bounds(&s).is_err());
    }

    #[test]
    fn relative_entropy() {
        let l2 = 2f64.ln();
        let c = relative_entropy_bound_check(l2, l2, 1e-12).unwrap();
        assert!(c.consistent && c.invariance_consistent && c.gap == 0.0);
        let c = relative_entropy_bound_check(l2, 0.3, 1e-12).unwrap();
        assert!(c.consistent && !c.invariance_consistent);
        assert!((c.gap - 0.393147).abs() < 1e-6);
        assert!(!relative_entropy_bound_check(0.3, 0.5, 1e-12).unwrap().consistent);
        assert!(relative_entropy_bound_check(-0.1, 0.5, 1e-12).is_err());
    }

    #[test]
    fn stiffness() {
        let full = SpectrumSummary::new(vec![lam(), -lam()], vec![1, 1]).unwrap();
        let v = stiffness_chain(2f64.ln(), &full, None).unwrap();
        assert_eq!(v.signed_sum, 0.0);
        assert!(v.consistent);
        let neg = SpectrumSummary::new(vec![-0.9], vec![1]).unwrap();
        let v = stiffness_chain(0.0, &neg, Some(0.5)).unwrap();
        assert!(!v.consistent);
        assert!((v.signed_sum + 0.9).abs() < 1e-15);
        assert_eq!(v.links.len(), 2);
        assert!(v.links[0].holds && !v.links[1].holds);
    }

    #[test]
    fn grouping_estimates() {
        let s = SpectrumSummary::from_estimates(&[0.5, -1.0, 0.5 + 1e-9], 1e-6).unwrap();
        assert_eq!(s.multiplicities, vec![2, 1]);
        assert!(SpectrumSummary::new(vec![1.0, 1.0], vec![1, 1]).is_err());
    }
}
