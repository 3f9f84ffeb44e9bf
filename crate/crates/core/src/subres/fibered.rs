use num_traits::{Signed, Zero};

use super::group::SubresonantMap;
use super::rational::Rational;
use super::space::MultiIndex;
use super::SubresError;

/// One term `coeff · u^mono · ξ_col` in fiber output `row`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiberTerm {
    pub row: usize,
    pub col: usize,
    pub mono: MultiIndex,
    pub coeff: Rational,
}

/// A cocycle over a subresonant base map, linear on fibers with polynomial
/// dependence on the base coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiberedCocycleMap {
    pub base: SubresonantMap,
    /// Fiber exponents `μ₁ > μ₂ > …`.
    pub fiber_weights: Vec<Rational>,
    /// Constant diagonal entries `a₁, a₂, …`.
    pub diagonal: Vec<Rational>,
    pub off_diagonal: Vec<FiberTerm>,
}

/// Whether the cocycle is in normal form: constant invertible diagonal, and a
/// term `u^α` multiplying `ξ_col` in row `row` only when `weight(α) ≤ μ_row − μ_col`.
///
/// Structural problems (unsorted fiber weights, indices out of range) are errors;
/// admissibility failures return `Ok(false)`.
pub fn validate_fibered(c: &FiberedCocycleMap) -> Result<bool, SubresError> {
    let k = c.fiber_weights.len();
    if k == 0 {
        return Err(SubresError::MalformedCocycle("no fiber weights".into()));
    }
    if c.fiber_weights.windows(2).any(|w| w[0] <= w[1]) {
        return Err(SubresError::MalformedCocycle("fiber weights must be strictly decreasing".into()));
    }
    if c.diagonal.len() != k {
        return Err(SubresError::MalformedCocycle(format!(
            "{} diagonal entries for {} fiber weights",
            c.diagonal.len(),
            k
        )));
    }
    let space = c.base.space();
    for t in &c.off_diagonal {
        if t.row >= k || t.col >= k {
            return Err(SubresError::MalformedCocycle(format!(
                "fiber index ({}, {}) out of range",
                t.row, t.col
            )));
        }
        space.monomial_weight(&t.mono)?;
    }
    if c.diagonal.iter().any(Zero::is_zero) {
        return Ok(false);
    }
    for t in &c.off_diagonal {
        if t.coeff.is_zero() {
            continue;
        }
        let w = space.monomial_weight(&t.mono)?;
        if t.row == t.col {
            if !t.mono.is_constant() {
                return Ok(false);
            }
            continue;
        }
        let budget = &c.fiber_weights[t.row] - &c.fiber_weights[t.col];
        if budget.is_negative() || w > budget {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::super::rational::int;
    use super::super::space::FilteredSpace;
    use super::*;

    fn cocycle(terms: Vec<FiberTerm>) -> FiberedCocycleMap {
        let s = FilteredSpace::simple(vec![int(2), int(1)]).unwrap();
        FiberedCocycleMap {
            base: SubresonantMap::identity(s),
            fiber_weights: vec![int(5), int(2)],
            diagonal: vec![int(2), int(3)],
            off_diagonal: terms,
        }
    }

    fn term(i: u32, j: u32) -> FiberTerm {
        FiberTerm { row: 0, col: 1, mono: MultiIndex::from_pairs([(0, i), (1, j)]), coeff: int(7) }
    }

    #[test]
    fn zero_block_is_admissible() {
        assert!(validate_fibered(&cocycle(vec![])).unwrap());
    }

    #[test]
    fn weight_budget() {
        // λ = (2, 1), μ₁ − μ₂ = 3
        assert!(validate_fibered(&cocycle(vec![term(1, 1)])).unwrap());
        assert!(validate_fibered(&cocycle(vec![term(0, 3)])).unwrap());
        assert!(!validate_fibered(&cocycle(vec![term(0, 4)])).unwrap());
        assert!(!validate_fibered(&cocycle(vec![term(2, 0)])).unwrap());
    }

    #[test]
    fn wrong_direction_and_nonconstant_diagonal() {
        let back = FiberTerm { row: 1, col: 0, mono: MultiIndex::constant(), coeff: int(1) };
        assert!(!validate_fibered(&cocycle(vec![back])).unwrap());
        let diag = FiberTerm { row: 0, col: 0, mono: MultiIndex::var(1), coeff: int(1) };
        assert!(!validate_fibered(&cocycle(vec![diag])).unwrap());
        let mut c = cocycle(vec![]);
        c.diagonal[1] = int(0);
        assert!(!validate_fibered(&c).unwrap());
    }

    #[test]
    fn malformed_structures() {
        let mut c = cocycle(vec![]);
        c.fiber_weights = vec![int(1), int(2)];
        assert!(validate_fibered(&c).is_err());
        let mut c = cocycle(vec![]);
        c.diagonal.pop();
        assert!(validate_fibered(&c).is_err());
        let bad = FiberTerm { row: 0, col: 5, mono: MultiIndex::constant(), coeff: int(1) };
        assert!(validate_fibered(&cocycle(vec![bad])).is_err());
    }
}
