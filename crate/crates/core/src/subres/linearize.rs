use num_traits::{One, Zero};

use super::exact::RatMatrix;
use super::group::SubresonantMap;
use super::poly::{Polynomial, Scalar};
use super::rational::Rational;
use super::space::{FilteredSpace, MultiIndex};
use super::SubresError;

/// Matrix of a subresonant map acting on monomials of weight at most the top weight.
///
/// Row `r` lists the coefficients of the pullback of `basis[r]`, so that
/// `embed(F(q)) = entries · embed(q)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearizationMatrix {
    pub basis: Vec<MultiIndex>,
    pub entries: RatMatrix,
    pub affine: bool,
}

/// Monomials of weight in `(0, λ₁]` in linearization order, followed by the constant
/// monomial when `affine` is set.
pub fn linearization_basis(space: &FilteredSpace, affine: bool) -> Vec<MultiIndex> {
    let mut basis = space.monomials_up_to(space.top_weight(), false);
    basis.sort_by(|a, b| space.linearization_order(a, b));
    if affine {
        basis.push(MultiIndex::constant());
    }
    basis
}

/// Veronese-type embedding of a point: the basis monomials evaluated at it.
pub fn embed<T: Scalar>(basis: &[MultiIndex], point: &[T]) -> Vec<T> {
    basis
        .iter()
        .map(|m| Polynomial::monomial(m.clone(), Rational::one()).eval(point))
        .collect()
}

/// Linearizes `f`. Maps with constant terms need `affine = true`; otherwise the
/// pullback of a basis monomial leaves the span and `AffineRequired` is returned.
pub fn linearize(f: &SubresonantMap, affine: bool) -> Result<LinearizationMatrix, SubresError> {
    let space = f.space();
    let basis = linearization_basis(space, affine);
    let index: std::collections::HashMap<&MultiIndex, usize> =
        basis.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let comps = f.map().components();
    let mut entries = vec![vec![Rational::zero(); basis.len()]; basis.len()];
    for (r, m) in basis.iter().enumerate() {
        let pulled = Polynomial::monomial(m.clone(), Rational::one()).substitute(comps);
        for (mono, c) in pulled.terms() {
            match index.get(mono) {
                Some(&col) => entries[r][col] = c.clone(),
                None if mono.is_constant() => return Err(SubresError::AffineRequired),
                None => unreachable!("pullback of a basis monomial has weight at most the top weight"),
            }
        }
    }
    Ok(LinearizationMatrix { basis, entries, affine })
}

impl LinearizationMatrix {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn embed<T: Scalar>(&self, point: &[T]) -> Vec<T> {
        embed(&self.basis, point)
    }

    /// Checks block lower-triangularity after reordering the basis by increasing
    /// monomial weight (the constant, if present, has weight 0).
    pub fn is_block_lower_triangular(&self, space: &FilteredSpace) -> bool {
        let weights: Vec<Rational> =
            self.basis.iter().map(|m| space.monomial_weight(m).expect("basis")).collect();
        for (r, row) in self.entries.iter().enumerate() {
            for (c, x) in row.iter().enumerate() {
                if !x.is_zero() && weights[c] > weights[r] {
                    return false;
                }
            }
        }
        true
    }

    /// Submatrix on the basis monomials of exactly weight `w`.
    pub fn diagonal_block(&self, space: &FilteredSpace, w: &Rational) -> RatMatrix {
        let idx: Vec<usize> = (0..self.dim())
            .filter(|&i| &space.monomial_weight(&self.basis[i]).expect("basis") == w)
            .collect();
        idx.iter()
            .map(|&r| idx.iter().map(|&c| self.entries[r][c].clone()).collect())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::super::exact;
    use super::super::group::{compose, validate};
    use super::super::poly::PolynomialMap;
    use super::super::rational::{frac, int};
    use super::*;

    fn example() -> SubresonantMap {
        let s = FilteredSpace::simple(vec![int(2), int(1)]).unwrap();
        let m = PolynomialMap::from_terms(
            s,
            [
                (0, MultiIndex::var(0), int(3)),
                (0, MultiIndex::var(1), int(1)),
                (0, MultiIndex::from_pairs([(1, 2)]), int(2)),
                (1, MultiIndex::var(1), int(2)),
            ],
        )
        .unwrap();
        validate(m, false).unwrap()
    }

    #[test]
    fn displayed_matrix() {
        let l = linearize(&example(), false).unwrap();
        let want: RatMatrix = [[4, 0, 0], [0, 2, 0], [2, 1, 3]]
            .iter()
            .map(|r| r.iter().map(|&x| int(x)).collect())
            .collect();
        assert_eq!(l.entries, want);
        let q = [frac(2, 5), frac(-7, 3)];
        let fq = example().map().eval(&q).unwrap();
        assert_eq!(l.embed(&fq), exact::matvec(&l.entries, &l.embed(&q)));
    }

    #[test]
    fn identity_linearizes_to_identity() {
        let s = FilteredSpace::simple(vec![int(3), int(2), int(1)]).unwrap();
        let l = linearize(&SubresonantMap::identity(s), true).unwrap();
        assert_eq!(l.entries, exact::identity(l.dim()));
    }

    #[test]
    fn translations_need_affine_flag() {
        let s = FilteredSpace::simple(vec![int(2), int(1)]).unwrap();
        let t = SubresonantMap::translation(s.clone(), &[int(1), int(2)]).unwrap();
        assert_eq!(linearize(&t, false), Err(SubresError::AffineRequired));
        let l = linearize(&t, true).unwrap();
        let f = compose(&t, &example()).unwrap();
        let lf = linearize(&f, true).unwrap();
        let le = linearize(&example(), true).unwrap();
        assert_eq!(lf.entries, exact::matmul(&l.entries, &le.entries));
        assert!(lf.is_block_lower_triangular(&s));
    }
}
