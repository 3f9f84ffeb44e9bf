use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::rational::Rational;
use super::space::{FilteredSpace, MultiIndex};
use super::SubresError;

/// Sparse polynomial in the coordinates of a space; no zero coefficient is stored.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Polynomial(BTreeMap<MultiIndex, Rational>);

impl Polynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Rational) -> Self {
        Self::monomial(MultiIndex::constant(), c)
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn var(i: usize) -> Self {
        Self::monomial(MultiIndex::var(i), Rational::one())
    }

    pub fn monomial(m: MultiIndex, c: Rational) -> Self {
        let mut p = Self::zero();
        p.add_term(m, c);
        p
    }

    pub fn add_term(&mut self, m: MultiIndex, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.0.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Rational)> {
        self.0.iter()
    }

    pub fn coefficient(&self, m: &MultiIndex) -> Rational {
        self.0.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.0 {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.0 {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }

    pub fn scale(&self, s: &Rational) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.0 {
            out.add_term(m.clone(), c * s);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (m1, c1) in &self.0 {
            for (m2, c2) in &other.0 {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }

    /// Substitutes `subs[i]` for coordinate `i`.
    pub fn substitute(&self, subs: &[Polynomial]) -> Self {
        let mut powers = PowerCache::new(subs);
        let mut out = Self::zero();
        for (m, c) in &self.0 {
            let mut term = Polynomial::constant(c.clone());
            for (&i, &e) in m.iter() {
                term = term.mul(powers.get(i, e));
            }
            out = out.add(&term);
        }
        out
    }

    pub fn eval<T: Scalar>(&self, point: &[T]) -> T {
        let mut total = T::origin();
        for (m, c) in &self.0 {
            let mut term = T::from_rational(c);
            for (&i, &e) in m.iter() {
                term = term * point[i].powu(e);
            }
            total = total + term;
        }
        total
    }
}

struct PowerCache<'a> {
    base: &'a [Polynomial],
    cache: BTreeMap<(usize, u32), Polynomial>,
}

impl<'a> PowerCache<'a> {
    fn new(base: &'a [Polynomial]) -> Self {
        Self { base, cache: BTreeMap::new() }
    }

    fn get(&mut self, i: usize, e: u32) -> &Polynomial {
        if e == 1 {
            return &self.base[i];
        }
        if !self.cache.contains_key(&(i, e)) {
            let lower = if e == 2 { self.base[i].clone() } else { self.get(i, e - 1).clone() };
            let p = lower.mul(&self.base[i]);
            self.cache.insert((i, e), p);
        }
        &self.cache[&(i, e)]
    }
}

/// Coordinate ring for evaluation: exact rationals or floats.
pub trait Scalar: Clone + std::ops::Add<Output = Self> + std::ops::Mul<Output = Self> {
    fn origin() -> Self;
    fn from_rational(r: &Rational) -> Self;
    fn powu(&self, e: u32) -> Self;
}

impl Scalar for Rational {
    fn origin() -> Self {
        <Rational as Zero>::zero()
    }
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
    fn powu(&self, e: u32) -> Self {
        num_traits::Pow::pow(self, e)
    }
}

impl Scalar for f64 {
    fn origin() -> Self {
        0.0
    }
    fn from_rational(r: &Rational) -> Self {
        super::rational::to_f64(r)
    }
    fn powu(&self, e: u32) -> Self {
        self.powi(e as i32)
    }
}

/// A polynomial map between filtered spaces, one polynomial per output coordinate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolynomialMap {
    pub(crate) domain: FilteredSpace,
    pub(crate) codomain: FilteredSpace,
    pub(crate) components: Vec<Polynomial>,
}

impl PolynomialMap {
    pub fn new(
        domain: FilteredSpace,
        codomain: FilteredSpace,
        components: Vec<Polynomial>,
    ) -> Result<Self, SubresError> {
        if components.len() != codomain.dim() {
            return Err(SubresError::DimensionMismatch {
                expected: codomain.dim(),
                found: components.len(),
            });
        }
        for p in &components {
            for (m, _) in p.terms() {
                if let Some(i) = m.max_coordinate() {
                    if i >= domain.dim() {
                        return Err(SubresError::InvalidCoordinate { index: i, dim: domain.dim() });
                    }
                }
            }
        }
        Ok(Self { domain, codomain, components })
    }

    /// Self-map of `space` from its output polynomials.
    pub fn endo(space: FilteredSpace, components: Vec<Polynomial>) -> Result<Self, SubresError> {
        Self::new(space.clone(), space, components)
    }

    /// Builds a self-map from `(output, monomial, coefficient)` triples.
    pub fn from_terms<I>(space: FilteredSpace, terms: I) -> Result<Self, SubresError>
    where
        I: IntoIterator<Item = (usize, MultiIndex, Rational)>,
    {
        let mut comps = vec![Polynomial::zero(); space.dim()];
        for (j, m, c) in terms {
            if j >= space.dim() {
                return Err(SubresError::InvalidCoordinate { index: j, dim: space.dim() });
            }
            comps[j].add_term(m, c);
        }
        Self::endo(space, comps)
    }

    pub fn identity(space: FilteredSpace) -> Self {
        let comps = (0..space.dim()).map(Polynomial::var).collect();
        Self { domain: space.clone(), codomain: space, components: comps }
    }

    pub fn domain(&self) -> &FilteredSpace {
        &self.domain
    }

    pub fn codomain(&self) -> &FilteredSpace {
        &self.codomain
    }

    pub fn components(&self) -> &[Polynomial] {
        &self.components
    }

    pub fn component(&self, j: usize) -> &Polynomial {
        &self.components[j]
    }

    /// All `(output, monomial, coefficient)` triples.
    pub fn terms(&self) -> impl Iterator<Item = (usize, &MultiIndex, &Rational)> {
        self.components
            .iter()
            .enumerate()
            .flat_map(|(j, p)| p.terms().map(move |(m, c)| (j, m, c)))
    }

    /// `self ∘ inner`.
    pub fn after(&self, inner: &PolynomialMap) -> Result<PolynomialMap, SubresError> {
        if inner.codomain != self.domain {
            return Err(SubresError::SpaceMismatch);
        }
        let comps = self.components.iter().map(|p| p.substitute(&inner.components)).collect();
        Ok(PolynomialMap {
            domain: inner.domain.clone(),
            codomain: self.codomain.clone(),
            components: comps,
        })
    }

    pub fn eval<T: Scalar>(&self, point: &[T]) -> Result<Vec<T>, SubresError> {
        if point.len() != self.domain.dim() {
            return Err(SubresError::DimensionMismatch {
                expected: self.domain.dim(),
                found: point.len(),
            });
        }
        Ok(self.components.iter().map(|p| p.eval(point)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::super::rational::int;
    use super::*;

    #[test]
    fn substitution_expands_powers() {
        // (x + 2y)^2 with x -> 1, y -> y: 1 + 4y + 4y^2
        let p = Polynomial::var(0).add(&Polynomial::var(1).scale(&int(2)));
        let sq = p.mul(&p);
        let subs = [Polynomial::one(), Polynomial::var(1)];
        let got = sq.substitute(&subs);
        let mut want = Polynomial::one();
        want.add_term(MultiIndex::var(1), int(4));
        want.add_term(MultiIndex::from_pairs([(1, 2)]), int(4));
        assert_eq!(got, want);
    }

    #[test]
    fn cancellation_prunes_zero_terms() {
        let p = Polynomial::var(0).sub(&Polynomial::var(0));
        assert!(p.is_zero());
    }

    #[test]
    fn rejects_out_of_range_monomial() {
        let s = FilteredSpace::simple(vec![int(2), int(1)]).unwrap();
        let r = PolynomialMap::from_terms(s, [(0, MultiIndex::var(3), int(1))]);
        assert!(matches!(r, Err(SubresError::InvalidCoordinate { index: 3, .. })));
    }
}
