use super::exact::{self, RatMatrix};
use super::poly::{Polynomial, PolynomialMap, Scalar};
use super::rational::Rational;
use super::space::{FilteredSpace, MultiIndex};
use super::SubresError;

/// A polynomial self-map that passed the subresonance check and has a polynomial
/// inverse. Instances only come out of [`validate`] and the group operations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubresonantMap {
    map: PolynomialMap,
    strict: bool,
}

impl SubresonantMap {
    pub fn identity(space: FilteredSpace) -> Self {
        Self { map: PolynomialMap::identity(space), strict: true }
    }

    /// `v ↦ v + shift`.
    pub fn translation(space: FilteredSpace, shift: &[Rational]) -> Result<Self, SubresError> {
        if shift.len() != space.dim() {
            return Err(SubresError::DimensionMismatch { expected: space.dim(), found: shift.len() });
        }
        let comps = shift
            .iter()
            .enumerate()
            .map(|(i, c)| Polynomial::var(i).add(&Polynomial::constant(c.clone())))
            .collect();
        validate(PolynomialMap::endo(space, comps)?, true)
    }

    pub fn space(&self) -> &FilteredSpace {
        self.map.domain()
    }

    pub fn map(&self) -> &PolynomialMap {
        &self.map
    }

    pub fn into_map(self) -> PolynomialMap {
        self.map
    }

    pub fn is_strict(&self) -> bool {
        self.strict
    }

    pub fn is_identity(&self) -> bool {
        self.map == PolynomialMap::identity(self.space().clone())
    }

    /// Square block of linear coefficients among the coordinates of weight block `b`.
    pub fn graded_block(&self, b: usize) -> RatMatrix {
        graded_block(&self.map, b)
    }

    /// The weight-preserving part: only the monomials whose weight equals the
    /// weight of their output coordinate.
    pub fn graded_part(&self) -> SubresonantMap {
        let space = self.space().clone();
        let mut comps = vec![Polynomial::zero(); space.dim()];
        for (j, m, c) in self.map.terms() {
            let w = space.monomial_weight(m).expect("validated");
            if &w == space.coordinate_weight(j) {
                comps[j].add_term(m.clone(), c.clone());
            }
        }
        let map = PolynomialMap::endo(space, comps).expect("same shape");
        validate(map, false).expect("graded part of a subresonant map is subresonant")
    }
}

fn graded_block(map: &PolynomialMap, b: usize) -> RatMatrix {
    let coords = map.domain().block_coordinates(b);
    coords
        .clone()
        .map(|i| {
            coords
                .clone()
                .map(|k| map.component(i).coefficient(&MultiIndex::var(k)))
                .collect()
        })
        .collect()
}

/// Membership test for the subresonant group, and for the strict subgroup when
/// `strict_requested` is set.
pub fn validate(map: PolynomialMap, strict_requested: bool) -> Result<SubresonantMap, SubresError> {
    if map.domain() != map.codomain() {
        return Err(SubresError::SpaceMismatch);
    }
    let space = map.domain().clone();
    for (j, m, _) in map.terms() {
        if &space.monomial_weight(m)? > space.coordinate_weight(j) {
            return Err(SubresError::ResonanceViolation { output: j, monomial: m.clone() });
        }
    }
    // strict: F - id has only monomials strictly lighter than their output coordinate
    let mut strict = true;
    for j in 0..space.dim() {
        let diff = map.component(j).sub(&Polynomial::var(j));
        for (m, _) in diff.terms() {
            if &space.monomial_weight(m)? >= space.coordinate_weight(j) {
                if strict_requested {
                    return Err(SubresError::NotStrict { output: j, monomial: m.clone() });
                }
                strict = false;
            }
        }
    }
    for b in 0..space.weights().len() {
        if exact::inverse(&graded_block(&map, b)).is_none() {
            return Err(SubresError::SingularGradedPart { weight: space.weights()[b].clone() });
        }
    }
    Ok(SubresonantMap { map, strict })
}

/// `f ∘ g`.
pub fn compose(f: &SubresonantMap, g: &SubresonantMap) -> Result<SubresonantMap, SubresError> {
    if f.space() != g.space() {
        return Err(SubresError::SpaceMismatch);
    }
    let map = f.map.after(&g.map)?;
    let strict = f.strict && g.strict;
    let out = validate(map, false)?;
    debug_assert!(!strict || out.strict, "strict subgroup not closed under composition");
    Ok(out)
}

/// Exact inverse, solved weight block by weight block from the lightest up.
///
/// In output coordinate `i` of weight `λ`, the only terms that are not constants or
/// monomials in strictly lighter coordinates are the linear ones inside the weight-`λ`
/// block, so each block is one rational linear solve once the lighter blocks are known.
pub fn invert(f: &SubresonantMap) -> Result<SubresonantMap, SubresError> {
    let space = f.space().clone();
    let n = space.dim();
    let mut inverse: Vec<Polynomial> = (0..n).map(Polynomial::var).collect();
    for b in (0..space.weights().len()).rev() {
        let coords: Vec<usize> = space.block_coordinates(b).collect();
        let a_inv = exact::inverse(&f.graded_block(b))
            .ok_or_else(|| SubresError::SingularGradedPart { weight: space.weights()[b].clone() })?;
        let rhs: Vec<Polynomial> = coords
            .iter()
            .map(|&i| {
                let mut rest = f.map.component(i).clone();
                for &k in &coords {
                    let c = rest.coefficient(&MultiIndex::var(k));
                    rest.add_term(MultiIndex::var(k), -c);
                }
                // `rest` only involves lighter coordinates, whose inverses are final.
                Polynomial::var(i).sub(&rest.substitute(&inverse))
            })
            .collect();
        for (row, &i) in coords.iter().enumerate() {
            let mut gi = Polynomial::zero();
            for (col, r) in rhs.iter().enumerate() {
                gi = gi.add(&r.scale(&a_inv[row][col]));
            }
            inverse[i] = gi;
        }
    }
    validate(PolynomialMap::endo(space, inverse)?, false)
}

/// `g ∘ f ∘ g⁻¹`.
pub fn conjugate(g: &SubresonantMap, f: &SubresonantMap) -> Result<SubresonantMap, SubresError> {
    compose(&compose(g, f)?, &invert(g)?)
}

pub fn act<T: Scalar>(f: &SubresonantMap, v: &[T]) -> Result<Vec<T>, SubresError> {
    f.map.eval(v)
}

#[cfg(test)]
mod tests {
    use super::super::rational::{frac, int};
    use super::*;

    fn space21() -> FilteredSpace {
        FilteredSpace::simple(vec![int(2), int(1)]).unwrap()
    }

    fn y2() -> MultiIndex {
        MultiIndex::from_pairs([(1, 2)])
    }

    // (3x + y + 2y², 2y)
    fn example() -> SubresonantMap {
        let m = PolynomialMap::from_terms(
            space21(),
            [
                (0, MultiIndex::var(0), int(3)),
                (0, MultiIndex::var(1), int(1)),
                (0, y2(), int(2)),
                (1, MultiIndex::var(1), int(2)),
            ],
        )
        .unwrap();
        validate(m, false).unwrap()
    }

    #[test]
    fn example_validates_non_strict() {
        let f = example();
        assert!(!f.is_strict());
        assert!(matches!(
            validate(f.map().clone(), true),
            Err(SubresError::NotStrict { .. })
        ));
    }

    #[test]
    fn identity_is_strict() {
        let id = validate(PolynomialMap::identity(space21()), true).unwrap();
        assert!(id.is_strict());
    }

    #[test]
    fn resonance_violation_names_offender() {
        let m = PolynomialMap::from_terms(
            space21(),
            [
                (0, MultiIndex::var(0), int(1)),
                (1, MultiIndex::var(1), int(1)),
                (1, MultiIndex::from_pairs([(0, 2)]), int(1)),
            ],
        )
        .unwrap();
        match validate(m, false) {
            Err(SubresError::ResonanceViolation { output, monomial }) => {
                assert_eq!(output, 1);
                assert_eq!(monomial, MultiIndex::from_pairs([(0, 2)]));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn singular_graded_part() {
        let m = PolynomialMap::from_terms(
            space21(),
            [(0, MultiIndex::var(0), int(1)), (1, y2(), int(0))],
        )
        .unwrap();
        assert!(matches!(validate(m, false), Err(SubresError::SingularGradedPart { .. })));
    }

    #[test]
    fn compose_by_hand() {
        let f = example();
        let g = validate(
            PolynomialMap::from_terms(
                space21(),
                [(0, MultiIndex::var(0), int(1)), (1, MultiIndex::var(1), int(2))],
            )
            .unwrap(),
            false,
        )
        .unwrap();
        let h = compose(&f, &g).unwrap();
        let want = PolynomialMap::from_terms(
            space21(),
            [
                (0, MultiIndex::var(0), int(3)),
                (0, MultiIndex::var(1), int(2)),
                (0, y2(), int(8)),
                (1, MultiIndex::var(1), int(4)),
            ],
        )
        .unwrap();
        assert_eq!(h.map(), &want);
        assert_eq!(compose(&f, &SubresonantMap::identity(space21())).unwrap(), f);
    }

    #[test]
    fn invert_example() {
        let f = example();
        let g = invert(&f).unwrap();
        let want = PolynomialMap::from_terms(
            space21(),
            [
                (0, MultiIndex::var(0), frac(1, 3)),
                (0, MultiIndex::var(1), frac(-1, 6)),
                (0, y2(), frac(-1, 6)),
                (1, MultiIndex::var(1), frac(1, 2)),
            ],
        )
        .unwrap();
        assert_eq!(g.map(), &want);
        assert!(compose(&f, &g).unwrap().is_identity());
        assert!(compose(&g, &f).unwrap().is_identity());
    }

    #[test]
    fn invert_translation() {
        let t = SubresonantMap::translation(space21(), &[int(1), frac(-2, 3)]).unwrap();
        assert!(t.is_strict());
        let inv = invert(&t).unwrap();
        assert_eq!(inv, SubresonantMap::translation(space21(), &[int(-1), frac(2, 3)]).unwrap());
        let id = SubresonantMap::identity(space21());
        assert_eq!(invert(&id).unwrap(), id);
    }

    #[test]
    fn act_example() {
        let f = example();
        assert_eq!(act(&f, &[int(1), int(1)]).unwrap(), vec![int(6), int(2)]);
        assert_eq!(act(&f, &[1.0, 1.0]).unwrap(), vec![6.0, 2.0]);
        assert!(matches!(act(&f, &[int(1)]), Err(SubresError::DimensionMismatch { .. })));
        let v = [frac(3, 7), frac(-5, 2)];
        let back = act(&invert(&f).unwrap(), &act(&f, &v).unwrap()).unwrap();
        assert_eq!(back, v.to_vec());
    }

    #[test]
    fn conjugation_fixtures() {
        let f = example();
        let id = SubresonantMap::identity(space21());
        assert_eq!(conjugate(&f, &id).unwrap(), id);
        assert_eq!(conjugate(&id, &f).unwrap(), f);
    }

    #[test]
    fn multiplicity_blocks_can_mix() {
        // weight 1 block of size 2 with a rotation-like mixing matrix
        let s = FilteredSpace::new(vec![(int(2), 1), (int(1), 2)]).unwrap();
        let m = PolynomialMap::from_terms(
            s.clone(),
            [
                (0, MultiIndex::var(0), int(1)),
                (0, MultiIndex::from_pairs([(1, 1), (2, 1)]), int(5)),
                (1, MultiIndex::var(2), int(1)),
                (2, MultiIndex::var(1), int(-1)),
                (2, MultiIndex::var(2), int(1)),
            ],
        )
        .unwrap();
        let f = validate(m, false).unwrap();
        let g = invert(&f).unwrap();
        assert!(compose(&f, &g).unwrap().is_identity());
        assert!(compose(&g, &f).unwrap().is_identity());
    }

    #[test]
    fn single_weight_is_affine_group() {
        let s = FilteredSpace::new(vec![(int(1), 2)]).unwrap();
        assert_eq!(s.monomials_up_to(&int(1), true).len(), 3);
        let m = PolynomialMap::from_terms(
            s,
            [
                (0, MultiIndex::var(0), int(2)),
                (0, MultiIndex::var(1), int(1)),
                (0, MultiIndex::constant(), int(4)),
                (1, MultiIndex::var(0), int(1)),
                (1, MultiIndex::var(1), int(1)),
            ],
        )
        .unwrap();
        let f = validate(m.clone(), false).unwrap();
        assert!(compose(&f, &invert(&f).unwrap()).unwrap().is_identity());
        let mut bad = m.components().to_vec();
        bad[1].add_term(MultiIndex::from_pairs([(0, 2)]), int(1));
        let bad = PolynomialMap::endo(f.space().clone(), bad).unwrap();
        assert!(matches!(validate(bad, false), Err(SubresError::ResonanceViolation { .. })));
    }
}
