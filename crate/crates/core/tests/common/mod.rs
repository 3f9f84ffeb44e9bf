#![allow(dead_code)]

use rand::Rng;
use rigidlab::dynamics::SystemSpec;
use rigidlab::rng;
use rigidlab::subres::rational::{frac, int};
use rigidlab::subres::{validate, FilteredSpace, MultiIndex, Polynomial, PolynomialMap, Rational, SubresonantMap};
use rigidlab::walk::WalkMeasure;

/// The weight sets the property tests sample from.
pub fn weight_sets() -> Vec<FilteredSpace> {
    vec![
        FilteredSpace::simple(vec![int(2), int(1)]).unwrap(),
        FilteredSpace::simple(vec![int(3), int(2), int(1)]).unwrap(),
        FilteredSpace::simple(vec![frac(5, 2), int(1)]).unwrap(),
    ]
}

fn small<R: Rng>(r: &mut R, nonzero: bool) -> Rational {
    loop {
        let num = r.random_range(-3i64..=3);
        let den = r.random_range(1i64..=2);
        if !nonzero || num != 0 {
            return frac(num, den);
        }
    }
}

/// A random subresonant map on `space`. Every admissible monomial appears with
/// probability one half; constants only when `affine` is set. With `strict` the
/// graded part is the identity.
pub fn random_map(space: &FilteredSpace, seed: u64, strict: bool, affine: bool) -> SubresonantMap {
    let mut r = rng::stream(seed, 0);
    let mut comps = Vec::with_capacity(space.dim());
    for j in 0..space.dim() {
        let wj = space.coordinate_weight(j).clone();
        let mut p = Polynomial::zero();
        for m in space.monomials_up_to(&wj, affine) {
            let w = space.monomial_weight(&m).unwrap();
            if m == MultiIndex::var(j) {
                p.add_term(m, if strict { int(1) } else { small(&mut r, true) });
            } else if (w < wj || !strict) && r.random_bool(0.5) {
                p.add_term(m, small(&mut r, false));
            }
        }
        comps.push(p);
    }
    validate(PolynomialMap::endo(space.clone(), comps).unwrap(), strict).unwrap()
}

/// `(3x + y + 2y², 2y)` on weights `(2, 1)`.
pub fn example_map() -> SubresonantMap {
    let s = FilteredSpace::simple(vec![int(2), int(1)]).unwrap();
    let y2 = MultiIndex::from_pairs([(1, 2)]);
    let m = PolynomialMap::from_terms(
        s,
        [
            (0, MultiIndex::var(0), int(3)),
            (0, MultiIndex::var(1), int(1)),
            (0, y2, int(2)),
            (1, MultiIndex::var(1), int(2)),
        ],
    )
    .unwrap();
    validate(m, false).unwrap()
}

pub fn random_point<R: Rng>(r: &mut R, dim: usize) -> Vec<Rational> {
    (0..dim).map(|_| frac(r.random_range(-50i64..=50), r.random_range(1i64..=20))).collect()
}

pub fn cat() -> SystemSpec {
    SystemSpec::toral(&[vec![2, 1], vec![1, 1]]).unwrap()
}

pub fn cat_inverse() -> SystemSpec {
    SystemSpec::toral(&[vec![1, -1], vec![-1, 2]]).unwrap()
}

pub fn cat_transpose() -> SystemSpec {
    SystemSpec::toral(&[vec![1, 1], vec![1, 2]]).unwrap()
}

pub fn cantor() -> WalkMeasure {
    WalkMeasure::uniform(vec![
        SystemSpec::affine(frac(1, 3), frac(0, 1)).unwrap(),
        SystemSpec::affine(frac(1, 3), frac(2, 3)).unwrap(),
    ])
    .unwrap()
}

/// `log((3 + √5)/2)`, the top exponent of the cat map.
pub fn golden_log() -> f64 {
    ((3.0 + 5f64.sqrt()) / 2.0).ln()
}
