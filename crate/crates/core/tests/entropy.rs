mod common;

use common::*;
use rigidlab::dynamics::{lyapunov_with, LyapunovMethod, SystemSpec, WordSource};
use rigidlab::entropy::*;
use rigidlab::subres::rational::frac;
use rigidlab::walk::WalkMeasure;

#[test]
fn shannon_entropy_bounded_by_log_support() {
    let gens: Vec<SystemSpec> = (1..=5).map(|k| SystemSpec::rotation(k as f64 / 7.0).unwrap()).collect();
    let uniform = WalkMeasure::uniform(gens.clone()).unwrap();
    assert!((shannon_entropy(&uniform) - 5f64.ln()).abs() < 1e-15);
    let skew = WalkMeasure::new(
        gens.into_iter().zip([frac(1, 2), frac(1, 4), frac(1, 8), frac(1, 16), frac(1, 16)]).collect(),
    )
    .unwrap();
    assert!(shannon_entropy(&skew) < 5f64.ln());
    assert!((shannon_entropy(&skew) - 15.0 / 8.0 * 2f64.ln()).abs() < 1e-15);
}

#[test]
fn pesin_sum_monotone_in_exponents() {
    let mut prev = -1.0;
    for k in 0..10 {
        let l = k as f64 * 0.1;
        let s = SpectrumSummary::new(vec![l + 0.05, -l - 0.05], vec![1, 1]).unwrap();
        let p = pesin_sum(&s).unwrap();
        assert!(p > prev);
        prev = p;
    }
}

#[test]
fn measured_cat_map_spectrum_feeds_pesin() {
    let a = cat();
    let r = lyapunov_with(LyapunovMethod::Qr, WordSource::Fixed(&a), &[0.3, 0.7], 50, 10_000, 1).unwrap();
    let spec = SpectrumSummary::from_estimates(&r.exponents, 1e-6).unwrap();
    assert!((pesin_sum(&spec).unwrap() - golden_log()).abs() < 1e-3);
    let with = spec.with_bundles(vec![1, 0], vec![1, 0]).unwrap();
    let (lo, hi) = ly_bounds(&with).unwrap();
    assert_eq!(lo, hi);
}

#[test]
fn relative_entropy_and_stiffness_agree_on_sign() {
    let h = 2f64.ln();
    let z = SpectrumSummary::new(vec![0.0], vec![2]).unwrap();
    let chain = stiffness_chain(h, &z, Some(h)).unwrap();
    let check = relative_entropy_bound_check(h, h, 1e-12).unwrap();
    assert!(chain.consistent && check.consistent && check.invariance_consistent);
    let neg = SpectrumSummary::new(vec![-0.2], vec![1]).unwrap();
    let chain = stiffness_chain(h, &neg, Some(h)).unwrap();
    let check = relative_entropy_bound_check(h, h + 0.1, 1e-12).unwrap();
    assert!(!chain.consistent && !check.consistent);
}
