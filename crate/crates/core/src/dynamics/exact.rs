//! Lyapunov estimates in exact integer arithmetic for words of toral automorphisms.
//!
//! Floating-point QR loses the product `A⁻¹A` once the frame has aligned with an
//! expanding direction: rounding error in the contracting direction is amplified
//! on the way back. Keeping the product in integers and reading the QR diagonal
//! from Gram determinants avoids that.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use super::lyapunov::LyapunovReport;
use super::{DynamicsError, IntMatrix, SystemSpec, WordSource};
use crate::rng;

/// Whether every generator of `source` is a toral automorphism.
pub fn supports_exact(source: WordSource<'_>) -> bool {
    match source {
        WordSource::Fixed(g) => matches!(g, SystemSpec::ToralAuto { .. }),
        WordSource::Walk(m) => m.atoms().iter().all(|(g, _)| matches!(g, SystemSpec::ToralAuto { .. })),
    }
}

/// Natural log of a positive integer of any size.
fn big_ln(x: &BigInt) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().expect("fits").ln();
    }
    let shift = bits - 64;
    (x >> shift).to_f64().expect("fits").ln() + shift as f64 * std::f64::consts::LN_2
}

/// Fraction-free determinant.
fn bareiss(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    let mut sign = 1;
    let mut prev = BigInt::from(1);
    for k in 0..n {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    prev * sign
}

/// `log |R_ii|` of the QR factorization of `m`, from `R_11² ⋯ R_kk² = det G_k`
/// with `G = mᵀm`.
fn log_r_diagonal(m: &[Vec<BigInt>]) -> Vec<f64> {
    let d = m.len();
    let gram: Vec<Vec<BigInt>> = (0..d)
        .map(|i| (0..d).map(|j| (0..d).fold(BigInt::zero(), |s, k| s + &m[k][i] * &m[k][j])).collect())
        .collect();
    let mut prev = 0.0;
    (1..=d)
        .map(|k| {
            let minor: Vec<Vec<BigInt>> = gram[..k].iter().map(|r| r[..k].to_vec()).collect();
            let ln = big_ln(&bareiss(minor).abs());
            let out = 0.5 * (ln - prev);
            prev = ln;
            out
        })
        .collect()
}

fn left_mul(a: &IntMatrix, m: &mut Vec<Vec<BigInt>>) {
    let d = m.len();
    let next = (0..d)
        .map(|i| {
            (0..d)
                .map(|j| {
                    (0..d).fold(BigInt::zero(), |s, k| match a.get(i, k) {
                        0 => s,
                        1 => s + &m[k][j],
                        -1 => s - &m[k][j],
                        c => s + &m[k][j] * c,
                    })
                })
                .collect()
        })
        .collect();
    *m = next;
}

/// Same estimate as [`super::lyapunov_qr_after`] (same word for the same seed),
/// computed exactly up to the final logarithms. Needs toral automorphisms only.
/// Cost grows like `n²` since the entries have `O(n)` digits.
pub fn lyapunov_exact(
    source: WordSource<'_>,
    q0: &[f64],
    transient: usize,
    n: usize,
    seed: u64,
) -> Result<LyapunovReport, DynamicsError> {
    if n == 0 {
        return Err(DynamicsError::NoSteps);
    }
    let d = source.dim();
    if q0.len() != d {
        return Err(DynamicsError::DimensionMismatch { expected: d, found: q0.len() });
    }
    if !supports_exact(source) {
        return Err(DynamicsError::InvalidSystem("exact exponents need toral automorphisms".into()));
    }
    let mut rng = rng::stream(seed, 0);
    let mut m: Vec<Vec<BigInt>> = (0..d).map(|i| (0..d).map(|j| BigInt::from((i == j) as i64)).collect()).collect();
    let mut before = vec![0.0; d];
    for step in 0..transient + n {
        if step == transient && transient > 0 {
            before = log_r_diagonal(&m);
        }
        let SystemSpec::ToralAuto { matrix } = source.next(&mut rng) else { unreachable!("checked above") };
        left_mul(matrix, &mut m);
    }
    let log_r: Vec<f64> = log_r_diagonal(&m).iter().zip(&before).map(|(a, b)| a - b).collect();
    let residual = log_r.iter().sum::<f64>().abs() / n as f64;
    let mut exponents: Vec<f64> = log_r.iter().map(|s| s / n as f64).collect();
    exponents.sort_by(|a, b| b.total_cmp(a));
    Ok(LyapunovReport { exponents, n_steps: n, seed, residual })
}
