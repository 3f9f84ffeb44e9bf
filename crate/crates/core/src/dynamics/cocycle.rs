use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use super::{DynamicsError, SystemSpec};

/// Derivative cocycle `D_q f^{∘n}` along a word of generators, starting at `base`.
#[derive(Debug, Clone)]
pub struct TangentCocycle {
    pub word: Vec<usize>,
    pub base: Vec<f64>,
    /// `J_{w_{n-1}}(q_{n-1}) ⋯ J_{w_0}(q_0)`.
    pub product: DMatrix<f64>,
    /// The same product in exact integers when every letter is a toral automorphism.
    pub exact: Option<Vec<Vec<BigInt>>>,
    pub endpoint: Vec<f64>,
}

impl TangentCocycle {
    pub fn along(gens: &[SystemSpec], word: &[usize], base: &[f64]) -> Result<Self, DynamicsError> {
        let dim = base.len();
        let mut q = base.to_vec();
        let mut product = DMatrix::<f64>::identity(dim, dim);
        let all_toral = word.iter().all(|&w| matches!(gens[w], SystemSpec::ToralAuto { .. }));
        let mut exact = all_toral.then(|| {
            (0..dim)
                .map(|i| (0..dim).map(|j| BigInt::from((i == j) as i64)).collect::<Vec<_>>())
                .collect::<Vec<_>>()
        });
        for &w in word {
            let g = &gens[w];
            product = g.jacobian(&q)? * product;
            if let (Some(acc), SystemSpec::ToralAuto { matrix }) = (exact.as_mut(), g) {
                let next: Vec<Vec<BigInt>> = (0..dim)
                    .map(|i| {
                        (0..dim)
                            .map(|j| {
                                (0..dim).fold(BigInt::zero(), |s, k| s + matrix.get(i, k) * &acc[k][j])
                            })
                            .collect()
                    })
                    .collect();
                *acc = next;
            }
            q = g.apply(&q)?;
        }
        Ok(Self { word: word.to_vec(), base: base.to_vec(), product, exact, endpoint: q })
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    /// The exact product rounded to floats, if available.
    pub fn exact_as_f64(&self) -> Option<DMatrix<f64>> {
        let e = self.exact.as_ref()?;
        let d = e.len();
        Some(DMatrix::from_fn(d, d, |i, j| e[i][j].to_f64().unwrap_or(f64::NAN)))
    }
}
