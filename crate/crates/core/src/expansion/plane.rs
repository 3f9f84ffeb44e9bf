use nalgebra::DMatrix;

use super::ExpansionError;

/// A `d`-plane in the tangent space at `base`, held as an orthonormal frame and
/// as its unit Plücker vector in `Λ^d` (coordinates indexed by increasing
/// `d`-subsets in lexicographic order).
#[derive(Debug, Clone, PartialEq)]
pub struct PlaneSpec {
    base: Vec<f64>,
    frame: DMatrix<f64>,
    plucker: Vec<f64>,
}

impl PlaneSpec {
    /// Span of `vectors` at `base`; the vectors are orthonormalized.
    pub fn new(base: Vec<f64>, vectors: &[Vec<f64>]) -> Result<Self, ExpansionError> {
        let n = base.len();
        let d = vectors.len();
        if d == 0 || d > n {
            return Err(ExpansionError::InvalidPlane(format!("cannot span a {d}-plane in dimension {n}")));
        }
        if vectors.iter().any(|v| v.len() != n || v.iter().any(|x| !x.is_finite())) {
            return Err(ExpansionError::InvalidPlane("spanning vectors must be finite and match the base".into()));
        }
        let m = DMatrix::from_fn(n, d, |i, j| vectors[j][i]);
        let scale = m.norm();
        let qr = m.qr();
        if qr.r().diagonal().iter().any(|r| r.abs() <= 1e-12 * scale) {
            return Err(ExpansionError::InvalidPlane("spanning vectors are linearly dependent".into()));
        }
        Ok(Self::from_orthonormal(base, qr.q()))
    }

    fn from_orthonormal(base: Vec<f64>, frame: DMatrix<f64>) -> Self {
        let plucker = plucker(&frame);
        Self { base, frame, plucker }
    }

    /// The line at angle `theta` (radians from the first axis) in a 2-dimensional tangent space.
    pub fn line(base: Vec<f64>, theta: f64) -> Result<Self, ExpansionError> {
        if base.len() != 2 {
            return Err(ExpansionError::InvalidPlane("angle parametrization needs dimension 2".into()));
        }
        Self::new(base, &[vec![theta.cos(), theta.sin()]])
    }

    /// The whole tangent space.
    pub fn full(base: Vec<f64>) -> Self {
        let n = base.len();
        Self::from_orthonormal(base, DMatrix::identity(n, n))
    }

    /// The plane spanned by the first `k` frame vectors.
    pub fn leading(&self, k: usize) -> Result<Self, ExpansionError> {
        if k == 0 || k > self.dim() {
            return Err(ExpansionError::InvalidPlane(format!("no leading {k}-plane in a {}-plane", self.dim())));
        }
        Ok(Self::from_orthonormal(self.base.clone(), self.frame.columns(0, k).into_owned()))
    }

    pub fn base(&self) -> &[f64] {
        &self.base
    }

    /// Dimension `d` of the plane.
    pub fn dim(&self) -> usize {
        self.frame.ncols()
    }

    pub fn ambient_dim(&self) -> usize {
        self.frame.nrows()
    }

    /// Orthonormal spanning vectors as columns.
    pub fn frame(&self) -> &DMatrix<f64> {
        &self.frame
    }

    pub fn vectors(&self) -> Vec<Vec<f64>> {
        self.frame.column_iter().map(|c| c.iter().copied().collect()).collect()
    }

    pub fn plucker(&self) -> &[f64] {
        &self.plucker
    }

    /// Whether `self` lies inside `other` (same base point, up to `tol`).
    pub fn is_contained_in(&self, other: &PlaneSpec, tol: f64) -> bool {
        self.base == other.base
            && self.ambient_dim() == other.ambient_dim()
            && (&self.frame - &other.frame * (other.frame.transpose() * &self.frame)).norm() <= tol
    }
}

/// All `k`-subsets of `0..n` in lexicographic order.
fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

fn plucker(frame: &DMatrix<f64>) -> Vec<f64> {
    let (n, d) = frame.shape();
    subsets(n, d)
        .into_iter()
        .map(|rows| DMatrix::from_fn(d, d, |i, j| frame[(rows[i], j)]).determinant())
        .collect()
}
