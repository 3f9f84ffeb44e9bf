use std::f64::consts::TAU;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::DynamicsError;
use crate::subres::rational::{format_rational, to_f64, Rational, RationalStr};

/// The state space a generator acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpaceKind {
    Interval,
    Circle,
    Torus(usize),
}

impl SpaceKind {
    pub fn dim(self) -> usize {
        match self {
            SpaceKind::Interval | SpaceKind::Circle => 1,
            SpaceKind::Torus(d) => d,
        }
    }

    pub fn is_periodic(self) -> bool {
        !matches!(self, SpaceKind::Interval)
    }

    /// Flat distance: coordinate-wise minimal representative on periodic spaces.
    pub fn distance(self, a: &[f64], b: &[f64]) -> f64 {
        a.iter()
            .zip(b)
            .map(|(x, y)| {
                let d = (x - y).abs();
                if self.is_periodic() {
                    let d = d.rem_euclid(1.0);
                    d.min(1.0 - d)
                } else {
                    d
                }
            })
            .map(|d| d * d)
            .sum::<f64>()
            .sqrt()
    }

    /// Coordinate differences `b - a` using the minimal representative on periodic spaces.
    pub fn displacement(self, a: &[f64], b: &[f64]) -> Vec<f64> {
        a.iter()
            .zip(b)
            .map(|(x, y)| {
                let d = y - x;
                if self.is_periodic() {
                    d - d.round()
                } else {
                    d
                }
            })
            .collect()
    }
}

/// Reduces to `[0, 1)`.
pub fn wrap(x: f64) -> f64 {
    let r = x.rem_euclid(1.0);
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// Square integer matrix, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    n: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self, DynamicsError> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(DynamicsError::InvalidSystem("matrix must be square and nonempty".into()));
        }
        Ok(Self { n, data: rows.iter().flatten().copied().collect() })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.n + j]
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        self.data.chunks(self.n).map(<[i64]>::to_vec).collect()
    }

    pub fn to_f64(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j) as f64)
    }

    /// Exact determinant by fraction-free elimination.
    pub fn determinant(&self) -> i128 {
        let n = self.n;
        let mut m: Vec<Vec<i128>> =
            (0..n).map(|i| (0..n).map(|j| self.get(i, j) as i128).collect()).collect();
        let mut sign = 1i128;
        let mut prev = 1i128;
        for k in 0..n {
            if m[k][k] == 0 {
                match (k + 1..n).find(|&r| m[r][k] != 0) {
                    Some(r) => {
                        m.swap(k, r);
                        sign = -sign;
                    }
                    None => return 0,
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
                }
            }
            prev = m[k][k];
        }
        sign * m[n - 1][n - 1]
    }

    /// Inverse of a unimodular matrix, exact.
    pub fn unimodular_inverse(&self) -> Result<IntMatrix, DynamicsError> {
        let det = self.determinant();
        if det.abs() != 1 {
            return Err(DynamicsError::InvalidSystem(format!("determinant {det} is not ±1")));
        }
        let n = self.n;
        let mut out = vec![vec![0i64; n]; n];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                // adjugate: cofactor of (j, i)
                let minor = self.minor(j, i);
                let c = if (i + j) % 2 == 0 { minor } else { -minor };
                *x = (c * det) as i64;
            }
        }
        IntMatrix::from_rows(&out)
    }

    fn minor(&self, skip_r: usize, skip_c: usize) -> i128 {
        if self.n == 1 {
            return 1;
        }
        let rows: Vec<Vec<i64>> = (0..self.n)
            .filter(|&r| r != skip_r)
            .map(|r| (0..self.n).filter(|&c| c != skip_c).map(|c| self.get(r, c)).collect())
            .collect();
        IntMatrix::from_rows(&rows).expect("square").determinant()
    }
}

/// `coeff · sin(2π ⟨freq, q⟩)` added to output coordinate `component`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrigTerm {
    pub component: usize,
    pub freq: Vec<i64>,
    pub coeff: f64,
}

/// A diffeomorphism generator with a closed-form derivative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SystemJson", into = "SystemJson")]
pub enum SystemSpec {
    ToralAuto { matrix: IntMatrix },
    AffineInterval { slope: Rational, offset: Rational },
    CircleRotation { angle: f64 },
    PerturbedToral { matrix: IntMatrix, terms: Vec<TrigTerm>, amplitude: f64 },
}

/// Grid resolution per axis for the Jacobian-determinant check on perturbed maps.
const DET_GRID: usize = 24;

impl SystemSpec {
    pub fn toral(rows: &[Vec<i64>]) -> Result<Self, DynamicsError> {
        let matrix = IntMatrix::from_rows(rows)?;
        let det = matrix.determinant();
        if det.abs() != 1 {
            return Err(DynamicsError::InvalidSystem(format!(
                "toral automorphism needs determinant ±1, got {det}"
            )));
        }
        Ok(SystemSpec::ToralAuto { matrix })
    }

    pub fn affine(slope: Rational, offset: Rational) -> Result<Self, DynamicsError> {
        if num_traits::Zero::is_zero(&slope) {
            return Err(DynamicsError::InvalidSystem("affine slope must be nonzero".into()));
        }
        Ok(SystemSpec::AffineInterval { slope, offset })
    }

    pub fn rotation(angle: f64) -> Result<Self, DynamicsError> {
        if !angle.is_finite() {
            return Err(DynamicsError::InvalidSystem("rotation angle must be finite".into()));
        }
        Ok(SystemSpec::CircleRotation { angle })
    }

    pub fn perturbed(
        rows: &[Vec<i64>],
        terms: Vec<TrigTerm>,
        amplitude: f64,
    ) -> Result<Self, DynamicsError> {
        let SystemSpec::ToralAuto { matrix } = Self::toral(rows)? else { unreachable!() };
        let d = matrix.dim();
        for t in &terms {
            if t.component >= d || t.freq.len() != d || !t.coeff.is_finite() {
                return Err(DynamicsError::InvalidSystem(format!(
                    "perturbation term {t:?} does not fit dimension {d}"
                )));
            }
        }
        if !amplitude.is_finite() {
            return Err(DynamicsError::InvalidSystem("amplitude must be finite".into()));
        }
        let spec = SystemSpec::PerturbedToral { matrix, terms, amplitude };
        // the determinant must keep one sign and stay away from zero on a sampled grid
        let mut sign = 0.0;
        let total = DET_GRID.pow(d as u32);
        for k in 0..total {
            let mut idx = k;
            let q: Vec<f64> = (0..d)
                .map(|_| {
                    let i = idx % DET_GRID;
                    idx /= DET_GRID;
                    i as f64 / DET_GRID as f64
                })
                .collect();
            let det = spec.jacobian(&q)?.determinant();
            if sign == 0.0 {
                sign = det.signum();
            }
            if det.abs() < 1e-9 || det.signum() != sign {
                return Err(DynamicsError::InvalidSystem(format!(
                    "perturbation too large: Jacobian determinant {det:.3e} at {q:?}"
                )));
            }
        }
        Ok(spec)
    }

    /// `A⁻¹` for a toral automorphism.
    pub fn inverse_toral(&self) -> Result<Self, DynamicsError> {
        match self {
            SystemSpec::ToralAuto { matrix } => {
                Ok(SystemSpec::ToralAuto { matrix: matrix.unimodular_inverse()? })
            }
            _ => Err(DynamicsError::InvalidSystem("only toral automorphisms invert exactly".into())),
        }
    }

    pub fn space(&self) -> SpaceKind {
        match self {
            SystemSpec::ToralAuto { matrix } | SystemSpec::PerturbedToral { matrix, .. } => {
                SpaceKind::Torus(matrix.dim())
            }
            SystemSpec::AffineInterval { .. } => SpaceKind::Interval,
            SystemSpec::CircleRotation { .. } => SpaceKind::Circle,
        }
    }

    pub fn dim(&self) -> usize {
        self.space().dim()
    }

    /// Whether the Jacobian is the same at every point.
    pub fn has_constant_jacobian(&self) -> bool {
        !matches!(self, SystemSpec::PerturbedToral { .. })
    }

    /// Whether the map sends `[0,1]` into itself (affine maps only).
    pub fn preserves_unit_interval(&self) -> bool {
        match self {
            SystemSpec::AffineInterval { slope, offset } => {
                let zero = Rational::from_integer(0.into());
                let one = Rational::from_integer(1.into());
                let a = offset.clone();
                let b = slope + offset;
                a >= zero && a <= one && b >= zero && b <= one
            }
            _ => true,
        }
    }

    fn check_point(&self, q: &[f64]) -> Result<(), DynamicsError> {
        if q.len() != self.dim() {
            return Err(DynamicsError::DimensionMismatch { expected: self.dim(), found: q.len() });
        }
        if q.iter().any(|x| !x.is_finite()) {
            return Err(DynamicsError::PointOutsideDomain(q.to_vec()));
        }
        if let SystemSpec::AffineInterval { .. } = self {
            if !(0.0..=1.0).contains(&q[0]) {
                return Err(DynamicsError::PointOutsideDomain(q.to_vec()));
            }
        }
        Ok(())
    }

    pub fn apply(&self, q: &[f64]) -> Result<Vec<f64>, DynamicsError> {
        self.check_point(q)?;
        let mut out = vec![0.0; q.len()];
        self.compile().apply_into(q, &mut out);
        Ok(out)
    }

    /// Float form of the map for tight loops.
    pub fn compile(&self) -> CompiledMap {
        match self {
            SystemSpec::ToralAuto { matrix } => CompiledMap::Linear { matrix: linear_rows(matrix), terms: vec![] },
            SystemSpec::AffineInterval { slope, offset } => CompiledMap::Affine {
                slope: to_f64(slope),
                offset: to_f64(offset),
                clamp: self.preserves_unit_interval(),
            },
            SystemSpec::CircleRotation { angle } => CompiledMap::Rotation { angle: *angle },
            SystemSpec::PerturbedToral { matrix, terms, amplitude } => CompiledMap::Linear {
                matrix: linear_rows(matrix),
                terms: terms
                    .iter()
                    .map(|t| (t.component, t.freq.iter().map(|&k| k as f64).collect(), amplitude * t.coeff))
                    .collect(),
            },
        }
    }

    pub fn jacobian(&self, q: &[f64]) -> Result<DMatrix<f64>, DynamicsError> {
        self.check_point(q)?;
        Ok(match self {
            SystemSpec::ToralAuto { matrix } => matrix.to_f64(),
            SystemSpec::AffineInterval { slope, .. } => DMatrix::from_element(1, 1, to_f64(slope)),
            SystemSpec::CircleRotation { .. } => DMatrix::identity(1, 1),
            SystemSpec::PerturbedToral { matrix, terms, amplitude } => {
                let mut j = matrix.to_f64();
                for t in terms {
                    let c = amplitude * t.coeff * TAU * (TAU * phase(&t.freq, q)).cos();
                    for (k, &f) in t.freq.iter().enumerate() {
                        j[(t.component, k)] += c * f as f64;
                    }
                }
                j
            }
        })
    }
}

fn linear_rows(m: &IntMatrix) -> Vec<Vec<f64>> {
    (0..m.dim()).map(|i| (0..m.dim()).map(|j| m.get(i, j) as f64).collect()).collect()
}

/// A [`SystemSpec`] with its parameters converted to floats. Does no domain checks.
#[derive(Debug, Clone, PartialEq)]
pub enum CompiledMap {
    /// `x ↦ Mx + Σ a·sin(2π k·x) e_c (mod 1)`.
    Linear { matrix: Vec<Vec<f64>>, terms: Vec<(usize, Vec<f64>, f64)> },
    Affine { slope: f64, offset: f64, clamp: bool },
    Rotation { angle: f64 },
}

impl CompiledMap {
    pub fn apply_into(&self, q: &[f64], out: &mut [f64]) {
        match self {
            CompiledMap::Linear { matrix, terms } => {
                for (o, row) in out.iter_mut().zip(matrix) {
                    *o = row.iter().zip(q).map(|(a, x)| a * x).sum();
                }
                for (c, freq, a) in terms {
                    let ph: f64 = freq.iter().zip(q).map(|(k, x)| k * x).sum();
                    out[*c] += a * (TAU * ph).sin();
                }
                out.iter_mut().for_each(|x| *x = wrap(*x));
            }
            CompiledMap::Affine { slope, offset, clamp } => {
                let y = slope * q[0] + offset;
                // rounding can push an image of [0,1] just outside it
                out[0] = if *clamp { y.clamp(0.0, 1.0) } else { y };
            }
            CompiledMap::Rotation { angle } => out[0] = wrap(q[0] + angle),
        }
    }
}

fn phase(freq: &[i64], q: &[f64]) -> f64 {
    freq.iter().zip(q).map(|(&k, &x)| k as f64 * x).sum()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum SystemJson {
    Toral { matrix: Vec<Vec<i64>> },
    Affine { slope: RationalStr, offset: RationalStr },
    Rotation { angle: f64 },
    Perturbed { matrix: Vec<Vec<i64>>, terms: Vec<TrigTerm>, amplitude: f64 },
}

impl TryFrom<SystemJson> for SystemSpec {
    type Error = DynamicsError;
    fn try_from(j: SystemJson) -> Result<Self, Self::Error> {
        match j {
            SystemJson::Toral { matrix } => SystemSpec::toral(&matrix),
            SystemJson::Affine { slope, offset } => SystemSpec::affine(slope.0, offset.0),
            SystemJson::Rotation { angle } => SystemSpec::rotation(angle),
            SystemJson::Perturbed { matrix, terms, amplitude } => {
                SystemSpec::perturbed(&matrix, terms, amplitude)
            }
        }
    }
}

impl From<SystemSpec> for SystemJson {
    fn from(s: SystemSpec) -> Self {
        match s {
            SystemSpec::ToralAuto { matrix } => SystemJson::Toral { matrix: matrix.rows() },
            SystemSpec::AffineInterval { slope, offset } => {
                SystemJson::Affine { slope: RationalStr(slope), offset: RationalStr(offset) }
            }
            SystemSpec::CircleRotation { angle } => SystemJson::Rotation { angle },
            SystemSpec::PerturbedToral { matrix, terms, amplitude } => {
                SystemJson::Perturbed { matrix: matrix.rows(), terms, amplitude }
            }
        }
    }
}

impl std::fmt::Display for SystemSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SystemSpec::ToralAuto { matrix } => write!(f, "toral{:?}", matrix.rows()),
            SystemSpec::AffineInterval { slope, offset } => {
                write!(f, "x -> {}x + {}", format_rational(slope), format_rational(offset))
            }
            SystemSpec::CircleRotation { angle } => write!(f, "rotation({angle})"),
            SystemSpec::PerturbedToral { matrix, amplitude, .. } => {
                write!(f, "perturbed{:?}(eps={amplitude})", matrix.rows())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subres::rational::frac;

    fn cat() -> SystemSpec {
        SystemSpec::toral(&[vec![2, 1], vec![1, 1]]).unwrap()
    }

    #[test]
    fn apply_fixtures() {
        assert_eq!(cat().apply(&[0.5, 0.5]).unwrap(), vec![0.5, 0.0]);
        let r = SystemSpec::rotation(0.25).unwrap();
        assert_eq!(r.apply(&[0.875]).unwrap(), vec![0.125]);
        let f = SystemSpec::affine(frac(1, 3), frac(2, 3)).unwrap();
        assert_eq!(f.apply(&[0.0]).unwrap(), vec![2.0 / 3.0]);
        assert!(matches!(f.apply(&[1.5]), Err(DynamicsError::PointOutsideDomain(_))));
        assert!(matches!(cat().apply(&[0.5]), Err(DynamicsError::DimensionMismatch { .. })));
    }

    #[test]
    fn jacobian_fixtures() {
        assert_eq!(SystemSpec::rotation(0.3).unwrap().jacobian(&[0.1]).unwrap()[(0, 0)], 1.0);
        let j = cat().jacobian(&[0.123, 0.456]).unwrap();
        assert_eq!(j, DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 1.0]));
        let p = SystemSpec::perturbed(
            &[vec![2, 1], vec![1, 1]],
            vec![TrigTerm { component: 0, freq: vec![1, 0], coeff: 1.0 }],
            0.0,
        )
        .unwrap();
        assert_eq!(p.jacobian(&[0.3, 0.7]).unwrap(), j);
    }

    #[test]
    fn rejects_bad_systems() {
        assert!(SystemSpec::toral(&[vec![2, 0], vec![0, 1]]).is_err());
        assert!(SystemSpec::toral(&[vec![1, 2]]).is_err());
        assert!(SystemSpec::affine(frac(0, 1), frac(1, 2)).is_err());
        // |ε·2π| large enough to fold the map
        let big = SystemSpec::perturbed(
            &[vec![1, 0], vec![0, 1]],
            vec![TrigTerm { component: 0, freq: vec![1, 0], coeff: 1.0 }],
            0.5,
        );
        assert!(big.is_err());
    }

    #[test]
    fn unimodular_inverse_exact() {
        let m = IntMatrix::from_rows(&[vec![2, 1, 0], vec![1, 1, 0], vec![0, 0, -1]]).unwrap();
        assert_eq!(m.determinant(), -1);
        let inv = m.unimodular_inverse().unwrap();
        let prod = inv.to_f64() * m.to_f64();
        assert_eq!(prod, DMatrix::identity(3, 3));
    }

    #[test]
    fn json_round_trip() {
        let s: SystemSpec = serde_json::from_str(r#"{"kind":"toral","matrix":[[2,1],[1,1]]}"#).unwrap();
        assert_eq!(s, cat());
        let a: SystemSpec =
            serde_json::from_str(r#"{"kind":"affine","slope":"1/3","offset":"2/3"}"#).unwrap();
        let back: SystemSpec = serde_json::from_str(&serde_json::to_string(&a).unwrap()).unwrap();
        assert_eq!(a, back);
        assert!(serde_json::from_str::<SystemSpec>(r#"{"kind":"toral","matrix":[[2,0],[0,1]]}"#).is_err());
    }

    #[test]
    fn flat_distance_wraps() {
        let t = SpaceKind::Torus(2);
        assert!((t.distance(&[0.95, 0.0], &[0.05, 0.0]) - 0.1).abs() < 1e-12);
        assert!((SpaceKind::Interval.distance(&[0.95], &[0.05]) - 0.9).abs() < 1e-12);
    }
}
