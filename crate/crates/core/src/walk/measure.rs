use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::WalkError;
use crate::dynamics::{CompiledMap, SpaceKind, SystemSpec};
use crate::subres::rational::{frac, to_f64, Rational, RationalStr};

/// Finitely supported probability measure on generators.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkMeasure {
    atoms: Vec<(SystemSpec, Rational)>,
    probabilities: Vec<f64>,
    cumulative: Vec<f64>,
    compiled: Vec<CompiledMap>,
}

impl WalkMeasure {
    pub fn new(atoms: Vec<(SystemSpec, Rational)>) -> Result<Self, WalkError> {
        if atoms.is_empty() {
            return Err(WalkError::InvalidMeasure("no atoms".into()));
        }
        let space = atoms[0].0.space();
        let mut total = Rational::zero();
        for (g, p) in &atoms {
            if !p.is_positive() {
                return Err(WalkError::InvalidMeasure("probabilities must be positive".into()));
            }
            if g.space() != space {
                return Err(WalkError::InvalidMeasure(format!(
                    "generator {g} acts on {:?}, expected {space:?}",
                    g.space()
                )));
            }
            if space == SpaceKind::Interval && !g.preserves_unit_interval() {
                return Err(WalkError::InvalidMeasure(format!("{g} does not map [0,1] into itself")));
            }
            total += p;
        }
        if !total.is_one() {
            return Err(WalkError::InvalidMeasure("probabilities must sum to exactly 1".into()));
        }
        let probabilities: Vec<f64> = atoms.iter().map(|(_, p)| to_f64(p)).collect();
        let mut acc = Rational::zero();
        let cumulative = atoms
            .iter()
            .map(|(_, p)| {
                acc += p;
                to_f64(&acc)
            })
            .collect();
        let compiled = atoms.iter().map(|(g, _)| g.compile()).collect();
        Ok(Self { atoms, probabilities, cumulative, compiled })
    }

    /// Equal weights on `gens`.
    pub fn uniform(gens: Vec<SystemSpec>) -> Result<Self, WalkError> {
        let n = gens.len() as i64;
        Self::new(gens.into_iter().map(|g| (g, frac(1, n.max(1)))).collect())
    }

    pub fn dirac(g: SystemSpec) -> Self {
        Self::new(vec![(g, Rational::one())]).expect("single atom")
    }

    pub fn atoms(&self) -> &[(SystemSpec, Rational)] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn generator(&self, i: usize) -> &SystemSpec {
        &self.atoms[i].0
    }

    pub fn compiled(&self, i: usize) -> &CompiledMap {
        &self.compiled[i]
    }

    pub fn probability(&self, i: usize) -> f64 {
        self.probabilities[i]
    }

    pub fn space(&self) -> SpaceKind {
        self.atoms[0].0.space()
    }

    pub fn dim(&self) -> usize {
        self.space().dim()
    }

    pub fn sample_index<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        if self.atoms.len() == 1 {
            return 0;
        }
        let u: f64 = rng.random();
        self.cumulative.iter().position(|&c| u < c).unwrap_or(self.atoms.len() - 1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomJson {
    pub system: SystemSpec,
    pub p: RationalStr,
}

/// JSON form: `{"atoms":[{"system":{...},"p":"1/2"}, ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WalkJson {
    pub atoms: Vec<AtomJson>,
}

impl TryFrom<WalkJson> for WalkMeasure {
    type Error = WalkError;
    fn try_from(j: WalkJson) -> Result<Self, WalkError> {
        WalkMeasure::new(j.atoms.into_iter().map(|a| (a.system, a.p.0)).collect())
    }
}

impl From<&WalkMeasure> for WalkJson {
    fn from(m: &WalkMeasure) -> Self {
        WalkJson {
            atoms: m
                .atoms
                .iter()
                .map(|(g, p)| AtomJson { system: g.clone(), p: RationalStr(p.clone()) })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    fn cantor_maps() -> Vec<SystemSpec> {
        vec![
            SystemSpec::affine(frac(1, 3), frac(0, 1)).unwrap(),
            SystemSpec::affine(frac(1, 3), frac(2, 3)).unwrap(),
        ]
    }

    #[test]
    fn probabilities_must_sum_to_one() {
        let g = cantor_maps();
        assert!(WalkMeasure::new(vec![(g[0].clone(), frac(1, 2)), (g[1].clone(), frac(1, 3))]).is_err());
        assert!(WalkMeasure::new(vec![(g[0].clone(), frac(3, 2)), (g[1].clone(), frac(-1, 2))]).is_err());
        assert!(WalkMeasure::new(vec![]).is_err());
        assert!(WalkMeasure::uniform(g).is_ok());
    }

    #[test]
    fn mixed_spaces_rejected() {
        let mixed = vec![cantor_maps()[0].clone(), SystemSpec::rotation(0.1).unwrap()];
        assert!(WalkMeasure::uniform(mixed).is_err());
        let escaping = SystemSpec::affine(frac(1, 2), frac(3, 4)).unwrap();
        assert!(WalkMeasure::uniform(vec![escaping]).is_err());
    }

    #[test]
    fn sampling_frequencies() {
        let g = cantor_maps();
        let m = WalkMeasure::new(vec![(g[0].clone(), frac(1, 4)), (g[1].clone(), frac(3, 4))]).unwrap();
        let mut r = rng::stream(3, 0);
        let hits = (0..40_000).filter(|_| m.sample_index(&mut r) == 1).count();
        assert!((hits as f64 / 40_000.0 - 0.75).abs() < 0.01);
    }
}
