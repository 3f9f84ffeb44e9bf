use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_traits::{Signed, Zero};

use super::rational::{format_rational, Rational};
use super::SubresError;

/// A real vector space with a weight filtration, presented in adapted coordinates.
///
/// Weights are the positive numbers `λ₁ > λ₂ > … > λₙ`; the coordinate functions of
/// weight `λᵢ` come in a block of size `multiplicities[i]`. Coordinates are numbered
/// block by block, heaviest block first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FilteredSpace {
    weights: Vec<Rational>,
    multiplicities: Vec<usize>,
    coordinate_block: Vec<usize>,
}

impl FilteredSpace {
    pub fn new(blocks: Vec<(Rational, usize)>) -> Result<Self, SubresError> {
        if blocks.is_empty() {
            return Err(SubresError::MalformedSpace("no weights".into()));
        }
        for (i, (w, m)) in blocks.iter().enumerate() {
            if !w.is_positive() {
                return Err(SubresError::MalformedSpace(format!(
                    "weight {} is not positive",
                    format_rational(w)
                )));
            }
            if *m == 0 {
                return Err(SubresError::MalformedSpace(format!(
                    "weight {} has multiplicity 0",
                    format_rational(w)
                )));
            }
            if i > 0 && blocks[i - 1].0 <= *w {
                return Err(SubresError::MalformedSpace(
                    "weights must be strictly decreasing".into(),
                ));
            }
        }
        let coordinate_block = blocks
            .iter()
            .enumerate()
            .flat_map(|(b, (_, m))| std::iter::repeat_n(b, *m))
            .collect();
        let (weights, multiplicities) = blocks.into_iter().unzip();
        Ok(Self { weights, multiplicities, coordinate_block })
    }

    /// One coordinate per weight.
    pub fn simple(weights: Vec<Rational>) -> Result<Self, SubresError> {
        Self::new(weights.into_iter().map(|w| (w, 1)).collect())
    }

    pub fn dim(&self) -> usize {
        self.coordinate_block.len()
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn multiplicities(&self) -> &[usize] {
        &self.multiplicities
    }

    pub fn top_weight(&self) -> &Rational {
        &self.weights[0]
    }

    pub fn block_of(&self, coord: usize) -> usize {
        self.coordinate_block[coord]
    }

    pub fn coordinate_weight(&self, coord: usize) -> &Rational {
        &self.weights[self.coordinate_block[coord]]
    }

    /// Coordinates belonging to weight block `b`.
    pub fn block_coordinates(&self, b: usize) -> std::ops::Range<usize> {
        let start: usize = self.multiplicities[..b].iter().sum();
        start..start + self.multiplicities[b]
    }

    pub fn monomial_weight(&self, alpha: &MultiIndex) -> Result<Rational, SubresError> {
        let mut total = Rational::zero();
        for (&i, &e) in alpha.iter() {
            if i >= self.dim() {
                return Err(SubresError::InvalidCoordinate { index: i, dim: self.dim() });
            }
            total += self.coordinate_weight(i) * Rational::from_integer(e.into());
        }
        Ok(total)
    }

    /// Every monomial of weight at most `bound`, the constant included when
    /// `include_constant` is set. Unordered.
    pub fn monomials_up_to(&self, bound: &Rational, include_constant: bool) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        let mut exps = vec![0u32; self.dim()];
        self.enumerate(0, Rational::zero(), bound, &mut exps, &mut out);
        if !include_constant {
            out.retain(|m| !m.is_constant());
        }
        out
    }

    fn enumerate(
        &self,
        coord: usize,
        used: Rational,
        bound: &Rational,
        exps: &mut Vec<u32>,
        out: &mut Vec<MultiIndex>,
    ) {
        if coord == self.dim() {
            out.push(MultiIndex::from_dense(exps));
            return;
        }
        let w = self.coordinate_weight(coord).clone();
        let mut acc = used;
        let mut e = 0u32;
        while acc <= *bound {
            exps[coord] = e;
            self.enumerate(coord + 1, acc.clone(), bound, exps, out);
            acc += &w;
            e += 1;
        }
        exps[coord] = 0;
    }

    /// Coordinates ordered from lightest to heaviest (ties by index).
    pub fn light_to_heavy(&self) -> Vec<usize> {
        let mut c: Vec<usize> = (0..self.dim()).collect();
        c.sort_by(|&a, &b| {
            self.coordinate_weight(a)
                .cmp(self.coordinate_weight(b))
                .then(a.cmp(&b))
        });
        c
    }

    /// The linearization order: exponent vectors read from the lightest coordinate
    /// upward, compared lexicographically, larger first. For weights `(2,1)` this
    /// lists `y², y, x`.
    pub fn linearization_order(&self, a: &MultiIndex, b: &MultiIndex) -> Ordering {
        for c in self.light_to_heavy() {
            match b.exponent(c).cmp(&a.exponent(c)) {
                Ordering::Equal => continue,
                other => return other,
            }
        }
        Ordering::Equal
    }
}

/// Exponent vector of a monomial; zero exponents are never stored.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct MultiIndex(BTreeMap<usize, u32>);

impl MultiIndex {
    pub fn constant() -> Self {
        Self::default()
    }

    pub fn var(i: usize) -> Self {
        Self::from_pairs([(i, 1)])
    }

    pub fn from_pairs<I: IntoIterator<Item = (usize, u32)>>(pairs: I) -> Self {
        let mut m = BTreeMap::new();
        for (i, e) in pairs {
            if e > 0 {
                *m.entry(i).or_insert(0) += e;
            }
        }
        Self(m)
    }

    pub fn from_dense(exps: &[u32]) -> Self {
        Self::from_pairs(exps.iter().copied().enumerate())
    }

    pub fn exponent(&self, i: usize) -> u32 {
        self.0.get(&i).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&usize, &u32)> {
        self.0.iter()
    }

    pub fn degree(&self) -> u32 {
        self.0.values().sum()
    }

    pub fn is_constant(&self) -> bool {
        self.0.is_empty()
    }

    /// `Some(i)` when the monomial is the single coordinate `i`.
    pub fn as_linear(&self) -> Option<usize> {
        match self.0.iter().next() {
            Some((&i, &1)) if self.0.len() == 1 => Some(i),
            _ => None,
        }
    }

    pub fn max_coordinate(&self) -> Option<usize> {
        self.0.keys().next_back().copied()
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut m = self.0.clone();
        for (&i, &e) in &other.0 {
            *m.entry(i).or_insert(0) += e;
        }
        Self(m)
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(i, e)| if *e == 1 { format!("u{i}") } else { format!("u{i}^{e}") })
            .collect();
        f.write_str(&parts.join("*"))
    }
}
