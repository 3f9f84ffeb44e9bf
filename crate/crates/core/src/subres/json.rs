//! JSON form of polynomial self-maps:
//! `{"weights":[["2",1],["1",1]], "coeffs":[{"out":0,"mono":{"1":2},"c":"2"}]}`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::poly::PolynomialMap;
use super::rational::RationalStr;
use super::space::{FilteredSpace, MultiIndex};
use super::SubresError;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct MapDocument {
    pub weights: Vec<(RationalStr, usize)>,
    pub coeffs: Vec<CoeffEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CoeffEntry {
    pub out: usize,
    #[serde(default)]
    pub mono: BTreeMap<String, u32>,
    pub c: RationalStr,
}

impl MapDocument {
    pub fn space(&self) -> Result<FilteredSpace, SubresError> {
        FilteredSpace::new(self.weights.iter().map(|(w, m)| (w.0.clone(), *m)).collect())
    }

    pub fn to_map(&self) -> Result<PolynomialMap, SubresError> {
        let space = self.space()?;
        let mut terms = Vec::with_capacity(self.coeffs.len());
        for e in &self.coeffs {
            let mut pairs = Vec::with_capacity(e.mono.len());
            for (k, &v) in &e.mono {
                let i: usize = k.parse().map_err(|_| {
                    SubresError::MalformedSpace(format!("monomial key `{k}` is not a coordinate index"))
                })?;
                pairs.push((i, v));
            }
            terms.push((e.out, MultiIndex::from_pairs(pairs), e.c.0.clone()));
        }
        PolynomialMap::from_terms(space, terms)
    }

    pub fn from_map(map: &PolynomialMap) -> Self {
        let space = map.domain();
        let weights = space
            .weights()
            .iter()
            .zip(space.multiplicities())
            .map(|(w, m)| (RationalStr(w.clone()), *m))
            .collect();
        let coeffs = map
            .terms()
            .map(|(j, m, c)| CoeffEntry {
                out: j,
                mono: m.iter().map(|(i, e)| (i.to_string(), *e)).collect(),
                c: RationalStr(c.clone()),
            })
            .collect();
        Self { weights, coeffs }
    }
}

pub fn parse_map(text: &str) -> Result<PolynomialMap, SubresError> {
    let doc: MapDocument =
        serde_json::from_str(text).map_err(|e| SubresError::MalformedSpace(e.to_string()))?;
    doc.to_map()
}

pub fn map_to_json(map: &PolynomialMap) -> String {
    serde_json::to_string_pretty(&MapDocument::from_map(map)).expect("map document serializes")
}

#[cfg(test)]
mod tests {
    use super::super::group::validate;
    use super::*;

    const EXAMPLE: &str = r#"{"weights":[["2",1],["1",1]],
        "coeffs":[{"out":0,"mono":{"0":1},"c":"3"},{"out":0,"mono":{"1":1},"c":"1"},
                  {"out":0,"mono":{"1":2},"c":"2"},{"out":1,"mono":{"1":1},"c":2}]}"#;

    #[test]
    fn parses_example_document() {
        let m = parse_map(EXAMPLE).unwrap();
        let f = validate(m.clone(), false).unwrap();
        assert!(!f.is_strict());
        assert_eq!(parse_map(&map_to_json(&m)).unwrap(), m);
    }

    #[test]
    fn fractional_weights_and_errors() {
        let doc = r#"{"weights":[["5/2",1],["1",1]],"coeffs":[{"out":1,"mono":{"1":1},"c":"0.5"}]}"#;
        let m = parse_map(doc).unwrap();
        assert_eq!(m.domain().dim(), 2);
        assert!(parse_map(r#"{"weights":[["1",1]],"coeffs":[{"out":0,"mono":{"x":1},"c":"1"}]}"#).is_err());
        assert!(parse_map(r#"{"weights":[["1",1]],"coeffs":[],"extra":1}"#).is_err());
        assert!(parse_map("not json").is_err());
    }
}
