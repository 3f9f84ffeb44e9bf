//! Experiment configuration files.

use std::path::PathBuf;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::CliError;
use crate::dynamics::{LyapunovMethod, SystemSpec};
use crate::entropy::SpectrumSummary;
use crate::subres::MapDocument;
use crate::walk::WalkJson;

/// A full experiment: `{"kind": ..., "seed": ..., "out": ..., "budgets": {...}, "payload": {...}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawConfig", into = "RawConfig")]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub budgets: Budgets,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    out: Option<PathBuf>,
    #[serde(default)]
    budgets: Budgets,
    payload: serde_json::Value,
}

impl TryFrom<RawConfig> for ExperimentConfig {
    type Error = String;
    fn try_from(raw: RawConfig) -> Result<Self, String> {
        let tagged = serde_json::json!({ "kind": raw.kind, "payload": raw.payload });
        let experiment: Experiment = serde_path_to_error::deserialize(tagged).map_err(|e| {
            let path = e.path().to_string();
            format!("field `{path}`: {}", e.into_inner())
        })?;
        Ok(Self { experiment, seed: raw.seed, out: raw.out, budgets: raw.budgets })
    }
}

impl From<ExperimentConfig> for RawConfig {
    fn from(c: ExperimentConfig) -> Self {
        let mut v = serde_json::to_value(&c.experiment).expect("experiment serializes");
        let payload = v["payload"].take();
        RawConfig { kind: c.experiment.kind().into(), seed: c.seed, out: c.out, budgets: c.budgets, payload }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "payload", rename_all = "lowercase")]
pub enum Experiment {
    Subres(SubresPayload),
    Lyapunov(LyapunovPayload),
    Expansion(ExpansionPayload),
    Walk(WalkPayload),
    Entropy(EntropyPayload),
}

impl Experiment {
    pub fn kind(&self) -> &'static str {
        match self {
            Experiment::Subres(_) => "subres",
            Experiment::Lyapunov(_) => "lyapunov",
            Experiment::Expansion(_) => "expansion",
            Experiment::Walk(_) => "walk",
            Experiment::Entropy(_) => "entropy",
        }
    }

    pub fn is_stochastic(&self) -> bool {
        match self {
            Experiment::Lyapunov(p) => p.walk.as_ref().is_some_and(|w| w.atoms.len() > 1),
            Experiment::Expansion(p) => p.mode == SigmaModeJson::Mc || matches!(p.grid, GridJson::Random { .. }),
            Experiment::Walk(p) => p.measure.is_none(),
            Experiment::Subres(_) | Experiment::Entropy(_) => false,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Budgets {
    /// Cap on `|supp μ|^N` for exact word enumeration.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub words: Option<u64>,
    /// Cap on the number of random samples (walk steps, Monte Carlo words, QR steps).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
    /// Wall-clock cap in seconds.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time_s: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SubresOp {
    Check,
    Compose,
    Invert,
    Linearize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubresPayload {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub op: Option<SubresOp>,
    pub map: MapDocument,
    /// Right-hand factor for `compose` (the result is `map ∘ other`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub other: Option<MapDocument>,
    /// Require strictly subresonant maps.
    #[serde(default)]
    pub strict: bool,
    /// Include the constant monomial in the linearization basis.
    #[serde(default)]
    pub affine: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LyapunovPayload {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub system: Option<SystemSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub walk: Option<WalkJson>,
    pub q0: Vec<f64>,
    pub n: usize,
    #[serde(default)]
    pub transient: usize,
    #[serde(default)]
    pub method: LyapunovMethod,
    /// Explicit seeds, one output row each. Otherwise `trajectories` seeds
    /// starting at the experiment seed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seeds: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trajectories: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExpansionOp {
    Scan,
    Gaps,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SigmaModeJson {
    #[default]
    Exact,
    Mc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlaneJson {
    pub base: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanePairJson {
    pub p0: PlaneJson,
    pub p1: PlaneJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum GridJson {
    Angular {
        count: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        base: Option<Vec<f64>>,
    },
    Random {
        count: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        base: Option<Vec<f64>>,
        #[serde(default)]
        random_bases: bool,
    },
    Explicit {
        #[serde(default)]
        planes: Vec<PlaneJson>,
        #[serde(default)]
        pairs: Vec<PlanePairJson>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpansionPayload {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub op: Option<ExpansionOp>,
    pub walk: WalkJson,
    pub n: usize,
    pub d: usize,
    #[serde(default)]
    pub mode: SigmaModeJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    pub grid: GridJson,
    /// Sign `δ_d` for gap scans.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<i8>,
    #[serde(default)]
    pub margin: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WalkOp {
    Simulate,
    Residuals,
    Dimension,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MetricJson {
    Ks,
    WeylFourier,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WalkPayload {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub op: Option<WalkOp>,
    pub walk: WalkJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<Vec<f64>>,
    #[serde(default, rename = "N", skip_serializing_if = "Option::is_none")]
    pub horizon: Option<usize>,
    #[serde(default, rename = "M", skip_serializing_if = "Option::is_none")]
    pub paths: Option<usize>,
    #[serde(default)]
    pub burn_in: usize,
    /// Read the measure from this CSV instead of simulating it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measure: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<MetricJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scales: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntropyOp {
    Bounds,
    Stiffness,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntropyPayload {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub op: Option<EntropyOp>,
    pub spectrum: SpectrumSummary,
    /// `H(μ)`, or give `walk` to compute it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h_mu: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub walk: Option<WalkJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fibre_entropy: Option<f64>,
}

/// Parses JSON, reporting the field path and line/column of the first error.
pub fn parse_json<T: DeserializeOwned>(text: &str, origin: &str) -> Result<T, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let mut path = e.path().to_string();
        let inner = e.into_inner();
        let mut msg = inner.to_string();
        if let Some(i) = msg.rfind(" at line ") {
            msg.truncate(i);
        }
        // errors from nested payload parsing carry their own path
        if let Some(rest) = msg.strip_prefix("field `") {
            if let Some((p, m)) = rest.split_once("`: ") {
                path = p.to_string();
                msg = m.to_string();
            }
        }
        let (line, column) = match inner.line() {
            0 => locate(text, &path),
            l => (l, inner.column()),
        };
        let at = if path.is_empty() || path == "." { String::new() } else { format!(" (field `{path}`)") };
        CliError::Schema(format!("{origin}:{line}:{column}{at}: {msg}"))
    })
}

/// Line and column of the last key named in `path`, or of the start of the text.
fn locate(text: &str, path: &str) -> (usize, usize) {
    let key = path.rsplit('.').find(|s| !s.is_empty() && s.parse::<usize>().is_err() && *s != "?");
    let Some(pos) = key.and_then(|k| text.find(&format!("\"{k}\""))) else {
        return (1, 1);
    };
    let line = text[..pos].matches('\n').count() + 1;
    let column = pos - text[..pos].rfind('\n').map_or(0, |i| i + 1) + 1;
    (line, column)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagnostics_name_line_and_field() {
        let text = "{\"kind\":\"walk\",\"seed\":1,\n \"payload\":{\"walk\":{\"atoms\":[]},\n  \"N\":\"ten\"}}";
        let err = parse_json::<ExperimentConfig>(text, "c.json").unwrap_err();
        let CliError::Schema(msg) = err else { panic!() };
        assert!(msg.starts_with("c.json:3:3 (field `payload.N`)"), "{msg}");
        let err = parse_json::<ExperimentConfig>("{\"kind\":\"walk\",", "c.json").unwrap_err();
        assert!(matches!(err, CliError::Schema(m) if m.starts_with("c.json:1:")));
        let err = parse_json::<ExperimentConfig>("{\"kind\":\"nope\",\"payload\":{}}", "c.json").unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn unknown_fields_rejected() {
        let text = r#"{"kind":"entropy","payload":{"spectrum":{"exponents":[],"multiplicities":[]}},"extra":1}"#;
        assert!(parse_json::<ExperimentConfig>(text, "c").is_err());
        let text = r#"{"kind":"entropy","payload":{"spectrum":{"exponents":[],"multiplicities":[]},"extra":1}}"#;
        assert!(parse_json::<ExperimentConfig>(text, "c").is_err());
    }
}
