//! Executes a validated experiment in memory.

use std::fmt::Debug;
use std::path::Path;
use std::time::Instant;

use serde_json::json;

use super::config::*;
use super::CliError;
use crate::dynamics::{lyapunov_with, DynamicsError, LyapunovReport, SystemSpec, WordSource};
use crate::entropy::{self, EntropyError};
use crate::expansion::{
    self, ExpansionError, GapGrid, PlaneGrid, PlaneSpec, SigmaMode, DEFAULT_WORD_BUDGET,
};
use crate::subres::{self, rational::format_rational, SubresError};
use crate::walk::{self, EmpiricalMeasure, Metric, WalkError, WalkMeasure};
use crate::parallel;

/// Default Monte Carlo sample count per plane.
pub const DEFAULT_MC_SAMPLES: usize = 10_000;

/// What an experiment produces before anything touches the disk.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    /// CSV (or JSON for map results) written to the output path.
    pub payload: Vec<u8>,
    /// Headline numbers, copied into the metadata sidecar.
    pub summary: serde_json::Value,
    /// One-line human summary.
    pub message: String,
}

fn variant<E: Debug>(e: &E) -> String {
    format!("{e:?}").chars().take_while(|c| c.is_alphanumeric() || *c == '_').collect()
}

impl From<SubresError> for CliError {
    fn from(e: SubresError) -> Self {
        match e {
            SubresError::MalformedSpace(_) | SubresError::InvalidCoordinate { .. } | SubresError::DimensionMismatch { .. } => {
                CliError::Schema(e.to_string())
            }
            _ => CliError::Numeric { name: format!("SubresError::{}", variant(&e)), message: e.to_string() },
        }
    }
}

impl From<DynamicsError> for CliError {
    fn from(e: DynamicsError) -> Self {
        match e {
            DynamicsError::NonInvertibleJacobian { .. } | DynamicsError::GapTooSmall { .. } => {
                CliError::Numeric { name: format!("DynamicsError::{}", variant(&e)), message: e.to_string() }
            }
            _ => CliError::Schema(e.to_string()),
        }
    }
}

impl From<WalkError> for CliError {
    fn from(e: WalkError) -> Self {
        match e {
            WalkError::BudgetExceeded { .. } => CliError::Budget(e.to_string()),
            WalkError::Dynamics(d) => d.into(),
            WalkError::DegenerateFit(_) => {
                CliError::Numeric { name: format!("WalkError::{}", variant(&e)), message: e.to_string() }
            }
            _ => CliError::Schema(e.to_string()),
        }
    }
}

impl From<ExpansionError> for CliError {
    fn from(e: ExpansionError) -> Self {
        match e {
            ExpansionError::BudgetExceeded { .. } => CliError::Budget(e.to_string()),
            ExpansionError::Dynamics(d) => d.into(),
            _ => CliError::Schema(e.to_string()),
        }
    }
}

impl From<EntropyError> for CliError {
    fn from(e: EntropyError) -> Self {
        CliError::Schema(e.to_string())
    }
}

fn check_samples(budgets: &Budgets, needed: u128) -> Result<(), CliError> {
    match budgets.samples {
        Some(cap) if needed > cap as u128 => {
            Err(CliError::Budget(format!("needs {needed} samples, budget is {cap}")))
        }
        _ => Ok(()),
    }
}

fn require_seed(config: &ExperimentConfig) -> Result<u64, CliError> {
    config.seed.ok_or_else(|| CliError::Schema(format!("a seed is required for stochastic {} experiments", config.experiment.kind())))
}

fn measure(j: &walk::WalkJson) -> Result<WalkMeasure, CliError> {
    Ok(WalkMeasure::try_from(j.clone())?)
}

/// Runs `config` and returns its outputs. Reading a measure CSV is the only I/O.
pub fn execute(config: &ExperimentConfig) -> Result<Artifact, CliError> {
    let start = Instant::now();
    if config.experiment.is_stochastic() {
        require_seed(config)?;
    }
    let artifact = match &config.experiment {
        Experiment::Subres(p) => subres_op(p)?,
        Experiment::Lyapunov(p) => lyapunov(p, config)?,
        Experiment::Expansion(p) => expansion_op(p, config)?,
        Experiment::Walk(p) => walk_op(p, config)?,
        Experiment::Entropy(p) => entropy_op(p)?,
    };
    if let Some(cap) = config.budgets.time_s {
        let used = start.elapsed().as_secs_f64();
        if used > cap {
            return Err(CliError::Budget(format!("took {used:.3} s, time budget is {cap} s")));
        }
    }
    Ok(artifact)
}

fn subres_op(p: &SubresPayload) -> Result<Artifact, CliError> {
    let op = p.op.ok_or_else(|| CliError::Schema("field `payload.op` is required".into()))?;
    let f = subres::validate(p.map.to_map()?, p.strict)?;
    match op {
        SubresOp::Check => Ok(Artifact {
            payload: format!("validated,strict,dim\ntrue,{},{}\n", f.is_strict(), f.space().dim()).into_bytes(),
            summary: json!({ "validated": true, "strict": f.is_strict() }),
            message: format!("validated, strict={}", f.is_strict()),
        }),
        SubresOp::Compose => {
            let other = p.other.as_ref().ok_or_else(|| CliError::Schema("compose needs `other`".into()))?;
            let g = subres::validate(other.to_map()?, p.strict)?;
            let h = subres::compose(&f, &g)?;
            Ok(map_artifact(&h, "composed"))
        }
        SubresOp::Invert => Ok(map_artifact(&subres::invert(&f)?, "inverted")),
        SubresOp::Linearize => {
            let l = subres::linearize(&f, p.affine)?;
            let csv = linearization_csv(&l);
            Ok(Artifact {
                payload: csv.into_bytes(),
                summary: json!({ "size": l.dim(), "affine": l.affine }),
                message: format!("linearized: {}x{} matrix", l.dim(), l.dim()),
            })
        }
    }
}

/// CSV of a linearization: header `row,<basis...>`, then one row per monomial.
pub fn linearization_csv(l: &subres::LinearizationMatrix) -> String {
    let mut csv = String::from("row");
    for m in &l.basis {
        csv += &format!(",{m}");
    }
    csv.push('\n');
    for (m, row) in l.basis.iter().zip(&l.entries) {
        csv += &m.to_string();
        for x in row {
            csv += &format!(",{}", format_rational(x));
        }
        csv.push('\n');
    }
    csv
}

fn map_artifact(f: &subres::SubresonantMap, what: &str) -> Artifact {
    let mut text = subres::map_to_json(f.map());
    text.push('\n');
    Artifact {
        payload: text.into_bytes(),
        summary: json!({ "strict": f.is_strict(), "terms": f.map().terms().count() }),
        message: format!("{what}, strict={}", f.is_strict()),
    }
}

fn lyapunov(p: &LyapunovPayload, config: &ExperimentConfig) -> Result<Artifact, CliError> {
    let (fixed, walk): (Option<SystemSpec>, Option<WalkMeasure>) = match (&p.system, &p.walk) {
        (Some(s), None) => (Some(s.clone()), None),
        (None, Some(w)) => (None, Some(measure(w)?)),
        _ => return Err(CliError::Schema("give exactly one of `system` and `walk`".into())),
    };
    let source = match (&fixed, &walk) {
        (Some(s), _) => WordSource::Fixed(s),
        (_, Some(m)) => WordSource::Walk(m),
        _ => unreachable!(),
    };
    let seeds: Vec<u64> = match (&p.seeds, p.trajectories) {
        (Some(s), None) => s.clone(),
        (None, t) => {
            let base = config.seed.unwrap_or(0);
            (0..t.unwrap_or(1) as u64).map(|i| base.wrapping_add(i)).collect()
        }
        (Some(_), Some(_)) => return Err(CliError::Schema("give at most one of `seeds` and `trajectories`".into())),
    };
    if seeds.is_empty() {
        return Err(CliError::Schema("no trajectories requested".into()));
    }
    check_samples(&config.budgets, (p.n + p.transient) as u128 * seeds.len() as u128)?;
    let reports: Vec<LyapunovReport> = parallel::map_ordered(&seeds, |&s| lyapunov_with(p.method, source, &p.q0, p.transient, p.n, s))
        .into_iter()
        .collect::<Result<_, _>>()?;
    let mut csv = LyapunovReport::csv_header(source.dim());
    csv.push('\n');
    for r in &reports {
        csv += &r.csv_row();
        csv.push('\n');
    }
    let top = reports[0].exponents[0];
    Ok(Artifact {
        payload: csv.into_bytes(),
        summary: json!({
            "trajectories": reports.len(),
            "lambda1_first": top,
            "max_residual": reports.iter().map(|r| r.residual).fold(0.0, f64::max),
        }),
        message: format!("lambda1 = {top:.6} ({} trajectories)", reports.len()),
    })
}

fn plane(j: &PlaneJson) -> Result<PlaneSpec, CliError> {
    Ok(PlaneSpec::new(j.base.clone(), &j.vectors)?)
}

fn expansion_op(p: &ExpansionPayload, config: &ExperimentConfig) -> Result<Artifact, CliError> {
    let op = p.op.ok_or_else(|| CliError::Schema("field `payload.op` is required".into()))?;
    let mu = measure(&p.walk)?;
    let dim = mu.dim();
    let seed = config.seed.unwrap_or(0);
    let mode = match p.mode {
        SigmaModeJson::Exact => SigmaMode::Exact { budget: config.budgets.words.unwrap_or(DEFAULT_WORD_BUDGET) },
        SigmaModeJson::Mc => SigmaMode::mc(p.samples.unwrap_or(DEFAULT_MC_SAMPLES), seed),
    };
    let base_of = |b: &Option<Vec<f64>>| b.clone().unwrap_or_else(|| vec![0.0; dim]);
    let grid_size = match &p.grid {
        GridJson::Angular { count, .. } | GridJson::Random { count, .. } => *count,
        GridJson::Explicit { planes, pairs } => planes.len().max(pairs.len()),
    };
    if let SigmaModeJson::Mc = p.mode {
        check_samples(&config.budgets, p.samples.unwrap_or(DEFAULT_MC_SAMPLES) as u128 * grid_size as u128)?;
    }
    let report = match op {
        ExpansionOp::Scan => {
            let grid = match &p.grid {
                GridJson::Angular { count, base } => PlaneGrid::Angular { base: base_of(base), count: *count },
                GridJson::Random { count, base, random_bases } => {
                    PlaneGrid::Random { base: base_of(base), d: p.d, count: *count, seed, random_bases: *random_bases }
                }
                GridJson::Explicit { planes, .. } => PlaneGrid::Explicit(planes.iter().map(plane).collect::<Result<_, _>>()?),
            };
            expansion::uniform_expansion_scan(&mu, p.n, p.d, &grid, mode, p.margin)?
        }
        ExpansionOp::Gaps => {
            let delta = p.delta.ok_or_else(|| CliError::Schema("gap scans need `delta` (+1 or -1)".into()))?;
            let grid = match &p.grid {
                GridJson::Angular { count, base } => GapGrid::Angular { base: base_of(base), count: *count },
                GridJson::Random { count, base, random_bases } => {
                    GapGrid::Random { base: base_of(base), d: p.d, count: *count, seed, random_bases: *random_bases }
                }
                GridJson::Explicit { pairs, .. } => GapGrid::Explicit(
                    pairs.iter().map(|q| Ok((plane(&q.p0)?, plane(&q.p1)?))).collect::<Result<_, CliError>>()?,
                ),
            };
            expansion::uniform_gaps_scan(&mu, p.n, p.d, delta, &grid, mode, p.margin)?
        }
    };
    let mut summary = serde_json::to_value(&report).expect("report serializes");
    summary.as_object_mut().expect("object").remove("rows");
    Ok(Artifact {
        payload: report.csv().into_bytes(),
        summary,
        message: format!(
            "min sigma = {:.12} at plane {}, certificate = {}{}",
            report.min_sigma,
            report.argmin,
            report.certificate,
            if report.rigorous { " (rigorous)" } else { "" }
        ),
    })
}

fn walk_measure(p: &WalkPayload, mu: &WalkMeasure, config: &ExperimentConfig) -> Result<EmpiricalMeasure, CliError> {
    if let Some(path) = &p.measure {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        return Ok(EmpiricalMeasure::read_csv(mu.space(), &text)?);
    }
    let q = p.q.as_ref().ok_or_else(|| CliError::Schema("simulation needs `q`".into()))?;
    let n = p.horizon.ok_or_else(|| CliError::Schema("simulation needs `N`".into()))?;
    let m = p.paths.ok_or_else(|| CliError::Schema("simulation needs `M`".into()))?;
    check_samples(&config.budgets, n as u128 * m as u128)?;
    Ok(walk::empirical_measure(mu, q, n, m, require_seed(config)?, p.burn_in)?)
}

fn walk_op(p: &WalkPayload, config: &ExperimentConfig) -> Result<Artifact, CliError> {
    let op = p.op.ok_or_else(|| CliError::Schema("field `payload.op` is required".into()))?;
    let mu = measure(&p.walk)?;
    if op == WalkOp::Simulate && p.measure.is_some() {
        return Err(CliError::Schema("simulate does not take `measure`".into()));
    }
    let nu = walk_measure(p, &mu, config)?;
    match op {
        WalkOp::Simulate => {
            let mut buf = Vec::new();
            nu.write_csv(&mut buf).map_err(|e| CliError::Io(e.to_string()))?;
            Ok(Artifact {
                payload: buf,
                summary: json!({ "points": nu.len() }),
                message: format!("{} weighted points", nu.len()),
            })
        }
        WalkOp::Residuals => {
            let metric = match (p.metric, p.cutoff) {
                (None, None) => Metric::default_for(mu.space()),
                (Some(MetricJson::Ks), None) => Metric::Ks,
                (Some(MetricJson::Ks), Some(_)) => return Err(CliError::Schema("`cutoff` applies to weyl-fourier only".into())),
                (_, c) => Metric::WeylFourier { cutoff: c.unwrap_or(walk::DEFAULT_FOURIER_CUTOFF) },
            };
            let r = walk::residual_report(&mu, &nu, metric, config.seed)?;
            Ok(Artifact {
                payload: r.csv().into_bytes(),
                summary: serde_json::to_value(&r).expect("report serializes"),
                message: format!("stationarity residual {:.3e}, invariance {:?}", r.stationarity, r.invariance),
            })
        }
        WalkOp::Dimension => {
            let scales = p.scales.clone().unwrap_or_else(|| (2..=10).map(|k| 0.5f64.powi(k)).collect());
            let dim = walk::box_dimension(&nu, &scales)?;
            Ok(Artifact {
                payload: format!("quantity,value\nbox_dimension,{dim:.15e}\n").into_bytes(),
                summary: json!({ "box_dimension": dim, "scales": scales.len() }),
                message: format!("box dimension {dim:.6}"),
            })
        }
    }
}

fn entropy_op(p: &EntropyPayload) -> Result<Artifact, CliError> {
    let op = p.op.ok_or_else(|| CliError::Schema("field `payload.op` is required".into()))?;
    match op {
        EntropyOp::Bounds => {
            let pesin = entropy::pesin_sum(&p.spectrum)?;
            let mut csv = format!("quantity,value\npesin_sum,{pesin:.15e}\n");
            let mut summary = json!({ "pesin_sum": pesin });
            if p.spectrum.e1_dims.is_some() {
                let (lo, hi) = entropy::ly_bounds(&p.spectrum)?;
                csv += &format!("ly_lower,{lo:.15e}\nly_upper,{hi:.15e}\n");
                summary["ly_lower"] = lo.into();
                summary["ly_upper"] = hi.into();
            }
            Ok(Artifact { payload: csv.into_bytes(), message: format!("pesin sum {pesin:.6}"), summary })
        }
        EntropyOp::Stiffness => {
            let h_mu = match (p.h_mu, &p.walk) {
                (Some(h), None) => h,
                (None, Some(w)) => entropy::shannon_entropy(&measure(w)?),
                _ => return Err(CliError::Schema("give exactly one of `h_mu` and `walk`".into())),
            };
            let v = entropy::stiffness_chain(h_mu, &p.spectrum, p.fibre_entropy)?;
            let mut csv = String::from("statement,lhs,rhs,slack,holds\n");
            for l in &v.links {
                csv += &format!("{},{:.15e},{:.15e},{:.15e},{}\n", l.statement, l.lhs, l.rhs, l.slack, l.holds);
            }
            Ok(Artifact {
                payload: csv.into_bytes(),
                summary: serde_json::to_value(&v).expect("verdict serializes"),
                message: format!(
                    "signed sum {:.6e}: {}",
                    v.signed_sum,
                    if v.consistent { "stiffness-consistent" } else { "inconsistent" }
                ),
            })
        }
    }
}

/// Writes `bytes` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(io)?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(format!(".tmp{}", std::process::id()));
    std::fs::write(&tmp, bytes).map_err(io)?;
    std::fs::rename(&tmp, path).map_err(io)
}
