//! Command-line front end: one experiment per invocation, CSV out, JSON sidecar.

pub mod config;
pub mod fixtures;
pub mod run;

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

pub use config::{parse_json, ExperimentConfig};
pub use run::{execute, write_atomic, Artifact};

use crate::parallel;

/// Failure of a CLI run. Each class has its own exit status.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CliError {
    #[error("schema error: {0}")]
    Schema(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("{name}: {message}")]
    Numeric { name: String, message: String },
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Schema(_) => 2,
            CliError::Budget(_) => 3,
            CliError::Numeric { .. } | CliError::Io(_) => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "rigidlab", version, about = "Experiments on subresonant maps and random walks on tori and intervals")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

impl Cli {
    /// Whether the payload goes to a file rather than stdout.
    fn writes_files(&self) -> bool {
        match &self.command {
            Command::Fixtures { write } => write.is_some(),
            Command::Run { .. } => true,
            Command::Subres { common, .. }
            | Command::Lyapunov { common }
            | Command::Expansion { common, .. }
            | Command::Walk { common, .. }
            | Command::Entropy { common, .. } => common.out.is_some(),
        }
    }
}

#[derive(Debug, Clone, Args, Default)]
struct Common {
    /// Experiment config, or a bare payload for this subcommand.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output CSV path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    budget_words: Option<u64>,
    #[arg(long)]
    budget_samples: Option<u64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    Mc,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Validate and manipulate subresonant maps.
    Subres {
        #[arg(value_enum)]
        op: SubresOpArg,
        /// Map document (instead of a config).
        #[arg(long)]
        map: Option<PathBuf>,
        /// Right factor for compose.
        #[arg(long)]
        other: Option<PathBuf>,
        #[arg(long)]
        strict: bool,
        #[arg(long)]
        affine: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Finite-time Lyapunov spectra.
    Lyapunov {
        #[command(flatten)]
        common: Common,
    },
    /// Uniform expansion and gap scans.
    Expansion {
        #[arg(value_enum)]
        op: ExpansionOpArg,
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        #[arg(long)]
        samples: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Empirical stationary measures of random walks.
    Walk {
        #[arg(value_enum)]
        op: WalkOpArg,
        #[arg(long = "N")]
        horizon: Option<usize>,
        #[arg(long = "M")]
        paths: Option<usize>,
        /// Measure CSV from an earlier `walk simulate`.
        #[arg(long)]
        measure: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Entropy and exponent calculators.
    Entropy {
        #[arg(value_enum)]
        op: EntropyOpArg,
        /// Spectrum summary JSON (instead of a config).
        #[arg(long)]
        spectrum: Option<PathBuf>,
        #[arg(long)]
        h_mu: Option<f64>,
        #[arg(long)]
        fibre_entropy: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// List the built-in fixtures, or write them as config files.
    Fixtures {
        #[arg(long)]
        write: Option<PathBuf>,
    },
    /// Run a full experiment config.
    Run {
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        budget_words: Option<u64>,
        #[arg(long)]
        budget_samples: Option<u64>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SubresOpArg {
    Check,
    Compose,
    Invert,
    Linearize,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ExpansionOpArg {
    Scan,
    Gaps,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum WalkOpArg {
    Simulate,
    Residuals,
    Dimension,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum EntropyOpArg {
    Bounds,
    Stiffness,
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Reads a full config from `path`.
pub fn load_config(path: &Path) -> Result<ExperimentConfig, CliError> {
    parse_json(&read(path)?, &path.display().to_string())
}

/// Reads `path` as a full config of `kind` or as a bare payload of that kind.
fn load_partial(path: &Path, kind: &str) -> Result<(Value, Option<ExperimentConfig>), CliError> {
    let text = read(path)?;
    let origin = path.display().to_string();
    let value: Value = parse_json(&text, &origin)?;
    if value.get("kind").is_some_and(|k| k.is_string()) && value.get("payload").is_some() {
        let config: ExperimentConfig = parse_json(&text, &origin)?;
        if config.experiment.kind() != kind {
            return Err(CliError::Schema(format!(
                "{origin}: config is for `{}`, not `{kind}`",
                config.experiment.kind()
            )));
        }
        let payload = serde_json::to_value(&config.experiment).expect("serializes")["payload"].take();
        return Ok((payload, Some(config)));
    }
    Ok((value, None))
}

fn set(payload: &mut Value, key: &str, v: impl serde::Serialize) {
    payload[key] = serde_json::to_value(v).expect("serializes");
}

fn op_name<T: ValueEnum>(op: T) -> String {
    op.to_possible_value().expect("named").get_name().to_string()
}

/// Builds the config for a subcommand invocation.
fn assemble(command: Command) -> Result<ExperimentConfig, CliError> {
    let (kind, mut payload, base, common) = match command {
        Command::Subres { op, map, other, strict, affine, common } => {
            let (mut p, base) = match (&common.config, &map) {
                (Some(c), None) => load_partial(c, "subres")?,
                (None, Some(m)) => (json!({ "map": parse_json::<Value>(&read(m)?, &m.display().to_string())? }), None),
                _ => return Err(CliError::Schema("give exactly one of --config and --map".into())),
            };
            if p.get("map").is_none() && p.get("weights").is_some() {
                p = json!({ "map": p });
            }
            if let Some(o) = other {
                set(&mut p, "other", parse_json::<Value>(&read(&o)?, &o.display().to_string())?);
            }
            if strict {
                set(&mut p, "strict", true);
            }
            if affine {
                set(&mut p, "affine", true);
            }
            set(&mut p, "op", op_name(op));
            ("subres", p, base, common)
        }
        Command::Lyapunov { common } => {
            let (p, base) = load_partial(need_config(&common)?, "lyapunov")?;
            ("lyapunov", p, base, common)
        }
        Command::Expansion { op, mode, samples, common } => {
            let (mut p, base) = load_partial(need_config(&common)?, "expansion")?;
            set(&mut p, "op", op_name(op));
            if let Some(m) = mode {
                set(&mut p, "mode", op_name(m));
            }
            if let Some(s) = samples {
                set(&mut p, "samples", s);
            }
            ("expansion", p, base, common)
        }
        Command::Walk { op, horizon, paths, measure, common } => {
            let (mut p, base) = load_partial(need_config(&common)?, "walk")?;
            set(&mut p, "op", op_name(op));
            if let Some(n) = horizon {
                set(&mut p, "N", n);
            }
            if let Some(m) = paths {
                set(&mut p, "M", m);
            }
            if let Some(m) = measure {
                set(&mut p, "measure", m);
            }
            ("walk", p, base, common)
        }
        Command::Entropy { op, spectrum, h_mu, fibre_entropy, common } => {
            let (mut p, base) = match (&common.config, &spectrum) {
                (Some(c), None) => load_partial(c, "entropy")?,
                (None, Some(s)) => {
                    (json!({ "spectrum": parse_json::<Value>(&read(s)?, &s.display().to_string())? }), None)
                }
                _ => return Err(CliError::Schema("give exactly one of --config and --spectrum".into())),
            };
            if let Some(h) = h_mu {
                set(&mut p, "h_mu", h);
            }
            if let Some(h) = fibre_entropy {
                set(&mut p, "fibre_entropy", h);
            }
            set(&mut p, "op", op_name(op));
            ("entropy", p, base, common)
        }
        Command::Fixtures { .. } | Command::Run { .. } => unreachable!("handled by the caller"),
    };
    let mut raw = match base {
        Some(c) => serde_json::to_value(&c).expect("serializes"),
        None => json!({ "kind": kind }),
    };
    raw["payload"] = payload.take();
    if let Some(s) = common.seed {
        raw["seed"] = s.into();
    }
    if let Some(o) = &common.out {
        raw["out"] = json!(o);
    }
    let mut config: ExperimentConfig = serde_json::from_value(raw).map_err(|e| CliError::Schema(e.to_string()))?;
    config.budgets.words = common.budget_words.or(config.budgets.words);
    config.budgets.samples = common.budget_samples.or(config.budgets.samples);
    Ok(config)
}

fn need_config(common: &Common) -> Result<&Path, CliError> {
    common.config.as_deref().ok_or_else(|| CliError::Schema("--config is required".into()))
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Sidecar path for an output: `report.csv` → `report.csv.meta.json`.
pub fn meta_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}

/// Runs `config` and writes its payload and sidecar. Returns the one-line summary.
pub fn run_config(config: &ExperimentConfig, stdout: &mut dyn std::io::Write) -> Result<String, CliError> {
    let start = Instant::now();
    let artifact = execute(config)?;
    let wall = start.elapsed().as_secs_f64();
    match &config.out {
        None => stdout.write_all(&artifact.payload).map_err(|e| CliError::Io(e.to_string()))?,
        Some(out) => {
            let canonical = serde_json::to_vec(config).expect("config serializes");
            let meta = json!({
                "tool": "rigidlab",
                "version": env!("CARGO_PKG_VERSION"),
                "kind": config.experiment.kind(),
                "config_sha256": sha256_hex(&canonical),
                "payload_sha256": sha256_hex(&artifact.payload),
                "seed": config.seed,
                "wall_time_s": wall,
                "summary": artifact.summary,
            });
            let mut meta_text = serde_json::to_string_pretty(&meta).expect("meta serializes");
            meta_text.push('\n');
            write_atomic(out, &artifact.payload)?;
            write_atomic(&meta_path(out), meta_text.as_bytes())?;
        }
    }
    Ok(artifact.message)
}

fn dispatch(cli: Cli, stdout: &mut dyn std::io::Write) -> Result<String, CliError> {
    let io = |e: std::io::Error| CliError::Io(e.to_string());
    match cli.command {
        Command::Fixtures { write } => {
            let catalog = fixtures::catalog();
            match write {
                Some(dir) => {
                    for f in &catalog {
                        let mut text = serde_json::to_string_pretty(&f.config).expect("fixture serializes");
                        text.push('\n');
                        write_atomic(&dir.join(format!("{}.json", f.name)), text.as_bytes())?;
                    }
                    Ok(format!("wrote {} fixtures to {}", catalog.len(), dir.display()))
                }
                None => {
                    for f in &catalog {
                        writeln!(stdout, "{}: {}\n  target: {}", f.name, f.description, f.target).map_err(io)?;
                        writeln!(stdout, "  {}", serde_json::to_string(&f.config).expect("fixture serializes")).map_err(io)?;
                    }
                    Ok(format!("{} fixtures", catalog.len()))
                }
            }
        }
        Command::Run { config, seed, out, budget_words, budget_samples } => {
            let mut c = load_config(&config)?;
            c.seed = seed.or(c.seed);
            c.out = out.or(c.out);
            c.budgets.words = budget_words.or(c.budgets.words);
            c.budgets.samples = budget_samples.or(c.budgets.samples);
            run_config(&c, stdout)
        }
        command => run_config(&assemble(command)?, stdout),
    }
}

/// Parses `args`, runs, and returns the process exit status.
pub fn main_entry<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let to_file = cli.writes_files();
    match parallel::with_threads(parallel::threads_from_env(), || dispatch(cli, &mut std::io::stdout().lock())) {
        Ok(message) if to_file => {
            println!("{message}");
            0
        }
        Ok(message) => {
            eprintln!("{message}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
