//! Command-line front end. Every command reads an optional TOML config, applies
//! flag overrides on top (flags win) and writes deterministic outputs.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::analysis::{
    error_scaling_fit, thermodynamic_extrapolation, Abscissa, AnalysisError, Parity, RunPoint,
};
use crate::ansatz::{ansatz_for_lattice, AnsatzError};
use crate::circuit::{optimize_circuit, BASIS_CONVENTION};
use crate::exact::{ground_state_lanczos, ExactError, LanczosOptions};
use crate::format::G17;
use crate::lattice::{build_hamiltonian, neel_bitstring, product_state_energy, CouplingModel, LatticeError};
use crate::plot::{read_xy_csv, scatter_fit_svg, trace_svg, PlotError};
use crate::vqe::config::{AnsatzSection, LatticeSection};
use crate::vqe::{resume_vqe, run_vqe, Checkpoint, EnergyTrace, VqeConfig, VqeError, VqeRun};

/// Default output directory when neither a flag nor the config names one.
pub const OUT_DIR_ENV: &str = "SPINVQE_OUT_DIR";

/// Conventions fixed by this implementation where the model leaves a choice.
pub const DECISIONS: &[(&str, &str)] = &[
    ("site_indexing", "2D lattices numbered row-major"),
    ("qubit_order", "site i is qubit i (bit i of the basis index); bitstring character i is site i"),
    ("hamiltonian_units", "Pauli matrices, no factor 1/4"),
    ("neel_polarity", "the sublattice containing site 0 holds bit 1"),
    ("non_bipartite_initial_state", "first ceil(N/2) sites hold bit 1"),
    ("triangular_geometry", "square lattice plus one lower-left to upper-right diagonal per cell"),
    ("random_couplings", "chacha20, one draw per (bond, axis), J = 1 - u with u uniform on [0,1)"),
    ("basis_change", BASIS_CONVENTION),
    ("cnot_ladder", "parity accumulated onto the highest site of the term"),
    ("xy_ordering", "l from N-1 down to 1, k from N down to l+1; sigma_N^z appended unless N is in the pair"),
    ("two_body_ordering", "xy pair order; axis pairs xx, xy, xz, yx, yy, yz, zx, zy, zz"),
    ("hva_open_chain", "open chains use N-1 bonds per layer"),
    ("hva_two_site_ring", "a periodic layer at N = 2 applies the single pair twice"),
    ("quasi_newton", "BFGS on forward differences, Armijo backtracking, step cap max_step"),
    ("gradient_free", "Nelder-Mead with dimension-adaptive coefficients"),
    ("finite_difference_step", "h * max(1, |x_i|)"),
    ("sampled_estimator_rng", "chacha20 seeded by estimator.seed, stream = evaluation index"),
    ("lanczos", "full reorthogonalization, thick restart, residual-certified"),
    ("extrapolation_parity_default", "all"),
];

#[derive(Debug, Parser)]
#[command(name = "spinvqe", version, about = "Variational ground states of Heisenberg spin lattices")]
pub struct Cli {
    /// Print the decision ledger as JSON and exit.
    #[arg(long)]
    pub manifest: bool,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Lattice and Hamiltonian as JSON.
    Lattice(LatticeCmd),
    /// Ansatz circuit text plus gate statistics.
    Compile(CompileCmd),
    /// Run the variational optimization.
    Vqe(VqeCmd),
    /// Continue a run from its checkpoint.
    Resume(ResumeCmd),
    /// Lanczos ground-state energy.
    Exact(ExactCmd),
    /// Fit run summaries against system size.
    Extrapolate(ExtrapolateCmd),
    /// Render a trace or a fit as SVG.
    Plot(PlotCmd),
}

#[derive(Debug, Args, Default)]
pub struct LatticeFlags {
    /// TOML config; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub kind: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub rows: Option<usize>,
    #[arg(long)]
    pub cols: Option<usize>,
    #[arg(long)]
    pub boundary: Option<String>,
    /// isotropic or random
    #[arg(long)]
    pub coupling: Option<String>,
    /// Seed for random couplings.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct LatticeCmd {
    #[command(flatten)]
    pub lattice: LatticeFlags,
    /// Append the initial bitstring and its product-state energy.
    #[arg(long)]
    pub neel: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Default)]
pub struct AnsatzFlags {
    /// xy, two_body or hamiltonian_variational
    #[arg(long)]
    pub ansatz: Option<String>,
    #[arg(long)]
    pub layers: Option<usize>,
}

#[derive(Debug, Args)]
pub struct CompileCmd {
    #[command(flatten)]
    pub lattice: LatticeFlags,
    #[command(flatten)]
    pub ansatz: AnsatzFlags,
    /// Skip the optimization pass.
    #[arg(long)]
    pub no_opt: bool,
    /// Directory for circuit.txt and stats.json; stdout when absent.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VqeCmd {
    #[command(flatten)]
    pub lattice: LatticeFlags,
    #[command(flatten)]
    pub ansatz: AnsatzFlags,
    /// "neel" or an explicit bitstring.
    #[arg(long)]
    pub state: Option<String>,
    /// zeros or random
    #[arg(long)]
    pub init: Option<String>,
    #[arg(long)]
    pub init_seed: Option<u64>,
    /// quasi_newton or gradient_free
    #[arg(long)]
    pub method: Option<String>,
    #[arg(long)]
    pub max_evals: Option<usize>,
    #[arg(long)]
    pub wall_seconds: Option<f64>,
    /// exact or sampled
    #[arg(long)]
    pub estimator: Option<String>,
    #[arg(long)]
    pub shots: Option<usize>,
    #[arg(long)]
    pub estimator_seed: Option<u64>,
    #[arg(long)]
    pub exact_baseline: bool,
    /// Record wall time in the trace.
    #[arg(long)]
    pub timing: bool,
    /// Workers for gradient batches.
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ResumeCmd {
    /// The configuration of the original run.
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub checkpoint: PathBuf,
    /// Trace of the previous leg; its rows up to the checkpoint are kept.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Evaluations to spend beyond the checkpoint.
    #[arg(long)]
    pub extra_evals: usize,
    #[arg(long)]
    pub exact_baseline: bool,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExactCmd {
    #[command(flatten)]
    pub lattice: LatticeFlags,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExtrapolateCmd {
    /// Glob patterns matching summary JSON files.
    #[arg(required = true)]
    pub inputs: Vec<String>,
    /// thermo or error
    #[arg(long, default_value = "thermo")]
    pub mode: String,
    #[arg(long, default_value = "all")]
    pub parity: String,
    /// Abscissa for error fits: n, logn or invn.
    #[arg(long, default_value = "n")]
    pub abscissa: String,
    /// Size at which error fits report a prediction.
    #[arg(long, default_value_t = 100)]
    pub predict: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PlotCmd {
    /// trace or scatter-fit
    #[arg(long)]
    pub kind: String,
    /// Trace CSV, an x,y CSV, or an extrapolation report.
    #[arg(long)]
    pub input: PathBuf,
    /// Reference energy drawn as a horizontal line.
    #[arg(long, allow_hyphen_values = true)]
    pub e0: Option<f64>,
    /// Plot log10(best - e0) instead of the energy.
    #[arg(long)]
    pub log: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Unsupported(String),
    #[error("{0}")]
    Aborted(String),
    #[error("{0}")]
    InsufficientData(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Unsupported(_) => 3,
            CliError::Aborted(_) => 4,
            CliError::InsufficientData(_) => 5,
        }
    }
}

impl From<VqeError> for CliError {
    fn from(e: VqeError) -> Self {
        match e {
            VqeError::Ansatz(a) => a.into(),
            VqeError::Optimizer(_) => CliError::Aborted(e.to_string()),
            VqeError::Exact(x) => x.into(),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<AnsatzError> for CliError {
    fn from(e: AnsatzError) -> Self {
        match e {
            AnsatzError::UnsupportedLattice(_) => CliError::Unsupported(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<ExactError> for CliError {
    fn from(e: ExactError) -> Self {
        match e {
            ExactError::NotConverged { .. } => CliError::Aborted(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<LatticeError> for CliError {
    fn from(e: LatticeError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::TooFewPoints { .. } | AnalysisError::MissingBaseline(_) | AnalysisError::DegenerateX(_) => {
                CliError::InsufficientData(e.to_string())
            }
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<PlotError> for CliError {
    fn from(e: PlotError) -> Self {
        CliError::Input(e.to_string())
    }
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Input(format!("{}: {e}", path.display()))
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| io_err(path, e))
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    }
    std::fs::write(path, text).map_err(|e| io_err(path, e))
}

/// Writes to `out` or prints to stdout.
fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Loads the config as a TOML table (empty without a file) so flags can be layered on.
fn load_table(config: Option<&Path>) -> Result<toml::Table, CliError> {
    match config {
        None => Ok(toml::Table::new()),
        Some(p) => {
            let text = read(p)?;
            text.parse::<toml::Table>()
                .map_err(|e| CliError::Input(format!("{}: {e}", p.display())))
        }
    }
}

fn set(table: &mut toml::Table, section: &str, key: &str, value: impl Into<toml::Value>) {
    let entry = table
        .entry(section.to_string())
        .or_insert_with(|| toml::Value::Table(toml::Table::new()));
    if let toml::Value::Table(t) = entry {
        t.insert(key.to_string(), value.into());
    }
}

fn set_opt<V: Into<toml::Value>>(table: &mut toml::Table, section: &str, key: &str, value: Option<V>) {
    if let Some(v) = value {
        set(table, section, key, v);
    }
}

fn int(v: usize) -> toml::Value {
    toml::Value::Integer(v as i64)
}

fn seed(v: u64) -> Result<toml::Value, CliError> {
    i64::try_from(v)
        .map(toml::Value::Integer)
        .map_err(|_| CliError::Input(format!("seed {v} exceeds the TOML integer range")))
}

fn apply_lattice_flags(table: &mut toml::Table, f: &LatticeFlags) -> Result<(), CliError> {
    set_opt(table, "lattice", "kind", f.kind.clone());
    set_opt(table, "lattice", "n", f.n.map(int));
    set_opt(table, "lattice", "rows", f.rows.map(int));
    set_opt(table, "lattice", "cols", f.cols.map(int));
    set_opt(table, "lattice", "boundary", f.boundary.clone());
    set_opt(table, "coupling", "mode", f.coupling.clone());
    set_opt(table, "coupling", "seed", f.seed.map(seed).transpose()?);
    Ok(())
}

fn apply_ansatz_flags(table: &mut toml::Table, f: &AnsatzFlags) {
    set_opt(table, "ansatz", "family", f.ansatz.clone());
    set_opt(table, "ansatz", "layers", f.layers.map(int));
}

fn parse_section<T: DeserializeOwned>(table: &toml::Table, name: &str) -> Result<T, CliError> {
    let value = table
        .get(name)
        .cloned()
        .ok_or_else(|| CliError::Input(format!("missing [{name}] settings")))?;
    value
        .try_into()
        .map_err(|e: toml::de::Error| CliError::Input(format!("[{name}]: {e}")))
}

fn coupling_of(table: &toml::Table) -> Result<CouplingModel, CliError> {
    if table.contains_key("coupling") {
        parse_section(table, "coupling")
    } else {
        Ok(CouplingModel::isotropic())
    }
}

fn full_config(table: toml::Table) -> Result<VqeConfig, CliError> {
    let text = toml::to_string(&table).map_err(|e| CliError::Input(e.to_string()))?;
    Ok(VqeConfig::from_toml(&text)?)
}

fn sha256_hex(text: &str) -> String {
    format!("{:x}", Sha256::digest(text.as_bytes()))
}

fn unix_now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

pub fn decisions_json() -> Value {
    Value::Object(
        DECISIONS
            .iter()
            .map(|(k, v)| (k.to_string(), Value::String(v.to_string())))
            .collect(),
    )
}

/// Provenance record written next to run outputs. `manifest_id` hashes
/// everything except the timestamps, so reruns share it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub manifest_id: String,
    pub artifact: String,
    pub version: String,
    pub command: String,
    pub config_sha256: String,
    pub config: String,
    pub decisions: Value,
    pub seeds: Value,
    pub outputs: Vec<String>,
    pub started_unix: u64,
    pub finished_unix: u64,
}

impl RunManifest {
    fn new(command: &str, config: &VqeConfig, outputs: &[&str], started: u64) -> Self {
        let seeds = json!({
            "coupling": config.coupling.seed,
            "initial_params": config.initial.seed,
            "estimator": config.estimator.seed,
        });
        let mut m = RunManifest {
            manifest_id: String::new(),
            artifact: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            config_sha256: config.digest(),
            config: config.to_toml(),
            decisions: decisions_json(),
            seeds,
            outputs: outputs.iter().map(|s| s.to_string()).collect(),
            started_unix: 0,
            finished_unix: 0,
        };
        m.manifest_id = sha256_hex(&serde_json::to_string(&m).expect("json"));
        m.started_unix = started;
        m.finished_unix = unix_now();
        m
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("json");
        s.push('\n');
        s
    }
}

fn out_dir(flag: Option<&Path>, config: Option<&Path>) -> PathBuf {
    flag.map(Path::to_path_buf)
        .or_else(|| config.map(Path::to_path_buf))
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

pub fn cmd_lattice(c: &LatticeCmd) -> Result<(), CliError> {
    let mut table = load_table(c.lattice.config.as_deref())?;
    apply_lattice_flags(&mut table, &c.lattice)?;
    let section: LatticeSection = parse_section(&table, "lattice")?;
    let lattice = section.build()?;
    let h = build_hamiltonian(&lattice, &coupling_of(&table)?)?;
    let mut text = if c.neel {
        let bits = neel_bitstring(&lattice);
        let energy = product_state_energy(&h, &bits)?;
        let mut doc = h.to_json_value();
        let obj = doc.as_object_mut().expect("object");
        obj.insert("neel".into(), Value::String(bits.to_string()));
        obj.insert("neel_energy".into(), serde_json::to_value(G17(energy)).expect("json"));
        serde_json::to_string_pretty(&doc).expect("json")
    } else {
        h.to_json()
    };
    text.push('\n');
    emit(c.out.as_deref(), &text)
}

pub fn cmd_compile(c: &CompileCmd) -> Result<(), CliError> {
    let mut table = load_table(c.lattice.config.as_deref())?;
    apply_lattice_flags(&mut table, &c.lattice)?;
    apply_ansatz_flags(&mut table, &c.ansatz);
    let lattice = parse_section::<LatticeSection>(&table, "lattice")?.build()?;
    let section: AnsatzSection = parse_section(&table, "ansatz")?;
    let spec = ansatz_for_lattice(section.family, &lattice, section.layers)?;
    let raw = spec.to_circuit(None)?;
    let circuit = if c.no_opt { raw.clone() } else { optimize_circuit(&raw) };
    let stats = json!({
        "family": spec.family.name(),
        "nqubits": circuit.nqubits,
        "parameters": circuit.parameter_count(),
        "optimized": !c.no_opt,
        "gates": circuit.gate_count(),
        "cnots": circuit.cnot_count(),
        "depth": circuit.depth(),
        "gates_unoptimized": raw.gate_count(),
        "cnots_unoptimized": raw.cnot_count(),
        "depth_unoptimized": raw.depth(),
    });
    let mut stats = serde_json::to_string_pretty(&stats).expect("json");
    stats.push('\n');
    match &c.out_dir {
        Some(dir) => {
            write(&dir.join("circuit.txt"), &circuit.to_text())?;
            write(&dir.join("stats.json"), &stats)
        }
        None => {
            print!("{}", circuit.to_text());
            print!("{stats}");
            Ok(())
        }
    }
}

fn vqe_table(c: &VqeCmd) -> Result<toml::Table, CliError> {
    let mut table = load_table(c.lattice.config.as_deref())?;
    apply_lattice_flags(&mut table, &c.lattice)?;
    apply_ansatz_flags(&mut table, &c.ansatz);
    set_opt(&mut table, "initial", "state", c.state.clone());
    set_opt(&mut table, "initial", "params", c.init.clone());
    set_opt(&mut table, "initial", "seed", c.init_seed.map(seed).transpose()?);
    set_opt(&mut table, "optimizer", "method", c.method.clone());
    set_opt(&mut table, "optimizer", "max_evals", c.max_evals.map(int));
    set_opt(&mut table, "optimizer", "wall_seconds", c.wall_seconds);
    set_opt(&mut table, "estimator", "mode", c.estimator.clone());
    set_opt(&mut table, "estimator", "shots", c.shots.map(int));
    set_opt(&mut table, "estimator", "seed", c.estimator_seed.map(seed).transpose()?);
    if c.exact_baseline {
        set(&mut table, "output", "exact_baseline", true);
    }
    if c.timing {
        set(&mut table, "output", "timing", true);
    }
    set_opt(&mut table, "output", "jobs", c.jobs.map(int));
    if table.contains_key("estimator") && !table["estimator"].as_table().is_some_and(|t| t.contains_key("mode")) {
        set(&mut table, "estimator", "mode", "exact");
    }
    Ok(table)
}

const RUN_OUTPUTS: [&str; 5] = ["trace.csv", "summary.json", "checkpoint.json", "config.toml", "manifest.json"];

fn write_run(dir: &Path, command: &str, cfg: &VqeConfig, run: &VqeRun, started: u64) -> Result<(), CliError> {
    let manifest = RunManifest::new(command, cfg, &RUN_OUTPUTS, started);
    let mut summary: Value = serde_json::from_str(&run.summary.to_json()).expect("own json");
    summary
        .as_object_mut()
        .expect("object")
        .insert("manifest_id".into(), Value::String(manifest.manifest_id.clone()));
    let mut summary = serde_json::to_string_pretty(&summary).expect("json");
    summary.push('\n');
    write(&dir.join("trace.csv"), &run.trace.to_csv())?;
    write(&dir.join("summary.json"), &summary)?;
    if cfg.output.checkpoint.is_none() {
        write(&dir.join("checkpoint.json"), &run.checkpoint.to_json())?;
    }
    write(&dir.join("config.toml"), &cfg.to_toml())?;
    write(&dir.join("manifest.json"), &manifest.to_json())
}

pub fn cmd_vqe(c: &VqeCmd) -> Result<(), CliError> {
    let started = unix_now();
    let cfg = full_config(vqe_table(c)?)?;
    let dir = out_dir(c.out_dir.as_deref(), cfg.output.dir.as_deref());
    let run = run_vqe(&cfg)?;
    write_run(&dir, "vqe", &cfg, &run, started)?;
    eprintln!(
        "energy {} after {} evaluations ({})",
        crate::format::g17(run.summary.energy.0),
        run.summary.evaluations,
        run.summary.stopped
    );
    Ok(())
}

pub fn cmd_resume(c: &ResumeCmd) -> Result<(), CliError> {
    let started = unix_now();
    let mut table = load_table(Some(&c.config))?;
    if c.exact_baseline {
        set(&mut table, "output", "exact_baseline", true);
    }
    let cfg = full_config(table)?;
    let checkpoint = Checkpoint::from_json(&read(&c.checkpoint)?)?;
    let prior = match &c.trace {
        Some(p) => Some(EnergyTrace::from_csv(&read(p)?).map_err(|e| CliError::Input(format!("{}: {e}", p.display())))?),
        None => None,
    };
    let dir = out_dir(c.out_dir.as_deref(), cfg.output.dir.as_deref());
    let run = resume_vqe(&cfg, &checkpoint, prior, c.extra_evals)?;
    write_run(&dir, "resume", &cfg, &run, started)?;
    eprintln!(
        "energy {} after {} evaluations ({})",
        crate::format::g17(run.summary.energy.0),
        run.summary.evaluations,
        run.summary.stopped
    );
    Ok(())
}

pub fn cmd_exact(c: &ExactCmd) -> Result<(), CliError> {
    let mut table = load_table(c.lattice.config.as_deref())?;
    apply_lattice_flags(&mut table, &c.lattice)?;
    let lattice = parse_section::<LatticeSection>(&table, "lattice")?.build()?;
    let h = build_hamiltonian(&lattice, &coupling_of(&table)?)?;
    let mut opts = LanczosOptions::default();
    if let Some(t) = c.tol {
        opts.tol = t;
    }
    if let Some(m) = c.max_iter {
        opts.max_iter = m;
    }
    let r = ground_state_lanczos(&h, &opts)?;
    let n = lattice.sites as f64;
    // Shaped like a run summary so exact energies can feed the extrapolation directly.
    let doc = json!({
        "kind": lattice.kind.name(),
        "dims": lattice.dims,
        "boundary": lattice.boundary.name(),
        "n": lattice.sites,
        "estimator": "exact",
        "energy": G17(r.energy),
        "energy_per_site": G17(r.energy / n),
        "e0": G17(r.energy),
        "e0_per_site": G17(r.energy / n),
        "residual": G17(r.residual),
        "iterations": r.iterations,
        "baseline": {"e0": G17(r.energy)},
    });
    let mut text = serde_json::to_string_pretty(&doc).expect("json");
    text.push('\n');
    emit(c.out.as_deref(), &text)
}

fn collect_summaries(patterns: &[String]) -> Result<Vec<RunPoint>, CliError> {
    let mut paths = Vec::new();
    for pattern in patterns {
        let matches = glob::glob(pattern).map_err(|e| CliError::Input(format!("{pattern}: {e}")))?;
        for m in matches {
            paths.push(m.map_err(|e| CliError::Input(e.to_string()))?);
        }
    }
    paths.sort();
    paths.dedup();
    paths
        .iter()
        .map(|p| RunPoint::from_summary_json(&read(p)?).map_err(|e| CliError::Input(format!("{}: {e}", p.display()))))
        .collect()
}

pub fn cmd_extrapolate(c: &ExtrapolateCmd) -> Result<(), CliError> {
    let parity: Parity = c.parity.parse().map_err(CliError::Input)?;
    let mut runs = collect_summaries(&c.inputs)?;
    runs.sort_by_key(|r| r.n);
    let doc = match c.mode.as_str() {
        "thermo" => {
            let e = thermodynamic_extrapolation(&runs, parity)?;
            let points: Vec<[f64; 2]> = runs
                .iter()
                .filter(|r| parity.keeps(r.n))
                .map(|r| [r.n as f64, r.energy])
                .collect();
            json!({
                "mode": "thermo",
                "parity": parity,
                "sizes": e.sizes,
                "points": points.iter().map(|p| [G17(p[0]), G17(p[1])]).collect::<Vec<_>>(),
                "slope": e.fit.slope,
                "intercept": e.fit.intercept,
                "residual": e.fit.residual,
                "x_column": e.fit.x_column,
                "y_column": e.fit.y_column,
                "energy_per_site": e.energy_per_site,
                "reference": e.reference,
                "difference": e.difference,
                "caveat": e.caveat,
            })
        }
        "error" => {
            let abscissa: Abscissa = c.abscissa.parse().map_err(CliError::Input)?;
            let s = error_scaling_fit(&runs, abscissa, parity)?;
            let points: Vec<[G17; 2]> = runs
                .iter()
                .filter(|r| parity.keeps(r.n))
                .map(|r| {
                    let e0 = r.baseline.as_ref().map(|b| b.e0).unwrap_or(f64::NAN);
                    let n = r.n as f64;
                    [G17(abscissa.transform(n)), G17((r.energy - e0).abs() / n)]
                })
                .collect();
            json!({
                "mode": "error",
                "parity": parity,
                "abscissa": abscissa,
                "sizes": s.sizes,
                "points": points,
                "slope": s.fit.slope,
                "intercept": s.fit.intercept,
                "residual": s.fit.residual,
                "x_column": s.fit.x_column,
                "y_column": s.fit.y_column,
                "predict_n": c.predict,
                "prediction": G17(s.prediction(c.predict)),
            })
        }
        other => return Err(CliError::Input(format!("unknown mode '{other}' (expected thermo or error)"))),
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("json");
    text.push('\n');
    emit(c.out.as_deref(), &text)
}

pub fn cmd_plot(c: &PlotCmd) -> Result<(), CliError> {
    let text = read(&c.input)?;
    let svg = match c.kind.as_str() {
        "trace" => {
            let trace = EnergyTrace::from_csv(&text).map_err(|e| CliError::Input(format!("{}: {e}", c.input.display())))?;
            let pts: Vec<(f64, f64)> = trace.records.iter().map(|r| (r.eval as f64, r.best)).collect();
            trace_svg(&pts, c.e0, c.log)?
        }
        "scatter-fit" => {
            let is_json = c.input.extension().is_some_and(|e| e == "json");
            if is_json {
                let report: Value = serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", c.input.display())))?;
                let num = |v: &Value| v.as_f64().ok_or_else(|| CliError::Input("report values must be numbers".into()));
                let pts = report["points"]
                    .as_array()
                    .ok_or_else(|| CliError::Input("report has no points".into()))?
                    .iter()
                    .map(|p| Ok((num(&p[0])?, num(&p[1])?)))
                    .collect::<Result<Vec<_>, CliError>>()?;
                let xl = report["x_column"].as_str().unwrap_or("x").to_string();
                let yl = report["y_column"].as_str().unwrap_or("y").to_string();
                scatter_fit_svg(&pts, num(&report["slope"])?, num(&report["intercept"])?, num(&report["residual"])?, (&xl, &yl))?
            } else {
                let (xl, yl, pts) = read_xy_csv(&text)?;
                let fit = crate::analysis::linear_fit(&pts, &xl, &yl)?;
                scatter_fit_svg(&pts, fit.slope.0, fit.intercept.0, fit.residual.0, (&xl, &yl))?
            }
        }
        other => return Err(CliError::Input(format!("unknown plot kind '{other}' (expected trace or scatter-fit)"))),
    };
    write(&c.out, &svg)
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    if cli.manifest {
        let mut text = serde_json::to_string_pretty(&json!({
            "artifact": env!("CARGO_PKG_NAME"),
            "version": env!("CARGO_PKG_VERSION"),
            "decisions": decisions_json(),
        }))
        .expect("json");
        text.push('\n');
        print!("{text}");
        return Ok(());
    }
    match &cli.command {
        None => Err(CliError::Input("no command given; see --help".into())),
        Some(Command::Lattice(c)) => cmd_lattice(c),
        Some(Command::Compile(c)) => cmd_compile(c),
        Some(Command::Vqe(c)) => cmd_vqe(c),
        Some(Command::Resume(c)) => cmd_resume(c),
        Some(Command::Exact(c)) => cmd_exact(c),
        Some(Command::Extrapolate(c)) => cmd_extrapolate(c),
        Some(Command::Plot(c)) => cmd_plot(c),
    }
}

/// Parses `args` (program name first), runs, and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
