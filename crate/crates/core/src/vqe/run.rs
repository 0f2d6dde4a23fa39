//! End-to-end runs: lattice, Hamiltonian, ansatz circuit, optimizer loop and
//! the artifacts each run leaves behind.

use std::path::Path;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use super::bfgs::{minimize_quasi_newton, QuasiNewtonOptions};
use super::config::{EstimatorMode, Method, VqeConfig};
use super::nelder_mead::{minimize_gradient_free, GradientFreeOptions};
use super::objective::{AcceptInfo, EnergyTrace, Tracked};
use super::{OptimizeResult, StopReason, VqeError};
use crate::ansatz::{ansatz_for_lattice, init_parameters, AnsatzSpec};
use crate::circuit::{optimize_circuit, Angle, Circuit, Gate};
use crate::engine::{
    estimate_energy_sampled_with, magnetization_z, overlap_sq, PauliOperator, StateVector,
};
use crate::exact::{ground_state_lanczos, ExactError, LanczosOptions};
use crate::format::G17;
use crate::lattice::{build_hamiltonian, Bitstring, Hamiltonian, Lattice};

/// Everything a run needs that does not change between evaluations.
pub struct Problem {
    pub config: VqeConfig,
    pub lattice: Lattice,
    pub hamiltonian: Hamiltonian,
    pub ansatz: AnsatzSpec,
    pub initial: Bitstring,
    /// Initial X layer plus the compiled ansatz, optimized once.
    pub circuit: Circuit,
    pub unoptimized_depth: usize,
    operator: PauliOperator,
    /// Index of the first gate reading each parameter slot.
    first_use: Vec<usize>,
}

impl Problem {
    pub fn from_config(config: &VqeConfig) -> Result<Self, VqeError> {
        config.validate()?;
        let lattice = config.lattice.build()?;
        let hamiltonian = build_hamiltonian(&lattice, &config.coupling)?;
        let ansatz = ansatz_for_lattice(config.ansatz.family, &lattice, config.ansatz.layers)?;
        let initial = config.initial.bitstring(&lattice)?;
        let raw = ansatz.to_circuit(Some(&initial))?;
        let p = ansatz.parameter_count();
        if config.optimizer.method == Method::QuasiNewton && config.optimizer.max_evals < p + 1 {
            return Err(VqeError::Config(format!(
                "optimizer.max_evals = {} cannot cover one gradient ({} evaluations)",
                config.optimizer.max_evals,
                p + 1
            )));
        }
        let unoptimized_depth = raw.depth();
        let circuit = optimize_circuit(&raw);
        let operator = PauliOperator::from_hamiltonian(&hamiltonian);
        let mut first_use = vec![circuit.gates.len(); p];
        for (k, g) in circuit.gates.iter().enumerate().rev() {
            if let Gate::Rz(_, Angle::Slot { slot, .. }) = g {
                first_use[*slot] = k;
            }
        }
        Ok(Problem {
            config: config.clone(),
            lattice,
            hamiltonian,
            ansatz,
            initial,
            circuit,
            unoptimized_depth,
            operator,
            first_use,
        })
    }

    pub fn parameter_count(&self) -> usize {
        self.ansatz.parameter_count()
    }

    pub fn initial_parameters(&self) -> Result<Vec<f64>, VqeError> {
        Ok(init_parameters(
            self.parameter_count(),
            self.config.initial.params,
            self.config.initial.seed,
        )?)
    }

    pub fn state(&self, params: &[f64]) -> Result<StateVector, VqeError> {
        let mut s = StateVector::zero(self.lattice.sites)?;
        s.apply_circuit(&self.circuit, params)?;
        Ok(s)
    }

    pub fn exact_energy(&self, params: &[f64]) -> Result<f64, VqeError> {
        Ok(self.operator.expectation(&self.state(params)?)?)
    }

    fn energy_of(&self, state: &StateVector, eval_index: usize) -> Result<f64, VqeError> {
        match self.config.estimator.mode {
            EstimatorMode::Exact => Ok(self.operator.expectation(state)?),
            EstimatorMode::Sampled => {
                let mut rng = ChaCha20Rng::seed_from_u64(self.config.estimator.seed.unwrap_or(0));
                rng.set_stream(eval_index as u64);
                let shots = self.config.estimator.shots.unwrap_or(1);
                Ok(estimate_energy_sampled_with(state, &self.hamiltonian, shots, &mut rng)?.estimate)
            }
        }
    }

    /// One energy evaluation. Sampled mode draws from ChaCha20 stream
    /// `eval_index` of the configured seed, so evaluations are reproducible
    /// independently of how they are scheduled.
    pub fn energy(&self, params: &[f64], eval_index: usize) -> f64 {
        self.state(params)
            .and_then(|s| self.energy_of(&s, eval_index))
            .unwrap_or(f64::NAN)
    }

    /// Same values as calling `energy` on each point with indices
    /// `first_index, first_index + 1, ...`. Points that differ from `xs[0]` in a
    /// single parameter reuse the simulated prefix of `xs[0]` up to that
    /// parameter's first gate, which roughly halves the cost of a
    /// finite-difference gradient.
    pub fn energies(&self, xs: &[Vec<f64>], first_index: usize) -> Vec<f64> {
        let mut out = vec![f64::NAN; xs.len()];
        let Some(base) = xs.first() else {
            return out;
        };
        if self.circuit.check_parameters(base).is_err() {
            return out;
        }
        // (branch gate, point) for single-parameter displacements of the base.
        let mut branches = Vec::new();
        for (j, x) in xs.iter().enumerate().skip(1) {
            let mut diff = x.iter().zip(base).enumerate().filter(|(_, (a, b))| a != b);
            match (x.len() == base.len(), diff.next(), diff.next()) {
                (true, Some((i, _)), None) => branches.push((self.first_use[i], j)),
                _ => out[j] = self.energy(x, first_index + j),
            }
        }
        branches.sort_unstable();

        let Ok(mut state) = StateVector::zero(self.lattice.sites) else {
            return out;
        };
        let gates = &self.circuit.gates;
        let mut at = 0;
        for (g, j) in branches {
            while at < g {
                state.apply_gate(&gates[at], base);
                at += 1;
            }
            let mut fork = state.clone();
            for gate in &gates[g..] {
                fork.apply_gate(gate, &xs[j]);
            }
            out[j] = self.energy_of(&fork, first_index + j).unwrap_or(f64::NAN);
        }
        for gate in &gates[at..] {
            state.apply_gate(gate, base);
        }
        out[0] = self.energy_of(&state, first_index).unwrap_or(f64::NAN);
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RngState {
    pub algorithm: String,
    pub seed: Option<u64>,
    /// Next per-evaluation stream index.
    pub stream: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    /// Last accepted iterate.
    pub params: Vec<f64>,
    pub evals: usize,
    pub best_energy: f64,
    pub best_params: Vec<f64>,
    pub rng: RngState,
    pub config_sha256: String,
}

impl Checkpoint {
    pub fn to_json(&self) -> String {
        let doc = serde_json::json!({
            "params": self.params.iter().map(|&v| G17(v)).collect::<Vec<_>>(),
            "evals": self.evals,
            "best_energy": G17(self.best_energy),
            "best_params": self.best_params.iter().map(|&v| G17(v)).collect::<Vec<_>>(),
            "rng": self.rng,
            "config_sha256": self.config_sha256,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("json");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, VqeError> {
        serde_json::from_str(text).map_err(|e| VqeError::Checkpoint(e.to_string()))
    }

    pub fn write(&self, path: &Path) -> Result<(), VqeError> {
        let tmp = path.with_extension("json.tmp");
        std::fs::write(&tmp, self.to_json())?;
        std::fs::rename(&tmp, path)?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExactBaseline {
    pub e0: G17,
    pub e0_per_site: G17,
    pub gap_per_site: G17,
    /// Squared overlap with one Lanczos ground vector; ill-defined when the
    /// ground state is degenerate.
    pub overlap: G17,
    pub lanczos_residual: G17,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub kind: String,
    pub dims: Vec<usize>,
    pub boundary: String,
    pub n: usize,
    pub ansatz: String,
    pub layers: Option<usize>,
    pub parameters: usize,
    pub optimizer: String,
    pub estimator: String,
    pub energy: G17,
    pub energy_per_site: G17,
    /// Noise-free energy at the best parameters (differs from `energy` only when sampling).
    pub energy_exact: G17,
    pub magnetization_z: G17,
    pub evaluations: usize,
    pub iterations: usize,
    pub stopped: String,
    pub wall_seconds: G17,
    pub circuit_depth: usize,
    pub circuit_depth_unoptimized: usize,
    pub circuit_gates: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub baseline: Option<ExactBaseline>,
    pub config_sha256: String,
}

impl Summary {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("json");
        s.push('\n');
        s
    }
}

#[derive(Debug, Clone)]
pub struct VqeRun {
    pub trace: EnergyTrace,
    pub result: OptimizeResult,
    /// Eval indices at which iterates were accepted during this leg.
    pub accepted: Vec<usize>,
    pub checkpoint: Checkpoint,
    pub summary: Summary,
}

struct Leg<'a> {
    problem: &'a Problem,
    start: Vec<f64>,
    prior: EnergyTrace,
    prior_best: Option<(Vec<f64>, f64)>,
    budget: usize,
}

fn drive(leg: Leg<'_>) -> Result<VqeRun, VqeError> {
    let problem = leg.problem;
    let cfg = &problem.config;
    let digest = cfg.digest();
    let rng_state = |evals: usize| RngState {
        algorithm: "chacha20".into(),
        seed: cfg.estimator.seed,
        stream: evals as u64 + 1,
    };
    let started = Instant::now();

    let mut objective = Tracked::new(|x: &[f64], k: usize| problem.energy(x, k), leg.budget)
        .with_batch(|xs: &[Vec<f64>], first: usize| problem.energies(xs, first))
        .with_prior(leg.prior, leg.prior_best)
        .with_timing(cfg.output.timing)
        .with_jobs(cfg.output.jobs)
        .with_wall_clock(cfg.optimizer.wall_seconds.map(Duration::from_secs_f64));
    if let Some(path) = cfg.output.checkpoint.clone() {
        let digest = digest.clone();
        let seed = cfg.estimator.seed;
        objective = objective.with_accept_hook(move |info: &AcceptInfo| {
            let cp = Checkpoint {
                params: info.x.to_vec(),
                evals: info.evaluations,
                best_energy: info.best_f,
                best_params: info.best_x.unwrap_or(info.x).to_vec(),
                rng: RngState {
                    algorithm: "chacha20".into(),
                    seed,
                    stream: info.evaluations as u64 + 1,
                },
                config_sha256: digest.clone(),
            };
            // A failed intermediate write is retried at the next iterate and at the end.
            let _ = cp.write(&path);
        });
    }

    let o = &cfg.optimizer;
    let result = match o.method {
        Method::QuasiNewton => minimize_quasi_newton(
            &mut objective,
            &leg.start,
            &QuasiNewtonOptions {
                fd_step: o.fd_step,
                gtol: o.gtol,
                rtol: o.rtol,
                max_step: o.max_step,
                ..Default::default()
            },
        ),
        Method::GradientFree => minimize_gradient_free(
            &mut objective,
            &leg.start,
            &GradientFreeOptions {
                initial_edge: o.simplex_edge,
                flat_tol: o.flat_tol,
            },
        ),
    }?;

    let evaluations = objective.evaluations();
    let best_f = objective.best_f;
    let best_x = objective.best_x.clone().unwrap_or_else(|| leg.start.clone());
    let last = objective
        .last_accepted
        .clone()
        .map(|(x, _)| x)
        .unwrap_or_else(|| leg.start.clone());
    let checkpoint = Checkpoint {
        params: last,
        evals: evaluations,
        best_energy: best_f,
        best_params: best_x.clone(),
        rng: rng_state(evaluations),
        config_sha256: digest.clone(),
    };
    if let Some(path) = &cfg.output.checkpoint {
        checkpoint.write(path)?;
    }
    let trace = objective.trace.clone();
    let accepted = objective.accepted.clone();
    let elapsed = started.elapsed();
    drop(objective);

    let final_state = problem.state(&best_x)?;
    let n = problem.lattice.sites;
    let baseline = if cfg.output.exact_baseline {
        let gs = match ground_state_lanczos(
            &problem.hamiltonian,
            &LanczosOptions {
                want_vector: true,
                ..Default::default()
            },
        ) {
            Ok(r) => r,
            Err(ExactError::NotConverged { best, .. }) => *best,
            Err(e) => return Err(e.into()),
        };
        let v = gs.eigenvector.as_ref().expect("vector requested");
        Some(ExactBaseline {
            e0: G17(gs.energy),
            e0_per_site: G17(gs.energy / n as f64),
            gap_per_site: G17((best_f - gs.energy).abs() / n as f64),
            overlap: G17(overlap_sq(&final_state, v)?),
            lanczos_residual: G17(gs.residual),
        })
    } else {
        None
    };

    let summary = Summary {
        kind: problem.lattice.kind.name().into(),
        dims: problem.lattice.dims.clone(),
        boundary: problem.lattice.boundary.name().into(),
        n,
        ansatz: problem.ansatz.family.name().into(),
        layers: problem.ansatz.layers,
        parameters: problem.parameter_count(),
        optimizer: o.method.name().into(),
        estimator: match cfg.estimator.mode {
            EstimatorMode::Exact => "exact".into(),
            EstimatorMode::Sampled => "sampled".into(),
        },
        energy: G17(best_f),
        energy_per_site: G17(best_f / n as f64),
        energy_exact: G17(problem.operator.expectation(&final_state)?),
        magnetization_z: G17(magnetization_z(&final_state)),
        evaluations,
        iterations: result.iterations,
        stopped: result.stop.name().into(),
        wall_seconds: G17(if cfg.output.timing {
            elapsed.as_secs_f64()
        } else {
            0.0
        }),
        circuit_depth: problem.circuit.depth(),
        circuit_depth_unoptimized: problem.unoptimized_depth,
        circuit_gates: problem.circuit.gate_count(),
        baseline,
        config_sha256: digest,
    };
    Ok(VqeRun {
        trace,
        result,
        accepted,
        checkpoint,
        summary,
    })
}

pub fn run_vqe(config: &VqeConfig) -> Result<VqeRun, VqeError> {
    let problem = Problem::from_config(config)?;
    run_problem(&problem)
}

pub fn run_problem(problem: &Problem) -> Result<VqeRun, VqeError> {
    drive(Leg {
        problem,
        start: problem.initial_parameters()?,
        prior: EnergyTrace::default(),
        prior_best: None,
        budget: problem.config.optimizer.max_evals,
    })
}

/// Continues from a checkpoint with `extra_evals` more evaluations. The
/// optimizer restarts from the checkpoint parameters with fresh internal state;
/// eval numbering and the running best carry over.
pub fn resume_vqe(
    config: &VqeConfig,
    checkpoint: &Checkpoint,
    prior_trace: Option<EnergyTrace>,
    extra_evals: usize,
) -> Result<VqeRun, VqeError> {
    let digest = config.digest();
    if digest != checkpoint.config_sha256 {
        return Err(VqeError::DigestMismatch {
            expected: checkpoint.config_sha256.clone(),
            got: digest,
        });
    }
    let problem = Problem::from_config(config)?;
    let p = problem.parameter_count();
    if checkpoint.params.len() != p || checkpoint.best_params.len() != p {
        return Err(VqeError::Checkpoint(format!(
            "checkpoint holds {} parameters, ansatz has {p}",
            checkpoint.params.len()
        )));
    }
    let prior = match prior_trace {
        Some(mut t) => {
            if t.last_eval() < checkpoint.evals {
                return Err(VqeError::Checkpoint(format!(
                    "trace has {} evaluations, checkpoint claims {}",
                    t.last_eval(),
                    checkpoint.evals
                )));
            }
            t.records.truncate(checkpoint.evals);
            t
        }
        None => synthetic_prefix(checkpoint),
    };
    drive(Leg {
        problem: &problem,
        start: checkpoint.params.clone(),
        prior,
        prior_best: Some((checkpoint.best_params.clone(), checkpoint.best_energy)),
        budget: checkpoint.evals + extra_evals,
    })
}

/// Without the first leg's trace, numbering still continues from the
/// checkpoint; the missing rows are not reconstructed.
fn synthetic_prefix(checkpoint: &Checkpoint) -> EnergyTrace {
    let mut t = EnergyTrace::default();
    if checkpoint.evals > 0 {
        t.records.push(super::objective::TraceRecord {
            eval: checkpoint.evals,
            energy: checkpoint.best_energy,
            best: checkpoint.best_energy,
            seconds: 0.0,
        });
    }
    t
}

impl StopReason {
    pub fn name(self) -> &'static str {
        match self {
            StopReason::Budget => "budget",
            StopReason::WallClock => "wall_clock",
            StopReason::GradientTolerance => "gradient_tolerance",
            StopReason::RelativeImprovement => "relative_improvement",
            StopReason::LineSearch => "line_search",
            StopReason::Flat => "flat",
        }
    }
}
