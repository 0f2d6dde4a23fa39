//! Run configuration: a TOML document with one table per concern.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::VqeError;
use crate::ansatz::{AnsatzFamily, InitMode};
use crate::lattice::{build_lattice, Bitstring, Boundary, CouplingModel, Lattice, LatticeKind};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VqeConfig {
    pub lattice: LatticeSection,
    #[serde(default = "CouplingModel::isotropic")]
    pub coupling: CouplingModel,
    pub ansatz: AnsatzSection,
    #[serde(default)]
    pub initial: InitialSection,
    pub optimizer: OptimizerSection,
    #[serde(default)]
    pub estimator: EstimatorSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeSection {
    pub kind: LatticeKind,
    /// Site count for chains and rings, leg length for ladders.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rows: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cols: Option<usize>,
    /// Defaults to periodic for rings and open otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary: Option<Boundary>,
}

impl LatticeSection {
    pub fn boundary(&self) -> Boundary {
        self.boundary.unwrap_or(match self.kind {
            LatticeKind::Ring => Boundary::Periodic,
            _ => Boundary::Open,
        })
    }

    pub fn dims(&self) -> Result<Vec<usize>, VqeError> {
        let missing = |what: &str| VqeError::Config(format!("lattice.{what} is required for kind {}", self.kind));
        match self.kind {
            LatticeKind::Chain | LatticeKind::Ring => Ok(vec![self.n.ok_or_else(|| missing("n"))?]),
            LatticeKind::Ladder => match (self.n, self.rows, self.cols) {
                (Some(n), None, None) => Ok(vec![n, 2]),
                (None, Some(r), Some(c)) => Ok(vec![r, c]),
                _ => Err(missing("n")),
            },
            LatticeKind::Square | LatticeKind::Triangular => Ok(vec![
                self.rows.ok_or_else(|| missing("rows"))?,
                self.cols.ok_or_else(|| missing("cols"))?,
            ]),
        }
    }

    pub fn build(&self) -> Result<Lattice, VqeError> {
        Ok(build_lattice(self.kind, &self.dims()?, self.boundary())?)
    }
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnsatzSection {
    pub family: AnsatzFamily,
    #[serde(default = "one")]
    pub layers: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSection {
    /// `"neel"` or an explicit bitstring, character `i` being site `i`.
    #[serde(default = "neel")]
    pub state: String,
    #[serde(default = "zeros")]
    pub params: InitMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

fn neel() -> String {
    "neel".into()
}

fn zeros() -> InitMode {
    InitMode::Zeros
}

impl Default for InitialSection {
    fn default() -> Self {
        InitialSection {
            state: neel(),
            params: InitMode::Zeros,
            seed: None,
        }
    }
}

impl InitialSection {
    pub fn bitstring(&self, lattice: &Lattice) -> Result<Bitstring, VqeError> {
        if self.state == "neel" {
            return Ok(crate::lattice::neel_bitstring(lattice));
        }
        let bits: Bitstring = self
            .state
            .parse()
            .map_err(|e| VqeError::Config(format!("initial.state: {e}")))?;
        if bits.len() != lattice.sites {
            return Err(VqeError::Config(format!(
                "initial.state has {} bits, lattice has {} sites",
                bits.len(),
                lattice.sites
            )));
        }
        Ok(bits)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    QuasiNewton,
    GradientFree,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::QuasiNewton => "quasi_newton",
            Method::GradientFree => "gradient_free",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizerSection {
    pub method: Method,
    /// Hard cap on energy evaluations; there is no default.
    pub max_evals: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_seconds: Option<f64>,
    #[serde(default = "fd_step")]
    pub fd_step: f64,
    #[serde(default = "gtol")]
    pub gtol: f64,
    #[serde(default = "rtol")]
    pub rtol: f64,
    #[serde(default = "max_step")]
    pub max_step: f64,
    #[serde(default = "simplex_edge")]
    pub simplex_edge: f64,
    #[serde(default = "flat_tol")]
    pub flat_tol: f64,
}

fn fd_step() -> f64 {
    1.49e-8
}
fn gtol() -> f64 {
    1e-6
}
fn rtol() -> f64 {
    1e-10
}
fn max_step() -> f64 {
    1.0
}
fn simplex_edge() -> f64 {
    0.1
}
fn flat_tol() -> f64 {
    1e-12
}

impl OptimizerSection {
    pub fn new(method: Method, max_evals: usize) -> Self {
        OptimizerSection {
            method,
            max_evals,
            wall_seconds: None,
            fd_step: fd_step(),
            gtol: gtol(),
            rtol: rtol(),
            max_step: max_step(),
            simplex_edge: simplex_edge(),
            flat_tol: flat_tol(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EstimatorMode {
    Exact,
    Sampled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimatorSection {
    pub mode: EstimatorMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shots: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl Default for EstimatorSection {
    fn default() -> Self {
        EstimatorSection {
            mode: EstimatorMode::Exact,
            shots: None,
            seed: None,
        }
    }
}

/// Settings that do not change the optimization trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    /// Written at every accepted iterate and when the run stops.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub checkpoint: Option<PathBuf>,
    #[serde(default)]
    pub exact_baseline: bool,
    /// Record wall time in traces and summaries (breaks byte-identical reruns).
    #[serde(default)]
    pub timing: bool,
    #[serde(default = "one")]
    pub jobs: usize,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            dir: None,
            checkpoint: None,
            exact_baseline: false,
            timing: false,
            jobs: 1,
        }
    }
}

impl VqeConfig {
    pub fn from_toml(text: &str) -> Result<Self, VqeError> {
        toml::from_str(text).map_err(|e| VqeError::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// SHA-256 over the settings that determine the optimization trajectory;
    /// budgets and output options are excluded so a run can be resumed with a
    /// larger budget.
    pub fn digest(&self) -> String {
        let mut v = serde_json::to_value(self).expect("config serializes");
        let obj = v.as_object_mut().expect("table");
        obj.remove("output");
        if let Some(opt) = obj.get_mut("optimizer").and_then(|o| o.as_object_mut()) {
            opt.remove("max_evals");
            opt.remove("wall_seconds");
        }
        let canonical = serde_json::to_string(&v).expect("json");
        format!("{:x}", Sha256::digest(canonical.as_bytes()))
    }

    pub fn validate(&self) -> Result<(), VqeError> {
        let o = &self.optimizer;
        let bad = |m: String| Err(VqeError::Config(m));
        if !(o.fd_step > 0.0) {
            return bad(format!("optimizer.fd_step must be positive, got {}", o.fd_step));
        }
        if o.max_evals == 0 {
            return bad("optimizer.max_evals must be at least 1".into());
        }
        if o.wall_seconds.is_some_and(|w| !(w > 0.0)) {
            return bad("optimizer.wall_seconds must be positive".into());
        }
        if !(o.simplex_edge > 0.0) {
            return bad("optimizer.simplex_edge must be positive".into());
        }
        if self.ansatz.layers == 0 {
            return bad("ansatz.layers must be at least 1".into());
        }
        if self.estimator.mode == EstimatorMode::Sampled {
            if self.estimator.shots.unwrap_or(0) == 0 {
                return bad("estimator.shots must be at least 1 for sampled mode".into());
            }
            if self.estimator.seed.is_none() {
                return bad("estimator.seed is required for sampled mode".into());
            }
        }
        if self.initial.params == InitMode::Random && self.initial.seed.is_none() {
            return bad("initial.seed is required for random parameters".into());
        }
        if self.output.jobs == 0 {
            return bad("output.jobs must be at least 1".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASIC: &str = r#"
[lattice]
kind = "ring"
n = 4

[ansatz]
family = "xy"

[optimizer]
method = "quasi_newton"
max_evals = 500
"#;

    #[test]
    fn defaults_fill_in() {
        let c = VqeConfig::from_toml(BASIC).unwrap();
        assert_eq!(c.lattice.boundary(), Boundary::Periodic);
        assert_eq!(c.initial.state, "neel");
        assert_eq!(c.initial.params, InitMode::Zeros);
        assert_eq!(c.optimizer.fd_step, 1.49e-8);
        assert_eq!(c.estimator.mode, EstimatorMode::Exact);
        assert_eq!(c.output.jobs, 1);
        c.validate().unwrap();
    }

    #[test]
    fn toml_round_trip_preserves_digest() {
        let c = VqeConfig::from_toml(BASIC).unwrap();
        let back = VqeConfig::from_toml(&c.to_toml()).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.digest(), c.digest());
    }

    #[test]
    fn digest_ignores_budget_and_output() {
        let a = VqeConfig::from_toml(BASIC).unwrap();
        let mut b = a.clone();
        b.optimizer.max_evals = 9000;
        b.output.jobs = 4;
        assert_eq!(a.digest(), b.digest());
        b.optimizer.gtol = 1e-3;
        assert_ne!(a.digest(), b.digest());
    }

    #[test]
    fn missing_budget_is_an_error_with_location() {
        let text = BASIC.replace("max_evals = 500\n", "");
        let err = VqeConfig::from_toml(&text).unwrap_err().to_string();
        assert!(err.contains("max_evals"), "{err}");
        let typo = BASIC.replace("family", "famly");
        let err = VqeConfig::from_toml(&typo).unwrap_err().to_string();
        assert!(err.contains("line"), "{err}");
    }

    #[test]
    fn validation_rules() {
        let mut c = VqeConfig::from_toml(BASIC).unwrap();
        c.optimizer.fd_step = 0.0;
        assert!(c.validate().is_err());
        let mut c = VqeConfig::from_toml(BASIC).unwrap();
        c.estimator.mode = EstimatorMode::Sampled;
        assert!(c.validate().is_err());
        c.estimator.shots = Some(100);
        c.estimator.seed = Some(1);
        c.validate().unwrap();
    }

    #[test]
    fn ladder_and_grid_dims() {
        let l = LatticeSection {
            kind: LatticeKind::Ladder,
            n: Some(4),
            rows: None,
            cols: None,
            boundary: None,
        };
        assert_eq!(l.dims().unwrap(), vec![4, 2]);
        assert_eq!(l.build().unwrap().sites, 8);
        let sq = LatticeSection {
            kind: LatticeKind::Square,
            n: None,
            rows: Some(3),
            cols: None,
            boundary: None,
        };
        assert!(sq.dims().is_err());
    }
}
