//! The hybrid loop: bind parameters, evaluate energies, optimize, persist.

mod bfgs;
pub mod config;
mod nelder_mead;
mod objective;
mod run;

use thiserror::Error;

pub use bfgs::{minimize_quasi_newton, QuasiNewtonOptions};
pub use config::{EstimatorMode, Method, VqeConfig};
pub use nelder_mead::{minimize_gradient_free, GradientFreeOptions};
pub use objective::{
    finite_difference_gradient, AcceptInfo, EnergyTrace, Halt, Objective, TraceError, TraceRecord, Tracked,
    TRACE_HEADER,
};
pub use run::{resume_vqe, run_problem, run_vqe, Checkpoint, ExactBaseline, Problem, RngState, Summary, VqeRun};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    Budget,
    WallClock,
    GradientTolerance,
    RelativeImprovement,
    /// Backtracking failed even along steepest descent.
    LineSearch,
    /// Simplex values agree to the flatness tolerance.
    Flat,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizeResult {
    /// Best point seen, which need not be the last iterate.
    pub x: Vec<f64>,
    pub f: f64,
    pub stop: StopReason,
    pub iterations: usize,
}

#[derive(Debug, Error, PartialEq)]
pub enum OptimizeError {
    #[error("objective returned {value} at evaluation {eval}")]
    NonFinite { eval: usize, value: f64 },
}

#[derive(Debug, Error)]
pub enum VqeError {
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Lattice(#[from] crate::lattice::LatticeError),
    #[error(transparent)]
    Ansatz(#[from] crate::ansatz::AnsatzError),
    #[error(transparent)]
    Engine(#[from] crate::engine::EngineError),
    #[error(transparent)]
    Exact(#[from] crate::exact::ExactError),
    #[error("optimizer aborted: {0}")]
    Optimizer(#[from] OptimizeError),
    #[error("checkpoint: {0}")]
    Checkpoint(String),
    #[error("checkpoint was written for config {expected}, this config hashes to {got}")]
    DigestMismatch { expected: String, got: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<crate::circuit::CircuitError> for VqeError {
    fn from(e: crate::circuit::CircuitError) -> Self {
        VqeError::Engine(e.into())
    }
}
