//! C ABI over the spinvqe core. Objects cross the boundary as opaque handles,
//! every entry point returns an `SvqStatus`, and the message for the most
//! recent failure on the calling thread is available from `svq_last_error`.
//!
//! Strings returned through `char **` out-parameters are owned by the caller
//! and must be released with `svq_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use spinvqe::ansatz::AnsatzError;
use spinvqe::exact::{ground_state_lanczos, ExactError, LanczosOptions};
use spinvqe::lattice::{build_hamiltonian, build_lattice, Boundary, CouplingModel, Hamiltonian, LatticeKind};
use spinvqe::vqe::{run_vqe, EstimatorMode, Problem, VqeConfig, VqeError};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SvqStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Unsupported = 3,
    Aborted = 4,
    Internal = 5,
    Panic = 6,
}

/// Lattice Hamiltonian.
pub struct SvqHamiltonian(Hamiltonian);

/// Lattice, Hamiltonian and compiled ansatz circuit built from a run config.
pub struct SvqProblem(Problem);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Failure(SvqStatus, String);

impl Failure {
    fn invalid(msg: impl Into<String>) -> Self {
        Failure(SvqStatus::InvalidArgument, msg.into())
    }
}

impl From<VqeError> for Failure {
    fn from(e: VqeError) -> Self {
        let status = match &e {
            VqeError::Ansatz(AnsatzError::UnsupportedLattice(_)) => SvqStatus::Unsupported,
            VqeError::Optimizer(_) | VqeError::Exact(ExactError::NotConverged { .. }) => SvqStatus::Aborted,
            VqeError::Io(_) => SvqStatus::Internal,
            _ => SvqStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

impl From<ExactError> for Failure {
    fn from(e: ExactError) -> Self {
        let status = match e {
            ExactError::NotConverged { .. } => SvqStatus::Aborted,
            _ => SvqStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

/// Runs `f`, converting errors and panics into a status plus thread-local message.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> SvqStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            SvqStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(&format!("internal panic: {msg}"));
            SvqStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(SvqStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure::invalid(format!("{what} is not UTF-8")))
}

unsafe fn out_arg<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut()
        .ok_or_else(|| Failure(SvqStatus::NullPointer, format!("{what} is null")))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref()
        .ok_or_else(|| Failure(SvqStatus::NullPointer, format!("{what} is null")))
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s).expect("no interior nul").into_raw()
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn svq_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static nul-terminated string.
#[no_mangle]
pub extern "C" fn svq_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn svq_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds a Heisenberg Hamiltonian. `kind` is chain, ring, ladder, square or
/// triangular; `boundary` is open, periodic or null for the kind's default.
/// `random_couplings` nonzero draws couplings from `seed`.
///
/// # Safety
/// `kind` and a non-null `boundary` must be nul-terminated strings, `dims`
/// must point to `ndims` values and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn svq_hamiltonian_new(
    kind: *const c_char,
    dims: *const usize,
    ndims: usize,
    boundary: *const c_char,
    random_couplings: i32,
    seed: u64,
    out: *mut *mut SvqHamiltonian,
) -> SvqStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let kind: LatticeKind = str_arg(kind, "kind")?.parse().map_err(Failure::invalid)?;
        if dims.is_null() {
            return Err(Failure(SvqStatus::NullPointer, "dims is null".into()));
        }
        let dims = std::slice::from_raw_parts(dims, ndims);
        let boundary = if boundary.is_null() {
            match kind {
                LatticeKind::Ring => Boundary::Periodic,
                _ => Boundary::Open,
            }
        } else {
            str_arg(boundary, "boundary")?.parse().map_err(Failure::invalid)?
        };
        let lattice = build_lattice(kind, dims, boundary).map_err(|e| Failure::invalid(e.to_string()))?;
        let coupling = if random_couplings != 0 {
            CouplingModel::random(seed)
        } else {
            CouplingModel::isotropic()
        };
        let h = build_hamiltonian(&lattice, &coupling).map_err(|e| Failure::invalid(e.to_string()))?;
        *out = Box::into_raw(Box::new(SvqHamiltonian(h)));
        Ok(())
    })
}

/// # Safety
/// `h` must be null or a handle from `svq_hamiltonian_new`, freed at most once.
#[no_mangle]
pub unsafe extern "C" fn svq_hamiltonian_free(h: *mut SvqHamiltonian) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// # Safety
/// `h` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn svq_hamiltonian_nqubits(h: *const SvqHamiltonian, out: *mut usize) -> SvqStatus {
    guard(|| {
        let h = handle(h, "hamiltonian")?;
        *out_arg(out, "out")? = h.0.nqubits;
        Ok(())
    })
}

/// Canonical JSON document for the Hamiltonian.
///
/// # Safety
/// `h` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn svq_hamiltonian_to_json(h: *const SvqHamiltonian, out: *mut *mut c_char) -> SvqStatus {
    guard(|| {
        let h = handle(h, "hamiltonian")?;
        let out = out_arg(out, "out")?;
        *out = into_c_string(h.0.to_json());
        Ok(())
    })
}

/// Lanczos ground-state energy; `tol <= 0` selects the default tolerance.
///
/// # Safety
/// `h` must be a live handle and `energy` writable.
#[no_mangle]
pub unsafe extern "C" fn svq_exact_ground_energy(h: *const SvqHamiltonian, tol: f64, energy: *mut f64) -> SvqStatus {
    guard(|| {
        let h = handle(h, "hamiltonian")?;
        let energy = out_arg(energy, "energy")?;
        let mut opts = LanczosOptions::default();
        if tol > 0.0 {
            opts.tol = tol;
        }
        *energy = ground_state_lanczos(&h.0, &opts)?.energy;
        Ok(())
    })
}

/// Builds a problem from a TOML run configuration.
///
/// # Safety
/// `config_toml` must be a nul-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn svq_problem_new(config_toml: *const c_char, out: *mut *mut SvqProblem) -> SvqStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let cfg = VqeConfig::from_toml(str_arg(config_toml, "config")?)?;
        let problem = Problem::from_config(&cfg)?;
        *out = Box::into_raw(Box::new(SvqProblem(problem)));
        Ok(())
    })
}

/// # Safety
/// `p` must be null or a handle from `svq_problem_new`, freed at most once.
#[no_mangle]
pub unsafe extern "C" fn svq_problem_free(p: *mut SvqProblem) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// # Safety
/// `p` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn svq_problem_parameter_count(p: *const SvqProblem, out: *mut usize) -> SvqStatus {
    guard(|| {
        let p = handle(p, "problem")?;
        *out_arg(out, "out")? = p.0.parameter_count();
        Ok(())
    })
}

/// Energy at `params`. `eval_index` selects the sampling stream when the
/// configured estimator is sampled and is ignored otherwise.
///
/// # Safety
/// `p` must be a live handle, `params` must point to `len` values and
/// `energy` must be writable.
#[no_mangle]
pub unsafe extern "C" fn svq_problem_energy(
    p: *const SvqProblem,
    params: *const f64,
    len: usize,
    eval_index: u64,
    energy: *mut f64,
) -> SvqStatus {
    guard(|| {
        let p = &handle(p, "problem")?.0;
        let energy = out_arg(energy, "energy")?;
        if params.is_null() && len > 0 {
            return Err(Failure(SvqStatus::NullPointer, "params is null".into()));
        }
        let params = if len == 0 { &[][..] } else { std::slice::from_raw_parts(params, len) };
        if len != p.parameter_count() {
            return Err(Failure::invalid(format!(
                "expected {} parameters, got {len}",
                p.parameter_count()
            )));
        }
        *energy = match p.config.estimator.mode {
            EstimatorMode::Exact => p.exact_energy(params)?,
            EstimatorMode::Sampled => p.energy(params, eval_index as usize),
        };
        Ok(())
    })
}

/// Runs the configured optimization and returns the summary JSON and the
/// trace CSV. Either output pointer may be null when not wanted.
///
/// # Safety
/// `config_toml` must be a nul-terminated string; non-null outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn svq_run_vqe(
    config_toml: *const c_char,
    summary_json: *mut *mut c_char,
    trace_csv: *mut *mut c_char,
) -> SvqStatus {
    guard(|| {
        let cfg = VqeConfig::from_toml(str_arg(config_toml, "config")?)?;
        let run = run_vqe(&cfg)?;
        if let Some(out) = summary_json.as_mut() {
            *out = into_c_string(run.summary.to_json());
        }
        if let Some(out) = trace_csv.as_mut() {
            *out = into_c_string(run.trace.to_csv());
        }
        Ok(())
    })
}
