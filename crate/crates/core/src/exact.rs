//! Ground-state baselines: thick-restart Lanczos, a dense eigensolver oracle and
//! the infinite-ring Bethe constant.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use thiserror::Error;

use crate::engine::{PauliOperator, StateVector, MAX_QUBITS};
use crate::lattice::Hamiltonian;

/// Ground-state energy per spin of the infinite isotropic ring in Pauli units.
pub const BETHE_PER_SITE: f64 = 1.0 - 4.0 * std::f64::consts::LN_2;

pub fn bethe_reference() -> f64 {
    BETHE_PER_SITE
}

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITER: usize = 5000;
pub const DEFAULT_MAX_KRYLOV: usize = 300;
pub const DEFAULT_SEED: u64 = 0x1a2c_05e5;
/// Largest register the dense oracle accepts.
pub const MAX_DENSE_QUBITS: usize = 12;
/// Basis vectors are capped so the Krylov basis stays under this many bytes.
const KRYLOV_MEMORY_BYTES: usize = 1 << 30;
/// Ritz vectors kept across a thick restart.
const KEEP_ON_RESTART: usize = 10;

#[derive(Debug, Error)]
pub enum ExactError {
    #[error("{got} qubits exceeds the limit of {max}")]
    TooLarge { max: usize, got: usize },
    #[error("tolerance must be positive")]
    BadTolerance,
    #[error("lanczos did not reach residual {tol:e} in {} iterations (best energy {}, residual {:e})",
        best.iterations, best.energy, best.residual)]
    NotConverged { tol: f64, best: Box<GroundStateResult> },
}

#[derive(Debug, Clone)]
pub struct GroundStateResult {
    pub energy: f64,
    /// `||H v - E v||` of the returned Ritz vector.
    pub residual: f64,
    /// Number of `H v` products.
    pub iterations: usize,
    /// Lowest Ritz value after each iteration.
    pub ritz_trace: Vec<f64>,
    pub eigenvector: Option<StateVector>,
}

#[derive(Debug, Clone, Copy)]
pub struct LanczosOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub max_krylov: usize,
    pub seed: u64,
    pub want_vector: bool,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        LanczosOptions {
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
            max_krylov: DEFAULT_MAX_KRYLOV,
            seed: DEFAULT_SEED,
            want_vector: false,
        }
    }
}

fn dot(a: &[C], b: &[C]) -> C {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[C]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn axpy(alpha: C, x: &[C], y: &mut [C]) {
    y.iter_mut().zip(x).for_each(|(yi, xi)| *yi += alpha * xi);
}

/// Sorted eigenpairs of the leading `m x m` block of `s`.
fn ritz_pairs(s: &DMatrix<C>, m: usize) -> (Vec<f64>, DMatrix<C>) {
    let block = s.view((0, 0), (m, m)).into_owned();
    let eig = SymmetricEigen::new(block);
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(m, m, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Linear combination `sum_i coeffs[i] * basis[i]`.
fn combine(basis: &[Vec<C>], coeffs: impl Iterator<Item = C>) -> Vec<C> {
    let mut out = vec![C::new(0.0, 0.0); basis[0].len()];
    for (v, c) in basis.iter().zip(coeffs) {
        axpy(c, v, &mut out);
    }
    out
}

/// Lowest eigenpair by Lanczos with full two-pass reorthogonalization and thick
/// restart. `H v` is matrix-free over the Hamiltonian's Pauli terms.
pub fn ground_state_lanczos(h: &Hamiltonian, opts: &LanczosOptions) -> Result<GroundStateResult, ExactError> {
    if h.nqubits > MAX_QUBITS {
        return Err(ExactError::TooLarge {
            max: MAX_QUBITS,
            got: h.nqubits,
        });
    }
    if !(opts.tol > 0.0) {
        return Err(ExactError::BadTolerance);
    }
    let op = PauliOperator::from_hamiltonian(h);
    let dim = 1usize << h.nqubits;
    let mem_cap = (KRYLOV_MEMORY_BYTES / (16 * dim)).max(KEEP_ON_RESTART + 5);
    let max_krylov = opts.max_krylov.min(mem_cap).min(dim).max(2);
    let keep = KEEP_ON_RESTART.min(max_krylov - 1);

    let mut rng = ChaCha20Rng::seed_from_u64(opts.seed);
    let mut v0: Vec<C> = (0..dim)
        .map(|_| C::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
        .collect();
    let n0 = norm(&v0);
    v0.iter_mut().for_each(|x| *x /= n0);

    let mut basis: Vec<Vec<C>> = vec![v0];
    let mut s = DMatrix::<C>::zeros(max_krylov, max_krylov);
    let mut w = vec![C::new(0.0, 0.0); dim];
    let mut trace = Vec::new();
    let mut iterations = 0;
    let mut best: Option<GroundStateResult> = None;

    let finish = |basis: &[Vec<C>], y: &DMatrix<C>, theta: f64, iterations: usize, trace: &[f64]| {
        let x = combine(basis, (0..basis.len()).map(|r| y[(r, 0)]));
        let nx = norm(&x);
        let x: Vec<C> = x.into_iter().map(|v| v / nx).collect();
        let mut hx = vec![C::new(0.0, 0.0); x.len()];
        op.apply(&x, &mut hx);
        axpy(C::new(-theta, 0.0), &x, &mut hx);
        GroundStateResult {
            energy: theta,
            residual: norm(&hx),
            iterations,
            ritz_trace: trace.to_vec(),
            eigenvector: Some(StateVector::from_amplitudes(x).expect("power-of-two length")),
        }
    };

    while iterations < opts.max_iter {
        let j = basis.len() - 1;
        op.apply(&basis[j], &mut w);
        iterations += 1;
        for _pass in 0..2 {
            for (i, v) in basis.iter().enumerate() {
                let c = dot(v, &w);
                s[(i, j)] += c;
                axpy(-c, v, &mut w);
            }
        }
        // Upper triangle is authoritative; mirror it so the block is Hermitian.
        for i in 0..j {
            s[(j, i)] = s[(i, j)].conj();
        }
        s[(j, j)] = C::new(s[(j, j)].re, 0.0);
        let beta = norm(&w);
        let m = j + 1;
        let (theta, y) = ritz_pairs(&s, m);
        trace.push(theta[0]);
        let estimate = beta * y[(m - 1, 0)].norm();
        let invariant = beta <= 1e-14 * theta[0].abs().max(1.0);

        if estimate <= opts.tol || invariant || iterations == opts.max_iter {
            let r = finish(&basis, &y, theta[0], iterations, &trace);
            if r.residual <= opts.tol {
                return Ok(strip(r, opts.want_vector));
            }
            if best.as_ref().is_none_or(|b| r.residual < b.residual) {
                best = Some(r);
            }
            if invariant {
                break;
            }
        }
        if iterations == opts.max_iter {
            break;
        }

        let next: Vec<C> = w.iter().map(|x| x / beta).collect();
        if m == max_krylov {
            let k = keep.min(m);
            let kept: Vec<Vec<C>> = (0..k)
                .map(|c| combine(&basis, (0..m).map(|r| y[(r, c)])))
                .collect();
            basis = kept;
            s.fill(C::new(0.0, 0.0));
            for (i, &t) in theta.iter().take(k).enumerate() {
                s[(i, i)] = C::new(t, 0.0);
            }
        }
        basis.push(next);
    }
    let best = best.unwrap_or_else(|| {
        let m = basis.len() - 1;
        let (theta, y) = ritz_pairs(&s, m.max(1));
        finish(&basis[..m.max(1)], &y, theta[0], iterations, &trace)
    });
    Err(ExactError::NotConverged {
        tol: opts.tol,
        best: Box::new(strip(best, opts.want_vector)),
    })
}

fn strip(mut r: GroundStateResult, want_vector: bool) -> GroundStateResult {
    if !want_vector {
        r.eigenvector = None;
    }
    r
}

/// Dense Hamiltonian matrix assembled term by term from Pauli matrix elements.
pub fn dense_hamiltonian(h: &Hamiltonian) -> Result<DMatrix<C>, ExactError> {
    if h.nqubits > MAX_DENSE_QUBITS {
        return Err(ExactError::TooLarge {
            max: MAX_DENSE_QUBITS,
            got: h.nqubits,
        });
    }
    let dim = 1usize << h.nqubits;
    let mut m = DMatrix::<C>::zeros(dim, dim);
    for t in &h.terms {
        let mut flip = 0usize;
        let mut local = Vec::with_capacity(t.len());
        for (q, a) in t.factors() {
            if a != crate::pauli::Axis::Z {
                flip |= 1 << q;
            }
            local.push((q, a));
        }
        for col in 0..dim {
            // Product of single-qubit matrix elements <row_q| sigma^a |col_q>.
            let mut amp = C::new(t.coefficient, 0.0);
            for &(q, a) in &local {
                let bit = (col >> q) & 1;
                amp *= match (a, bit) {
                    (crate::pauli::Axis::X, _) => C::new(1.0, 0.0),
                    (crate::pauli::Axis::Y, 0) => C::new(0.0, 1.0),
                    (crate::pauli::Axis::Y, _) => C::new(0.0, -1.0),
                    (crate::pauli::Axis::Z, 0) => C::new(1.0, 0.0),
                    (crate::pauli::Axis::Z, _) => C::new(-1.0, 0.0),
                };
            }
            m[(col ^ flip, col)] += amp;
        }
    }
    Ok(m)
}

/// All eigenvalues of a Hermitian matrix in ascending order; uses the real
/// symmetric solver when every entry is real.
pub fn symmetric_eigenvalues(m: &DMatrix<C>) -> Vec<f64> {
    let mut values: Vec<f64> = if m.iter().all(|x| x.im == 0.0) {
        let re = m.map(|x| x.re);
        SymmetricEigen::new(re).eigenvalues.iter().copied().collect()
    } else {
        SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().collect()
    };
    values.sort_by(f64::total_cmp);
    values
}

pub fn dense_ground_energy(h: &Hamiltonian) -> Result<f64, ExactError> {
    Ok(symmetric_eigenvalues(&dense_hamiltonian(h)?)[0])
}
