use std::collections::BTreeMap;

use num_complex::Complex64 as C;
use rayon::prelude::*;

use super::{EngineError, StateVector, HERMITIAN_TOL};
use crate::lattice::Hamiltonian;
use crate::pauli::PauliTerm;

/// Fixed partition for reductions so sums do not depend on the worker count.
const REDUCE_CHUNK: usize = 1 << 12;

/// A sum of Pauli products grouped by flip mask, for matrix-free products and
/// expectation values.
#[derive(Debug, Clone)]
pub struct PauliOperator {
    nqubits: usize,
    /// `(flip, [(coefficient * i^n_y, sign mask)])`
    groups: Vec<(usize, Vec<(C, usize)>)>,
}

fn parity(x: usize) -> f64 {
    if x.count_ones() & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

impl PauliOperator {
    pub fn from_terms(nqubits: usize, terms: &[PauliTerm]) -> Self {
        let mut groups: BTreeMap<usize, Vec<(C, usize)>> = BTreeMap::new();
        for t in terms {
            let m = t.masks();
            let phase = C::new(0.0, 1.0).powu(m.n_y);
            groups.entry(m.flip).or_default().push((phase * t.coefficient, m.sign));
        }
        PauliOperator {
            nqubits,
            groups: groups.into_iter().collect(),
        }
    }

    pub fn from_hamiltonian(h: &Hamiltonian) -> Self {
        Self::from_terms(h.nqubits, &h.terms)
    }

    pub fn nqubits(&self) -> usize {
        self.nqubits
    }

    /// `(O x)[i]`.
    #[inline]
    fn row(&self, x: &[C], i: usize) -> C {
        let mut acc = C::new(0.0, 0.0);
        for (flip, terms) in &self.groups {
            let j = i ^ flip;
            let w: C = terms.iter().map(|&(c, sign)| c * parity(j & sign)).sum();
            acc += w * x[j];
        }
        acc
    }

    /// `y = O x`.
    pub fn apply(&self, x: &[C], y: &mut [C]) {
        assert_eq!(x.len(), 1 << self.nqubits);
        assert_eq!(y.len(), x.len());
        y.par_chunks_mut(REDUCE_CHUNK).enumerate().for_each(|(ci, out)| {
            let base = ci * REDUCE_CHUNK;
            for (k, v) in out.iter_mut().enumerate() {
                *v = self.row(x, base + k);
            }
        });
    }

    /// `<x|O|x>` without forming `O x`.
    pub fn expectation_complex(&self, x: &[C]) -> C {
        assert_eq!(x.len(), 1 << self.nqubits);
        let partials: Vec<C> = x
            .par_chunks(REDUCE_CHUNK)
            .enumerate()
            .map(|(ci, chunk)| {
                let base = ci * REDUCE_CHUNK;
                chunk
                    .iter()
                    .enumerate()
                    .map(|(k, xi)| xi.conj() * self.row(x, base + k))
                    .sum()
            })
            .collect();
        partials.into_iter().sum()
    }

    pub fn expectation(&self, state: &StateVector) -> Result<f64, EngineError> {
        if state.nqubits() != self.nqubits {
            return Err(EngineError::DimensionMismatch {
                expected: self.nqubits,
                got: state.nqubits(),
            });
        }
        let e = self.expectation_complex(state.amplitudes());
        if e.im.abs() > HERMITIAN_TOL {
            return Err(EngineError::NotHermitian(e.im));
        }
        Ok(e.re)
    }

    /// Dense matrix, row-major, for small registers.
    pub fn to_dense(&self) -> Vec<Vec<C>> {
        let dim = 1usize << self.nqubits;
        let mut e = vec![C::new(0.0, 0.0); dim];
        let mut cols = Vec::with_capacity(dim);
        let mut y = vec![C::new(0.0, 0.0); dim];
        for j in 0..dim {
            e[j] = C::new(1.0, 0.0);
            self.apply(&e, &mut y);
            cols.push(y.clone());
            e[j] = C::new(0.0, 0.0);
        }
        (0..dim).map(|r| (0..dim).map(|c| cols[c][r]).collect()).collect()
    }
}
