//! Dense state-vector simulation.
//!
//! Index convention: bit `b` of an amplitude index is the state of qubit `b`;
//! `|0>` has sigma^z eigenvalue +1.

mod kernels;
mod operator;
mod sampling;

use std::io::{self, Write};

use num_complex::Complex64;
use thiserror::Error;

use crate::circuit::{Circuit, CircuitError, Gate};
use crate::lattice::{Bitstring, Hamiltonian};
use crate::pauli::PauliTerm;

pub use operator::PauliOperator;
pub use sampling::{estimate_energy_sampled, estimate_energy_sampled_with, SampledEstimate};

/// Largest register the engine will allocate (2^26 amplitudes, 1 GiB).
pub const MAX_QUBITS: usize = 26;

/// Tolerance on the imaginary part of a Hermitian expectation value.
pub const HERMITIAN_TOL: f64 = 1e-10;

#[derive(Debug, Error, PartialEq)]
pub enum EngineError {
    #[error("dimension mismatch: expected {expected} qubits, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("{0} qubits exceeds the engine limit of {MAX_QUBITS}")]
    TooManyQubits(usize),
    #[error("amplitude count {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error("expectation has imaginary part {0:e}; operator is not Hermitian")]
    NotHermitian(f64),
    #[error("term {0} mixes axes; sampled estimation needs axis-uniform terms")]
    NotAxisUniform(String),
    #[error("at least one shot is required")]
    NoShots,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    nqubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// `|0...0>`.
    pub fn zero(nqubits: usize) -> Result<Self, EngineError> {
        if nqubits > MAX_QUBITS {
            return Err(EngineError::TooManyQubits(nqubits));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << nqubits];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(StateVector { nqubits, amps })
    }

    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self, EngineError> {
        let len = amps.len();
        if !len.is_power_of_two() {
            return Err(EngineError::NotPowerOfTwo(len));
        }
        let nqubits = len.trailing_zeros() as usize;
        if nqubits > MAX_QUBITS {
            return Err(EngineError::TooManyQubits(nqubits));
        }
        Ok(StateVector { nqubits, amps })
    }

    pub fn nqubits(&self) -> usize {
        self.nqubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Resets to the computational basis state `|index>`.
    pub fn set_basis(&mut self, index: usize) {
        self.amps.fill(Complex64::new(0.0, 0.0));
        self.amps[index] = Complex64::new(1.0, 0.0);
    }

    pub fn apply_gate(&mut self, gate: &Gate, params: &[f64]) {
        kernels::apply_gate(&mut self.amps, gate, params);
    }

    pub fn apply_circuit(&mut self, circuit: &Circuit, params: &[f64]) -> Result<(), EngineError> {
        if circuit.nqubits != self.nqubits {
            return Err(EngineError::DimensionMismatch {
                expected: self.nqubits,
                got: circuit.nqubits,
            });
        }
        circuit.validate()?;
        circuit.check_parameters(params)?;
        for g in &circuit.gates {
            kernels::apply_gate(&mut self.amps, g, params);
        }
        Ok(())
    }

    /// Raw dump: little-endian `(re, im)` f64 pairs in index order.
    pub fn write_dump<W: Write>(&self, mut w: W) -> io::Result<()> {
        for a in &self.amps {
            w.write_all(&a.re.to_le_bytes())?;
            w.write_all(&a.im.to_le_bytes())?;
        }
        Ok(())
    }
}

pub fn prepare_basis_state(nqubits: usize, bits: &Bitstring) -> Result<StateVector, EngineError> {
    if bits.len() != nqubits {
        return Err(EngineError::DimensionMismatch {
            expected: nqubits,
            got: bits.len(),
        });
    }
    let mut s = StateVector::zero(nqubits)?;
    s.set_basis(bits.index());
    Ok(s)
}

pub fn apply_circuit(
    mut state: StateVector,
    circuit: &Circuit,
    params: &[f64],
) -> Result<StateVector, EngineError> {
    state.apply_circuit(circuit, params)?;
    Ok(state)
}

fn check_dims(expected: usize, got: usize) -> Result<(), EngineError> {
    if expected != got {
        return Err(EngineError::DimensionMismatch { expected, got });
    }
    Ok(())
}

/// `<psi|H|psi>`, with the imaginary part checked against [`HERMITIAN_TOL`].
pub fn expectation(state: &StateVector, h: &Hamiltonian) -> Result<f64, EngineError> {
    check_dims(state.nqubits, h.nqubits)?;
    PauliOperator::from_hamiltonian(h).expectation(state)
}

/// `<psi|P|psi>` for a single product, coefficient included.
pub fn pauli_expectation(state: &StateVector, term: &PauliTerm) -> Complex64 {
    PauliOperator::from_terms(state.nqubits, std::slice::from_ref(term)).expectation_complex(state.amplitudes())
}

/// `<sum_i sigma_i^z>`.
pub fn magnetization_z(state: &StateVector) -> f64 {
    let n = state.nqubits as i64;
    state
        .amps
        .iter()
        .enumerate()
        .map(|(j, a)| a.norm_sqr() * (n - 2 * j.count_ones() as i64) as f64)
        .sum()
}

/// `|<a|b>|^2`.
pub fn overlap_sq(a: &StateVector, b: &StateVector) -> Result<f64, EngineError> {
    check_dims(a.nqubits, b.nqubits)?;
    let ip: Complex64 = a.amps.iter().zip(&b.amps).map(|(x, y)| x.conj() * y).sum();
    Ok(ip.norm_sqr())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ansatz::xy_ansatz;
    use crate::circuit::{circuit_unitary, Angle};
    use crate::lattice::{
        build_hamiltonian, build_lattice, neel_bitstring, product_state_energy, Boundary, CouplingModel,
        LatticeKind,
    };
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn ring(n: usize) -> Hamiltonian {
        let l = build_lattice(LatticeKind::Ring, &[n], Boundary::Periodic).unwrap();
        build_hamiltonian(&l, &CouplingModel::isotropic()).unwrap()
    }

    #[test]
    fn basis_states() {
        let s = prepare_basis_state(2, &"00".parse().unwrap()).unwrap();
        assert_eq!(s.amplitudes()[0], c(1.0, 0.0));
        let s = prepare_basis_state(1, &"1".parse().unwrap()).unwrap();
        assert_eq!(s.amplitudes(), &[c(0.0, 0.0), c(1.0, 0.0)]);
        let s = prepare_basis_state(4, &"1010".parse().unwrap()).unwrap();
        assert_eq!(s.amplitudes()[5], c(1.0, 0.0));
        assert_eq!(s.amplitudes().iter().filter(|a| a.norm() > 0.0).count(), 1);
        assert!(prepare_basis_state(3, &"10".parse().unwrap()).is_err());
    }

    #[test]
    fn x_on_zero_state() {
        let mut s = StateVector::zero(3).unwrap();
        s.apply_gate(&Gate::X(0), &[]);
        assert_eq!(s.amplitudes()[1], c(1.0, 0.0));
    }

    #[test]
    fn neel_and_singlet_energies() {
        let h = ring(4);
        let bits = "1010".parse().unwrap();
        let s = prepare_basis_state(4, &bits).unwrap();
        assert_eq!(expectation(&s, &h).unwrap(), -4.0);
        assert_eq!(product_state_energy(&h, &bits).unwrap(), -4.0);

        let l = build_lattice(LatticeKind::Chain, &[2], Boundary::Open).unwrap();
        let h2 = build_hamiltonian(&l, &CouplingModel::isotropic()).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        // (|01> - |10>)/sqrt2 with qubit 0 as the left character: indices 2 and 1.
        let singlet = StateVector::from_amplitudes(vec![c(0.0, 0.0), c(-r, 0.0), c(r, 0.0), c(0.0, 0.0)]).unwrap();
        assert!((expectation(&singlet, &h2).unwrap() + 3.0).abs() < 1e-14);
    }

    #[test]
    fn magnetization_examples() {
        let neel = prepare_basis_state(4, &"1010".parse().unwrap()).unwrap();
        assert_eq!(magnetization_z(&neel), 0.0);
        let all = prepare_basis_state(4, &"1111".parse().unwrap()).unwrap();
        assert_eq!(magnetization_z(&all), -4.0);
        assert_eq!(magnetization_z(&StateVector::zero(1).unwrap()), 1.0);
    }

    #[test]
    fn overlap_examples() {
        let a = prepare_basis_state(2, &"01".parse().unwrap()).unwrap();
        let b = prepare_basis_state(2, &"10".parse().unwrap()).unwrap();
        assert_eq!(overlap_sq(&a, &a).unwrap(), 1.0);
        assert_eq!(overlap_sq(&a, &b).unwrap(), 0.0);
        assert!(overlap_sq(&a, &StateVector::zero(3).unwrap()).is_err());
    }

    #[test]
    fn zero_angle_ansatz_keeps_basis_state() {
        let spec = xy_ansatz(5).unwrap();
        let circuit = spec.to_circuit(None).unwrap();
        let bits: Bitstring = "10100".parse().unwrap();
        let s0 = prepare_basis_state(5, &bits).unwrap();
        let s = apply_circuit(s0.clone(), &circuit, &vec![0.0; spec.parameter_count()]).unwrap();
        assert!((overlap_sq(&s, &s0).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unbound_and_mismatched_circuits() {
        let spec = xy_ansatz(3).unwrap();
        let circuit = spec.to_circuit(None).unwrap();
        let mut s = StateVector::zero(3).unwrap();
        assert!(matches!(
            s.apply_circuit(&circuit, &[0.0]),
            Err(EngineError::Circuit(CircuitError::Unbound { .. }))
        ));
        let mut s4 = StateVector::zero(4).unwrap();
        assert!(matches!(
            s4.apply_circuit(&circuit, &[0.0; 6]),
            Err(EngineError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn neel_is_product_state_energy_for_many_lattices() {
        let cases: [(LatticeKind, &[usize], Boundary); 4] = [
            (LatticeKind::Ring, &[6], Boundary::Periodic),
            (LatticeKind::Ladder, &[3, 2], Boundary::Open),
            (LatticeKind::Square, &[3, 3], Boundary::Open),
            (LatticeKind::Triangular, &[2, 3], Boundary::Open),
        ];
        for (kind, dims, b) in cases {
            let l = build_lattice(kind, dims, b).unwrap();
            let h = build_hamiltonian(&l, &CouplingModel::random(3)).unwrap();
            let bits = neel_bitstring(&l);
            let s = prepare_basis_state(l.sites, &bits).unwrap();
            let e = expectation(&s, &h).unwrap();
            assert!((e - product_state_energy(&h, &bits).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn state_dump_layout() {
        let s = prepare_basis_state(1, &"1".parse().unwrap()).unwrap();
        let mut buf = Vec::new();
        s.write_dump(&mut buf).unwrap();
        assert_eq!(buf.len(), 32);
        assert_eq!(&buf[16..24], &1.0f64.to_le_bytes());
    }

    fn arb_gate(n: usize) -> impl Strategy<Value = Gate> {
        let q = 0..n;
        prop_oneof![
            q.clone().prop_map(Gate::X),
            q.clone().prop_map(Gate::RxPlus),
            q.clone().prop_map(Gate::RxMinus),
            q.clone().prop_map(Gate::RyPlus),
            q.clone().prop_map(Gate::RyMinus),
            (q.clone(), -4.0f64..4.0).prop_map(|(q, a)| Gate::Rz(q, Angle::Literal(a))),
            (q.clone(), q)
                .prop_filter("distinct", |(a, b)| a != b)
                .prop_map(|(control, target)| Gate::Cnot { control, target }),
        ]
    }

    fn arb_circuit() -> impl Strategy<Value = Circuit> {
        (2usize..=6).prop_flat_map(|n| {
            proptest::collection::vec(arb_gate(n), 0..60).prop_map(move |gates| Circuit {
                nqubits: n,
                gates,
                slots: vec![],
            })
        })
    }

    fn random_state(n: usize, seed: u64) -> StateVector {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut amps: Vec<Complex64> = (0..1usize << n)
            .map(|_| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect();
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        amps.iter_mut().for_each(|a| *a /= norm);
        StateVector::from_amplitudes(amps).unwrap()
    }

    proptest! {
        #[test]
        fn engine_matches_dense_unitary(circuit in arb_circuit(), seed in any::<u64>()) {
            let s0 = random_state(circuit.nqubits, seed);
            let u = circuit_unitary(&circuit, &[]).unwrap();
            let expected = &u * nalgebra::DVector::from_column_slice(s0.amplitudes());
            let s = apply_circuit(s0, &circuit, &[]).unwrap();
            for (a, b) in s.amplitudes().iter().zip(expected.iter()) {
                prop_assert!((a - b).norm() <= 1e-10);
            }
            prop_assert!((s.norm() - 1.0).abs() <= 1e-12);
        }

        #[test]
        fn inverse_circuit_restores_state(circuit in arb_circuit(), seed in any::<u64>()) {
            let s0 = random_state(circuit.nqubits, seed);
            let s = apply_circuit(s0.clone(), &circuit, &[]).unwrap();
            let back = apply_circuit(s, &circuit.inverse(), &[]).unwrap();
            for (a, b) in back.amplitudes().iter().zip(s0.amplitudes()) {
                prop_assert!((a - b).norm() <= 1e-10);
            }
        }
    }
}
