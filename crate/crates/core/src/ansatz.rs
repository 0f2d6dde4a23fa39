//! Operator sequences for the XY, full two-body and layered Hamiltonian-variational
//! ansätze, plus parameter initialization.
//!
//! Generator formulas use 1-indexed sites `1..=N`; site `k` is qubit `k - 1`.

use std::fmt;
use std::str::FromStr;

use rand::distr::{Distribution, Open01};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{compile_pauli_rotation, Circuit, Gate};
use crate::lattice::{Bitstring, Boundary, Lattice, LatticeKind};
use crate::pauli::{Axis, PauliTerm};

#[derive(Debug, Error, PartialEq)]
pub enum AnsatzError {
    #[error("ansatz needs at least {min} qubits, got {got}")]
    TooFewQubits { min: usize, got: usize },
    #[error("layer count must be at least 1")]
    NoLayers,
    #[error("the hamiltonian-variational ansatz is defined for one-dimensional lattices only, got {0}")]
    UnsupportedLattice(LatticeKind),
    #[error("random parameter initialization needs a seed")]
    MissingSeed,
    #[error("parameter count must be at least 1")]
    NoParameters,
    #[error("unknown ansatz family {0:?}")]
    UnknownFamily(String),
    #[error("initial state has {got} bits for {expected} qubits")]
    InitialStateLength { expected: usize, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnsatzFamily {
    Xy,
    TwoBody,
    HamiltonianVariational,
}

impl AnsatzFamily {
    pub fn name(self) -> &'static str {
        match self {
            AnsatzFamily::Xy => "xy",
            AnsatzFamily::TwoBody => "two_body",
            AnsatzFamily::HamiltonianVariational => "hamiltonian_variational",
        }
    }
}

impl fmt::Display for AnsatzFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AnsatzFamily {
    type Err = AnsatzError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "xy" => Ok(AnsatzFamily::Xy),
            "two_body" => Ok(AnsatzFamily::TwoBody),
            "hamiltonian_variational" | "hva" => Ok(AnsatzFamily::HamiltonianVariational),
            other => Err(AnsatzError::UnknownFamily(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Generator {
    /// Unit-coefficient Pauli product `P` in `exp(-i theta P)`.
    pub term: PauliTerm,
    pub slot: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnsatzSpec {
    pub family: AnsatzFamily,
    pub nqubits: usize,
    pub layers: Option<usize>,
    pub generators: Vec<Generator>,
}

impl AnsatzSpec {
    pub fn parameter_count(&self) -> usize {
        self.generators.len()
    }

    pub fn slot_names(&self) -> Vec<String> {
        self.generators.iter().map(|g| g.slot.clone()).collect()
    }

    /// Unoptimized circuit: an X on every set bit of `initial`, then one compiled
    /// rotation per generator in order.
    pub fn to_circuit(&self, initial: Option<&Bitstring>) -> Result<Circuit, AnsatzError> {
        let mut c = Circuit::new(self.nqubits);
        c.slots = self.slot_names();
        if let Some(bits) = initial {
            if bits.0.len() != self.nqubits {
                return Err(AnsatzError::InitialStateLength {
                    expected: self.nqubits,
                    got: bits.0.len(),
                });
            }
            c.gates
                .extend(bits.0.iter().enumerate().filter(|(_, &b)| b).map(|(q, _)| Gate::X(q)));
        }
        for (slot, g) in self.generators.iter().enumerate() {
            c.gates
                .extend(compile_pauli_rotation(&g.term, slot).expect("generators are non-empty"));
        }
        Ok(c)
    }

    pub fn to_json(&self) -> String {
        let generators: Vec<_> = self
            .generators
            .iter()
            .map(|g| {
                serde_json::json!({
                    "axes": g.term.axes_string(),
                    "sites": g.term.sites(),
                    "slot": g.slot,
                })
            })
            .collect();
        let doc = serde_json::json!({
            "family": self.family.name(),
            "N": self.nqubits,
            "p": self.layers,
            "parameters": self.parameter_count(),
            "generators": generators,
        });
        serde_json::to_string_pretty(&doc).expect("json")
    }
}

/// Builds a generator from 1-indexed `(site, axis)` factors, appending `sigma_N^z`
/// when no factor sits on site `n`.
fn generator(n: usize, factors: &[(usize, Axis)], slot: String) -> Generator {
    let mut f: Vec<(usize, Axis)> = factors.iter().map(|&(s, a)| (s - 1, a)).collect();
    if !factors.iter().any(|&(s, _)| s == n) {
        f.push((n - 1, Axis::Z));
    }
    Generator {
        term: PauliTerm::new(&f, 1.0).expect("distinct sites"),
        slot,
    }
}

/// Pairs `(k, l)`, `k > l`, with `l` from `n-1` down to 1 and `k` from `n` down to `l+1`.
fn pair_order(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (1..n).rev().flat_map(move |l| ((l + 1)..=n).rev().map(move |k| (k, l)))
}

pub fn xy_ansatz(n: usize) -> Result<AnsatzSpec, AnsatzError> {
    if n < 2 {
        return Err(AnsatzError::TooFewQubits { min: 2, got: n });
    }
    let mut generators = Vec::with_capacity(n * (n - 1));
    for (k, l) in pair_order(n) {
        generators.push(generator(n, &[(k, Axis::Y), (l, Axis::X)], format!("t{k}_{l}")));
    }
    for (k, l) in pair_order(n) {
        generators.push(generator(n, &[(l, Axis::Y), (k, Axis::X)], format!("t{l}_{k}")));
    }
    Ok(AnsatzSpec {
        family: AnsatzFamily::Xy,
        nqubits: n,
        layers: None,
        generators,
    })
}

pub fn two_body_ansatz(n: usize) -> Result<AnsatzSpec, AnsatzError> {
    if n < 2 {
        return Err(AnsatzError::TooFewQubits { min: 2, got: n });
    }
    let mut generators = Vec::with_capacity(9 * n * (n - 1) / 2);
    for (k, l) in pair_order(n) {
        for beta in Axis::ALL {
            for alpha in Axis::ALL {
                let slot = format!("t{k}_{l}_{}{}", beta.as_char(), alpha.as_char());
                generators.push(generator(n, &[(k, beta), (l, alpha)], slot));
            }
        }
    }
    Ok(AnsatzSpec {
        family: AnsatzFamily::TwoBody,
        nqubits: n,
        layers: None,
        generators,
    })
}

/// `p` layers over nearest-neighbour bonds `(k, k+1)`; periodic boundaries add
/// the closing bond `(N, 1)`, which at `N = 2` repeats the single pair.
pub fn hamiltonian_variational_ansatz(
    n: usize,
    p: usize,
    boundary: Boundary,
) -> Result<AnsatzSpec, AnsatzError> {
    if n < 2 {
        return Err(AnsatzError::TooFewQubits { min: 2, got: n });
    }
    if p == 0 {
        return Err(AnsatzError::NoLayers);
    }
    let bonds = match boundary {
        Boundary::Periodic => n,
        Boundary::Open => n - 1,
    };
    let mut generators = Vec::with_capacity(3 * p * bonds);
    for layer in 1..=p {
        for k in 1..=bonds {
            let next = k % n + 1;
            for alpha in Axis::ALL {
                let slot = format!("p{layer}_t{k}_{}", alpha.as_char());
                generators.push(generator(n, &[(k, alpha), (next, alpha)], slot));
            }
        }
    }
    Ok(AnsatzSpec {
        family: AnsatzFamily::HamiltonianVariational,
        nqubits: n,
        layers: Some(p),
        generators,
    })
}

/// Dispatches on family; the layered ansatz accepts only chains and rings.
pub fn ansatz_for_lattice(
    family: AnsatzFamily,
    lattice: &Lattice,
    layers: usize,
) -> Result<AnsatzSpec, AnsatzError> {
    match family {
        AnsatzFamily::Xy => xy_ansatz(lattice.sites),
        AnsatzFamily::TwoBody => two_body_ansatz(lattice.sites),
        AnsatzFamily::HamiltonianVariational => {
            if !lattice.kind.is_one_dimensional() {
                return Err(AnsatzError::UnsupportedLattice(lattice.kind));
            }
            hamiltonian_variational_ansatz(lattice.sites, layers, lattice.boundary)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitMode {
    Zeros,
    Random,
}

/// Zeros, or i.i.d. uniform on the open interval `(0, 2 pi)` from a ChaCha20 stream.
pub fn init_parameters(p: usize, mode: InitMode, seed: Option<u64>) -> Result<Vec<f64>, AnsatzError> {
    if p == 0 {
        return Err(AnsatzError::NoParameters);
    }
    match mode {
        InitMode::Zeros => Ok(vec![0.0; p]),
        InitMode::Random => {
            let seed = seed.ok_or(AnsatzError::MissingSeed)?;
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            Ok((0..p)
                .map(|_| {
                    let u: f64 = Open01.sample(&mut rng);
                    std::f64::consts::TAU * u
                })
                .collect())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{circuit_unitary, phase_aligned_distance};
    use nalgebra::DMatrix;

    fn one_indexed(g: &Generator) -> Vec<(usize, char)> {
        g.term.factors().map(|(s, a)| (s + 1, a.as_char())).collect()
    }

    #[test]
    fn xy_four_qubit_order() {
        let a = xy_ansatz(4).unwrap();
        assert_eq!(a.parameter_count(), 12);
        let slots: Vec<_> = a.generators.iter().take(3).map(|g| g.slot.as_str()).collect();
        assert_eq!(slots, ["t4_3", "t4_2", "t3_2"]);
        // theta_32 carries sigma_4^z; theta_43 and theta_42 already touch site 4.
        assert_eq!(one_indexed(&a.generators[0]), [(3, 'x'), (4, 'y')]);
        assert_eq!(one_indexed(&a.generators[2]), [(2, 'x'), (3, 'y'), (4, 'z')]);
        // The second block swaps the roles of k and l.
        assert_eq!(a.generators[6].slot, "t3_4");
        assert_eq!(one_indexed(&a.generators[6]), [(3, 'y'), (4, 'x')]);
    }

    #[test]
    fn xy_two_qubits() {
        let a = xy_ansatz(2).unwrap();
        let gens: Vec<_> = a.generators.iter().map(one_indexed).collect();
        assert_eq!(gens, [vec![(1, 'x'), (2, 'y')], vec![(1, 'y'), (2, 'x')]]);
        assert_eq!(xy_ansatz(1), Err(AnsatzError::TooFewQubits { min: 2, got: 1 }));
    }

    #[test]
    fn parameter_count_formulas() {
        for n in 2..=12 {
            assert_eq!(xy_ansatz(n).unwrap().parameter_count(), n * (n - 1));
            assert_eq!(two_body_ansatz(n).unwrap().parameter_count(), 9 * n * (n - 1) / 2);
            for p in 1..=5 {
                let h = hamiltonian_variational_ansatz(n, p, Boundary::Periodic).unwrap();
                assert_eq!(h.parameter_count(), 3 * p * n);
                h.to_circuit(None).unwrap().validate().unwrap();
                let h = hamiltonian_variational_ansatz(n, p, Boundary::Open).unwrap();
                assert_eq!(h.parameter_count(), 3 * p * (n - 1));
            }
        }
        assert_eq!(
            hamiltonian_variational_ansatz(20, 5, Boundary::Periodic)
                .unwrap()
                .parameter_count(),
            300
        );
    }

    #[test]
    fn xy_generators_are_two_body_generators() {
        for n in 2..=8 {
            let all: Vec<_> = two_body_ansatz(n).unwrap().generators.into_iter().map(|g| g.term).collect();
            for g in xy_ansatz(n).unwrap().generators {
                assert!(all.contains(&g.term), "{}", g.term);
            }
        }
    }

    #[test]
    fn phase_qubit_rule() {
        for n in 3..=7 {
            let specs = [
                xy_ansatz(n).unwrap(),
                two_body_ansatz(n).unwrap(),
                hamiltonian_variational_ansatz(n, 2, Boundary::Periodic).unwrap(),
            ];
            for spec in specs {
                for g in &spec.generators {
                    // Every generator touches qubit N-1; a third factor is always sigma^z there.
                    assert_eq!(g.term.max_site(), n - 1);
                    if g.term.len() == 3 {
                        assert_eq!(g.term.axis_at(n - 1), Some(Axis::Z));
                    }
                }
            }
        }
    }

    #[test]
    fn hva_bond_order() {
        let h = hamiltonian_variational_ansatz(4, 1, Boundary::Periodic).unwrap();
        let first: Vec<_> = h.generators.iter().take(3).map(one_indexed).collect();
        assert_eq!(
            first,
            [
                vec![(1, 'x'), (2, 'x'), (4, 'z')],
                vec![(1, 'y'), (2, 'y'), (4, 'z')],
                vec![(1, 'z'), (2, 'z'), (4, 'z')],
            ]
        );
        assert_eq!(one_indexed(&h.generators[11]), [(1, 'z'), (4, 'z')]);
        assert_eq!(h.generators[11].slot, "p1_t4_z");
    }

    #[test]
    fn hva_rejects_two_dimensional_lattices() {
        let sq = crate::lattice::build_lattice(LatticeKind::Square, &[2, 2], Boundary::Open).unwrap();
        assert_eq!(
            ansatz_for_lattice(AnsatzFamily::HamiltonianVariational, &sq, 1),
            Err(AnsatzError::UnsupportedLattice(LatticeKind::Square))
        );
    }

    #[test]
    fn zero_parameters_give_identity() {
        for n in 2..=5 {
            let mut specs = vec![xy_ansatz(n).unwrap(), two_body_ansatz(n).unwrap()];
            if n >= 3 {
                specs.push(hamiltonian_variational_ansatz(n, 2, Boundary::Periodic).unwrap());
            }
            for spec in specs {
                let c = spec.to_circuit(None).unwrap();
                let u = circuit_unitary(&c, &vec![0.0; spec.parameter_count()]).unwrap();
                let dim = 1 << n;
                assert!(phase_aligned_distance(&u, &DMatrix::identity(dim, dim)) <= 1e-10);
            }
        }
    }

    #[test]
    fn init_modes() {
        assert_eq!(init_parameters(12, InitMode::Zeros, None).unwrap(), vec![0.0; 12]);
        let a = init_parameters(50, InitMode::Random, Some(9)).unwrap();
        assert_eq!(a, init_parameters(50, InitMode::Random, Some(9)).unwrap());
        assert_ne!(a, init_parameters(50, InitMode::Random, Some(10)).unwrap());
        assert!(a.iter().all(|&x| x > 0.0 && x < std::f64::consts::TAU));
        assert_eq!(init_parameters(3, InitMode::Random, None), Err(AnsatzError::MissingSeed));
        assert_eq!(init_parameters(0, InitMode::Zeros, None), Err(AnsatzError::NoParameters));
    }

    #[test]
    fn initial_x_layer() {
        let spec = xy_ansatz(4).unwrap();
        let bits: Bitstring = "1010".parse().unwrap();
        let c = spec.to_circuit(Some(&bits)).unwrap();
        assert_eq!(c.gates[..2], [Gate::X(0), Gate::X(2)]);
        assert_eq!(c.parameter_count(), 12);
    }
}
