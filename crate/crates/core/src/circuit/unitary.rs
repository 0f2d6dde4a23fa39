//! Dense reference unitaries for small registers. Deliberately independent of the
//! state-vector engine so the two can check each other.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{Circuit, CircuitError, Gate};
use crate::pauli::{Axis, PauliTerm};

pub const MAX_ORACLE_QUBITS: usize = 10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

fn single_qubit_matrix(g: &Gate, params: &[f64]) -> [[Complex64; 2]; 2] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let c = Complex64::new(h, 0.0);
    let s = Complex64::new(h, 0.0);
    match *g {
        Gate::X(_) => [[ZERO, ONE], [ONE, ZERO]],
        Gate::RxPlus(_) => [[c, -I * s], [-I * s, c]],
        Gate::RxMinus(_) => [[c, I * s], [I * s, c]],
        Gate::RyPlus(_) => [[c, -s], [s, c]],
        Gate::RyMinus(_) => [[c, s], [-s, c]],
        Gate::Rz(_, a) => {
            let phi = a.resolve(params);
            [
                [Complex64::from_polar(1.0, -phi / 2.0), ZERO],
                [ZERO, Complex64::from_polar(1.0, phi / 2.0)],
            ]
        }
        Gate::Cnot { .. } => unreachable!("two-qubit gate"),
    }
}

/// The full `2^n x 2^n` unitary of a circuit under little-endian indexing.
pub fn circuit_unitary(circuit: &Circuit, params: &[f64]) -> Result<DMatrix<Complex64>, CircuitError> {
    if circuit.nqubits > MAX_ORACLE_QUBITS {
        return Err(CircuitError::TooManyQubits {
            max: MAX_ORACLE_QUBITS,
            got: circuit.nqubits,
        });
    }
    circuit.validate()?;
    circuit.check_parameters(params)?;
    let dim = 1usize << circuit.nqubits;
    let mut u = DMatrix::<Complex64>::identity(dim, dim);
    for g in &circuit.gates {
        match *g {
            Gate::Cnot { control, target } => {
                let (cb, tb) = (1usize << control, 1usize << target);
                for row in 0..dim {
                    if row & cb != 0 && row & tb == 0 {
                        u.swap_rows(row, row | tb);
                    }
                }
            }
            _ => {
                let q = match g.qubits() {
                    super::GateQubits::One(q) => q,
                    super::GateQubits::Two(..) => unreachable!(),
                };
                let m = single_qubit_matrix(g, params);
                let bit = 1usize << q;
                for r0 in (0..dim).filter(|r| r & bit == 0) {
                    let r1 = r0 | bit;
                    for col in 0..dim {
                        let (a, b) = (u[(r0, col)], u[(r1, col)]);
                        u[(r0, col)] = m[0][0] * a + m[0][1] * b;
                        u[(r1, col)] = m[1][0] * a + m[1][1] * b;
                    }
                }
            }
        }
    }
    Ok(u)
}

fn pauli_matrix(axis: Option<Axis>) -> DMatrix<Complex64> {
    let entries = match axis {
        None => [ONE, ZERO, ZERO, ONE],
        Some(Axis::X) => [ZERO, ONE, ONE, ZERO],
        Some(Axis::Y) => [ZERO, -I, I, ZERO],
        Some(Axis::Z) => [ONE, ZERO, ZERO, -ONE],
    };
    DMatrix::from_row_slice(2, 2, &entries)
}

/// Dense Pauli product on `n` qubits (coefficient ignored), built by Kronecker products.
pub fn pauli_matrix_dense(term: &PauliTerm, n: usize) -> DMatrix<Complex64> {
    // Highest qubit is the leftmost Kronecker factor.
    let mut p = DMatrix::from_element(1, 1, ONE);
    for q in (0..n).rev() {
        p = p.kronecker(&pauli_matrix(term.axis_at(q)));
    }
    p
}

/// `exp(-i theta P) = cos(theta) I - i sin(theta) P`.
pub fn pauli_exponential(term: &PauliTerm, n: usize, theta: f64) -> DMatrix<Complex64> {
    let p = pauli_matrix_dense(term, n);
    let dim = 1usize << n;
    DMatrix::<Complex64>::identity(dim, dim) * Complex64::new(theta.cos(), 0.0)
        - p * (I * theta.sin())
}

/// Largest elementwise deviation between `a` and `b` after removing a global phase,
/// fixed at the entry where `b` is largest.
pub fn phase_aligned_distance(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    assert_eq!(a.shape(), b.shape());
    let (k, _) = b
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.norm().total_cmp(&y.1.norm()))
        .expect("non-empty matrix");
    let phase = if a[k].norm() > 0.0 {
        let r = a[k] / b[k];
        r / r.norm()
    } else {
        ONE
    };
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - phase * y).norm())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Angle;

    #[test]
    fn cnot_is_little_endian() {
        let c = Circuit {
            nqubits: 2,
            gates: vec![Gate::Cnot {
                control: 0,
                target: 1,
            }],
            slots: vec![],
        };
        let u = circuit_unitary(&c, &[]).unwrap();
        // |01> (index 1, qubit 0 set) -> |11> (index 3).
        assert_eq!(u[(3, 1)], ONE);
        assert_eq!(u[(1, 3)], ONE);
        assert_eq!(u[(0, 0)], ONE);
        assert_eq!(u[(2, 2)], ONE);
    }

    #[test]
    fn half_pi_rotations_are_inverse_pairs() {
        for (a, b) in [
            (Gate::RxPlus(0), Gate::RxMinus(0)),
            (Gate::RyPlus(0), Gate::RyMinus(0)),
        ] {
            let c = Circuit {
                nqubits: 1,
                gates: vec![a, b],
                slots: vec![],
            };
            let u = circuit_unitary(&c, &[]).unwrap();
            assert!(phase_aligned_distance(&u, &DMatrix::identity(2, 2)) < 1e-15);
        }
    }

    #[test]
    fn rz_matches_z_exponential() {
        let z = PauliTerm::from_parts("z", &[0], 1.0).unwrap();
        let c = Circuit {
            nqubits: 1,
            gates: vec![Gate::Rz(0, Angle::Literal(0.8))],
            slots: vec![],
        };
        let u = circuit_unitary(&c, &[]).unwrap();
        assert!(phase_aligned_distance(&u, &pauli_exponential(&z, 1, 0.4)) < 1e-15);
    }

    #[test]
    fn pauli_product_places_qubit_zero_lowest() {
        let x0 = PauliTerm::from_parts("x", &[0], 1.0).unwrap();
        let p = pauli_matrix_dense(&x0, 2);
        assert_eq!(p[(1, 0)], ONE);
        assert_eq!(p[(3, 2)], ONE);
        assert_eq!(p[(2, 0)], ZERO);
    }

    #[test]
    fn rejects_large_registers() {
        let c = Circuit::new(MAX_ORACLE_QUBITS + 1);
        assert!(matches!(
            circuit_unitary(&c, &[]),
            Err(CircuitError::TooManyQubits { .. })
        ));
    }
}
