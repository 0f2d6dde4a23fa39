//! Peephole cleanup: inverse-pair cancellation, literal `Rz` merging and
//! zero-angle removal, looking past gates that commute.
//!
//! Surviving gates keep their relative order, so depth can only go down.

use std::f64::consts::TAU;

use super::{Angle, Circuit, Gate, GateQubits};

const ZERO_ANGLE_TOL: f64 = 1e-12;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Action {
    /// Diagonal in the computational basis.
    Diagonal,
    /// Diagonal in the X basis.
    XLike,
    General,
}

fn action_on(g: &Gate, q: usize) -> Option<Action> {
    match *g {
        Gate::Rz(p, _) if p == q => Some(Action::Diagonal),
        Gate::X(p) | Gate::RxPlus(p) | Gate::RxMinus(p) if p == q => Some(Action::XLike),
        Gate::RyPlus(p) | Gate::RyMinus(p) if p == q => Some(Action::General),
        Gate::Cnot { control, .. } if control == q => Some(Action::Diagonal),
        Gate::Cnot { target, .. } if target == q => Some(Action::XLike),
        _ => None,
    }
}

fn commutes(a: &Gate, b: &Gate) -> bool {
    b.qubits().as_slice().into_iter().all(|q| match (action_on(a, q), action_on(b, q)) {
        (None, _) | (_, None) => true,
        (Some(x), Some(y)) => x == y && x != Action::General,
    })
}

fn cancels(a: &Gate, b: &Gate) -> bool {
    match (*a, *b) {
        (Gate::X(p), Gate::X(q)) => p == q,
        (Gate::RxPlus(p), Gate::RxMinus(q)) | (Gate::RxMinus(p), Gate::RxPlus(q)) => p == q,
        (Gate::RyPlus(p), Gate::RyMinus(q)) | (Gate::RyMinus(p), Gate::RyPlus(q)) => p == q,
        (Gate::Cnot { .. }, Gate::Cnot { .. }) => a == b,
        _ => false,
    }
}

fn is_zero_angle(a: f64) -> bool {
    let r = a.rem_euclid(TAU);
    r <= ZERO_ANGLE_TOL || TAU - r <= ZERO_ANGLE_TOL
}

fn single_pass(gates: &[Gate]) -> Vec<Gate> {
    let mut out: Vec<Gate> = Vec::with_capacity(gates.len());
    'next: for &g in gates {
        if let Gate::Rz(_, Angle::Literal(a)) = g {
            if is_zero_angle(a) {
                continue;
            }
        }
        for i in (0..out.len()).rev() {
            let prev = out[i];
            if cancels(&prev, &g) {
                out.remove(i);
                continue 'next;
            }
            if let (Gate::Rz(p, Angle::Literal(a)), Gate::Rz(q, Angle::Literal(b))) = (prev, g) {
                if p == q {
                    let sum = a + b;
                    if is_zero_angle(sum) {
                        out.remove(i);
                    } else {
                        out[i] = Gate::Rz(p, Angle::Literal(sum));
                    }
                    continue 'next;
                }
            }
            let disjoint = match g.qubits() {
                GateQubits::One(q) => !prev.qubits().contains(q),
                GateQubits::Two(a, b) => !prev.qubits().contains(a) && !prev.qubits().contains(b),
            };
            if !disjoint && !commutes(&prev, &g) {
                break;
            }
        }
        out.push(g);
    }
    out
}

/// Applies the cleanup rules until the gate list stops changing.
pub fn optimize_circuit(circuit: &Circuit) -> Circuit {
    let mut gates = circuit.gates.clone();
    loop {
        let next = single_pass(&gates);
        if next == gates {
            break;
        }
        gates = next;
    }
    Circuit {
        nqubits: circuit.nqubits,
        gates,
        slots: circuit.slots.clone(),
    }
}
