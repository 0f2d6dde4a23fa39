use super::{Angle, CircuitError, Gate};
use crate::pauli::{Axis, PauliTerm};

/// Basis-change assignment used by [`compile_pauli_rotation`], as recorded in run manifests.
pub const BASIS_CONVENTION: &str = "x: RY- before, RY+ after; y: RX+ before, RX- after";

/// Gate sequence for `exp(-i theta P)` where `theta = params[slot]` and `P` is the
/// term's Pauli product with the coefficient dropped.
///
/// Layout: basis changes, CNOT ladder from every other qubit into the highest
/// site, `Rz(2 theta)` on that site, the mirrored ladder, inverse basis changes.
pub fn compile_pauli_rotation(term: &PauliTerm, slot: usize) -> Result<Vec<Gate>, CircuitError> {
    if term.is_empty() {
        return Err(CircuitError::EmptyTerm);
    }
    let target = term.max_site();
    let mut gates = Vec::with_capacity(4 * term.len() + 1);

    // Ry(-pi/2) maps Z to X under conjugation, Rx(+pi/2) maps Z to Y.
    for (q, axis) in term.factors() {
        match axis {
            Axis::X => gates.push(Gate::RyMinus(q)),
            Axis::Y => gates.push(Gate::RxPlus(q)),
            Axis::Z => {}
        }
    }
    let controls: Vec<usize> = term.sites().iter().copied().filter(|&q| q != target).collect();
    for &c in &controls {
        gates.push(Gate::Cnot { control: c, target });
    }
    gates.push(Gate::Rz(
        target,
        Angle::Slot {
            slot,
            multiplier: 2.0,
        },
    ));
    for &c in controls.iter().rev() {
        gates.push(Gate::Cnot { control: c, target });
    }
    for (q, axis) in term.factors() {
        match axis {
            Axis::X => gates.push(Gate::RyPlus(q)),
            Axis::Y => gates.push(Gate::RxMinus(q)),
            Axis::Z => {}
        }
    }
    Ok(gates)
}
