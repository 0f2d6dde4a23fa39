//! Gate-level circuits over the fixed gate set
//! `{X, Rx(+-pi/2), Ry(+-pi/2), Rz, CNOT}`.

mod compile;
mod optimize;
mod unitary;

use std::fmt::{self, Write as _};

use thiserror::Error;

pub use compile::{compile_pauli_rotation, BASIS_CONVENTION};
pub use optimize::optimize_circuit;
pub use unitary::{
    circuit_unitary, pauli_exponential, pauli_matrix_dense, phase_aligned_distance, MAX_ORACLE_QUBITS,
};

use crate::format::g17;

#[derive(Debug, Error, PartialEq)]
pub enum CircuitError {
    #[error("cannot compile an empty pauli term")]
    EmptyTerm,
    #[error("gate {index} touches qubit {qubit} outside a {nqubits}-qubit register")]
    QubitOutOfRange {
        index: usize,
        qubit: usize,
        nqubits: usize,
    },
    #[error("gate {index} is a CNOT with control == target")]
    DegenerateCnot { index: usize },
    #[error("gate {index} references missing slot {slot}")]
    MissingSlot { index: usize, slot: usize },
    #[error("expected {expected} parameters, got {got}")]
    Unbound { expected: usize, got: usize },
    #[error("dense unitary limited to {max} qubits, circuit has {got}")]
    TooManyQubits { max: usize, got: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Rotation angle of an `Rz` gate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Angle {
    Literal(f64),
    /// `multiplier * params[slot]`.
    Slot { slot: usize, multiplier: f64 },
}

impl Angle {
    pub fn resolve(&self, params: &[f64]) -> f64 {
        match *self {
            Angle::Literal(a) => a,
            Angle::Slot { slot, multiplier } => multiplier * params[slot],
        }
    }

    fn negated(&self) -> Angle {
        match *self {
            Angle::Literal(a) => Angle::Literal(-a),
            Angle::Slot { slot, multiplier } => Angle::Slot {
                slot,
                multiplier: -multiplier,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    X(usize),
    /// `Rx(+pi/2)`
    RxPlus(usize),
    /// `Rx(-pi/2)`
    RxMinus(usize),
    /// `Ry(+pi/2)`
    RyPlus(usize),
    /// `Ry(-pi/2)`
    RyMinus(usize),
    Rz(usize, Angle),
    Cnot { control: usize, target: usize },
}

impl Gate {
    pub fn qubits(&self) -> GateQubits {
        match *self {
            Gate::X(q)
            | Gate::RxPlus(q)
            | Gate::RxMinus(q)
            | Gate::RyPlus(q)
            | Gate::RyMinus(q)
            | Gate::Rz(q, _) => GateQubits::One(q),
            Gate::Cnot { control, target } => GateQubits::Two(control, target),
        }
    }

    pub fn inverse(&self) -> Gate {
        match *self {
            Gate::X(q) => Gate::X(q),
            Gate::RxPlus(q) => Gate::RxMinus(q),
            Gate::RxMinus(q) => Gate::RxPlus(q),
            Gate::RyPlus(q) => Gate::RyMinus(q),
            Gate::RyMinus(q) => Gate::RyPlus(q),
            Gate::Rz(q, a) => Gate::Rz(q, a.negated()),
            g @ Gate::Cnot { .. } => g,
        }
    }

    pub fn is_cnot(&self) -> bool {
        matches!(self, Gate::Cnot { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GateQubits {
    One(usize),
    Two(usize, usize),
}

impl GateQubits {
    pub fn as_slice(&self) -> Vec<usize> {
        match *self {
            GateQubits::One(q) => vec![q],
            GateQubits::Two(a, b) => vec![a, b],
        }
    }

    pub fn contains(&self, q: usize) -> bool {
        match *self {
            GateQubits::One(a) => a == q,
            GateQubits::Two(a, b) => a == q || b == q,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    pub nqubits: usize,
    pub gates: Vec<Gate>,
    /// Parameter slot names, indexed by `Angle::Slot::slot`.
    pub slots: Vec<String>,
}

impl Circuit {
    pub fn new(nqubits: usize) -> Self {
        Circuit {
            nqubits,
            gates: Vec::new(),
            slots: Vec::new(),
        }
    }

    pub fn parameter_count(&self) -> usize {
        self.slots.len()
    }

    pub fn gate_count(&self) -> usize {
        self.gates.len()
    }

    pub fn cnot_count(&self) -> usize {
        self.gates.iter().filter(|g| g.is_cnot()).count()
    }

    pub fn depth(&self) -> usize {
        circuit_depth(self)
    }

    pub fn validate(&self) -> Result<(), CircuitError> {
        for (index, g) in self.gates.iter().enumerate() {
            for q in g.qubits().as_slice() {
                if q >= self.nqubits {
                    return Err(CircuitError::QubitOutOfRange {
                        index,
                        qubit: q,
                        nqubits: self.nqubits,
                    });
                }
            }
            match *g {
                Gate::Cnot { control, target } if control == target => {
                    return Err(CircuitError::DegenerateCnot { index })
                }
                Gate::Rz(_, Angle::Slot { slot, .. }) if slot >= self.slots.len() => {
                    return Err(CircuitError::MissingSlot { index, slot })
                }
                _ => {}
            }
        }
        Ok(())
    }

    pub fn check_parameters(&self, params: &[f64]) -> Result<(), CircuitError> {
        if params.len() != self.slots.len() {
            return Err(CircuitError::Unbound {
                expected: self.slots.len(),
                got: params.len(),
            });
        }
        Ok(())
    }

    /// Reversed gate order with every gate inverted.
    pub fn inverse(&self) -> Circuit {
        Circuit {
            nqubits: self.nqubits,
            gates: self.gates.iter().rev().map(Gate::inverse).collect(),
            slots: self.slots.clone(),
        }
    }

    /// Replaces every slot reference by its bound literal value.
    pub fn bind(&self, params: &[f64]) -> Result<Circuit, CircuitError> {
        self.check_parameters(params)?;
        Ok(Circuit {
            nqubits: self.nqubits,
            gates: self
                .gates
                .iter()
                .map(|g| match *g {
                    Gate::Rz(q, a) => Gate::Rz(q, Angle::Literal(a.resolve(params))),
                    other => other,
                })
                .collect(),
            slots: Vec::new(),
        })
    }

    /// Line-oriented text form (`QUBITS n`, `SLOTS ...`, one gate per line).
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "QUBITS {}", self.nqubits).unwrap();
        out.push_str("SLOTS");
        for s in &self.slots {
            out.push(' ');
            out.push_str(s);
        }
        out.push('\n');
        for g in &self.gates {
            match *g {
                Gate::X(q) => writeln!(out, "X {q}"),
                Gate::RxPlus(q) => writeln!(out, "RX+ {q}"),
                Gate::RxMinus(q) => writeln!(out, "RX- {q}"),
                Gate::RyPlus(q) => writeln!(out, "RY+ {q}"),
                Gate::RyMinus(q) => writeln!(out, "RY- {q}"),
                Gate::Rz(q, Angle::Literal(a)) => writeln!(out, "RZ {q} {}", g17(a)),
                Gate::Rz(q, Angle::Slot { slot, multiplier }) => {
                    writeln!(out, "RZ {q} {}*{}", g17(multiplier), self.slots[slot])
                }
                Gate::Cnot { control, target } => writeln!(out, "CNOT {control} {target}"),
            }
            .unwrap();
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Circuit, CircuitError> {
        let mut nqubits = None;
        let mut slots: Option<Vec<String>> = None;
        let mut gates = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let err = |message: String| CircuitError::Parse { line, message };
            let mut tok = raw.split_whitespace();
            let Some(op) = tok.next() else { continue };
            let args: Vec<&str> = tok.collect();
            let qubit = |s: &str| {
                s.parse::<usize>()
                    .map_err(|_| err(format!("bad qubit index {s:?}")))
            };
            let want = |n: usize| {
                if args.len() == n {
                    Ok(())
                } else {
                    Err(err(format!("{op} takes {n} arguments")))
                }
            };
            match op {
                "QUBITS" => {
                    want(1)?;
                    nqubits = Some(qubit(args[0])?);
                }
                "SLOTS" => slots = Some(args.iter().map(|s| s.to_string()).collect()),
                "X" | "RX+" | "RX-" | "RY+" | "RY-" => {
                    want(1)?;
                    let q = qubit(args[0])?;
                    gates.push(match op {
                        "X" => Gate::X(q),
                        "RX+" => Gate::RxPlus(q),
                        "RX-" => Gate::RxMinus(q),
                        "RY+" => Gate::RyPlus(q),
                        _ => Gate::RyMinus(q),
                    });
                }
                "RZ" => {
                    want(2)?;
                    let q = qubit(args[0])?;
                    let angle = match args[1].split_once('*') {
                        Some((m, name)) => {
                            let multiplier: f64 = m
                                .parse()
                                .map_err(|_| err(format!("bad multiplier {m:?}")))?;
                            let names = slots
                                .as_ref()
                                .ok_or_else(|| err("RZ before SLOTS header".into()))?;
                            let slot = names
                                .iter()
                                .position(|s| s == name)
                                .ok_or_else(|| err(format!("unknown slot {name:?}")))?;
                            Angle::Slot { slot, multiplier }
                        }
                        None => Angle::Literal(
                            args[1]
                                .parse()
                                .map_err(|_| err(format!("bad angle {:?}", args[1])))?,
                        ),
                    };
                    gates.push(Gate::Rz(q, angle));
                }
                "CNOT" => {
                    want(2)?;
                    gates.push(Gate::Cnot {
                        control: qubit(args[0])?,
                        target: qubit(args[1])?,
                    });
                }
                other => return Err(err(format!("unknown gate {other:?}"))),
            }
        }
        let circuit = Circuit {
            nqubits: nqubits.ok_or(CircuitError::Parse {
                line: 0,
                message: "missing QUBITS header".into(),
            })?,
            gates,
            slots: slots.unwrap_or_default(),
        };
        circuit.validate()?;
        Ok(circuit)
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Number of layers in a greedy left-to-right schedule where gates on disjoint
/// qubits share a layer.
pub fn circuit_depth(circuit: &Circuit) -> usize {
    let mut front = vec![0usize; circuit.nqubits];
    let mut depth = 0;
    for g in &circuit.gates {
        let qs = g.qubits().as_slice();
        let layer = qs.iter().map(|&q| front[q]).max().unwrap_or(0) + 1;
        for q in qs {
            front[q] = layer;
        }
        depth = depth.max(layer);
    }
    depth
}
