//! Circuit IR over CNOT, Rz and H, with parity-map extraction and a
//! classical basis-state simulator that tracks the accumulated phase.

mod qasm;

use std::f64::consts::TAU;
use std::fmt;

use rand::Rng;
use thiserror::Error;

pub use qasm::{emit_qasm, parse_qasm, QasmError};

use crate::arch::Architecture;
use crate::gf2::{BitVec, ParityMatrix, RowOp};
use crate::rng::seeded;

/// Tolerance used when comparing phases.
pub const PHASE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    Cnot { control: usize, target: usize },
    Rz { angle: f64, qubit: usize },
    H { qubit: usize },
}

impl Gate {
    pub fn name(&self) -> &'static str {
        match self {
            Gate::Cnot { .. } => "cx",
            Gate::Rz { .. } => "rz",
            Gate::H { .. } => "h",
        }
    }

    fn max_qubit(&self) -> usize {
        match *self {
            Gate::Cnot { control, target } => control.max(target),
            Gate::Rz { qubit, .. } | Gate::H { qubit } => qubit,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CircuitError {
    #[error("qubit {qubit} out of range for {n} qubits")]
    QubitOutOfRange { qubit: usize, n: usize },
    #[error("cx control and target are both qubit {0}")]
    SameQubits(usize),
    #[error("rz angle must be finite, got {0}")]
    NonFiniteAngle(f64),
    #[error("gate {gate} at position {index} is not supported here")]
    UnsupportedGate { gate: &'static str, index: usize },
    #[error("input has {found} qubits, expected {expected}")]
    WidthMismatch { expected: usize, found: usize },
    #[error("a random CNOT needs at least 2 qubits")]
    TooFewQubits,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    n: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n: usize) -> Self {
        Self { n, gates: Vec::new() }
    }

    pub fn from_gates(n: usize, gates: Vec<Gate>) -> Result<Self, CircuitError> {
        let mut c = Self::new(n);
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn push(&mut self, gate: Gate) -> Result<(), CircuitError> {
        if gate.max_qubit() >= self.n {
            return Err(CircuitError::QubitOutOfRange {
                qubit: gate.max_qubit(),
                n: self.n,
            });
        }
        match gate {
            Gate::Cnot { control, target } if control == target => return Err(CircuitError::SameQubits(control)),
            Gate::Rz { angle, .. } if !angle.is_finite() => return Err(CircuitError::NonFiniteAngle(angle)),
            _ => {}
        }
        self.gates.push(gate);
        Ok(())
    }

    pub fn cnot(&mut self, control: usize, target: usize) -> Result<(), CircuitError> {
        self.push(Gate::Cnot { control, target })
    }

    pub fn rz(&mut self, angle: f64, qubit: usize) -> Result<(), CircuitError> {
        self.push(Gate::Rz { angle, qubit })
    }

    pub fn h(&mut self, qubit: usize) -> Result<(), CircuitError> {
        self.push(Gate::H { qubit })
    }

    pub fn extend(&mut self, other: &Circuit) -> Result<(), CircuitError> {
        if other.n != self.n {
            return Err(CircuitError::WidthMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        self.gates.extend_from_slice(&other.gates);
        Ok(())
    }

    /// Renames qubit `q` to `map[q]`; `map` must be a permutation of `0..n`.
    pub fn relabel(&self, map: &[usize]) -> Circuit {
        assert_eq!(map.len(), self.n, "relabelling needs one entry per qubit");
        let gates = self
            .gates
            .iter()
            .map(|g| match *g {
                Gate::Cnot { control, target } => Gate::Cnot {
                    control: map[control],
                    target: map[target],
                },
                Gate::Rz { angle, qubit } => Gate::Rz {
                    angle,
                    qubit: map[qubit],
                },
                Gate::H { qubit } => Gate::H { qubit: map[qubit] },
            })
            .collect();
        Circuit { n: self.n, gates }
    }

    pub fn count_cnots(&self) -> usize {
        count_cnots(self)
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&emit_qasm(self))
    }
}

/// Parity map of a CNOT-only circuit: each gate adds the control row into the target row.
pub fn from_circuit(c: &Circuit) -> Result<ParityMatrix, CircuitError> {
    let mut m = ParityMatrix::identity(c.n);
    for (index, g) in c.gates.iter().enumerate() {
        match *g {
            Gate::Cnot { control, target } => m.add_row_unchecked(control, target),
            ref other => {
                return Err(CircuitError::UnsupportedGate {
                    gate: other.name(),
                    index,
                })
            }
        }
    }
    Ok(m)
}

/// Circuit realising an elimination trace: the trace's row operations as CNOTs, in reverse.
pub fn trace_to_circuit(ops: &[RowOp], n: usize) -> Circuit {
    let gates = ops
        .iter()
        .rev()
        .map(|op| Gate::Cnot {
            control: op.src,
            target: op.tgt,
        })
        .collect();
    let c = Circuit { n, gates };
    debug_assert!(c.gates.iter().all(|g| g.max_qubit() < n));
    c
}

/// Runs a CNOT/Rz circuit on a computational basis state, returning the
/// output state and the accumulated phase in `[0, 2π)`.
pub fn simulate(c: &Circuit, x: &BitVec) -> Result<(BitVec, f64), CircuitError> {
    if x.len() != c.n {
        return Err(CircuitError::WidthMismatch {
            expected: c.n,
            found: x.len(),
        });
    }
    let mut state = x.clone();
    let mut phase = 0.0;
    for (index, g) in c.gates.iter().enumerate() {
        match *g {
            Gate::Cnot { control, target } => {
                if state.get(control) {
                    state.flip(target);
                }
            }
            Gate::Rz { angle, qubit } => {
                if state.get(qubit) {
                    phase += angle;
                }
            }
            Gate::H { .. } => return Err(CircuitError::UnsupportedGate { gate: "h", index }),
        }
    }
    Ok((state, phase.rem_euclid(TAU)))
}

/// Distance between two phases on the circle.
pub fn phase_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

/// `count` CNOTs with (control, target) uniform over ordered pairs of distinct qubits.
pub fn random_cnot_circuit(n: usize, count: usize, seed: u64) -> Result<Circuit, CircuitError> {
    if n < 2 && count > 0 {
        return Err(CircuitError::TooFewQubits);
    }
    let mut rng = seeded(seed);
    let mut c = Circuit::new(n);
    for _ in 0..count {
        let control = rng.gen_range(0..n);
        let mut target = rng.gen_range(0..n - 1);
        if target >= control {
            target += 1;
        }
        c.gates.push(Gate::Cnot { control, target });
    }
    Ok(c)
}

/// Random CNOT+Rz circuit; each gate is an Rz with probability `rz_fraction`.
/// Angles are multiples of π/4 plus an irrational offset so merging is exercised
/// without everything collapsing to zero.
pub fn random_cnot_rz_circuit(n: usize, count: usize, rz_fraction: f64, seed: u64) -> Result<Circuit, CircuitError> {
    if n < 2 && count > 0 {
        return Err(CircuitError::TooFewQubits);
    }
    let mut rng = seeded(seed);
    let mut c = Circuit::new(n);
    for _ in 0..count {
        if rng.gen_bool(rz_fraction) {
            let angle = f64::from(rng.gen_range(1..8u8)) * std::f64::consts::FRAC_PI_4 + rng.gen_range(-0.5..0.5);
            c.gates.push(Gate::Rz {
                angle,
                qubit: rng.gen_range(0..n),
            });
        } else {
            let control = rng.gen_range(0..n);
            let mut target = rng.gen_range(0..n - 1);
            if target >= control {
                target += 1;
            }
            c.gates.push(Gate::Cnot { control, target });
        }
    }
    Ok(c)
}

pub fn count_cnots(c: &Circuit) -> usize {
    c.gates.iter().filter(|g| matches!(g, Gate::Cnot { .. })).count()
}

/// True when every CNOT acts on an edge of `a`.
pub fn is_mapped(c: &Circuit, a: &Architecture) -> bool {
    c.n <= a.n()
        && c.gates.iter().all(|g| match *g {
            Gate::Cnot { control, target } => a.has_edge(control, target),
            _ => true,
        })
}
