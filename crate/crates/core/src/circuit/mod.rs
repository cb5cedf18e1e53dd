//! Circuit representation, ASAP layering and the small-scale unitary oracle.

mod gate;
mod layering;
mod unitary;

pub use gate::{Gate, GateKind};
pub use layering::Layering;
pub(crate) use unitary::step_classical;
pub use unitary::{
    apply_gate, apply_x, basis_state, circuits_equivalent, run_classical, unitary, Equivalence, EquivalenceMethod,
    Matrix, StateVector, MAX_STATEVECTOR_QUBITS, MAX_UNITARY_QUBITS,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CircuitError {
    #[error("unknown gate `{0}`")]
    UnknownGate(String),
    #[error("{kind} takes {expected} operand(s), found {found}")]
    Arity {
        kind: GateKind,
        expected: usize,
        found: usize,
    },
    #[error("{kind} has duplicate operand q{qubit}")]
    DuplicateOperand { kind: GateKind, qubit: usize },
    #[error("qubit index {qubit} out of range for a {num_qubits}-qubit circuit")]
    QubitOutOfRange { qubit: usize, num_qubits: usize },
    #[error("circuit must have at least one qubit")]
    NoQubits,
    #[error("qubit count mismatch: {left} vs {right}")]
    QubitCountMismatch { left: usize, right: usize },
    #[error("{num_qubits} qubits exceeds the simulation limit of {limit}")]
    TooLarge { num_qubits: usize, limit: usize },
    #[error("invalid measurement map: {0}")]
    Measurement(String),
}

/// An ordered gate list over `num_qubits` wires.
///
/// `measured` lists, per classical bit, the qubit it reads; `None` means the
/// circuit declares no measurement and consumers measure every qubit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circuit {
    name: String,
    num_qubits: usize,
    gates: Vec<Gate>,
    measured: Option<Vec<usize>>,
}

impl Circuit {
    pub fn new(num_qubits: usize) -> Result<Self, CircuitError> {
        if num_qubits == 0 {
            return Err(CircuitError::NoQubits);
        }
        Ok(Self {
            name: "circuit".to_string(),
            num_qubits,
            gates: Vec::new(),
            measured: None,
        })
    }

    pub fn from_gates(num_qubits: usize, gates: Vec<Gate>) -> Result<Self, CircuitError> {
        let mut c = Self::new(num_qubits)?;
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn set_name(&mut self, name: impl Into<String>) {
        self.name = name.into();
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn gate_count(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn push(&mut self, gate: Gate) -> Result<(), CircuitError> {
        if let Some(&q) = gate.operands().iter().find(|&&q| q >= self.num_qubits) {
            return Err(CircuitError::QubitOutOfRange {
                qubit: q,
                num_qubits: self.num_qubits,
            });
        }
        self.gates.push(gate);
        Ok(())
    }

    pub fn measured(&self) -> Option<&[usize]> {
        self.measured.as_deref()
    }

    pub fn set_measured(&mut self, measured: Option<Vec<usize>>) -> Result<(), CircuitError> {
        if let Some(bits) = &measured {
            if bits.is_empty() {
                return Err(CircuitError::Measurement("no measured qubits".into()));
            }
            for (i, &q) in bits.iter().enumerate() {
                if q >= self.num_qubits {
                    return Err(CircuitError::QubitOutOfRange {
                        qubit: q,
                        num_qubits: self.num_qubits,
                    });
                }
                if bits[..i].contains(&q) {
                    return Err(CircuitError::Measurement(format!("q{q} measured twice")));
                }
            }
        }
        self.measured = measured;
        Ok(())
    }

    /// Measured qubits in classical-bit order, defaulting to every qubit.
    pub fn output_qubits(&self) -> Vec<usize> {
        self.measured.clone().unwrap_or_else(|| (0..self.num_qubits).collect())
    }

    pub fn layering(&self) -> Layering {
        Layering::asap(self)
    }

    pub fn depth(&self) -> usize {
        self.layering().depth()
    }

    /// Reverse order, every gate replaced by its adjoint.
    pub fn invert(&self) -> Circuit {
        Circuit {
            name: self.name.clone(),
            num_qubits: self.num_qubits,
            gates: self.gates.iter().rev().map(Gate::adjoint).collect(),
            measured: self.measured.clone(),
        }
    }

    /// `self` followed by `other`.
    pub fn compose(&self, other: &Circuit) -> Result<Circuit, CircuitError> {
        if self.num_qubits != other.num_qubits {
            return Err(CircuitError::QubitCountMismatch {
                left: self.num_qubits,
                right: other.num_qubits,
            });
        }
        let mut gates = self.gates.clone();
        gates.extend(other.gates.iter().cloned());
        Ok(Circuit {
            name: self.name.clone(),
            num_qubits: self.num_qubits,
            gates,
            measured: other.measured.clone().or_else(|| self.measured.clone()),
        })
    }

    /// Layer-major order: gates sorted by ASAP layer, ties broken by their
    /// lowest operand. Per-wire order is unchanged, so the unitary is too.
    pub fn canonicalize(&self) -> Circuit {
        let order = self.canonical_order();
        Circuit {
            name: self.name.clone(),
            num_qubits: self.num_qubits,
            gates: order.into_iter().map(|i| self.gates[i].clone()).collect(),
            measured: self.measured.clone(),
        }
    }

    /// Permutation of gate indices that yields the canonical order.
    pub fn canonical_order(&self) -> Vec<usize> {
        let layering = self.layering();
        let mut order: Vec<usize> = (0..self.gates.len()).collect();
        order.sort_by_key(|&i| (layering.layer_of(i), self.gates[i].min_operand()));
        order
    }

    /// Gates touching each wire, in program order.
    pub fn wire_sequences(&self) -> Vec<Vec<&Gate>> {
        let mut wires = vec![Vec::new(); self.num_qubits];
        for g in &self.gates {
            for &q in g.operands() {
                wires[q].push(g);
            }
        }
        wires
    }

    pub fn gates_per_qubit(&self) -> Vec<usize> {
        let mut counts = vec![0; self.num_qubits];
        for g in &self.gates {
            for &q in g.operands() {
                counts[q] += 1;
            }
        }
        counts
    }

    pub(crate) fn replace_gates(&self, gates: Vec<Gate>) -> Circuit {
        Circuit {
            name: self.name.clone(),
            num_qubits: self.num_qubits,
            gates,
            measured: self.measured.clone(),
        }
    }
}
