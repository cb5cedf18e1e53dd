use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::CircuitError;

/// Fixed, parameter-free gate kinds.
///
/// Operand order for the controlled kinds is controls first, target last.
/// Matrices are laid out with operand `i` as bit `i` of the local index, so
/// for `CX` (control, target) the control is the least significant bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GateKind {
    X,
    Y,
    Z,
    H,
    S,
    Sdg,
    T,
    Tdg,
    CX,
    CCX,
    Swap,
}

impl GateKind {
    pub const ALL: [GateKind; 11] = [
        GateKind::X,
        GateKind::Y,
        GateKind::Z,
        GateKind::H,
        GateKind::S,
        GateKind::Sdg,
        GateKind::T,
        GateKind::Tdg,
        GateKind::CX,
        GateKind::CCX,
        GateKind::Swap,
    ];

    pub fn arity(self) -> usize {
        match self {
            GateKind::CX | GateKind::Swap => 2,
            GateKind::CCX => 3,
            _ => 1,
        }
    }

    pub fn adjoint(self) -> GateKind {
        match self {
            GateKind::S => GateKind::Sdg,
            GateKind::Sdg => GateKind::S,
            GateKind::T => GateKind::Tdg,
            GateKind::Tdg => GateKind::T,
            other => other,
        }
    }

    /// Lowercase OpenQASM name.
    pub fn name(self) -> &'static str {
        match self {
            GateKind::X => "x",
            GateKind::Y => "y",
            GateKind::Z => "z",
            GateKind::H => "h",
            GateKind::S => "s",
            GateKind::Sdg => "sdg",
            GateKind::T => "t",
            GateKind::Tdg => "tdg",
            GateKind::CX => "cx",
            GateKind::CCX => "ccx",
            GateKind::Swap => "swap",
        }
    }

    /// True when the gate maps computational basis states to basis states
    /// (up to a phase). Everything except `H`.
    pub fn is_classical(self) -> bool {
        self != GateKind::H
    }

    /// Image of a local basis index under a classical gate.
    ///
    /// Returns `None` for `H`.
    pub fn permute_local(self, local: usize) -> Option<usize> {
        Some(match self {
            GateKind::X | GateKind::Y => local ^ 1,
            GateKind::Z | GateKind::S | GateKind::Sdg | GateKind::T | GateKind::Tdg => local,
            GateKind::CX => {
                if local & 1 == 1 {
                    local ^ 0b10
                } else {
                    local
                }
            }
            GateKind::CCX => {
                if local & 0b11 == 0b11 {
                    local ^ 0b100
                } else {
                    local
                }
            }
            GateKind::Swap => ((local & 1) << 1) | ((local >> 1) & 1),
            GateKind::H => return None,
        })
    }

    /// Row-major unitary of dimension `2^arity`.
    pub fn matrix(self) -> Vec<Complex64> {
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let phase = |re: f64, im: f64| Complex64::new(re, im);
        match self {
            GateKind::X => vec![zero, one, one, zero],
            GateKind::Y => vec![zero, -i, i, zero],
            GateKind::Z => vec![one, zero, zero, -one],
            GateKind::H => vec![
                Complex64::new(r, 0.0),
                Complex64::new(r, 0.0),
                Complex64::new(r, 0.0),
                Complex64::new(-r, 0.0),
            ],
            GateKind::S => vec![one, zero, zero, i],
            GateKind::Sdg => vec![one, zero, zero, -i],
            GateKind::T => vec![one, zero, zero, phase(r, r)],
            GateKind::Tdg => vec![one, zero, zero, phase(r, -r)],
            GateKind::CX | GateKind::CCX | GateKind::Swap => {
                let dim = 1usize << self.arity();
                let mut m = vec![zero; dim * dim];
                for col in 0..dim {
                    let row = self.permute_local(col).expect("classical kind");
                    m[row * dim + col] = one;
                }
                m
            }
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GateKind {
    type Err = CircuitError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        GateKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| CircuitError::UnknownGate(s.to_string()))
    }
}

/// A gate applied to concrete qubit indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Gate {
    kind: GateKind,
    operands: Vec<usize>,
}

impl Gate {
    pub fn new(kind: GateKind, operands: Vec<usize>) -> Result<Self, CircuitError> {
        if operands.len() != kind.arity() {
            return Err(CircuitError::Arity {
                kind,
                expected: kind.arity(),
                found: operands.len(),
            });
        }
        for (i, a) in operands.iter().enumerate() {
            if operands[..i].contains(a) {
                return Err(CircuitError::DuplicateOperand { kind, qubit: *a });
            }
        }
        Ok(Self { kind, operands })
    }

    pub fn x(q: usize) -> Self {
        Self {
            kind: GateKind::X,
            operands: vec![q],
        }
    }

    pub fn h(q: usize) -> Self {
        Self {
            kind: GateKind::H,
            operands: vec![q],
        }
    }

    /// Panics if `control == target`.
    pub fn cx(control: usize, target: usize) -> Self {
        Self::new(GateKind::CX, vec![control, target]).expect("distinct cx operands")
    }

    /// Panics on repeated operands.
    pub fn ccx(c0: usize, c1: usize, target: usize) -> Self {
        Self::new(GateKind::CCX, vec![c0, c1, target]).expect("distinct ccx operands")
    }

    /// Single-qubit gate of any one-qubit kind. Panics on multi-qubit kinds.
    pub fn single(kind: GateKind, q: usize) -> Self {
        Self::new(kind, vec![q]).expect("single-qubit kind")
    }

    pub fn kind(&self) -> GateKind {
        self.kind
    }

    pub fn operands(&self) -> &[usize] {
        &self.operands
    }

    pub fn touches(&self, q: usize) -> bool {
        self.operands.contains(&q)
    }

    pub fn min_operand(&self) -> usize {
        *self.operands.iter().min().expect("gates have operands")
    }

    pub fn adjoint(&self) -> Gate {
        Gate {
            kind: self.kind.adjoint(),
            operands: self.operands.clone(),
        }
    }

    /// True when `other` undoes `self` on the same wires.
    ///
    /// `SWAP` is symmetric in its operands, so either operand order counts.
    pub fn is_inverse_of(&self, other: &Gate) -> bool {
        if self.kind.adjoint() != other.kind {
            return false;
        }
        if self.operands == other.operands {
            return true;
        }
        self.kind == GateKind::Swap && self.operands[0] == other.operands[1] && self.operands[1] == other.operands[0]
    }

    /// Same gate with every operand passed through `map`.
    pub fn remap(&self, mut map: impl FnMut(usize) -> usize) -> Gate {
        Gate {
            kind: self.kind,
            operands: self.operands.iter().map(|&q| map(q)).collect(),
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind)?;
        for (i, q) in self.operands.iter().enumerate() {
            let sep = if i == 0 { " " } else { "," };
            write!(f, "{sep}q{q}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dagger(m: &[Complex64], dim: usize) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); dim * dim];
        for r in 0..dim {
            for c in 0..dim {
                out[c * dim + r] = m[r * dim + c].conj();
            }
        }
        out
    }

    #[test]
    fn every_kind_is_unitary() {
        for kind in GateKind::ALL {
            let dim = 1 << kind.arity();
            let m = kind.matrix();
            let md = dagger(&m, dim);
            for r in 0..dim {
                for c in 0..dim {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for k in 0..dim {
                        acc += m[r * dim + k] * md[k * dim + c];
                    }
                    let expect = if r == c { 1.0 } else { 0.0 };
                    assert!((acc - expect).norm() < 1e-12, "{kind} not unitary");
                }
            }
        }
    }

    #[test]
    fn adjoint_matrix_is_conjugate_transpose() {
        for kind in GateKind::ALL {
            let dim = 1 << kind.arity();
            let lhs = kind.adjoint().matrix();
            let rhs = dagger(&kind.matrix(), dim);
            for (a, b) in lhs.iter().zip(&rhs) {
                assert!((a - b).norm() < 1e-15, "{kind}");
            }
            assert_eq!(kind.adjoint().adjoint(), kind);
        }
    }

    #[test]
    fn classical_permutation_matches_matrix_support() {
        for kind in GateKind::ALL.into_iter().filter(|k| k.is_classical()) {
            let dim = 1 << kind.arity();
            let m = kind.matrix();
            for col in 0..dim {
                let rows: Vec<usize> = (0..dim).filter(|&r| m[r * dim + col].norm() > 0.5).collect();
                assert_eq!(rows, vec![kind.permute_local(col).unwrap()], "{kind} col {col}");
            }
        }
        assert_eq!(GateKind::H.permute_local(0), None);
    }

    #[test]
    fn gate_invariants_enforced() {
        assert!(matches!(
            Gate::new(GateKind::CX, vec![0, 0]),
            Err(CircuitError::DuplicateOperand { .. })
        ));
        assert!(matches!(
            Gate::new(GateKind::X, vec![0, 1]),
            Err(CircuitError::Arity { .. })
        ));
        assert_eq!("CCX".parse::<GateKind>().unwrap(), GateKind::CCX);
        assert!("rz".parse::<GateKind>().is_err());
    }

    #[test]
    fn swap_inverse_ignores_operand_order() {
        let a = Gate::new(GateKind::Swap, vec![0, 1]).unwrap();
        let b = Gate::new(GateKind::Swap, vec![1, 0]).unwrap();
        assert!(a.is_inverse_of(&b));
        assert!(!Gate::cx(0, 1).is_inverse_of(&Gate::cx(1, 0)));
        assert!(Gate::single(GateKind::S, 2).is_inverse_of(&Gate::single(GateKind::Sdg, 2)));
    }
}
