use std::sync::OnceLock;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Circuit, CircuitError, Gate, GateKind};
use crate::rng::derive_rng;

/// Largest register for which full unitaries are built.
pub const MAX_UNITARY_QUBITS: usize = 10;
/// Largest register the statevector simulator accepts.
pub const MAX_STATEVECTOR_QUBITS: usize = 20;

/// Registers up to this size are compared by full unitary; larger ones by
/// statevector on random basis inputs.
const UNITARY_CHECK_QUBITS: usize = 8;
const STATEVECTOR_CHECK_INPUTS: usize = 16;

fn matrix_table() -> &'static [Vec<Complex64>] {
    static TABLE: OnceLock<Vec<Vec<Complex64>>> = OnceLock::new();
    TABLE.get_or_init(|| GateKind::ALL.iter().map(|k| k.matrix()).collect())
}

fn cached_matrix(kind: GateKind) -> &'static [Complex64] {
    let idx = GateKind::ALL.iter().position(|&k| k == kind).expect("known kind");
    &matrix_table()[idx]
}

/// Amplitudes of an `n`-qubit register; qubit 0 is the least significant bit.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn apply(&mut self, gate: &Gate) {
        apply_gate(&mut self.amplitudes, gate);
    }

    pub fn apply_x(&mut self, q: usize) {
        apply_x(&mut self.amplitudes, q);
    }

    pub fn run(circuit: &Circuit, input: usize) -> Result<Self, CircuitError> {
        let mut state = basis_state(circuit.num_qubits(), input)?;
        for g in circuit.gates() {
            state.apply(g);
        }
        Ok(state)
    }

    pub fn max_abs_diff(&self, other: &StateVector) -> f64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

pub fn basis_state(num_qubits: usize, index: usize) -> Result<StateVector, CircuitError> {
    if num_qubits > MAX_STATEVECTOR_QUBITS {
        return Err(CircuitError::TooLarge {
            num_qubits,
            limit: MAX_STATEVECTOR_QUBITS,
        });
    }
    let dim = 1usize << num_qubits;
    if index >= dim {
        return Err(CircuitError::QubitOutOfRange {
            qubit: index,
            num_qubits,
        });
    }
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
    amplitudes[index] = Complex64::new(1.0, 0.0);
    Ok(StateVector { num_qubits, amplitudes })
}

/// Applies `gate` in place to a full register of amplitudes.
pub fn apply_gate(amps: &mut [Complex64], gate: &Gate) {
    let ops = gate.operands();
    let k = ops.len();
    let local_dim = 1usize << k;
    let mut offsets = [0usize; 8];
    for (local, off) in offsets.iter_mut().enumerate().take(local_dim) {
        *off = ops.iter().enumerate().map(|(bit, &q)| ((local >> bit) & 1) << q).sum();
    }
    let mask: usize = ops.iter().map(|&q| 1usize << q).sum();
    let m = cached_matrix(gate.kind());
    let mut gathered = [Complex64::new(0.0, 0.0); 8];
    for base in 0..amps.len() {
        if base & mask != 0 {
            continue;
        }
        for l in 0..local_dim {
            gathered[l] = amps[base | offsets[l]];
        }
        for r in 0..local_dim {
            let row = &m[r * local_dim..(r + 1) * local_dim];
            let mut acc = Complex64::new(0.0, 0.0);
            for (c, coeff) in row.iter().enumerate() {
                acc += coeff * gathered[c];
            }
            amps[base | offsets[r]] = acc;
        }
    }
}

pub fn apply_x(amps: &mut [Complex64], q: usize) {
    let bit = 1usize << q;
    for i in 0..amps.len() {
        if i & bit == 0 {
            amps.swap(i, i | bit);
        }
    }
}

/// Runs a circuit of basis-preserving gates on a basis index.
///
/// Returns `None` if the circuit contains a gate that creates superposition.
pub fn run_classical(circuit: &Circuit, input: usize) -> Option<usize> {
    let mut state = input;
    for g in circuit.gates() {
        state = step_classical(state, g)?;
    }
    Some(state)
}

pub(crate) fn step_classical(state: usize, gate: &Gate) -> Option<usize> {
    let ops = gate.operands();
    let local = ops
        .iter()
        .enumerate()
        .map(|(bit, &q)| ((state >> q) & 1) << bit)
        .sum::<usize>();
    let image = gate.kind().permute_local(local)?;
    let mut out = state;
    for (bit, &q) in ops.iter().enumerate() {
        out = (out & !(1 << q)) | (((image >> bit) & 1) << q);
    }
    Some(out)
}

/// Dense square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl Matrix {
    pub fn identity(dim: usize) -> Self {
        let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            data[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        Self { dim, data }
    }

    pub fn from_rows(dim: usize, data: Vec<Complex64>) -> Self {
        assert_eq!(data.len(), dim * dim, "matrix data has wrong length");
        Self { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim + col]
    }

    pub fn mul(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.dim, rhs.dim);
        let n = self.dim;
        let mut out = vec![Complex64::new(0.0, 0.0); n * n];
        for r in 0..n {
            for k in 0..n {
                let a = self.data[r * n + k];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for c in 0..n {
                    out[r * n + c] += a * rhs.data[k * n + c];
                }
            }
        }
        Matrix { dim: n, data: out }
    }

    pub fn adjoint(&self) -> Matrix {
        let n = self.dim;
        let mut out = vec![Complex64::new(0.0, 0.0); n * n];
        for r in 0..n {
            for c in 0..n {
                out[c * n + r] = self.data[r * n + c].conj();
            }
        }
        Matrix { dim: n, data: out }
    }

    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &Matrix, tol: f64) -> bool {
        self.dim == other.dim && self.max_abs_diff(other) <= tol
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        self.approx_eq(&Matrix::identity(self.dim), tol)
    }
}

/// Full unitary of a circuit, built column by column.
pub fn unitary(circuit: &Circuit) -> Result<Matrix, CircuitError> {
    let n = circuit.num_qubits();
    if n > MAX_UNITARY_QUBITS {
        return Err(CircuitError::TooLarge {
            num_qubits: n,
            limit: MAX_UNITARY_QUBITS,
        });
    }
    let dim = 1usize << n;
    let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
    for col in 0..dim {
        let state = StateVector::run(circuit, col)?;
        for (row, a) in state.amplitudes().iter().enumerate() {
            data[row * dim + col] = *a;
        }
    }
    Ok(Matrix { dim, data })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EquivalenceMethod {
    Unitary,
    Statevector,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Equivalence {
    pub method: EquivalenceMethod,
    pub inputs_checked: usize,
    pub max_deviation: f64,
    pub equivalent: bool,
}

/// Functional comparison: full unitary for up to 8 qubits, otherwise
/// statevectors on 16 seeded random basis inputs.
pub fn circuits_equivalent(a: &Circuit, b: &Circuit, tol: f64, seed: u64) -> Result<Equivalence, CircuitError> {
    if a.num_qubits() != b.num_qubits() {
        return Err(CircuitError::QubitCountMismatch {
            left: a.num_qubits(),
            right: b.num_qubits(),
        });
    }
    let n = a.num_qubits();
    if n <= UNITARY_CHECK_QUBITS {
        let dev = unitary(a)?.max_abs_diff(&unitary(b)?);
        return Ok(Equivalence {
            method: EquivalenceMethod::Unitary,
            inputs_checked: 1 << n,
            max_deviation: dev,
            equivalent: dev <= tol,
        });
    }
    let mut rng = derive_rng(seed, &[0x0065_7175_6976]);
    let mut dev: f64 = 0.0;
    for _ in 0..STATEVECTOR_CHECK_INPUTS {
        let input = rng.gen_range(0..1usize << n);
        let sa = StateVector::run(a, input)?;
        let sb = StateVector::run(b, input)?;
        dev = dev.max(sa.max_abs_diff(&sb));
    }
    Ok(Equivalence {
        method: EquivalenceMethod::Statevector,
        inputs_checked: STATEVECTOR_CHECK_INPUTS,
        max_deviation: dev,
        equivalent: dev <= tol,
    })
}
