#![allow(dead_code)]

use std::path::PathBuf;

use qsplit::circuit::{Circuit, Gate, GateKind};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn benchmark_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("benchmarks")
}

pub fn benchmarks() -> Vec<Circuit> {
    qsplit::bench::load_benchmarks(&benchmark_dir()).expect("bundled benchmarks load")
}

pub fn random_gate(rng: &mut impl Rng, n: usize, kinds: &[GateKind]) -> Gate {
    let fitting: Vec<GateKind> = kinds.iter().copied().filter(|k| k.arity() <= n).collect();
    let kind = *fitting.choose(rng).expect("some kind fits");
    let mut qubits: Vec<usize> = (0..n).collect();
    qubits.shuffle(rng);
    qubits.truncate(kind.arity());
    Gate::new(kind, qubits).unwrap()
}

pub fn random_circuit(rng: &mut impl Rng, n: usize, gates: usize, kinds: &[GateKind]) -> Circuit {
    let gates = (0..gates).map(|_| random_gate(rng, n, kinds)).collect();
    Circuit::from_gates(n, gates).unwrap()
}

/// Per-qubit cuts that no gate straddles, built by raising the cut of every
/// operand of a straddling gate until nothing moves.
pub fn valid_cuts(c: &Circuit, mut cuts: Vec<usize>) -> Vec<usize> {
    let layering = c.layering();
    loop {
        let mut changed = false;
        for (i, g) in c.gates().iter().enumerate() {
            let t = layering.layer_of(i);
            let before = g.operands().iter().any(|&q| t < cuts[q]);
            let after = g.operands().iter().any(|&q| t >= cuts[q]);
            if before && after {
                for &q in g.operands() {
                    if cuts[q] <= t {
                        cuts[q] = t + 1;
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            return cuts;
        }
    }
}

/// Injective partial maps from an `n`-set into an `i`-set, counted by
/// walking every function into `0..=i` (value `i` meaning unmapped).
pub fn brute_force_mappings(n: usize, i: usize) -> u64 {
    let mut digits = vec![0usize; n];
    let mut count = 0;
    loop {
        let mut seen = vec![false; i];
        if digits.iter().all(|&d| d == i || !std::mem::replace(&mut seen[d], true)) {
            count += 1;
        }
        let mut pos = 0;
        loop {
            if pos == n {
                return count;
            }
            digits[pos] += 1;
            if digits[pos] <= i {
                break;
            }
            digits[pos] = 0;
            pos += 1;
        }
    }
}
