//! Owner-side steps around the untrusted compilers.

use crate::circuit::Circuit;
use crate::compiler::{peephole_optimize, unpermute, CompileError, CompiledSegment};
use crate::split::{recombine, Segment, Side, SplitError, SplitManifest};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum RestoreError {
    #[error(transparent)]
    Compile(#[from] CompileError),
    #[error(transparent)]
    Split(#[from] SplitError),
}

/// Undoes routing on both compiled segments, recombines them through the
/// manifest and lets `R⁻¹·R` cancel.
pub fn restore(l: &CompiledSegment, r: &CompiledSegment, m: &SplitManifest) -> Result<Circuit, RestoreError> {
    let left = Segment {
        circuit: unpermute(l)?,
        side: Side::L,
    };
    let right = Segment {
        circuit: unpermute(r)?,
        side: Side::R,
    };
    let joined = recombine(&left, &right, m)?;
    Ok(peephole_optimize(&joined))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{unitary, Gate};
    use crate::compiler::{compile_segment, CouplingGraph};
    use crate::obfuscate::{build_obfuscated, InsertionPolicy};
    use crate::split::{generate_interlock_pattern, split};

    #[test]
    fn restored_circuit_matches_original() {
        let c = Circuit::from_gates(
            5,
            vec![
                Gate::x(0),
                Gate::cx(0, 1),
                Gate::ccx(0, 1, 2),
                Gate::cx(2, 3),
                Gate::x(0),
                Gate::ccx(1, 3, 4),
            ],
        )
        .unwrap();
        let want = unitary(&c).unwrap();
        for seed in 0..10 {
            let o = build_obfuscated(&c, &InsertionPolicy::default(), seed).unwrap();
            let m = generate_interlock_pattern(&o, seed, 2).unwrap();
            let (l, r) = split(o.circuit(), &m).unwrap();
            for graph in ["full", "line"] {
                let gl = CouplingGraph::from_spec(graph, l.circuit.num_qubits()).unwrap();
                let gr = CouplingGraph::from_spec(graph, r.circuit.num_qubits()).unwrap();
                let cl = compile_segment(&l.circuit, &gl).unwrap();
                let cr = compile_segment(&r.circuit, &gr).unwrap();
                let back = restore(&cl, &cr, &m).unwrap();
                assert!(unitary(&back).unwrap().approx_eq(&want, 1e-9), "seed {seed} {graph}");
                if graph == "full" {
                    assert_eq!(back.gates(), c.canonicalize().gates());
                }
            }
        }
    }
}
