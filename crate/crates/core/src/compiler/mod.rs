//! Stand-in for an untrusted third-party compiler.
//!
//! The compiler only ever receives a bare [`Circuit`] and a coupling graph.
//! It optimises the circuit, routes it, and returns the physical circuit with
//! its layouts; the owner later strips the routing permutation with
//! [`unpermute`].

mod coupling;
mod peephole;
mod route;

pub use coupling::{CouplingGraph, CouplingSpec};
pub use peephole::peephole_optimize;
pub use route::{decompose_ccx, route};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{Circuit, CircuitError, Gate, GateKind};
use crate::io::JsonError;

#[derive(Debug, Error, PartialEq)]
pub enum CompileError {
    #[error("coupling graph has {nodes} nodes but the circuit needs {qubits}")]
    GraphTooSmall { nodes: usize, qubits: usize },
    #[error("invalid coupling graph: {0}")]
    Graph(String),
    #[error("invalid layout: {0}")]
    Layout(String),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

/// A routed circuit over physical qubits. Layouts map logical index to
/// physical node and cover every node of the graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompiledSegment {
    pub circuit: Circuit,
    pub logical_qubits: usize,
    pub initial_layout: Vec<usize>,
    pub final_layout: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Layouts {
    pub initial_layout: Vec<usize>,
    pub final_layout: Vec<usize>,
}

impl CompiledSegment {
    pub fn layouts(&self) -> Layouts {
        Layouts {
            initial_layout: self.initial_layout.clone(),
            final_layout: self.final_layout.clone(),
        }
    }

    /// Reassembles a segment from a physical circuit and its layout file.
    pub fn from_parts(circuit: Circuit, logical_qubits: usize, layouts: Layouts) -> Result<Self, CompileError> {
        for (name, l) in [("initial", &layouts.initial_layout), ("final", &layouts.final_layout)] {
            if l.len() != circuit.num_qubits() {
                return Err(CompileError::Layout(format!(
                    "{name} layout has {} entries for {} physical qubits",
                    l.len(),
                    circuit.num_qubits()
                )));
            }
            check_bijection(l).map_err(|e| CompileError::Layout(format!("{name} layout: {e}")))?;
        }
        if logical_qubits > circuit.num_qubits() {
            return Err(CompileError::Layout(format!(
                "{logical_qubits} logical qubits on {} physical",
                circuit.num_qubits()
            )));
        }
        Ok(Self {
            circuit,
            logical_qubits,
            initial_layout: layouts.initial_layout,
            final_layout: layouts.final_layout,
        })
    }
}

fn check_bijection(map: &[usize]) -> Result<(), String> {
    let mut seen = vec![false; map.len()];
    for &p in map {
        if p >= map.len() || std::mem::replace(&mut seen[p], true) {
            return Err(format!("{p} repeated or out of range"));
        }
    }
    Ok(())
}

pub fn write_layouts(l: &Layouts) -> String {
    crate::io::to_json(l)
}

pub fn read_layouts(text: &str) -> Result<Layouts, JsonError> {
    let l: Layouts = crate::io::from_json(text)?;
    if l.initial_layout.len() != l.final_layout.len() {
        return Err(JsonError::new("final_layout", "length differs from initial_layout"));
    }
    check_bijection(&l.initial_layout).map_err(|e| JsonError::new("initial_layout", e))?;
    check_bijection(&l.final_layout).map_err(|e| JsonError::new("final_layout", e))?;
    Ok(l)
}

/// `route(peephole_optimize(c))`. Deterministic.
pub fn compile_segment(c: &Circuit, graph: &CouplingGraph) -> Result<CompiledSegment, CompileError> {
    route(&peephole_optimize(c), graph)
}

/// Recovers a logical circuit on `logical_qubits` wires from a compiled one.
///
/// Every SWAP is folded into the qubit labelling instead of being kept, and
/// the remaining gates are relabelled onto logical wires. Whatever
/// permutation is left relative to `final_layout` (from SWAPs the source
/// circuit itself contained) is re-applied as explicit SWAPs.
pub fn unpermute(s: &CompiledSegment) -> Result<Circuit, CompileError> {
    let n = s.logical_qubits;
    let p = s.circuit.num_qubits();
    let mut label = vec![0usize; p];
    for (l, &ph) in s.initial_layout.iter().enumerate() {
        label[ph] = l;
    }
    let mut out = Circuit::new(n.max(1))?.with_name(s.circuit.name());
    for g in s.circuit.gates() {
        if g.kind() == GateKind::Swap {
            label.swap(g.operands()[0], g.operands()[1]);
            continue;
        }
        let mapped = g.remap(|ph| label[ph]);
        if let Some(&a) = mapped.operands().iter().find(|&&l| l >= n) {
            return Err(CompileError::Layout(format!("gate {g} acts on ancilla {a}")));
        }
        out.push(mapped)?;
    }
    // The value the relabelled circuit leaves on wire `label[ph]` belongs on
    // the logical wire that `final_layout` places at `ph`.
    let mut owner = vec![0usize; p];
    for (l, &ph) in s.final_layout.iter().enumerate() {
        owner[ph] = l;
    }
    let mut dest = vec![0usize; p];
    for ph in 0..p {
        dest[label[ph]] = owner[ph];
    }
    if let Some(l) = (0..p).find(|&l| (l < n) != (dest[l] < n)) {
        return Err(CompileError::Layout(format!(
            "final layout moves logical {l} onto an ancilla"
        )));
    }
    let mut at: Vec<usize> = (0..n).collect();
    let mut pos: Vec<usize> = (0..n).collect();
    for v in 0..n {
        let (from, to) = (pos[v], dest[v]);
        if from != to {
            out.push(Gate::new(GateKind::Swap, vec![from, to])?)?;
            let other = at[to];
            at.swap(from, to);
            pos[v] = to;
            pos[other] = from;
        }
    }
    out.set_measured(None)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{unitary, Gate};

    fn circ(n: usize, gates: Vec<Gate>) -> Circuit {
        Circuit::from_gates(n, gates).unwrap()
    }

    fn swap(a: usize, b: usize) -> Gate {
        Gate::new(GateKind::Swap, vec![a, b]).unwrap()
    }

    #[test]
    fn unpermute_restores_logical_unitary() {
        let c = circ(
            4,
            vec![
                Gate::h(0),
                Gate::cx(0, 3),
                Gate::ccx(3, 1, 2),
                Gate::cx(2, 0),
                Gate::x(1),
            ],
        );
        let want = unitary(&peephole_optimize(&c)).unwrap();
        for graph in [CouplingGraph::line(4), CouplingGraph::ring(4), CouplingGraph::line(6)] {
            let s = compile_segment(&c, &graph).unwrap();
            for g in s.circuit.gates().iter().filter(|g| g.kind().arity() == 2) {
                assert!(graph.is_adjacent(g.operands()[0], g.operands()[1]));
            }
            let back = unpermute(&s).unwrap();
            assert!(unitary(&back).unwrap().approx_eq(&want, 1e-9));
        }
    }

    #[test]
    fn source_swaps_survive_unpermute() {
        let c = circ(3, vec![Gate::x(0), swap(0, 2), Gate::cx(2, 1)]);
        let s = compile_segment(&c, &CouplingGraph::line(3)).unwrap();
        let back = unpermute(&s).unwrap();
        assert!(unitary(&back).unwrap().approx_eq(&unitary(&c).unwrap(), 1e-12));
    }

    #[test]
    fn compiling_shrinks_inverse_pairs() {
        let c = circ(2, vec![Gate::x(1), Gate::x(1), Gate::cx(0, 1)]);
        let s = compile_segment(&c, &CouplingGraph::full(2)).unwrap();
        assert!(s.circuit.gate_count() < c.gate_count());
        assert_eq!(s, compile_segment(&c, &CouplingGraph::full(2)).unwrap());
    }

    #[test]
    fn layout_file_checks() {
        let l = Layouts {
            initial_layout: vec![0, 1, 2],
            final_layout: vec![1, 0, 2],
        };
        assert_eq!(read_layouts(&write_layouts(&l)).unwrap(), l);
        let e = read_layouts(r#"{"initial_layout":[0,0],"final_layout":[0,1]}"#).unwrap_err();
        assert_eq!(e.path, "initial_layout");
        let c = circ(2, vec![]);
        assert!(CompiledSegment::from_parts(c, 2, l).is_err());
    }
}
