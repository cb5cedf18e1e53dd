use crate::circuit::{Circuit, Gate, GateKind};

use super::{CompileError, CompiledSegment, CouplingGraph};

/// Standard Toffoli network: six CX plus T/Tdg/H.
pub fn decompose_ccx(a: usize, b: usize, c: usize) -> Vec<Gate> {
    use GateKind::*;
    let one = |k, q| Gate::single(k, q);
    vec![
        one(H, c),
        Gate::cx(b, c),
        one(Tdg, c),
        Gate::cx(a, c),
        one(T, c),
        Gate::cx(b, c),
        one(Tdg, c),
        Gate::cx(a, c),
        one(T, b),
        one(T, c),
        one(H, c),
        Gate::cx(a, b),
        one(T, a),
        one(Tdg, b),
        Gate::cx(a, b),
    ]
}

/// Maps `c` onto `graph` starting from the trivial layout.
///
/// Whenever a two-qubit gate lands on non-adjacent nodes, its first operand
/// is swapped along the shortest path until it neighbours the second. CCX is
/// kept whole on complete graphs and decomposed otherwise. Logical indices
/// `>= c.num_qubits()` in the layouts stand for unused (ancilla) nodes.
pub fn route(c: &Circuit, graph: &CouplingGraph) -> Result<CompiledSegment, CompileError> {
    let p = graph.nodes();
    if p < c.num_qubits() {
        return Err(CompileError::GraphTooSmall {
            nodes: p,
            qubits: c.num_qubits(),
        });
    }
    let keep_ccx = graph.is_complete();
    let mut layout: Vec<usize> = (0..p).collect();
    let mut holder: Vec<usize> = (0..p).collect();
    let mut out = Circuit::new(p)?.with_name(c.name());

    let mut logical: Vec<Gate> = Vec::with_capacity(c.gate_count());
    for g in c.gates() {
        match (g.kind(), g.operands()) {
            (GateKind::CCX, &[a, b, t]) if !keep_ccx => logical.extend(decompose_ccx(a, b, t)),
            _ => logical.push(g.clone()),
        }
    }

    for g in &logical {
        if let &[a, b] = g.operands() {
            let (pa, pb) = (layout[a], layout[b]);
            if !graph.is_adjacent(pa, pb) {
                let path = graph.shortest_path(pa, pb);
                for w in path[..path.len() - 1].windows(2) {
                    let (x, y) = (w[0], w[1]);
                    out.push(Gate::new(GateKind::Swap, vec![x, y])?)?;
                    holder.swap(x, y);
                    layout[holder[x]] = x;
                    layout[holder[y]] = y;
                }
            }
        }
        out.push(g.remap(|q| layout[q]))?;
    }
    Ok(CompiledSegment {
        circuit: out,
        logical_qubits: c.num_qubits(),
        initial_layout: (0..p).collect(),
        final_layout: layout,
    })
}
