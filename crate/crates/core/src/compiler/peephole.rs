use crate::circuit::{Circuit, Gate};

/// Cancels adjacent inverse pairs until none remain.
///
/// Each wire keeps a stack of surviving gates. An incoming gate cancels the
/// gate on top of all its wires' stacks when that gate is its adjoint on the
/// same operands; popping exposes older gates, so nested pairs such as
/// `H CX CX H` collapse in one sweep.
pub fn peephole_optimize(c: &Circuit) -> Circuit {
    let mut gates = c.gates().to_vec();
    loop {
        let next = sweep(c.num_qubits(), &gates);
        if next.len() == gates.len() {
            return c.replace_gates(next);
        }
        gates = next;
    }
}

fn sweep(num_qubits: usize, gates: &[Gate]) -> Vec<Gate> {
    let mut kept: Vec<Option<&Gate>> = Vec::with_capacity(gates.len());
    let mut stacks: Vec<Vec<usize>> = vec![Vec::new(); num_qubits];
    for g in gates {
        let ops = g.operands();
        let top = stacks[ops[0]].last().copied();
        let cancels = top.is_some_and(|j| {
            let prev = kept[j].expect("stack entries are live");
            ops.iter().all(|&q| stacks[q].last() == Some(&j)) && prev.is_inverse_of(g)
        });
        if cancels {
            let j = top.unwrap();
            for &q in ops {
                stacks[q].pop();
            }
            kept[j] = None;
        } else {
            for &q in ops {
                stacks[q].push(kept.len());
            }
            kept.push(Some(g));
        }
    }
    kept.into_iter().flatten().cloned().collect()
}
