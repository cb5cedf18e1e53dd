use super::Circuit;

/// ASAP layer assignment: each gate sits one layer after the latest earlier
/// gate sharing any of its qubits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layering {
    layers: Vec<Vec<usize>>,
    layer_of: Vec<usize>,
}

impl Layering {
    pub fn asap(circuit: &Circuit) -> Self {
        let mut frontier = vec![0usize; circuit.num_qubits()];
        let mut layer_of = Vec::with_capacity(circuit.gate_count());
        let mut layers: Vec<Vec<usize>> = Vec::new();
        for (i, g) in circuit.gates().iter().enumerate() {
            let layer = g.operands().iter().map(|&q| frontier[q]).max().unwrap_or(0);
            for &q in g.operands() {
                frontier[q] = layer + 1;
            }
            if layers.len() <= layer {
                layers.resize_with(layer + 1, Vec::new);
            }
            layers[layer].push(i);
            layer_of.push(layer);
        }
        Self { layers, layer_of }
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    /// Gate indices per layer, in program order within a layer.
    pub fn layers(&self) -> &[Vec<usize>] {
        &self.layers
    }

    pub fn layer_of(&self, gate_index: usize) -> usize {
        self.layer_of[gate_index]
    }

    /// First layer at which each qubit is touched; `depth()` for idle wires.
    pub fn first_use(&self, circuit: &Circuit) -> Vec<usize> {
        let mut first = vec![self.depth(); circuit.num_qubits()];
        for (i, g) in circuit.gates().iter().enumerate() {
            for &q in g.operands() {
                first[q] = first[q].min(self.layer_of[i]);
            }
        }
        first
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Gate;

    #[test]
    fn small_cases() {
        let empty = Circuit::new(2).unwrap();
        assert_eq!(empty.depth(), 0);

        let c = Circuit::from_gates(2, vec![Gate::x(0), Gate::x(1)]).unwrap();
        assert_eq!(c.layering().layers(), &[vec![0, 1]]);

        let c = Circuit::from_gates(2, vec![Gate::x(0), Gate::cx(0, 1), Gate::x(1)]).unwrap();
        assert_eq!(c.layering().layers(), &[vec![0], vec![1], vec![2]]);

        let c = Circuit::from_gates(1, vec![Gate::x(0), Gate::x(0)]).unwrap();
        assert_eq!(c.depth(), 2);
    }

    #[test]
    fn first_use_defaults_to_depth() {
        let c = Circuit::from_gates(3, vec![Gate::x(0), Gate::cx(0, 1)]).unwrap();
        let l = c.layering();
        assert_eq!(l.first_use(&c), vec![0, 1, 2]);
    }
}
