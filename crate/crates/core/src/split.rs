//! Interlocking split of an obfuscated circuit into two segments.
//!
//! Each qubit `q` gets its own cut layer `t_q`: gates on `q` before the cut go
//! to the left segment, the rest to the right. Cuts differ between qubits, so
//! the boundary is jagged rather than a straight time slice.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{Circuit, CircuitError, Gate};
use crate::io::JsonError;
use crate::obfuscate::{ObfuscatedCircuit, Role};
use crate::rng::derive_rng;

const SPLIT_STREAM: u64 = 0x0073_706c_6974;
const MAX_ATTEMPTS: u64 = 256;

#[derive(Debug, Error, PartialEq)]
pub enum SplitError {
    #[error("split infeasible: {0}")]
    Infeasible(String),
    #[error("manifest does not match circuit: {0}")]
    Mismatch(String),
    #[error("inconsistent qubit map: {0}")]
    QubitMap(String),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    L,
    R,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitManifest {
    pub version: u32,
    pub original_num_qubits: usize,
    /// Depth of the circuit the cuts refer to.
    pub depth: usize,
    pub cut_layers: Vec<usize>,
    #[serde(rename = "qubit_map_L")]
    pub qubit_map_l: Vec<usize>,
    #[serde(rename = "qubit_map_R")]
    pub qubit_map_r: Vec<usize>,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measured: Option<Vec<usize>>,
}

impl SplitManifest {
    /// Manifest for explicit cuts, with qubit maps derived from `circuit`.
    pub fn from_cuts(circuit: &Circuit, cut_layers: Vec<usize>, seed: u64) -> Result<Self, SplitError> {
        let depth = circuit.depth();
        let mut m = SplitManifest {
            version: 1,
            original_num_qubits: circuit.num_qubits(),
            depth,
            cut_layers,
            qubit_map_l: Vec::new(),
            qubit_map_r: Vec::new(),
            seed,
            measured: circuit.measured().map(<[usize]>::to_vec),
        };
        m.check_shape()?;
        let sides = assign_sides(circuit, &m.cut_layers)?;
        let (l, r) = used_qubits(circuit, &sides);
        m.qubit_map_l = l;
        m.qubit_map_r = r;
        Ok(m)
    }

    pub fn distinct_cuts(&self) -> usize {
        self.cut_layers.iter().collect::<BTreeSet<_>>().len()
    }

    fn check_shape(&self) -> Result<(), SplitError> {
        if self.cut_layers.len() != self.original_num_qubits {
            return Err(SplitError::Mismatch(format!(
                "{} cut layers for {} qubits",
                self.cut_layers.len(),
                self.original_num_qubits
            )));
        }
        if let Some((q, t)) = self.cut_layers.iter().enumerate().find(|(_, &t)| t > self.depth) {
            return Err(SplitError::Mismatch(format!(
                "cut {t} on q{q} exceeds depth {}",
                self.depth
            )));
        }
        Ok(())
    }

    fn check_maps(&self) -> Result<(), SplitError> {
        for (name, map) in [("L", &self.qubit_map_l), ("R", &self.qubit_map_r)] {
            let mut seen = vec![false; self.original_num_qubits];
            for &q in map {
                if q >= self.original_num_qubits {
                    return Err(SplitError::QubitMap(format!(
                        "map {name} sends to q{q}, outside {} qubits",
                        self.original_num_qubits
                    )));
                }
                if std::mem::replace(&mut seen[q], true) {
                    return Err(SplitError::QubitMap(format!("map {name} hits q{q} twice")));
                }
            }
        }
        Ok(())
    }
}

pub fn write_manifest(m: &SplitManifest) -> String {
    crate::io::to_json(m)
}

/// Parses and validates a manifest; errors name the offending field.
pub fn read_manifest(text: &str) -> Result<SplitManifest, JsonError> {
    let m: SplitManifest = crate::io::from_json(text)?;
    if m.version != 1 {
        return Err(JsonError::new("version", format!("unsupported version {}", m.version)));
    }
    if m.original_num_qubits == 0 {
        return Err(JsonError::new("original_num_qubits", "must be positive"));
    }
    if m.cut_layers.len() != m.original_num_qubits {
        return Err(JsonError::new(
            "cut_layers",
            format!(
                "expected {} entries, found {}",
                m.original_num_qubits,
                m.cut_layers.len()
            ),
        ));
    }
    if let Some((q, t)) = m.cut_layers.iter().enumerate().find(|(_, &t)| t > m.depth) {
        return Err(JsonError::new(
            format!("cut_layers[{q}]"),
            format!("cut {t} exceeds declared depth {}", m.depth),
        ));
    }
    m.check_maps().map_err(|e| {
        let field = if e.to_string().contains("map L") {
            "qubit_map_L"
        } else {
            "qubit_map_R"
        };
        JsonError::new(field, e.to_string())
    })?;
    if let Some(bits) = &m.measured {
        if let Some(i) = bits.iter().position(|&q| q >= m.original_num_qubits) {
            return Err(JsonError::new(format!("measured[{i}]"), "qubit out of range"));
        }
    }
    Ok(m)
}

/// One side of a split, on its own compact qubit register.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    pub circuit: Circuit,
    pub side: Side,
}

/// Side of every gate; errors on the first gate that straddles the cut.
fn assign_sides(circuit: &Circuit, cuts: &[usize]) -> Result<Vec<Side>, SplitError> {
    let layering = circuit.layering();
    circuit
        .gates()
        .iter()
        .enumerate()
        .map(|(i, g)| {
            let t = layering.layer_of(i);
            let left = g.operands().iter().filter(|&&q| t < cuts[q]).count();
            match left {
                0 => Ok(Side::R),
                n if n == g.operands().len() => Ok(Side::L),
                _ => Err(SplitError::Mismatch(format!(
                    "gate {i} ({g}) at layer {t} straddles the cut"
                ))),
            }
        })
        .collect()
}

fn used_qubits(circuit: &Circuit, sides: &[Side]) -> (Vec<usize>, Vec<usize>) {
    let mut l = BTreeSet::new();
    let mut r = BTreeSet::new();
    for (g, side) in circuit.gates().iter().zip(sides) {
        let set = if *side == Side::L { &mut l } else { &mut r };
        set.extend(g.operands().iter().copied());
    }
    (l.into_iter().collect(), r.into_iter().collect())
}

/// A segment register needs at least one wire even when the side is empty.
fn segment_circuit(name: String, map: &[usize], gates: Vec<Gate>) -> Result<Circuit, CircuitError> {
    Ok(Circuit::from_gates(map.len().max(1), gates)?.with_name(name))
}

pub fn split(circuit: &Circuit, m: &SplitManifest) -> Result<(Segment, Segment), SplitError> {
    if circuit.num_qubits() != m.original_num_qubits {
        return Err(SplitError::Mismatch(format!(
            "manifest is for {} qubits, circuit has {}",
            m.original_num_qubits,
            circuit.num_qubits()
        )));
    }
    if circuit.depth() != m.depth {
        return Err(SplitError::Mismatch(format!(
            "manifest depth {} differs from circuit depth {}",
            m.depth,
            circuit.depth()
        )));
    }
    m.check_shape()?;
    m.check_maps()?;
    let sides = assign_sides(circuit, &m.cut_layers)?;
    let (l, r) = used_qubits(circuit, &sides);
    if l != m.qubit_map_l || r != m.qubit_map_r {
        return Err(SplitError::QubitMap(
            "maps differ from the qubits each side uses".into(),
        ));
    }
    let mut local = vec![usize::MAX; circuit.num_qubits()];
    let mut build = |side: Side, map: &[usize]| -> Result<Segment, SplitError> {
        for (i, &q) in map.iter().enumerate() {
            local[q] = i;
        }
        let gates = circuit
            .gates()
            .iter()
            .zip(&sides)
            .filter(|(_, s)| **s == side)
            .map(|(g, _)| g.remap(|q| local[q]))
            .collect();
        let name = format!("{}_{side:?}", circuit.name());
        Ok(Segment {
            circuit: segment_circuit(name, map, gates)?,
            side,
        })
    };
    Ok((build(Side::L, &m.qubit_map_l)?, build(Side::R, &m.qubit_map_r)?))
}

/// Maps both segments back onto the original register and concatenates them,
/// left first, in canonical order.
pub fn recombine(l: &Segment, r: &Segment, m: &SplitManifest) -> Result<Circuit, SplitError> {
    m.check_maps()?;
    let mut out = Circuit::new(m.original_num_qubits)?;
    for (seg, map, side) in [(l, &m.qubit_map_l, Side::L), (r, &m.qubit_map_r, Side::R)] {
        if seg.side != side {
            return Err(SplitError::QubitMap(format!("expected the {side:?} segment")));
        }
        let width = seg.circuit.num_qubits();
        let empty_side = map.is_empty() && width == 1 && seg.circuit.is_empty();
        if width != map.len() && !empty_side {
            return Err(SplitError::QubitMap(format!(
                "segment {side:?} has {width} qubits but its map has {} entries",
                map.len()
            )));
        }
        for g in seg.circuit.gates() {
            out.push(g.remap(|q| map[q]))?;
        }
    }
    out.set_measured(m.measured.clone())?;
    Ok(out.canonicalize())
}

/// Draws a valid interlocking cut of `o`.
///
/// Every `R⁻¹` gate stays left and a randomly chosen `R` gate (with
/// everything downstream of it) stays right. Raw cuts are drawn from
/// `[1, depth-1]`, clamped to those bounds and then raised until no gate
/// straddles the boundary.
pub fn generate_interlock_pattern(
    o: &ObfuscatedCircuit,
    seed: u64,
    min_distinct: usize,
) -> Result<SplitManifest, SplitError> {
    generate(o.circuit(), o.roles(), seed, min_distinct)
}

fn generate(c: &Circuit, roles: &[Role], seed: u64, min_distinct: usize) -> Result<SplitManifest, SplitError> {
    let n = c.num_qubits();
    let layering = c.layering();
    let depth = layering.depth();
    if depth < 2 {
        return Err(SplitError::Infeasible(format!("depth {depth} is below 2")));
    }
    let used: Vec<usize> = (0..n).filter(|&q| c.gates().iter().any(|g| g.touches(q))).collect();
    if used.len() < min_distinct {
        return Err(SplitError::Infeasible(format!(
            "{} active qubits cannot carry {min_distinct} distinct cuts",
            used.len()
        )));
    }

    let mut lo = vec![0usize; n];
    let mut inserted = Vec::new();
    for (i, role) in roles.iter().enumerate() {
        match role {
            Role::Inverse => {
                for &q in c.gates()[i].operands() {
                    lo[q] = lo[q].max(layering.layer_of(i) + 1);
                }
            }
            Role::Inserted => inserted.push(i),
            Role::Original => {}
        }
    }

    let mut rng = derive_rng(seed, &[SPLIT_STREAM]);
    for _ in 0..MAX_ATTEMPTS {
        let &anchor = inserted
            .choose(&mut rng)
            .expect("obfuscation inserts at least one gate");
        let hi = cone_bounds(c, &layering, anchor, depth);
        let mut cuts: Vec<usize> = (0..n).map(|q| rng.gen_range(1..depth).clamp(lo[q], hi[q])).collect();
        repair(c, &layering, &mut cuts);
        let distinct = used.iter().map(|&q| cuts[q]).collect::<BTreeSet<_>>().len();
        if distinct >= min_distinct {
            return SplitManifest::from_cuts(c, cuts, seed);
        }
    }
    Err(SplitError::Infeasible(format!(
        "no cut with {min_distinct} distinct values after {MAX_ATTEMPTS} attempts"
    )))
}

/// Per qubit, the layer of the first gate in the future cone of `anchor`.
fn cone_bounds(c: &Circuit, layering: &crate::circuit::Layering, anchor: usize, depth: usize) -> Vec<usize> {
    let mut hi = vec![depth; c.num_qubits()];
    let mut reached = vec![false; c.num_qubits()];
    for &q in c.gates()[anchor].operands() {
        reached[q] = true;
        hi[q] = layering.layer_of(anchor);
    }
    for (i, g) in c.gates().iter().enumerate().skip(anchor + 1) {
        if g.operands().iter().any(|&q| reached[q]) {
            for &q in g.operands() {
                if !reached[q] {
                    reached[q] = true;
                    hi[q] = layering.layer_of(i);
                }
            }
        }
    }
    hi
}

/// Raises cuts until every gate lies wholly on one side. Straddling gates are
/// pulled left.
fn repair(c: &Circuit, layering: &crate::circuit::Layering, cuts: &mut [usize]) {
    loop {
        let mut changed = false;
        for (i, g) in c.gates().iter().enumerate() {
            let t = layering.layer_of(i);
            let ops = g.operands();
            let left = ops.iter().any(|&q| t < cuts[q]);
            let right = ops.iter().any(|&q| t >= cuts[q]);
            if left && right {
                for &q in ops {
                    cuts[q] = cuts[q].max(t + 1);
                }
                changed = true;
            }
        }
        if !changed {
            return;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::unitary;
    use crate::obfuscate::{build_obfuscated, InsertionPolicy};

    fn sample() -> Circuit {
        Circuit::from_gates(
            5,
            vec![
                Gate::cx(0, 1),
                Gate::x(0),
                Gate::cx(1, 2),
                Gate::ccx(0, 1, 2),
                Gate::cx(2, 3),
                Gate::x(3),
                Gate::cx(3, 4),
                Gate::x(4),
            ],
        )
        .unwrap()
        .with_name("sample")
    }

    fn obfuscated(seed: u64) -> ObfuscatedCircuit {
        build_obfuscated(&sample(), &InsertionPolicy::default(), seed).unwrap()
    }

    #[test]
    fn shallow_circuit_is_infeasible() {
        let c = Circuit::from_gates(2, vec![Gate::x(0), Gate::x(1)]).unwrap();
        let err = generate(&c, &[Role::Inserted, Role::Original], 0, 2).unwrap_err();
        assert!(matches!(err, SplitError::Infeasible(_)));
        let c = Circuit::from_gates(1, vec![Gate::x(0), Gate::x(0)]).unwrap();
        let err = generate(&c, &[Role::Inverse, Role::Inserted], 0, 2).unwrap_err();
        assert!(matches!(err, SplitError::Infeasible(_)));
    }

    #[test]
    fn generated_manifests_are_valid_and_deterministic() {
        for seed in 0..50 {
            let o = obfuscated(seed);
            let m = generate_interlock_pattern(&o, seed, 2).unwrap();
            assert_eq!(m, generate_interlock_pattern(&o, seed, 2).unwrap());
            assert!(m.distinct_cuts() >= 2);
            let sides = assign_sides(o.circuit(), &m.cut_layers).unwrap();
            for (side, role) in sides.iter().zip(o.roles()) {
                if *role == Role::Inverse {
                    assert_eq!(*side, Side::L, "seed {seed}");
                }
            }
            assert!(sides
                .iter()
                .zip(o.roles())
                .any(|(s, r)| *s == Side::R && *r == Role::Inserted));
        }
    }

    #[test]
    fn round_trip_is_exact() {
        for seed in 0..50 {
            let o = obfuscated(seed);
            let m = generate_interlock_pattern(&o, seed + 1000, 2).unwrap();
            let (l, r) = split(o.circuit(), &m).unwrap();
            assert_eq!(
                l.circuit.gate_count() + r.circuit.gate_count(),
                o.circuit().gate_count()
            );
            let back = recombine(&l, &r, &m).unwrap();
            assert_eq!(back.gates(), o.circuit().gates());
            assert!(unitary(&back).unwrap().approx_eq(&unitary(&sample()).unwrap(), 1e-9));
        }
    }

    #[test]
    fn straight_and_degenerate_cuts() {
        let c = sample();
        let depth = c.depth();
        let m = SplitManifest::from_cuts(&c, vec![depth; 5], 0).unwrap();
        let (l, r) = split(&c, &m).unwrap();
        assert!(r.circuit.is_empty());
        assert_eq!(l.circuit.gates(), c.gates());
        assert_eq!(recombine(&l, &r, &m).unwrap().gates(), c.canonicalize().gates());

        let m = SplitManifest::from_cuts(&c, vec![0; 5], 0).unwrap();
        let (l, r) = split(&c, &m).unwrap();
        assert!(l.circuit.is_empty());
        assert!(m.qubit_map_l.is_empty());
        assert_eq!(recombine(&l, &r, &m).unwrap().gates(), c.canonicalize().gates());
    }

    #[test]
    fn straddling_cut_rejected() {
        let c = Circuit::from_gates(2, vec![Gate::cx(0, 1), Gate::x(0)]).unwrap();
        assert!(matches!(
            SplitManifest::from_cuts(&c, vec![1, 0], 0),
            Err(SplitError::Mismatch(_))
        ));
        assert!(matches!(
            SplitManifest::from_cuts(&c, vec![3, 0], 0),
            Err(SplitError::Mismatch(_))
        ));
    }

    #[test]
    fn segments_can_differ_in_width() {
        let widths: BTreeSet<(usize, usize)> = (0..30)
            .map(|seed| {
                let o = obfuscated(seed);
                let m = generate_interlock_pattern(&o, seed, 2).unwrap();
                (m.qubit_map_l.len(), m.qubit_map_r.len())
            })
            .collect();
        assert!(widths.iter().any(|(a, b)| a != b), "{widths:?}");
    }

    #[test]
    fn tampered_map_is_rejected() {
        let o = obfuscated(3);
        let m = generate_interlock_pattern(&o, 3, 2).unwrap();
        let (l, r) = split(o.circuit(), &m).unwrap();
        let mut bad = m.clone();
        bad.qubit_map_r.pop();
        assert!(matches!(recombine(&l, &r, &bad), Err(SplitError::QubitMap(_))));
        let mut bad = m.clone();
        if bad.qubit_map_l.len() >= 2 {
            bad.qubit_map_l[1] = bad.qubit_map_l[0];
            assert!(matches!(recombine(&l, &r, &bad), Err(SplitError::QubitMap(_))));
        }
        assert!(matches!(recombine(&r, &l, &m), Err(SplitError::QubitMap(_))));
    }

    #[test]
    fn manifest_json_round_trip_and_errors() {
        let o = obfuscated(4);
        let m = generate_interlock_pattern(&o, 4, 2).unwrap();
        let text = write_manifest(&m);
        assert!(text.contains("\"qubit_map_L\""));
        assert_eq!(read_manifest(&text).unwrap(), m);
        assert_eq!(write_manifest(&read_manifest(&text).unwrap()), text);

        let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
        v.as_object_mut().unwrap().remove("cut_layers");
        let e = read_manifest(&v.to_string()).unwrap_err();
        assert!(e.message.contains("cut_layers"), "{e}");

        let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
        v["cut_layers"][0] = serde_json::json!(m.depth + 1);
        let e = read_manifest(&v.to_string()).unwrap_err();
        assert_eq!(e.path, "cut_layers[0]");
        assert!(e.message.contains("exceeds declared depth"));
    }
}
