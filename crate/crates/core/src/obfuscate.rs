//! Depth-neutral random gate insertion.
//!
//! A random circuit `R` is placed in idle slots at the start of the wires it
//! touches, and its inverse is placed in the idle slots before it, so the
//! obfuscated circuit computes `R⁻¹·R·C = C`. A slot `(layer, q)` is only
//! eligible when the original circuit has not yet touched `q` by that layer
//! ("prefix-idle"); this keeps `R⁻¹` and `R` ahead of every original gate on
//! their wires.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{circuits_equivalent, Circuit, CircuitError, Equivalence, Gate, GateKind};
use crate::io::JsonError;
use crate::rng::derive_rng;

const INSERT_STREAM: u64 = 0x696e_7365_7274;
const EQUIVALENCE_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum ObfuscationError {
    #[error("invalid policy: {0}")]
    Policy(String),
    #[error("no prefix-idle slot available for depth-neutral insertion into `{0}`")]
    NoSlot(String),
    #[error("obfuscated circuit is not equivalent to the original (deviation {0:e})")]
    NotEquivalent(f64),
    #[error("record does not match circuit: {0}")]
    RecordMismatch(String),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

/// Idle qubits per layer of the ASAP layering.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmptySlotMap {
    idle: Vec<Vec<usize>>,
}

impl EmptySlotMap {
    pub fn layers(&self) -> &[Vec<usize>] {
        &self.idle
    }

    pub fn idle(&self, layer: usize) -> &[usize] {
        &self.idle[layer]
    }

    pub fn slot_count(&self) -> usize {
        self.idle.iter().map(Vec::len).sum()
    }
}

pub fn find_empty_positions(circuit: &Circuit) -> EmptySlotMap {
    let layering = circuit.layering();
    let idle = layering
        .layers()
        .iter()
        .map(|layer| {
            let mut used = vec![false; circuit.num_qubits()];
            for &gi in layer {
                for &q in circuit.gates()[gi].operands() {
                    used[q] = true;
                }
            }
            (0..circuit.num_qubits()).filter(|&q| !used[q]).collect()
        })
        .collect();
    EmptySlotMap { idle }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InsertionPolicy {
    pub gate_limit: usize,
    pub kinds: Vec<GateKind>,
    pub cx_probability: f64,
    #[serde(default)]
    pub allow_depth_growth: bool,
}

impl Default for InsertionPolicy {
    fn default() -> Self {
        Self {
            gate_limit: 4,
            kinds: vec![GateKind::X, GateKind::CX],
            cx_probability: 0.5,
            allow_depth_growth: false,
        }
    }
}

impl InsertionPolicy {
    pub fn validate(&self) -> Result<(), ObfuscationError> {
        if self.gate_limit == 0 {
            return Err(ObfuscationError::Policy("gate_limit must be at least 1".into()));
        }
        if self.kinds.is_empty() {
            return Err(ObfuscationError::Policy("at least one gate kind is required".into()));
        }
        if let Some(k) = self
            .kinds
            .iter()
            .find(|k| !matches!(k, GateKind::X | GateKind::CX | GateKind::H))
        {
            return Err(ObfuscationError::Policy(format!("kind `{k}` cannot be inserted")));
        }
        if !(0.0..=1.0).contains(&self.cx_probability) {
            return Err(ObfuscationError::Policy("cx_probability must lie in [0, 1]".into()));
        }
        Ok(())
    }

    fn single_kinds(&self) -> Vec<GateKind> {
        let mut kinds: Vec<GateKind> = self.kinds.iter().copied().filter(|k| k.arity() == 1).collect();
        kinds.sort();
        kinds.dedup();
        kinds
    }

    fn allows_cx(&self) -> bool {
        self.kinds.contains(&GateKind::CX)
    }
}

/// A gate placed at a layer of the original circuit's layering.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Placement {
    pub layer: usize,
    pub gate: Gate,
}

/// Everything the owner needs to undo and verify an obfuscation.
#[derive(Debug, Clone, PartialEq)]
pub struct ObfuscationRecord {
    pub seed: u64,
    pub policy: InsertionPolicy,
    pub original_name: String,
    pub num_qubits: usize,
    /// `R`'s gates in program order, one per column.
    pub insertions: Vec<Placement>,
    /// Placement of `R⁻¹`'s gates; empty layers mean the inverse was
    /// prepended as new leading layers.
    pub inverse: Vec<Placement>,
    pub depth_delta: usize,
}

impl ObfuscationRecord {
    /// The random circuit `R`.
    pub fn random_circuit(&self) -> Circuit {
        let gates = self.insertions.iter().map(|p| p.gate.clone()).collect();
        Circuit::from_gates(self.num_qubits, gates).expect("record gates fit the register")
    }

    pub fn inverse_circuit(&self) -> Circuit {
        self.random_circuit().invert()
    }
}

/// Per-wire scheduling bounds derived from the original layering.
struct Slots {
    depth: usize,
    first_use: Vec<usize>,
}

impl Slots {
    fn new(circuit: &Circuit) -> Self {
        let layering = circuit.layering();
        Self {
            depth: layering.depth(),
            first_use: layering.first_use(circuit),
        }
    }

    fn prefix_idle(&self, layer: usize) -> Vec<usize> {
        (0..self.first_use.len())
            .filter(|&q| self.first_use[q] > layer)
            .collect()
    }

    /// Latest-possible layers for `R⁻¹` so that, on every wire, its gates
    /// precede `R`'s gates and the original circuit. `None` if it does not
    /// fit in the prefix-idle region.
    fn place_inverse(&self, insertions: &[Placement]) -> Option<Vec<usize>> {
        let mut next = self.first_use.clone();
        for p in insertions {
            for &q in p.gate.operands() {
                next[q] = next[q].min(p.layer);
            }
        }
        // R⁻¹ runs r_k†..r_1†; walking it backwards visits r_1† first.
        let mut layers = Vec::with_capacity(insertions.len());
        for p in insertions {
            let layer = p.gate.operands().iter().map(|&q| next[q]).min()?.checked_sub(1)?;
            for &q in p.gate.operands() {
                next[q] = layer;
            }
            layers.push(layer);
        }
        // layers[j] belongs to r_j†; report them in R⁻¹ program order.
        layers.reverse();
        Some(layers)
    }
}

/// Walks the columns of `circuit` and picks `R` (Algorithm-1 style): one gate
/// per column, CX with probability `cx_probability` when a pair is available,
/// otherwise a single-qubit gate on a random eligible qubit.
pub fn insert_random_gates(
    circuit: &Circuit,
    policy: &InsertionPolicy,
    seed: u64,
) -> Result<ObfuscationRecord, ObfuscationError> {
    policy.validate()?;
    let slots = Slots::new(circuit);
    let mut rng = derive_rng(seed, &[INSERT_STREAM]);
    let singles = policy.single_kinds();
    let mut insertions: Vec<Placement> = Vec::new();

    let fits = |current: &[Placement], candidate: Placement| -> bool {
        if policy.allow_depth_growth {
            return true;
        }
        let mut trial = current.to_vec();
        trial.push(candidate);
        slots.place_inverse(&trial).is_some()
    };

    for column in 0..slots.depth {
        if insertions.len() >= policy.gate_limit {
            break;
        }
        let eligible = slots.prefix_idle(column);
        if eligible.is_empty() {
            continue;
        }
        let u: f64 = rng.gen();
        let want_cx = policy.allows_cx() && (u < policy.cx_probability || singles.is_empty());
        if want_cx {
            let pairs: Vec<(usize, usize)> = eligible
                .iter()
                .enumerate()
                .flat_map(|(i, &a)| eligible[i + 1..].iter().map(move |&b| (a, b)))
                .filter(|&(a, b)| {
                    fits(
                        &insertions,
                        Placement {
                            layer: column,
                            gate: Gate::cx(a, b),
                        },
                    )
                })
                .collect();
            if let Some(&(a, b)) = pairs.choose(&mut rng) {
                insertions.push(Placement {
                    layer: column,
                    gate: Gate::cx(a, b),
                });
                continue;
            }
        }
        if singles.is_empty() {
            continue;
        }
        let qubits: Vec<usize> = eligible
            .iter()
            .copied()
            .filter(|&q| {
                fits(
                    &insertions,
                    Placement {
                        layer: column,
                        gate: Gate::x(q),
                    },
                )
            })
            .collect();
        if let Some(&q) = qubits.choose(&mut rng) {
            let kind = *singles.choose(&mut rng).expect("non-empty");
            insertions.push(Placement {
                layer: column,
                gate: Gate::single(kind, q),
            });
        }
    }

    if insertions.is_empty() {
        return Err(ObfuscationError::NoSlot(circuit.name().to_string()));
    }

    let inverse_gates: Vec<Gate> = insertions.iter().rev().map(|p| p.gate.adjoint()).collect();
    let inverse = match slots.place_inverse(&insertions) {
        Some(layers) => inverse_gates
            .into_iter()
            .zip(layers)
            .map(|(gate, layer)| Placement { layer, gate })
            .collect(),
        None => Vec::new(),
    };
    Ok(ObfuscationRecord {
        seed,
        policy: policy.clone(),
        original_name: circuit.name().to_string(),
        num_qubits: circuit.num_qubits(),
        insertions,
        inverse,
        depth_delta: 0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Original,
    Inverse,
    Inserted,
}

/// `R⁻¹·R·C` laid out in the original circuit's idle slots, in canonical
/// gate order, together with the record that produced it.
#[derive(Debug, Clone)]
pub struct ObfuscatedCircuit {
    circuit: Circuit,
    record: ObfuscationRecord,
    roles: Vec<Role>,
    equivalence: Option<Equivalence>,
}

impl ObfuscatedCircuit {
    pub fn circuit(&self) -> &Circuit {
        &self.circuit
    }

    pub fn record(&self) -> &ObfuscationRecord {
        &self.record
    }

    pub fn roles(&self) -> &[Role] {
        &self.roles
    }

    /// Result of the functional check done at construction, if any.
    pub fn equivalence(&self) -> Option<&Equivalence> {
        self.equivalence.as_ref()
    }

    pub fn indices_with(&self, role: Role) -> Vec<usize> {
        (0..self.roles.len()).filter(|&i| self.roles[i] == role).collect()
    }

    /// Rebuilds the role of each gate from a circuit and its record, e.g.
    /// after reading both from disk. On each wire the first gates must be
    /// `R⁻¹`'s, then `R`'s, then the original circuit's.
    pub fn from_parts(circuit: Circuit, record: ObfuscationRecord) -> Result<Self, ObfuscationError> {
        if circuit.num_qubits() != record.num_qubits {
            return Err(ObfuscationError::RecordMismatch(format!(
                "record is for {} qubits, circuit has {}",
                record.num_qubits,
                circuit.num_qubits()
            )));
        }
        let r = record.random_circuit();
        let r_inv = r.invert();
        let inv_counts = r_inv.gates_per_qubit();
        let r_counts = r.gates_per_qubit();
        let mut seen = vec![0usize; circuit.num_qubits()];
        let mut roles = Vec::with_capacity(circuit.gate_count());
        for (i, g) in circuit.gates().iter().enumerate() {
            let role_on = |q: usize| {
                if seen[q] < inv_counts[q] {
                    Role::Inverse
                } else if seen[q] < inv_counts[q] + r_counts[q] {
                    Role::Inserted
                } else {
                    Role::Original
                }
            };
            let role = role_on(g.operands()[0]);
            if g.operands().iter().any(|&q| role_on(q) != role) {
                return Err(ObfuscationError::RecordMismatch(format!(
                    "gate {i} ({g}) straddles the inserted prefix"
                )));
            }
            for &q in g.operands() {
                seen[q] += 1;
            }
            roles.push(role);
        }
        let pick = |role: Role| -> Circuit {
            let gates = circuit
                .gates()
                .iter()
                .zip(&roles)
                .filter(|(_, r)| **r == role)
                .map(|(g, _)| g.clone())
                .collect();
            circuit.replace_gates(gates)
        };
        if pick(Role::Inverse).wire_sequences() != r_inv.wire_sequences() {
            return Err(ObfuscationError::RecordMismatch(
                "inverse gates differ from record".into(),
            ));
        }
        if pick(Role::Inserted).wire_sequences() != r.wire_sequences() {
            return Err(ObfuscationError::RecordMismatch(
                "inserted gates differ from record".into(),
            ));
        }
        Ok(Self {
            circuit,
            record,
            roles,
            equivalence: None,
        })
    }

    /// The part an adversary holding only `R·C` would see: every gate except
    /// `R⁻¹`'s.
    pub fn strip_inverse(&self) -> Circuit {
        let gates = self
            .circuit
            .gates()
            .iter()
            .zip(&self.roles)
            .filter(|(_, r)| **r != Role::Inverse)
            .map(|(g, _)| g.clone())
            .collect();
        self.circuit.replace_gates(gates)
    }
}

/// Runs the insertion walk and assembles `R⁻¹·R·C`.
///
/// When `R⁻¹` cannot be placed in prefix-idle slots (only possible with
/// `allow_depth_growth`), it is prepended and the added depth is recorded.
pub fn build_obfuscated(
    circuit: &Circuit,
    policy: &InsertionPolicy,
    seed: u64,
) -> Result<ObfuscatedCircuit, ObfuscationError> {
    let mut record = insert_random_gates(circuit, policy, seed)?;
    let layering = circuit.layering();

    let mut scheduled: Vec<(usize, Gate, Role)> = Vec::new();
    let mut prefix: Vec<(Gate, Role)> = Vec::new();
    if record.inverse.is_empty() {
        prefix.extend(
            record
                .inverse_circuit()
                .gates()
                .iter()
                .map(|g| (g.clone(), Role::Inverse)),
        );
    } else {
        scheduled.extend(record.inverse.iter().map(|p| (p.layer, p.gate.clone(), Role::Inverse)));
    }
    scheduled.extend(
        record
            .insertions
            .iter()
            .map(|p| (p.layer, p.gate.clone(), Role::Inserted)),
    );
    scheduled.extend(
        circuit
            .gates()
            .iter()
            .enumerate()
            .map(|(i, g)| (layering.layer_of(i), g.clone(), Role::Original)),
    );
    // Stable: R⁻¹ entries precede R entries at the same layer only on
    // disjoint wires, so ties never reorder a wire.
    scheduled.sort_by_key(|(layer, g, _)| (*layer, g.min_operand()));

    let (gates, roles): (Vec<Gate>, Vec<Role>) = prefix
        .into_iter()
        .chain(scheduled.into_iter().map(|(_, g, r)| (g, r)))
        .unzip();
    let draft = circuit.replace_gates(gates);
    let order = draft.canonical_order();
    let obfuscated = draft.replace_gates(order.iter().map(|&i| draft.gates()[i].clone()).collect());
    let roles: Vec<Role> = order.iter().map(|&i| roles[i]).collect();

    record.depth_delta = obfuscated.depth().saturating_sub(circuit.depth());
    let equivalence = circuits_equivalent(&obfuscated, circuit, EQUIVALENCE_TOL, seed)?;
    if !equivalence.equivalent {
        return Err(ObfuscationError::NotEquivalent(equivalence.max_deviation));
    }
    Ok(ObfuscatedCircuit {
        circuit: obfuscated,
        record,
        roles,
        equivalence: Some(equivalence),
    })
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PlacementDto {
    layer: Option<usize>,
    kind: GateKind,
    operands: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RecordDto {
    version: u32,
    original_name: String,
    num_qubits: usize,
    seed: u64,
    policy: InsertionPolicy,
    insertions: Vec<PlacementDto>,
    inverse: Vec<PlacementDto>,
    depth_delta: usize,
}

pub fn write_record(record: &ObfuscationRecord) -> String {
    let dto = |p: &Placement| PlacementDto {
        layer: Some(p.layer),
        kind: p.gate.kind(),
        operands: p.gate.operands().to_vec(),
    };
    let inverse = if record.inverse.is_empty() {
        record
            .inverse_circuit()
            .gates()
            .iter()
            .map(|g| PlacementDto {
                layer: None,
                kind: g.kind(),
                operands: g.operands().to_vec(),
            })
            .collect()
    } else {
        record.inverse.iter().map(dto).collect()
    };
    crate::io::to_json(&RecordDto {
        version: 1,
        original_name: record.original_name.clone(),
        num_qubits: record.num_qubits,
        seed: record.seed,
        policy: record.policy.clone(),
        insertions: record.insertions.iter().map(dto).collect(),
        inverse,
        depth_delta: record.depth_delta,
    })
}

pub fn read_record(text: &str) -> Result<ObfuscationRecord, JsonError> {
    let dto: RecordDto = crate::io::from_json(text)?;
    if dto.version != 1 {
        return Err(JsonError::new(
            "version",
            format!("unsupported version {}", dto.version),
        ));
    }
    if dto.num_qubits == 0 {
        return Err(JsonError::new("num_qubits", "must be positive"));
    }
    let to_gate = |path: String, p: &PlacementDto| -> Result<Gate, JsonError> {
        let g = Gate::new(p.kind, p.operands.clone()).map_err(|e| JsonError::new(path.clone(), e.to_string()))?;
        if let Some(&q) = g.operands().iter().find(|&&q| q >= dto.num_qubits) {
            return Err(JsonError::new(path, format!("operand {q} out of range")));
        }
        Ok(g)
    };
    let mut insertions = Vec::new();
    for (i, p) in dto.insertions.iter().enumerate() {
        let path = format!("insertions[{i}]");
        let layer = p
            .layer
            .ok_or_else(|| JsonError::new(format!("{path}.layer"), "insertions need a layer"))?;
        insertions.push(Placement {
            layer,
            gate: to_gate(path, p)?,
        });
    }
    if insertions.is_empty() {
        return Err(JsonError::new("insertions", "record has no insertions"));
    }
    if insertions.len() > dto.policy.gate_limit {
        return Err(JsonError::new("insertions", "more insertions than gate_limit"));
    }
    let expected: Vec<Gate> = insertions.iter().rev().map(|p| p.gate.adjoint()).collect();
    if dto.inverse.len() != expected.len() {
        return Err(JsonError::new("inverse", "inverse length differs from insertions"));
    }
    let mut inverse = Vec::new();
    for (i, (p, want)) in dto.inverse.iter().zip(&expected).enumerate() {
        let path = format!("inverse[{i}]");
        let g = to_gate(path.clone(), p)?;
        if &g != want {
            return Err(JsonError::new(path, format!("expected {want}, found {g}")));
        }
        if let Some(layer) = p.layer {
            inverse.push(Placement { layer, gate: g });
        }
    }
    if !inverse.is_empty() && inverse.len() != expected.len() {
        return Err(JsonError::new("inverse", "either every or no inverse gate has a layer"));
    }
    Ok(ObfuscationRecord {
        seed: dto.seed,
        policy: dto.policy,
        original_name: dto.original_name,
        num_qubits: dto.num_qubits,
        insertions,
        inverse,
        depth_delta: dto.depth_delta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{run_classical, unitary};

    fn circ(n: usize, gates: Vec<Gate>) -> Circuit {
        Circuit::from_gates(n, gates).unwrap()
    }

    /// A circuit with a long idle prefix on qubits 2 and 3.
    fn staircase() -> Circuit {
        circ(
            4,
            vec![
                Gate::cx(0, 1),
                Gate::x(0),
                Gate::cx(1, 0),
                Gate::cx(0, 2),
                Gate::ccx(0, 2, 3),
                Gate::x(3),
            ],
        )
    }

    #[test]
    fn empty_positions() {
        let c = circ(3, vec![Gate::cx(0, 1)]);
        assert_eq!(find_empty_positions(&c).layers(), &[vec![2]]);

        let c = circ(2, vec![Gate::cx(0, 1)]);
        assert_eq!(find_empty_positions(&c).idle(0), &[] as &[usize]);

        let c = circ(2, vec![Gate::x(0), Gate::x(0)]);
        assert_eq!(find_empty_positions(&c).layers(), &[vec![1], vec![1]]);
    }

    #[test]
    fn dense_circuit_has_no_slot() {
        let c = circ(2, vec![Gate::cx(0, 1), Gate::cx(1, 0), Gate::cx(0, 1)]);
        let err = build_obfuscated(&c, &InsertionPolicy::default(), 1).unwrap_err();
        assert!(matches!(err, ObfuscationError::NoSlot(_)));
        assert!(err.to_string().contains("no prefix-idle slot"));
    }

    #[test]
    fn policy_validation() {
        let p = InsertionPolicy {
            gate_limit: 0,
            ..Default::default()
        };
        assert!(p.validate().is_err());
        let p = InsertionPolicy {
            kinds: vec![],
            ..Default::default()
        };
        assert!(p.validate().is_err());
        let p = InsertionPolicy {
            kinds: vec![GateKind::T],
            ..Default::default()
        };
        assert!(p.validate().is_err());
        let p = InsertionPolicy {
            cx_probability: 1.5,
            ..Default::default()
        };
        assert!(p.validate().is_err());
    }

    #[test]
    fn deterministic_per_seed() {
        let c = staircase();
        let p = InsertionPolicy::default();
        let a = insert_random_gates(&c, &p, 11).unwrap();
        let b = insert_random_gates(&c, &p, 11).unwrap();
        assert_eq!(a, b);
        let oa = build_obfuscated(&c, &p, 11).unwrap();
        let ob = build_obfuscated(&c, &p, 11).unwrap();
        assert_eq!(oa.circuit(), ob.circuit());
    }

    #[test]
    fn depth_neutral_and_equivalent_across_seeds() {
        let c = staircase();
        let u = unitary(&c).unwrap();
        for seed in 0..100 {
            let o = build_obfuscated(&c, &InsertionPolicy::default(), seed).unwrap();
            let rec = o.record();
            assert_eq!(o.circuit().depth(), c.depth(), "seed {seed}");
            assert_eq!(rec.depth_delta, 0);
            assert!(rec.insertions.len() <= 4);
            assert_eq!(o.circuit().gate_count() - c.gate_count(), 2 * rec.insertions.len());
            assert!(unitary(o.circuit()).unwrap().approx_eq(&u, 1e-9));
            // every insertion sits in a prefix-idle slot of the original
            let first = c.layering().first_use(&c);
            for p in rec.insertions.iter().chain(&rec.inverse) {
                assert!(p.gate.operands().iter().all(|&q| first[q] > p.layer));
            }
        }
    }

    #[test]
    fn growth_mode_prepends_when_inverse_does_not_fit() {
        // q1 is idle only in layer 0, so R can go there but R⁻¹ cannot.
        let c = circ(2, vec![Gate::x(0), Gate::cx(0, 1)]);
        let strict = build_obfuscated(&c, &InsertionPolicy::default(), 3);
        assert!(matches!(strict, Err(ObfuscationError::NoSlot(_))));
        let policy = InsertionPolicy {
            allow_depth_growth: true,
            kinds: vec![GateKind::X],
            ..Default::default()
        };
        let o = build_obfuscated(&c, &policy, 3).unwrap();
        assert!(o.record().inverse.is_empty());
        assert_eq!(o.record().depth_delta, 1);
        assert_eq!(o.circuit().depth(), c.depth() + 1);
        assert!(o.equivalence().unwrap().equivalent);
    }

    #[test]
    fn stripping_the_inverse_exposes_r() {
        let mut c = circ(2, vec![Gate::x(0), Gate::x(0)]);
        c.set_measured(Some(vec![1])).unwrap();
        let policy = InsertionPolicy {
            gate_limit: 1,
            kinds: vec![GateKind::X],
            ..Default::default()
        };
        let o = build_obfuscated(&c, &policy, 5).unwrap();
        assert_eq!(o.record().insertions[0].gate, Gate::x(1));
        let rc = o.strip_inverse();
        assert_eq!(run_classical(&c, 0), Some(0));
        assert_eq!(run_classical(&rc, 0), Some(0b10));
        let restored = o.record().inverse_circuit().compose(&rc).unwrap();
        assert!(unitary(&restored).unwrap().approx_eq(&unitary(&c).unwrap(), 1e-12));
    }

    #[test]
    fn record_round_trip_and_role_recovery() {
        let c = staircase();
        let o = build_obfuscated(&c, &InsertionPolicy::default(), 9).unwrap();
        let text = write_record(o.record());
        let rec = read_record(&text).unwrap();
        assert_eq!(&rec, o.record());
        let again = ObfuscatedCircuit::from_parts(o.circuit().clone(), rec).unwrap();
        assert_eq!(again.roles(), o.roles());

        let bad = text.replace("\"gate_limit\": 4", "\"gate_limit\": 0");
        assert!(read_record(&bad).is_err());
        let e = read_record(&text.replace("\"seed\"", "\"sed\"")).unwrap_err();
        assert!(e.message.contains("sed") || e.message.contains("seed"), "{e}");
    }

    #[test]
    fn h_insertions_stay_equivalent() {
        let c = staircase();
        let policy = InsertionPolicy {
            kinds: vec![GateKind::H, GateKind::CX],
            ..Default::default()
        };
        for seed in 0..20 {
            let o = build_obfuscated(&c, &policy, seed).unwrap();
            assert!(unitary(o.circuit()).unwrap().approx_eq(&unitary(&c).unwrap(), 1e-9));
        }
    }
}
