//! Size of the search space facing two colluding compilers.
//!
//! An adversary holding an `n`-qubit segment must guess which of its qubits
//! continue into a candidate segment with `i` qubits, and how. Every
//! injective partial map between the two qubit sets is a candidate, giving
//! `Σ_j C(n,j)·C(i,j)·j!` per candidate segment.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::circuit::{unitary, Circuit, CircuitError, Matrix};
use crate::split::Segment;

/// Largest `n`, `i` accepted by [`enumerate_mappings`].
pub const MAX_ENUMERATION_QUBITS: usize = 8;
/// Largest combined segment width accepted by [`collusion_reconstruct`].
pub const MAX_COLLUSION_QUBITS: usize = 6;

#[derive(Debug, Error, PartialEq)]
pub enum AttackError {
    #[error("invalid parameters: {0}")]
    Params(String),
    #[error("{what} = {value} exceeds the enumeration limit of {limit}")]
    Scale {
        what: &'static str,
        value: usize,
        limit: usize,
    },
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

/// `k[i-1]` counts the candidate segments with `i` qubits, `i = 1..=n_max`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttackParams {
    pub n: usize,
    pub n_max: usize,
    pub k: Vec<u64>,
}

impl AttackParams {
    pub fn new(n: usize, n_max: usize, k: Vec<u64>) -> Result<Self, AttackError> {
        if n == 0 || n > n_max {
            return Err(AttackError::Params(format!(
                "need 1 <= n <= n_max, got n={n}, n_max={n_max}"
            )));
        }
        if k.len() != n_max {
            return Err(AttackError::Params(format!(
                "k has {} entries, expected n_max = {n_max}",
                k.len()
            )));
        }
        Ok(Self { n, n_max, k })
    }

    pub fn k_n(&self) -> u64 {
        self.k[self.n - 1]
    }
}

pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    (0..k).fold(BigUint::one(), |acc, j| acc * (n - j) / (j + 1))
}

pub fn factorial(n: usize) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, x| acc * x)
}

/// Number of injective partial maps between an `n`-set and an `i`-set.
pub fn mapping_count(n: usize, i: usize) -> BigUint {
    (0..=n.min(i))
        .map(|j| binomial(n, j) * binomial(i, j) * factorial(j))
        .sum()
}

/// `Σ_i k_i · Σ_j C(n,j)·C(i,j)·j!`, exactly.
pub fn attack_complexity(p: &AttackParams) -> BigUint {
    p.k.iter()
        .enumerate()
        .map(|(idx, &k)| BigUint::from(k) * mapping_count(p.n, idx + 1))
        .sum()
}

/// `k_n · n!`: the search space when only same-width bijections count.
pub fn baseline_complexity(n: usize, k_n: u64) -> BigUint {
    BigUint::from(k_n) * factorial(n)
}

/// Calls `visit` on every injective partial map from `0..n` into `0..i`,
/// given as `map[a] = Some(b)` or `None`.
pub fn for_each_mapping(n: usize, i: usize, mut visit: impl FnMut(&[Option<usize>])) {
    fn go(a: usize, map: &mut Vec<Option<usize>>, used: &mut Vec<bool>, visit: &mut dyn FnMut(&[Option<usize>])) {
        if a == map.len() {
            visit(map);
            return;
        }
        map[a] = None;
        go(a + 1, map, used, visit);
        for b in 0..used.len() {
            if !used[b] {
                used[b] = true;
                map[a] = Some(b);
                go(a + 1, map, used, visit);
                used[b] = false;
            }
        }
        map[a] = None;
    }
    go(0, &mut vec![None; n], &mut vec![false; i], &mut visit);
}

/// Counts the maps of [`for_each_mapping`] by generating each one.
pub fn enumerate_mappings(n: usize, i: usize) -> Result<u64, AttackError> {
    for (what, value) in [("n", n), ("i", i)] {
        if value > MAX_ENUMERATION_QUBITS {
            return Err(AttackError::Scale {
                what,
                value,
                limit: MAX_ENUMERATION_QUBITS,
            });
        }
    }
    let mut count = 0u64;
    for_each_mapping(n, i, |_| count += 1);
    Ok(count)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CollusionResult {
    pub examined: u64,
    /// For each right-segment qubit, the left-segment qubit it continues, if
    /// any.
    pub consistent: Vec<Vec<Option<usize>>>,
}

/// Brute-force reconstruction by two colluding compilers.
///
/// Every injective partial map joining right-segment wires onto
/// left-segment wires yields one candidate circuit (left gates, then right
/// gates). A candidate is consistent when, after some relabelling of its
/// wires, its unitary equals `oracle` within 1e-9.
pub fn collusion_reconstruct(l: &Segment, r: &Segment, oracle: &Matrix) -> Result<CollusionResult, AttackError> {
    let (nl, nr) = (l.circuit.num_qubits(), r.circuit.num_qubits());
    if nl + nr > MAX_COLLUSION_QUBITS {
        return Err(AttackError::Scale {
            what: "combined segment qubits",
            value: nl + nr,
            limit: MAX_COLLUSION_QUBITS,
        });
    }
    let width = oracle.dim().trailing_zeros() as usize;
    let perms = basis_permutations(width);
    let mut result = CollusionResult {
        examined: 0,
        consistent: Vec::new(),
    };
    let mut failure = None;
    for_each_mapping(nr, nl, |map| {
        result.examined += 1;
        if failure.is_some() {
            return;
        }
        match candidate(l, r, map, width) {
            Ok(Some(c)) => match unitary(&c) {
                Ok(u) => {
                    if perms.iter().any(|p| matches_under(&u, oracle, p)) {
                        result.consistent.push(map.to_vec());
                    }
                }
                Err(e) => failure = Some(e),
            },
            Ok(None) => {}
            Err(e) => failure = Some(e),
        }
    });
    match failure {
        Some(e) => Err(e.into()),
        None => Ok(result),
    }
}

/// Left wires keep their indices; unmatched right wires get fresh ones.
fn candidate(l: &Segment, r: &Segment, map: &[Option<usize>], width: usize) -> Result<Option<Circuit>, CircuitError> {
    let nl = l.circuit.num_qubits();
    let mut wire = Vec::with_capacity(map.len());
    let mut next = nl;
    for m in map {
        wire.push(m.unwrap_or_else(|| {
            next += 1;
            next - 1
        }));
    }
    if next > width {
        return Ok(None);
    }
    let mut c = Circuit::new(width)?;
    for g in l.circuit.gates() {
        c.push(g.clone())?;
    }
    for g in r.circuit.gates() {
        c.push(g.remap(|q| wire[q]))?;
    }
    Ok(Some(c))
}

/// Basis-index images for every permutation of `n` qubit labels.
fn basis_permutations(n: usize) -> Vec<Vec<usize>> {
    let mut labels: Vec<usize> = (0..n).collect();
    let mut out = Vec::new();
    permute(&mut labels, 0, &mut |pi| {
        out.push(
            (0..1usize << n)
                .map(|x| (0..n).fold(0, |acc, q| acc | (((x >> q) & 1) << pi[q])))
                .collect(),
        )
    });
    out
}

fn permute(labels: &mut Vec<usize>, k: usize, visit: &mut dyn FnMut(&[usize])) {
    if k == labels.len() {
        visit(labels);
        return;
    }
    for i in k..labels.len() {
        labels.swap(k, i);
        permute(labels, k + 1, visit);
        labels.swap(k, i);
    }
}

fn matches_under(u: &Matrix, oracle: &Matrix, basis: &[usize]) -> bool {
    let dim = u.dim();
    (0..dim).all(|x| (0..dim).all(|y| (u.get(x, y) - oracle.get(basis[x], basis[y])).norm() <= 1e-9))
}
