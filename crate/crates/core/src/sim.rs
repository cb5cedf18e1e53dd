//! Shot sampling with a synthetic bit-flip noise model, plus the distance
//! metrics used in reports.
//!
//! Outcome strings list classical bit `b-1` first, so with a full-register
//! measurement the string reads like the basis index in binary.

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{apply_x, basis_state, step_classical, Circuit, CircuitError, StateVector};
use crate::io::JsonError;
use crate::rng::derive_rng;

const SAMPLE_STREAM: u64 = 0x7361_6d70;
const NOISE_STREAM: u64 = 0x6e6f_6973;

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error("invalid noise model: {0}")]
    Noise(String),
    #[error("shot counts differ: {0} vs {1}")]
    ShotMismatch(u64, u64),
    #[error("outcome widths differ: {0} vs {1} bits")]
    WidthMismatch(usize, usize),
    #[error("invalid distribution: {0}")]
    Distribution(String),
    #[error("shots must be at least 1")]
    NoShots,
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

/// Independent X flips: after each one-qubit gate with probability `p1`, on
/// each operand of a multi-qubit gate with probability `p2`, and on each
/// measured bit with probability `pm`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseModel {
    pub p1: f64,
    pub p2: f64,
    pub pm: f64,
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self {
            p1: 0.001,
            p2: 0.01,
            pm: 0.02,
        }
    }
}

impl NoiseModel {
    pub fn noiseless() -> Self {
        Self {
            p1: 0.0,
            p2: 0.0,
            pm: 0.0,
        }
    }

    pub fn new(p1: f64, p2: f64, pm: f64) -> Result<Self, SimError> {
        let m = Self { p1, p2, pm };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<(), SimError> {
        for (name, p) in [("p1", self.p1), ("p2", self.p2), ("pm", self.pm)] {
            if !(0.0..=0.5).contains(&p) {
                return Err(SimError::Noise(format!("{name} = {p} is outside [0, 0.5]")));
            }
        }
        Ok(())
    }

    pub fn is_noiseless(&self) -> bool {
        self.p1 == 0.0 && self.p2 == 0.0 && self.pm == 0.0
    }
}

/// Outcome histogram over `shots` runs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CountDist {
    pub shots: u64,
    pub counts: BTreeMap<String, u64>,
}

impl CountDist {
    /// Checks `Σ counts == shots` and that keys are equal-width bit strings.
    pub fn new(shots: u64, counts: BTreeMap<String, u64>) -> Result<Self, SimError> {
        let d = Self { shots, counts };
        d.validate()?;
        Ok(d)
    }

    fn validate(&self) -> Result<(), SimError> {
        if self.shots == 0 {
            return Err(SimError::NoShots);
        }
        let total: u64 = self.counts.values().sum();
        if total != self.shots {
            return Err(SimError::Distribution(format!(
                "counts sum to {total}, expected {}",
                self.shots
            )));
        }
        let width = self.width();
        for key in self.counts.keys() {
            if key.len() != width || key.is_empty() || !key.bytes().all(|b| b == b'0' || b == b'1') {
                return Err(SimError::Distribution(format!("bad outcome key `{key}`")));
            }
        }
        Ok(())
    }

    pub fn width(&self) -> usize {
        self.counts.keys().next().map_or(0, String::len)
    }

    pub fn count(&self, outcome: &str) -> u64 {
        self.counts.get(outcome).copied().unwrap_or(0)
    }

    pub fn to_json(&self) -> String {
        crate::io::to_json(self)
    }

    pub fn from_json(text: &str) -> Result<Self, JsonError> {
        let d: CountDist = crate::io::from_json(text)?;
        d.validate().map_err(|e| JsonError::new("counts", e.to_string()))?;
        Ok(d)
    }
}

/// Outcome string for `state` read through `measured`.
pub fn outcome_string(state: usize, measured: &[usize]) -> String {
    measured
        .iter()
        .rev()
        .map(|&q| if (state >> q) & 1 == 1 { '1' } else { '0' })
        .collect()
}

pub fn run_statevector(c: &Circuit, input: usize) -> Result<StateVector, SimError> {
    Ok(StateVector::run(c, input)?)
}

/// Exact outcome probabilities over the measured qubits.
pub fn exact_distribution(c: &Circuit, input: usize) -> Result<BTreeMap<String, f64>, SimError> {
    let measured = c.output_qubits();
    let mut out = BTreeMap::new();
    if let Some(state) = classical_run(c, input)? {
        out.insert(outcome_string(state, &measured), 1.0);
        return Ok(out);
    }
    let sv = StateVector::run(c, input)?;
    for (idx, p) in sv.probabilities().into_iter().enumerate() {
        if p > 0.0 {
            *out.entry(outcome_string(idx, &measured)).or_insert(0.0) += p;
        }
    }
    Ok(out)
}

/// Most probable noiseless outcome; ties go to the smaller string.
pub fn ideal_outcome(c: &Circuit, input: usize) -> Result<String, SimError> {
    let dist = exact_distribution(c, input)?;
    let best = dist
        .iter()
        .fold(None::<(&String, f64)>, |best, (k, &p)| match best {
            Some((_, bp)) if bp >= p => best,
            _ => Some((k, p)),
        })
        .expect("distributions are non-empty");
    Ok(best.0.clone())
}

fn classical_run(c: &Circuit, input: usize) -> Result<Option<usize>, SimError> {
    if input >> c.num_qubits() != 0 {
        return Err(CircuitError::QubitOutOfRange {
            qubit: input,
            num_qubits: c.num_qubits(),
        }
        .into());
    }
    Ok(crate::circuit::run_classical(c, input))
}

/// Samples `shots` outcomes of `c` started in basis state `input`.
///
/// Noisy runs use one random stream per (shot, qubit), so two circuits with
/// the same per-wire gate sequence see identical noise.
pub fn sample_counts(
    c: &Circuit,
    input: usize,
    shots: u64,
    noise: &NoiseModel,
    seed: u64,
) -> Result<CountDist, SimError> {
    if shots == 0 {
        return Err(SimError::NoShots);
    }
    noise.validate()?;
    let measured = c.output_qubits();
    let mut counts = BTreeMap::new();
    if noise.is_noiseless() {
        if let Some(state) = classical_run(c, input)? {
            counts.insert(outcome_string(state, &measured), shots);
        } else {
            let dist = exact_distribution(c, input)?;
            let keys: Vec<&String> = dist.keys().collect();
            let mut cdf = Vec::with_capacity(keys.len());
            let mut acc = 0.0;
            for p in dist.values() {
                acc += p;
                cdf.push(acc);
            }
            let mut rng = derive_rng(seed, &[SAMPLE_STREAM]);
            for _ in 0..shots {
                let u: f64 = rng.gen::<f64>() * acc;
                let i = cdf.partition_point(|&x| x <= u).min(keys.len() - 1);
                *counts.entry(keys[i].clone()).or_insert(0) += 1;
            }
        }
        return CountDist::new(shots, counts);
    }

    let classical = classical_run(c, input)?.is_some();
    let n = c.num_qubits();
    if !classical {
        basis_state(n, input)?;
    }
    for shot in 0..shots {
        let mut streams: Vec<ChaCha8Rng> = (0..n)
            .map(|q| derive_rng(seed, &[NOISE_STREAM, shot, q as u64]))
            .collect();
        let state = if classical {
            noisy_classical(c, input, noise, &mut streams)
        } else {
            noisy_statevector(c, input, noise, &mut streams)?
        };
        let mut outcome = state;
        for &q in &measured {
            if streams[q].gen::<f64>() < noise.pm {
                outcome ^= 1 << q;
            }
        }
        *counts.entry(outcome_string(outcome, &measured)).or_insert(0) += 1;
    }
    CountDist::new(shots, counts)
}

fn flip_probability(noise: &NoiseModel, arity: usize) -> f64 {
    if arity == 1 {
        noise.p1
    } else {
        noise.p2
    }
}

fn noisy_classical(c: &Circuit, input: usize, noise: &NoiseModel, streams: &mut [ChaCha8Rng]) -> usize {
    let mut state = input;
    for g in c.gates() {
        state = step_classical(state, g).expect("checked classical");
        let p = flip_probability(noise, g.operands().len());
        for &q in g.operands() {
            if streams[q].gen::<f64>() < p {
                state ^= 1 << q;
            }
        }
    }
    state
}

/// One trajectory; returns a measured basis index drawn from the final state.
fn noisy_statevector(
    c: &Circuit,
    input: usize,
    noise: &NoiseModel,
    streams: &mut [ChaCha8Rng],
) -> Result<usize, SimError> {
    let mut amps = basis_state(c.num_qubits(), input)?.amplitudes().to_vec();
    for g in c.gates() {
        crate::circuit::apply_gate(&mut amps, g);
        let p = flip_probability(noise, g.operands().len());
        for &q in g.operands() {
            if streams[q].gen::<f64>() < p {
                apply_x(&mut amps, q);
            }
        }
    }
    // Collapse qubit by qubit on each qubit's own stream.
    let mut state = 0usize;
    let mut weight = 1.0;
    for (q, stream) in streams.iter_mut().enumerate().take(c.num_qubits()) {
        let p1: f64 = amps
            .iter()
            .enumerate()
            .filter(|(i, _)| (i >> q) & 1 == 1 && i & ((1 << q) - 1) == state)
            .map(|(_, a)| a.norm_sqr())
            .sum();
        let u: f64 = stream.gen();
        if u * weight < p1 {
            state |= 1 << q;
            weight = p1;
        } else {
            weight -= p1;
        }
    }
    Ok(state)
}

fn check_comparable(a: &CountDist, b: &CountDist) -> Result<(), SimError> {
    if a.shots != b.shots {
        return Err(SimError::ShotMismatch(a.shots, b.shots));
    }
    if a.width() != b.width() {
        return Err(SimError::WidthMismatch(a.width(), b.width()));
    }
    Ok(())
}

/// `Σ |a_i − b_i| / 2N` over all outcomes.
pub fn tvd(a: &CountDist, b: &CountDist) -> Result<f64, SimError> {
    check_comparable(a, b)?;
    let mut diff: u64 = 0;
    for (k, &ca) in &a.counts {
        diff += ca.abs_diff(b.count(k));
    }
    for (k, &cb) in &b.counts {
        if !a.counts.contains_key(k) {
            diff += cb;
        }
    }
    Ok(diff as f64 / (2 * a.shots) as f64)
}

/// Half the L1 distance between two probability maps.
pub fn exact_tvd(p: &BTreeMap<String, f64>, q: &BTreeMap<String, f64>) -> f64 {
    let mut sum = 0.0;
    for (k, &pv) in p {
        sum += (pv - q.get(k).copied().unwrap_or(0.0)).abs();
    }
    for (k, &qv) in q {
        if !p.contains_key(k) {
            sum += qv;
        }
    }
    sum / 2.0
}

/// Distance between sampled frequencies and an exact distribution.
pub fn tvd_to_distribution(d: &CountDist, exact: &BTreeMap<String, f64>) -> f64 {
    let freq: BTreeMap<String, f64> = d
        .counts
        .iter()
        .map(|(k, &c)| (k.clone(), c as f64 / d.shots as f64))
        .collect();
    exact_tvd(&freq, exact)
}

/// Fraction of shots that produced `ideal`.
pub fn accuracy(d: &CountDist, ideal: &str) -> Result<f64, SimError> {
    if ideal.len() != d.width() {
        return Err(SimError::WidthMismatch(ideal.len(), d.width()));
    }
    Ok(d.count(ideal) as f64 / d.shots as f64)
}
