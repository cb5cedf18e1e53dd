//! End-to-end benchmark harness.
//!
//! Each iteration obfuscates, splits, compiles both halves in separate
//! sandboxes, restores, and simulates the original, the adversary's view
//! (`R·C`) and the restored circuit with the same sampling seed.

use std::cell::RefCell;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::circuit::{circuits_equivalent, Circuit};
use crate::compiler::{compile_segment, CompiledSegment, CouplingSpec};
use crate::error::{read_file, write_file, Error};
use crate::io::{emit_qasm, parse_qasm, read_qasm_file};
use crate::obfuscate::{build_obfuscated, write_record, InsertionPolicy};
use crate::pipeline::restore;
use crate::rng::derive_seed;
use crate::sim::{accuracy, exact_distribution, exact_tvd, ideal_outcome, sample_counts, tvd, NoiseModel};
use crate::split::{generate_interlock_pattern, split, write_manifest};

const EQUIVALENCE_TOL: f64 = 1e-9;

/// Scratch directory handed to an untrusted compile step.
///
/// Reads go through [`Sandbox::read`], which refuses anything outside the
/// directory and logs every path it serves.
pub struct Sandbox {
    root: tempfile::TempDir,
    reads: RefCell<Vec<PathBuf>>,
}

impl Sandbox {
    pub fn new() -> Result<Self, Error> {
        let root = tempfile::Builder::new()
            .prefix("qsplit-compile-")
            .tempdir()
            .map_err(|e| Error::io(&std::env::temp_dir(), e))?;
        Ok(Self {
            root,
            reads: RefCell::new(Vec::new()),
        })
    }

    pub fn root(&self) -> &Path {
        self.root.path()
    }

    /// Places a file in the sandbox.
    pub fn stage(&self, name: &str, contents: &str) -> Result<PathBuf, Error> {
        let path = self.root().join(name);
        write_file(&path, contents)?;
        Ok(path)
    }

    pub fn read(&self, path: &Path) -> Result<String, Error> {
        let resolved = path.canonicalize().map_err(|e| Error::io(path, e))?;
        let root = self.root().canonicalize().map_err(|e| Error::io(self.root(), e))?;
        if !resolved.starts_with(&root) {
            return Err(Error::Usage(format!(
                "{} is outside the compile sandbox",
                path.display()
            )));
        }
        self.reads.borrow_mut().push(resolved.clone());
        read_file(&resolved)
    }

    pub fn reads(&self) -> Vec<PathBuf> {
        self.reads.borrow().clone()
    }

    /// Every file currently visible inside the sandbox.
    pub fn listing(&self) -> Vec<String> {
        let mut names: Vec<String> = std::fs::read_dir(self.root())
            .map(|rd| {
                rd.filter_map(Result::ok)
                    .map(|e| e.file_name().to_string_lossy().into_owned())
                    .collect()
            })
            .unwrap_or_default();
        names.sort();
        names
    }
}

/// The untrusted compile step: one segment file and a coupling choice in,
/// a routed circuit out.
pub fn compile_in_sandbox(
    sandbox: &Sandbox,
    segment: &Path,
    coupling: &CouplingSpec,
) -> Result<CompiledSegment, Error> {
    let text = sandbox.read(segment)?;
    let circuit = parse_qasm(&text).map_err(|source| crate::io::ReadError::Qasm {
        path: segment.display().to_string(),
        source,
    })?;
    Ok(compile_segment(&circuit, &coupling.for_width(circuit.num_qubits()))?)
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchConfig {
    pub iterations: u64,
    pub shots: u64,
    pub seed: u64,
    pub noise: NoiseModel,
    pub policy: InsertionPolicy,
    pub coupling: String,
    /// Basis state every simulation starts from.
    pub input: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            iterations: 20,
            shots: 1000,
            seed: 0,
            noise: NoiseModel::default(),
            policy: InsertionPolicy::default(),
            coupling: "full".into(),
            input: 0,
        }
    }
}

/// What the sandboxed compile steps could see.
#[derive(Debug, Clone, Default, Serialize, PartialEq, Eq)]
pub struct SandboxAudit {
    pub compile_reads: Vec<String>,
    pub sandbox_listing: Vec<String>,
    pub secrets_read: bool,
    pub secrets_visible: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Metrics {
    pub depth: usize,
    pub depth_obfuscated: f64,
    pub gate_count: usize,
    pub gate_obfuscated: f64,
    pub gate_change_pct: f64,
    pub max_inserted: usize,
    pub tvd_obfuscated: f64,
    pub tvd_obfuscated_exact: f64,
    pub tvd_restored: f64,
    pub ideal_outcome: String,
    pub accuracy: f64,
    pub accuracy_restored: f64,
    pub accuracy_change_abs: f64,
    pub accuracy_change_pct: f64,
    pub restored_equivalent: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CircuitReport {
    pub name: String,
    pub qubits: usize,
    pub iterations_ok: u64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub failures: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub metrics: Option<Metrics>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub audit: Vec<SandboxAudit>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchReport {
    pub config: BenchConfig,
    pub circuits: Vec<CircuitReport>,
}

/// Per-iteration results before averaging.
struct Sample {
    depth_obfuscated: usize,
    gates_obfuscated: usize,
    inserted: usize,
    tvd_obfuscated: f64,
    tvd_obfuscated_exact: f64,
    tvd_restored: f64,
    accuracy: f64,
    accuracy_restored: f64,
    equivalent: bool,
    audit: SandboxAudit,
}

/// `.qasm` files in `dir`, sorted by file name.
pub fn load_benchmarks(dir: &Path) -> Result<Vec<Circuit>, Error> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(Result::ok)
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|x| x == "qasm"))
        .collect();
    paths.sort();
    paths.iter().map(|p| Ok(read_qasm_file(p)?)).collect()
}

pub fn run_bench(circuits: &[Circuit], config: &BenchConfig) -> Result<BenchReport, Error> {
    config.noise.validate()?;
    config.policy.validate()?;
    let coupling = CouplingSpec::parse(&config.coupling)?;
    let mut reports = Vec::new();
    for (ci, c) in circuits.iter().enumerate() {
        let mut samples = Vec::new();
        let mut failures = Vec::new();
        for it in 0..config.iterations {
            match run_iteration(c, config, &coupling, derive_seed(config.seed, &[ci as u64, it])) {
                Ok(s) => samples.push(s),
                Err(e) => failures.push(format!("iteration {it}: {e}")),
            }
        }
        reports.push(summarize(c, config, samples, failures)?);
    }
    Ok(BenchReport {
        config: config.clone(),
        circuits: reports,
    })
}

fn run_iteration(c: &Circuit, config: &BenchConfig, coupling: &CouplingSpec, seed: u64) -> Result<Sample, Error> {
    let obf_seed = derive_seed(seed, &[0]);
    let split_seed = derive_seed(seed, &[1]);
    let sim_seed = derive_seed(seed, &[2]);

    let o = build_obfuscated(c, &config.policy, obf_seed)?;
    let m = generate_interlock_pattern(&o, split_seed, 2)?;
    let (l, r) = split(o.circuit(), &m)?;

    // The owner's secrets live in their own directory.
    let owner = tempfile::Builder::new()
        .prefix("qsplit-owner-")
        .tempdir()
        .map_err(|e| Error::io(&std::env::temp_dir(), e))?;
    let record_path = owner.path().join("record.json");
    let manifest_path = owner.path().join("manifest.json");
    write_file(&record_path, &write_record(o.record()))?;
    write_file(&manifest_path, &write_manifest(&m))?;

    let mut audit = SandboxAudit::default();
    let mut compiled = Vec::new();
    for seg in [&l, &r] {
        let sandbox = Sandbox::new()?;
        let path = sandbox.stage("segment.qasm", &emit_qasm(&seg.circuit))?;
        compiled.push(compile_in_sandbox(&sandbox, &path, coupling)?);
        for read in sandbox.reads() {
            let secret = [&record_path, &manifest_path]
                .iter()
                .any(|s| s.canonicalize().is_ok_and(|s| s == read));
            audit.secrets_read |= secret;
            let shown = sandbox
                .root()
                .canonicalize()
                .ok()
                .and_then(|root| read.strip_prefix(root).ok().map(Path::to_path_buf))
                .unwrap_or_else(|| read.clone());
            audit.compile_reads.push(shown.display().to_string());
        }
        let listing = sandbox.listing();
        audit.secrets_visible |= listing
            .iter()
            .any(|n| n.ends_with("record.json") || n.ends_with("manifest.json"))
            || [&record_path, &manifest_path]
                .iter()
                .any(|s| s.starts_with(sandbox.root()));
        audit.sandbox_listing.extend(listing);
    }

    // Owner reads its secrets back, as a separate process would.
    let m = crate::split::read_manifest(&read_file(&manifest_path)?).map_err(|e| Error::json(&manifest_path, e))?;
    let restored = restore(&compiled[0], &compiled[1], &m)?;
    let equivalence = circuits_equivalent(&restored, c, EQUIVALENCE_TOL, obf_seed)?;

    let rc = o.strip_inverse();
    let ideal = ideal_outcome(c, config.input)?;
    let counts_c = sample_counts(c, config.input, config.shots, &config.noise, sim_seed)?;
    let counts_rc = sample_counts(&rc, config.input, config.shots, &config.noise, sim_seed)?;
    let counts_back = sample_counts(&restored, config.input, config.shots, &config.noise, sim_seed)?;

    Ok(Sample {
        depth_obfuscated: o.circuit().depth(),
        gates_obfuscated: o.circuit().gate_count(),
        inserted: o.circuit().gate_count() - c.gate_count(),
        tvd_obfuscated: tvd(&counts_rc, &counts_c)?,
        tvd_obfuscated_exact: exact_tvd(
            &exact_distribution(&rc, config.input)?,
            &exact_distribution(c, config.input)?,
        ),
        tvd_restored: tvd(&counts_back, &counts_c)?,
        accuracy: accuracy(&counts_c, &ideal)?,
        accuracy_restored: accuracy(&counts_back, &ideal)?,
        equivalent: equivalence.equivalent,
        audit,
    })
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    sum / n as f64
}

fn summarize(
    c: &Circuit,
    config: &BenchConfig,
    samples: Vec<Sample>,
    failures: Vec<String>,
) -> Result<CircuitReport, Error> {
    let metrics = if samples.is_empty() {
        None
    } else {
        let gate_count = c.gate_count();
        let gate_obfuscated = mean(samples.iter().map(|s| s.gates_obfuscated as f64));
        let acc = mean(samples.iter().map(|s| s.accuracy));
        let acc_r = mean(samples.iter().map(|s| s.accuracy_restored));
        let change = (acc - acc_r).abs();
        Some(Metrics {
            depth: c.depth(),
            depth_obfuscated: mean(samples.iter().map(|s| s.depth_obfuscated as f64)),
            gate_count,
            gate_obfuscated,
            gate_change_pct: (gate_obfuscated - gate_count as f64) / gate_count as f64 * 100.0,
            max_inserted: samples.iter().map(|s| s.inserted).max().unwrap_or(0),
            tvd_obfuscated: mean(samples.iter().map(|s| s.tvd_obfuscated)),
            tvd_obfuscated_exact: mean(samples.iter().map(|s| s.tvd_obfuscated_exact)),
            tvd_restored: mean(samples.iter().map(|s| s.tvd_restored)),
            ideal_outcome: ideal_outcome(c, config.input)?,
            accuracy: acc,
            accuracy_restored: acc_r,
            accuracy_change_abs: change,
            accuracy_change_pct: if acc > 0.0 { change / acc * 100.0 } else { 0.0 },
            restored_equivalent: samples.iter().all(|s| s.equivalent),
        })
    };
    Ok(CircuitReport {
        name: c.name().to_string(),
        qubits: c.num_qubits(),
        iterations_ok: samples.len() as u64,
        failures,
        metrics,
        audit: samples.into_iter().map(|s| s.audit).collect(),
    })
}

/// Aligned text table with the report's headline columns.
pub fn render_table(report: &BenchReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<12} {:>5} {:>7} {:>5} {:>7} {:>7} {:>7} {:>7} {:>6} {:>6} {:>7}",
        "circuit", "depth", "depth_o", "gates", "gates_o", "gate%", "tvd_obf", "tvd_res", "acc", "acc_r", "acc_d%"
    );
    for c in &report.circuits {
        match &c.metrics {
            Some(m) => {
                let _ = writeln!(
                    out,
                    "{:<12} {:>5} {:>7.1} {:>5} {:>7.1} {:>7.1} {:>7.3} {:>7.3} {:>6.3} {:>6.3} {:>7.2}",
                    c.name,
                    m.depth,
                    m.depth_obfuscated,
                    m.gate_count,
                    m.gate_obfuscated,
                    m.gate_change_pct,
                    m.tvd_obfuscated,
                    m.tvd_restored,
                    m.accuracy,
                    m.accuracy_restored,
                    m.accuracy_change_pct
                );
            }
            None => {
                let _ = writeln!(out, "{:<12} failed: {}", c.name, c.failures.join("; "));
            }
        }
    }
    out
}
