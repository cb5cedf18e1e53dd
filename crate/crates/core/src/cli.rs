//! Command-line front end.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::attack::{attack_complexity, baseline_complexity, AttackParams};
use crate::bench::{load_benchmarks, render_table, run_bench, BenchConfig};
use crate::circuit::{circuits_equivalent, Circuit, GateKind};
use crate::compiler::{compile_segment, read_layouts, write_layouts, CompiledSegment, CouplingSpec};
use crate::error::{read_file, write_file, Error};
use crate::io::{emit_qasm, read_qasm_file, to_json};
use crate::obfuscate::{build_obfuscated, read_record, write_record, InsertionPolicy, ObfuscatedCircuit};
use crate::pipeline::restore;
use crate::sim::{sample_counts, tvd, CountDist, NoiseModel};
use crate::split::{
    generate_interlock_pattern, read_manifest, recombine, split, write_manifest, Segment, Side, SplitManifest,
};

#[derive(Debug, Parser)]
#[command(name = "qsplit", version, about = "Split compilation of quantum circuits")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Insert a random circuit and its inverse into idle slots.
    Obfuscate(ObfuscateArgs),
    /// Cut an obfuscated circuit into two segments.
    Split(SplitArgs),
    /// Optimise and route one segment.
    Compile(CompileArgs),
    /// Join two (possibly compiled) segments back together.
    Recombine(RecombineArgs),
    /// Sample measurement counts.
    Simulate(SimulateArgs),
    /// Total variation distance between two count files.
    Tvd(TvdArgs),
    /// Number of candidate segment pairings an attacker has to try.
    AttackComplexity(AttackArgs),
    /// Run the whole pipeline over a directory of benchmarks.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct PolicyArgs {
    #[arg(long, default_value_t = 4)]
    pub gate_limit: usize,
    /// Comma separated, from x, h, cx.
    #[arg(long, default_value = "x,cx", value_parser = parse_kinds)]
    pub kinds: Kinds,
    #[arg(long, default_value_t = 0.5)]
    pub cx_probability: f64,
    /// Prepend the inverse when no slot fits instead of failing.
    #[arg(long)]
    pub allow_depth_growth: bool,
}

impl PolicyArgs {
    fn policy(&self) -> InsertionPolicy {
        InsertionPolicy {
            gate_limit: self.gate_limit,
            kinds: self.kinds.0.clone(),
            cx_probability: self.cx_probability,
            allow_depth_growth: self.allow_depth_growth,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Kinds(pub Vec<GateKind>);

fn parse_kinds(s: &str) -> Result<Kinds, String> {
    s.split(',')
        .map(|k| k.trim().parse::<GateKind>().map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()
        .map(Kinds)
}

fn parse_noise(s: &str) -> Result<NoiseModel, String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("`{p}`: {e}")))
        .collect::<Result<_, _>>()?;
    match parts[..] {
        [p1, p2, pm] => NoiseModel::new(p1, p2, pm).map_err(|e| e.to_string()),
        _ => Err("expected p1,p2,pm".into()),
    }
}

#[derive(Debug, Clone)]
pub struct List(pub Vec<u64>);

fn parse_list(s: &str) -> Result<List, String> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| p.trim().parse::<u64>().map_err(|e| format!("`{p}`: {e}")))
        .collect::<Result<_, _>>()
        .map(List)
}

#[derive(Debug, Args)]
pub struct ObfuscateArgs {
    pub input: PathBuf,
    #[command(flatten)]
    pub policy: PolicyArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Prepended verbatim to `obfuscated.qasm` and `record.json`.
    #[arg(long, default_value = "")]
    pub out_prefix: String,
}

#[derive(Debug, Args)]
pub struct SplitArgs {
    /// Obfuscated circuit.
    pub input: PathBuf,
    /// Record written by `obfuscate`; needed to anchor the cut.
    #[arg(long, required_unless_present = "cuts")]
    pub record: Option<PathBuf>,
    /// Explicit per-qubit cut layers instead of a generated pattern.
    #[arg(long, value_parser = parse_list, conflicts_with = "record")]
    pub cuts: Option<List>,
    #[arg(long, default_value_t = 2)]
    pub min_distinct: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Prepended to `L.qasm`, `R.qasm` and `manifest.json`.
    #[arg(long, default_value = "")]
    pub out_prefix: String,
}

#[derive(Debug, Args)]
pub struct CompileArgs {
    pub input: PathBuf,
    /// line, ring, full or file:<edges.json>
    #[arg(long, default_value = "full")]
    pub coupling: String,
    /// Prepended to `compiled.qasm` and `layout.json`.
    #[arg(long, default_value = "")]
    pub out_prefix: String,
}

#[derive(Debug, Args)]
pub struct RecombineArgs {
    #[arg(long)]
    pub left: PathBuf,
    #[arg(long)]
    pub right: PathBuf,
    #[arg(long)]
    pub manifest: PathBuf,
    /// Layout of a compiled left segment.
    #[arg(long, requires = "right_layout")]
    pub left_layout: Option<PathBuf>,
    #[arg(long, requires = "left_layout")]
    pub right_layout: Option<PathBuf>,
    /// Original circuit to check the result against.
    #[arg(long)]
    pub reference: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "recombined.qasm")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    pub input: PathBuf,
    #[arg(long, default_value_t = 1000)]
    pub shots: u64,
    /// p1,p2,pm. Noiseless when omitted.
    #[arg(long, value_parser = parse_noise)]
    pub noise: Option<NoiseModel>,
    /// Basis state to start from, qubit 0 as the least significant bit.
    #[arg(long, default_value_t = 0)]
    pub input_state: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Counts file; printed to stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TvdArgs {
    pub a: PathBuf,
    pub b: PathBuf,
}

#[derive(Debug, Args)]
pub struct AttackArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub n_max: usize,
    /// Segment counts k_1..k_{n_max}, comma separated.
    #[arg(long, value_parser = parse_list)]
    pub k: List,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long)]
    pub dir: PathBuf,
    #[arg(long, default_value_t = 20)]
    pub iterations: u64,
    #[arg(long, default_value_t = 1000)]
    pub shots: u64,
    #[arg(long, default_value = "0.001,0.01,0.02", value_parser = parse_noise)]
    pub noise: NoiseModel,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub policy: PolicyArgs,
    #[arg(long, default_value = "full")]
    pub coupling: String,
    #[arg(long, default_value_t = 0)]
    pub input_state: usize,
    /// Write the JSON report here; the table still goes to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Print the JSON report instead of the table.
    #[arg(long)]
    pub json: bool,
}

fn prefixed(prefix: &str, name: &str) -> PathBuf {
    PathBuf::from(format!("{prefix}{name}"))
}

fn read_json_file<T>(path: &Path, parse: impl FnOnce(&str) -> Result<T, crate::io::JsonError>) -> Result<T, Error> {
    parse(&read_file(path)?).map_err(|e| Error::json(path, e))
}

/// Runs one command, writing human output to `out`.
pub fn run(cli: Cli, out: &mut dyn std::io::Write) -> Result<(), Error> {
    let stdout = |e: std::io::Error| Error::io(Path::new("<stdout>"), e);
    match cli.command {
        Command::Obfuscate(a) => {
            let c = read_qasm_file(&a.input)?;
            let o = build_obfuscated(&c, &a.policy.policy(), a.seed)?;
            let qasm = prefixed(&a.out_prefix, "obfuscated.qasm");
            let record = prefixed(&a.out_prefix, "record.json");
            write_file(&qasm, &emit_qasm(o.circuit()))?;
            write_file(&record, &write_record(o.record()))?;
            writeln!(
                out,
                "depth {} -> {} ({:+}), gates {} -> {} ({:+})",
                c.depth(),
                o.circuit().depth(),
                o.circuit().depth() as i64 - c.depth() as i64,
                c.gate_count(),
                o.circuit().gate_count(),
                o.circuit().gate_count() as i64 - c.gate_count() as i64
            )
            .map_err(stdout)?;
        }
        Command::Split(a) => {
            let c = read_qasm_file(&a.input)?;
            let m = match (&a.record, &a.cuts) {
                (_, Some(cuts)) => SplitManifest::from_cuts(&c, cuts.0.iter().map(|&x| x as usize).collect(), a.seed)?,
                (Some(path), None) => {
                    let record = read_json_file(path, read_record)?;
                    let o = ObfuscatedCircuit::from_parts(c.clone(), record)?;
                    generate_interlock_pattern(&o, a.seed, a.min_distinct)?
                }
                (None, None) => return Err(Error::Usage("either --record or --cuts is required".into())),
            };
            let (l, r) = split(&c, &m)?;
            write_file(&prefixed(&a.out_prefix, "L.qasm"), &emit_qasm(&l.circuit))?;
            write_file(&prefixed(&a.out_prefix, "R.qasm"), &emit_qasm(&r.circuit))?;
            write_file(&prefixed(&a.out_prefix, "manifest.json"), &write_manifest(&m))?;
            writeln!(
                out,
                "cuts {:?}; L {} qubits / {} gates, R {} qubits / {} gates",
                m.cut_layers,
                m.qubit_map_l.len(),
                l.circuit.gate_count(),
                m.qubit_map_r.len(),
                r.circuit.gate_count()
            )
            .map_err(stdout)?;
        }
        Command::Compile(a) => {
            let c = read_qasm_file(&a.input)?;
            let graph = CouplingSpec::parse(&a.coupling)?.for_width(c.num_qubits());
            let s = compile_segment(&c, &graph)?;
            write_file(&prefixed(&a.out_prefix, "compiled.qasm"), &emit_qasm(&s.circuit))?;
            write_file(&prefixed(&a.out_prefix, "layout.json"), &write_layouts(&s.layouts()))?;
            writeln!(out, "gates {} -> {}", c.gate_count(), s.circuit.gate_count()).map_err(stdout)?;
        }
        Command::Recombine(a) => {
            let result = recombine_cmd(&a);
            let joined = match result {
                Ok(c) => c,
                Err(e) => {
                    writeln!(out, "FAIL: {e}").map_err(stdout)?;
                    return Err(e);
                }
            };
            write_file(&a.out, &emit_qasm(&joined))?;
            if let Some(reference) = &a.reference {
                let want = read_qasm_file(reference)?;
                let verdict = circuits_equivalent(&joined, &want, 1e-9, a.seed);
                match verdict {
                    Ok(eq) if eq.equivalent => {
                        writeln!(
                            out,
                            "PASS ({} inputs, max deviation {:.3e})",
                            eq.inputs_checked, eq.max_deviation
                        )
                        .map_err(stdout)?;
                    }
                    Ok(eq) => {
                        writeln!(out, "FAIL (max deviation {:.3e})", eq.max_deviation).map_err(stdout)?;
                        return Err(Error::NotEquivalent(format!("max deviation {:.3e}", eq.max_deviation)));
                    }
                    Err(e) => {
                        writeln!(out, "FAIL: {e}").map_err(stdout)?;
                        return Err(Error::NotEquivalent(e.to_string()));
                    }
                }
            }
        }
        Command::Simulate(a) => {
            let c = read_qasm_file(&a.input)?;
            let noise = a.noise.unwrap_or_else(NoiseModel::noiseless);
            let counts = sample_counts(&c, a.input_state, a.shots, &noise, a.seed)?;
            match &a.out {
                Some(path) => write_file(path, &counts.to_json())?,
                None => writeln!(out, "{}", counts.to_json()).map_err(stdout)?,
            }
        }
        Command::Tvd(a) => {
            let x = read_json_file(&a.a, CountDist::from_json)?;
            let y = read_json_file(&a.b, CountDist::from_json)?;
            writeln!(out, "{:?}", tvd(&x, &y)?).map_err(stdout)?;
        }
        Command::AttackComplexity(a) => {
            let p = AttackParams::new(a.n, a.n_max, a.k.0)?;
            let total = attack_complexity(&p);
            let base = baseline_complexity(p.n, p.k_n());
            let ratio = ratio(&total, &base);
            let report = json!({
                "n": p.n,
                "n_max": p.n_max,
                "k": p.k,
                "complexity": total.to_string(),
                "baseline": base.to_string(),
                "ratio": ratio,
            });
            writeln!(out, "{}", serde_json::to_string_pretty(&report).expect("json value")).map_err(stdout)?;
        }
        Command::Bench(a) => {
            let circuits = load_benchmarks(&a.dir)?;
            if circuits.is_empty() {
                return Err(Error::Usage(format!("no .qasm files in {}", a.dir.display())));
            }
            let config = BenchConfig {
                iterations: a.iterations,
                shots: a.shots,
                seed: a.seed,
                noise: a.noise,
                policy: a.policy.policy(),
                coupling: a.coupling.clone(),
                input: a.input_state,
            };
            let report = run_bench(&circuits, &config)?;
            let text = to_json(&report);
            if let Some(path) = &a.out {
                write_file(path, &text)?;
            }
            if a.json {
                writeln!(out, "{text}").map_err(stdout)?;
            } else {
                write!(out, "{}", render_table(&report)).map_err(stdout)?;
            }
        }
    }
    Ok(())
}

fn recombine_cmd(a: &RecombineArgs) -> Result<Circuit, Error> {
    let m = read_json_file(&a.manifest, read_manifest)?;
    let l = read_qasm_file(&a.left)?;
    let r = read_qasm_file(&a.right)?;
    let joined = match (&a.left_layout, &a.right_layout) {
        (Some(ll), Some(rl)) => {
            let cl = CompiledSegment::from_parts(l, m.qubit_map_l.len(), read_json_file(ll, read_layouts)?)?;
            let cr = CompiledSegment::from_parts(r, m.qubit_map_r.len(), read_json_file(rl, read_layouts)?)?;
            restore(&cl, &cr, &m)?
        }
        _ => recombine(
            &Segment {
                circuit: l,
                side: Side::L,
            },
            &Segment {
                circuit: r,
                side: Side::R,
            },
            &m,
        )?,
    };
    Ok(joined)
}

/// `a / b` as a float, accurate for values far beyond `f64` integer range.
fn ratio(a: &num_bigint::BigUint, b: &num_bigint::BigUint) -> f64 {
    use num_traits::ToPrimitive;
    let shift = a.bits().max(b.bits()).saturating_sub(1000);
    let (a, b) = (a >> shift, b >> shift);
    match (a.to_f64(), b.to_f64()) {
        (Some(x), Some(y)) if y > 0.0 => x / y,
        _ => f64::NAN,
    }
}
