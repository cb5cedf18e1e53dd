//! Acceptance criteria. Runs without the libtest harness and prints one
//! PASS/FAIL line per criterion; exits non-zero if any fails.

mod common;

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qsplit::attack::{attack_complexity, baseline_complexity, AttackParams};
use qsplit::bench::{compile_in_sandbox, run_bench, BenchConfig, Sandbox};
use qsplit::circuit::{circuits_equivalent, unitary, Circuit, CircuitError, GateKind};
use qsplit::compiler::{
    compile_segment, peephole_optimize, CompileError, CompiledSegment, CouplingGraph, CouplingSpec,
};
use qsplit::io::{emit_qasm, parse_qasm};
use qsplit::obfuscate::{build_obfuscated, InsertionPolicy, ObfuscationError};
use qsplit::pipeline::restore;
use qsplit::sim::{exact_distribution, exact_tvd, sample_counts, tvd, NoiseModel};
use qsplit::split::{generate_interlock_pattern, recombine, split, SplitManifest};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn seeds() -> impl Iterator<Item = u64> {
    0..20
}

fn within(limit: Duration, start: Instant) -> Result<(), String> {
    let took = start.elapsed();
    check(took < limit, || format!("took {took:.1?}, limit {limit:?}"))
}

fn depth_neutrality() -> Outcome {
    let start = Instant::now();
    let mut successes = 0;
    for c in common::benchmarks() {
        for seed in seeds() {
            match build_obfuscated(&c, &InsertionPolicy::default(), seed) {
                Ok(o) => {
                    check(o.circuit().depth() == c.depth(), || {
                        format!(
                            "{} seed {seed}: depth {} -> {}",
                            c.name(),
                            c.depth(),
                            o.circuit().depth()
                        )
                    })?;
                    successes += 1;
                }
                Err(ObfuscationError::NoSlot(_)) => {}
                Err(e) => return Err(format!("{} seed {seed}: {e}", c.name())),
            }
        }
    }
    check(successes > 0, || "no benchmark could be obfuscated".into())?;
    within(Duration::from_secs(5), start)?;
    Ok(format!("{successes} obfuscations, all depth-preserving"))
}

fn functional_restoration() -> Outcome {
    let start = Instant::now();
    let mut runs = 0;
    for c in common::benchmarks() {
        for seed in seeds() {
            let o =
                build_obfuscated(&c, &InsertionPolicy::default(), seed).map_err(|e| format!("{}: {e}", c.name()))?;
            let m = generate_interlock_pattern(&o, seed, 2).map_err(|e| format!("{}: {e}", c.name()))?;
            let (l, r) = split(o.circuit(), &m).map_err(|e| e.to_string())?;
            for spec in ["full", "line"] {
                let graph = |n| CouplingGraph::from_spec(spec, n).unwrap();
                let cl = compile_segment(&l.circuit, &graph(l.circuit.num_qubits())).map_err(|e| e.to_string())?;
                let cr = compile_segment(&r.circuit, &graph(r.circuit.num_qubits())).map_err(|e| e.to_string())?;
                let back = restore(&cl, &cr, &m).map_err(|e| e.to_string())?;
                let eq = circuits_equivalent(&back, &c, 1e-9, seed).map_err(|e| e.to_string())?;
                check(eq.equivalent, || {
                    format!("{} seed {seed} {spec}: deviation {:.3e}", c.name(), eq.max_deviation)
                })?;
                runs += 1;
            }
        }
    }
    within(Duration::from_secs(60), start)?;
    Ok(format!("{runs} restorations equivalent"))
}

fn restored_tvd() -> Outcome {
    let circuits = common::benchmarks();
    for c in &circuits {
        for seed in seeds() {
            let o = build_obfuscated(c, &InsertionPolicy::default(), seed).map_err(|e| e.to_string())?;
            let m = generate_interlock_pattern(&o, seed, 2).map_err(|e| e.to_string())?;
            let (l, r) = split(o.circuit(), &m).map_err(|e| e.to_string())?;
            let full = |n| CouplingGraph::full(n);
            let cl = compile_segment(&l.circuit, &full(l.circuit.num_qubits())).map_err(|e| e.to_string())?;
            let cr = compile_segment(&r.circuit, &full(r.circuit.num_qubits())).map_err(|e| e.to_string())?;
            let back = restore(&cl, &cr, &m).map_err(|e| e.to_string())?;
            let none = NoiseModel::noiseless();
            let a = sample_counts(c, 0, 1000, &none, seed).map_err(|e| e.to_string())?;
            let b = sample_counts(&back, 0, 1000, &none, seed).map_err(|e| e.to_string())?;
            let d = tvd(&a, &b).map_err(|e| e.to_string())?;
            check(d == 0.0, || format!("{} seed {seed}: noiseless tvd {d}", c.name()))?;
        }
    }
    let config = BenchConfig {
        iterations: 20,
        shots: 1000,
        noise: NoiseModel::new(0.001, 0.01, 0.02).unwrap(),
        ..Default::default()
    };
    let report = run_bench(&circuits, &config).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for r in &report.circuits {
        let m = r
            .metrics
            .as_ref()
            .ok_or_else(|| format!("{}: {:?}", r.name, r.failures))?;
        check(m.tvd_restored < 0.05, || {
            format!("{}: mean noisy tvd {}", r.name, m.tvd_restored)
        })?;
        worst = worst.max(m.tvd_restored);
    }
    Ok(format!("noiseless tvd 0 everywhere; worst noisy mean {worst:.4}"))
}

fn obfuscation_efficacy() -> Outcome {
    let mut worst: f64 = 0.0;
    for c in common::benchmarks() {
        for seed in seeds() {
            let o = build_obfuscated(&c, &InsertionPolicy::default(), seed).map_err(|e| e.to_string())?;
            let rc = o.strip_inverse();
            let none = NoiseModel::noiseless();
            let sampled = tvd(
                &sample_counts(&rc, 0, 1000, &none, seed).map_err(|e| e.to_string())?,
                &sample_counts(&c, 0, 1000, &none, seed).map_err(|e| e.to_string())?,
            )
            .map_err(|e| e.to_string())?;
            let exact = exact_tvd(
                &exact_distribution(&rc, 0).map_err(|e| e.to_string())?,
                &exact_distribution(&c, 0).map_err(|e| e.to_string())?,
            );
            worst = worst.max((sampled - exact).abs());
            check((sampled - exact).abs() <= 0.03, || {
                format!("{} seed {seed}: sampled {sampled} vs exact {exact}", c.name())
            })?;
        }
    }

    // 7-qubit benchmark, X-only insertions landing on measured qubits.
    let c = common::benchmarks()
        .into_iter()
        .find(|c| c.name() == "rd53")
        .ok_or("rd53 missing")?;
    check(c.num_qubits() == 7, || "rd53 is not 7 qubits".into())?;
    let policy = InsertionPolicy {
        gate_limit: 4,
        kinds: vec![GateKind::X],
        ..Default::default()
    };
    let measured = c.output_qubits();
    let mut qualifying = Vec::new();
    for seed in 0..200 {
        let Ok(o) = build_obfuscated(&c, &policy, seed) else {
            continue;
        };
        let on_measured = o
            .record()
            .insertions
            .iter()
            .filter(|p| measured.contains(&p.gate.operands()[0]))
            .count();
        if on_measured >= 3 {
            let rc = o.strip_inverse();
            let d = exact_tvd(
                &exact_distribution(&rc, 0).map_err(|e| e.to_string())?,
                &exact_distribution(&c, 0).map_err(|e| e.to_string())?,
            );
            qualifying.push((seed, d));
        }
    }
    check(!qualifying.is_empty(), || {
        "no seed put 3 X gates on measured qubits".into()
    })?;
    let low: Vec<_> = qualifying.iter().filter(|(_, d)| *d < 0.9).collect();
    check(low.is_empty(), || format!("exact distance below 0.9 for {low:?}"))?;
    Ok(format!(
        "max |sampled - exact| {worst:.4}; {} rd53 seeds with >=3 measured X insertions all at distance >= 0.9",
        qualifying.len()
    ))
}

fn gate_overhead() -> Outcome {
    for c in common::benchmarks() {
        for limit in 1..=6 {
            for seed in seeds() {
                let policy = InsertionPolicy {
                    gate_limit: limit,
                    ..Default::default()
                };
                let Ok(o) = build_obfuscated(&c, &policy, seed) else {
                    continue;
                };
                let inserted = o.circuit().gate_count() - c.gate_count();
                check(inserted <= 2 * limit, || {
                    format!("{} limit {limit} seed {seed}: {inserted} gates added", c.name())
                })?;
            }
        }
    }
    let mini = common::benchmarks()
        .into_iter()
        .find(|c| c.name() == "mini_alu")
        .ok_or("mini_alu missing")?;
    check(mini.gate_count() == 9, || {
        format!("mini_alu has {} gates", mini.gate_count())
    })?;
    let config = BenchConfig {
        iterations: 20,
        shots: 1000,
        policy: InsertionPolicy {
            gate_limit: 1,
            ..Default::default()
        },
        ..Default::default()
    };
    let report = run_bench(&[mini], &config).map_err(|e| e.to_string())?;
    let m = report.circuits[0].metrics.as_ref().ok_or("mini_alu bench failed")?;
    check((m.gate_change_pct - 22.2).abs() <= 0.1, || {
        format!("gate_change_pct {}", m.gate_change_pct)
    })?;
    Ok(format!(
        "bound holds; mini_alu gate_change_pct {:.1}%",
        m.gate_change_pct
    ))
}

fn attack_formula() -> Outcome {
    let start = Instant::now();
    let mut cases = 0;
    for n in 1..=6 {
        let per_width: Vec<u64> = (1..=6).map(|i| common::brute_force_mappings(n, i)).collect();
        // Every k in {0..3}^n_max for n_max up to 6.
        for n_max in n..=6 {
            let mut k = vec![0u64; n_max];
            loop {
                let want: u64 = k.iter().zip(&per_width).map(|(a, b)| a * b).sum();
                let got = attack_complexity(&AttackParams::new(n, n_max, k.clone()).map_err(|e| e.to_string())?);
                check(got == want.into(), || format!("n={n} k={k:?}: {got} != {want}"))?;
                cases += 1;
                let Some(pos) = k.iter().position(|&x| x < 3) else {
                    break;
                };
                k[pos] += 1;
                k[..pos].iter_mut().for_each(|x| *x = 0);
            }
        }
    }
    let p = AttackParams::new(2, 3, vec![1, 1, 1]).map_err(|e| e.to_string())?;
    let value = attack_complexity(&p);
    let base = baseline_complexity(2, p.k_n());
    check(value == 23u32.into() && base == 2u32.into(), || {
        format!("got {value}, baseline {base}")
    })?;
    within(Duration::from_secs(10), start)?;
    Ok(format!(
        "{cases} parameter sets match enumeration; (2,3,[1,1,1]) = 23, baseline 2"
    ))
}

fn round_trips() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for case in 0..1000 {
        let n = rng.gen_range(1..=8);
        let c = {
            let g = rng.gen_range(0..=40);
            common::random_circuit(&mut rng, n, g, &GateKind::ALL)
        }
        .canonicalize();
        let raw = (0..n).map(|_| rng.gen_range(0..=c.depth())).collect();
        let m = SplitManifest::from_cuts(&c, common::valid_cuts(&c, raw), case).map_err(|e| e.to_string())?;
        let (l, r) = split(&c, &m).map_err(|e| e.to_string())?;
        let back = recombine(&l, &r, &m).map_err(|e| e.to_string())?;
        check(back.gates() == c.gates(), || format!("split case {case} differs"))?;
    }
    for c in common::benchmarks() {
        let parsed = parse_qasm(&emit_qasm(&c)).map_err(|e| e.to_string())?;
        check(parsed.gates() == c.gates() && parsed.measured() == c.measured(), || {
            format!("{} does not survive emit/parse", c.name())
        })?;
    }
    for case in 0..500 {
        let n = rng.gen_range(1..=10);
        let c = {
            let g = rng.gen_range(0..=60);
            common::random_circuit(&mut rng, n, g, &GateKind::ALL)
        };
        check(parse_qasm(&emit_qasm(&c)).map_err(|e| e.to_string())? == c, || {
            format!("random circuit {case} does not survive emit/parse")
        })?;
    }
    for case in 0..200 {
        let n = rng.gen_range(1..=6);
        let c = {
            let g = rng.gen_range(0..=40);
            common::random_circuit(&mut rng, n, g, &GateKind::ALL)
        };
        let p = peephole_optimize(&c);
        let ok = unitary(&p)
            .and_then(|u| Ok::<_, CircuitError>(u.approx_eq(&unitary(&c)?, 1e-10)))
            .map_err(|e| e.to_string())?;
        check(ok, || format!("peephole changed unitary in case {case}"))?;
    }
    within(Duration::from_secs(60), start)?;
    Ok("1000 split, 508 QASM and 200 peephole round trips".into())
}

fn threat_model_separation() -> Outcome {
    // The compile entry points take nothing but a segment and a graph.
    let _: fn(&Circuit, &CouplingGraph) -> Result<CompiledSegment, CompileError> = compile_segment;
    let _: fn(&Sandbox, &std::path::Path, &CouplingSpec) -> Result<CompiledSegment, qsplit::error::Error> =
        compile_in_sandbox;

    let report = run_bench(
        &common::benchmarks(),
        &BenchConfig {
            iterations: 5,
            shots: 100,
            ..Default::default()
        },
    )
    .map_err(|e| e.to_string())?;
    let mut audited = 0;
    for r in &report.circuits {
        check(r.failures.is_empty(), || format!("{}: {:?}", r.name, r.failures))?;
        for a in &r.audit {
            check(!a.secrets_read && !a.secrets_visible, || format!("{}: {a:?}", r.name))?;
            check(
                a.compile_reads == ["segment.qasm", "segment.qasm"]
                    && a.sandbox_listing == ["segment.qasm", "segment.qasm"],
                || format!("{}: unexpected sandbox activity {a:?}", r.name),
            )?;
            audited += 1;
        }
    }

    // A compile step that goes looking for the owner's files is refused.
    let owner = tempfile::tempdir().map_err(|e| e.to_string())?;
    let record = owner.path().join("record.json");
    std::fs::write(&record, "{}").map_err(|e| e.to_string())?;
    let sandbox = Sandbox::new().map_err(|e| e.to_string())?;
    check(sandbox.read(&record).is_err(), || "sandbox served record.json".into())?;
    check(
        compile_in_sandbox(&sandbox, &record, &CouplingSpec::Full).is_err(),
        || "compile read a file outside its sandbox".into(),
    )?;
    check(sandbox.reads().is_empty(), || {
        "refused reads were logged as served".into()
    })?;
    Ok(format!("{audited} audited iterations; compile saw only its segment"))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("depth neutrality", depth_neutrality),
        ("functional restoration", functional_restoration),
        ("restored tvd", restored_tvd),
        ("obfuscation efficacy", obfuscation_efficacy),
        ("gate overhead", gate_overhead),
        ("attack complexity formula", attack_formula),
        ("round-trip suites", round_trips),
        ("threat-model separation", threat_model_separation),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let took = start.elapsed();
        match outcome {
            Ok(detail) => println!("criterion {} {name}: PASS ({detail}; {took:.2?})", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({detail}; {took:.2?})", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
