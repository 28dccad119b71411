//! Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
//! fails. Expected values come from the hand fixtures in `common` and from
//! small iterative reference functions below, never from the passes.

mod common;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use asm_workbench::algorithm::Algorithm;
use asm_workbench::bundle::AlgorithmBundle;
use asm_workbench::cosim::normalization::verify_normalization;
use asm_workbench::cosim::pruning::verify_pruning;
use asm_workbench::cosim::separation::verify_separation;
use asm_workbench::cosim::suite::{case_seed, draw_case, generator_config};
use asm_workbench::cosim::{generate, run_suite, CosimReport, GenConfig, Pass, SuiteConfig};
use asm_workbench::dispatch::{oracle_dispatch_run, DispatchOptions};
use asm_workbench::eval::{fire, EvalTrace, Silent};
use asm_workbench::interp::{run, OracleEnv, RunOptions, RunStatus};
use asm_workbench::parser::parse;
use asm_workbench::passes::normalize::merge_parallel;
use asm_workbench::passes::prune::prune;
use asm_workbench::passes::separate::separate_all;
use asm_workbench::passes::serialize::{check_shape, serialize, ClauseKind};
use asm_workbench::printer::print;
use asm_workbench::stack::with_deep_stack;
use asm_workbench::syntax::{Rule, Term};
use asm_workbench::tables::parse_oracle_tables;
use asm_workbench::value::Value;
use asm_workbench::vocab::{is_means_fit_effective, IoRole};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{corpus, load, merge_algorithm, merge_categories, merge_expected, merge_expected_updates, merge_operands};
use common::{separation_hand_cases, Expect};

const SEED: u64 = 0;
const PRUNE_BUDGET: usize = 200_000;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);
type BundleCase = (&'static str, u64, fn(u64) -> Value);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn suite(pass: Pass, count: usize, steps: usize) -> CosimReport {
    run_suite(&SuiteConfig::new(pass, SEED, count, steps))
}

/// The report passed, ran `count` cases, and checked each named claim at
/// least once.
fn suite_ok(r: &CosimReport, count: usize, claims: &[&str]) -> Result<(), String> {
    ensure(r.cases == count, || format!("{} cases, wanted {count}", r.cases))?;
    ensure(r.ok(), || {
        let f = &r.failures[0];
        format!("case {} (seed {}) diverged on claim {}", f.case, f.seed, f.divergence.claim)
    })?;
    for c in claims {
        let t = r.claims.get(*c);
        ensure(t.is_some_and(|t| t.checked > 0 && t.failed == 0), || format!("claim {c} never checked"))?;
    }
    Ok(())
}

fn observed(status: &RunStatus, steps: usize) -> Expect {
    match status {
        RunStatus::OutputProduced(v) => Expect::Output {
            value: v.clone(),
            step: steps - 1,
        },
        RunStatus::Failed(f) => Expect::Fails {
            class: f.class(),
            step: steps,
        },
        _ => Expect::Runs,
    }
}

fn separation() -> Check {
    let cfg = generator_config(Pass::Separate);
    ensure(cfg.max_rule_depth <= 4 && cfg.max_symbols <= 10, || "generator exceeds depth 4 or 10 symbols".into())?;
    let start = Instant::now();
    let r = suite(Pass::Separate, 500, 20);
    let took = start.elapsed();
    suite_ok(&r, 500, &["a", "b", "c", "d", "e"])?;
    ensure(took < Duration::from_secs(120), || format!("took {took:.1?}"))?;

    let cases = separation_hand_cases();
    let mut classes = BTreeSet::new();
    for case in &cases {
        let a = run(&case.algorithm, &case.inputs, &Silent, RunOptions::budget(20)).unwrap();
        ensure(observed(&a.status, a.steps) == case.expect, || format!("{} misbehaves before separation", case.name))?;
        let cert = separate_all(&case.algorithm);
        let v = verify_separation(&case.algorithm, &cert, &case.inputs, &Silent, 20);
        ensure(v.passed(), || format!("{}: {:?}", case.name, v.divergence))?;
        let b = run(&cert.algorithm, &case.inputs, &Silent, RunOptions::budget(20)).unwrap();
        ensure(observed(&b.status, b.steps) == case.expect, || format!("{} misbehaves after separation", case.name))?;
        if let Expect::Fails { class, .. } = &case.expect {
            classes.insert(format!("{class:?}"));
        }
    }
    ensure(classes.len() == 2, || format!("hand cases only fail with {classes:?}"))?;
    Ok(format!("500 generated x 20 steps in {took:.1?}; {} hand cases", cases.len()))
}

fn normalization() -> Check {
    let (p, q) = merge_operands();
    let merged = merge_parallel(&p, &q);
    let got: Vec<(Term, Vec<String>)> = merged
        .clauses
        .iter()
        .map(|c| {
            let heads = c
                .body
                .iter()
                .map(|r| match r {
                    Rule::Assign { head, .. } => head.to_string(),
                    _ => "?".into(),
                })
                .collect();
            (c.guard.clone(), heads)
        })
        .collect();
    let want: Vec<(Term, Vec<String>)> = merge_expected()
        .into_iter()
        .map(|(g, hs)| (g, hs.into_iter().map(String::from).collect()))
        .collect();
    ensure(got == want, || format!("merge gave {got:?}"))?;

    let original = Rule::Par(vec![p.to_rule(), q.to_rule()]);
    let a = merge_algorithm(original);
    let merged = merged.to_rule();
    for (label, st) in merge_categories(&a) {
        let (mut t1, mut t2) = (EvalTrace::new(), EvalTrace::new());
        let u1 = fire(&a.program, &st, &Silent, &mut t1).unwrap();
        let u2 = fire(&merged, &st, &Silent, &mut t2).unwrap();
        ensure(u1 == u2 && t1.static_evals() == t2.static_evals(), || format!("category {label} differs"))?;
        let updates: std::collections::BTreeMap<&str, u64> = u1
            .iter()
            .map(|u| {
                let sym: &str = &u.location.symbol;
                let sym = ["p1", "p2", "q1"].into_iter().find(|s| *s == sym).unwrap_or("?");
                (sym, u.value.as_nat().unwrap_or(0))
            })
            .collect();
        ensure(updates == merge_expected_updates(&label), || format!("category {label}: {updates:?}"))?;
    }
    let states: Vec<_> = merge_categories(&a).into_iter().map(|(_, s)| s).collect();
    ensure(verify_normalization(&a.program, &states, &Silent).passed(), || "merge example fails verification".into())?;

    let r = suite(Pass::Normalize, 500, 50);
    suite_ok(&r, 500, &["updates", "static-evals"])?;
    ensure(r.steps >= 500 * 50, || format!("only {} states checked", r.steps))?;
    Ok(format!("5 clauses, 6 categories; 500 rules x 50 states ({} comparisons)", r.steps))
}

fn serialization() -> Check {
    let cfg = generator_config(Pass::Serialize);
    ensure(cfg.min_extrinsics == 1 && cfg.max_extrinsics == 3, || "generator not set to 1-3 extrinsics".into())?;
    let r = suite(Pass::Serialize, 200, 10);
    suite_ok(&r, 200, &["one-query", "states", "query-union", "bound"])?;

    let a = load("swap.asm");
    let x0 = a.initial_state(&[]).unwrap();
    let (va, vb) = (x0.read("a", &[]), x0.read("b", &[]));
    let s = serialize(&a);
    let run = run(&s.algorithm, &[], &OracleEnv::new(), RunOptions::budget(10).recording()).unwrap();
    let first = run.states.iter().find(|st| st.read(&s.done, &[]).is_true()).ok_or("swap never finishes")?;
    ensure((first.read("a", &[]), first.read("b", &[])) == (vb.clone(), va.clone()), || {
        format!("swap gave a = {:?}, b = {:?}", first.read("a", &[]), first.read("b", &[]))
    })?;
    Ok(format!("200 algorithms x 10 mega-steps ({} mega-steps run); swap exchanges", r.steps))
}

/// Counts applications of extrinsic symbols in `t`.
fn extrinsic_heads(a: &Algorithm, t: &Term) -> usize {
    let mut n = 0;
    t.visit(&mut |u| {
        if let Term::App { head, .. } = u {
            if a.vocabulary().get(head).is_some_and(|s| s.is_extrinsic()) {
                n += 1;
            }
        }
    });
    n
}

fn shape_of(a: &Algorithm) -> Result<usize, String> {
    let s = serialize(a);
    let kinds = check_shape(&s.algorithm).map_err(|e| format!("unclassified: {e:?}"))?;
    ensure(kinds == s.kinds, || "classification disagrees with the pass".into())?;
    for (c, k) in s.clauses.iter().zip(&kinds) {
        let mut n = extrinsic_heads(&s.algorithm, &c.guard);
        c.body.visit_terms(&mut |t| n += extrinsic_heads(&s.algorithm, t));
        let want = match k {
            ClauseKind::Pure => 0,
            ClauseKind::Tainted { .. } => 1,
        };
        ensure(n == want, || format!("clause with {n} extrinsic heads classified {k:?}"))?;
    }
    Ok(kinds.len())
}

fn corollary_shape() -> Check {
    let mut clauses = 0;
    for i in 0..200 {
        let case = draw_case(Pass::Serialize, case_seed(SEED, i));
        clauses += shape_of(&case.algorithm).map_err(|e| format!("case {i}: {e}"))?;
    }
    for f in ["even.asm", "odd.asm", "factorial.asm", "fib_a.asm", "fib_b.asm", "relativized.asm", "swap.asm"] {
        clauses += shape_of(&load(f)).map_err(|e| format!("{f}: {e}"))?;
    }
    Ok(format!("207 outputs, {clauses} clauses classified"))
}

fn factorial(x: u64) -> u64 {
    (1..=x).product()
}

fn fib(x: u64) -> u64 {
    let (mut a, mut b) = (0, 1);
    for _ in 0..x {
        (a, b) = (b, a + b);
    }
    a
}

fn pruning() -> Check {
    let dispatch = DispatchOptions {
        max_steps: PRUNE_BUDGET,
        max_depth: 64,
    };
    let cases: [BundleCase; 3] = [
        ("evenodd.bundle.json", 12, |x| Value::from_bool(x % 2 == 0)),
        ("factorial.bundle.json", 6, |x| Value::Nat(factorial(x))),
        ("fib.bundle.json", 10, |x| Value::Nat(fib(x))),
    ];
    let mut runs = 0;
    for (file, n, oracle) in cases {
        let bundle = AlgorithmBundle::load(&corpus(file)).map_err(|e| format!("{file}: {e}"))?;
        let pruned = prune(&bundle).map_err(|e| format!("{file}: {e}"))?;
        ensure(is_means_fit_effective(pruned.algorithm.vocabulary()), || format!("{file}: extrinsics remain"))?;
        for x in 0..=n {
            let want = RunStatus::OutputProduced(oracle(x));
            let reference = oracle_dispatch_run(&bundle, 0, &[Value::Nat(x)], &Silent, dispatch).unwrap().status;
            ensure(reference == want, || format!("{file}: dispatch gives {reference:?} at {x}"))?;
            let got = run(&pruned.algorithm, &[Value::Nat(x)], &Silent, RunOptions::budget(PRUNE_BUDGET)).unwrap();
            ensure(got.status == want, || format!("{file}: pruned gives {:?} at {x}", got.status))?;
            runs += 1;
        }
        let inputs: Vec<Vec<Value>> = (0..=n).map(|x| vec![Value::Nat(x)]).collect();
        let v = verify_pruning(&bundle, &pruned, &inputs, &Silent, PRUNE_BUDGET, dispatch);
        ensure(v.passed(), || format!("{file}: {:?}", v.divergence))?;
        for claim in ["stack-bounds", "toil-exclusive", "resume-level", "session-fresh", "abandoned-sessions"] {
            ensure(v.claims.get(claim).is_some_and(|t| t.checked > 0), || format!("{file}: {claim} never audited"))?;
        }
    }
    Ok(format!("{runs} inputs across 3 bundles, audits hold"))
}

fn relativized() -> Check {
    let bundle = AlgorithmBundle::load(&corpus("relativized.bundle.json")).map_err(|e| e.to_string())?;
    let pruned = prune(&bundle).map_err(|e| e.to_string())?.algorithm;
    let extrinsics: Vec<String> = pruned.vocabulary().extrinsics().map(|s| s.name.to_string()).collect();
    let declared: Vec<String> = bundle.passthrough.iter().map(|s| s.to_string()).collect();
    ensure(declared.len() == 1 && extrinsics == declared, || format!("extrinsics {extrinsics:?}"))?;
    let text = std::fs::read_to_string(corpus("h.json")).unwrap();
    let env = OracleEnv::from_tables(parse_oracle_tables(&bundle.entry().structure.datastructure, &text).unwrap());
    let dispatch = DispatchOptions {
        max_steps: PRUNE_BUDGET,
        max_depth: 64,
    };
    for x in 0..=10u64 {
        // h(n) = (7n + 3) mod 11, applied to 2x
        let want = RunStatus::OutputProduced(Value::Nat((14 * x + 3) % 11));
        let reference = oracle_dispatch_run(&bundle, 0, &[Value::Nat(x)], &env, dispatch).unwrap().status;
        let got = run(&pruned, &[Value::Nat(x)], &env, RunOptions::budget(PRUNE_BUDGET)).unwrap().status;
        ensure(reference == want && got == want, || format!("x = {x}: reference {reference:?}, pruned {got:?}"))?;
    }
    Ok(format!("only extrinsic is {}; 11 inputs agree", declared[0]))
}

/// Values worth probing: everything mentioned by an init or table entry of
/// `a`, plus small naturals and the constants.
fn probe_pool(a: &Algorithm) -> Vec<Value> {
    let mut pool: BTreeSet<Value> = (0..16).map(Value::Nat).collect();
    pool.extend([Value::True, Value::False, Value::Nil]);
    for entries in a.init.values() {
        for (args, v) in entries {
            pool.extend(args.iter().cloned());
            pool.insert(v.clone());
        }
    }
    pool.into_iter().collect()
}

/// Separates `a` and confirms every non-input dynamic starts at its
/// default: no init entries survive, and 100 sampled tuples per symbol
/// (the original init keys first) read back the default.
fn probe(a: &Algorithm, inputs: &[Value], rng: &mut ChaCha8Rng) -> Result<usize, String> {
    let b = separate_all(a).algorithm;
    let is_input = |s: &str| b.vocabulary().get(s).is_some_and(|s| matches!(s.io, IoRole::Input(_)));
    for (sym, entries) in &b.init {
        ensure(entries.is_empty() || is_input(sym), || format!("{sym} keeps init entries"))?;
    }
    let st = b.initial_state(inputs).map_err(|e| e.to_string())?;
    let pool = probe_pool(a);
    let mut probed = 0;
    for s in b.vocabulary().dynamics().filter(|s| !matches!(s.io, IoRole::Input(_))) {
        let mut tuples: Vec<Vec<Value>> = a
            .init
            .iter()
            .flat_map(|(_, e)| e.keys())
            .filter(|k| k.len() == s.arity)
            .cloned()
            .collect();
        while tuples.len() < 100 {
            tuples.push((0..s.arity).map(|_| pool.choose(rng).unwrap().clone()).collect());
        }
        tuples.truncate(100);
        for t in &tuples {
            let v = st.read(&s.name, t);
            ensure(v == s.default_value(), || format!("{}{t:?} starts as {v:?}", s.name))?;
        }
        probed += tuples.len();
    }
    Ok(probed)
}

fn default_inputs(a: &Algorithm) -> Vec<Value> {
    a.inputs().iter().map(|s| s.default_value()).collect()
}

fn uninformative() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut algorithms = 0;
    let mut probed = 0;
    for (name, a) in corpus_units() {
        let Ok(a) = a else { continue };
        probed += probe(&a, &default_inputs(&a), &mut rng).map_err(|e| format!("{name}: {e}"))?;
        algorithms += 1;
    }
    for case in separation_hand_cases() {
        probed += probe(&case.algorithm, &case.inputs, &mut rng).map_err(|e| format!("{}: {e}", case.name))?;
        algorithms += 1;
    }
    for i in 0..200 {
        let case = draw_case(Pass::Separate, case_seed(SEED, i));
        probed += probe(&case.algorithm, &case.inputs, &mut rng).map_err(|e| format!("case {i}: {e}"))?;
        algorithms += 1;
    }
    Ok(format!("{algorithms} separated algorithms, {probed} locations probed"))
}

fn corpus_units() -> Vec<(String, Result<Algorithm, String>)> {
    let mut out: Vec<_> = std::fs::read_dir(corpus(""))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "asm"))
        .map(|p| {
            let name = p.file_name().unwrap().to_string_lossy().into_owned();
            let src = std::fs::read_to_string(&p).unwrap();
            (name, parse(&src).map_err(|e| e.to_string()))
        })
        .collect();
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

fn round_trip() -> Check {
    let mut files = 0;
    for (name, a) in corpus_units() {
        let a = match a {
            Ok(a) => a,
            // the one deliberately ill-formed unit
            Err(_) if name == "arity_mismatch.asm" => continue,
            Err(e) => return Err(format!("{name}: {e}")),
        };
        let text = print(&a);
        ensure(parse(&text).as_ref() == Ok(&a), || format!("{name} does not survive print then parse"))?;
        files += 1;
    }
    for seed in 0..1000 {
        let a = generate(&GenConfig::default().with_seed(seed));
        ensure(parse(&print(&a)).as_ref() == Ok(&a), || format!("generated unit {seed}"))?;
    }
    Ok(format!("{files} corpus units, 1000 generated units"))
}

fn determinism() -> Check {
    let mut bytes = 0;
    for pass in [Pass::Separate, Pass::Normalize, Pass::Serialize, Pass::Prune] {
        let cfg = SuiteConfig::new(pass, 42, 50, 10);
        let once = serde_json::to_string_pretty(&run_suite(&cfg).to_json()).unwrap();
        let twice = serde_json::to_string_pretty(&run_suite(&cfg).to_json()).unwrap();
        ensure(once == twice, || format!("{pass} reports differ"))?;
        bytes += once.len();
    }
    Ok(format!("4 suites re-run, {bytes} report bytes identical"))
}

fn panic_text(p: Box<dyn std::any::Any + Send>) -> String {
    let msg = match (p.downcast_ref::<String>(), p.downcast_ref::<&str>()) {
        (Some(s), _) => s.clone(),
        (_, Some(s)) => s.to_string(),
        _ => "unknown payload".into(),
    };
    format!("panicked: {msg}")
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("separation", separation),
        ("normalization", normalization),
        ("serialization", serialization),
        ("clause shape", corollary_shape),
        ("pruning", pruning),
        ("relativized pruning", relativized),
        ("uninformative start", uninformative),
        ("round trip", round_trip),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let r = with_deep_stack(|| catch_unwind(AssertUnwindSafe(check))).unwrap_or_else(|p| Err(panic_text(p)));
        let took = start.elapsed();
        match r {
            Ok(detail) => println!("criterion {}: PASS {name}: {detail} [{took:.1?}]", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {why} [{took:.1?}]", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
