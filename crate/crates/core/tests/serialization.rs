mod common;

use asm_workbench::algorithm::Algorithm;
use asm_workbench::cosim::serialization::verify_serialization;
use asm_workbench::eval::Silent;
use asm_workbench::interp::{run, OracleEnv, RunOptions, RunStatus};
use asm_workbench::parser::parse;
use asm_workbench::passes::serialize::{check_shape, serialize, ClauseKind};
use asm_workbench::state::State;
use asm_workbench::syntax::Term;
use asm_workbench::value::Value;

use common::{corpus, load};

fn plus_ten() -> OracleEnv {
    OracleEnv::new().script("e", |args| Some(Value::Nat(args[0].as_nat()? + 10)))
}

/// States of `alg` at which `done` has just been raised.
fn done_states(alg: &Algorithm, done: &str, env: &OracleEnv, budget: usize) -> Vec<State> {
    let r = run(alg, &[], env, RunOptions::budget(budget).recording()).unwrap();
    r.states.into_iter().filter(|s| s.read(done, &[]).is_true()).collect()
}

fn nat(st: &State, sym: &str) -> u64 {
    st.read(sym, &[]).as_nat().unwrap()
}

const TAINTED_SWAP: &str = "backend arithmetic\nfn a/0\nfn b/0\nfn e/1 extrinsic\n\
                            init a { [] -> 1 }\ninit b { [] -> 2 }\nprogram\npar { a := b ; b := e(a) }";

#[test]
fn swap_exchanges_values() {
    let a = load("swap.asm");
    let s = serialize(&a);
    let first = &done_states(&s.algorithm, &s.done, &OracleEnv::new(), 10)[0];
    assert_eq!((nat(first, "a"), nat(first, "b")), (2, 1));
    let r = run(&s.algorithm, &[], &Silent, RunOptions::budget(100)).unwrap();
    assert_eq!(r.status, RunStatus::OutputProduced(Value::Nat(2)));
}

#[test]
fn tainted_swap_reads_old_values() {
    let a = parse(TAINTED_SWAP).unwrap();
    let s = serialize(&a);
    let env = plus_ten();
    let done = done_states(&s.algorithm, &s.done, &env, 40);
    // a takes the old b; b takes e of the old a, then the pair keeps rotating
    assert_eq!((nat(&done[0], "a"), nat(&done[0], "b")), (2, 11));
    assert_eq!((nat(&done[1], "a"), nat(&done[1], "b")), (11, 12));
    let v = verify_serialization(&a, &s, &[], &env, 10);
    assert!(v.passed(), "{:?}", v.divergence);
}

#[test]
fn sequential_swap_is_caught() {
    // what running the two assignments one after the other would compute
    let a = parse(TAINTED_SWAP).unwrap();
    let mut seq = a.clone();
    seq.program = asm_workbench::parser::parse_rule("par { a := b ; b := e(b) }").unwrap();
    let v = verify_serialization(&a, &serialize(&seq), &[], &plus_ten(), 10);
    assert_eq!(v.divergence.expect("diverges").claim, "query-union");
}

#[test]
fn queries_follow_matrix_order() {
    let a = parse(
        "backend arithmetic\nfn x/0 in 0\nfn out/0 out\nfn e1/1 extrinsic\nfn e2/1 extrinsic\n\
         program\nout := e1(e2(x))",
    )
    .unwrap();
    let env = OracleEnv::new()
        .script("e2", |args| Some(Value::Nat(args[0].as_nat()? + 2)))
        .script("e1", |args| Some(Value::Nat(args[0].as_nat()? * 3)));
    let s = serialize(&a);
    let r = run(&s.algorithm, &[Value::Nat(3)], &env, RunOptions::budget(10).recording()).unwrap();
    let asked: Vec<Vec<String>> = r
        .records
        .iter()
        .map(|rec| {
            rec.trace
                .extrinsic_queries()
                .iter()
                .map(|q| format!("{}{:?}", q.0, q.1))
                .collect()
        })
        .collect();
    // the inner query first, then the outer one on its answer
    assert_eq!(asked[0], vec!["e2[Nat(3)]".to_string()]);
    assert_eq!(asked[1], vec!["e1[Nat(5)]".to_string()]);
    assert_eq!(r.status, RunStatus::OutputProduced(Value::Nat(15)));
}

#[test]
fn relativized_member_serializes() {
    let a = load("relativized.asm");
    let tables = std::fs::read_to_string(corpus("h.json")).unwrap();
    let tables = asm_workbench::tables::parse_oracle_tables(&a.structure.datastructure, &tables).unwrap();
    let mut env = OracleEnv::from_tables(tables);
    env = env.script("dbl", |args| Some(Value::Nat(args[0].as_nat()? * 2)));
    let s = serialize(&a);
    for x in 0..8u64 {
        let v = verify_serialization(&a, &s, &[Value::Nat(x)], &env, 10);
        assert!(v.passed(), "x = {x}: {:?}", v.divergence);
        let r = run(&s.algorithm, &[Value::Nat(x)], &env, RunOptions::budget(100)).unwrap();
        assert_eq!(r.status, RunStatus::OutputProduced(Value::Nat((14 * x + 3) % 11)));
    }
}

fn extrinsic_heads(a: &Algorithm, t: &Term, n: &mut usize) {
    t.visit(&mut |u| {
        if let Term::App { head, .. } = u {
            if a.vocabulary().get(head).is_some_and(|s| s.is_extrinsic()) {
                *n += 1;
            }
        }
    });
}

#[test]
fn corpus_clauses_classify() {
    for f in ["even.asm", "odd.asm", "factorial.asm", "fib_a.asm", "relativized.asm", "swap.asm"] {
        let s = serialize(&load(f));
        let kinds = check_shape(&s.algorithm).unwrap();
        assert_eq!(kinds, s.kinds, "{f}");
        for (c, k) in s.clauses.iter().zip(&kinds) {
            let mut n = 0;
            extrinsic_heads(&s.algorithm, &c.guard, &mut n);
            c.body.visit_terms(&mut |t| extrinsic_heads(&s.algorithm, t, &mut n));
            let want = match k {
                ClauseKind::Pure => 0,
                ClauseKind::Tainted { .. } => 1,
            };
            assert_eq!(n, want, "{f}: clause {c:?}");
        }
    }
}
