//! Serialize a program with nested oracle queries so that each step asks
//! at most one, then run it against a scripted oracle.
//!
//! cargo run --example serialize

use asm_workbench::cosim::serialization::verify_serialization;
use asm_workbench::interp::{run, OracleEnv, RunOptions};
use asm_workbench::parser::parse;
use asm_workbench::passes::serialize::serialize;
use asm_workbench::printer::print;
use asm_workbench::value::Value;

const SRC: &str = "\
backend arithmetic
fn x/0 in 0
fn out/0 out
fn inc/1 extrinsic
fn dbl/1 extrinsic

program
  out := dbl(inc(x))
";

fn main() {
    let alg = parse(SRC).unwrap();
    let env = OracleEnv::new()
        .script("inc", |a| Some(Value::Nat(a[0].as_nat()? + 1)))
        .script("dbl", |a| Some(Value::Nat(a[0].as_nat()? * 2)));
    let s = serialize(&alg);
    println!("{}", print(&s.algorithm));
    println!("clauses: {:?}", s.kinds);
    println!("at most {} steps per original step", s.bound);
    let r = run(&s.algorithm, &[Value::Nat(4)], &env, RunOptions::budget(100)).unwrap();
    println!("dbl(inc(4)) -> {:?} in {} steps", r.status, r.steps);
    let v = verify_serialization(&alg, &s, &[Value::Nat(4)], &env, 10);
    println!("mega-step check passed: {}", v.passed());
}
