//! Parse a program, check it, and run it on a few inputs.
//!
//! cargo run --example interpret

use asm_workbench::eval::Silent;
use asm_workbench::interp::{run, RunOptions, RunStatus};
use asm_workbench::parser::parse;
use asm_workbench::value::Value;

const DOUBLE: &str = "\
backend arithmetic
fn x/0 in 0
fn out/0 out
fn loaded/0 relational
fn i/0 numeric
fn acc/0 numeric

program
  if not(loaded) then
    par { i := x; acc := x; loaded := true }
  else if eq(i, 0) then
    out := acc
  else
    par { acc := succ(acc); i := pred(i) }
";

fn main() {
    let alg = parse(DOUBLE).expect("program parses");
    alg.check(false).expect("program checks");
    for x in 0..5 {
        let r = run(&alg, &[Value::Nat(x)], &Silent, RunOptions::budget(1000)).unwrap();
        match r.status {
            RunStatus::OutputProduced(v) => println!("double({x}) = {v:?} after {} steps", r.steps),
            other => println!("double({x}) ended with {other:?}"),
        }
    }
}
