//! Flatten a nested rule into a compound conditional of parallel
//! assignments, then confirm both fire the same updates.
//!
//! cargo run --example normalize

use asm_workbench::cosim::normalization::{enumerate_states, verify_normalization};
use asm_workbench::eval::Silent;
use asm_workbench::parser::parse;
use asm_workbench::passes::normalize::normalize;
use asm_workbench::printer::print_rule;

const SRC: &str = "\
backend arithmetic
fn a/0 numeric
fn b/0 numeric
fn p/0
fn q/0

program
  par {
    if eq(a, 0) then p := 1 else if eq(a, 1) then p := 2;
    if eq(b, 0) then q := 3
  }
";

fn main() {
    let alg = parse(SRC).unwrap();
    let cc = normalize(&alg.program);
    println!("{} clauses, flat: {}", cc.clauses.len(), cc.is_flat());
    println!("{}", print_rule(&cc.to_rule()));
    let states = enumerate_states(&alg, &alg.program, 50, 0);
    let v = verify_normalization(&alg.program, &states, &Silent);
    println!("equivalent on {} states: {}", states.len(), v.passed());
}
