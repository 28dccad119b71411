//! Split every dynamic function into static, delta and dirty-bit parts and
//! check the result against the original by co-simulation.
//!
//! cargo run --example separate

use asm_workbench::cosim::separation::verify_separation;
use asm_workbench::eval::Silent;
use asm_workbench::parser::parse;
use asm_workbench::passes::separate::separate_all;
use asm_workbench::printer::print;

const SRC: &str = "\
backend arithmetic
fn f/1 numeric
fn out/0 out
fn started/0 relational
init f { [0] -> 5, [1] -> 6 }

program
  if not(started) then
    par { f(0) := 1; started := true }
  else
    out := f(0)
";

fn main() {
    let alg = parse(SRC).unwrap();
    let cert = separate_all(&alg);
    println!("{}", print(&cert.algorithm));
    println!("renaming: {}", cert.to_json());
    let v = verify_separation(&alg, &cert, &[], &Silent, 20);
    println!("co-simulation passed: {} ({} steps)", v.passed(), v.steps);
    for (claim, tally) in &v.claims {
        println!("  claim {claim}: {} checks", tally.checked);
    }
}
