//! Inline a recursive bundle into one oracle-free machine with an explicit
//! call stack, and compare it with running the bundle by dispatch.
//!
//! cargo run --example prune

use std::path::PathBuf;

use asm_workbench::bundle::AlgorithmBundle;
use asm_workbench::dispatch::{oracle_dispatch_run, DispatchOptions};
use asm_workbench::eval::Silent;
use asm_workbench::interp::{run, RunOptions};
use asm_workbench::passes::prune::prune;
use asm_workbench::value::Value;
use asm_workbench::vocab::is_means_fit_effective;

fn main() {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus/fib.bundle.json");
    let bundle = AlgorithmBundle::load(&path).unwrap();
    let pruned = prune(&bundle).unwrap();
    let b = &pruned.algorithm;
    println!("pruned machine: {} symbols, oracle-free: {}", b.vocabulary().len(), is_means_fit_effective(b.vocabulary()));
    let opts = DispatchOptions {
        max_steps: 100_000,
        max_depth: 64,
    };
    for x in 0..=10 {
        let reference = oracle_dispatch_run(&bundle, 0, &[Value::Nat(x)], &Silent, opts).unwrap();
        let got = run(b, &[Value::Nat(x)], &Silent, RunOptions::budget(200_000)).unwrap();
        println!("fib({x}): dispatch {:?}, pruned {:?} in {} steps", reference.status, got.status, got.steps);
    }
}
