//! Run the randomized co-simulation suite for every pass and print the
//! JSON reports.
//!
//! cargo run --release --example cosim

use asm_workbench::cosim::{run_suite, Pass, SuiteConfig};

fn main() {
    for pass in [Pass::Separate, Pass::Normalize, Pass::Serialize, Pass::Prune] {
        let report = run_suite(&SuiteConfig::new(pass, 1, 50, 20));
        println!("{pass}: {}/{} cases passed", report.passed, report.cases);
        if !report.ok() {
            println!("{}", serde_json::to_string_pretty(&report.to_json()).unwrap());
        }
    }
}
