//! Generate random programs, print them, and parse them back.
//!
//! cargo run --example roundtrip

use asm_workbench::cosim::{generate, GenConfig};
use asm_workbench::parser::parse;
use asm_workbench::printer::print;

fn main() {
    let text = print(&generate(&GenConfig::default().with_seed(3)));
    println!("{text}");
    let mut same = 0;
    for seed in 0..200 {
        let a = generate(&GenConfig::default().with_seed(seed));
        if parse(&print(&a)).as_ref() == Ok(&a) {
            same += 1;
        }
    }
    println!("{same}/200 generated units survive print then parse");
}
