//! A workbench for sequential abstract state machines.
//!
//! Programs are written in a small textual language (see [`parser`]) and
//! executed by the interpreter in [`interp`]. Four transformation passes
//! live under [`passes`], and [`cosim`] checks their behavioural
//! guarantees by running original and transformed machines side by side.

pub mod algorithm;
pub mod bundle;
pub mod cli;
pub mod cosim;
pub mod dispatch;
pub mod eval;
pub mod interp;
pub mod parser;
pub mod passes;
pub mod printer;
pub mod stack;
pub mod state;
pub mod structure;
pub mod syntax;
pub mod tables;
pub mod trace;
pub mod value;
pub mod vocab;
