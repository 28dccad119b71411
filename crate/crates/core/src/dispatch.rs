//! Reference semantics for bundles: every covered extrinsic query is
//! answered by running the member that computes it.

use std::cell::Cell;

use thiserror::Error;

use crate::algorithm::InputError;
use crate::bundle::AlgorithmBundle;
use crate::eval::Oracle;
use crate::interp::{run, RunOptions, RunResult, RunStatus};
use crate::value::Value;
use crate::vocab::Symbol;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DispatchError {
    #[error("oracle recursion deeper than {0}")]
    DepthExceeded(usize),
    #[error(transparent)]
    Input(#[from] InputError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DispatchOptions {
    /// Step budget of each individual run, nested runs included.
    pub max_steps: usize,
    pub max_depth: usize,
}

struct Dispatcher<'a> {
    bundle: &'a AlgorithmBundle,
    passthrough: &'a dyn Oracle,
    opts: DispatchOptions,
    depth: usize,
    exceeded: &'a Cell<bool>,
}

impl Oracle for Dispatcher<'_> {
    fn answer(&self, symbol: &Symbol, args: &[Value]) -> Option<Value> {
        let Some(&j) = self.bundle.coverage.get(&symbol.name) else {
            return self.passthrough.answer(symbol, args);
        };
        if self.depth >= self.opts.max_depth {
            self.exceeded.set(true);
            return None;
        }
        let inner = Dispatcher {
            depth: self.depth + 1,
            ..*self
        };
        let alg = &self.bundle.members[j].algorithm;
        let r = run(alg, args, &inner, RunOptions::budget(self.opts.max_steps)).ok()?;
        // a failed, stuck or unfinished callee leaves the caller stuck
        r.status.output().cloned()
    }
}

/// Runs member `entry` on `inputs`, answering covered extrinsic queries by
/// recursive runs and passthrough ones with `passthrough`.
pub fn oracle_dispatch_run(
    bundle: &AlgorithmBundle,
    entry: usize,
    inputs: &[Value],
    passthrough: &dyn Oracle,
    opts: DispatchOptions,
) -> Result<RunResult, DispatchError> {
    let exceeded = Cell::new(false);
    let d = Dispatcher {
        bundle,
        passthrough,
        opts,
        depth: 0,
        exceeded: &exceeded,
    };
    let r = run(
        &bundle.members[entry].algorithm,
        inputs,
        &d,
        RunOptions::budget(opts.max_steps),
    )?;
    if exceeded.get() && matches!(r.status, RunStatus::Stuck { .. }) {
        return Err(DispatchError::DepthExceeded(opts.max_depth));
    }
    Ok(r)
}
