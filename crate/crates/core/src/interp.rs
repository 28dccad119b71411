//! Step function and run loop.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::algorithm::{Algorithm, InputError};
use crate::eval::{fire, EvalTrace, Failure, Halt, Oracle};
use crate::state::{State, UpdateSet};
use crate::tables::OracleTables;
use crate::value::{Name, Value};
use crate::vocab::Symbol;

pub type Script = Arc<dyn Fn(&[Value]) -> Option<Value> + Send + Sync>;

/// How one extrinsic symbol is answered.
#[derive(Clone)]
pub enum Responder {
    /// Answers exactly the tabulated queries.
    Table(BTreeMap<Vec<Value>, Value>),
    Script(Script),
    /// A genuine oracle that never replies.
    NoAnswer,
}

impl fmt::Debug for Responder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Responder::Table(t) => f.debug_tuple("Table").field(t).finish(),
            Responder::Script(_) => f.write_str("Script(..)"),
            Responder::NoAnswer => f.write_str("NoAnswer"),
        }
    }
}

/// Responders for extrinsic symbols. Symbols without a responder never
/// reply.
#[derive(Clone, Debug, Default)]
pub struct OracleEnv {
    responders: BTreeMap<Name, Responder>,
}

impl OracleEnv {
    pub fn new() -> OracleEnv {
        OracleEnv::default()
    }

    pub fn from_tables(tables: OracleTables) -> OracleEnv {
        let mut env = OracleEnv::new();
        for (sym, t) in tables {
            env.set(sym, Responder::Table(t));
        }
        env
    }

    pub fn set(&mut self, symbol: Name, responder: Responder) {
        self.responders.insert(symbol, responder);
    }

    pub fn with(mut self, symbol: &str, responder: Responder) -> OracleEnv {
        self.set(crate::value::name(symbol), responder);
        self
    }

    pub fn script(
        self,
        symbol: &str,
        f: impl Fn(&[Value]) -> Option<Value> + Send + Sync + 'static,
    ) -> OracleEnv {
        self.with(symbol, Responder::Script(Arc::new(f)))
    }
}

impl Oracle for OracleEnv {
    fn answer(&self, symbol: &Symbol, args: &[Value]) -> Option<Value> {
        match self.responders.get(&symbol.name)? {
            Responder::Table(t) => t.get(args).cloned(),
            Responder::Script(f) => f(args),
            Responder::NoAnswer => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Advanced,
    Failed(Failure),
    StuckOnOracle { symbol: Name, args: Vec<Value> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepRecord {
    pub index: usize,
    /// Updates produced before the step halted (complete when advanced).
    pub updates: UpdateSet,
    pub trace: EvalTrace,
    pub outcome: Outcome,
}

/// Executes one step of `alg`'s program at `state`. On failure or an
/// unanswered query the state is returned unchanged.
pub fn step(alg: &Algorithm, state: &State, env: &dyn Oracle, index: usize) -> (State, StepRecord) {
    let mut trace = EvalTrace::new();
    let fired = fire(&alg.program, state, env, &mut trace);
    let (next, updates, outcome) = match fired {
        Ok(us) => {
            let mut next = state.clone();
            match next.apply(&us) {
                Ok(()) => (next, us, Outcome::Advanced),
                Err(f) => (state.clone(), us, Outcome::Failed(f)),
            }
        }
        Err(Halt::Failed(f)) => (state.clone(), UpdateSet::new(), Outcome::Failed(f)),
        Err(Halt::Stuck { symbol, args }) => (
            state.clone(),
            UpdateSet::new(),
            Outcome::StuckOnOracle { symbol, args },
        ),
    };
    (
        next,
        StepRecord {
            index,
            updates,
            trace,
            outcome,
        },
    )
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RunStatus {
    OutputProduced(Value),
    Failed(Failure),
    Stuck { symbol: Name, args: Vec<Value> },
    BudgetExhausted,
}

impl RunStatus {
    pub fn name(&self) -> &'static str {
        match self {
            RunStatus::OutputProduced(_) => "OutputProduced",
            RunStatus::Failed(_) => "Failed",
            RunStatus::Stuck { .. } => "Stuck",
            RunStatus::BudgetExhausted => "BudgetExhausted",
        }
    }

    pub fn output(&self) -> Option<&Value> {
        match self {
            RunStatus::OutputProduced(v) => Some(v),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunOptions {
    pub max_steps: usize,
    /// Keep every visited state, starting with the initial one.
    pub keep_states: bool,
    pub keep_records: bool,
}

impl RunOptions {
    pub fn budget(max_steps: usize) -> RunOptions {
        RunOptions {
            max_steps,
            keep_states: false,
            keep_records: false,
        }
    }

    pub fn recording(mut self) -> RunOptions {
        self.keep_states = true;
        self.keep_records = true;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunResult {
    pub status: RunStatus,
    /// Steps that advanced the state.
    pub steps: usize,
    pub states: Vec<State>,
    pub records: Vec<StepRecord>,
    pub final_state: State,
}

/// Whether `state` carries a non-default output value.
pub fn output_of(alg: &Algorithm, state: &State) -> Option<Value> {
    let out = alg.output()?;
    let v = state.read(&out.name, &[]);
    (v != out.default_value()).then_some(v)
}

/// Runs from the initial state for `inputs` until the output variable
/// leaves its default, the machine fails or gets stuck, or the budget is
/// used up.
pub fn run(
    alg: &Algorithm,
    inputs: &[Value],
    env: &dyn Oracle,
    opts: RunOptions,
) -> Result<RunResult, InputError> {
    let initial = alg.initial_state(inputs)?;
    Ok(run_from(alg, initial, env, opts, &mut |_, _| {}))
}

/// Runs from a given state, reporting each step record and successor state
/// to `observe`.
pub fn run_from(
    alg: &Algorithm,
    initial: State,
    env: &dyn Oracle,
    opts: RunOptions,
    observe: &mut dyn FnMut(&StepRecord, &State),
) -> RunResult {
    let mut state = initial;
    let mut states = Vec::new();
    let mut records = Vec::new();
    if opts.keep_states {
        states.push(state.clone());
    }
    let mut steps = 0;
    let status = loop {
        if steps >= opts.max_steps {
            break RunStatus::BudgetExhausted;
        }
        let (next, rec) = step(alg, &state, env, steps);
        observe(&rec, &next);
        let outcome = rec.outcome.clone();
        if opts.keep_records {
            records.push(rec);
        }
        match outcome {
            Outcome::Advanced => {}
            Outcome::Failed(f) => break RunStatus::Failed(f),
            Outcome::StuckOnOracle { symbol, args } => break RunStatus::Stuck { symbol, args },
        }
        state = next;
        steps += 1;
        if opts.keep_states {
            states.push(state.clone());
        }
        if let Some(v) = output_of(alg, &state) {
            break RunStatus::OutputProduced(v);
        }
    };
    RunResult {
        status,
        steps,
        states,
        records,
        final_state: state,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::Silent;
    use crate::parser::parse;

    const WATCHDOG: &str = "enum msg_t { alarm }\nfn b/0 relational\nfn msg/0\nfn log/0\n\
                            init b { [] -> true }\ninit msg { [] -> alarm }\n\
                            program\nif b then par { log := msg ; b := false }";

    #[test]
    fn watchdog_steps() {
        let a = parse(WATCHDOG).unwrap();
        let s0 = a.initial_state(&[]).unwrap();
        let (s1, r1) = step(&a, &s0, &Silent, 0);
        assert_eq!(r1.outcome, Outcome::Advanced);
        assert_eq!(r1.updates.len(), 2);
        assert_eq!(s1.read("b", &[]), Value::False);
        let (_, r2) = step(&a, &s1, &Silent, 1);
        assert!(r2.updates.is_empty());
    }

    #[test]
    fn unanswered_query_is_stuck() {
        let a = parse("backend arithmetic\nfn e/1 static extrinsic\nfn out/0 out\nprogram\nout := e(0)").unwrap();
        let r = run(&a, &[], &OracleEnv::new(), RunOptions::budget(5)).unwrap();
        assert_eq!(
            r.status,
            RunStatus::Stuck {
                symbol: "e".into(),
                args: vec![Value::Nat(0)]
            }
        );
        assert_eq!(r.steps, 0);
    }

    #[test]
    fn zero_budget() {
        let a = parse(WATCHDOG).unwrap();
        let r = run(&a, &[], &Silent, RunOptions::budget(0)).unwrap();
        assert_eq!((r.status, r.steps), (RunStatus::BudgetExhausted, 0));
    }

    #[test]
    fn identity_assignment() {
        let a = parse("backend arithmetic\nfn x/0\ninit x { [] -> 4 }\nprogram\nx := x").unwrap();
        let s0 = a.initial_state(&[]).unwrap();
        let (s1, r) = step(&a, &s0, &Silent, 0);
        assert_eq!(r.updates.len(), 1);
        assert_eq!(s1, s0);
    }
}
