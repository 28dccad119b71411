//! JSON-lines trace format: one object per step, then a terminal line.

use std::io::{self, Write};

use serde_json::{json, Value as Json};

use crate::eval::{AccessKind, EvalTrace, Failure};
use crate::interp::{Outcome, RunResult, RunStatus, StepRecord};
use crate::printer::print_term;
use crate::value::Value;

fn args_json(args: &[Value]) -> Json {
    Json::Array(args.iter().map(Value::to_json).collect())
}

fn accesses(trace: &EvalTrace, keep: impl Fn(AccessKind) -> bool) -> Json {
    Json::Array(
        trace
            .accesses
            .iter()
            .filter(|a| keep(a.kind))
            .map(|a| {
                json!([
                    &*a.symbol,
                    args_json(&a.args),
                    a.value.as_ref().map_or(Json::Null, Value::to_json)
                ])
            })
            .collect(),
    )
}

pub fn failure_json(f: &Failure) -> Json {
    match f {
        Failure::Undefined { symbol, args } => {
            json!({"kind": "Undefined", "symbol": &**symbol, "args": args_json(args)})
        }
        Failure::Contradiction {
            location,
            first,
            second,
        } => json!({
            "kind": "Contradiction",
            "symbol": &*location.symbol,
            "args": args_json(&location.args),
            "values": [first.to_json(), second.to_json()],
        }),
        Failure::GuardNotBoolean { guard, value } => json!({
            "kind": "GuardNotBoolean",
            "guard": print_term(guard),
            "value": value.to_json(),
        }),
    }
}

pub fn step_json(rec: &StepRecord) -> Json {
    let outcome = match &rec.outcome {
        Outcome::Advanced => json!("Advanced"),
        Outcome::Failed(f) => json!({"Failed": failure_json(f)}),
        Outcome::StuckOnOracle { symbol, args } => {
            json!({"StuckOnOracle": {"symbol": &**symbol, "args": args_json(args)}})
        }
    };
    let updates: Vec<Json> = rec
        .updates
        .iter()
        .map(|u| json!([&*u.location.symbol, args_json(&u.location.args), u.value.to_json()]))
        .collect();
    json!({
        "step": rec.index,
        "updates": updates,
        "static_evals": accesses(&rec.trace, |k| k != AccessKind::Dynamic),
        "extrinsic_queries": accesses(&rec.trace, |k| k == AccessKind::Extrinsic),
        "outcome": outcome,
    })
}

pub fn status_json(result: &RunResult) -> Json {
    let mut obj = json!({
        "status": result.status.name(),
        "output": result.status.output().map_or(Json::Null, Value::to_json),
        "steps": result.steps,
    });
    match &result.status {
        RunStatus::Failed(f) => obj["failure"] = failure_json(f),
        RunStatus::Stuck { symbol, args } => {
            obj["stuck"] = json!({"symbol": &**symbol, "args": args_json(args)})
        }
        _ => {}
    }
    obj
}

pub fn write_trace(out: &mut dyn Write, result: &RunResult) -> io::Result<()> {
    for rec in &result.records {
        writeln!(out, "{}", step_json(rec))?;
    }
    writeln!(out, "{}", status_json(result))
}
