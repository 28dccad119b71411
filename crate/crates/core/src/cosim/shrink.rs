//! Best-effort deterministic shrinking of failing programs.

use crate::algorithm::Algorithm;
use crate::syntax::Rule;

fn count(r: &Rule) -> usize {
    let mut n = 0;
    r.visit_rules(&mut |_| n += 1);
    n
}

/// Replaces the `target`-th rule of a pre-order walk.
fn replace_at(r: &Rule, target: usize, with: &Rule) -> Rule {
    fn go(r: &Rule, target: usize, next: &mut usize, with: &Rule) -> Rule {
        let here = *next;
        *next += 1;
        if here == target {
            return with.clone();
        }
        match r {
            Rule::Assign { .. } => r.clone(),
            Rule::Cond {
                guard,
                then,
                otherwise,
            } => {
                let t = go(then, target, next, with);
                let o = go(otherwise, target, next, with);
                Rule::cond(guard.clone(), t, o)
            }
            Rule::Par(rs) => Rule::Par(rs.iter().map(|c| go(c, target, next, with)).collect()),
        }
    }
    go(r, target, &mut 0, with)
}

fn nth(r: &Rule, target: usize) -> Rule {
    let mut i = 0;
    let mut found = None;
    r.visit_rules(&mut |s| {
        if i == target {
            found = Some(s.clone());
        }
        i += 1;
    });
    found.expect("index in range")
}

/// Smaller variants of `r`, most aggressive first.
pub fn candidates(r: &Rule) -> Vec<Rule> {
    let mut out = Vec::new();
    for i in 0..count(r) {
        let sub = nth(r, i);
        if sub.is_skip() {
            continue;
        }
        out.push(replace_at(r, i, &Rule::skip()));
        match &sub {
            Rule::Cond { then, otherwise, .. } => {
                out.push(replace_at(r, i, then));
                out.push(replace_at(r, i, otherwise));
            }
            Rule::Par(rs) => {
                for k in 0..rs.len() {
                    let mut fewer = rs.clone();
                    fewer.remove(k);
                    out.push(replace_at(r, i, &Rule::Par(fewer)));
                }
            }
            Rule::Assign { .. } => {}
        }
    }
    out
}

/// Repeatedly replaces the program with the first smaller variant that
/// still checks and still fails, trying at most `max_attempts` variants.
pub fn shrink(alg: &Algorithm, fails: &dyn Fn(&Algorithm) -> bool, max_attempts: usize) -> Algorithm {
    let mut best = alg.clone();
    let mut attempts = 0;
    'outer: loop {
        for c in candidates(&best.program) {
            if attempts >= max_attempts {
                break 'outer;
            }
            attempts += 1;
            let mut trial = best.clone();
            trial.program = c;
            if trial.program.size() < best.program.size() && trial.check(true).is_ok() && fails(&trial) {
                best = trial;
                continue 'outer;
            }
        }
        break;
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse;

    #[test]
    fn shrinks_to_the_culprit() {
        let a = parse(
            "backend arithmetic\nfn x/0\nfn y/0\nprogram\n\
             par { x := 1 ; if eq(y, 0) then y := 2 else y := 3 ; x := 2 }",
        )
        .unwrap();
        let fails = |b: &Algorithm| {
            let mut n = 0;
            b.program.visit_rules(&mut |r| {
                if matches!(r, Rule::Assign { head, .. } if &**head == "x") {
                    n += 1;
                }
            });
            n >= 2
        };
        let s = shrink(&a, &fails, 1000);
        assert_eq!(
            crate::printer::print_rule(&s.program),
            "par {\n  x := 1;\n  x := 2\n}"
        );
    }
}
