//! Terms and rules: the program AST.

use std::collections::BTreeSet;

use crate::value::{name, Name};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    /// Application of a function symbol (logic, backend or declared).
    App { head: Name, args: Vec<Term> },
    /// Natural-number literal from the arithmetic backend.
    Nat(u64),
}

impl Term {
    pub fn app(head: impl AsRef<str>, args: Vec<Term>) -> Term {
        Term::App {
            head: name(head),
            args,
        }
    }

    pub fn constant(head: impl AsRef<str>) -> Term {
        Term::app(head, Vec::new())
    }

    pub fn tt() -> Term {
        Term::constant("true")
    }

    pub fn ff() -> Term {
        Term::constant("false")
    }

    pub fn nil() -> Term {
        Term::constant("nil")
    }

    pub fn eq(a: Term, b: Term) -> Term {
        Term::app("eq", vec![a, b])
    }

    pub fn and(a: Term, b: Term) -> Term {
        Term::app("and", vec![a, b])
    }

    pub fn or(a: Term, b: Term) -> Term {
        Term::app("or", vec![a, b])
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(a: Term) -> Term {
        Term::app("not", vec![a])
    }

    pub fn ite(c: Term, t: Term, e: Term) -> Term {
        Term::app("ite", vec![c, t, e])
    }

    pub fn succ(a: Term) -> Term {
        Term::app("succ", vec![a])
    }

    pub fn pred(a: Term) -> Term {
        Term::app("pred", vec![a])
    }

    pub fn head(&self) -> Option<&Name> {
        match self {
            Term::App { head, .. } => Some(head),
            Term::Nat(_) => None,
        }
    }

    pub fn args(&self) -> &[Term] {
        match self {
            Term::App { args, .. } => args,
            Term::Nat(_) => &[],
        }
    }

    pub fn is_const(&self, symbol: &str) -> bool {
        matches!(self, Term::App { head, args } if args.is_empty() && &**head == symbol)
    }

    /// Pre-order traversal over this term and all its subterms.
    pub fn visit<'a>(&'a self, f: &mut impl FnMut(&'a Term)) {
        f(self);
        for a in self.args() {
            a.visit(f);
        }
    }

    pub fn subterms(&self) -> Vec<&Term> {
        let mut out = Vec::new();
        self.visit(&mut |t| out.push(t));
        out
    }

    pub fn any(&self, pred: &impl Fn(&Term) -> bool) -> bool {
        pred(self) || self.args().iter().any(|a| a.any(pred))
    }

    pub fn mentions(&self, symbol: &str) -> bool {
        self.any(&|t| t.head().is_some_and(|h| &**h == symbol))
    }

    pub fn heads(&self, into: &mut BTreeSet<Name>) {
        self.visit(&mut |t| {
            if let Some(h) = t.head() {
                into.insert(h.clone());
            }
        });
    }

    /// Rebuilds the term innermost-first, applying `f` to each node after its
    /// arguments have been rebuilt.
    pub fn map_bottom_up(&self, f: &mut impl FnMut(Term) -> Term) -> Term {
        let rebuilt = match self {
            Term::App { head, args } => Term::App {
                head: head.clone(),
                args: args.iter().map(|a| a.map_bottom_up(f)).collect(),
            },
            Term::Nat(n) => Term::Nat(*n),
        };
        f(rebuilt)
    }

    /// Replaces every instance of `from` by `to` (outermost matches win).
    pub fn replace(&self, from: &Term, to: &Term) -> Term {
        if self == from {
            return to.clone();
        }
        match self {
            Term::App { head, args } => Term::App {
                head: head.clone(),
                args: args.iter().map(|a| a.replace(from, to)).collect(),
            },
            Term::Nat(n) => Term::Nat(*n),
        }
    }

    pub fn size(&self) -> usize {
        1 + self.args().iter().map(Term::size).sum::<usize>()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    /// `head(args) := rhs`; the head must be dynamic.
    Assign {
        head: Name,
        args: Vec<Term>,
        rhs: Term,
    },
    Cond {
        guard: Term,
        then: Box<Rule>,
        otherwise: Box<Rule>,
    },
    /// n-ary parallel composition; `Par(vec![])` is the no-op `skip`.
    Par(Vec<Rule>),
}

impl Rule {
    pub fn skip() -> Rule {
        Rule::Par(Vec::new())
    }

    pub fn assign(head: impl AsRef<str>, args: Vec<Term>, rhs: Term) -> Rule {
        Rule::Assign {
            head: name(head),
            args,
            rhs,
        }
    }

    pub fn cond(guard: Term, then: Rule, otherwise: Rule) -> Rule {
        Rule::Cond {
            guard,
            then: Box::new(then),
            otherwise: Box::new(otherwise),
        }
    }

    pub fn is_skip(&self) -> bool {
        matches!(self, Rule::Par(rs) if rs.is_empty())
    }

    /// Visits every term of the rule: assignment arguments and right-hand
    /// sides, and guards. Assignment heads are not terms.
    pub fn visit_terms<'a>(&'a self, f: &mut impl FnMut(&'a Term)) {
        match self {
            Rule::Assign { args, rhs, .. } => {
                for a in args {
                    f(a);
                }
                f(rhs);
            }
            Rule::Cond {
                guard,
                then,
                otherwise,
            } => {
                f(guard);
                then.visit_terms(f);
                otherwise.visit_terms(f);
            }
            Rule::Par(rs) => {
                for r in rs {
                    r.visit_terms(f);
                }
            }
        }
    }

    pub fn visit_rules<'a>(&'a self, f: &mut impl FnMut(&'a Rule)) {
        f(self);
        match self {
            Rule::Assign { .. } => {}
            Rule::Cond { then, otherwise, .. } => {
                then.visit_rules(f);
                otherwise.visit_rules(f);
            }
            Rule::Par(rs) => {
                for r in rs {
                    r.visit_rules(f);
                }
            }
        }
    }

    /// All terms and subterms, in traversal order (with repetition).
    pub fn all_subterms(&self) -> Vec<&Term> {
        let mut out = Vec::new();
        self.visit_terms(&mut |t| t.visit(&mut |s| out.push(s)));
        out
    }

    pub fn any_term(&self, pred: &impl Fn(&Term) -> bool) -> bool {
        let mut found = false;
        self.visit_terms(&mut |t| found = found || t.any(pred));
        found
    }

    /// Rewrites every term with `f`, leaving assignment heads alone.
    pub fn map_terms(&self, f: &mut impl FnMut(&Term) -> Term) -> Rule {
        match self {
            Rule::Assign { head, args, rhs } => Rule::Assign {
                head: head.clone(),
                args: args.iter().map(&mut *f).collect(),
                rhs: f(rhs),
            },
            Rule::Cond {
                guard,
                then,
                otherwise,
            } => Rule::Cond {
                guard: f(guard),
                then: Box::new(then.map_terms(f)),
                otherwise: Box::new(otherwise.map_terms(f)),
            },
            Rule::Par(rs) => Rule::Par(rs.iter().map(|r| r.map_terms(f)).collect()),
        }
    }

    /// Rewrites every assignment (after `map_terms`-style term rewriting has
    /// been applied by the caller, if any).
    pub fn map_assigns(&self, f: &mut impl FnMut(&Name, &[Term], &Term) -> Rule) -> Rule {
        match self {
            Rule::Assign { head, args, rhs } => f(head, args, rhs),
            Rule::Cond {
                guard,
                then,
                otherwise,
            } => Rule::Cond {
                guard: guard.clone(),
                then: Box::new(then.map_assigns(f)),
                otherwise: Box::new(otherwise.map_assigns(f)),
            },
            Rule::Par(rs) => Rule::Par(rs.iter().map(|r| r.map_assigns(f)).collect()),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Rule::Assign { args, rhs, .. } => {
                1 + args.iter().map(Term::size).sum::<usize>() + rhs.size()
            }
            Rule::Cond {
                guard,
                then,
                otherwise,
            } => 1 + guard.size() + then.size() + otherwise.size(),
            Rule::Par(rs) => 1 + rs.iter().map(Rule::size).sum::<usize>(),
        }
    }

    /// Heads of all assignments.
    pub fn assigned_symbols(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.visit_rules(&mut |r| {
            if let Rule::Assign { head, .. } = r {
                out.insert(head.clone());
            }
        });
        out
    }

    /// Every symbol occurring anywhere, including assignment heads.
    pub fn symbols(&self) -> BTreeSet<Name> {
        let mut out = self.assigned_symbols();
        self.visit_terms(&mut |t| t.heads(&mut out));
        out
    }
}

/// Flattens nested `Par` and drops `skip` children; a single child is
/// returned as is.
pub fn par(rules: Vec<Rule>) -> Rule {
    let mut flat = Vec::new();
    for r in rules {
        match r {
            Rule::Par(inner) => flat.extend(inner),
            other => flat.push(other),
        }
    }
    if flat.len() == 1 {
        flat.pop().unwrap()
    } else {
        Rule::Par(flat)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn replace_is_outermost() {
        let x = Term::constant("x");
        let t = Term::app("f", vec![Term::app("f", vec![x.clone()])]);
        let inner = Term::app("f", vec![x.clone()]);
        let d = Term::constant("d");
        assert_eq!(t.replace(&inner, &d), Term::app("f", vec![d.clone()]));
        assert_eq!(t.replace(&t, &d), d);
    }

    #[test]
    fn bottom_up_visits_children_first() {
        let t = Term::app("f", vec![Term::app("g", vec![Term::Nat(1)])]);
        let mut order = Vec::new();
        t.map_bottom_up(&mut |n| {
            order.push(n.head().map(|h| h.to_string()).unwrap_or_default());
            n
        });
        assert_eq!(order, vec!["", "g", "f"]);
    }

    #[test]
    fn par_flattens() {
        let a = Rule::assign("x", vec![], Term::Nat(1));
        let r = par(vec![Rule::skip(), Rule::Par(vec![a.clone()])]);
        assert_eq!(r, a);
        assert!(par(vec![]).is_skip());
    }
}
