//! Seeded generator of well-formed algorithms over arithmetic plus a small
//! enumeration, with scripted total responders for extrinsic symbols.

use std::collections::BTreeMap;

use indexmap::IndexMap;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algorithm::Algorithm;
use crate::interp::OracleEnv;
use crate::structure::{Datastructure, Structure, TablePart};
use crate::syntax::{Rule, Term};
use crate::value::{name, Name, Value};
use crate::vocab::{IoRole, Symbol, Vocabulary};

pub const ENUM: &str = "color";
pub const ELEMENTS: [&str; 2] = ["red", "green"];

/// Relative weights of the rule forms.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RuleWeights {
    pub assign: u32,
    pub par: u32,
    pub cond: u32,
    pub skip: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenConfig {
    pub seed: u64,
    /// Declared symbols, output and inputs included.
    pub max_symbols: usize,
    pub max_term_depth: usize,
    pub max_rule_depth: usize,
    pub min_extrinsics: usize,
    pub max_extrinsics: usize,
    pub max_inputs: usize,
    pub weights: RuleWeights,
    /// Static tables may leave tuples undefined.
    pub partial_tables: bool,
    /// Branches of a parallel block assign disjoint symbols, ruling out
    /// contradictory updates.
    pub disjoint_updates: bool,
    pub init_entries: bool,
    pub output: bool,
}

impl Default for GenConfig {
    fn default() -> GenConfig {
        GenConfig {
            seed: 0,
            max_symbols: 10,
            max_term_depth: 3,
            max_rule_depth: 4,
            min_extrinsics: 0,
            max_extrinsics: 2,
            max_inputs: 2,
            weights: RuleWeights {
                assign: 4,
                par: 3,
                cond: 3,
                skip: 1,
            },
            partial_tables: true,
            disjoint_updates: false,
            init_entries: true,
            output: false,
        }
    }
}

impl GenConfig {
    pub fn with_seed(&self, seed: u64) -> GenConfig {
        GenConfig {
            seed,
            ..self.clone()
        }
    }
}

/// A generated algorithm together with its inputs and oracle script.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Case {
    pub algorithm: Algorithm,
    pub inputs: Vec<Value>,
    /// Seed of the scripted responders.
    pub oracle_seed: u64,
}

impl Case {
    pub fn env(&self) -> OracleEnv {
        scripted_env(self.algorithm.vocabulary(), self.oracle_seed)
    }
}

fn mix(mut h: u64, bytes: &[u8]) -> u64 {
    // FNV-1a followed by a splitmix finalizer
    for b in bytes {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h ^= h >> 30;
    h = h.wrapping_mul(0xbf58_476d_1ce4_e5b9);
    h ^= h >> 27;
    h = h.wrapping_mul(0x94d0_49bb_1331_11eb);
    h ^ (h >> 31)
}

/// Deterministic total answer of extrinsic `symbol` at `args`.
pub fn scripted_answer(seed: u64, symbol: &Symbol, args: &[Value]) -> Value {
    let key = format!("{}{:?}", symbol.name, args);
    let h = mix(seed ^ 0xcbf2_9ce4_8422_2325, key.as_bytes());
    if symbol.relational {
        return Value::from_bool(h.is_multiple_of(2));
    }
    match h % 6 {
        0..=2 => Value::Nat(h % 6),
        3 => Value::True,
        4 => Value::False,
        _ => Value::enum_elem(ENUM, ELEMENTS[0]),
    }
}

/// Responders answering every extrinsic symbol of `v` by [`scripted_answer`].
pub fn scripted_env(v: &Vocabulary, seed: u64) -> OracleEnv {
    let mut env = OracleEnv::new();
    for s in v.extrinsics() {
        let sym = s.clone();
        env = env.script(&s.name, move |args| Some(scripted_answer(seed, &sym, args)));
    }
    env
}

struct Gen<'a> {
    rng: ChaCha8Rng,
    cfg: &'a GenConfig,
    dynamics: Vec<Symbol>,
    statics: Vec<Symbol>,
    extrinsics: Vec<Symbol>,
}

impl Gen<'_> {
    fn chance(&mut self, p: f64) -> bool {
        self.rng.gen_bool(p)
    }

    fn small_value(&mut self) -> Value {
        match self.rng.gen_range(0..6) {
            0..=2 => Value::Nat(self.rng.gen_range(0..3)),
            3 => Value::True,
            4 => Value::False,
            _ => Value::enum_elem(ENUM, ELEMENTS.choose(&mut self.rng).unwrap()),
        }
    }

    fn value_for(&mut self, s: &Symbol) -> Value {
        if s.relational {
            Value::from_bool(self.chance(0.5))
        } else if s.numerical {
            Value::Nat(self.rng.gen_range(0..3))
        } else {
            self.small_value()
        }
    }

    fn arg_value(&mut self) -> Value {
        if self.chance(0.8) {
            Value::Nat(self.rng.gen_range(0..3))
        } else {
            Value::enum_elem(ENUM, ELEMENTS.choose(&mut self.rng).unwrap())
        }
    }

    fn leaf(&mut self) -> Term {
        let nullary: Vec<Name> = self
            .dynamics
            .iter()
            .filter(|s| s.arity == 0)
            .map(|s| s.name.clone())
            .collect();
        match self.rng.gen_range(0..10) {
            0..=3 => Term::Nat(self.rng.gen_range(0..3)),
            4 => Term::constant(*ELEMENTS.choose(&mut self.rng).unwrap()),
            5 => Term::nil(),
            _ if !nullary.is_empty() => Term::constant(&**nullary.choose(&mut self.rng).unwrap()),
            _ => Term::Nat(0),
        }
    }

    fn app(&mut self, s: &Symbol, depth: usize) -> Term {
        let args = (0..s.arity).map(|_| self.value(depth.saturating_sub(1))).collect();
        Term::App {
            head: s.name.clone(),
            args,
        }
    }

    fn pick(&mut self, from: &[Symbol], keep: impl Fn(&Symbol) -> bool) -> Option<Symbol> {
        let c: Vec<&Symbol> = from.iter().filter(|s| keep(s)).collect();
        c.choose(&mut self.rng).map(|s| (*s).clone())
    }

    fn value(&mut self, depth: usize) -> Term {
        if depth == 0 {
            return self.leaf();
        }
        let d = depth - 1;
        let sym = match self.rng.gen_range(0..20) {
            0..=4 => return self.leaf(),
            5..=8 => {
                let ds = self.dynamics.clone();
                self.pick(&ds, |_| true)
            }
            9..=11 => {
                let ss = self.statics.clone();
                self.pick(&ss, |_| true)
            }
            12..=13 => {
                let es = self.extrinsics.clone();
                self.pick(&es, |_| true)
            }
            14 => return Term::succ(self.value(d)),
            15 => return Term::pred(self.value(d)),
            16..=17 => return Term::ite(self.boolean(d), self.value(d), self.value(d)),
            _ => return self.boolean(d),
        };
        match sym {
            Some(s) => self.app(&s, depth),
            None => self.leaf(),
        }
    }

    fn boolean(&mut self, depth: usize) -> Term {
        let rel = |s: &Symbol| s.relational;
        if depth == 0 {
            let ds = self.dynamics.clone();
            return match self.rng.gen_range(0..4) {
                0 => Term::tt(),
                1 => Term::ff(),
                _ => match self.pick(&ds, |s| s.relational && s.arity == 0) {
                    Some(s) => Term::constant(&*s.name),
                    None => Term::eq(self.leaf(), self.leaf()),
                },
            };
        }
        let d = depth - 1;
        match self.rng.gen_range(0..20) {
            0..=5 => {
                let mut pool = self.dynamics.clone();
                pool.extend(self.statics.iter().cloned());
                pool.extend(self.extrinsics.iter().cloned());
                match self.pick(&pool, rel) {
                    Some(s) => self.app(&s, depth),
                    None => Term::eq(self.value(d), self.value(d)),
                }
            }
            6..=10 => Term::eq(self.value(d), self.value(d)),
            11..=12 => Term::not(self.boolean(d)),
            13 => Term::and(self.boolean(d), self.boolean(d)),
            14 => Term::or(self.boolean(d), self.boolean(d)),
            15..=16 => Term::ite(self.boolean(d), self.boolean(d), self.boolean(d)),
            17 => Term::app(if self.chance(0.5) { "nat" } else { ENUM }, vec![self.value(d)]),
            _ => self.boolean(0),
        }
    }

    fn assign(&mut self, heads: &[Symbol]) -> Rule {
        let s = heads.choose(&mut self.rng).unwrap().clone();
        let td = self.cfg.max_term_depth;
        let args = (0..s.arity).map(|_| self.value(td.saturating_sub(2))).collect();
        let rhs = if s.relational {
            self.boolean(td)
        } else {
            self.value(td)
        };
        Rule::Assign {
            head: s.name.clone(),
            args,
            rhs,
        }
    }

    fn rule(&mut self, depth: usize, heads: &[Symbol]) -> Rule {
        if depth == 0 || heads.is_empty() {
            return if heads.is_empty() { Rule::skip() } else { self.assign(heads) };
        }
        let w = self.cfg.weights;
        let total = w.assign + w.par + w.cond + w.skip;
        let mut roll = self.rng.gen_range(0..total.max(1));
        if roll < w.assign {
            return self.assign(heads);
        }
        roll -= w.assign;
        if roll < w.par {
            let k = self.rng.gen_range(2..=3);
            if self.cfg.disjoint_updates {
                let mut hs = heads.to_vec();
                hs.shuffle(&mut self.rng);
                let k = k.min(hs.len());
                if k < 2 {
                    return self.rule(depth - 1, heads);
                }
                let groups: Vec<Vec<Symbol>> = (0..k)
                    .map(|i| hs.iter().skip(i).step_by(k).cloned().collect())
                    .collect();
                return Rule::Par(groups.iter().map(|g| self.rule(depth - 1, g)).collect());
            }
            return Rule::Par((0..k).map(|_| self.rule(depth - 1, heads)).collect());
        }
        roll -= w.par;
        if roll < w.cond {
            let guard = self.boolean(self.cfg.max_term_depth);
            let then = self.rule(depth - 1, heads);
            let otherwise = if self.chance(0.5) {
                Rule::skip()
            } else {
                self.rule(depth - 1, heads)
            };
            return Rule::cond(guard, then, otherwise);
        }
        Rule::skip()
    }
}

fn declare(gen: &mut Gen, cfg: &GenConfig) -> (Vocabulary, IndexMap<Name, Vec<TablePart>>, usize) {
    let mut v = Vocabulary::new();
    let budget = cfg.max_symbols.max(3);
    let n_ext = gen.rng.gen_range(cfg.min_extrinsics..=cfg.max_extrinsics.max(cfg.min_extrinsics));
    let n_in = gen.rng.gen_range(0..=cfg.max_inputs);
    let rest = budget.saturating_sub(n_ext + n_in + cfg.output as usize);
    let n_static = gen.rng.gen_range(0..=rest.min(2));
    let n_dyn = rest - n_static;
    let n_dyn = gen.rng.gen_range(n_dyn.min(2)..=n_dyn).max(1);

    for i in 0..n_in {
        let mut s = Symbol::dynamic(format!("x{i}"), 0).with_io(IoRole::Input(i));
        if gen.chance(0.3) {
            s = s.numerical();
        }
        gen.dynamics.push(s.clone());
        v.insert(s).unwrap();
    }
    if cfg.output {
        let s = Symbol::dynamic("out", 0).with_io(IoRole::Output);
        v.insert(s).unwrap();
    }
    for i in 0..n_dyn {
        let arity = *[0, 0, 0, 1, 1, 2].choose(&mut gen.rng).unwrap();
        let mut s = Symbol::dynamic(format!("f{i}"), arity);
        match gen.rng.gen_range(0..10) {
            0..=2 => s = s.relational(),
            3..=4 => s = s.numerical(),
            _ => {}
        }
        gen.dynamics.push(s.clone());
        v.insert(s).unwrap();
    }
    let mut tables = IndexMap::new();
    for i in 0..n_static {
        let arity = gen.rng.gen_range(1..=2);
        let mut s = Symbol::static_intrinsic(format!("s{i}"), arity);
        if gen.chance(0.3) {
            s = s.relational();
        }
        let mut entries = BTreeMap::new();
        let domain: Vec<Value> = (0..3)
            .map(Value::Nat)
            .chain([Value::enum_elem(ENUM, ELEMENTS[0])])
            .collect();
        let tuples: Vec<Vec<Value>> = if arity == 1 {
            domain.iter().map(|a| vec![a.clone()]).collect()
        } else {
            domain
                .iter()
                .flat_map(|a| domain.iter().map(move |b| vec![a.clone(), b.clone()]))
                .collect()
        };
        for t in tuples {
            if !cfg.partial_tables || gen.chance(0.7) {
                let val = gen.value_for(&s);
                entries.insert(t, val);
            }
        }
        let fallback = if !cfg.partial_tables || gen.chance(0.5) {
            Some(gen.value_for(&s))
        } else {
            None
        };
        tables.insert(
            s.name.clone(),
            vec![TablePart {
                domain: None,
                entries,
                fallback,
            }],
        );
        gen.statics.push(s.clone());
        v.insert(s).unwrap();
    }
    for i in 0..n_ext {
        let mut s = Symbol::extrinsic(format!("e{i}"), gen.rng.gen_range(1..=2));
        if gen.chance(0.3) {
            s = s.relational();
        }
        gen.extrinsics.push(s.clone());
        v.insert(s).unwrap();
    }
    (v, tables, n_in)
}

/// A generated algorithm, its inputs, and its oracle script seed.
pub fn generate_case(cfg: &GenConfig) -> Case {
    let mut gen = Gen {
        rng: ChaCha8Rng::seed_from_u64(cfg.seed),
        cfg,
        dynamics: Vec::new(),
        statics: Vec::new(),
        extrinsics: Vec::new(),
    };
    let (vocabulary, tables, n_in) = declare(&mut gen, cfg);
    let mut heads: Vec<Symbol> = gen.dynamics.clone();
    if cfg.output {
        heads.push(vocabulary.output().unwrap().clone());
    }
    let program = gen.rule(cfg.max_rule_depth, &heads);

    let mut init: IndexMap<Name, BTreeMap<Vec<Value>, Value>> = IndexMap::new();
    if cfg.init_entries {
        for s in gen.dynamics.clone() {
            if s.io != IoRole::None || !gen.chance(0.3) {
                continue;
            }
            let mut entries = BTreeMap::new();
            for _ in 0..gen.rng.gen_range(1..=2) {
                let args = (0..s.arity).map(|_| gen.arg_value()).collect();
                let val = gen.value_for(&s);
                if val != s.default_value() {
                    entries.insert(args, val);
                }
            }
            if !entries.is_empty() {
                init.insert(s.name.clone(), entries);
            }
        }
    }
    let inputs = (0..n_in)
        .map(|i| {
            let s = &gen.dynamics[i];
            if s.relational {
                Value::from_bool(gen.chance(0.5))
            } else {
                Value::Nat(gen.rng.gen_range(0..3))
            }
        })
        .collect();

    let mut enums = IndexMap::new();
    enums.insert(name(ENUM), ELEMENTS.iter().map(name).collect());
    let structure = Structure {
        vocabulary,
        datastructure: Datastructure {
            arithmetic: true,
            enums,
        },
        tables,
    };
    let mut algorithm = Algorithm::new(structure, program);
    algorithm.init = init;
    Case {
        algorithm,
        inputs,
        oracle_seed: mix(cfg.seed, b"oracle"),
    }
}

/// The algorithm generated for `cfg`.
pub fn generate(cfg: &GenConfig) -> Algorithm {
    generate_case(cfg).algorithm
}
