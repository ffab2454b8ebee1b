#![allow(dead_code)]

use infinir::engine::{close_universe, RelationKind, SearchBudget, Universe};
use infinir::syntax::{parse_trs_file, Workspace};
use infinir::term::Term;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const CORPUS_SEED: u64 = 0x1f1a_17e5;
pub const CORPUS_SIZE: usize = 60;
pub const UNIVERSE_BUDGET: usize = 64;

/// A random rule file together with its closed universe.
pub struct Instance {
    pub text: String,
    pub ws: Workspace,
    pub universe: Universe,
}

impl Instance {
    /// The universe's terms, as a universe built for `kind`.
    pub fn universe_for(&self, kind: RelationKind) -> Universe {
        Universe::from_terms(self.universe.terms.clone(), &self.ws.trs, kind)
    }
}

#[derive(Clone, Copy)]
struct Sym {
    name: &'static str,
    arity: usize,
}

const POOL: [Sym; 3] = [
    Sym { name: "b", arity: 0 },
    Sym { name: "C", arity: 1 },
    Sym { name: "f", arity: 2 },
];

fn finite(rng: &mut ChaCha8Rng, syms: &[Sym], depth: usize, binder: bool) -> String {
    let leaves: Vec<&Sym> = syms.iter().filter(|s| s.arity == 0).collect();
    let nodes: Vec<&Sym> = syms.iter().filter(|s| s.arity > 0).collect();
    if depth == 0 || nodes.is_empty() || rng.gen_bool(0.35) {
        if binder && rng.gen_bool(0.5) {
            return "X".to_string();
        }
        return leaves.choose(rng).expect("a constant").name.to_string();
    }
    let s = nodes.choose(rng).expect("a function symbol");
    let args: Vec<String> = (0..s.arity).map(|_| finite(rng, syms, depth - 1, binder)).collect();
    format!("{}({})", s.name, args.join(","))
}

fn rational(rng: &mut ChaCha8Rng, syms: &[Sym]) -> String {
    let nodes: Vec<&Sym> = syms.iter().filter(|s| s.arity > 0).collect();
    let Some(s) = nodes.choose(rng) else {
        return finite(rng, syms, 0, false);
    };
    // the binder occurs under the root symbol, so the binding is guarded
    let hole = rng.gen_range(0..s.arity);
    let args: Vec<String> = (0..s.arity)
        .map(|i| if i == hole { "X".to_string() } else { finite(rng, syms, 1, true) })
        .collect();
    format!("rec X = {}({}) in X", s.name, args.join(","))
}

fn term(rng: &mut ChaCha8Rng, syms: &[Sym]) -> String {
    if rng.gen_bool(0.3) {
        rational(rng, syms)
    } else {
        finite(rng, syms, 2, false)
    }
}

/// Text of a random ground system with at most four rules over at most
/// three symbols.
pub fn random_system(rng: &mut ChaCha8Rng) -> String {
    let mut syms = vec![Sym { name: "a", arity: 0 }];
    let extra = rng.gen_range(1..=2);
    let mut pool = POOL.to_vec();
    pool.shuffle(rng);
    syms.extend(pool.into_iter().take(extra));
    syms.sort_by_key(|s| s.name);
    let rules = rng.gen_range(1..=4);
    let mut text = String::new();
    for _ in 0..rules {
        let lhs = finite(rng, &syms, 2, false);
        let rhs = term(rng, &syms);
        text.push_str(&format!("{lhs} -> {rhs}\n"));
    }
    // every symbol appears, so seeds cover the whole signature
    for s in &syms {
        if s.arity == 0 {
            text.push_str(&format!("term {} = {}\n", s.name.to_uppercase(), s.name));
        }
    }
    text
}

/// Seeds: every rule side and every constant.
pub fn seeds(ws: &Workspace) -> Vec<Term> {
    let mut out: Vec<Term> = Vec::new();
    for r in &ws.trs.rules {
        out.push(r.lhs_term().clone());
        out.push(r.rhs.clone());
    }
    out.extend(ws.terms.values().cloned());
    out
}

/// The deterministic corpus: random systems whose equational universe
/// closes within the budget.
pub fn corpus() -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(CORPUS_SEED);
    let mut out = Vec::new();
    let mut attempts = 0;
    while out.len() < CORPUS_SIZE && attempts < 20 * CORPUS_SIZE {
        attempts += 1;
        let text = random_system(&mut rng);
        let ws = parse_trs_file(&text).unwrap_or_else(|e| panic!("generated file does not parse: {e}\n{text}"));
        let universe = close_universe(&seeds(&ws), &ws.trs, RelationKind::Ieq, UNIVERSE_BUDGET);
        if universe.closed {
            out.push(Instance { text, ws, universe });
        }
    }
    out
}

/// Budgets large enough that search does not run out on corpus universes.
pub fn saturating_budget() -> SearchBudget {
    SearchBudget {
        max_goals: 1 << 20,
        max_split: 2 * UNIVERSE_BUDGET,
        max_new_term_nodes: 1024,
    }
}
