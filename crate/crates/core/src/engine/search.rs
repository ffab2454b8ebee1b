use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};

use super::solve::{generator, ired_levels, nu_fixpoint};
use super::{lift, PairRelation, RelationKind, Universe};
use crate::proof::{validate, Judgment, Justification, PremiseItem, ProofGraph, ProofNode, StepItem};
use crate::term::{FiniteTerm, Label, Node, Substitution, Term, TermGraph};
use crate::trs::{match_root, oriented_root_steps, Direction, Trs};

const MAX_INSTANCES: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBudget {
    /// Upper bound on goal pairs; the term pool has at most `sqrt` this many terms.
    pub max_goals: usize,
    /// Maximal number of items in a split premise.
    pub max_split: usize,
    /// Upper bound on the number of pool terms.
    pub max_new_term_nodes: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_goals: 10_000,
            max_split: 8,
            max_new_term_nodes: 256,
        }
    }
}

impl SearchBudget {
    fn pool_cap(&self) -> usize {
        let by_goals = (self.max_goals as f64).sqrt() as usize;
        by_goals.min(self.max_new_term_nodes).max(2)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Proved(Box<ProofGraph>),
    Unknown,
}

impl Verdict {
    pub fn is_proved(&self) -> bool {
        matches!(self, Verdict::Proved(_))
    }

    pub fn certificate(&self) -> Option<&ProofGraph> {
        match self {
            Verdict::Proved(p) => Some(p),
            Verdict::Unknown => None,
        }
    }
}

struct Pool<'a> {
    trs: &'a Trs,
    kind: RelationKind,
    cap: usize,
    terms: Vec<Term>,
    seen: HashSet<Term>,
    queue: VecDeque<Term>,
    full: bool,
}

impl Pool<'_> {
    fn offer(&mut self, t: Term) {
        if !self.seen.contains(&t) {
            self.queue.push_back(t);
        }
    }

    /// Close under children, root steps and ground patterns, within the cap.
    fn saturate(&mut self) -> bool {
        let before = self.terms.len();
        loop {
            while let Some(t) = self.queue.pop_front() {
                if self.seen.contains(&t) {
                    continue;
                }
                if self.terms.len() >= self.cap {
                    self.full = true;
                    self.queue.clear();
                    break;
                }
                self.seen.insert(t.clone());
                self.terms.push(t.clone());
                for step in oriented_root_steps(&t, self.trs, self.kind.symmetric()) {
                    self.offer(step.target);
                }
                for a in t.args() {
                    self.offer(a);
                }
            }
            let heads: HashSet<(Label, usize)> =
                self.terms.iter().map(|t| (t.root_label().clone(), t.arity())).collect();
            for p in patterns(self.trs, self.kind) {
                if let Some(t) = p.to_term().filter(Term::is_ground) {
                    if heads.contains(&(t.root_label().clone(), t.arity())) {
                        self.offer(t);
                    }
                }
            }
            if self.full || self.queue.is_empty() {
                break;
            }
        }
        self.terms.len() > before
    }
}

fn patterns(trs: &Trs, kind: RelationKind) -> Vec<FiniteTerm> {
    let mut out: Vec<FiniteTerm> = trs.rules.iter().map(|r| r.lhs.clone()).collect();
    if kind.symmetric() {
        out.extend(trs.rules.iter().filter_map(|r| r.reversed_lhs().cloned()));
    }
    out
}

/// `w` with every node denoting `v` redirected to the root.
fn limit_candidate(v: &Term, w: &Term) -> Option<Term> {
    let hits: Vec<usize> = (1..w.nodes.len()).filter(|&k| w.subterm_node(k) == *v).collect();
    if hits.is_empty() {
        return None;
    }
    let nodes = w
        .nodes
        .iter()
        .map(|n| Node {
            label: n.label.clone(),
            children: n
                .children
                .iter()
                .map(|c| if hits.contains(c) { 0 } else { *c })
                .collect(),
        })
        .collect();
    Term::from_graph(TermGraph { nodes, root: 0 })
}

type Binding = BTreeMap<String, usize>;

fn merge(a: &Binding, b: &Binding) -> Option<Binding> {
    let mut out = a.clone();
    for (x, &v) in b {
        match out.insert(x.clone(), v) {
            Some(old) if old != v => return None,
            _ => {}
        }
    }
    Some(out)
}

fn product(parts: Vec<Vec<Binding>>) -> Vec<Binding> {
    let mut acc = vec![Binding::new()];
    for part in parts {
        let mut next = Vec::new();
        for a in &acc {
            for b in &part {
                if let Some(m) = merge(a, b) {
                    next.push(m);
                    if next.len() >= MAX_INSTANCES {
                        break;
                    }
                }
            }
        }
        acc = next;
    }
    acc
}

/// Bindings making `pat` an instance reachable from term `i` under `r`.
fn candidates(pat: &FiniteTerm, i: usize, u: &Universe, r: &PairRelation) -> Vec<Binding> {
    let related = (0..u.len()).filter(|&w| r.contains(i, w));
    match pat {
        FiniteTerm::Cut => Vec::new(),
        FiniteTerm::Var(x) => related.map(|w| Binding::from([(x.clone(), w)])).collect(),
        FiniteTerm::App(f, args) => {
            let mut out = Vec::new();
            for w in related {
                let t = &u.terms[w];
                if t.root_label() != &Label::Fun(f.clone()) || t.arity() != args.len() {
                    continue;
                }
                out.extend(argument_candidates(args, w, u, r));
                if out.len() >= MAX_INSTANCES {
                    break;
                }
            }
            out
        }
    }
}

fn argument_candidates(args: &[FiniteTerm], w: usize, u: &Universe, r: &PairRelation) -> Vec<Binding> {
    let children = u.children(w);
    if children.iter().any(Option::is_none) {
        return Vec::new();
    }
    product(
        args.iter()
            .zip(children)
            .map(|(a, c)| candidates(a, c.expect("checked"), u, r))
            .collect(),
    )
}

/// Find a root step from `x` to `y`.
fn find_step(x: &Term, y: &Term, trs: &Trs, symmetric: bool) -> Option<(usize, Direction, Substitution)> {
    for (i, rule) in trs.rules.iter().enumerate() {
        if let Some(sigma) = match_root(&rule.lhs, x) {
            if rule.rhs.substitute(&sigma) == *y {
                return Some((i, Direction::Fwd, sigma));
            }
        }
    }
    if symmetric {
        for (i, rule) in trs.rules.iter().enumerate() {
            if let Some(sigma) = match_root(&rule.lhs, y) {
                if rule.rhs.substitute(&sigma) == *x {
                    return Some((i, Direction::Bwd, sigma));
                }
            }
        }
    }
    None
}

enum Hop {
    Step(usize),
    Lift(usize),
}

struct Extractor<'a> {
    u: &'a Universe,
    trs: &'a Trs,
    kind: RelationKind,
    gen: PairRelation,
    /// For ired the approximants `R_1, R_2, …`; otherwise the single fixed point.
    levels: Vec<PairRelation>,
    lifts: Vec<PairRelation>,
    bound: usize,
    p: ProofGraph,
    memo: HashMap<(Judgment, Term, Term), usize>,
}

impl Extractor<'_> {
    fn placeholder(&mut self, j: Judgment, s: &Term, t: &Term) -> (usize, bool) {
        if let Some(&k) = self.memo.get(&(j, s.clone(), t.clone())) {
            return (k, false);
        }
        let goal = (self.p.intern(s), self.p.intern(t));
        let k = self.p.push(ProofNode {
            judgment: j,
            goal,
            rule: Justification::Id,
        });
        self.memo.insert((j, s.clone(), t.clone()), k);
        (k, true)
    }

    fn trivial(&mut self, t: &Term) -> usize {
        let (k, fresh) = self.placeholder(Judgment::Rel, t, t);
        if fresh {
            let (d, _) = self.placeholder(Judgment::Down, t, t);
            self.p.nodes[k].rule = Justification::Split(vec![PremiseItem::Node(d)]);
        }
        k
    }

    fn level(&self, i: usize, j: usize) -> usize {
        self.levels
            .iter()
            .position(|r| r.contains(i, j))
            .expect("pair is related")
    }

    fn rel(&mut self, i: usize, j: usize) -> usize {
        let (s, t) = (self.u.terms[i].clone(), self.u.terms[j].clone());
        if i == j {
            return self.trivial(&s);
        }
        let (k, fresh) = self.placeholder(Judgment::Rel, &s, &t);
        if !fresh {
            return k;
        }
        let items = if self.kind == RelationKind::Ired {
            self.ired_items(i, j)
        } else {
            let lift = self.lifts[0].clone();
            let (path, _) = self.bfs(i, &lift, self.bound, |w| w == j);
            let mut items = Vec::new();
            let mut cur = i;
            for hop in path {
                match hop {
                    Hop::Step(w) => {
                        items.push(self.step_item(cur, w));
                        cur = w;
                    }
                    Hop::Lift(w) => {
                        items.push(PremiseItem::Node(self.lift_node(Judgment::Down, cur, w, 0)));
                        cur = w;
                    }
                }
            }
            items
        };
        self.p.nodes[k].rule = Justification::Split(items);
        k
    }

    fn ired_items(&mut self, i: usize, j: usize) -> Vec<PremiseItem> {
        let k = self.level(i, j);
        let marked = if k == 0 {
            PairRelation::identity(self.u.len())
        } else {
            self.lifts[k - 1].clone()
        };
        let fin = self.lifts[k].clone();
        let (path, end) = self.bfs(i, &marked, self.bound.saturating_sub(1), |w| fin.contains(w, j));
        let mut items = Vec::new();
        let mut cur = i;
        for hop in path {
            match hop {
                Hop::Step(w) => {
                    items.push(self.step_item(cur, w));
                    cur = w;
                }
                Hop::Lift(w) => {
                    self.marked_lifts(cur, w, k - 1, &mut items);
                    cur = w;
                }
            }
        }
        debug_assert_eq!(cur, end);
        let last = if end == j {
            let t = self.u.terms[j].clone();
            self.placeholder(Judgment::Down, &t, &t).0
        } else {
            self.lift_node(Judgment::Down, end, j, k)
        };
        items.push(PremiseItem::Node(last));
        items
    }

    /// One marked lift per changed argument, leftmost first.
    fn marked_lifts(&mut self, x: usize, y: usize, level: usize, items: &mut Vec<PremiseItem>) {
        let (tx, ty) = (self.u.terms[x].clone(), self.u.terms[y].clone());
        let xs = self.u.children(x).to_vec();
        let ys = self.u.children(y).to_vec();
        let mut args = tx.args();
        let target_args = ty.args();
        let symbol = tx.root_label().name().to_string();
        for a in 0..args.len() {
            if xs[a] == ys[a] {
                continue;
            }
            let before = Term::app(&symbol, args.clone());
            args[a] = target_args[a].clone();
            let after = Term::app(&symbol, args.clone());
            let (node, fresh) = self.placeholder(Judgment::DownFin, &before, &after);
            if fresh {
                let (ca, cb) = (xs[a].expect("member"), ys[a].expect("member"));
                debug_assert!(self.levels[level].contains(ca, cb));
                let mut children = Vec::new();
                for (b, (sb, _)) in before.args().iter().zip(after.args()).enumerate() {
                    children.push(if b == a { self.rel(ca, cb) } else { self.trivial(sb) });
                }
                self.p.nodes[node].rule = Justification::Lift(children);
            }
            items.push(PremiseItem::Node(node));
        }
    }

    fn lift_node(&mut self, j: Judgment, x: usize, y: usize, _level: usize) -> usize {
        let (tx, ty) = (self.u.terms[x].clone(), self.u.terms[y].clone());
        let (k, fresh) = self.placeholder(j, &tx, &ty);
        if fresh {
            let xs = self.u.children(x).to_vec();
            let ys = self.u.children(y).to_vec();
            let children = xs
                .iter()
                .zip(&ys)
                .map(|(a, b)| self.rel(a.expect("member"), b.expect("member")))
                .collect();
            self.p.nodes[k].rule = Justification::Lift(children);
        }
        k
    }

    fn step_item(&mut self, x: usize, y: usize) -> PremiseItem {
        let (tx, ty) = (&self.u.terms[x], &self.u.terms[y]);
        let (rule, direction, sigma) =
            find_step(tx, ty, self.trs, self.kind.symmetric()).expect("generator edge is a root step");
        let sigma = self.p.intern_sigma(&sigma);
        let source = self.p.intern(tx);
        let target = self.p.intern(ty);
        PremiseItem::Step(StepItem {
            rule,
            direction,
            sigma,
            source,
            target,
        })
    }

    /// Shortest path from `i` over generator edges and lift edges of `lift`,
    /// of at most `max_len` hops, to the first node satisfying `goal`.
    fn bfs(&self, i: usize, lift: &PairRelation, max_len: usize, goal: impl Fn(usize) -> bool) -> (Vec<Hop>, usize) {
        let n = self.u.len();
        let mut prev: Vec<Option<(usize, bool)>> = vec![None; n];
        let mut dist = vec![usize::MAX; n];
        dist[i] = 0;
        let mut queue = VecDeque::from([i]);
        while let Some(v) = queue.pop_front() {
            if goal(v) {
                let mut hops = Vec::new();
                let mut cur = v;
                while let Some((from, is_step)) = prev[cur] {
                    hops.push(if is_step { Hop::Step(cur) } else { Hop::Lift(cur) });
                    cur = from;
                }
                hops.reverse();
                return (hops, v);
            }
            if dist[v] == max_len {
                continue;
            }
            for w in 0..n {
                if dist[w] != usize::MAX {
                    continue;
                }
                let step = self.gen.contains(v, w);
                if step || lift.contains(v, w) {
                    dist[w] = dist[v] + 1;
                    prev[w] = Some((v, step));
                    queue.push_back(w);
                }
            }
        }
        unreachable!("related pair without a witnessing path")
    }
}

fn extract(u: &Universe, trs: &Trs, kind: RelationKind, levels: Vec<PairRelation>, bound: usize, i: usize, j: usize) -> ProofGraph {
    let lifts = levels.iter().map(|r| lift(r, u)).collect();
    let mut ex = Extractor {
        u,
        trs,
        kind,
        gen: generator(u, kind),
        levels,
        lifts,
        bound,
        p: ProofGraph::new(kind),
        memo: HashMap::new(),
    };
    ex.p.root = ex.rel(i, j);
    ex.p
}

/// Bounded search for a cyclic certificate of `s` related to `t`.
pub fn search_proof(s: &Term, t: &Term, kind: RelationKind, trs: &Trs, budget: SearchBudget) -> Verdict {
    search_proof_seeded(s, t, kind, trs, budget, &[])
}

/// As [`search_proof`], with extra terms placed in the initial pool.
pub fn search_proof_seeded(
    s: &Term,
    t: &Term,
    kind: RelationKind,
    trs: &Trs,
    budget: SearchBudget,
    hints: &[Term],
) -> Verdict {
    if budget.max_split == 0 {
        return Verdict::Unknown;
    }
    let mut pool = Pool {
        trs,
        kind,
        cap: budget.pool_cap(),
        terms: Vec::new(),
        seen: HashSet::new(),
        queue: [s, t].into_iter().chain(hints).cloned().collect(),
        full: false,
    };
    pool.saturate();
    loop {
        let u = Universe::from_terms(pool.terms.clone(), trs, kind);
        let (i, j) = (u.index_of(s).expect("seed"), u.index_of(t).expect("seed"));
        let bound = Some(budget.max_split);
        let levels = match kind {
            RelationKind::Ired => ired_levels(&u, bound),
            _ => vec![nu_fixpoint(&u, &generator(&u, kind), bound)],
        };
        let Some(top) = levels.last().cloned() else {
            return Verdict::Unknown;
        };
        if top.contains(i, j) {
            let p = extract(&u, trs, kind, levels, budget.max_split, i, j);
            let report = validate(&p, trs);
            debug_assert!(report.ok, "search produced an invalid certificate:\n{report}");
            return if report.ok {
                Verdict::Proved(Box::new(p))
            } else {
                Verdict::Unknown
            };
        }
        if pool.full {
            return Verdict::Unknown;
        }
        for (a, b) in top.pairs() {
            if a != b {
                if let Some(l) = limit_candidate(&u.terms[a], &u.terms[b]) {
                    pool.offer(l);
                }
            }
        }
        for pat in patterns(trs, kind) {
            let FiniteTerm::App(f, args) = &pat else { continue };
            if pat.variables().is_empty() {
                continue;
            }
            let pat_term = pat.to_term().expect("patterns have no cut");
            for m in 0..u.len() {
                let tm = &u.terms[m];
                if tm.root_label() != &Label::Fun(f.clone()) || tm.arity() != args.len() {
                    continue;
                }
                for b in argument_candidates(args, m, &u, &top) {
                    let sigma: Substitution = b.iter().map(|(x, &w)| (x.clone(), u.terms[w].clone())).collect();
                    pool.offer(pat_term.substitute(&sigma));
                }
            }
        }
        if !pool.saturate() {
            return Verdict::Unknown;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_trs_file;

    fn prove(text: &str, s: &str, t: &str, kind: RelationKind) -> Verdict {
        let ws = parse_trs_file(text).unwrap();
        let s = ws.resolve_term(s).unwrap();
        let t = ws.resolve_term(t).unwrap();
        search_proof(&s, &t, kind, &ws.trs, SearchBudget::default())
    }

    const CW: &str = "rec X = C(X) in X";
    const EX2: &str = "f(x,x) -> D\na -> C(a)\nb -> C(b)";

    #[test]
    fn equational_c_omega() {
        let v = prove("C(a) = a", CW, "a", RelationKind::Ieq);
        let p = v.certificate().unwrap();
        assert_eq!(p.count_rule("split"), 1);
        assert_eq!(p.count_rule("lift"), 1);
        assert_eq!(p.back_edges().len(), 1);
    }

    #[test]
    fn bi_but_not_ired() {
        assert!(prove("C(a) -> a", CW, "a", RelationKind::Bi).is_proved());
        assert!(!prove("C(a) -> a", CW, "a", RelationKind::Ired).is_proved());
    }

    #[test]
    fn ired_examples() {
        let v = prove(EX2, "a", CW, RelationKind::Ired);
        let p = v.certificate().unwrap();
        assert_eq!(p.count_judgment(Judgment::DownFin), 0);
        assert_eq!(p.back_edges().len(), 1);
        let v = prove(EX2, "f(a,b)", "D", RelationKind::Ired);
        let p = v.certificate().unwrap();
        assert_eq!(p.count_judgment(Judgment::DownFin), 2);
    }

    #[test]
    fn limit_of_growth() {
        let a = Term::constant("a");
        let ca = Term::app("C", vec![a.clone()]);
        let l = limit_candidate(&a, &ca).unwrap();
        assert_eq!(l.nodes.len(), 1);
        assert_eq!(limit_candidate(&ca, &a), None);
    }
}
