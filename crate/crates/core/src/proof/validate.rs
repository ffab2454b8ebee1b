use std::fmt;

use super::{Judgment, Justification, PremiseItem, ProofGraph, StepItem};
use crate::engine::RelationKind;
use crate::term::{bisimilar, Substitution};
use crate::trs::{match_root, Direction, Trs};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ViolationCode {
    BadIndex,
    BadJudgment,
    BadRootStep,
    BackwardStep,
    BadChain,
    EmptySplit,
    MarkedLiftPlacement,
    BadLift,
    ArityMismatch,
    NotBisimilar,
    MarkedLiftOnCycle,
    UnguardedCycle,
}

impl fmt::Display for ViolationCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub node: usize,
    pub code: ViolationCode,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn has(&self, code: ViolationCode) -> bool {
        self.violations.iter().any(|v| v.code == code)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ok {
            return writeln!(f, "ok");
        }
        for v in &self.violations {
            writeln!(f, "node {}: {}: {}", v.node, v.code, v.message)?;
        }
        Ok(())
    }
}

struct Checker<'a> {
    p: &'a ProofGraph,
    trs: &'a Trs,
    out: Vec<Violation>,
}

impl Checker<'_> {
    fn report(&mut self, node: usize, code: ViolationCode, message: impl Into<String>) {
        self.out.push(Violation {
            node,
            code,
            message: message.into(),
        });
    }

    fn indices_ok(&mut self, k: usize) -> bool {
        let p = self.p;
        let nt = p.terms.len();
        let nn = p.nodes.len();
        let node = &p.nodes[k];
        let mut ok = node.goal.0 < nt && node.goal.1 < nt;
        match &node.rule {
            Justification::Split(items) => {
                for item in items {
                    ok &= match item {
                        PremiseItem::Node(j) => *j < nn,
                        PremiseItem::Step(s) => {
                            s.source < nt && s.target < nt && s.sigma.values().all(|&t| t < nt)
                        }
                    };
                }
            }
            Justification::Lift(children) => ok &= children.iter().all(|&j| j < nn),
            Justification::Id => {}
        }
        if !ok {
            self.report(k, ViolationCode::BadIndex, "index out of range");
        }
        ok
    }

    fn check_step(&mut self, k: usize, s: &StepItem) -> bool {
        let Ok(rule) = self.trs.rule(s.rule) else {
            self.report(k, ViolationCode::BadRootStep, format!("no rule {}", s.rule));
            return false;
        };
        if s.direction == Direction::Bwd && self.p.kind != RelationKind::Ieq {
            self.report(k, ViolationCode::BackwardStep, "backward step outside equational reasoning");
            return false;
        }
        let sigma: Substitution = s
            .sigma
            .iter()
            .map(|(x, &t)| (x.clone(), self.p.terms[t].clone()))
            .collect();
        let (from, to) = match s.direction {
            Direction::Fwd => (rule.lhs_term(), &rule.rhs),
            Direction::Bwd => (&rule.rhs, rule.lhs_term()),
        };
        let source = &self.p.terms[s.source];
        let target = &self.p.terms[s.target];
        let lhs_side = match s.direction {
            Direction::Fwd => source,
            Direction::Bwd => target,
        };
        let matched = match_root(&rule.lhs, lhs_side).is_some_and(|m| {
            m.iter().all(|(x, t)| sigma.get(x) == Some(t))
        });
        let instance_ok = bisimilar(&from.substitute(&sigma), source)
            && bisimilar(&to.substitute(&sigma), target);
        if !(matched && instance_ok) {
            self.report(
                k,
                ViolationCode::BadRootStep,
                format!("`{source}` to `{target}` is not a root step by rule {} ({})", s.rule, s.direction),
            );
            return false;
        }
        true
    }

    fn check_split(&mut self, k: usize, items: &[PremiseItem]) {
        let p = self.p;
        let (first, last) = p.nodes[k].goal;
        if items.is_empty() {
            self.report(k, ViolationCode::EmptySplit, "split without premises");
            return;
        }
        let mut cur = first;
        for (pos, item) in items.iter().enumerate() {
            let final_item = pos + 1 == items.len();
            let (from, to) = match item {
                PremiseItem::Step(s) => {
                    if !self.check_step(k, s) {
                        return;
                    }
                    (s.source, s.target)
                }
                PremiseItem::Node(j) => {
                    let child = &p.nodes[*j];
                    if !child.judgment.is_lift() {
                        self.report(k, ViolationCode::BadJudgment, format!("premise node {j} is not a lift"));
                        return;
                    }
                    let wanted = match (p.kind, final_item) {
                        (RelationKind::Ired, false) => Judgment::DownFin,
                        _ => Judgment::Down,
                    };
                    if child.judgment != wanted {
                        self.report(
                            k,
                            ViolationCode::MarkedLiftPlacement,
                            format!("premise node {j} should be {}", wanted.name()),
                        );
                    }
                    child.goal
                }
            };
            if !bisimilar(&p.terms[cur], &p.terms[from]) {
                self.report(
                    k,
                    ViolationCode::BadChain,
                    format!("premise {pos} starts at `{}`, expected `{}`", p.terms[from], p.terms[cur]),
                );
                return;
            }
            cur = to;
        }
        if !bisimilar(&p.terms[cur], &p.terms[last]) {
            self.report(
                k,
                ViolationCode::BadChain,
                format!("premises end at `{}`, expected `{}`", p.terms[cur], p.terms[last]),
            );
        }
    }

    fn check_lift(&mut self, k: usize, children: &[usize]) {
        let p = self.p;
        let (s, t) = p.goal_terms(k);
        if !s.same_head(t) {
            self.report(k, ViolationCode::BadLift, format!("`{s}` and `{t}` have different roots"));
            return;
        }
        if children.len() != s.arity() {
            self.report(
                k,
                ViolationCode::ArityMismatch,
                format!("{} premises for arity {}", children.len(), s.arity()),
            );
            return;
        }
        for (i, ((a, b), &c)) in s.args().iter().zip(t.args()).zip(children).enumerate() {
            let child = &p.nodes[c];
            let (ca, cb) = p.goal_terms(c);
            if child.judgment != Judgment::Rel || !bisimilar(a, ca) || !bisimilar(&b, cb) {
                self.report(k, ViolationCode::BadLift, format!("premise {i} does not relate argument {}", i + 1));
            }
        }
    }

    fn check_node(&mut self, k: usize) {
        if !self.indices_ok(k) {
            return;
        }
        let node = &self.p.nodes[k];
        if node.judgment == Judgment::DownFin && self.p.kind != RelationKind::Ired {
            self.report(k, ViolationCode::BadJudgment, "marked lift outside infinitary rewriting");
        }
        match (&node.rule, node.judgment.is_lift()) {
            (Justification::Split(items), false) => self.check_split(k, items),
            (Justification::Lift(children), true) => self.check_lift(k, children),
            (Justification::Id, true) => {
                let (s, t) = self.p.goal_terms(k);
                if !bisimilar(s, t) {
                    self.report(k, ViolationCode::NotBisimilar, format!("`{s}` and `{t}` differ"));
                }
            }
            (rule, _) => self.report(
                k,
                ViolationCode::BadJudgment,
                format!("{} cannot justify {}", rule.name(), node.judgment.name()),
            ),
        }
    }

    fn check_cycles(&mut self) {
        let p = self.p;
        let n = p.nodes.len();
        let succ: Vec<Vec<usize>> = (0..n)
            .map(|k| p.successors(k).into_iter().filter(|&j| j < n).collect())
            .collect();
        let comp = sccs(&succ);
        let on_cycle =
            |k: usize| succ[k].contains(&k) || comp.iter().filter(|&&c| c == comp[k]).count() > 1;
        for k in 0..n {
            if p.kind == RelationKind::Ired && p.nodes[k].judgment == Judgment::DownFin && on_cycle(k) {
                self.report(k, ViolationCode::MarkedLiftOnCycle, "marked lift lies on a cycle");
            }
        }
        // cycles avoiding every lift rule would be unguarded
        let unguarded: Vec<Vec<usize>> = (0..n)
            .map(|k| match p.nodes[k].rule {
                Justification::Lift(_) => Vec::new(),
                _ => succ[k].clone(),
            })
            .collect();
        let comp = sccs(&unguarded);
        for k in 0..n {
            let cyc = unguarded[k].contains(&k) || comp.iter().filter(|&&c| c == comp[k]).count() > 1;
            if cyc {
                self.report(k, ViolationCode::UnguardedCycle, "cycle without a lift");
            }
        }
    }
}

/// Strongly connected component id of every vertex (Tarjan).
fn sccs(succ: &[Vec<usize>]) -> Vec<usize> {
    let n = succ.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![usize::MAX; n];
    let mut stack = Vec::new();
    let mut counter = 0;
    let mut ncomp = 0;
    for start in 0..n {
        if index[start] != usize::MAX {
            continue;
        }
        let mut work = vec![(start, 0usize)];
        index[start] = counter;
        low[start] = counter;
        counter += 1;
        stack.push(start);
        on_stack[start] = true;
        while let Some(&mut (v, ref mut next)) = work.last_mut() {
            if *next < succ[v].len() {
                let w = succ[v][*next];
                *next += 1;
                if index[w] == usize::MAX {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    work.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                work.pop();
                if let Some(&(u, _)) = work.last() {
                    low[u] = low[u].min(low[v]);
                }
                if low[v] == index[v] {
                    loop {
                        let w = stack.pop().expect("tarjan stack");
                        on_stack[w] = false;
                        comp[w] = ncomp;
                        if w == v {
                            break;
                        }
                    }
                    ncomp += 1;
                }
            }
        }
    }
    comp
}

/// Check every rule instance and the global cycle conditions.
pub fn validate(p: &ProofGraph, trs: &Trs) -> ValidationReport {
    let mut c = Checker {
        p,
        trs,
        out: Vec::new(),
    };
    if p.root >= p.nodes.len() {
        c.report(p.root, ViolationCode::BadIndex, "root out of range");
    } else if p.nodes[p.root].judgment != Judgment::Rel {
        c.report(p.root, ViolationCode::BadJudgment, "root is not a relation judgment");
    }
    for k in 0..p.nodes.len() {
        c.check_node(k);
    }
    c.check_cycles();
    ValidationReport {
        ok: c.out.is_empty(),
        violations: c.out,
    }
}
