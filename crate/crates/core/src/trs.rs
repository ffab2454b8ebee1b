//! Rules, matching, root and positioned steps, finite reductions.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::term::{FiniteTerm, Label, Position, Signature, Substitution, Term, TermError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TrsError {
    #[error("left-hand side `{0}` is a variable")]
    LhsIsVariable(String),
    #[error("variable `{0}` occurs in the right-hand side but not in the left-hand side")]
    FreeVariableInRhs(String),
    #[error("left-hand side contains the reserved marker")]
    CutInLhs,
    #[error(transparent)]
    Term(#[from] TermError),
    #[error("no rule with index {0}")]
    NoSuchRule(usize),
    #[error("rule {rule} does not match at position {position}")]
    NoMatch { rule: usize, position: Position },
    #[error("rule {0} cannot be applied right to left")]
    NotReversible(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    Fwd,
    Bwd,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Fwd => "fwd",
            Direction::Bwd => "bwd",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub lhs: FiniteTerm,
    pub rhs: Term,
    lhs_term: Term,
    rhs_finite: Option<FiniteTerm>,
}

impl Rule {
    pub fn lhs_term(&self) -> &Term {
        &self.lhs_term
    }

    /// The rule read right to left, when that is again a rule.
    pub fn reversed_lhs(&self) -> Option<&FiniteTerm> {
        let r = self.rhs_finite.as_ref()?;
        let ok = !matches!(r, FiniteTerm::Var(_)) && self.lhs.variables().is_subset(&r.variables());
        ok.then_some(r)
    }

    /// Ground on both sides with an infinite right-hand side, which is then
    /// matched by equality when the equation is read backwards.
    pub fn ground_rational_rhs(&self) -> bool {
        self.rhs_finite.is_none() && self.lhs.variables().is_empty() && self.rhs.is_ground()
    }

    /// Pattern and result for applying the rule in `dir`.
    fn oriented(&self, dir: Direction) -> Option<(&FiniteTerm, &Term)> {
        match dir {
            Direction::Fwd => Some((&self.lhs, &self.rhs)),
            Direction::Bwd => self.reversed_lhs().map(|l| (l, &self.lhs_term)),
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.lhs, self.rhs)
    }
}

pub fn check_rule(lhs: FiniteTerm, rhs: Term, sig: &mut Signature) -> Result<Rule, TrsError> {
    if let FiniteTerm::Var(x) = &lhs {
        return Err(TrsError::LhsIsVariable(x.clone()));
    }
    let lhs_term = lhs.to_term().ok_or(TrsError::CutInLhs)?;
    sig.check_term(&lhs_term)?;
    sig.check_term(&rhs)?;
    let lhs_vars = lhs.variables();
    if let Some(x) = rhs.variables().difference(&lhs_vars).next() {
        return Err(TrsError::FreeVariableInRhs(x.clone()));
    }
    let rhs_finite = FiniteTerm::from_term(&rhs);
    Ok(Rule {
        lhs,
        rhs,
        lhs_term,
        rhs_finite,
    })
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Trs {
    pub signature: Signature,
    pub rules: Vec<Rule>,
}

impl Trs {
    pub fn new(signature: Signature) -> Trs {
        Trs {
            signature,
            rules: Vec::new(),
        }
    }

    pub fn add_rule(&mut self, lhs: FiniteTerm, rhs: Term) -> Result<usize, TrsError> {
        let rule = check_rule(lhs, rhs, &mut self.signature)?;
        self.rules.push(rule);
        Ok(self.rules.len() - 1)
    }

    pub fn rule(&self, i: usize) -> Result<&Rule, TrsError> {
        self.rules.get(i).ok_or(TrsError::NoSuchRule(i))
    }

    pub fn is_left_linear(&self) -> bool {
        self.rules.iter().all(|r| r.lhs.repeated_variables().is_empty())
    }

    pub fn max_lhs_depth(&self) -> usize {
        self.rules.iter().map(|r| r.lhs.depth()).max().unwrap_or(0)
    }

    /// Every left-hand side (and reversed side, for equations) is ground.
    pub fn patterns_ground(&self, both: bool) -> bool {
        self.rules.iter().all(|r| {
            r.lhs.variables().is_empty()
                && (!both
                    || match r.reversed_lhs() {
                        Some(l) => l.variables().is_empty(),
                        None => r.ground_rational_rhs(),
                    })
        })
    }
}

/// Match a finite pattern against `t` at its root.
pub fn match_root(lhs: &FiniteTerm, t: &Term) -> Option<Substitution> {
    let mut sigma = Substitution::new();
    match_node(lhs, t, 0, &mut sigma).then_some(sigma)
}

fn match_node(p: &FiniteTerm, t: &Term, node: usize, sigma: &mut Substitution) -> bool {
    match p {
        FiniteTerm::Cut => false,
        FiniteTerm::Var(x) => {
            let sub = t.subterm_node(node);
            match sigma.get(x) {
                Some(bound) => *bound == sub,
                None => {
                    sigma.insert(x.clone(), sub);
                    true
                }
            }
        }
        FiniteTerm::App(f, args) => {
            let n = &t.nodes[node];
            match &n.label {
                Label::Fun(g) if g == f && n.children.len() == args.len() => args
                    .iter()
                    .zip(n.children.clone())
                    .all(|(a, c)| match_node(a, t, c, sigma)),
                _ => false,
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootStep {
    pub rule: usize,
    pub direction: Direction,
    pub sigma: Substitution,
    pub source: Term,
    pub target: Term,
}

/// Forward root steps from `t`, in rule order.
pub fn root_steps(t: &Term, trs: &Trs) -> Vec<RootStep> {
    oriented_root_steps(t, trs, false)
}

/// Root steps from `t`; with `both`, reversed equations follow the forward ones.
pub fn oriented_root_steps(t: &Term, trs: &Trs, both: bool) -> Vec<RootStep> {
    let dirs: &[Direction] = if both {
        &[Direction::Fwd, Direction::Bwd]
    } else {
        &[Direction::Fwd]
    };
    let mut out = Vec::new();
    for &dir in dirs {
        for (i, rule) in trs.rules.iter().enumerate() {
            let Some((pat, result)) = rule.oriented(dir) else {
                if dir == Direction::Bwd && rule.ground_rational_rhs() && rule.rhs == *t {
                    out.push(RootStep {
                        rule: i,
                        direction: dir,
                        target: rule.lhs_term.clone(),
                        sigma: Substitution::new(),
                        source: t.clone(),
                    });
                }
                continue;
            };
            if let Some(sigma) = match_root(pat, t) {
                out.push(RootStep {
                    rule: i,
                    direction: dir,
                    target: result.substitute(&sigma),
                    sigma,
                    source: t.clone(),
                });
            }
        }
    }
    out
}

/// Apply rule `rule` at position `p` of `t` (tree semantics).
pub fn step_at(t: &Term, p: &Position, rule: usize, trs: &Trs) -> Result<Term, TrsError> {
    step_at_dir(t, p, rule, Direction::Fwd, trs)
}

pub fn step_at_dir(
    t: &Term,
    p: &Position,
    rule: usize,
    dir: Direction,
    trs: &Trs,
) -> Result<Term, TrsError> {
    let sub = t.subterm_at(p)?;
    let (pat, result) = trs
        .rule(rule)?
        .oriented(dir)
        .ok_or(TrsError::NotReversible(rule))?;
    let sigma = match_root(pat, &sub).ok_or_else(|| TrsError::NoMatch {
        rule,
        position: p.clone(),
    })?;
    Ok(t.replace_at(p, result.substitute(&sigma))?)
}

/// Nodes of `t` whose subterm is a redex.
pub fn redex_nodes(t: &Term, trs: &Trs) -> BTreeSet<usize> {
    (0..t.nodes.len())
        .filter(|&i| {
            let sub = t.subterm_node(i);
            trs.rules.iter().any(|r| match_root(&r.lhs, &sub).is_some())
        })
        .collect()
}

pub fn is_normal_form(t: &Term, trs: &Trs) -> bool {
    redex_nodes(t, trs).is_empty()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionStep {
    pub position: Position,
    pub rule: usize,
    pub sigma: Substitution,
}

/// A finite rewrite sequence given by its start and its steps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteReduction {
    pub start: Term,
    pub steps: Vec<ReductionStep>,
}

impl FiniteReduction {
    pub fn empty(start: Term) -> FiniteReduction {
        FiniteReduction {
            start,
            steps: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// All intermediate terms, starting with `start`.
    pub fn replay(&self, trs: &Trs) -> Result<Vec<Term>, TrsError> {
        let mut terms = vec![self.start.clone()];
        for s in &self.steps {
            let cur = terms.last().expect("nonempty");
            let next = step_at(cur, &s.position, s.rule, trs)?;
            terms.push(next);
        }
        Ok(terms)
    }

    pub fn last_term(&self, trs: &Trs) -> Result<Term, TrsError> {
        Ok(self.replay(trs)?.pop().expect("nonempty"))
    }
}

/// Breadth-first enumeration of reductions from a start term.
pub struct FiniteReductions<'a> {
    trs: &'a Trs,
    max_len: usize,
    max_depth: usize,
    queue: VecDeque<(FiniteReduction, Term)>,
}

impl Iterator for FiniteReductions<'_> {
    type Item = FiniteReduction;

    fn next(&mut self) -> Option<FiniteReduction> {
        let (red, last) = self.queue.pop_front()?;
        if red.len() < self.max_len {
            for p in last.positions(self.max_depth) {
                let sub = last.subterm_at(&p).expect("enumerated position");
                for (i, rule) in self.trs.rules.iter().enumerate() {
                    if let Some(sigma) = match_root(&rule.lhs, &sub) {
                        let next = last
                            .replace_at(&p, rule.rhs.substitute(&sigma))
                            .expect("enumerated position");
                        let mut ext = red.clone();
                        ext.steps.push(ReductionStep {
                            position: p.clone(),
                            rule: i,
                            sigma,
                        });
                        self.queue.push_back((ext, next));
                    }
                }
            }
        }
        Some(red)
    }
}

pub fn finite_reductions<'a>(
    s: &Term,
    trs: &'a Trs,
    max_len: usize,
    max_depth: usize,
) -> FiniteReductions<'a> {
    FiniteReductions {
        trs,
        max_len,
        max_depth,
        queue: VecDeque::from([(FiniteReduction::empty(s.clone()), s.clone())]),
    }
}
