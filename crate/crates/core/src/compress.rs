//! Compression of infinitary reductions to reductions of length at most ω.

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::engine::{search_proof_seeded, RelationKind, SearchBudget, Verdict};
use crate::proof::{replay_split_prefix, validate, Justification, PremiseItem, ProofGraph};
use crate::term::{truncate, Position, Term};
use crate::trs::{step_at, Trs};

const MAX_NODES: usize = 512;
const MAX_SLACK: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompressError {
    #[error("rewrite system is not left-linear")]
    NotLeftLinear,
    #[error("invalid certificate: {0}")]
    InvalidCertificate(String),
    #[error("compression failed: {0}")]
    Failed(String),
}

impl CompressError {
    pub fn code(&self) -> &'static str {
        match self {
            CompressError::NotLeftLinear => "NotLeftLinear",
            CompressError::InvalidCertificate(_) => "InvalidCertificate",
            CompressError::Failed(_) => "Failed",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OredChild {
    Node(usize),
    /// The argument already equals the target argument.
    Stop,
}

/// One level of the reduction: a finite head reduction, then descent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OredNode {
    pub source: Term,
    pub target: Term,
    /// Steps relative to the node's position.
    pub head: Vec<(Position, usize)>,
    pub children: Vec<OredChild>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OredCertificate {
    pub nodes: Vec<OredNode>,
    pub root: usize,
}

struct Compressor<'a> {
    trs: &'a Trs,
    budget: SearchBudget,
    certs: Vec<ProofGraph>,
    nodes: Vec<OredNode>,
    memo: HashMap<(Term, Term), usize>,
}

impl Compressor<'_> {
    /// Ored node for the relation node `k` of certificate `c`.
    fn node(&mut self, c: usize, k: usize) -> Result<usize, CompressError> {
        let (s, t) = {
            let (s, t) = self.certs[c].goal_terms(k);
            (s.clone(), t.clone())
        };
        if let Some(&o) = self.memo.get(&(s.clone(), t.clone())) {
            return Ok(o);
        }
        if self.nodes.len() >= MAX_NODES {
            return Err(CompressError::Failed(format!("more than {MAX_NODES} levels needed")));
        }
        let o = self.nodes.len();
        self.nodes.push(OredNode {
            source: s.clone(),
            target: t.clone(),
            head: Vec::new(),
            children: Vec::new(),
        });
        self.memo.insert((s.clone(), t.clone()), o);

        let Justification::Split(items) = self.certs[c].nodes[k].rule.clone() else {
            return Err(CompressError::InvalidCertificate(format!("node {k} is not a split")));
        };
        let last_step = items.iter().rposition(|i| matches!(i, PremiseItem::Step(_)));
        let prefix = &items[..last_step.map_or(0, |l| l + 1)];
        let rest = &items[prefix.len()..];
        // the final lift, entered from the term reached by the prefix
        let final_lift = match rest {
            [PremiseItem::Node(j)] => Some(*j),
            _ => None,
        };
        let reached = match prefix.last() {
            Some(PremiseItem::Step(st)) => self.certs[c].terms[st.target].clone(),
            _ => s.clone(),
        };
        let wanted_head = match final_lift {
            Some(j) => self.certs[c].goal_terms(j).0.clone(),
            None => reached.clone(),
        };
        let mut head = None;
        for slack in 0..=MAX_SLACK {
            if let Some((h, steps)) = replay_split_prefix(&self.certs[c], self.trs, prefix, slack, &s) {
                if h.same_head(&wanted_head) && h.same_head(&t) {
                    head = Some((h, steps));
                    break;
                }
            }
        }
        let Some((h, steps)) = head else {
            return Err(CompressError::Failed(format!("no finite head reduction for `{s}` towards `{t}`")));
        };
        let exact_children = match final_lift.map(|j| &self.certs[c].nodes[j].rule) {
            Some(Justification::Lift(children)) if h == wanted_head => Some(children.clone()),
            _ => None,
        };
        let mut children = Vec::new();
        for (i, (hi, ti)) in h.args().into_iter().zip(t.args()).enumerate() {
            let child = if hi == ti {
                OredChild::Stop
            } else if let Some(ch) = &exact_children {
                OredChild::Node(self.node(c, ch[i])?)
            } else {
                OredChild::Node(self.fresh(c, &hi, &ti)?)
            };
            children.push(child);
        }
        self.nodes[o].head = steps.into_iter().map(|st| (st.position, st.rule)).collect();
        self.nodes[o].children = children;
        Ok(o)
    }

    /// Ored node for a pair not covered by the certificate's structure.
    fn fresh(&mut self, c: usize, s: &Term, t: &Term) -> Result<usize, CompressError> {
        if let Some(&o) = self.memo.get(&(s.clone(), t.clone())) {
            return Ok(o);
        }
        let hints = self.certs[c].terms.clone();
        match search_proof_seeded(s, t, RelationKind::Ired, self.trs, self.budget, &hints) {
            Verdict::Proved(p) => {
                self.certs.push(*p);
                let id = self.certs.len() - 1;
                let root = self.certs[id].root;
                self.node(id, root)
            }
            Verdict::Unknown => Err(CompressError::Failed(format!(
                "could not continue the reduction from `{s}` to `{t}`"
            ))),
        }
    }
}

/// Turn a valid infinitary-rewriting certificate into a reduction of length
/// at most ω.
pub fn compress(p: &ProofGraph, trs: &Trs) -> Result<OredCertificate, CompressError> {
    compress_with_budget(p, trs, SearchBudget::default())
}

pub fn compress_with_budget(
    p: &ProofGraph,
    trs: &Trs,
    budget: SearchBudget,
) -> Result<OredCertificate, CompressError> {
    if p.kind != RelationKind::Ired {
        return Err(CompressError::InvalidCertificate(format!("expected an ired certificate, got {}", p.kind)));
    }
    let report = validate(p, trs);
    if !report.ok {
        return Err(CompressError::InvalidCertificate(report.to_string().trim_end().to_string()));
    }
    if !trs.is_left_linear() {
        return Err(CompressError::NotLeftLinear);
    }
    let mut c = Compressor {
        trs,
        budget,
        certs: vec![p.clone()],
        nodes: Vec::new(),
        memo: HashMap::new(),
    };
    let root = c.node(0, p.root)?;
    Ok(OredCertificate { nodes: c.nodes, root })
}

/// A step of the materialized reduction, tagged with its level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmittedStep {
    pub position: Position,
    pub rule: usize,
    pub level: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepStream {
    pub start: Term,
    pub steps: Vec<EmittedStep>,
}

impl StepStream {
    /// Every term of the stream, starting with `start`.
    pub fn replay(&self, trs: &Trs) -> Result<Vec<Term>, crate::trs::TrsError> {
        let mut terms = vec![self.start.clone()];
        for s in &self.steps {
            let next = step_at(terms.last().expect("nonempty"), &s.position, s.rule, trs)?;
            terms.push(next);
        }
        Ok(terms)
    }
}

impl OredCertificate {
    /// Nodes from which some head step is reachable.
    fn productive(&self) -> Vec<bool> {
        let n = self.nodes.len();
        let mut prod: Vec<bool> = self.nodes.iter().map(|o| !o.head.is_empty()).collect();
        loop {
            let mut changed = false;
            for k in 0..n {
                if !prod[k]
                    && self.nodes[k].children.iter().any(|c| matches!(c, OredChild::Node(j) if *j < n && prod[*j]))
                {
                    prod[k] = true;
                    changed = true;
                }
            }
            if !changed {
                return prod;
            }
        }
    }

    /// Level-by-level, left-to-right walk; calls `visit` per level with the
    /// (node, position) pairs of that level until it returns false.
    fn walk_levels(&self, mut visit: impl FnMut(usize, &[(usize, Position)]) -> bool) {
        let prod = self.productive();
        let mut level = vec![(self.root, Position::root())];
        let mut depth = 0;
        while !level.is_empty() && visit(depth, &level) {
            let mut next = Vec::new();
            for (k, pos) in &level {
                for (i, c) in self.nodes[*k].children.iter().enumerate() {
                    if let OredChild::Node(j) = c {
                        if prod.get(*j).copied().unwrap_or(false) {
                            next.push((*j, pos.child(i + 1)));
                        }
                    }
                }
            }
            level = next;
            depth += 1;
        }
    }

    pub fn source(&self) -> &Term {
        &self.nodes[self.root].source
    }

    pub fn target(&self) -> &Term {
        &self.nodes[self.root].target
    }
}

/// The first `k` steps of the denoted reduction.
pub fn emit_steps(o: &OredCertificate, k: usize) -> StepStream {
    let mut steps = Vec::new();
    if k > 0 && o.root < o.nodes.len() {
        o.walk_levels(|level, nodes| {
            for (n, pos) in nodes {
                for (rel, rule) in &o.nodes[*n].head {
                    steps.push(EmittedStep {
                        position: pos.concat(rel),
                        rule: *rule,
                        level,
                    });
                    if steps.len() == k {
                        return false;
                    }
                }
            }
            true
        });
    }
    StepStream {
        start: o.nodes.get(o.root).map_or_else(|| Term::constant("#"), |n| n.source.clone()),
        steps,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OredViolationCode {
    BadIndex,
    BadStep,
    BadEndpoint,
    ArityMismatch,
    BadChild,
    BadStop,
    TruncationMismatch,
}

impl fmt::Display for OredViolationCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OredViolation {
    pub node: usize,
    pub code: OredViolationCode,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OredReport {
    pub ok: bool,
    pub violations: Vec<OredViolation>,
}

impl OredReport {
    pub fn has(&self, code: OredViolationCode) -> bool {
        self.violations.iter().any(|v| v.code == code)
    }
}

impl fmt::Display for OredReport {
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

/// Replay every head, check the level structure, and compare truncations
/// with the target after each completed level up to `depth`.
pub fn validate_ored(o: &OredCertificate, trs: &Trs, depth: usize) -> OredReport {
    let mut out = Vec::new();
    fn push(out: &mut Vec<OredViolation>, node: usize, code: OredViolationCode, message: String) {
        out.push(OredViolation { node, code, message });
    }
    let n = o.nodes.len();
    if o.root >= n {
        push(&mut out, o.root, OredViolationCode::BadIndex, "root out of range".into());
        return OredReport { ok: false, violations: out };
    }
    for (k, node) in o.nodes.iter().enumerate() {
        let mut cur = node.source.clone();
        let mut ok = true;
        for (pos, rule) in &node.head {
            match step_at(&cur, pos, *rule, trs) {
                Ok(next) => cur = next,
                Err(e) => {
                    push(&mut out, k, OredViolationCode::BadStep, format!("head step at {pos}: {e}"));
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            continue;
        }
        if !cur.same_head(&node.target) {
            push(&mut out, k, OredViolationCode::BadEndpoint, format!("head ends in `{cur}`, target is `{}`", node.target));
            continue;
        }
        if node.children.len() != cur.arity() {
            push(&mut out, 
                k,
                OredViolationCode::ArityMismatch,
                format!("{} children for arity {}", node.children.len(), cur.arity()),
            );
            continue;
        }
        for (i, ((hi, ti), c)) in cur.args().iter().zip(node.target.args()).zip(&node.children).enumerate() {
            match c {
                OredChild::Stop if *hi != ti => {
                    push(&mut out, k, OredViolationCode::BadStop, format!("argument {} still differs", i + 1))
                }
                OredChild::Node(j) if *j >= n => push(&mut out, k, OredViolationCode::BadIndex, format!("child {j}")),
                OredChild::Node(j) if o.nodes[*j].source != *hi || o.nodes[*j].target != ti => push(&mut out, 
                    k,
                    OredViolationCode::BadChild,
                    format!("child {j} does not continue argument {}", i + 1),
                ),
                _ => {}
            }
        }
    }
    if out.is_empty() {
        // truncation agreement after each completed level
        let target = o.target().clone();
        let mut cur = o.source().clone();
        let mut levels_done = 0;
        let mut failure = None;
        o.walk_levels(|level, nodes| {
            if truncate(&cur, level) != truncate(&target, level) {
                failure = Some(level);
                return false;
            }
            if level >= depth {
                return false;
            }
            for (k, pos) in nodes {
                for (rel, rule) in &o.nodes[*k].head {
                    match step_at(&cur, &pos.concat(rel), *rule, trs) {
                        Ok(next) => cur = next,
                        Err(_) => {
                            failure = Some(level);
                            return false;
                        }
                    }
                }
            }
            levels_done = level + 1;
            true
        });
        if failure.is_none() {
            // levels below the reached depth are complete: no further steps
            for m in levels_done..=depth {
                if truncate(&cur, m) != truncate(&target, m) {
                    failure = Some(m);
                    break;
                }
            }
        }
        if let Some(m) = failure {
            push(&mut out, 
                o.root,
                OredViolationCode::TruncationMismatch,
                format!("result disagrees with the target at depth {m}"),
            );
        }
    }
    OredReport {
        ok: out.is_empty(),
        violations: out,
    }
}

#[derive(Serialize)]
struct StepDoc {
    position: Vec<usize>,
    rule: usize,
}

#[derive(Serialize)]
#[serde(untagged)]
enum ChildDoc {
    Node(usize),
    Stop(&'static str),
}

#[derive(Serialize)]
struct NodeDoc {
    source: usize,
    target: usize,
    head: Vec<StepDoc>,
    children: Vec<ChildDoc>,
}

#[derive(Serialize)]
struct Doc {
    kind: &'static str,
    terms: Vec<String>,
    nodes: Vec<NodeDoc>,
    root: usize,
}

/// JSON document; node terms refer to the `terms` table.
pub fn ored_to_json(o: &OredCertificate) -> String {
    let mut terms: Vec<Term> = Vec::new();
    let mut intern = |t: &Term| match terms.iter().position(|u| u == t) {
        Some(i) => i,
        None => {
            terms.push(t.clone());
            terms.len() - 1
        }
    };
    let nodes = o
        .nodes
        .iter()
        .map(|n| NodeDoc {
            source: intern(&n.source),
            target: intern(&n.target),
            head: n
                .head
                .iter()
                .map(|(p, r)| StepDoc {
                    position: p.0.clone(),
                    rule: *r,
                })
                .collect(),
            children: n
                .children
                .iter()
                .map(|c| match c {
                    OredChild::Node(j) => ChildDoc::Node(*j),
                    OredChild::Stop => ChildDoc::Stop("stop"),
                })
                .collect(),
        })
        .collect();
    let doc = Doc {
        kind: "ored",
        terms: terms.iter().map(|t| t.to_string()).collect(),
        nodes,
        root: o.root,
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
    s.push('\n');
    s
}

/// Steps of `stream` with the term after each, one per line.
pub fn format_steps(stream: &StepStream, trs: &Trs) -> Result<String, crate::trs::TrsError> {
    let terms = stream.replay(trs)?;
    let mut out = String::new();
    for (s, t) in stream.steps.iter().zip(terms.iter().skip(1)) {
        out.push_str(&format!("{}  {}  {}\n", s.position, s.rule, t));
    }
    Ok(out)
}
