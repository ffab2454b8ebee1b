use std::collections::BTreeMap;

use crate::engine::RelationKind;
use crate::term::{Substitution, Term};
use crate::trs::Direction;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Judgment {
    /// `s ∼ t` for the certificate's relation.
    Rel,
    /// `s ⇁ t`, an unmarked lift.
    Down,
    /// `s ⇁· t`, a marked lift (infinitary rewriting only).
    DownFin,
}

impl Judgment {
    pub fn name(self) -> &'static str {
        match self {
            Judgment::Rel => "rel",
            Judgment::Down => "down",
            Judgment::DownFin => "downfin",
        }
    }

    pub fn is_lift(self) -> bool {
        self != Judgment::Rel
    }
}

/// A root step between two entries of the term table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepItem {
    pub rule: usize,
    pub direction: Direction,
    pub sigma: BTreeMap<String, usize>,
    pub source: usize,
    pub target: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PremiseItem {
    Step(StepItem),
    Node(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Justification {
    Split(Vec<PremiseItem>),
    Lift(Vec<usize>),
    Id,
}

impl Justification {
    pub fn name(&self) -> &'static str {
        match self {
            Justification::Split(_) => "split",
            Justification::Lift(_) => "lift",
            Justification::Id => "id",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofNode {
    pub judgment: Judgment,
    pub goal: (usize, usize),
    pub rule: Justification,
}

/// A finite certificate whose unfolding is a proof tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofGraph {
    pub kind: RelationKind,
    pub terms: Vec<Term>,
    pub nodes: Vec<ProofNode>,
    pub root: usize,
}

impl ProofGraph {
    pub fn new(kind: RelationKind) -> ProofGraph {
        ProofGraph {
            kind,
            terms: Vec::new(),
            nodes: Vec::new(),
            root: 0,
        }
    }

    /// Index of `t` in the term table, adding it if absent.
    pub fn intern(&mut self, t: &Term) -> usize {
        match self.terms.iter().position(|u| u == t) {
            Some(i) => i,
            None => {
                self.terms.push(t.clone());
                self.terms.len() - 1
            }
        }
    }

    pub fn intern_sigma(&mut self, sigma: &Substitution) -> BTreeMap<String, usize> {
        sigma
            .iter()
            .map(|(x, t)| (x.clone(), self.intern(t)))
            .collect()
    }

    pub fn push(&mut self, node: ProofNode) -> usize {
        self.nodes.push(node);
        self.nodes.len() - 1
    }

    pub fn goal_terms(&self, node: usize) -> (&Term, &Term) {
        let (s, t) = self.nodes[node].goal;
        (&self.terms[s], &self.terms[t])
    }

    /// Premise nodes of `node`, in order.
    pub fn successors(&self, node: usize) -> Vec<usize> {
        match &self.nodes[node].rule {
            Justification::Split(items) => items
                .iter()
                .filter_map(|i| match i {
                    PremiseItem::Node(k) => Some(*k),
                    PremiseItem::Step(_) => None,
                })
                .collect(),
            Justification::Lift(children) => children.clone(),
            Justification::Id => Vec::new(),
        }
    }

    pub fn count_rule(&self, name: &str) -> usize {
        self.nodes.iter().filter(|n| n.rule.name() == name).count()
    }

    pub fn count_judgment(&self, j: Judgment) -> usize {
        self.nodes.iter().filter(|n| n.judgment == j).count()
    }

    /// Edges to a node on the current depth-first path from the root.
    pub fn back_edges(&self) -> Vec<(usize, usize)> {
        let n = self.nodes.len();
        let mut state = vec![0u8; n];
        let mut out = Vec::new();
        if self.root >= n {
            return out;
        }
        let mut stack = vec![(self.root, 0usize)];
        state[self.root] = 1;
        while let Some(&mut (v, ref mut next)) = stack.last_mut() {
            let succ = self.successors(v);
            if *next < succ.len() {
                let w = succ[*next];
                *next += 1;
                match state.get(w) {
                    Some(0) => {
                        state[w] = 1;
                        stack.push((w, 0));
                    }
                    Some(1) => out.push((v, w)),
                    _ => {}
                }
            } else {
                state[v] = 2;
                stack.pop();
            }
        }
        out
    }
}
