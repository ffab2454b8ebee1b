//! Rational terms represented as canonical (minimal) term graphs.
//!
//! A [`Term`] denotes a finite or infinite tree with finitely many distinct
//! subterms. Every `Term` is kept in canonical form: the minimal graph
//! bisimilar to the input, numbered breadth-first from the root. Two canonical
//! terms are structurally equal exactly when they are bisimilar, which is what
//! lets `Term` be used as a hash key.

mod build;
mod finite;
mod print;

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};
use std::fmt;
use std::ops::Deref;

use thiserror::Error;

pub use build::{expr_to_term, make_term, Expr, Signature, VarPolicy};
pub use finite::FiniteTerm;

/// Reserved nullary marker used by [`truncate`].
pub const CUT_MARKER: &str = "#";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("symbol `{name}` used with arity {found}, expected {expected}")]
    ArityMismatch {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("unguarded recursive binding `{0}`")]
    UnguardedBinding(String),
    #[error("variable `{0}` cannot be applied to arguments")]
    VariableApplied(String),
    #[error("invalid position {0}")]
    InvalidPosition(Position),
    #[error("name `{0}` is reserved")]
    ReservedName(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Fun(String),
    Var(String),
}

impl Label {
    pub fn name(&self) -> &str {
        match self {
            Label::Fun(n) | Label::Var(n) => n,
        }
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Label::Var(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Node {
    pub label: Label,
    pub children: Vec<usize>,
}

/// A raw term graph; not necessarily minimal or fully reachable.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TermGraph {
    pub nodes: Vec<Node>,
    pub root: usize,
}

impl TermGraph {
    /// Quotient by bisimilarity and renumber breadth-first from the root.
    pub fn minimize(&self) -> Term {
        Term {
            graph: canonicalize(&self.nodes, self.root),
        }
    }

    fn well_formed(&self) -> bool {
        self.root < self.nodes.len()
            && self
                .nodes
                .iter()
                .all(|n| n.children.iter().all(|&c| c < self.nodes.len()) && !(n.label.is_var() && !n.children.is_empty()))
    }
}

/// A rational term in canonical form. Equality is bisimilarity.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Term {
    graph: TermGraph,
}

impl Deref for Term {
    type Target = TermGraph;

    fn deref(&self) -> &TermGraph {
        &self.graph
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Term({self})")
    }
}

/// Substitution from variable names to terms; unmapped variables are fixed.
pub type Substitution = BTreeMap<String, Term>;

impl Term {
    /// Build from a raw graph, checking indices; the result is canonical.
    pub fn from_graph(graph: TermGraph) -> Option<Term> {
        graph.well_formed().then(|| graph.minimize())
    }

    pub fn constant(name: &str) -> Term {
        Term::app(name, Vec::new())
    }

    pub fn var(name: &str) -> Term {
        Term {
            graph: TermGraph {
                nodes: vec![Node {
                    label: Label::Var(name.to_string()),
                    children: Vec::new(),
                }],
                root: 0,
            },
        }
    }

    /// `f(args...)`
    pub fn app(symbol: &str, args: Vec<Term>) -> Term {
        let mut nodes = vec![Node {
            label: Label::Fun(symbol.to_string()),
            children: Vec::with_capacity(args.len()),
        }];
        for arg in &args {
            let offset = nodes.len();
            nodes[0].children.push(offset + arg.root);
            nodes.extend(arg.nodes.iter().map(|n| Node {
                label: n.label.clone(),
                children: n.children.iter().map(|c| c + offset).collect(),
            }));
        }
        TermGraph { nodes, root: 0 }.minimize()
    }

    pub fn root_label(&self) -> &Label {
        &self.nodes[0].label
    }

    pub fn arity(&self) -> usize {
        self.nodes[0].children.len()
    }

    pub fn is_var(&self) -> bool {
        self.root_label().is_var()
    }

    /// Number of nodes of the canonical graph.
    pub fn size(&self) -> usize {
        self.nodes.len()
    }

    /// True when the two terms share root symbol and arity.
    pub fn same_head(&self, other: &Term) -> bool {
        self.root_label() == other.root_label() && self.arity() == other.arity()
    }

    /// The term rooted at a node of this graph.
    pub fn subterm_node(&self, node: usize) -> Term {
        if node == 0 {
            return self.clone();
        }
        TermGraph {
            nodes: self.nodes.clone(),
            root: node,
        }
        .minimize()
    }

    /// Immediate arguments of the root.
    pub fn args(&self) -> Vec<Term> {
        self.nodes[0]
            .children
            .iter()
            .map(|&c| self.subterm_node(c))
            .collect()
    }

    /// Node reached by following `p` from the root.
    pub fn node_at(&self, p: &Position) -> Result<usize, TermError> {
        let mut cur = 0;
        for &i in &p.0 {
            let children = &self.nodes[cur].children;
            if i == 0 || i > children.len() {
                return Err(TermError::InvalidPosition(p.clone()));
            }
            cur = children[i - 1];
        }
        Ok(cur)
    }

    pub fn subterm_at(&self, p: &Position) -> Result<Term, TermError> {
        Ok(self.subterm_node(self.node_at(p)?))
    }

    pub fn variables(&self) -> BTreeSet<String> {
        self.nodes
            .iter()
            .filter_map(|n| match &n.label {
                Label::Var(x) => Some(x.clone()),
                Label::Fun(_) => None,
            })
            .collect()
    }

    pub fn is_ground(&self) -> bool {
        self.nodes.iter().all(|n| !n.label.is_var())
    }

    /// True when the denoted tree is finite (the graph is acyclic).
    pub fn is_finite(&self) -> bool {
        // canonical graphs are reachable from the root; acyclic iff a
        // topological order exists
        let n = self.nodes.len();
        let mut indeg = vec![0usize; n];
        for node in &self.nodes {
            for &c in &node.children {
                indeg[c] += 1;
            }
        }
        let mut queue: Vec<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
        let mut seen = 0;
        while let Some(i) = queue.pop() {
            seen += 1;
            for &c in &self.nodes[i].children {
                indeg[c] -= 1;
                if indeg[c] == 0 {
                    queue.push(c);
                }
            }
        }
        seen == n
    }

    /// `t σ`, computed on the graph: every variable node bound by `sigma`
    /// is redirected to the root of a copy of its image.
    pub fn substitute(&self, sigma: &Substitution) -> Term {
        if sigma.is_empty() || self.is_ground() {
            return self.clone();
        }
        let mut nodes = self.nodes.clone();
        let mut image_root: BTreeMap<&str, usize> = BTreeMap::new();
        for (x, img) in sigma {
            let offset = nodes.len();
            image_root.insert(x.as_str(), offset + img.root);
            nodes.extend(img.nodes.iter().map(|n| Node {
                label: n.label.clone(),
                children: n.children.iter().map(|c| c + offset).collect(),
            }));
        }
        let redirect = |i: usize, nodes: &[Node]| -> usize {
            match &nodes[i].label {
                Label::Var(x) if i < self.nodes.len() => {
                    image_root.get(x.as_str()).copied().unwrap_or(i)
                }
                _ => i,
            }
        };
        let original = self.nodes.len();
        for i in 0..original {
            let children: Vec<usize> = nodes[i]
                .children
                .iter()
                .map(|&c| redirect(c, &nodes))
                .collect();
            nodes[i].children = children;
        }
        let root = redirect(self.root, &nodes);
        TermGraph { nodes, root }.minimize()
    }

    /// `C[new]` where `C` is this term with a hole at `p` (tree semantics:
    /// only the occurrence at `p` is replaced).
    pub fn replace_at(&self, p: &Position, new: Term) -> Result<Term, TermError> {
        self.node_at(p)?;
        Ok(self.replace_from(0, &p.0, new))
    }

    fn replace_from(&self, node: usize, path: &[usize], new: Term) -> Term {
        let Some((&first, rest)) = path.split_first() else {
            return new;
        };
        let children = &self.nodes[node].children;
        let args = children
            .iter()
            .enumerate()
            .map(|(k, &c)| {
                if k + 1 == first {
                    self.replace_from(c, rest, new.clone())
                } else {
                    self.subterm_node(c)
                }
            })
            .collect();
        Term::app(self.nodes[node].label.name(), args)
    }

    /// Tree positions of depth at most `max_depth`, in lexicographic order.
    pub fn positions(&self, max_depth: usize) -> Vec<Position> {
        let mut out = Vec::new();
        let mut path = Vec::new();
        self.collect_positions(0, max_depth, &mut path, &mut out);
        out
    }

    fn collect_positions(
        &self,
        node: usize,
        budget: usize,
        path: &mut Vec<usize>,
        out: &mut Vec<Position>,
    ) {
        out.push(Position(path.clone()));
        if budget == 0 {
            return;
        }
        for (k, &c) in self.nodes[node].children.iter().enumerate() {
            path.push(k + 1);
            self.collect_positions(c, budget - 1, path, out);
            path.pop();
        }
    }
}

/// A path of 1-based argument indices.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Position(pub Vec<usize>);

impl Position {
    pub fn root() -> Position {
        Position(Vec::new())
    }

    pub fn child(&self, i: usize) -> Position {
        let mut p = self.0.clone();
        p.push(i);
        Position(p)
    }

    pub fn concat(&self, other: &Position) -> Position {
        let mut p = self.0.clone();
        p.extend_from_slice(&other.0);
        Position(p)
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }

    pub fn is_prefix_of(&self, other: &Position) -> bool {
        other.0.starts_with(&self.0)
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (k, i) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "]")
    }
}

/// Distance `2^-n` between terms, kept as an exact exponent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DyadicDistance {
    Zero,
    Exponent(usize),
}

impl Ord for DyadicDistance {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        use std::cmp::Ordering::*;
        match (self, other) {
            (DyadicDistance::Zero, DyadicDistance::Zero) => Equal,
            (DyadicDistance::Zero, _) => Less,
            (_, DyadicDistance::Zero) => Greater,
            // larger exponent, smaller distance
            (DyadicDistance::Exponent(a), DyadicDistance::Exponent(b)) => b.cmp(a),
        }
    }
}

impl PartialOrd for DyadicDistance {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for DyadicDistance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DyadicDistance::Zero => write!(f, "0"),
            DyadicDistance::Exponent(n) => write!(f, "2^-{n}"),
        }
    }
}

fn same_node_shape(a: &Node, b: &Node) -> bool {
    a.label == b.label && a.children.len() == b.children.len()
}

/// Product-graph check: no reachable pair of nodes disagrees on its label.
pub fn bisimilar(s: &TermGraph, t: &TermGraph) -> bool {
    let mut seen = HashSet::new();
    let mut stack = vec![(s.root, t.root)];
    while let Some((i, j)) = stack.pop() {
        if !seen.insert((i, j)) {
            continue;
        }
        let (a, b) = (&s.nodes[i], &t.nodes[j]);
        if !same_node_shape(a, b) {
            return false;
        }
        stack.extend(a.children.iter().copied().zip(b.children.iter().copied()));
    }
    true
}

/// Breadth-first search of the product graph for the shallowest level at
/// which the unfoldings differ.
pub fn distance(s: &TermGraph, t: &TermGraph) -> DyadicDistance {
    let mut seen = HashSet::new();
    let mut queue = VecDeque::from([((s.root, t.root), 0usize)]);
    seen.insert((s.root, t.root));
    while let Some(((i, j), level)) = queue.pop_front() {
        let (a, b) = (&s.nodes[i], &t.nodes[j]);
        if !same_node_shape(a, b) {
            return DyadicDistance::Exponent(level);
        }
        for pair in a.children.iter().copied().zip(b.children.iter().copied()) {
            if seen.insert(pair) {
                queue.push_back((pair, level + 1));
            }
        }
    }
    DyadicDistance::Zero
}

/// The unfolding of `t` with every subterm at depth `n` replaced by `#`.
pub fn truncate(t: &TermGraph, n: usize) -> FiniteTerm {
    fn go(t: &TermGraph, node: usize, budget: usize) -> FiniteTerm {
        if budget == 0 {
            return FiniteTerm::Cut;
        }
        let nd = &t.nodes[node];
        match &nd.label {
            Label::Var(x) => FiniteTerm::Var(x.clone()),
            Label::Fun(f) => FiniteTerm::App(
                f.clone(),
                nd.children.iter().map(|&c| go(t, c, budget - 1)).collect(),
            ),
        }
    }
    go(t, t.root, n)
}

/// Partition refinement followed by breadth-first renumbering.
fn canonicalize(nodes: &[Node], root: usize) -> TermGraph {
    // reachable nodes, in discovery order
    let mut order = Vec::new();
    let mut local = vec![usize::MAX; nodes.len()];
    let mut stack = vec![root];
    while let Some(i) = stack.pop() {
        if local[i] != usize::MAX {
            continue;
        }
        local[i] = order.len();
        order.push(i);
        for &c in nodes[i].children.iter().rev() {
            if local[c] == usize::MAX {
                stack.push(c);
            }
        }
    }

    let n = order.len();
    let mut class = vec![0usize; n];
    let mut count;
    {
        let mut keys: BTreeMap<(&Label, usize), usize> = BTreeMap::new();
        for (k, &i) in order.iter().enumerate() {
            let key = (&nodes[i].label, nodes[i].children.len());
            let next = keys.len();
            class[k] = *keys.entry(key).or_insert(next);
        }
        count = keys.len();
    }
    loop {
        let mut keys: BTreeMap<(usize, Vec<usize>), usize> = BTreeMap::new();
        let mut next_class = vec![0usize; n];
        for (k, &i) in order.iter().enumerate() {
            let sig = (
                class[k],
                nodes[i].children.iter().map(|&c| class[local[c]]).collect(),
            );
            let next = keys.len();
            next_class[k] = *keys.entry(sig).or_insert(next);
        }
        let refined = keys.len();
        class = next_class;
        if refined == count {
            break;
        }
        count = refined;
    }

    // representative per class
    let mut rep = vec![usize::MAX; count];
    for (k, &i) in order.iter().enumerate() {
        if rep[class[k]] == usize::MAX {
            rep[class[k]] = i;
        }
    }

    let mut number = vec![usize::MAX; count];
    let mut out_order = Vec::with_capacity(count);
    let root_class = class[local[root]];
    number[root_class] = 0;
    out_order.push(root_class);
    let mut head = 0;
    while head < out_order.len() {
        let c = out_order[head];
        head += 1;
        for &child in &nodes[rep[c]].children {
            let cc = class[local[child]];
            if number[cc] == usize::MAX {
                number[cc] = out_order.len();
                out_order.push(cc);
            }
        }
    }
    let out = out_order
        .iter()
        .map(|&c| {
            let nd = &nodes[rep[c]];
            Node {
                label: nd.label.clone(),
                children: nd.children.iter().map(|&ch| number[class[local[ch]]]).collect(),
            }
        })
        .collect();
    TermGraph { nodes: out, root: 0 }
}
