use std::collections::{BTreeMap, BTreeSet};

use super::{Label, Node, Term, TermError, TermGraph, CUT_MARKER};

/// How bare lowercase identifiers are classified.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum VarPolicy {
    /// Single letters `u`..`z`, optionally followed by digits or primes.
    #[default]
    Conventional,
    /// Exactly the declared names.
    Declared(BTreeSet<String>),
}

impl VarPolicy {
    pub fn is_var(&self, name: &str) -> bool {
        match self {
            VarPolicy::Conventional => {
                let mut chars = name.chars();
                matches!(chars.next(), Some('u'..='z'))
                    && chars.all(|c| c.is_ascii_digit() || c == '\'')
            }
            VarPolicy::Declared(names) => names.contains(name),
        }
    }
}

/// Symbols with their arities, plus the rule for recognising variables.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Signature {
    pub symbols: BTreeMap<String, usize>,
    pub vars: VarPolicy,
}

impl Signature {
    pub fn new(vars: VarPolicy) -> Signature {
        Signature {
            symbols: BTreeMap::new(),
            vars,
        }
    }

    pub fn arity(&self, name: &str) -> Option<usize> {
        self.symbols.get(name).copied()
    }

    pub fn is_var(&self, name: &str) -> bool {
        self.vars.is_var(name)
    }

    /// Record `name/arity`, failing on a conflicting earlier use.
    pub fn declare(&mut self, name: &str, arity: usize) -> Result<(), TermError> {
        if name == CUT_MARKER {
            return Err(TermError::ReservedName(name.to_string()));
        }
        if self.is_var(name) {
            return Err(TermError::VariableApplied(name.to_string()));
        }
        match self.symbols.get(name) {
            Some(&expected) if expected != arity => Err(TermError::ArityMismatch {
                name: name.to_string(),
                expected,
                found: arity,
            }),
            Some(_) => Ok(()),
            None => {
                self.symbols.insert(name.to_string(), arity);
                Ok(())
            }
        }
    }

    /// Declare every symbol of `t`, checking arities.
    pub fn check_term(&mut self, t: &Term) -> Result<(), TermError> {
        for node in &t.nodes {
            if let Label::Fun(f) = &node.label {
                self.declare(f, node.children.len())?;
            }
        }
        Ok(())
    }
}

/// Surface syntax of term expressions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    /// A bare identifier: rec-bound name, variable or constant.
    Ident(String),
    App(String, Vec<Expr>),
    /// `rec X = e and Y = e' in body`
    Rec(Vec<(String, Expr)>, Box<Expr>),
}

impl Expr {
    pub fn contains_rec(&self) -> bool {
        match self {
            Expr::Ident(_) => false,
            Expr::App(_, args) => args.iter().any(Expr::contains_rec),
            Expr::Rec(..) => true,
        }
    }
}

enum Slot {
    Node(Node),
    Alias(usize, String),
    Pending(String),
}

struct Builder<'a> {
    sig: &'a mut Signature,
    slots: Vec<Slot>,
    scopes: Vec<Vec<(String, usize)>>,
}

impl Builder<'_> {
    fn lookup(&self, name: &str) -> Option<usize> {
        self.scopes
            .iter()
            .rev()
            .flat_map(|scope| scope.iter().rev())
            .find(|(n, _)| n == name)
            .map(|&(_, slot)| slot)
    }

    fn push(&mut self, slot: Slot) -> usize {
        self.slots.push(slot);
        self.slots.len() - 1
    }

    fn build(&mut self, e: &Expr) -> Result<usize, TermError> {
        match e {
            Expr::Ident(name) => {
                if let Some(slot) = self.lookup(name) {
                    return Ok(slot);
                }
                let label = if self.sig.is_var(name) {
                    Label::Var(name.clone())
                } else {
                    self.sig.declare(name, 0)?;
                    Label::Fun(name.clone())
                };
                Ok(self.push(Slot::Node(Node {
                    label,
                    children: Vec::new(),
                })))
            }
            Expr::App(name, args) => {
                if self.lookup(name).is_some() {
                    return Err(TermError::VariableApplied(name.clone()));
                }
                self.sig.declare(name, args.len())?;
                let children = args
                    .iter()
                    .map(|a| self.build(a))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(self.push(Slot::Node(Node {
                    label: Label::Fun(name.clone()),
                    children,
                })))
            }
            Expr::Rec(bindings, body) => {
                let scope: Vec<(String, usize)> = bindings
                    .iter()
                    .map(|(name, _)| (name.clone(), self.push(Slot::Pending(name.clone()))))
                    .collect();
                self.scopes.push(scope.clone());
                for ((name, expr), (_, slot)) in bindings.iter().zip(&scope) {
                    let target = self.build(expr)?;
                    self.slots[*slot] = Slot::Alias(target, name.clone());
                }
                let result = self.build(body);
                self.scopes.pop();
                result
            }
        }
    }

    fn resolve(&self, mut i: usize) -> Result<usize, TermError> {
        let mut hops = 0;
        loop {
            match &self.slots[i] {
                Slot::Node(_) => return Ok(i),
                Slot::Alias(next, name) => {
                    hops += 1;
                    if hops > self.slots.len() {
                        return Err(TermError::UnguardedBinding(name.clone()));
                    }
                    i = *next;
                }
                Slot::Pending(name) => return Err(TermError::UnguardedBinding(name.clone())),
            }
        }
    }

    fn finish(self, root: usize) -> Result<Term, TermError> {
        let mut resolved = vec![0; self.slots.len()];
        for (i, r) in resolved.iter_mut().enumerate() {
            *r = self.resolve(i)?;
        }
        let nodes = self
            .slots
            .iter()
            .map(|slot| match slot {
                Slot::Node(n) => Node {
                    label: n.label.clone(),
                    children: n.children.iter().map(|&c| resolved[c]).collect(),
                },
                // placeholders, unreachable after resolution
                _ => Node {
                    label: Label::Fun(CUT_MARKER.to_string()),
                    children: Vec::new(),
                },
            })
            .collect();
        Ok(TermGraph {
            nodes,
            root: resolved[root],
        }
        .minimize())
    }
}

/// Solve a guarded system of recursive equations and return its root.
pub fn make_term(
    bindings: &[(String, Expr)],
    root: &Expr,
    sig: &mut Signature,
) -> Result<Term, TermError> {
    let expr = if bindings.is_empty() {
        root.clone()
    } else {
        Expr::Rec(bindings.to_vec(), Box::new(root.clone()))
    };
    expr_to_term(&expr, sig)
}

pub fn expr_to_term(e: &Expr, sig: &mut Signature) -> Result<Term, TermError> {
    let mut builder = Builder {
        sig,
        slots: Vec::new(),
        scopes: Vec::new(),
    };
    let root = builder.build(e)?;
    builder.finish(root)
}
