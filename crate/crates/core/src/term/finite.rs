use std::collections::BTreeSet;
use std::fmt;

use super::Term;

/// An ordinary well-founded term, possibly containing the cut marker `#`.
///
/// Used for truncation images and for rule left-hand sides.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FiniteTerm {
    Cut,
    Var(String),
    App(String, Vec<FiniteTerm>),
}

impl FiniteTerm {
    pub fn constant(name: &str) -> FiniteTerm {
        FiniteTerm::App(name.to_string(), Vec::new())
    }

    pub fn app(name: &str, args: Vec<FiniteTerm>) -> FiniteTerm {
        FiniteTerm::App(name.to_string(), args)
    }

    pub fn var(name: &str) -> FiniteTerm {
        FiniteTerm::Var(name.to_string())
    }

    /// Height of the tree; constants and variables have depth 0.
    pub fn depth(&self) -> usize {
        match self {
            FiniteTerm::Cut | FiniteTerm::Var(_) => 0,
            FiniteTerm::App(_, args) if args.is_empty() => 0,
            FiniteTerm::App(_, args) => 1 + args.iter().map(|a| a.depth()).max().unwrap_or(0),
        }
    }

    pub fn contains_cut(&self) -> bool {
        match self {
            FiniteTerm::Cut => true,
            FiniteTerm::Var(_) => false,
            FiniteTerm::App(_, args) => args.iter().any(|a| a.contains_cut()),
        }
    }

    pub fn variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out, &mut Vec::new());
        out
    }

    /// Variables occurring more than once.
    pub fn repeated_variables(&self) -> BTreeSet<String> {
        let mut all = Vec::new();
        self.collect_vars(&mut BTreeSet::new(), &mut all);
        all.sort();
        all.windows(2)
            .filter(|w| w[0] == w[1])
            .map(|w| w[0].clone())
            .collect()
    }

    fn collect_vars(&self, set: &mut BTreeSet<String>, all: &mut Vec<String>) {
        match self {
            FiniteTerm::Cut => {}
            FiniteTerm::Var(x) => {
                set.insert(x.clone());
                all.push(x.clone());
            }
            FiniteTerm::App(_, args) => args.iter().for_each(|a| a.collect_vars(set, all)),
        }
    }

    /// Embed into rational terms; `None` if the term contains `#`.
    pub fn to_term(&self) -> Option<Term> {
        match self {
            FiniteTerm::Cut => None,
            FiniteTerm::Var(x) => Some(Term::var(x)),
            FiniteTerm::App(f, args) => Some(Term::app(
                f,
                args.iter().map(|a| a.to_term()).collect::<Option<Vec<_>>>()?,
            )),
        }
    }

    /// Read back a finite rational term; `None` if the term is cyclic.
    pub fn from_term(t: &Term) -> Option<FiniteTerm> {
        if !t.is_finite() {
            return None;
        }
        fn go(t: &Term, node: usize) -> FiniteTerm {
            let nd = &t.nodes[node];
            match &nd.label {
                super::Label::Var(x) => FiniteTerm::Var(x.clone()),
                super::Label::Fun(f) => {
                    FiniteTerm::App(f.clone(), nd.children.iter().map(|&c| go(t, c)).collect())
                }
            }
        }
        Some(go(t, 0))
    }
}

impl fmt::Display for FiniteTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FiniteTerm::Cut => write!(f, "{}", super::CUT_MARKER),
            FiniteTerm::Var(x) => write!(f, "{x}"),
            FiniteTerm::App(name, args) if args.is_empty() => write!(f, "{name}"),
            FiniteTerm::App(name, args) => {
                write!(f, "{name}(")?;
                for (k, a) in args.iter().enumerate() {
                    if k > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
        }
    }
}
