use std::collections::{BTreeSet, HashMap, VecDeque};

use super::RelationKind;
use crate::term::{Label, Term};
use crate::trs::{oriented_root_steps, Direction, Trs};

/// A root step between two members of a universe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Edge {
    pub target: usize,
    pub rule: usize,
    pub direction: Direction,
}

/// A finite carrier of canonical terms for exact fixed-point solving.
#[derive(Debug, Clone)]
pub struct Universe {
    pub terms: Vec<Term>,
    /// Root-step targets and root children of all members are members.
    pub closed: bool,
    /// Every ground pattern whose root symbol heads some member is a member,
    /// and all patterns are ground. Together with `closed` this makes the
    /// solvers exact for the pairs of the universe.
    pub redex_complete: bool,
    pub edges: Vec<Vec<Edge>>,
    children: Vec<Vec<Option<usize>>>,
    index: HashMap<Term, usize>,
}

impl Universe {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn index_of(&self, t: &Term) -> Option<usize> {
        self.index.get(t).copied()
    }

    /// Member indices of the root arguments of term `i`, `None` outside.
    pub fn children(&self, i: usize) -> &[Option<usize>] {
        &self.children[i]
    }

    /// Closed and redex-complete: negative answers are trustworthy.
    pub fn is_exact(&self) -> bool {
        self.closed && self.redex_complete
    }

    /// Build from an explicit term set, computing edges and the closure flags.
    pub fn from_terms(terms: Vec<Term>, trs: &Trs, kind: RelationKind) -> Universe {
        let mut u = Universe {
            terms: Vec::new(),
            closed: false,
            redex_complete: false,
            edges: Vec::new(),
            children: Vec::new(),
            index: HashMap::new(),
        };
        for t in terms {
            u.insert(t);
        }
        u.finish(trs, kind);
        u
    }

    fn insert(&mut self, t: Term) -> (usize, bool) {
        if let Some(&i) = self.index.get(&t) {
            return (i, false);
        }
        self.index.insert(t.clone(), self.terms.len());
        self.terms.push(t);
        (self.terms.len() - 1, true)
    }

    fn finish(&mut self, trs: &Trs, kind: RelationKind) {
        let n = self.terms.len();
        let mut closed = true;
        self.edges = vec![Vec::new(); n];
        self.children = vec![Vec::new(); n];
        for i in 0..n {
            let t = self.terms[i].clone();
            for step in oriented_root_steps(&t, trs, kind.symmetric()) {
                match self.index.get(&step.target) {
                    Some(&j) => self.edges[i].push(Edge {
                        target: j,
                        rule: step.rule,
                        direction: step.direction,
                    }),
                    None => closed = false,
                }
            }
            self.children[i] = t.args().iter().map(|a| self.index.get(a).copied()).collect();
            closed &= self.children[i].iter().all(Option::is_some);
        }
        self.closed = closed;
        self.redex_complete = trs.patterns_ground(kind.symmetric())
            && ground_patterns(trs, kind)
                .iter()
                .all(|p| !self.heads().contains(&head(p)) || self.index.contains_key(p));
    }

    fn heads(&self) -> BTreeSet<(Label, usize)> {
        self.terms.iter().map(head).collect()
    }
}

fn head(t: &Term) -> (Label, usize) {
    (t.root_label().clone(), t.arity())
}

fn ground_patterns(trs: &Trs, kind: RelationKind) -> Vec<Term> {
    let mut out = Vec::new();
    for r in &trs.rules {
        if r.lhs.variables().is_empty() {
            out.push(r.lhs_term().clone());
        }
        if kind.symmetric() {
            if let Some(t) = r.reversed_lhs().and_then(|l| l.to_term()) {
                if t.is_ground() {
                    out.push(t);
                }
            } else if r.ground_rational_rhs() {
                out.push(r.rhs.clone());
            }
        }
    }
    out
}

/// Saturate `seeds` under root steps (both orientations for `Ieq`), root
/// children and ground patterns, up to `budget` terms.
pub fn close_universe(seeds: &[Term], trs: &Trs, kind: RelationKind, budget: usize) -> Universe {
    let mut u = Universe::from_terms(Vec::new(), trs, kind);
    let patterns = ground_patterns(trs, kind);
    let mut queue: VecDeque<Term> = seeds.iter().cloned().collect();
    let mut heads = BTreeSet::new();
    let mut overflow = false;
    'outer: loop {
        while let Some(t) = queue.pop_front() {
            if u.index.contains_key(&t) {
                continue;
            }
            if u.len() >= budget {
                overflow = true;
                break 'outer;
            }
            u.insert(t.clone());
            heads.insert(head(&t));
            for step in oriented_root_steps(&t, trs, kind.symmetric()) {
                queue.push_back(step.target);
            }
            queue.extend(t.args());
        }
        let missing: Vec<Term> = patterns
            .iter()
            .filter(|p| heads.contains(&head(p)) && !u.index.contains_key(*p))
            .cloned()
            .collect();
        if missing.is_empty() {
            break;
        }
        queue.extend(missing);
    }
    u.finish(trs, kind);
    if overflow {
        u.closed = false;
        u.redex_complete = false;
    }
    u
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_trs_file;

    #[test]
    fn equation_closes_to_three_terms() {
        let ws = parse_trs_file("C(a) = a\nterm cw = rec X = C(X) in X").unwrap();
        let seeds = [ws.terms["cw"].clone(), ws.resolve_term("a").unwrap()];
        let u = close_universe(&seeds, &ws.trs, RelationKind::Ieq, 16);
        assert!(u.closed && u.redex_complete);
        assert_eq!(u.len(), 3);
        assert!(u.index_of(&ws.resolve_term("C(a)").unwrap()).is_some());
    }

    #[test]
    fn infinite_side_of_equation_is_used_backwards() {
        let ws = parse_trs_file("a = rec X = C(X) in X\nterm cw = rec X = C(X) in X").unwrap();
        let u = close_universe(&[ws.terms["cw"].clone()], &ws.trs, RelationKind::Ieq, 16);
        assert!(u.is_exact());
        assert!(u.index_of(&ws.resolve_term("a").unwrap()).is_some());
    }

    #[test]
    fn rule_universe_with_pattern_completion() {
        let ws = parse_trs_file("C(a) -> a\nterm cw = rec X = C(X) in X").unwrap();
        let seeds = [ws.terms["cw"].clone(), ws.resolve_term("a").unwrap()];
        let u = close_universe(&seeds, &ws.trs, RelationKind::Ired, 16);
        assert!(u.is_exact());
        assert_eq!(u.len(), 3);
    }

    #[test]
    fn growing_universe_hits_budget() {
        // a -> C(a) saturates: the child of C(a) is a again
        let ws = parse_trs_file("a -> C(a)").unwrap();
        let u = close_universe(&[ws.resolve_term("a").unwrap()], &ws.trs, RelationKind::Bi, 10);
        assert!(u.closed);
        assert_eq!(u.len(), 2);
        let ws = parse_trs_file("C(x) -> C(C(x))").unwrap();
        let u = close_universe(&[ws.resolve_term("C(a)").unwrap()], &ws.trs, RelationKind::Bi, 10);
        assert!(!u.closed);
        assert_eq!(u.len(), 10);
    }

    #[test]
    fn normal_form_universe() {
        let ws = parse_trs_file("f(x,x) -> D\na -> C(a)\nb -> C(b)").unwrap();
        let u = close_universe(&[ws.resolve_term("D").unwrap()], &ws.trs, RelationKind::Ired, 4);
        assert!(u.closed);
        assert_eq!(u.len(), 1);
        assert!(!u.redex_complete);
    }

    #[test]
    fn manual_universe_flags() {
        let ws = parse_trs_file("f(x) -> x\nterm w = rec X = f(X) in X").unwrap();
        let terms: Vec<Term> = ["c", "f(c)", "f(f(c))", "w"]
            .iter()
            .map(|s| ws.resolve_term(s).unwrap())
            .collect();
        let u = Universe::from_terms(terms, &ws.trs, RelationKind::Ieq);
        assert!(u.closed);
        assert_eq!(u.edges[3], vec![Edge { target: 3, rule: 0, direction: Direction::Fwd }]);
    }
}
