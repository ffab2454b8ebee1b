use super::{validate, Justification, PremiseItem, ProofError, ProofGraph};
use crate::engine::RelationKind;
use crate::term::{truncate, Position, Term};
use crate::trs::{match_root, step_at, FiniteReduction, ReductionStep, Trs};

const MAX_SLACK: usize = 8;
const MAX_STEPS: usize = 200_000;

struct Replay<'a> {
    p: &'a ProofGraph,
    trs: &'a Trs,
    slack: usize,
    cur: Term,
    steps: Vec<ReductionStep>,
}

impl Replay<'_> {
    fn rel(&mut self, k: usize, m: usize, pos: &Position) -> Option<()> {
        if m == 0 {
            return Some(());
        }
        let Justification::Split(items) = &self.p.nodes[k].rule else {
            return None;
        };
        self.items(items, m, true, pos)
    }

    /// Replay `items` so that the result agrees with their end up to depth
    /// `m`. When `with_final` is set the last item is the final lift.
    fn items(&mut self, items: &[PremiseItem], m: usize, with_final: bool, pos: &Position) -> Option<()> {
        // agreement needed before each item so that later root steps match
        let mut depths = vec![0; items.len()];
        let mut need = m;
        for (i, item) in items.iter().enumerate().rev() {
            match item {
                PremiseItem::Step(s) => {
                    let d = self.trs.rule(s.rule).ok()?.lhs.depth();
                    need = (need + d).max(d + 1);
                }
                PremiseItem::Node(_) if with_final && i + 1 == items.len() => depths[i] = m - 1,
                PremiseItem::Node(_) => depths[i] = need - 1 + self.slack,
            }
        }
        for (item, depth) in items.iter().zip(depths) {
            match item {
                PremiseItem::Step(s) => self.step(pos, s.rule)?,
                PremiseItem::Node(j) => self.lift(*j, depth, pos)?,
            }
        }
        Some(())
    }

    fn lift(&mut self, k: usize, depth: usize, pos: &Position) -> Option<()> {
        if let Justification::Lift(children) = &self.p.nodes[k].rule {
            for (i, &c) in children.iter().enumerate() {
                self.rel(c, depth, &pos.child(i + 1))?;
            }
        }
        Some(())
    }

    fn step(&mut self, pos: &Position, rule: usize) -> Option<()> {
        if self.steps.len() >= MAX_STEPS {
            return None;
        }
        let sub = self.cur.subterm_at(pos).ok()?;
        let sigma = match_root(&self.trs.rule(rule).ok()?.lhs, &sub)?;
        self.cur = step_at(&self.cur, pos, rule, self.trs).ok()?;
        self.steps.push(ReductionStep {
            position: pos.clone(),
            rule,
            sigma,
        });
        Some(())
    }
}

/// Replay a prefix of a split at the root of `start`, approximating marked
/// lifts deeply enough for the following root steps and for the root symbol
/// of the result. Returns the reached term and the steps taken.
pub(crate) fn replay_split_prefix(
    p: &ProofGraph,
    trs: &Trs,
    items: &[PremiseItem],
    slack: usize,
    start: &Term,
) -> Option<(Term, Vec<ReductionStep>)> {
    let mut r = Replay {
        p,
        trs,
        slack,
        cur: start.clone(),
        steps: Vec::new(),
    };
    r.items(items, 1, false, &Position::root())?;
    Some((r.cur, r.steps))
}

/// A finite reduction from the certificate's source whose result agrees with
/// its target up to depth `n`.
pub fn extract_prefix(p: &ProofGraph, trs: &Trs, n: usize) -> Result<FiniteReduction, ProofError> {
    if p.kind != RelationKind::Ired {
        return Err(ProofError::InvalidCertificate(format!(
            "prefix extraction needs an ired certificate, got {}",
            p.kind
        )));
    }
    let report = validate(p, trs);
    if !report.ok {
        return Err(ProofError::InvalidCertificate(report.to_string().trim_end().to_string()));
    }
    let (s, t) = p.goal_terms(p.root);
    let wanted = truncate(t, n);
    for slack in 0..=MAX_SLACK {
        let mut r = Replay {
            p,
            trs,
            slack,
            cur: s.clone(),
            steps: Vec::new(),
        };
        if r.rel(p.root, n, &Position::root()).is_some() && truncate(&r.cur, n) == wanted {
            return Ok(FiniteReduction {
                start: s.clone(),
                steps: r.steps,
            });
        }
    }
    Err(ProofError::InvalidCertificate(format!(
        "no finite reduction reaching depth {n} could be replayed"
    )))
}
