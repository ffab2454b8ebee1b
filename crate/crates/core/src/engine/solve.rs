use super::{lift, EngineError, PairRelation, RelationKind, Universe};
use crate::trs::Direction;

/// Root-step edges of the universe as a relation; symmetric for `Ieq`.
pub fn generator(u: &Universe, kind: RelationKind) -> PairRelation {
    let mut g = PairRelation::empty(u.len());
    for (i, edges) in u.edges.iter().enumerate() {
        for e in edges {
            if kind.symmetric() {
                g.insert(i, e.target);
                g.insert(e.target, i);
            } else if e.direction == Direction::Fwd {
                g.insert(i, e.target);
            }
        }
    }
    g
}

/// Greatest fixed point of `R ↦ (gen ∪ lift R)*`.
pub fn decide_nu(u: &Universe, kind: RelationKind) -> Result<PairRelation, EngineError> {
    if kind == RelationKind::Ired {
        return Err(EngineError::UnsupportedKind(kind));
    }
    if !u.closed {
        return Err(EngineError::UniverseNotClosed);
    }
    Ok(decide_nu_with_generator(u, &generator(u, kind)))
}

/// As [`decide_nu`] with an explicit generator relation.
pub fn decide_nu_with_generator(u: &Universe, gen: &PairRelation) -> PairRelation {
    nu_fixpoint(u, gen, None)
}

/// Greatest fixed point with split sequences of length at most `bound`.
pub(crate) fn nu_fixpoint(u: &Universe, gen: &PairRelation, bound: Option<usize>) -> PairRelation {
    let mut r = PairRelation::full(u.len());
    loop {
        let next = gen.union(&lift(&r, u)).star_bounded(bound);
        if next == r {
            return r;
        }
        r = next;
    }
}

/// `μR. νS. (→ε ∪ lift R)* ; lift S`.
pub fn decide_ired(u: &Universe) -> Result<PairRelation, EngineError> {
    if !u.closed {
        return Err(EngineError::UniverseNotClosed);
    }
    let levels = ired_levels(u, None);
    Ok(levels
        .last()
        .cloned()
        .unwrap_or_else(|| PairRelation::empty(u.len())))
}

/// The increasing approximants `R_1 ⊆ R_2 ⊆ …` of the least fixed point,
/// ending with the fixed point itself. With a bound, split sequences have at
/// most `bound` items including the final lift.
pub(crate) fn ired_levels(u: &Universe, bound: Option<usize>) -> Vec<PairRelation> {
    let n = u.len();
    let gen = generator(u, RelationKind::Bi);
    let prefix_bound = bound.map(|b| b.saturating_sub(1));
    let mut levels = Vec::new();
    let mut r = PairRelation::empty(n);
    loop {
        let prefix = gen.union(&lift(&r, u)).star_bounded(prefix_bound);
        let mut s = PairRelation::full(n);
        loop {
            let next = prefix.compose(&lift(&s, u));
            if next == s {
                break;
            }
            s = next;
        }
        if s == r {
            return levels;
        }
        levels.push(s.clone());
        r = s;
    }
}

pub fn decide(u: &Universe, kind: RelationKind) -> Result<PairRelation, EngineError> {
    match kind {
        RelationKind::Ired => decide_ired(u),
        _ => decide_nu(u, kind),
    }
}
