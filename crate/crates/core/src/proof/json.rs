use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Judgment, Justification, PremiseItem, ProofError, ProofGraph, ProofNode, StepItem};
use crate::engine::RelationKind;
use crate::syntax::Workspace;
use crate::trs::Direction;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Doc {
    kind: String,
    terms: Vec<String>,
    nodes: Vec<NodeDoc>,
    root: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NodeDoc {
    judgment: String,
    goal: [usize; 2],
    rule: String,
    premise: Vec<ItemDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum ItemDoc {
    Step(StepDoc),
    Node(usize),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StepDoc {
    rule_index: usize,
    direction: String,
    sigma: BTreeMap<String, usize>,
    source: usize,
    target: usize,
}

pub fn to_json(p: &ProofGraph) -> String {
    let doc = Doc {
        kind: p.kind.name().to_string(),
        terms: p.terms.iter().map(|t| t.to_string()).collect(),
        nodes: p
            .nodes
            .iter()
            .map(|n| NodeDoc {
                judgment: n.judgment.name().to_string(),
                goal: [n.goal.0, n.goal.1],
                rule: n.rule.name().to_string(),
                premise: match &n.rule {
                    Justification::Split(items) => items
                        .iter()
                        .map(|i| match i {
                            PremiseItem::Step(s) => ItemDoc::Step(StepDoc {
                                rule_index: s.rule,
                                direction: s.direction.to_string(),
                                sigma: s.sigma.clone(),
                                source: s.source,
                                target: s.target,
                            }),
                            PremiseItem::Node(k) => ItemDoc::Node(*k),
                        })
                        .collect(),
                    Justification::Lift(children) => children.iter().map(|&k| ItemDoc::Node(k)).collect(),
                    Justification::Id => Vec::new(),
                },
            })
            .collect(),
        root: p.root,
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
    s.push('\n');
    s
}

fn format_err(msg: impl Into<String>) -> ProofError {
    ProofError::Format(msg.into())
}

/// Parse a certificate; term expressions are read against `ws`.
pub fn from_json(text: &str, ws: &Workspace) -> Result<ProofGraph, ProofError> {
    let doc: Doc = serde_json::from_str(text).map_err(|e| format_err(e.to_string()))?;
    let kind: RelationKind = doc.kind.parse().map_err(format_err)?;
    let mut terms = Vec::new();
    for (i, src) in doc.terms.iter().enumerate() {
        let t = ws
            .resolve_term(src)
            .map_err(|e| format_err(format!("term {i}: {e}")))?;
        terms.push(t);
    }
    let mut nodes = Vec::new();
    for (k, n) in doc.nodes.into_iter().enumerate() {
        let judgment = match n.judgment.as_str() {
            "rel" => Judgment::Rel,
            "down" => Judgment::Down,
            "downfin" => Judgment::DownFin,
            other => return Err(format_err(format!("node {k}: unknown judgment `{other}`"))),
        };
        let node_refs = |items: Vec<ItemDoc>| -> Result<Vec<usize>, ProofError> {
            items
                .into_iter()
                .map(|i| match i {
                    ItemDoc::Node(j) => Ok(j),
                    ItemDoc::Step(_) => Err(format_err(format!("node {k}: step in a lift premise"))),
                })
                .collect()
        };
        let rule = match n.rule.as_str() {
            "split" => Justification::Split(
                n.premise
                    .into_iter()
                    .map(|i| match i {
                        ItemDoc::Node(j) => Ok(PremiseItem::Node(j)),
                        ItemDoc::Step(s) => Ok(PremiseItem::Step(StepItem {
                            rule: s.rule_index,
                            direction: match s.direction.as_str() {
                                "fwd" => Direction::Fwd,
                                "bwd" => Direction::Bwd,
                                d => return Err(format_err(format!("node {k}: unknown direction `{d}`"))),
                            },
                            sigma: s.sigma,
                            source: s.source,
                            target: s.target,
                        })),
                    })
                    .collect::<Result<_, _>>()?,
            ),
            "lift" => Justification::Lift(node_refs(n.premise)?),
            "id" if n.premise.is_empty() => Justification::Id,
            "id" => return Err(format_err(format!("node {k}: id with premises"))),
            other => return Err(format_err(format!("node {k}: unknown rule `{other}`"))),
        };
        nodes.push(ProofNode {
            judgment,
            goal: (n.goal[0], n.goal[1]),
            rule,
        });
    }
    Ok(ProofGraph {
        kind,
        terms,
        nodes,
        root: doc.root,
    })
}
