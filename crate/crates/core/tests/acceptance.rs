//! Acceptance criteria 1 to 10, one PASS/FAIL line each.

mod common;

use std::path::PathBuf;
use std::process::Command;
use std::time::Instant;

use common::{corpus, saturating_budget, Instance, CORPUS_SIZE};
use infinir::cli::{run_check, Outcome};
use infinir::compress::{compress, emit_steps, validate_ored, CompressError};
use infinir::engine::{
    decide_ired, decide_nu, decide_nu_with_generator, search_proof, RelationKind, SearchBudget, Universe,
};
use infinir::proof::{extract_prefix, from_json, validate, Judgment, Justification, PremiseItem, ProofGraph};
use infinir::syntax::{parse_trs_file, Workspace};
use infinir::term::truncate;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn ws(text: &str) -> Workspace {
    parse_trs_file(text).expect("fixture parses")
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("infinir-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).expect("scratch dir");
    let path = dir.join(name);
    std::fs::write(&path, contents).expect("scratch file");
    path
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_infinir"))
}

const CW: &str = "term cw = rec X = C(X) in X\n";

fn criterion_1() -> Check {
    let text = format!("C(a) = a\n{CW}");
    let file = scratch("equation.trs", &text);
    let cert = file.with_file_name("equation.json");
    let status = bin()
        .args(["check", "--rel", "ieq", "--from", "cw", "--to", "a", "--emit"])
        .arg(&cert)
        .arg(&file)
        .output()
        .map_err(|e| e.to_string())?
        .status;
    ensure(status.code() == Some(0), format!("check exited with {status}"))?;
    let w = ws(&text);
    let p = from_json(&std::fs::read_to_string(&cert).map_err(|e| e.to_string())?, &w).map_err(|e| e.to_string())?;
    let (splits, lifts, back) = (p.count_rule("split"), p.count_rule("lift"), p.back_edges().len());
    ensure(
        (splits, lifts, back) == (1, 1, 1),
        format!("{splits} splits, {lifts} lifts, {back} back-edges"),
    )?;
    let verify = bin().arg("verify").arg(&file).arg(&cert).output().map_err(|e| e.to_string())?;
    ensure(verify.status.code() == Some(0), "verify rejected the certificate")?;
    Ok("1 split, 1 lift, 1 back-edge; verify exits 0".into())
}

fn criterion_2() -> Check {
    let w = ws(&format!("C(a) -> a\n{CW}"));
    let (cw, a) = (w.terms["cw"].clone(), w.resolve_term("a").map_err(|e| e.to_string())?);
    let b = SearchBudget::default();
    let bi = run_check(&w, RelationKind::Bi, &cw, &a, b, 64).map_err(|e| e.to_string())?;
    ensure(matches!(bi, Outcome::Proved { .. }), format!("bi: {}", bi.summary()))?;
    let ired = run_check(&w, RelationKind::Ired, &cw, &a, b, 64).map_err(|e| e.to_string())?;
    match ired {
        Outcome::Refuted { universe } if universe.len() == 3 && universe.is_exact() => {
            Ok("bi proved, ired refuted on a closed 3-term universe".into())
        }
        other => Err(format!("ired: {}", other.summary())),
    }
}

/// Nodes of `p` whose split has a root step right after marked lifts.
fn marked_feeding_step(p: &ProofGraph) -> Vec<usize> {
    let mut out = Vec::new();
    for n in &p.nodes {
        if let Justification::Split(items) = &n.rule {
            let mut marked = 0;
            for item in items {
                match item {
                    PremiseItem::Node(j) if p.nodes[*j].judgment == Judgment::DownFin => marked += 1,
                    PremiseItem::Step(_) if marked > 0 => {
                        out.push(marked);
                        marked = 0;
                    }
                    _ => marked = 0,
                }
            }
        }
    }
    out
}

fn criterion_3() -> Check {
    let b = SearchBudget::default();
    let omega = ws(&format!("a -> C(a)\n{CW}"));
    let a = omega.resolve_term("a").map_err(|e| e.to_string())?;
    let v = search_proof(&a, &omega.terms["cw"], RelationKind::Ired, &omega.trs, b);
    let p = v.certificate().ok_or("a to C^omega not proved")?;
    ensure(validate(p, &omega.trs).ok, "a to C^omega certificate invalid")?;

    let ex = ws("f(x,x) -> D\na -> C(a)\nb -> C(b)\n");
    let s = ex.resolve_term("f(a,b)").map_err(|e| e.to_string())?;
    let t = ex.resolve_term("D").map_err(|e| e.to_string())?;
    let v = search_proof(&s, &t, RelationKind::Ired, &ex.trs, b);
    let p = v.certificate().ok_or("f(a,b) to D not proved")?;
    ensure(validate(p, &ex.trs).ok, "f(a,b) certificate invalid")?;
    let marked = p.count_judgment(Judgment::DownFin);
    ensure(marked == 2, format!("{marked} marked lifts"))?;
    ensure(marked_feeding_step(p) == vec![2], "marked lifts do not feed a single root step")?;
    Ok("both proved; 2 marked lifts feed one root step".into())
}

fn criterion_4() -> Check {
    let b = SearchBudget::default();
    let eq = ws(&format!("a = f(a)\nb = f(b)\nC(b) = C(C(a))\n{CW}"));
    let r = |w: &Workspace, s: &str| w.resolve_term(s).map_err(|e| e.to_string());
    let o = run_check(&eq, RelationKind::Ieq, &r(&eq, "a")?, &r(&eq, "b")?, b, 64).map_err(|e| e.to_string())?;
    ensure(matches!(o, Outcome::Proved { .. }), format!("a = b: {}", o.summary()))?;
    let o = run_check(&eq, RelationKind::Ieq, &r(&eq, "C(a)")?, &eq.terms["cw"], b, 64).map_err(|e| e.to_string())?;
    ensure(matches!(o, Outcome::Proved { .. }), format!("C(a) = C^omega: {}", o.summary()))?;
    let rw = ws(&format!("a -> f(a)\nb -> f(b)\nC(b) -> C(C(a))\n{CW}"));
    let s = r(&rw, "C(a)")?;
    let v = search_proof(&s, &rw.terms["cw"], RelationKind::Ired, &rw.trs, b);
    ensure(!v.is_proved(), "C(a) ->> C^omega was proved")?;
    let o = run_check(&rw, RelationKind::Ired, &s, &rw.terms["cw"], b, 64).map_err(|e| e.to_string())?;
    match o {
        Outcome::Refuted { universe } => Ok(format!("equalities proved; reduction refuted on {} terms", universe.len())),
        Outcome::Unknown => Ok("equalities proved; reduction unknown (universe did not close)".into()),
        Outcome::Proved { .. } => Err("C(a) ->> C^omega proved".into()),
    }
}

struct Relations {
    ired: infinir::engine::PairRelation,
    bi: infinir::engine::PairRelation,
    ieq: infinir::engine::PairRelation,
    universes: [Universe; 3],
}

fn relations(inst: &Instance) -> Result<Relations, String> {
    let ui = inst.universe_for(RelationKind::Ired);
    let ub = inst.universe_for(RelationKind::Bi);
    let ue = inst.universe_for(RelationKind::Ieq);
    Ok(Relations {
        ired: decide_ired(&ui).map_err(|e| e.to_string())?,
        bi: decide_nu(&ub, RelationKind::Bi).map_err(|e| e.to_string())?,
        ieq: decide_nu(&ue, RelationKind::Ieq).map_err(|e| e.to_string())?,
        universes: [ui, ub, ue],
    })
}

fn criterion_5(corpus: &[Instance], rels: &[Relations]) -> Check {
    ensure(corpus.len() >= 50, format!("only {} closed instances", corpus.len()))?;
    for (k, (inst, r)) in corpus.iter().zip(rels).enumerate() {
        let ctx = |m: &str| format!("instance {k}: {m}\n{}", inst.text);
        ensure(r.ired.is_subset(&r.bi), ctx("ired not within bi"))?;
        ensure(r.bi.is_subset(&r.ieq), ctx("bi not within ieq"))?;
        ensure(r.ieq.is_equivalence(), ctx("ieq is not an equivalence"))?;
        ensure(r.bi.is_preorder(), ctx("bi is not a preorder"))?;
        ensure(r.ired.is_preorder(), ctx("ired is not a preorder"))?;
    }
    let sizes: Vec<usize> = corpus.iter().map(|i| i.universe.len()).collect();
    Ok(format!(
        "{} instances, universes of {} to {} terms",
        corpus.len(),
        sizes.iter().min().unwrap_or(&0),
        sizes.iter().max().unwrap_or(&0)
    ))
}

fn criterion_6(corpus: &[Instance], rels: &[Relations]) -> Check {
    for (k, r) in rels.iter().enumerate() {
        let again = decide_nu_with_generator(&r.universes[2], &r.ieq);
        ensure(again == r.ieq, format!("instance {k}: not idempotent\n{}", corpus[k].text))?;
    }
    Ok(format!("{} instances", rels.len()))
}

/// Search outcomes on every pair of every corpus universe.
struct Sweep {
    mismatches: Vec<String>,
    pairs: usize,
    ired_certs: Vec<(usize, ProofGraph)>,
}

fn sweep(corpus: &[Instance], rels: &[Relations]) -> Sweep {
    let budget = saturating_budget();
    let mut out = Sweep {
        mismatches: Vec::new(),
        pairs: 0,
        ired_certs: Vec::new(),
    };
    for (k, (inst, r)) in corpus.iter().zip(rels).enumerate() {
        let kinds = [
            (RelationKind::Ired, &r.ired, &r.universes[0]),
            (RelationKind::Bi, &r.bi, &r.universes[1]),
            (RelationKind::Ieq, &r.ieq, &r.universes[2]),
        ];
        for (kind, rel, u) in kinds {
            if !u.is_exact() {
                out.mismatches.push(format!("instance {k}: {kind} universe not exact"));
                continue;
            }
            for i in 0..u.len() {
                for j in 0..u.len() {
                    out.pairs += 1;
                    let v = search_proof(&u.terms[i], &u.terms[j], kind, &inst.ws.trs, budget);
                    if v.is_proved() != rel.contains(i, j) {
                        out.mismatches.push(format!(
                            "instance {k}: {kind} `{}` `{}` search {} solver {}",
                            u.terms[i],
                            u.terms[j],
                            v.is_proved(),
                            rel.contains(i, j)
                        ));
                    }
                    if kind == RelationKind::Ired {
                        if let Some(p) = v.certificate() {
                            out.ired_certs.push((k, p.clone()));
                        }
                    }
                }
            }
        }
    }
    out
}

fn criterion_7(corpus: &[Instance], sweep: &Sweep) -> Check {
    for (k, p) in &sweep.ired_certs {
        let trs = &corpus[*k].ws.trs;
        let (s, t) = p.goal_terms(p.root);
        for n in 0..=8 {
            let red = extract_prefix(p, trs, n).map_err(|e| format!("instance {k}: `{s}` `{t}` depth {n}: {e}"))?;
            let last = red.last_term(trs).map_err(|e| format!("instance {k}: replay failed: {e}"))?;
            ensure(
                truncate(&last, n) == truncate(t, n),
                format!("instance {k}: `{s}` `{t}` depth {n}: reached `{last}`"),
            )?;
        }
    }
    Ok(format!("{} certificates, depths 0 to 8", sweep.ired_certs.len()))
}

fn criterion_8(corpus: &[Instance], sweep: &Sweep) -> Check {
    let mut compressed = 0;
    for (k, p) in &sweep.ired_certs {
        let trs = &corpus[*k].ws.trs;
        if !trs.is_left_linear() {
            continue;
        }
        let (s, t) = p.goal_terms(p.root);
        let ctx = |m: String| format!("instance {k}: `{s}` `{t}`: {m}");
        let o = compress(p, trs).map_err(|e| ctx(e.to_string()))?;
        let stream = emit_steps(&o, 32);
        stream.replay(trs).map_err(|e| ctx(format!("replay failed: {e}")))?;
        for w in stream.steps.windows(2) {
            ensure(w[0].level <= w[1].level, ctx("levels decrease".into()))?;
        }
        for st in &stream.steps {
            ensure(st.position.depth() >= st.level, ctx(format!("step at {} below level {}", st.position, st.level)))?;
        }
        let report = validate_ored(&o, trs, 8);
        ensure(report.ok, ctx(format!("{:?}", report.violations)))?;
        compressed += 1;
    }
    let ex = ws("f(x,x) -> D\na -> C(a)\nb -> C(b)\n");
    let s = ex.resolve_term("f(a,b)").map_err(|e| e.to_string())?;
    let t = ex.resolve_term("D").map_err(|e| e.to_string())?;
    let p = search_proof(&s, &t, RelationKind::Ired, &ex.trs, SearchBudget::default());
    let p = p.certificate().ok_or("f(a,b) to D not proved")?;
    ensure(
        compress(p, &ex.trs) == Err(CompressError::NotLeftLinear),
        "non-left-linear system was compressed",
    )?;
    Ok(format!("{compressed} certificates compressed; non-left-linear system rejected"))
}

fn criterion_9() -> Check {
    let w = ws("f(x) -> x\nterm fw = rec X = f(X) in X\n");
    let terms = ["c", "f(c)", "f(f(c))", "fw"]
        .iter()
        .map(|s| w.resolve_term(s).map_err(|e| e.to_string()))
        .collect::<Result<Vec<_>, _>>()?;
    let u = Universe::from_terms(terms, &w.trs, RelationKind::Ieq);
    ensure(u.closed, "universe not closed")?;
    let r = decide_nu(&u, RelationKind::Ieq).map_err(|e| e.to_string())?;
    ensure(r.len() == 16, format!("{} of 16 pairs", r.len()))?;
    Ok("all 16 pairs related".into())
}

fn criterion_10(sweep: &Sweep) -> Check {
    if let Some(m) = sweep.mismatches.first() {
        return Err(format!("{} mismatches, first: {m}", sweep.mismatches.len()));
    }
    Ok(format!("{} pairs agree across the three relations", sweep.pairs))
}

fn main() {
    let start = Instant::now();
    let corpus = corpus();
    let rels: Vec<Relations> = corpus
        .iter()
        .map(|i| relations(i).unwrap_or_else(|e| panic!("solver failed: {e}\n{}", i.text)))
        .collect();
    let sweep = sweep(&corpus, &rels);
    let results: Vec<(&str, Check)> = vec![
        ("cyclic equality certificate", criterion_1()),
        ("bi-infinite versus infinitary separation", criterion_2()),
        ("limit and non-left-linear reductions", criterion_3()),
        ("conversion strictly weaker than equality", criterion_4()),
        ("inclusion chain on random systems", criterion_5(&corpus, &rels)),
        ("idempotence of equality", criterion_6(&corpus, &rels)),
        ("strong convergence of certificates", criterion_7(&corpus, &sweep)),
        ("compression", criterion_8(&corpus, &sweep)),
        ("collapsing rule relates everything", criterion_9()),
        ("search agrees with the solvers", criterion_10(&sweep)),
    ];
    let mut failed = 0;
    for (k, (name, r)) in results.iter().enumerate() {
        match r {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", k + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why}", k + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed ({CORPUS_SIZE} instance target, {:.1}s)",
        results.len() - failed,
        results.len(),
        start.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
