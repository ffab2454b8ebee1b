//! Command-line surface.
//!
//! Every command takes a rule file as its first argument. Rule files hold one
//! item per line:
//!
//! ```text
//! # comment
//! vars x y                      optional; otherwise [u-z][0-9']* are variables
//! C(a) -> a                     rewrite rule
//! C(a) = a                      equation (a file uses only one of the two)
//! term cw = rec X = C(X) in X   named term
//! ```
//!
//! Term expressions:
//!
//! ```text
//! expr  ::= ident | ident "(" expr ("," expr)* ")" | "rec" binds "in" expr
//! binds ::= ident "=" expr ("and" ident "=" expr)*
//! ```
//!
//! Exit codes: 0 proved / valid, 1 refuted / invalid, 2 unknown,
//! 3 input errors, 4 semantic errors.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use thiserror::Error;

use crate::compress::{compress_with_budget, emit_steps, format_steps, ored_to_json, CompressError, OredCertificate};
use crate::engine::{close_universe, decide, search_proof, EngineError, PairRelation, RelationKind, SearchBudget, Universe};
use crate::proof::{from_json, to_dot, to_json, validate, Justification, PremiseItem, ProofError, ProofGraph};
use crate::syntax::{parse_trs_file, Mode, ParseError, Workspace};
use crate::term::{distance, truncate, Term};
use crate::trs::TrsError;

pub const EXIT_PROVED: u8 = 0;
pub const EXIT_REFUTED: u8 = 1;
pub const EXIT_UNKNOWN: u8 = 2;
pub const EXIT_INPUT: u8 = 3;
pub const EXIT_SEMANTIC: u8 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Parse(#[from] ParseError),
    #[error("relation {rel} needs {wanted}, but the file is {found}")]
    Mode { rel: RelationKind, wanted: &'static str, found: &'static str },
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Engine(#[from] EngineError),
    #[error("{0}")]
    Proof(#[from] ProofError),
    #[error("{}: {}", .0.code(), .0)]
    Compress(#[from] CompressError),
    #[error("{0}")]
    Rewrite(#[from] TrsError),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } | CliError::Parse(_) | CliError::Mode { .. } | CliError::Usage(_) => EXIT_INPUT,
            _ => EXIT_SEMANTIC,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "infinir", version, about = "Infinitary rewriting over rational terms")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide or search a relation between two terms.
    Check(CheckArgs),
    /// Like `check`, always emitting the certificate.
    Prove(CheckArgs),
    /// Validate a certificate file.
    Verify { file: PathBuf, certificate: PathBuf },
    /// Compress an infinitary reduction to length at most omega.
    Compress(CompressArgs),
    /// Print the truncation of a term.
    Unfold {
        file: PathBuf,
        term: String,
        #[arg(long)]
        depth: usize,
    },
    /// Print the distance between two terms.
    Distance { file: PathBuf, left: String, right: String },
    /// Render a certificate file as Graphviz.
    Dot { file: PathBuf, certificate: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Rel {
    Ieq,
    Bi,
    Ired,
}

impl From<Rel> for RelationKind {
    fn from(r: Rel) -> Self {
        match r {
            Rel::Ieq => RelationKind::Ieq,
            Rel::Bi => RelationKind::Bi,
            Rel::Ired => RelationKind::Ired,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Dot,
    Text,
}

#[derive(Debug, Clone, Args)]
pub struct BudgetArgs {
    #[arg(long, default_value_t = 10_000)]
    pub budget_goals: usize,
    #[arg(long, default_value_t = 8)]
    pub budget_split: usize,
    #[arg(long, default_value_t = 256)]
    pub budget_nodes: usize,
    #[arg(long, default_value_t = 64)]
    pub universe_budget: usize,
}

impl BudgetArgs {
    pub fn search(&self) -> Result<SearchBudget, CliError> {
        if self.budget_goals == 0 || self.budget_split == 0 || self.budget_nodes == 0 || self.universe_budget == 0 {
            return Err(CliError::Usage("budgets must be positive".into()));
        }
        Ok(SearchBudget {
            max_goals: self.budget_goals,
            max_split: self.budget_split,
            max_new_term_nodes: self.budget_nodes,
        })
    }
}

#[derive(Debug, Clone, Args)]
pub struct CheckArgs {
    pub file: PathBuf,
    #[arg(long, value_enum)]
    pub rel: Rel,
    #[arg(long)]
    pub from: String,
    #[arg(long)]
    pub to: String,
    #[command(flatten)]
    pub budget: BudgetArgs,
    #[arg(long)]
    pub emit: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct CompressArgs {
    pub file: PathBuf,
    /// Certificate file; without it one is searched for `--from`/`--to`.
    #[arg(long)]
    pub cert: Option<PathBuf>,
    #[arg(long)]
    pub from: Option<String>,
    #[arg(long)]
    pub to: Option<String>,
    /// Print the first K steps instead of the compressed certificate.
    #[arg(long)]
    pub steps: Option<usize>,
    #[command(flatten)]
    pub budget: BudgetArgs,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

/// Result of `check`.
#[derive(Debug, Clone)]
pub enum Outcome {
    Proved {
        certificate: Option<Box<ProofGraph>>,
        /// Solver relation with its universe, when the answer is exact.
        relation: Option<(Universe, PairRelation)>,
    },
    Refuted { universe: Universe },
    Unknown,
}

impl Outcome {
    pub fn exit_code(&self) -> u8 {
        match self {
            Outcome::Proved { .. } => EXIT_PROVED,
            Outcome::Refuted { .. } => EXIT_REFUTED,
            Outcome::Unknown => EXIT_UNKNOWN,
        }
    }

    pub fn summary(&self) -> String {
        match self {
            Outcome::Proved { relation: Some((u, _)), .. } => format!("proved (exact, {} terms)", u.len()),
            Outcome::Proved { .. } => "proved (search)".to_string(),
            Outcome::Refuted { universe } => format!("refuted (exact, {} terms)", universe.len()),
            Outcome::Unknown => "unknown".to_string(),
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_workspace(path: &Path) -> Result<Workspace, CliError> {
    Ok(parse_trs_file(&read(path)?)?)
}

fn check_mode(ws: &Workspace, kind: RelationKind) -> Result<(), CliError> {
    let (wanted, ok) = match kind {
        RelationKind::Ieq => ("equations", ws.mode != Some(Mode::Rewriting)),
        _ => ("rewrite rules", ws.mode != Some(Mode::Equational)),
    };
    if ok {
        return Ok(());
    }
    let found = match ws.mode {
        Some(Mode::Equational) => "equational",
        _ => "a rewrite system",
    };
    Err(CliError::Mode {
        rel: kind,
        wanted,
        found,
    })
}

/// Close a universe over both terms; answer exactly when it is exact,
/// otherwise search for a certificate.
pub fn run_check(
    ws: &Workspace,
    kind: RelationKind,
    s: &Term,
    t: &Term,
    budget: SearchBudget,
    universe_budget: usize,
) -> Result<Outcome, CliError> {
    check_mode(ws, kind)?;
    let u = close_universe(&[s.clone(), t.clone()], &ws.trs, kind, universe_budget);
    if u.is_exact() {
        let r = decide(&u, kind)?;
        let (i, j) = (u.index_of(s), u.index_of(t));
        let (Some(i), Some(j)) = (i, j) else {
            unreachable!("seeds belong to their universe");
        };
        if !r.contains(i, j) {
            return Ok(Outcome::Refuted { universe: u });
        }
        let certificate = match search_proof(s, t, kind, &ws.trs, budget) {
            crate::engine::Verdict::Proved(p) => Some(p),
            crate::engine::Verdict::Unknown => None,
        };
        return Ok(Outcome::Proved {
            certificate,
            relation: Some((u, r)),
        });
    }
    Ok(match search_proof(s, t, kind, &ws.trs, budget) {
        crate::engine::Verdict::Proved(p) => Outcome::Proved {
            certificate: Some(p),
            relation: None,
        },
        crate::engine::Verdict::Unknown => Outcome::Unknown,
    })
}

/// One line per node: index, judgment, goal, rule and premises.
pub fn proof_to_text(p: &ProofGraph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} certificate, root {}", p.kind, p.root);
    for (k, n) in p.nodes.iter().enumerate() {
        let (s, t) = p.goal_terms(k);
        let _ = write!(out, "{k}: {} {s} ~ {t} by {}", n.judgment.name(), n.rule.name());
        match &n.rule {
            Justification::Split(items) => {
                for item in items {
                    match item {
                        PremiseItem::Step(st) => {
                            let _ = write!(out, " [{} {} {}]", st.rule, st.direction, p.terms[st.target]);
                        }
                        PremiseItem::Node(j) => {
                            let _ = write!(out, " {j}");
                        }
                    }
                }
            }
            Justification::Lift(children) => {
                for j in children {
                    let _ = write!(out, " {j}");
                }
            }
            Justification::Id => {}
        }
        out.push('\n');
    }
    out
}

fn relation_dump(kind: RelationKind, u: &Universe, r: &PairRelation, format: Format) -> String {
    match format {
        Format::Json => {
            let doc = json!({
                "kind": kind.name(),
                "terms": u.terms.iter().map(|t| t.to_string()).collect::<Vec<_>>(),
                "pairs": r.pairs().collect::<Vec<_>>(),
            });
            let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
            s.push('\n');
            s
        }
        _ => {
            let mut out = String::new();
            for (i, j) in r.pairs() {
                let _ = writeln!(out, "{}  {}", u.terms[i], u.terms[j]);
            }
            out
        }
    }
}

fn render(p: &ProofGraph, format: Format) -> String {
    match format {
        Format::Json => to_json(p),
        Format::Dot => to_dot(p),
        Format::Text => proof_to_text(p),
    }
}

fn ored_to_text(o: &OredCertificate) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "root {}", o.root);
    for (k, n) in o.nodes.iter().enumerate() {
        let _ = write!(out, "{k}: {} ->> {} head", n.source, n.target);
        for (pos, rule) in &n.head {
            let _ = write!(out, " {pos}:{rule}");
        }
        let _ = write!(out, " children");
        for c in &n.children {
            match c {
                crate::compress::OredChild::Node(j) => {
                    let _ = write!(out, " {j}");
                }
                crate::compress::OredChild::Stop => out.push_str(" stop"),
            }
        }
        out.push('\n');
    }
    out
}

fn execute(cli: Cli, out: &mut dyn Write) -> Result<u8, CliError> {
    let mut text = String::new();
    let code = match cli.command {
        Command::Check(a) => {
            let outcome = check(&a)?;
            let _ = writeln!(text, "{}", outcome.summary());
            if let (Some(path), Outcome::Proved { certificate: Some(p), .. }) = (&a.emit, &outcome) {
                write_file(path, &render(p, a.format))?;
            }
            outcome.exit_code()
        }
        Command::Prove(a) => {
            let outcome = check(&a)?;
            let kind = RelationKind::from(a.rel);
            let doc = match &outcome {
                Outcome::Proved { certificate: Some(p), .. } => Some(render(p, a.format)),
                Outcome::Proved { relation: Some((u, r)), .. } => Some(relation_dump(kind, u, r, a.format)),
                _ => None,
            };
            match (doc, &a.emit) {
                (Some(d), Some(path)) => {
                    write_file(path, &d)?;
                    let _ = writeln!(text, "{}", outcome.summary());
                }
                (Some(d), None) => text.push_str(&d),
                (None, _) => {
                    let _ = writeln!(text, "{}", outcome.summary());
                }
            }
            outcome.exit_code()
        }
        Command::Verify { file, certificate } => {
            let ws = load_workspace(&file)?;
            let doc = read(&certificate)?;
            match from_json(&doc, &ws) {
                Ok(p) => {
                    let report = validate(&p, &ws.trs);
                    text.push_str(&report.to_string());
                    if report.ok {
                        EXIT_PROVED
                    } else {
                        EXIT_REFUTED
                    }
                }
                Err(e) => {
                    let _ = writeln!(text, "invalid: {e}");
                    EXIT_REFUTED
                }
            }
        }
        Command::Compress(a) => {
            let ws = load_workspace(&a.file)?;
            let budget = a.budget.search()?;
            if !ws.trs.is_left_linear() {
                return Err(CompressError::NotLeftLinear.into());
            }
            let p = match (&a.cert, &a.from, &a.to) {
                (Some(path), _, _) => from_json(&read(path)?, &ws)?,
                (None, Some(from), Some(to)) => {
                    check_mode(&ws, RelationKind::Ired)?;
                    let s = ws.resolve_term(from)?;
                    let t = ws.resolve_term(to)?;
                    match search_proof(&s, &t, RelationKind::Ired, &ws.trs, budget) {
                        crate::engine::Verdict::Proved(p) => *p,
                        crate::engine::Verdict::Unknown => {
                            let _ = writeln!(text, "unknown");
                            out.write_all(text.as_bytes()).ok();
                            return Ok(EXIT_UNKNOWN);
                        }
                    }
                }
                _ => return Err(CliError::Usage("compress needs --cert or both --from and --to".into())),
            };
            let o = compress_with_budget(&p, &ws.trs, budget)?;
            match a.steps {
                Some(k) => text.push_str(&format_steps(&emit_steps(&o, k), &ws.trs)?),
                None => match a.format {
                    Format::Text => text.push_str(&ored_to_text(&o)),
                    _ => text.push_str(&ored_to_json(&o)),
                },
            }
            EXIT_PROVED
        }
        Command::Unfold { file, term, depth } => {
            let ws = load_workspace(&file)?;
            let t = ws.resolve_term(&term)?;
            let _ = writeln!(text, "{}", truncate(&t, depth));
            EXIT_PROVED
        }
        Command::Distance { file, left, right } => {
            let ws = load_workspace(&file)?;
            let s = ws.resolve_term(&left)?;
            let t = ws.resolve_term(&right)?;
            let _ = writeln!(text, "{}", distance(&s, &t));
            EXIT_PROVED
        }
        Command::Dot { file, certificate } => {
            let ws = load_workspace(&file)?;
            let p = from_json(&read(&certificate)?, &ws)?;
            text.push_str(&to_dot(&p));
            EXIT_PROVED
        }
    };
    out.write_all(text.as_bytes()).map_err(|source| CliError::Io {
        path: PathBuf::from("<stdout>"),
        source,
    })?;
    Ok(code)
}

fn check(a: &CheckArgs) -> Result<Outcome, CliError> {
    let ws = load_workspace(&a.file)?;
    let budget = a.budget.search()?;
    let kind = RelationKind::from(a.rel);
    check_mode(&ws, kind)?;
    let s = ws.resolve_term(&a.from)?;
    let t = ws.resolve_term(&a.to)?;
    run_check(&ws, kind, &s, &t, budget, a.budget.universe_budget)
}

/// Parse `args` (including the program name) and run, returning the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_PROVED };
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = err.write_all(rendered.as_bytes());
            } else {
                let _ = out.write_all(rendered.as_bytes());
            }
            return code;
        }
    };
    match execute(cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
