//! Concrete syntax for terms and rule files.
//!
//! ```text
//! expr    ::= 'rec' NAME '=' expr ('and' NAME '=' expr)* 'in' expr
//!           | IDENT | IDENT '(' expr (',' expr)* ')'
//! line    ::= 'vars' IDENT*
//!           | 'term' IDENT '=' expr
//!           | expr '->' expr            (rewriting mode)
//!           | expr '=' expr             (equational mode)
//! ```
//!
//! `#` starts a comment. Identifiers consist of letters, digits, `_` and `'`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::term::{expr_to_term, Expr, FiniteTerm, Signature, Term, TermError, VarPolicy};
use crate::trs::{Trs, TrsError};

const KEYWORDS: [&str; 5] = ["rec", "and", "in", "term", "vars"];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{line}:{col}: syntax error: {message}")]
    Syntax {
        line: usize,
        col: usize,
        message: String,
    },
    #[error("line {line}: {source}")]
    Term { line: usize, source: TermError },
    #[error("line {line}: {source}")]
    Rule { line: usize, source: TrsError },
    #[error("line {line}: `{found}` mixes equations and rewrite rules")]
    Mode { line: usize, found: Mode },
    #[error("line {line}: term `{name}` defined twice")]
    DuplicateTerm { line: usize, name: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Equational,
    Rewriting,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Equational => "=",
            Mode::Rewriting => "->",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    Comma,
    Eq,
    Arrow,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Eq => f.write_str("`=`"),
            Tok::Arrow => f.write_str("`->`"),
        }
    }
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}

/// Tokens of one line with their 1-based columns.
fn lex(text: &str, line: usize) -> Result<Vec<(Tok, usize)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        match c {
            '#' => break,
            c if c.is_whitespace() => i += 1,
            '(' | ')' | ',' | '=' => {
                out.push((
                    match c {
                        '(' => Tok::LParen,
                        ')' => Tok::RParen,
                        ',' => Tok::Comma,
                        _ => Tok::Eq,
                    },
                    col,
                ));
                i += 1;
            }
            '-' if chars.get(i + 1) == Some(&'>') => {
                out.push((Tok::Arrow, col));
                i += 2;
            }
            c if is_ident_char(c) && c != '\'' => {
                let start = i;
                while i < chars.len() && is_ident_char(chars[i]) {
                    i += 1;
                }
                out.push((Tok::Ident(chars[start..i].iter().collect()), col));
            }
            _ => {
                return Err(ParseError::Syntax {
                    line,
                    col,
                    message: format!("unexpected character `{c}`"),
                })
            }
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    line: usize,
    end_col: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end_col, |&(_, c)| c)
    }

    fn error<T>(&self, message: String) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            line: self.line,
            col: self.col(),
            message,
        })
    }

    fn unexpected<T>(&self, wanted: &str) -> Result<T, ParseError> {
        match self.peek() {
            Some(t) => self.error(format!("expected {wanted}, found {t}")),
            None => self.error(format!("expected {wanted}, found end of line")),
        }
    }

    fn expect(&mut self, tok: Tok, wanted: &str) -> Result<(), ParseError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            self.unexpected(wanted)
        }
    }

    fn keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(s)) if s == kw)
    }

    fn name(&mut self) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Ident(s)) if !KEYWORDS.contains(&s.as_str()) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => self.unexpected("an identifier"),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        if self.keyword("rec") {
            self.pos += 1;
            let mut bindings = Vec::new();
            loop {
                let name = self.name()?;
                self.expect(Tok::Eq, "`=`")?;
                bindings.push((name, self.expr()?));
                if self.keyword("and") {
                    self.pos += 1;
                } else {
                    break;
                }
            }
            if !self.keyword("in") {
                return self.unexpected("`and` or `in`");
            }
            self.pos += 1;
            let body = self.expr()?;
            return Ok(Expr::Rec(bindings, Box::new(body)));
        }
        let name = self.name()?;
        if self.peek() != Some(&Tok::LParen) {
            return Ok(Expr::Ident(name));
        }
        self.pos += 1;
        let mut args = vec![self.expr()?];
        while self.peek() == Some(&Tok::Comma) {
            self.pos += 1;
            args.push(self.expr()?);
        }
        self.expect(Tok::RParen, "`,` or `)`")?;
        Ok(Expr::App(name, args))
    }

    fn finish(&self) -> Result<(), ParseError> {
        if self.pos < self.toks.len() {
            return self.unexpected("end of line");
        }
        Ok(())
    }
}

fn parser(text: &str, line: usize) -> Result<Parser, ParseError> {
    Ok(Parser {
        toks: lex(text, line)?,
        pos: 0,
        line,
        end_col: text.chars().count() + 1,
    })
}

/// Parse a single term expression.
pub fn parse_expr(text: &str) -> Result<Expr, ParseError> {
    let mut p = parser(text, 1)?;
    let e = p.expr()?;
    p.finish()?;
    Ok(e)
}

/// Convert a rule side without `rec` into a finite pattern.
fn pattern(e: &Expr, sig: &Signature, line: usize) -> Result<FiniteTerm, ParseError> {
    match e {
        Expr::Ident(x) if sig.is_var(x) => Ok(FiniteTerm::var(x)),
        Expr::Ident(c) => Ok(FiniteTerm::constant(c)),
        Expr::App(f, args) => Ok(FiniteTerm::app(
            f,
            args.iter()
                .map(|a| pattern(a, sig, line))
                .collect::<Result<_, _>>()?,
        )),
        Expr::Rec(..) => Err(ParseError::Syntax {
            line,
            col: 1,
            message: "`rec` is not allowed in a left-hand side".into(),
        }),
    }
}

/// A parsed rule file.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Workspace {
    pub trs: Trs,
    pub terms: BTreeMap<String, Term>,
    /// `None` for a file without rules.
    pub mode: Option<Mode>,
}

impl Workspace {
    /// A named term, or else the text parsed as an expression.
    pub fn resolve_term(&self, text: &str) -> Result<Term, ParseError> {
        if let Some(t) = self.terms.get(text.trim()) {
            return Ok(t.clone());
        }
        let e = parse_expr(text)?;
        let mut sig = self.trs.signature.clone();
        expr_to_term(&e, &mut sig).map_err(|source| ParseError::Term { line: 1, source })
    }
}

pub fn parse_trs_file(text: &str) -> Result<Workspace, ParseError> {
    let mut declared = BTreeSet::new();
    let mut has_vars = false;
    for (k, raw) in text.lines().enumerate() {
        let mut p = parser(raw, k + 1)?;
        if p.keyword("vars") {
            has_vars = true;
            p.pos += 1;
            while p.pos < p.toks.len() {
                declared.insert(p.name()?);
            }
        }
    }
    let policy = if has_vars {
        VarPolicy::Declared(declared)
    } else {
        VarPolicy::Conventional
    };
    let mut ws = Workspace {
        trs: Trs::new(Signature::new(policy)),
        ..Workspace::default()
    };
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let mut p = parser(raw, line)?;
        if p.toks.is_empty() || p.keyword("vars") {
            continue;
        }
        if p.keyword("term") {
            p.pos += 1;
            let name = p.name()?;
            p.expect(Tok::Eq, "`=`")?;
            let e = p.expr()?;
            p.finish()?;
            let t = expr_to_term(&e, &mut ws.trs.signature)
                .map_err(|source| ParseError::Term { line, source })?;
            if ws.terms.insert(name.clone(), t).is_some() {
                return Err(ParseError::DuplicateTerm { line, name });
            }
            continue;
        }
        let lhs = p.expr()?;
        let mode = match p.peek() {
            Some(Tok::Arrow) => Mode::Rewriting,
            Some(Tok::Eq) => Mode::Equational,
            _ => return p.unexpected("`->` or `=`"),
        };
        p.pos += 1;
        let rhs = p.expr()?;
        p.finish()?;
        match ws.mode {
            Some(m) if m != mode => return Err(ParseError::Mode { line, found: mode }),
            _ => ws.mode = Some(mode),
        }
        let lhs = pattern(&lhs, &ws.trs.signature, line)?;
        let rhs = expr_to_term(&rhs, &mut ws.trs.signature)
            .map_err(|source| ParseError::Term { line, source })?;
        ws.trs
            .add_rule(lhs, rhs)
            .map_err(|source| ParseError::Rule { line, source })?;
    }
    Ok(ws)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_rule() {
        let ws = parse_trs_file("C(a) -> a").unwrap();
        assert_eq!(ws.trs.rules.len(), 1);
        assert_eq!(ws.mode, Some(Mode::Rewriting));
    }

    #[test]
    fn equation_and_named_term() {
        let ws = parse_trs_file("C(a) = a\nterm cw = rec X = C(X) in X").unwrap();
        assert_eq!(ws.trs.rules.len(), 1);
        assert_eq!(ws.mode, Some(Mode::Equational));
        let cw = &ws.terms["cw"];
        assert_eq!(cw.nodes.len(), 1);
        assert_eq!(ws.resolve_term("cw").unwrap(), *cw);
        assert_eq!(ws.resolve_term("rec Y = C(Y) in Y").unwrap(), *cw);
    }

    #[test]
    fn three_rules_with_comments() {
        let ws = parse_trs_file("# example\nf(x,x) -> D\na -> C(a)  # loop\n\nb -> C(b)\n").unwrap();
        assert_eq!(ws.trs.rules.len(), 3);
        assert!(!ws.trs.is_left_linear());
    }

    #[test]
    fn errors() {
        assert!(matches!(
            parse_trs_file("a -> b\nc = d"),
            Err(ParseError::Mode { line: 2, .. })
        ));
        assert!(matches!(
            parse_trs_file("f(a) -> a\nf(a,a) -> a"),
            Err(ParseError::Rule { line: 2, .. })
        ));
        assert_eq!(
            parse_trs_file("a -> C(a"),
            Err(ParseError::Syntax {
                line: 1,
                col: 9,
                message: "expected `,` or `)`, found end of line".into()
            })
        );
        assert!(matches!(
            parse_trs_file("a -> $"),
            Err(ParseError::Syntax { line: 1, col: 6, .. })
        ));
        assert!(matches!(
            parse_trs_file("x -> a"),
            Err(ParseError::Rule { line: 1, source: TrsError::LhsIsVariable(_) })
        ));
        assert!(matches!(
            parse_trs_file("rec X = C(X) in X -> a"),
            Err(ParseError::Syntax { .. })
        ));
    }

    #[test]
    fn declared_variables() {
        let ws = parse_trs_file("vars n\nS(n) -> n\nx -> a").unwrap();
        assert_eq!(ws.trs.rules.len(), 2);
        assert!(ws.trs.rules[1].lhs.variables().is_empty());
    }

    #[test]
    fn printed_terms_reparse() {
        let ws = parse_trs_file("term t = rec X = f(a, rec Y = g(X, Y) in Y) in X").unwrap();
        let t = &ws.terms["t"];
        assert_eq!(ws.resolve_term(&t.to_string()).unwrap(), *t);
    }
}
