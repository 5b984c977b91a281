//! Surface syntax: fully parenthesized s-expressions.
//!
//! ```text
//! (ob (not (act lie s1)) circumstances)
//! (forall-maxim m (implies (box (well-formed m s1)) (prohibited m s1)))
//! ```
//!
//! Sugar accepted on input and normalized during parsing: `false` becomes
//! `(not true)`, `(diamond f)` becomes `(not (box (not f)))`, one-argument
//! `(ob f)` becomes `(ob f true)`.  Bare identifiers are resolved against the
//! enclosing binders: a name bound by `forall-term` is a term variable, one
//! bound by `forall-subject`/`forall-open`/`forall-maxim` is rejected in
//! formula position, and an unbound name is a propositional atom.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::ast::{world_index, ActRef, Formula, MacroArg, MaximExpr, MaximRef, SubjectRef};
use crate::model::WorldMask;
use crate::sorts::Sort;

pub const MACRO_NAMES: [&str; 7] = [
    "will",
    "effective",
    "not-universalizable",
    "well-formed",
    "prohibited",
    "permissible",
    "obligatory",
];

const RESERVED: [&str; 25] = [
    "true",
    "false",
    "not",
    "and",
    "or",
    "implies",
    "iff",
    "box",
    "diamond",
    "ob",
    "act",
    "worlds",
    "open-app",
    "forall-subject",
    "forall-term",
    "forall-open",
    "forall-maxim",
    "maxim",
    "will",
    "effective",
    "not-universalizable",
    "well-formed",
    "prohibited",
    "permissible",
    "obligatory",
];

pub fn is_reserved(name: &str) -> bool {
    RESERVED.contains(&name)
}

/// Identifiers: `[a-z][a-z0-9_-]*`.
pub fn is_valid_ident(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_lowercase() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_' || c == '-')
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub found: String,
    pub expected: Vec<String>,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "parse error at {}:{}: found {}, expected {}",
            self.line,
            self.col,
            self.found,
            self.expected.join(" or ")
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum TokenKind {
    LParen,
    RParen,
    Ident(String),
    Keyword(String),
    Int(u64),
    Eof,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Token {
    pub kind: TokenKind,
    pub line: usize,
    pub col: usize,
}

impl Token {
    pub(crate) fn describe(&self) -> String {
        match &self.kind {
            TokenKind::LParen => "`(`".to_string(),
            TokenKind::RParen => "`)`".to_string(),
            TokenKind::Ident(s) => format!("`{s}`"),
            TokenKind::Keyword(s) => format!("`:{s}`"),
            TokenKind::Int(n) => format!("`{n}`"),
            TokenKind::Eof => "end of input".to_string(),
        }
    }

    pub(crate) fn error(&self, expected: &[&str]) -> ParseError {
        ParseError {
            line: self.line,
            col: self.col,
            found: self.describe(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }
}

pub(crate) fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let mut tokens = Vec::new();
    let mut line = 1usize;
    let mut col = 1usize;
    let mut chars = src.chars().peekable();
    while let Some(&c) = chars.peek() {
        let (tl, tc) = (line, col);
        let bump = |c: char, line: &mut usize, col: &mut usize| {
            if c == '\n' {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
        };
        match c {
            ' ' | '\t' | '\r' | '\n' => {
                chars.next();
                bump(c, &mut line, &mut col);
            }
            ';' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    chars.next();
                    col += 1;
                }
            }
            '(' => {
                chars.next();
                col += 1;
                tokens.push(Token { kind: TokenKind::LParen, line: tl, col: tc });
            }
            ')' => {
                chars.next();
                col += 1;
                tokens.push(Token { kind: TokenKind::RParen, line: tl, col: tc });
            }
            ':' => {
                chars.next();
                col += 1;
                let mut name = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_' || c == '-' {
                        name.push(c);
                        chars.next();
                        col += 1;
                    } else {
                        break;
                    }
                }
                if name.is_empty() {
                    return Err(ParseError {
                        line: tl,
                        col: tc,
                        found: "`:`".to_string(),
                        expected: vec!["keyword name after `:`".to_string()],
                    });
                }
                tokens.push(Token { kind: TokenKind::Keyword(name), line: tl, col: tc });
            }
            c if c.is_ascii_digit() => {
                let mut n: u64 = 0;
                while let Some(&c) = chars.peek() {
                    if let Some(d) = c.to_digit(10) {
                        n = n.saturating_mul(10).saturating_add(d as u64);
                        chars.next();
                        col += 1;
                    } else {
                        break;
                    }
                }
                tokens.push(Token { kind: TokenKind::Int(n), line: tl, col: tc });
            }
            c if c.is_ascii_lowercase() => {
                let mut name = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_' || c == '-' {
                        name.push(c);
                        chars.next();
                        col += 1;
                    } else {
                        break;
                    }
                }
                tokens.push(Token { kind: TokenKind::Ident(name), line: tl, col: tc });
            }
            other => {
                return Err(ParseError {
                    line: tl,
                    col: tc,
                    found: format!("`{other}`"),
                    expected: vec!["identifier, number, `(`, or `)`".to_string()],
                });
            }
        }
    }
    tokens.push(Token { kind: TokenKind::Eof, line, col });
    Ok(tokens)
}

pub(crate) struct TokenCursor {
    tokens: Vec<Token>,
    pos: usize,
}

impl TokenCursor {
    pub(crate) fn new(tokens: Vec<Token>) -> Self {
        TokenCursor { tokens, pos: 0 }
    }

    pub(crate) fn peek(&self) -> &Token {
        &self.tokens[self.pos.min(self.tokens.len() - 1)]
    }

    pub(crate) fn next(&mut self) -> Token {
        let t = self.peek().clone();
        if self.pos < self.tokens.len() - 1 {
            self.pos += 1;
        }
        t
    }

    pub(crate) fn expect_lparen(&mut self) -> Result<(), ParseError> {
        match self.peek().kind {
            TokenKind::LParen => {
                self.next();
                Ok(())
            }
            _ => Err(self.peek().error(&["`(`"])),
        }
    }

    pub(crate) fn expect_rparen(&mut self) -> Result<(), ParseError> {
        match self.peek().kind {
            TokenKind::RParen => {
                self.next();
                Ok(())
            }
            _ => Err(self.peek().error(&["`)`"])),
        }
    }

    pub(crate) fn expect_ident(&mut self, what: &str) -> Result<(String, Token), ParseError> {
        match self.peek().kind.clone() {
            TokenKind::Ident(name) => {
                let tok = self.next();
                Ok((name, tok))
            }
            _ => Err(self.peek().error(&[what])),
        }
    }

    pub(crate) fn at_eof(&self) -> bool {
        matches!(self.peek().kind, TokenKind::Eof)
    }
}

struct FormulaParser {
    cur: TokenCursor,
    scope: Vec<(String, Sort)>,
}

impl FormulaParser {
    fn lookup(&self, name: &str) -> Option<Sort> {
        self.scope
            .iter()
            .rev()
            .find(|(n, _)| n == name)
            .map(|(_, s)| *s)
    }

    fn parse_formula(&mut self) -> Result<Formula, ParseError> {
        match self.cur.peek().kind.clone() {
            TokenKind::Ident(name) => {
                let tok = self.cur.next();
                match name.as_str() {
                    "true" => Ok(Formula::Top),
                    "false" => Ok(Formula::not(Formula::Top)),
                    _ => match self.lookup(&name) {
                        Some(Sort::Term) => Ok(Formula::TermVar(name)),
                        Some(sort) => Err(ParseError {
                            line: tok.line,
                            col: tok.col,
                            found: format!("`{name}` ({sort} variable)"),
                            expected: vec!["a formula (term variables and atoms only)".to_string()],
                        }),
                        None => Ok(Formula::Atom(name)),
                    },
                }
            }
            TokenKind::LParen => {
                self.cur.next();
                let head_tok = self.cur.peek().clone();
                let head = match head_tok.kind.clone() {
                    TokenKind::Ident(h) => h,
                    _ => return Err(head_tok.error(&["operator name"])),
                };
                self.cur.next();
                let f = self.parse_compound(&head, &head_tok)?;
                self.cur.expect_rparen()?;
                Ok(f)
            }
            _ => Err(self.cur.peek().error(&["a formula"])),
        }
    }

    fn parse_compound(&mut self, head: &str, head_tok: &Token) -> Result<Formula, ParseError> {
        match head {
            "not" => Ok(Formula::not(self.parse_formula()?)),
            "box" => Ok(Formula::nec(self.parse_formula()?)),
            "diamond" => Ok(Formula::diamond(self.parse_formula()?)),
            "and" | "or" | "implies" | "iff" => {
                let a = self.parse_formula()?;
                let b = self.parse_formula()?;
                Ok(match head {
                    "and" => Formula::and(a, b),
                    "or" => Formula::or(a, b),
                    "implies" => Formula::implies(a, b),
                    _ => Formula::iff(a, b),
                })
            }
            "ob" => {
                let body = self.parse_formula()?;
                if matches!(self.cur.peek().kind, TokenKind::RParen) {
                    Ok(Formula::ob1(body))
                } else {
                    let ctx = self.parse_formula()?;
                    Ok(Formula::ob(body, ctx))
                }
            }
            "act" => {
                let (name, tok) = self.cur.expect_ident("action name or open variable")?;
                let subject = self.parse_subject()?;
                match self.lookup(&name) {
                    Some(Sort::Open) => Ok(Formula::OpenApply(name, subject)),
                    Some(sort) => Err(ParseError {
                        line: tok.line,
                        col: tok.col,
                        found: format!("`{name}` ({sort} variable)"),
                        expected: vec!["action name or open variable".to_string()],
                    }),
                    None => Ok(Formula::Apply(name, subject)),
                }
            }
            "worlds" => Ok(Formula::TermConst(self.parse_world_list()?)),
            "open-app" => {
                let mut masks = Vec::new();
                while matches!(self.cur.peek().kind, TokenKind::LParen) {
                    self.cur.expect_lparen()?;
                    let (kw, tok) = self.cur.expect_ident("`worlds`")?;
                    if kw != "worlds" {
                        return Err(tok.error(&["`worlds`"]));
                    }
                    masks.push(self.parse_world_list()?);
                    self.cur.expect_rparen()?;
                }
                if masks.is_empty() {
                    return Err(self.cur.peek().error(&["`(worlds ...)`"]));
                }
                let subject = self.parse_subject()?;
                Ok(Formula::OpenConst(masks, subject))
            }
            "forall-subject" | "forall-term" | "forall-open" | "forall-maxim" => {
                let sort = match head {
                    "forall-subject" => Sort::Subject,
                    "forall-term" => Sort::Term,
                    "forall-open" => Sort::Open,
                    _ => Sort::Maxim,
                };
                let (var, tok) = self.cur.expect_ident("variable name")?;
                if is_reserved(&var) {
                    return Err(ParseError {
                        line: tok.line,
                        col: tok.col,
                        found: format!("`{var}`"),
                        expected: vec!["a non-reserved variable name".to_string()],
                    });
                }
                self.scope.push((var.clone(), sort));
                let body = self.parse_formula();
                self.scope.pop();
                let body = body?;
                Ok(match sort {
                    Sort::Subject => Formula::ForallSubject(var, Box::new(body)),
                    Sort::Term => Formula::ForallTerm(var, Box::new(body)),
                    Sort::Open => Formula::ForallOpen(var, Box::new(body)),
                    Sort::Maxim => Formula::ForallMaxim(var, Box::new(body)),
                })
            }
            m if MACRO_NAMES.contains(&m) => {
                let maxim = self.parse_maxim_ref()?;
                let subject = self.parse_subject()?;
                Ok(Formula::MacroCall(
                    m.to_string(),
                    vec![MacroArg::Maxim(maxim), MacroArg::Subject(subject)],
                ))
            }
            "maxim" => Err(head_tok.error(&["an operator (maxim literals appear only as macro arguments)"])),
            _ => Err(head_tok.error(&[
                "one of: not, and, or, implies, iff, box, diamond, ob, act, worlds, open-app, forall-*, or a macro name",
            ])),
        }
    }

    fn parse_world_list(&mut self) -> Result<WorldMask, ParseError> {
        let mut mask: WorldMask = 0;
        let mut seen = BTreeSet::new();
        loop {
            match self.cur.peek().kind.clone() {
                TokenKind::Ident(name) => {
                    let tok = self.cur.next();
                    let idx = world_index(&name).filter(|i| *i < crate::model::MAX_WORLDS);
                    match idx {
                        Some(i) if seen.insert(i) => mask |= 1 << i,
                        Some(_) => {
                            return Err(ParseError {
                                line: tok.line,
                                col: tok.col,
                                found: format!("`{name}`"),
                                expected: vec!["a world name not already listed".to_string()],
                            })
                        }
                        None => {
                            return Err(ParseError {
                                line: tok.line,
                                col: tok.col,
                                found: format!("`{name}`"),
                                expected: vec!["a canonical world name (w1, w2, ...)".to_string()],
                            })
                        }
                    }
                }
                _ => return Ok(mask),
            }
        }
    }

    fn parse_subject(&mut self) -> Result<SubjectRef, ParseError> {
        let (name, tok) = self.cur.expect_ident("subject name or variable")?;
        match self.lookup(&name) {
            Some(Sort::Subject) => Ok(SubjectRef::Var(name)),
            Some(sort) => Err(ParseError {
                line: tok.line,
                col: tok.col,
                found: format!("`{name}` ({sort} variable)"),
                expected: vec!["subject name or variable".to_string()],
            }),
            None => {
                if is_reserved(&name) {
                    return Err(ParseError {
                        line: tok.line,
                        col: tok.col,
                        found: format!("`{name}`"),
                        expected: vec!["a non-reserved subject name".to_string()],
                    });
                }
                Ok(SubjectRef::Const(name))
            }
        }
    }

    fn parse_maxim_ref(&mut self) -> Result<MaximRef, ParseError> {
        match self.cur.peek().kind.clone() {
            TokenKind::Ident(name) => {
                let tok = self.cur.next();
                match self.lookup(&name) {
                    Some(Sort::Maxim) => Ok(MaximRef::Var(name)),
                    Some(sort) => Err(ParseError {
                        line: tok.line,
                        col: tok.col,
                        found: format!("`{name}` ({sort} variable)"),
                        expected: vec!["maxim variable or `(maxim ...)` literal".to_string()],
                    }),
                    None => Err(ParseError {
                        line: tok.line,
                        col: tok.col,
                        found: format!("`{name}`"),
                        expected: vec!["a bound maxim variable or `(maxim ...)` literal".to_string()],
                    }),
                }
            }
            TokenKind::LParen => {
                self.cur.expect_lparen()?;
                let (kw, tok) = self.cur.expect_ident("`maxim`")?;
                if kw != "maxim" {
                    return Err(tok.error(&["`maxim`"]));
                }
                let circumstances = self.parse_formula()?;
                let (act_name, act_tok) = self.cur.expect_ident("action name or open variable")?;
                let act = match self.lookup(&act_name) {
                    Some(Sort::Open) => ActRef::OpenVar(act_name),
                    Some(sort) => {
                        return Err(ParseError {
                            line: act_tok.line,
                            col: act_tok.col,
                            found: format!("`{act_name}` ({sort} variable)"),
                            expected: vec!["action name or open variable".to_string()],
                        })
                    }
                    None => {
                        if is_reserved(&act_name) {
                            return Err(ParseError {
                                line: act_tok.line,
                                col: act_tok.col,
                                found: format!("`{act_name}`"),
                                expected: vec!["a non-reserved action name".to_string()],
                            });
                        }
                        ActRef::Action(act_name)
                    }
                };
                let goal = self.parse_formula()?;
                self.cur.expect_rparen()?;
                Ok(MaximRef::Lit(Box::new(MaximExpr { circumstances, act, goal })))
            }
            _ => Err(self
                .cur
                .peek()
                .error(&["maxim variable or `(maxim ...)` literal"])),
        }
    }
}

/// Parse a single formula; trailing input is an error.
pub fn parse_formula(src: &str) -> Result<Formula, ParseError> {
    let mut p = FormulaParser { cur: TokenCursor::new(lex(src)?), scope: Vec::new() };
    let f = p.parse_formula()?;
    if !p.cur.at_eof() {
        return Err(p.cur.peek().error(&["end of input"]));
    }
    Ok(f)
}

/// Parse a file that holds one or more formulas back to back.
pub fn parse_formulas(src: &str) -> Result<Vec<Formula>, ParseError> {
    let mut p = FormulaParser { cur: TokenCursor::new(lex(src)?), scope: Vec::new() };
    let mut out = Vec::new();
    while !p.cur.at_eof() {
        out.push(p.parse_formula()?);
    }
    Ok(out)
}

/// Entry point used by the scenario loader: parse one formula from an
/// existing cursor, under an empty binder scope.
pub(crate) fn parse_formula_at(cur: &mut TokenCursor) -> Result<Formula, ParseError> {
    let tokens = std::mem::take(&mut cur.tokens);
    let mut p = FormulaParser { cur: TokenCursor { tokens, pos: cur.pos }, scope: Vec::new() };
    let f = p.parse_formula()?;
    cur.pos = p.cur.pos;
    cur.tokens = p.cur.tokens;
    Ok(f)
}
