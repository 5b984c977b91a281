//! Scenario files (`.ked`): a header, declarations, one maxim, background
//! assumptions, and a query, in s-expression syntax with `;` comments.
//!
//! ```text
//! (scenario lying)
//! (declare-atom statements-believed)
//! (declare-action lie)
//! (system custom)
//! (bounds :worlds 3 :subjects 2)
//! (maxim <circumstances> lie <goal>)
//! (assume <formula>)
//! (query status)
//! ```
//!
//! Every symbol used in the maxim or an assumption must be declared, and
//! assumptions must be closed.  The header must come first; `maxim`,
//! `system`, and `query` are required and may appear once each.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;

use crate::ast::{ActRef, Formula, MaximExpr};
use crate::parser::{self, lex, ParseError, TokenCursor, TokenKind};
use crate::sorts::{check_closed, signature, Signature, SortError};
use crate::systems::SystemKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Query {
    Status,
    CheckProhibited,
    CheckPermissible,
    CheckObligatory,
}

impl Query {
    pub fn as_str(&self) -> &'static str {
        match self {
            Query::Status => "status",
            Query::CheckProhibited => "check-prohibited",
            Query::CheckPermissible => "check-permissible",
            Query::CheckObligatory => "check-obligatory",
        }
    }

    fn parse(s: &str) -> Option<Query> {
        match s {
            "status" => Some(Query::Status),
            "check-prohibited" => Some(Query::CheckProhibited),
            "check-permissible" => Some(Query::CheckPermissible),
            "check-obligatory" => Some(Query::CheckObligatory),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub atoms: Vec<String>,
    pub actions: Vec<String>,
    pub subjects: Vec<String>,
    pub system: SystemKind,
    pub bounds_worlds: Option<usize>,
    pub bounds_subjects: Option<usize>,
    pub maxim: MaximExpr,
    pub assumptions: Vec<Formula>,
    pub query: Query,
}

#[derive(Debug, thiserror::Error)]
pub enum KedError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("sort error: {0}")]
    Sort(#[from] SortError),
    #[error("unknown system `{0}` (expected naive, kroy, or custom)")]
    UnknownSystem(String),
    #[error("undeclared {kind} `{name}`")]
    UndeclaredSymbol { kind: &'static str, name: String },
    #[error("`{name}` is declared as a {declared} but used as a {used}")]
    WrongSort {
        name: String,
        declared: &'static str,
        used: &'static str,
    },
    #[error("`{0}` is declared twice")]
    DuplicateDeclaration(String),
    #[error("`{0}` is a reserved word and cannot be declared")]
    ReservedName(String),
    #[error("duplicate `{0}` form (at most one allowed)")]
    DuplicateForm(&'static str),
    #[error("missing required `{0}` form")]
    MissingForm(&'static str),
    #[error("the `(scenario <name>)` header must be the first form")]
    HeaderNotFirst,
    #[error("bounds must be at least 1")]
    ZeroBound,
}

impl KedError {
    /// Stable machine-readable tag for CLI/stderr reporting.
    pub fn code(&self) -> &'static str {
        match self {
            KedError::Parse(_) => "parse",
            KedError::Sort(_) => "sort",
            KedError::UnknownSystem(_) => "unknown-system",
            KedError::UndeclaredSymbol { .. } => "undeclared-symbol",
            KedError::WrongSort { .. } => "wrong-sort",
            KedError::DuplicateDeclaration(_) => "duplicate-declaration",
            KedError::ReservedName(_) => "reserved-name",
            KedError::DuplicateForm(_) => "duplicate-form",
            KedError::MissingForm(_) => "missing-form",
            KedError::HeaderNotFirst => "header-not-first",
            KedError::ZeroBound => "zero-bound",
        }
    }
}

/// IO wrapper so the caller can tell an unreadable file from a bad one.
#[derive(Debug)]
pub enum LoadError {
    Io(std::io::Error),
    Ked(KedError),
}

impl fmt::Display for LoadError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LoadError::Io(e) => write!(f, "cannot read scenario: {e}"),
            LoadError::Ked(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for LoadError {}

const FORMS: &[&str] = &[
    "`scenario`",
    "`declare-atom`",
    "`declare-action`",
    "`declare-subject`",
    "`system`",
    "`bounds`",
    "`maxim`",
    "`assume`",
    "`query`",
];

struct Builder {
    name: Option<String>,
    atoms: Vec<String>,
    actions: Vec<String>,
    subjects: Vec<String>,
    system: Option<SystemKind>,
    bounds_worlds: Option<usize>,
    bounds_subjects: Option<usize>,
    maxim: Option<MaximExpr>,
    assumptions: Vec<Formula>,
    query: Option<Query>,
}

impl Builder {
    fn declared(&self, name: &str) -> Option<&'static str> {
        if self.atoms.iter().any(|a| a == name) {
            Some("atom")
        } else if self.actions.iter().any(|a| a == name) {
            Some("action")
        } else if self.subjects.iter().any(|a| a == name) {
            Some("subject")
        } else {
            None
        }
    }

    fn declare(&mut self, kind: &'static str, name: String) -> Result<(), KedError> {
        if parser::is_reserved(&name) {
            return Err(KedError::ReservedName(name));
        }
        if self.declared(&name).is_some() {
            return Err(KedError::DuplicateDeclaration(name));
        }
        match kind {
            "atom" => self.atoms.push(name),
            "action" => self.actions.push(name),
            _ => self.subjects.push(name),
        }
        Ok(())
    }
}

pub fn parse_scenario(src: &str) -> Result<Scenario, KedError> {
    let mut cur = TokenCursor::new(lex(src)?);
    let mut b = Builder {
        name: None,
        atoms: Vec::new(),
        actions: Vec::new(),
        subjects: Vec::new(),
        system: None,
        bounds_worlds: None,
        bounds_subjects: None,
        maxim: None,
        assumptions: Vec::new(),
        query: None,
    };
    let mut first = true;
    while !cur.at_eof() {
        cur.expect_lparen()?;
        let (head, head_tok) = cur.expect_ident("form name")?;
        if first && head != "scenario" {
            return Err(KedError::HeaderNotFirst);
        }
        match head.as_str() {
            "scenario" => {
                if !first {
                    return Err(if b.name.is_some() {
                        KedError::DuplicateForm("scenario")
                    } else {
                        KedError::HeaderNotFirst
                    });
                }
                let (name, _) = cur.expect_ident("scenario name")?;
                b.name = Some(name);
            }
            "declare-atom" => {
                let (name, _) = cur.expect_ident("atom name")?;
                b.declare("atom", name)?;
            }
            "declare-action" => {
                let (name, _) = cur.expect_ident("action name")?;
                b.declare("action", name)?;
            }
            "declare-subject" => {
                let (name, _) = cur.expect_ident("subject name")?;
                b.declare("subject", name)?;
            }
            "system" => {
                if b.system.is_some() {
                    return Err(KedError::DuplicateForm("system"));
                }
                let (name, _) = cur.expect_ident("system name")?;
                b.system =
                    Some(SystemKind::parse(&name).ok_or(KedError::UnknownSystem(name))?);
            }
            "bounds" => {
                if b.bounds_worlds.is_some() || b.bounds_subjects.is_some() {
                    return Err(KedError::DuplicateForm("bounds"));
                }
                let mut any = false;
                while let TokenKind::Keyword(k) = cur.peek().kind.clone() {
                    let key_tok = cur.next();
                    let slot = match k.as_str() {
                        "worlds" => &mut b.bounds_worlds,
                        "subjects" => &mut b.bounds_subjects,
                        _ => return Err(key_tok.error(&["`:worlds`", "`:subjects`"]).into()),
                    };
                    if slot.is_some() {
                        return Err(KedError::DuplicateForm("bounds keyword"));
                    }
                    let n = match cur.peek().kind {
                        TokenKind::Int(n) => {
                            cur.next();
                            n as usize
                        }
                        _ => return Err(cur.peek().error(&["a positive integer"]).into()),
                    };
                    if n == 0 {
                        return Err(KedError::ZeroBound);
                    }
                    *slot = Some(n);
                    any = true;
                }
                if !any {
                    return Err(cur.peek().error(&["`:worlds`", "`:subjects`"]).into());
                }
            }
            "maxim" => {
                if b.maxim.is_some() {
                    return Err(KedError::DuplicateForm("maxim"));
                }
                let circumstances = parser::parse_formula_at(&mut cur)?;
                let (act, _) = cur.expect_ident("action name")?;
                let goal = parser::parse_formula_at(&mut cur)?;
                b.maxim = Some(MaximExpr {
                    circumstances,
                    act: ActRef::Action(act),
                    goal,
                });
            }
            "assume" => {
                b.assumptions.push(parser::parse_formula_at(&mut cur)?);
            }
            "query" => {
                if b.query.is_some() {
                    return Err(KedError::DuplicateForm("query"));
                }
                let (name, tok) = cur.expect_ident("query name")?;
                b.query = Some(Query::parse(&name).ok_or_else(|| {
                    KedError::from(tok.error(&[
                        "`status`",
                        "`check-prohibited`",
                        "`check-permissible`",
                        "`check-obligatory`",
                    ]))
                })?);
            }
            _ => return Err(head_tok.error(FORMS).into()),
        }
        cur.expect_rparen()?;
        first = false;
    }

    let name = b.name.take().ok_or(KedError::MissingForm("scenario"))?;
    let system = b.system.take().ok_or(KedError::MissingForm("system"))?;
    let maxim = b.maxim.take().ok_or(KedError::MissingForm("maxim"))?;
    let query = b.query.take().ok_or(KedError::MissingForm("query"))?;

    // Closedness, then declaration checking over everything that can
    // mention a symbol.
    check_closed(&maxim.circumstances)?;
    check_closed(&maxim.goal)?;
    for a in &b.assumptions {
        check_closed(a)?;
    }
    let mut used = Signature::default();
    used.merge(&signature(&maxim.circumstances));
    used.merge(&signature(&maxim.goal));
    for a in &b.assumptions {
        used.merge(&signature(a));
    }
    let act_name = match &maxim.act {
        ActRef::Action(n) => n.clone(),
        ActRef::OpenVar(n) => n.clone(), // unreachable from this parser
    };
    used.actions.insert(act_name);

    let check = |names: &BTreeSet<String>, used_as: &'static str| -> Result<(), KedError> {
        let declared_list: &[String] = match used_as {
            "atom" => &b.atoms,
            "action" => &b.actions,
            _ => &b.subjects,
        };
        for n in names {
            if declared_list.iter().any(|d| d == n) {
                continue;
            }
            return Err(match b.declared(n) {
                Some(declared) => KedError::WrongSort {
                    name: n.clone(),
                    declared,
                    used: used_as,
                },
                None => KedError::UndeclaredSymbol {
                    kind: used_as,
                    name: n.clone(),
                },
            });
        }
        Ok(())
    };
    check(&used.atoms, "atom")?;
    check(&used.actions, "action")?;
    check(&used.subject_consts, "subject")?;

    Ok(Scenario {
        name,
        atoms: b.atoms,
        actions: b.actions,
        subjects: b.subjects,
        system,
        bounds_worlds: b.bounds_worlds,
        bounds_subjects: b.bounds_subjects,
        maxim,
        assumptions: b.assumptions,
        query,
    })
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario, LoadError> {
    let src = std::fs::read_to_string(path).map_err(LoadError::Io)?;
    parse_scenario(&src).map_err(LoadError::Ked)
}
