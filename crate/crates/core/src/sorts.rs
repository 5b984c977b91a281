//! Variable sorts, free-variable analysis, and signature extraction.

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::ast::{ActRef, Formula, MacroArg, MaximRef, SubjectRef};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Sort {
    Subject,
    Term,
    Open,
    Maxim,
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Sort::Subject => "subject",
            Sort::Term => "term",
            Sort::Open => "open",
            Sort::Maxim => "maxim",
        };
        write!(f, "{s}")
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SortError {
    #[error("variable `{name}` occurs both as {first} and as {second}")]
    FreeConflict { name: String, first: Sort, second: Sort },
    #[error("variable `{name}` is bound as {bound} but used as {used}")]
    BoundMismatch { name: String, bound: Sort, used: Sort },
    #[error("formula has free variables: {}", names.join(", "))]
    NotClosed { names: Vec<String> },
}

/// Constants a formula mentions; used to size search bounds.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Signature {
    pub atoms: BTreeSet<String>,
    pub actions: BTreeSet<String>,
    pub subject_consts: BTreeSet<String>,
}

impl Signature {
    pub fn merge(&mut self, other: &Signature) {
        self.atoms.extend(other.atoms.iter().cloned());
        self.actions.extend(other.actions.iter().cloned());
        self.subject_consts.extend(other.subject_consts.iter().cloned());
    }
}

struct SortWalker {
    bound: Vec<(String, Sort)>,
    free: BTreeMap<String, Sort>,
}

impl SortWalker {
    fn occurrence(&mut self, name: &str, sort: Sort) -> Result<(), SortError> {
        if let Some((_, bound)) = self.bound.iter().rev().find(|(n, _)| n == name) {
            if *bound != sort {
                return Err(SortError::BoundMismatch {
                    name: name.to_string(),
                    bound: *bound,
                    used: sort,
                });
            }
            return Ok(());
        }
        match self.free.get(name) {
            Some(prev) if *prev != sort => Err(SortError::FreeConflict {
                name: name.to_string(),
                first: *prev,
                second: sort,
            }),
            _ => {
                self.free.insert(name.to_string(), sort);
                Ok(())
            }
        }
    }

    fn subject(&mut self, s: &SubjectRef) -> Result<(), SortError> {
        if let SubjectRef::Var(v) = s {
            self.occurrence(v, Sort::Subject)?;
        }
        Ok(())
    }

    fn walk(&mut self, f: &Formula) -> Result<(), SortError> {
        match f {
            Formula::Top | Formula::Atom(_) | Formula::TermConst(_) => Ok(()),
            Formula::TermVar(v) => self.occurrence(v, Sort::Term),
            Formula::Apply(_, s) | Formula::OpenConst(_, s) => self.subject(s),
            Formula::OpenApply(v, s) => {
                self.occurrence(v, Sort::Open)?;
                self.subject(s)
            }
            Formula::Not(a) | Formula::Nec(a) => self.walk(a),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b)
            | Formula::Ob(a, b) => {
                self.walk(a)?;
                self.walk(b)
            }
            Formula::ForallSubject(v, body) => self.binder(v, Sort::Subject, body),
            Formula::ForallTerm(v, body) => self.binder(v, Sort::Term, body),
            Formula::ForallOpen(v, body) => self.binder(v, Sort::Open, body),
            Formula::ForallMaxim(v, body) => self.binder(v, Sort::Maxim, body),
            Formula::MacroCall(_, args) => {
                for arg in args {
                    match arg {
                        MacroArg::Subject(s) => self.subject(s)?,
                        MacroArg::Maxim(MaximRef::Var(v)) => self.occurrence(v, Sort::Maxim)?,
                        MacroArg::Maxim(MaximRef::Lit(m)) => {
                            self.walk(&m.circumstances)?;
                            if let ActRef::OpenVar(v) = &m.act {
                                self.occurrence(v, Sort::Open)?;
                            }
                            self.walk(&m.goal)?;
                        }
                    }
                }
                Ok(())
            }
        }
    }

    fn binder(&mut self, var: &str, sort: Sort, body: &Formula) -> Result<(), SortError> {
        self.bound.push((var.to_string(), sort));
        let r = self.walk(body);
        self.bound.pop();
        r
    }
}

/// Free variables of a formula with their sorts.
pub fn free_sorts(f: &Formula) -> Result<BTreeMap<String, Sort>, SortError> {
    let mut w = SortWalker { bound: Vec::new(), free: BTreeMap::new() };
    w.walk(f)?;
    Ok(w.free)
}

/// A formula is closed when it has no free variables of any sort.
pub fn check_closed(f: &Formula) -> Result<(), SortError> {
    let free = free_sorts(f)?;
    if free.is_empty() {
        Ok(())
    } else {
        Err(SortError::NotClosed { names: free.keys().cloned().collect() })
    }
}

/// Atoms, action constants, and subject constants the formula mentions.
pub fn signature(f: &Formula) -> Signature {
    fn subject(sig: &mut Signature, s: &SubjectRef) {
        if let SubjectRef::Const(c) = s {
            sig.subject_consts.insert(c.clone());
        }
    }
    fn walk(sig: &mut Signature, f: &Formula) {
        match f {
            Formula::Top | Formula::TermVar(_) | Formula::TermConst(_) => {}
            Formula::Atom(a) => {
                sig.atoms.insert(a.clone());
            }
            Formula::Apply(a, s) => {
                sig.actions.insert(a.clone());
                subject(sig, s);
            }
            Formula::OpenApply(_, s) | Formula::OpenConst(_, s) => subject(sig, s),
            Formula::Not(a) | Formula::Nec(a) => walk(sig, a),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b)
            | Formula::Ob(a, b) => {
                walk(sig, a);
                walk(sig, b);
            }
            Formula::ForallSubject(_, body)
            | Formula::ForallTerm(_, body)
            | Formula::ForallOpen(_, body)
            | Formula::ForallMaxim(_, body) => walk(sig, body),
            Formula::MacroCall(_, args) => {
                for arg in args {
                    match arg {
                        MacroArg::Subject(s) => subject(sig, s),
                        MacroArg::Maxim(MaximRef::Var(_)) => {}
                        MacroArg::Maxim(MaximRef::Lit(m)) => {
                            walk(sig, &m.circumstances);
                            if let ActRef::Action(a) = &m.act {
                                sig.actions.insert(a.clone());
                            }
                            walk(sig, &m.goal);
                        }
                    }
                }
            }
        }
    }
    let mut sig = Signature::default();
    walk(&mut sig, f);
    sig
}
