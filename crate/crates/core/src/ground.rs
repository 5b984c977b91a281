//! Grounding: replace every quantifier by the finite conjunction of its
//! instances at fixed domain sizes.
//!
//! Subjects instantiate to the canonical constants `s1..sn` (understood as
//! naming subject 1..n of the model), terms to `(worlds ...)` literals, open
//! variables to `(open-app ...)` literals.  A `forall-maxim` binder grounds
//! to its body alone: maxim variables occur only inside macro calls, which
//! must have been expanded away before grounding.

use thiserror::Error;

use crate::ast::{subject_name, Formula, SubjectRef};
use crate::bounds::Bounds;
use crate::model::{full_mask, WorldMask, MAX_WORLDS};

pub const DEFAULT_INSTANTIATION_CAP: u64 = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroundError {
    #[error("grounding exceeded {cap} quantifier instantiations")]
    Blowup { cap: u64 },
    #[error("macro `{0}` must be expanded before grounding")]
    MacroPresent(String),
    #[error("unbound variable `{0}`; ground only closed formulas")]
    UnboundVariable(String),
    #[error("bounds ask for {0} worlds; at most {MAX_WORLDS} supported")]
    TooManyWorlds(usize),
    #[error("bounds must allow at least one world and one subject")]
    EmptyDomain,
}

enum Binding {
    Subject(usize),
    Term(WorldMask),
    Open(Vec<WorldMask>),
}

struct Grounder {
    n_subjects: usize,
    full: WorldMask,
    env: Vec<(String, Binding)>,
    cap: u64,
    used: u64,
}

impl Grounder {
    fn lookup(&self, name: &str) -> Option<&Binding> {
        self.env
            .iter()
            .rev()
            .find(|(n, _)| n == name)
            .map(|(_, b)| b)
    }

    fn charge(&mut self) -> Result<(), GroundError> {
        self.used += 1;
        if self.used > self.cap {
            Err(GroundError::Blowup { cap: self.cap })
        } else {
            Ok(())
        }
    }

    fn subject(&self, s: &SubjectRef) -> Result<SubjectRef, GroundError> {
        match s {
            SubjectRef::Const(_) => Ok(s.clone()),
            SubjectRef::Var(v) => match self.lookup(v) {
                Some(Binding::Subject(i)) => Ok(SubjectRef::Const(subject_name(*i))),
                _ => Err(GroundError::UnboundVariable(v.clone())),
            },
        }
    }

    fn go(&mut self, f: &Formula) -> Result<Formula, GroundError> {
        match f {
            Formula::Top | Formula::Atom(_) | Formula::TermConst(_) => Ok(f.clone()),
            Formula::TermVar(v) => match self.lookup(v) {
                Some(Binding::Term(m)) => Ok(Formula::TermConst(*m)),
                _ => Err(GroundError::UnboundVariable(v.clone())),
            },
            Formula::Apply(a, s) => Ok(Formula::Apply(a.clone(), self.subject(s)?)),
            Formula::OpenApply(v, s) => {
                let s = self.subject(s)?;
                match self.lookup(v) {
                    Some(Binding::Open(row)) => Ok(Formula::OpenConst(row.clone(), s)),
                    _ => Err(GroundError::UnboundVariable(v.clone())),
                }
            }
            Formula::OpenConst(row, s) => Ok(Formula::OpenConst(row.clone(), self.subject(s)?)),
            Formula::Not(a) => Ok(Formula::not(self.go(a)?)),
            Formula::Nec(a) => Ok(Formula::nec(self.go(a)?)),
            Formula::And(a, b) => Ok(Formula::and(self.go(a)?, self.go(b)?)),
            Formula::Or(a, b) => Ok(Formula::or(self.go(a)?, self.go(b)?)),
            Formula::Implies(a, b) => Ok(Formula::implies(self.go(a)?, self.go(b)?)),
            Formula::Iff(a, b) => Ok(Formula::iff(self.go(a)?, self.go(b)?)),
            Formula::Ob(a, b) => Ok(Formula::ob(self.go(a)?, self.go(b)?)),
            Formula::ForallSubject(v, body) => {
                let mut parts = Vec::with_capacity(self.n_subjects);
                for i in 0..self.n_subjects {
                    self.charge()?;
                    self.env.push((v.clone(), Binding::Subject(i)));
                    let r = self.go(body);
                    self.env.pop();
                    parts.push(r?);
                }
                Ok(Formula::and_all(parts))
            }
            Formula::ForallTerm(v, body) => {
                let mut parts = Vec::with_capacity(self.full as usize + 1);
                for m in 0..=self.full {
                    self.charge()?;
                    self.env.push((v.clone(), Binding::Term(m)));
                    let r = self.go(body);
                    self.env.pop();
                    parts.push(r?);
                }
                Ok(Formula::and_all(parts))
            }
            Formula::ForallOpen(v, body) => {
                let mut parts = Vec::new();
                let mut row: Vec<WorldMask> = vec![0; self.n_subjects];
                loop {
                    self.charge()?;
                    self.env.push((v.clone(), Binding::Open(row.clone())));
                    let r = self.go(body);
                    self.env.pop();
                    parts.push(r?);
                    let mut k = 0;
                    loop {
                        if k == self.n_subjects {
                            return Ok(Formula::and_all(parts));
                        }
                        if row[k] < self.full {
                            row[k] += 1;
                            break;
                        }
                        row[k] = 0;
                        k += 1;
                    }
                }
            }
            // Maxim variables occur only in macro calls, which are already
            // gone, so the body cannot mention the binder.
            Formula::ForallMaxim(_, body) => {
                self.charge()?;
                self.go(body)
            }
            Formula::MacroCall(name, _) => Err(GroundError::MacroPresent(name.clone())),
        }
    }
}

pub fn ground_with_cap(f: &Formula, bounds: &Bounds, cap: u64) -> Result<Formula, GroundError> {
    if bounds.worlds == 0 || bounds.subjects == 0 {
        return Err(GroundError::EmptyDomain);
    }
    if bounds.worlds > MAX_WORLDS {
        return Err(GroundError::TooManyWorlds(bounds.worlds));
    }
    let mut g = Grounder {
        n_subjects: bounds.subjects,
        full: full_mask(bounds.worlds),
        env: Vec::new(),
        cap,
        used: 0,
    };
    g.go(f)
}

/// Ground with the default instantiation cap.
pub fn ground(f: &Formula, bounds: &Bounds) -> Result<Formula, GroundError> {
    ground_with_cap(f, bounds, DEFAULT_INSTANTIATION_CAP)
}
