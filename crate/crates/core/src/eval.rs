//! Direct evaluation of macro-free formulas over a finite model.
//!
//! Everything is computed as extensions (world masks) bottom-up, so each
//! subformula is evaluated once per quantifier instantiation rather than
//! once per world; `box` and `ob` then reduce to mask tests.  At the bounds
//! this engine targets, that makes a memo table unnecessary.

use thiserror::Error;

use crate::ast::{Formula, SubjectRef};
use crate::model::{full_mask, Model, WorldMask};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("macro `{0}` not expanded before evaluation")]
    MacroPresent(String),
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("atom `{0}` has no valuation in the model")]
    UnknownAtom(String),
    #[error("action `{0}` has no valuation in the model")]
    UnknownAction(String),
    #[error("subject constant `{0}` is not interpreted by the model")]
    UnknownSubjectConst(String),
    #[error("open literal lists {got} subject rows, model has {expected} subjects")]
    OpenConstArity { expected: usize, got: usize },
    #[error("world-set literal mentions a world outside the model")]
    MaskOutOfDomain,
    #[error("world index {0} out of range for the model")]
    WorldOutOfRange(usize),
}

#[derive(Clone)]
enum Binding {
    Subject(usize),
    Term(WorldMask),
    Open(Vec<WorldMask>),
}

struct Env<'m> {
    model: &'m Model,
    stack: Vec<(String, Binding)>,
}

impl<'m> Env<'m> {
    fn lookup(&self, name: &str) -> Option<&Binding> {
        self.stack
            .iter()
            .rev()
            .find(|(n, _)| n == name)
            .map(|(_, b)| b)
    }

    fn subject_index(&self, s: &SubjectRef) -> Result<usize, EvalError> {
        match s {
            SubjectRef::Var(v) => match self.lookup(v) {
                Some(Binding::Subject(i)) => Ok(*i),
                _ => Err(EvalError::UnboundVariable(v.clone())),
            },
            SubjectRef::Const(c) => self
                .model
                .subj_interp
                .get(c)
                .copied()
                .ok_or_else(|| EvalError::UnknownSubjectConst(c.clone())),
        }
    }
}

fn ext(f: &Formula, env: &mut Env) -> Result<WorldMask, EvalError> {
    let full = env.model.full();
    match f {
        Formula::Top => Ok(full),
        Formula::Atom(a) => env
            .model
            .val
            .get(a)
            .copied()
            .ok_or_else(|| EvalError::UnknownAtom(a.clone())),
        Formula::Apply(a, s) => {
            let i = env.subject_index(s)?;
            let row = env
                .model
                .act_val
                .get(a)
                .ok_or_else(|| EvalError::UnknownAction(a.clone()))?;
            Ok(row[i])
        }
        Formula::OpenApply(v, s) => {
            let i = env.subject_index(s)?;
            match env.lookup(v) {
                Some(Binding::Open(row)) => Ok(row[i]),
                _ => Err(EvalError::UnboundVariable(v.clone())),
            }
        }
        Formula::TermVar(v) => match env.lookup(v) {
            Some(Binding::Term(m)) => Ok(*m),
            _ => Err(EvalError::UnboundVariable(v.clone())),
        },
        Formula::TermConst(m) => {
            if m & !full != 0 {
                Err(EvalError::MaskOutOfDomain)
            } else {
                Ok(*m)
            }
        }
        Formula::OpenConst(masks, s) => {
            if masks.len() != env.model.n_subjects() {
                return Err(EvalError::OpenConstArity {
                    expected: env.model.n_subjects(),
                    got: masks.len(),
                });
            }
            if masks.iter().any(|m| m & !full != 0) {
                return Err(EvalError::MaskOutOfDomain);
            }
            let i = env.subject_index(s)?;
            Ok(masks[i])
        }
        Formula::Not(a) => Ok(full & !ext(a, env)?),
        Formula::And(a, b) => Ok(ext(a, env)? & ext(b, env)?),
        Formula::Or(a, b) => Ok(ext(a, env)? | ext(b, env)?),
        Formula::Implies(a, b) => Ok((full & !ext(a, env)?) | ext(b, env)?),
        Formula::Iff(a, b) => Ok(full & !(ext(a, env)? ^ ext(b, env)?)),
        Formula::Nec(a) => Ok(if ext(a, env)? == full { full } else { 0 }),
        Formula::Ob(body, ctx) => {
            let c = ext(ctx, env)?;
            let b = ext(body, env)?;
            Ok(if env.model.ob_contains(c, b) { full } else { 0 })
        }
        Formula::ForallSubject(v, body) => {
            let mut acc = full;
            for i in 0..env.model.n_subjects() {
                env.stack.push((v.clone(), Binding::Subject(i)));
                let r = ext(body, env);
                env.stack.pop();
                acc &= r?;
                if acc == 0 {
                    break;
                }
            }
            Ok(acc)
        }
        Formula::ForallTerm(v, body) => {
            let mut acc = full;
            for m in 0..=full {
                env.stack.push((v.clone(), Binding::Term(m)));
                let r = ext(body, env);
                env.stack.pop();
                acc &= r?;
                if acc == 0 {
                    break;
                }
            }
            Ok(acc)
        }
        Formula::ForallOpen(v, body) => {
            let ns = env.model.n_subjects();
            let mut row: Vec<WorldMask> = vec![0; ns];
            let mut acc = full;
            loop {
                env.stack.push((v.clone(), Binding::Open(row.clone())));
                let r = ext(body, env);
                env.stack.pop();
                acc &= r?;
                if acc == 0 {
                    break;
                }
                // odometer over all subject-indexed world-set rows
                let mut k = 0;
                loop {
                    if k == ns {
                        return Ok(acc);
                    }
                    if row[k] < full {
                        row[k] += 1;
                        break;
                    }
                    row[k] = 0;
                    k += 1;
                }
            }
            Ok(acc)
        }
        // A macro-free body cannot mention a maxim variable (only macro
        // arguments can), so the conjunction over the nonempty maxim domain
        // collapses to a single instance.
        Formula::ForallMaxim(_, body) => ext(body, env),
        Formula::MacroCall(name, _) => Err(EvalError::MacroPresent(name.clone())),
    }
}

/// Worlds at which a closed, macro-free formula holds.
pub fn extension(f: &Formula, m: &Model) -> Result<WorldMask, EvalError> {
    let mut env = Env { model: m, stack: Vec::new() };
    ext(f, &mut env)
}

/// Truth of a closed, macro-free formula at one world.
pub fn eval(f: &Formula, m: &Model, world: usize) -> Result<bool, EvalError> {
    if world >= m.n_worlds() {
        return Err(EvalError::WorldOutOfRange(world));
    }
    Ok(extension(f, m)? & (1 << world) != 0)
}

/// Truth at every world of the model.
pub fn holds_everywhere(f: &Formula, m: &Model) -> Result<bool, EvalError> {
    Ok(extension(f, m)? == m.full())
}

pub fn full_mask_for(m: &Model) -> WorldMask {
    full_mask(m.n_worlds())
}
