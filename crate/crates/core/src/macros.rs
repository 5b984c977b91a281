//! Deontic macro layer: `will`, `effective`, `not-universalizable`,
//! `well-formed`, `prohibited`, `permissible`, `obligatory`.
//!
//! Macros are expansion templates over a maxim (circumstances `C`, act `A`,
//! goal `G`) and a subject `s`:
//!
//! * `will`      — `(box (implies C A(s)))`: the subject's acting on the
//!   maxim, read as a necessary commitment.
//! * `effective` — `(box (iff (will ...) G))`: willing it is exactly what
//!   brings the goal about.
//! * `not-universalizable` — everyone willing it would necessarily defeat
//!   its effectiveness for `s`.
//! * `well-formed` — the maxim is contingent: circumstances guarantee
//!   neither the goal nor the act.  Two readings, see
//!   [`WellFormedReading`].
//! * `prohibited` / `permissible` / `obligatory` — dyadic obligation of the
//!   (negated) act under the circumstances.
//!
//! `forall-maxim` quantifiers are lowered during expansion into a
//! term/open/term quantifier prefix over the maxim's three components, with
//! capture-avoiding fresh names, so expanded output contains neither macro
//! calls nor maxim binders.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::ast::{ActRef, Formula, MacroArg, MaximRef, SubjectRef};
use crate::parser::is_reserved;

/// How `well-formed` distributes its contingency requirement over
/// necessity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WellFormedReading {
    /// `(and (not (box (implies C G))) (not (box (implies C A(s)))))` —
    /// neither the goal nor the act is necessitated by the circumstances.
    #[default]
    NegatedBoxes,
    /// `(box (and (not (implies C G)) (not (implies C A(s)))))` — at every
    /// world the circumstances fail to yield the goal and fail to yield the
    /// act.  Much stronger; kept selectable for comparison runs.
    BoxedConjunction,
}

impl WellFormedReading {
    pub fn as_str(&self) -> &'static str {
        match self {
            WellFormedReading::NegatedBoxes => "negated-boxes",
            WellFormedReading::BoxedConjunction => "boxed-conjunction",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "negated-boxes" => Some(WellFormedReading::NegatedBoxes),
            "boxed-conjunction" => Some(WellFormedReading::BoxedConjunction),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ExpansionConfig {
    pub reading: WellFormedReading,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExpandError {
    #[error("unknown macro `{0}`")]
    UnknownMacro(String),
    #[error("macro `{name}` takes {expected} arguments, got {got}")]
    Arity { name: String, expected: usize, got: usize },
    #[error("macro `{name}` argument {pos} has the wrong sort")]
    ArgSort { name: String, pos: usize },
    #[error("maxim variable `{0}` is not bound by an enclosing forall-maxim")]
    UnboundMaximVar(String),
}

/// A maxim's three components, as used during expansion.
#[derive(Debug, Clone)]
struct Components {
    circumstances: Formula,
    act: ActRef,
    goal: Formula,
}

/// Every identifier occurring anywhere in a formula: atoms, constants,
/// variables, binders.  Conservative superset used for freshness.
pub(crate) fn collect_names(f: &Formula, out: &mut BTreeSet<String>) {
    fn subject(out: &mut BTreeSet<String>, s: &SubjectRef) {
        out.insert(s.name().to_string());
    }
    match f {
        Formula::Top | Formula::TermConst(_) => {}
        Formula::Atom(n) | Formula::TermVar(n) => {
            out.insert(n.clone());
        }
        Formula::Apply(a, s) | Formula::OpenApply(a, s) => {
            out.insert(a.clone());
            subject(out, s);
        }
        Formula::OpenConst(_, s) => subject(out, s),
        Formula::Not(a) | Formula::Nec(a) => collect_names(a, out),
        Formula::And(a, b)
        | Formula::Or(a, b)
        | Formula::Implies(a, b)
        | Formula::Iff(a, b)
        | Formula::Ob(a, b) => {
            collect_names(a, out);
            collect_names(b, out);
        }
        Formula::ForallSubject(v, body)
        | Formula::ForallTerm(v, body)
        | Formula::ForallOpen(v, body)
        | Formula::ForallMaxim(v, body) => {
            out.insert(v.clone());
            collect_names(body, out);
        }
        Formula::MacroCall(name, args) => {
            out.insert(name.clone());
            for arg in args {
                match arg {
                    MacroArg::Subject(s) => subject(out, s),
                    MacroArg::Maxim(MaximRef::Var(v)) => {
                        out.insert(v.clone());
                    }
                    MacroArg::Maxim(MaximRef::Lit(m)) => {
                        collect_names(&m.circumstances, out);
                        out.insert(m.act.name().to_string());
                        collect_names(&m.goal, out);
                    }
                }
            }
        }
    }
}

fn fresh(base: &str, used: &BTreeSet<String>) -> String {
    if !used.contains(base) && !is_reserved(base) {
        return base.to_string();
    }
    for k in 2.. {
        let cand = format!("{base}{k}");
        if !used.contains(&cand) && !is_reserved(&cand) {
            return cand;
        }
    }
    unreachable!()
}

fn apply_act(act: &ActRef, s: &SubjectRef) -> Formula {
    match act {
        ActRef::Action(a) => Formula::Apply(a.clone(), s.clone()),
        ActRef::OpenVar(v) => Formula::OpenApply(v.clone(), s.clone()),
    }
}

fn will_f(m: &Components, s: &SubjectRef) -> Formula {
    Formula::nec(Formula::implies(
        m.circumstances.clone(),
        apply_act(&m.act, s),
    ))
}

fn effective_f(m: &Components, s: &SubjectRef) -> Formula {
    Formula::nec(Formula::iff(will_f(m, s), m.goal.clone()))
}

fn not_universalizable_f(m: &Components, s: &SubjectRef) -> Formula {
    let mut used = BTreeSet::new();
    collect_names(&m.circumstances, &mut used);
    collect_names(&m.goal, &mut used);
    used.insert(m.act.name().to_string());
    used.insert(s.name().to_string());
    let p = fresh("p", &used);
    Formula::nec(Formula::implies(
        Formula::forall_subject(&p, will_f(m, &SubjectRef::Var(p.clone()))),
        Formula::not(effective_f(m, s)),
    ))
}

fn well_formed_f(m: &Components, s: &SubjectRef, reading: WellFormedReading) -> Formula {
    let to_goal = Formula::implies(m.circumstances.clone(), m.goal.clone());
    let to_act = Formula::implies(m.circumstances.clone(), apply_act(&m.act, s));
    match reading {
        WellFormedReading::NegatedBoxes => Formula::and(
            Formula::not(Formula::nec(to_goal)),
            Formula::not(Formula::nec(to_act)),
        ),
        WellFormedReading::BoxedConjunction => Formula::nec(Formula::and(
            Formula::not(to_goal),
            Formula::not(to_act),
        )),
    }
}

fn prohibited_f(m: &Components, s: &SubjectRef) -> Formula {
    Formula::ob(Formula::not(apply_act(&m.act, s)), m.circumstances.clone())
}

struct Expander {
    cfg: ExpansionConfig,
    maxims: Vec<(String, Components)>,
}

impl Expander {
    fn lookup(&self, name: &str) -> Option<&Components> {
        self.maxims
            .iter()
            .rev()
            .find(|(n, _)| n == name)
            .map(|(_, c)| c)
    }

    fn expand(&mut self, f: &Formula) -> Result<Formula, ExpandError> {
        match f {
            Formula::Top
            | Formula::Atom(_)
            | Formula::Apply(..)
            | Formula::OpenApply(..)
            | Formula::TermVar(_)
            | Formula::TermConst(_)
            | Formula::OpenConst(..) => Ok(f.clone()),
            Formula::Not(a) => Ok(Formula::not(self.expand(a)?)),
            Formula::Nec(a) => Ok(Formula::nec(self.expand(a)?)),
            Formula::And(a, b) => Ok(Formula::and(self.expand(a)?, self.expand(b)?)),
            Formula::Or(a, b) => Ok(Formula::or(self.expand(a)?, self.expand(b)?)),
            Formula::Implies(a, b) => Ok(Formula::implies(self.expand(a)?, self.expand(b)?)),
            Formula::Iff(a, b) => Ok(Formula::iff(self.expand(a)?, self.expand(b)?)),
            Formula::Ob(a, b) => Ok(Formula::ob(self.expand(a)?, self.expand(b)?)),
            Formula::ForallSubject(v, body) => {
                Ok(Formula::ForallSubject(v.clone(), Box::new(self.expand(body)?)))
            }
            Formula::ForallTerm(v, body) => {
                Ok(Formula::ForallTerm(v.clone(), Box::new(self.expand(body)?)))
            }
            Formula::ForallOpen(v, body) => {
                Ok(Formula::ForallOpen(v.clone(), Box::new(self.expand(body)?)))
            }
            Formula::ForallMaxim(v, body) => {
                let mut used = BTreeSet::new();
                collect_names(body, &mut used);
                let mc = fresh(&format!("{v}-circ"), &used);
                used.insert(mc.clone());
                let ma = fresh(&format!("{v}-act"), &used);
                used.insert(ma.clone());
                let mg = fresh(&format!("{v}-goal"), &used);
                used.insert(mg.clone());
                let components = Components {
                    circumstances: Formula::TermVar(mc.clone()),
                    act: ActRef::OpenVar(ma.clone()),
                    goal: Formula::TermVar(mg.clone()),
                };
                self.maxims.push((v.clone(), components));
                let body = self.expand(body);
                self.maxims.pop();
                Ok(Formula::ForallTerm(
                    mc,
                    Box::new(Formula::ForallOpen(
                        ma,
                        Box::new(Formula::ForallTerm(mg, Box::new(body?))),
                    )),
                ))
            }
            Formula::MacroCall(name, args) => self.expand_call(name, args),
        }
    }

    fn expand_call(&mut self, name: &str, args: &[MacroArg]) -> Result<Formula, ExpandError> {
        if !crate::parser::MACRO_NAMES.contains(&name) {
            return Err(ExpandError::UnknownMacro(name.to_string()));
        }
        if args.len() != 2 {
            return Err(ExpandError::Arity {
                name: name.to_string(),
                expected: 2,
                got: args.len(),
            });
        }
        let maxim = match &args[0] {
            MacroArg::Maxim(MaximRef::Var(v)) => self
                .lookup(v)
                .cloned()
                .ok_or_else(|| ExpandError::UnboundMaximVar(v.clone()))?,
            MacroArg::Maxim(MaximRef::Lit(m)) => Components {
                circumstances: self.expand(&m.circumstances)?,
                act: m.act.clone(),
                goal: self.expand(&m.goal)?,
            },
            MacroArg::Subject(_) => {
                return Err(ExpandError::ArgSort { name: name.to_string(), pos: 1 })
            }
        };
        let subject = match &args[1] {
            MacroArg::Subject(s) => s.clone(),
            MacroArg::Maxim(_) => {
                return Err(ExpandError::ArgSort { name: name.to_string(), pos: 2 })
            }
        };
        Ok(match name {
            "will" => will_f(&maxim, &subject),
            "effective" => effective_f(&maxim, &subject),
            "not-universalizable" => not_universalizable_f(&maxim, &subject),
            "well-formed" => well_formed_f(&maxim, &subject, self.cfg.reading),
            "prohibited" => prohibited_f(&maxim, &subject),
            "permissible" => Formula::not(prohibited_f(&maxim, &subject)),
            "obligatory" => Formula::ob(
                apply_act(&maxim.act, &subject),
                maxim.circumstances.clone(),
            ),
            _ => unreachable!(),
        })
    }
}

/// Expand every macro call and lower every `forall-maxim`; the result
/// satisfies [`Formula::is_macro_free`].  Idempotent on its own output.
pub fn expand(f: &Formula, cfg: &ExpansionConfig) -> Result<Formula, ExpandError> {
    let mut e = Expander { cfg: *cfg, maxims: Vec::new() };
    e.expand(f)
}

pub fn expand_all(fs: &[Formula], cfg: &ExpansionConfig) -> Result<Vec<Formula>, ExpandError> {
    fs.iter().map(|f| expand(f, cfg)).collect()
}
