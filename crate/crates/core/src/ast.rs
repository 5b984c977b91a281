//! Abstract syntax for the logic.
//!
//! Formulas are interpreted over finite models with a world domain and a
//! subject domain.  Four variable sorts exist, each quantified by its own
//! binder: subjects (individuals), terms (world sets), open sentences
//! (subject-indexed world sets) and maxims (circumstance/act/goal triples).
//!
//! `TermConst` and `OpenConst` are grounded literals: they name a world set
//! (or one per subject) directly by extension.  The parser produces them from
//! `(worlds ...)` / `(open-app ...)` forms and `ground` emits them when
//! instantiating quantifiers, so a grounded formula is still a `Formula`.

use crate::model::WorldMask;

/// Reference to a subject: either a named constant interpreted by the model,
/// or a variable bound by `forall-subject`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SubjectRef {
    Const(String),
    Var(String),
}

impl SubjectRef {
    pub fn name(&self) -> &str {
        match self {
            SubjectRef::Const(n) | SubjectRef::Var(n) => n,
        }
    }
}

/// The act slot of a maxim: a named action constant or an open variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ActRef {
    Action(String),
    OpenVar(String),
}

impl ActRef {
    pub fn name(&self) -> &str {
        match self {
            ActRef::Action(n) | ActRef::OpenVar(n) => n,
        }
    }
}

/// A maxim literal: circumstances, act, goal.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MaximExpr {
    pub circumstances: Formula,
    pub act: ActRef,
    pub goal: Formula,
}

/// A maxim argument position: a literal triple or a bound maxim variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum MaximRef {
    Lit(Box<MaximExpr>),
    Var(String),
}

/// Argument to a macro call.  The built-in macros all take a maxim followed
/// by a subject.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum MacroArg {
    Maxim(MaximRef),
    Subject(SubjectRef),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    /// The constant truth; `false` is sugar for `(not true)`.
    Top,
    /// Propositional atom, interpreted by the model valuation.
    Atom(String),
    /// Action applied to a subject: `(act lie s1)`.
    Apply(String, SubjectRef),
    /// Open variable applied to a subject; the variable is bound by
    /// `forall-open`.
    OpenApply(String, SubjectRef),
    /// Term variable bound by `forall-term`.
    TermVar(String),
    /// Grounded term literal: the world set it denotes, given directly.
    TermConst(WorldMask),
    /// Grounded open literal: one world set per subject index, applied to a
    /// subject.
    OpenConst(Vec<WorldMask>, SubjectRef),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    /// Global necessity: true at a world iff the body holds at every world.
    Nec(Box<Formula>),
    /// Dyadic obligation `Ob(body | context)`.  World-independent: true iff
    /// the extension of `body` is obligatory given the extension of
    /// `context`.
    Ob(Box<Formula>, Box<Formula>),
    ForallSubject(String, Box<Formula>),
    ForallTerm(String, Box<Formula>),
    ForallOpen(String, Box<Formula>),
    ForallMaxim(String, Box<Formula>),
    /// Call to one of the built-in deontic macros (`will`, `effective`,
    /// `not-universalizable`, `well-formed`, `prohibited`, `permissible`,
    /// `obligatory`).  Eliminated by expansion before evaluation.
    MacroCall(String, Vec<MacroArg>),
}

impl Formula {
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }
    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }
    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }
    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }
    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::Iff(Box::new(a), Box::new(b))
    }
    pub fn nec(f: Formula) -> Formula {
        Formula::Nec(Box::new(f))
    }
    pub fn ob(body: Formula, context: Formula) -> Formula {
        Formula::Ob(Box::new(body), Box::new(context))
    }
    /// Monadic obligation sugar: context is `true`.
    pub fn ob1(body: Formula) -> Formula {
        Formula::ob(body, Formula::Top)
    }
    pub fn atom(name: &str) -> Formula {
        Formula::Atom(name.to_string())
    }
    pub fn apply(action: &str, subject: SubjectRef) -> Formula {
        Formula::Apply(action.to_string(), subject)
    }
    pub fn forall_subject(var: &str, f: Formula) -> Formula {
        Formula::ForallSubject(var.to_string(), Box::new(f))
    }
    pub fn forall_term(var: &str, f: Formula) -> Formula {
        Formula::ForallTerm(var.to_string(), Box::new(f))
    }
    pub fn forall_open(var: &str, f: Formula) -> Formula {
        Formula::ForallOpen(var.to_string(), Box::new(f))
    }
    pub fn forall_maxim(var: &str, f: Formula) -> Formula {
        Formula::ForallMaxim(var.to_string(), Box::new(f))
    }
    /// Possibility: `(diamond f)` is `(not (box (not f)))`.
    pub fn diamond(f: Formula) -> Formula {
        Formula::not(Formula::nec(Formula::not(f)))
    }

    /// Fold a nonempty list into a right-nested conjunction.
    pub fn and_all(mut fs: Vec<Formula>) -> Formula {
        match fs.len() {
            0 => Formula::Top,
            _ => {
                let mut acc = fs.pop().unwrap();
                while let Some(f) = fs.pop() {
                    acc = Formula::and(f, acc);
                }
                acc
            }
        }
    }

    /// True if no `MacroCall` or `ForallMaxim` node remains.
    pub fn is_macro_free(&self) -> bool {
        match self {
            Formula::MacroCall(..) | Formula::ForallMaxim(..) => false,
            Formula::Top
            | Formula::Atom(_)
            | Formula::Apply(..)
            | Formula::OpenApply(..)
            | Formula::TermVar(_)
            | Formula::TermConst(_)
            | Formula::OpenConst(..) => true,
            Formula::Not(a) | Formula::Nec(a) => a.is_macro_free(),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b)
            | Formula::Ob(a, b) => a.is_macro_free() && b.is_macro_free(),
            Formula::ForallSubject(_, f) | Formula::ForallTerm(_, f) | Formula::ForallOpen(_, f) => {
                f.is_macro_free()
            }
        }
    }

    /// True if no quantifier, macro, or variable occurrence remains.
    pub fn is_ground(&self) -> bool {
        match self {
            Formula::Top | Formula::Atom(_) | Formula::TermConst(_) => true,
            Formula::Apply(_, s) | Formula::OpenConst(_, s) => {
                matches!(s, SubjectRef::Const(_))
            }
            Formula::OpenApply(..) | Formula::TermVar(_) => false,
            Formula::Not(a) | Formula::Nec(a) => a.is_ground(),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b)
            | Formula::Ob(a, b) => a.is_ground() && b.is_ground(),
            Formula::ForallSubject(..)
            | Formula::ForallTerm(..)
            | Formula::ForallOpen(..)
            | Formula::ForallMaxim(..)
            | Formula::MacroCall(..) => false,
        }
    }
}

/// Canonical world name for index `i` (zero-based): `w1`, `w2`, ...
pub fn world_name(i: usize) -> String {
    format!("w{}", i + 1)
}

/// Canonical subject name for index `i` (zero-based): `s1`, `s2`, ...
pub fn subject_name(i: usize) -> String {
    format!("s{}", i + 1)
}

/// Parse a canonical world name back to its index.
pub fn world_index(name: &str) -> Option<usize> {
    let rest = name.strip_prefix('w')?;
    if rest.is_empty() || rest.starts_with('0') {
        return None;
    }
    rest.parse::<usize>().ok().map(|n| n - 1)
}

/// Parse a canonical subject name back to its index.
pub fn subject_index(name: &str) -> Option<usize> {
    let rest = name.strip_prefix('s')?;
    if rest.is_empty() || rest.starts_with('0') {
        return None;
    }
    rest.parse::<usize>().ok().map(|n| n - 1)
}
