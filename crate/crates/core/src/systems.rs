//! The three comparative systems: a bare naive universalization reading, a
//! single-axiom permissibility-universalizing system, and the full
//! maxim-evaluating system.
//!
//! Axioms are stored already expanded (macro-free), closed, and ready for
//! search or validity checking.

use serde::{Deserialize, Serialize};

use crate::ast::{ActRef, Formula, MacroArg, MaximExpr, MaximRef, SubjectRef};
use crate::macros::{expand, ExpansionConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SystemKind {
    Naive,
    Kroy,
    Custom,
}

impl SystemKind {
    pub const ALL: [SystemKind; 3] = [SystemKind::Naive, SystemKind::Kroy, SystemKind::Custom];

    pub fn as_str(&self) -> &'static str {
        match self {
            SystemKind::Naive => "naive",
            SystemKind::Kroy => "kroy",
            SystemKind::Custom => "custom",
        }
    }

    pub fn parse(s: &str) -> Option<SystemKind> {
        match s {
            "naive" => Some(SystemKind::Naive),
            "kroy" => Some(SystemKind::Kroy),
            "custom" => Some(SystemKind::Custom),
            _ => None,
        }
    }
}

impl std::fmt::Display for SystemKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone)]
pub struct System {
    pub kind: SystemKind,
    /// Closed, macro-free axioms layered on top of the base dyadic logic.
    pub axioms: Vec<Formula>,
    /// Whether the system's vocabulary can express judgments about maxims.
    pub evaluates_maxims: bool,
}

impl System {
    pub fn build(kind: SystemKind, cfg: &ExpansionConfig) -> System {
        match kind {
            SystemKind::Naive => System {
                kind,
                axioms: Vec::new(),
                evaluates_maxims: false,
            },
            SystemKind::Kroy => System {
                kind,
                axioms: vec![kroy_axiom()],
                evaluates_maxims: false,
            },
            SystemKind::Custom => System {
                kind,
                axioms: vec![custom_ful(cfg), distributive_background()],
                evaluates_maxims: true,
            },
        }
    }
}

/// If an act is unconditionally permissible for one subject, it is so for
/// every subject — act-level universalization, quantified over all open
/// sentences, with permissibility read as `¬O(¬a(x) | ⊤)`.
///
/// With two or more subjects this axiom plus the frame conditions forces
/// the obligation function to be empty (any obligation at the top context
/// can be rewritten, via a suitable open sentence, into an obligation of
/// the empty set).  With one subject it is a tautology.  Both degenerate
/// regimes are exercised deliberately by the validity tests.
pub fn kroy_axiom() -> Formula {
    let permissible = |x: &str| {
        Formula::not(Formula::ob(
            Formula::not(Formula::OpenApply(
                "a".to_string(),
                SubjectRef::Var(x.to_string()),
            )),
            Formula::Top,
        ))
    };
    Formula::forall_open(
        "a",
        Formula::forall_subject(
            "s",
            Formula::implies(
                permissible("s"),
                Formula::forall_subject("p", permissible("p")),
            ),
        ),
    )
}

/// The universalizability law: any well-formed maxim that cannot be
/// universalized is prohibited, for every maxim and every subject.
/// Built from the macro layer and expanded with the given configuration.
pub fn custom_ful(cfg: &ExpansionConfig) -> Formula {
    let schema = custom_ful_schema();
    expand(&schema, cfg).expect("built-in schema expands")
}

/// The unexpanded schema behind [`custom_ful`].
pub fn custom_ful_schema() -> Formula {
    let m = MaximRef::Var("m".to_string());
    let s = SubjectRef::Var("s".to_string());
    let call = |name: &str| {
        Formula::MacroCall(
            name.to_string(),
            vec![MacroArg::Maxim(m.clone()), MacroArg::Subject(s.clone())],
        )
    };
    Formula::forall_maxim(
        "m",
        Formula::forall_subject(
            "s",
            Formula::implies(
                Formula::nec(call("well-formed")),
                Formula::implies(
                    call("not-universalizable"),
                    Formula::nec(call("prohibited")),
                ),
            ),
        ),
    )
}

/// Probe variant of the law with the well-formedness guard removed.  Unsound
/// on purpose: used to demonstrate that dropping the guard collapses into
/// inconsistency once any contingent act exists.
pub fn custom_ful_unguarded(cfg: &ExpansionConfig) -> Formula {
    let m = MaximRef::Var("m".to_string());
    let s = SubjectRef::Var("s".to_string());
    let call = |name: &str| {
        Formula::MacroCall(
            name.to_string(),
            vec![MacroArg::Maxim(m.clone()), MacroArg::Subject(s.clone())],
        )
    };
    let schema = Formula::forall_maxim(
        "m",
        Formula::forall_subject(
            "s",
            Formula::implies(call("not-universalizable"), Formula::nec(call("prohibited"))),
        ),
    );
    expand(&schema, cfg).expect("built-in schema expands")
}

/// Obligations under a fixed context conjoin: `Ob(a|c)` and `Ob(b|c)` hold
/// exactly when `Ob(a∧b|c)` does.
pub fn distributive_background() -> Formula {
    let ob = |body: Formula| Formula::ob(body, Formula::TermVar("c".to_string()));
    let a = || Formula::TermVar("a".to_string());
    let b = || Formula::TermVar("b".to_string());
    Formula::forall_term(
        "a",
        Formula::forall_term(
            "b",
            Formula::forall_term(
                "c",
                Formula::iff(
                    Formula::and(ob(a()), ob(b())),
                    ob(Formula::and(a(), b())),
                ),
            ),
        ),
    )
}

/// A maxim literal helper used by tests and the judge.
pub fn maxim_lit(circumstances: Formula, action: &str, goal: Formula) -> MaximExpr {
    MaximExpr {
        circumstances,
        act: ActRef::Action(action.to_string()),
        goal,
    }
}
