//! The judgement pipeline: given a scenario, decide whether its maxim is
//! prohibited, obligatory, or permissible for a designated subject, and
//! record a search witness for every claim that was checked.
//!
//! The claims are checked in a fixed order — prohibited, then obligatory,
//! then permissible — and the first one that is valid at the bounds decides
//! the status.  If none is, the status is `Undetermined` and all three
//! witnesses are reported.  An assumption set with no model at the bounds
//! is an error, not a verdict: every status claim would be vacuously valid.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::ast::{Formula, MacroArg, MaximRef, SubjectRef};
use crate::bounds::{Bounds, Budget, DEFAULT_SUBJECTS, DEFAULT_WORLDS};
use crate::frame::FrameConditions;
use crate::ked::{Query, Scenario};
use crate::macros::{collect_names, expand, expand_all, ExpandError, ExpansionConfig};
use crate::model::Model;
use crate::printer::print_formula;
use crate::search::{check_valid, find_model, SearchError, SearchOutcome, ValidityOutcome};
use crate::systems::{System, SystemKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Prohibited,
    Obligatory,
    Permissible,
    Undetermined,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Prohibited => "prohibited",
            Status::Obligatory => "obligatory",
            Status::Permissible => "permissible",
            Status::Undetermined => "undetermined",
        }
    }

    /// Whether this status decides the query (everything but Undetermined).
    pub fn is_decided(&self) -> bool {
        !matches!(self, Status::Undetermined)
    }
}

/// One checked claim: the sentence, whether it was valid at the bounds, and
/// the countermodel if it was not.
#[derive(Debug, Clone, Serialize)]
pub struct Witness {
    pub claim: String,
    /// The exact (expanded) sentence whose validity was checked.
    pub goal: String,
    pub valid: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub countermodel: Option<Model>,
    pub nodes: u64,
    pub millis: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct VerdictBounds {
    pub worlds: usize,
    pub subjects: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub scenario: String,
    pub system: SystemKind,
    pub query: String,
    pub status: Status,
    pub bounds: VerdictBounds,
    /// The designated subject constant the claims are stated for.
    pub star: String,
    /// The scenario's assumptions, echoed verbatim (canonically printed).
    pub assumptions: Vec<String>,
    pub witnesses: Vec<Witness>,
}

#[derive(Debug, thiserror::Error)]
pub enum JudgeError {
    #[error(
        "assumptions are inconsistent with the {system} axioms: \
         no model exists at bounds (w={worlds}, s={subjects})"
    )]
    InconsistentAssumptions {
        system: SystemKind,
        worlds: usize,
        subjects: usize,
    },
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error(transparent)]
    Expand(#[from] ExpandError),
}

/// Knobs the CLI and harness can override; `Default` matches the shipped
/// behaviour (scenario's own system, default reading, all frame conditions,
/// default budget).
#[derive(Debug, Clone, Default)]
pub struct JudgeOptions {
    pub system_override: Option<SystemKind>,
    /// Wins over both the scenario's `(bounds ...)` form and the defaults.
    pub bounds_override: Option<(usize, usize)>,
    pub expansion: ExpansionConfig,
    pub frame: FrameConditions,
    pub budget: Budget,
}

fn fresh_star(sc: &Scenario) -> String {
    let mut used: BTreeSet<String> = BTreeSet::new();
    used.extend(sc.atoms.iter().cloned());
    used.extend(sc.actions.iter().cloned());
    used.extend(sc.subjects.iter().cloned());
    collect_names(&sc.maxim.circumstances, &mut used);
    collect_names(&sc.maxim.goal, &mut used);
    for a in &sc.assumptions {
        collect_names(a, &mut used);
    }
    if !used.contains("someone") {
        return "someone".to_string();
    }
    let mut i = 2usize;
    loop {
        let cand = format!("someone{i}");
        if !used.contains(&cand) {
            return cand;
        }
        i += 1;
    }
}

fn claim_formula(
    sc: &Scenario,
    claim: &str,
    star: &str,
    cfg: &ExpansionConfig,
) -> Result<Formula, ExpandError> {
    let call = Formula::MacroCall(
        claim.to_string(),
        vec![
            MacroArg::Maxim(MaximRef::Lit(Box::new(sc.maxim.clone()))),
            MacroArg::Subject(SubjectRef::Const(star.to_string())),
        ],
    );
    expand(&call, cfg)
}

pub fn judge_with(sc: &Scenario, opts: &JudgeOptions) -> Result<Verdict, JudgeError> {
    let kind = opts.system_override.unwrap_or(sc.system);
    let system = System::build(kind, &opts.expansion);
    let star = fresh_star(sc);

    let mut gamma = system.axioms.clone();
    gamma.extend(expand_all(&sc.assumptions, &opts.expansion)?);

    let (worlds, subjects) = match opts.bounds_override {
        Some(b) => b,
        None => (
            sc.bounds_worlds.unwrap_or(DEFAULT_WORLDS),
            sc.bounds_subjects.unwrap_or(DEFAULT_SUBJECTS),
        ),
    };
    let bounds = Bounds::new(worlds, subjects)
        .with_atoms(&sc.atoms.iter().map(String::as_str).collect::<Vec<_>>())
        .with_actions(&sc.actions.iter().map(String::as_str).collect::<Vec<_>>())
        .with_subject_consts(&sc.subjects.iter().map(String::as_str).collect::<Vec<_>>());

    let (consistency, _) = find_model(&gamma, &[], &bounds, &opts.frame, &opts.budget)?;
    if consistency == SearchOutcome::NoModelAtBounds {
        return Err(JudgeError::InconsistentAssumptions {
            system: kind,
            worlds,
            subjects,
        });
    }

    let claims: &[(&str, Status)] = match sc.query {
        Query::Status => &[
            ("prohibited", Status::Prohibited),
            ("obligatory", Status::Obligatory),
            ("permissible", Status::Permissible),
        ],
        Query::CheckProhibited => &[("prohibited", Status::Prohibited)],
        Query::CheckObligatory => &[("obligatory", Status::Obligatory)],
        Query::CheckPermissible => &[("permissible", Status::Permissible)],
    };

    let mut witnesses = Vec::new();
    let mut status = Status::Undetermined;
    for (claim, claim_status) in claims {
        let goal = claim_formula(sc, claim, &star, &opts.expansion)?;
        let (outcome, stats) = check_valid(&gamma, &goal, &bounds, &opts.frame, &opts.budget)?;
        let (valid, countermodel) = match outcome {
            ValidityOutcome::ValidAtBounds => (true, None),
            ValidityOutcome::CountermodelFound(m) => (false, Some(*m)),
        };
        witnesses.push(Witness {
            claim: claim.to_string(),
            goal: print_formula(&goal),
            valid,
            countermodel,
            nodes: stats.nodes,
            millis: stats.millis,
        });
        if valid {
            status = *claim_status;
            break;
        }
    }

    Ok(Verdict {
        scenario: sc.name.clone(),
        system: kind,
        query: sc.query.as_str().to_string(),
        status,
        bounds: VerdictBounds { worlds, subjects },
        star,
        assumptions: sc.assumptions.iter().map(print_formula).collect(),
        witnesses,
    })
}

pub fn judge(sc: &Scenario) -> Result<Verdict, JudgeError> {
    judge_with(sc, &JudgeOptions::default())
}
