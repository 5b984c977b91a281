//! Model search and validity checking across ascending domain sizes.
//!
//! Sizes are tried in canonical order: world count outer, subject count
//! inner, both from 1 up to the bounds.  For each size, interpretations of
//! the declared subject constants are enumerated lexicographically (constants
//! in sorted order, subject indices ascending); constants with canonical
//! names `s1..sn` are pinned to their index rather than enumerated.  Every
//! model the solver returns is re-checked against the original formulas with
//! the direct evaluator and against the frame conditions before being
//! reported — a failure there is a bug, reported as such, never silently
//! accepted.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::ast::{subject_index, Formula, MacroArg, MaximRef};
use crate::bounds::{Bounds, Budget};
use crate::eval::holds_everywhere;
use crate::frame::{check_frame, FrameConditions};
use crate::ground::DEFAULT_INSTANTIATION_CAP;
use crate::model::Model;
use crate::solver::{solve, BudgetState, SolveError, SolveInput};
use crate::sorts::{check_closed, signature, SortError};

/// Largest world bound the search will accept; the obligation-bit grid is
/// `4^worlds` variables, so this is already generous.
pub const SEARCH_MAX_WORLDS: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome {
    ModelFound(Box<Model>),
    NoModelAtBounds,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ValidityOutcome {
    ValidAtBounds,
    CountermodelFound(Box<Model>),
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SearchStats {
    /// Solver steps spent (decisions plus propagated assignments).
    pub nodes: u64,
    pub millis: u64,
    /// Domain sizes actually attempted, in order.
    pub sizes_tried: Vec<(usize, usize)>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SearchError {
    #[error("search budget exceeded after {nodes} solver steps, {millis} ms")]
    BudgetExceeded { nodes: u64, millis: u64 },
    #[error("quantifier expansion exceeded {cap} instantiations")]
    GroundingBlowup { cap: u64 },
    #[error("macro `{0}` must be expanded before search")]
    MacroPresent(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("bounds too large: {0}")]
    BoundsTooLarge(String),
    #[error("found model failed re-verification ({0}); this is a bug in the solver")]
    Internal(String),
}

impl From<SortError> for SearchError {
    fn from(e: SortError) -> Self {
        SearchError::InvalidInput(e.to_string())
    }
}

fn first_macro(f: &Formula) -> Option<&str> {
    match f {
        Formula::MacroCall(name, args) => {
            for arg in args {
                if let MacroArg::Maxim(MaximRef::Lit(m)) = arg {
                    if let Some(n) = first_macro(&m.circumstances).or_else(|| first_macro(&m.goal)) {
                        return Some(n);
                    }
                }
            }
            Some(name)
        }
        Formula::Top
        | Formula::Atom(_)
        | Formula::Apply(..)
        | Formula::OpenApply(..)
        | Formula::TermVar(_)
        | Formula::TermConst(_)
        | Formula::OpenConst(..) => None,
        Formula::Not(a) | Formula::Nec(a) => first_macro(a),
        Formula::And(a, b)
        | Formula::Or(a, b)
        | Formula::Implies(a, b)
        | Formula::Iff(a, b)
        | Formula::Ob(a, b) => first_macro(a).or_else(|| first_macro(b)),
        Formula::ForallSubject(_, body)
        | Formula::ForallTerm(_, body)
        | Formula::ForallOpen(_, body)
        | Formula::ForallMaxim(_, body) => first_macro(body),
    }
}

/// Domain sizes a formula's grounded literals insist on: a `(worlds w3)`
/// literal needs at least three worlds; an `(open-app ...)` literal fixes
/// the exact subject count.
#[derive(Default)]
struct LiteralNeeds {
    min_worlds: usize,
    exact_subjects: Option<usize>,
    conflict: bool,
}

impl LiteralNeeds {
    fn mask(&mut self, m: u32) {
        let need = (32 - m.leading_zeros()) as usize;
        self.min_worlds = self.min_worlds.max(need);
    }

    fn subjects(&mut self, n: usize) {
        match self.exact_subjects {
            None => self.exact_subjects = Some(n),
            Some(e) if e != n => self.conflict = true,
            _ => {}
        }
    }

    fn walk(&mut self, f: &Formula) {
        match f {
            Formula::TermConst(m) => self.mask(*m),
            Formula::OpenConst(row, _) => {
                self.subjects(row.len());
                for m in row {
                    self.mask(*m);
                }
            }
            Formula::Top
            | Formula::Atom(_)
            | Formula::Apply(..)
            | Formula::OpenApply(..)
            | Formula::TermVar(_) => {}
            Formula::Not(a) | Formula::Nec(a) => self.walk(a),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b)
            | Formula::Ob(a, b) => {
                self.walk(a);
                self.walk(b);
            }
            Formula::ForallSubject(_, body)
            | Formula::ForallTerm(_, body)
            | Formula::ForallOpen(_, body)
            | Formula::ForallMaxim(_, body) => self.walk(body),
            Formula::MacroCall(_, args) => {
                for arg in args {
                    if let MacroArg::Maxim(MaximRef::Lit(m)) = arg {
                        self.walk(&m.circumstances);
                        self.walk(&m.goal);
                    }
                }
            }
        }
    }
}

fn validate(formulas: &[&Formula]) -> Result<(), SearchError> {
    for f in formulas {
        if let Some(name) = first_macro(f) {
            return Err(SearchError::MacroPresent(name.to_string()));
        }
        check_closed(f)?;
    }
    Ok(())
}

fn effective_bounds(bounds: &Bounds, formulas: &[&Formula]) -> Result<Bounds, SearchError> {
    if bounds.worlds == 0 || bounds.subjects == 0 {
        return Err(SearchError::InvalidInput(
            "bounds must allow at least one world and one subject".to_string(),
        ));
    }
    if bounds.worlds > SEARCH_MAX_WORLDS {
        return Err(SearchError::BoundsTooLarge(format!(
            "{} worlds requested, search supports at most {SEARCH_MAX_WORLDS}",
            bounds.worlds
        )));
    }
    let mut eff = bounds.clone();
    for f in formulas {
        eff.absorb(&signature(f));
    }
    Ok(eff)
}

struct SizePlan {
    /// constant name -> index, for constants pinned by canonical name.
    fixed: BTreeMap<String, usize>,
    /// remaining constants, sorted, to enumerate.
    free: Vec<String>,
    admissible: bool,
}

/// Increment a mixed-radix counter (last digit fastest); false on wrap.
fn advance_odometer(choice: &mut [usize], base: usize) -> bool {
    for k in (0..choice.len()).rev() {
        if choice[k] + 1 < base {
            choice[k] += 1;
            for c in choice.iter_mut().skip(k + 1) {
                *c = 0;
            }
            return true;
        }
        choice[k] = 0;
    }
    false
}

fn plan_size(subject_consts: &[String], n_subjects: usize) -> SizePlan {
    let mut fixed = BTreeMap::new();
    let mut free = Vec::new();
    let mut admissible = true;
    for c in subject_consts {
        match subject_index(c) {
            Some(k) if k < n_subjects => {
                fixed.insert(c.clone(), k);
            }
            Some(_) => admissible = false,
            None => free.push(c.clone()),
        }
    }
    free.sort();
    SizePlan { fixed, free, admissible }
}

fn verify_model(
    m: &Model,
    hold_everywhere: &[Formula],
    hold_somewhere: &[Formula],
    fc: &FrameConditions,
) -> Result<(), SearchError> {
    for f in hold_everywhere {
        match holds_everywhere(f, m) {
            Ok(true) => {}
            Ok(false) => {
                return Err(SearchError::Internal(
                    "a required formula fails somewhere in the found model".to_string(),
                ))
            }
            Err(e) => return Err(SearchError::Internal(format!("evaluation error: {e}"))),
        }
    }
    for f in hold_somewhere {
        match crate::eval::extension(f, m) {
            Ok(0) => {
                return Err(SearchError::Internal(
                    "an existential formula holds nowhere in the found model".to_string(),
                ))
            }
            Ok(_) => {}
            Err(e) => return Err(SearchError::Internal(format!("evaluation error: {e}"))),
        }
    }
    let violations = check_frame(m, fc);
    if !violations.is_empty() {
        return Err(SearchError::Internal(format!(
            "{} frame violations in the found model",
            violations.len()
        )));
    }
    Ok(())
}

fn run(
    hold_everywhere: &[Formula],
    hold_somewhere: &[Formula],
    bounds: &Bounds,
    fc: &FrameConditions,
    budget: &Budget,
) -> Result<(Option<Model>, SearchStats), SearchError> {
    let all_refs: Vec<&Formula> = hold_everywhere.iter().chain(hold_somewhere.iter()).collect();
    validate(&all_refs)?;
    let eff = effective_bounds(bounds, &all_refs)?;
    let mut needs = LiteralNeeds::default();
    for f in &all_refs {
        needs.walk(f);
    }
    if needs.conflict {
        return Err(SearchError::InvalidInput(
            "open-app literals disagree about the subject count".to_string(),
        ));
    }
    if needs.min_worlds > eff.worlds {
        // A literal names a world beyond the bounds: no admissible size.
        return Ok((None, SearchStats::default()));
    }
    let mut state = BudgetState::new();
    let mut stats = SearchStats::default();
    let map_err = |e: SolveError, state: &BudgetState| match e {
        SolveError::Budget => SearchError::BudgetExceeded {
            nodes: state.nodes,
            millis: state.millis(),
        },
        SolveError::Blowup { cap } => SearchError::GroundingBlowup { cap },
        SolveError::MacroPresent(n) => SearchError::MacroPresent(n),
        SolveError::UnboundVariable(v) => {
            SearchError::InvalidInput(format!("unbound variable `{v}`"))
        }
        SolveError::Internal(s) => SearchError::Internal(s),
    };
    for n_worlds in 1..=eff.worlds {
        if n_worlds < needs.min_worlds.max(1) {
            continue;
        }
        for n_subjects in 1..=eff.subjects {
            if let Some(e) = needs.exact_subjects {
                if e != n_subjects {
                    continue;
                }
            }
            let plan = plan_size(&eff.subject_consts, n_subjects);
            if !plan.admissible {
                continue;
            }
            stats.sizes_tried.push((n_worlds, n_subjects));
            // Odometer over interpretations of the non-canonical constants.
            let mut choice = vec![0usize; plan.free.len()];
            loop {
                let mut interp = plan.fixed.clone();
                for (c, &i) in plan.free.iter().zip(choice.iter()) {
                    interp.insert(c.clone(), i);
                }
                let input = SolveInput {
                    hold_everywhere,
                    hold_somewhere,
                    n_worlds,
                    n_subjects,
                    atoms: &eff.atoms,
                    actions: &eff.actions,
                    interp: &interp,
                    fc,
                    instantiation_cap: DEFAULT_INSTANTIATION_CAP,
                };
                match solve(&input, budget, &mut state) {
                    Ok(Some(model)) => {
                        verify_model(&model, hold_everywhere, hold_somewhere, fc)?;
                        stats.nodes = state.nodes;
                        stats.millis = state.millis();
                        return Ok((Some(model), stats));
                    }
                    Ok(None) => {}
                    Err(e) => return Err(map_err(e, &state)),
                }
                if !advance_odometer(&mut choice, n_subjects) {
                    break;
                }
            }
        }
    }
    stats.nodes = state.nodes;
    stats.millis = state.millis();
    Ok((None, stats))
}

/// Search for a model of the axioms plus constraints (all required to hold
/// at every world), trying sizes up to the bounds.
pub fn find_model(
    axioms: &[Formula],
    constraints: &[Formula],
    bounds: &Bounds,
    fc: &FrameConditions,
    budget: &Budget,
) -> Result<(SearchOutcome, SearchStats), SearchError> {
    let mut all: Vec<Formula> = axioms.to_vec();
    all.extend(constraints.iter().cloned());
    let (model, stats) = run(&all, &[], bounds, fc, budget)?;
    Ok((
        match model {
            Some(m) => SearchOutcome::ModelFound(Box::new(m)),
            None => SearchOutcome::NoModelAtBounds,
        },
        stats,
    ))
}

/// Check whether the goal holds at every world of every model of the axioms
/// within bounds; a countermodel is a model of the axioms where the goal
/// fails at some world.
pub fn check_valid(
    axioms: &[Formula],
    goal: &Formula,
    bounds: &Bounds,
    fc: &FrameConditions,
    budget: &Budget,
) -> Result<(ValidityOutcome, SearchStats), SearchError> {
    let negated = [Formula::not(goal.clone())];
    let (model, stats) = run(axioms, &negated, bounds, fc, budget)?;
    Ok((
        match model {
            Some(m) => ValidityOutcome::CountermodelFound(Box::new(m)),
            None => ValidityOutcome::ValidAtBounds,
        },
        stats,
    ))
}
