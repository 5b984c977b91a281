//! The eight-test faithfulness suite, run against all three systems.
//!
//! Each test states one thing a universalization ethics should get right;
//! a cell "passes" when the system's verdict matches that expectation, not
//! when it matches the other systems.  The expected grid (naive fails all
//! eight, kroy passes the first two, custom passes all eight) is kept as a
//! separate comparison artifact, and `matches_expected` reports whether
//! this run reproduced it.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::ast::{Formula, MacroArg, MaximRef, SubjectRef};
use crate::bounds::{Bounds, Budget};
use crate::frame::FrameConditions;
use crate::judge::{judge_with, JudgeError, JudgeOptions, Status};
use crate::ked::parse_scenario;
use crate::macros::{expand, ExpansionConfig};
use crate::search::{check_valid, ValidityOutcome};
use crate::systems::{distributive_background, System, SystemKind};

pub const TEST_IDS: [&str; 8] = ["T1", "T2", "T3", "T4", "T5", "T6", "T7", "T8"];

/// id, short title, kind.
pub const TESTS: [(&str, &str, &str); 8] = [
    ("T1", "axioms-exceed-base-logic", "countermodel-existence"),
    ("T2", "obligation-universalizes", "validity"),
    ("T3", "no-contradictory-obligations", "validity"),
    ("T4", "obligations-distribute", "validity"),
    ("T5", "un-universalizable-prohibited", "scenario"),
    ("T6", "evaluates-maxims", "capability"),
    ("T7", "convention-undermining-prohibited", "scenario"),
    ("T8", "precondition-undermining-prohibited", "scenario"),
];

const GOAL_UNDERCUT_KED: &str = include_str!("../../../corpus/goal-undercut.ked");
const FALSE_PROMISING_KED: &str = include_str!("../../../corpus/false-promising.ked");
const KILLING_FOR_SLEEP_KED: &str = include_str!("../../../corpus/killing-for-sleep.ked");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CellResult {
    Pass,
    Fail,
    Error,
}

impl CellResult {
    pub fn as_str(&self) -> &'static str {
        match self {
            CellResult::Pass => "pass",
            CellResult::Fail => "fail",
            CellResult::Error => "error",
        }
    }
}

pub type Matrix = BTreeMap<String, BTreeMap<String, CellResult>>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportBounds {
    pub worlds: usize,
    pub subjects: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestReport {
    pub matrix: Matrix,
    /// One human-readable witness line per cell, same keys as `matrix`.
    pub details: BTreeMap<String, BTreeMap<String, String>>,
    pub bounds: ReportBounds,
    pub runtime_ms: u64,
    pub warnings: Vec<String>,
    pub notes: Vec<String>,
    pub matches_expected: bool,
}

/// The comparison grid: naive fails everything, kroy passes exactly the
/// first two tests, custom passes everything.
pub fn expected_matrix() -> Matrix {
    let mut m = Matrix::new();
    for id in TEST_IDS {
        let mut row = BTreeMap::new();
        for kind in SystemKind::ALL {
            let pass = match kind {
                SystemKind::Naive => false,
                SystemKind::Kroy => id == "T1" || id == "T2",
                SystemKind::Custom => true,
            };
            row.insert(
                kind.as_str().to_string(),
                if pass { CellResult::Pass } else { CellResult::Fail },
            );
        }
        m.insert(id.to_string(), row);
    }
    m
}

/// The act-level universalization sentence: if an act is obligatory in some
/// circumstances for one subject, it is obligatory for every subject.
fn act_universalization() -> Formula {
    let ob_for = |x: &str| {
        Formula::ob(
            Formula::OpenApply("a".to_string(), SubjectRef::Var(x.to_string())),
            Formula::TermVar("c".to_string()),
        )
    };
    Formula::forall_open(
        "a",
        Formula::forall_term(
            "c",
            Formula::forall_subject(
                "s",
                Formula::forall_subject("p", Formula::implies(ob_for("s"), ob_for("p"))),
            ),
        ),
    )
}

/// The maxim-level universalization sentence used for the custom system:
/// prohibition of an un-universalizable maxim applies to every subject once
/// it applies to one.  A direct consequence of the custom law.
fn maxim_universalization(cfg: &ExpansionConfig) -> Formula {
    let call = |name: &str, subj: &str| {
        Formula::MacroCall(
            name.to_string(),
            vec![
                MacroArg::Maxim(MaximRef::Var("m".to_string())),
                MacroArg::Subject(SubjectRef::Var(subj.to_string())),
            ],
        )
    };
    let schema = Formula::forall_maxim(
        "m",
        Formula::implies(
            Formula::forall_subject(
                "q",
                Formula::and(
                    Formula::nec(call("well-formed", "q")),
                    call("not-universalizable", "q"),
                ),
            ),
            Formula::forall_subject("p", Formula::nec(call("prohibited", "p"))),
        ),
    );
    expand(&schema, cfg).expect("built-in schema expands")
}

/// No-contradictory-obligations: never both `O(a|c)` and `O(¬a|c)`.
fn no_contradiction() -> Formula {
    let a = || Formula::TermVar("a".to_string());
    let ob = |body: Formula| Formula::ob(body, Formula::TermVar("c".to_string()));
    Formula::forall_term(
        "a",
        Formula::forall_term(
            "c",
            Formula::not(Formula::and(ob(a()), ob(Formula::not(a())))),
        ),
    )
}

fn size_of_model(m: &crate::model::Model) -> String {
    format!("(w={}, s={})", m.n_worlds(), m.n_subjects())
}

struct SuiteCtx {
    bounds: Bounds,
    budget: Budget,
    expansion: ExpansionConfig,
    frame: FrameConditions,
}

impl SuiteCtx {
    fn validity_cell(&self, system: &System, goal: &Formula) -> (CellResult, String) {
        match check_valid(&system.axioms, goal, &self.bounds, &self.frame, &self.budget) {
            Ok((ValidityOutcome::ValidAtBounds, _)) => (
                CellResult::Pass,
                format!(
                    "valid at bounds (w={}, s={})",
                    self.bounds.worlds, self.bounds.subjects
                ),
            ),
            Ok((ValidityOutcome::CountermodelFound(m), _)) => (
                CellResult::Fail,
                format!("countermodel at {}", size_of_model(&m)),
            ),
            Err(e) => (CellResult::Error, e.to_string()),
        }
    }

    /// Pass when the system's own axioms are *not* already valid in the
    /// base logic, witnessed by a base-logic countermodel.
    fn exceeds_base_cell(&self, system: &System) -> (CellResult, String) {
        if system.axioms.is_empty() {
            return (
                CellResult::Fail,
                "no added axioms; the empty set is entailed by the base logic".to_string(),
            );
        }
        let goal = Formula::and_all(system.axioms.clone());
        match check_valid(&[], &goal, &self.bounds, &self.frame, &self.budget) {
            Ok((ValidityOutcome::CountermodelFound(m), _)) => (
                CellResult::Pass,
                format!("base-logic countermodel at {}", size_of_model(&m)),
            ),
            Ok((ValidityOutcome::ValidAtBounds, _)) => (
                CellResult::Fail,
                format!(
                    "axioms already hold in the base logic at bounds (w={}, s={})",
                    self.bounds.worlds, self.bounds.subjects
                ),
            ),
            Err(e) => (CellResult::Error, e.to_string()),
        }
    }

    fn scenario_cell(&self, kind: SystemKind, ked_src: &str) -> (CellResult, String) {
        let sc = match parse_scenario(ked_src) {
            Ok(sc) => sc,
            Err(e) => return (CellResult::Error, format!("scenario failed to load: {e}")),
        };
        let opts = JudgeOptions {
            system_override: Some(kind),
            bounds_override: Some((self.bounds.worlds, self.bounds.subjects)),
            expansion: self.expansion,
            frame: self.frame.clone(),
            budget: self.budget.clone(),
        };
        match judge_with(&sc, &opts) {
            Ok(v) if v.status == Status::Prohibited => (
                CellResult::Pass,
                format!("{}: prohibited as expected", sc.name),
            ),
            Ok(v) => (
                CellResult::Fail,
                format!(
                    "{}: status {} (expected prohibited)",
                    sc.name,
                    v.status.as_str()
                ),
            ),
            Err(e @ JudgeError::InconsistentAssumptions { .. }) => {
                (CellResult::Error, e.to_string())
            }
            Err(e) => (CellResult::Error, e.to_string()),
        }
    }

    fn capability_cell(&self, system: &System) -> (CellResult, String) {
        if system.evaluates_maxims {
            (
                CellResult::Pass,
                "judges maxims (circumstances, act, goal)".to_string(),
            )
        } else {
            (CellResult::Fail, "judges bare acts only".to_string())
        }
    }
}

pub fn run_suite(bounds: &Bounds, budget: &Budget) -> TestReport {
    let start = Instant::now();
    let expansion = ExpansionConfig::default();
    let frame = FrameConditions::default();
    let ctx = SuiteCtx {
        bounds: Bounds::new(bounds.worlds, bounds.subjects),
        budget: budget.clone(),
        expansion,
        frame,
    };

    let mut matrix = Matrix::new();
    let mut details: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::new();

    for kind in SystemKind::ALL {
        let system = System::build(kind, &ctx.expansion);
        for (id, _, _) in TESTS {
            let (result, detail) = match id {
                "T1" => ctx.exceeds_base_cell(&system),
                "T2" => {
                    let goal = if kind == SystemKind::Custom {
                        maxim_universalization(&ctx.expansion)
                    } else {
                        act_universalization()
                    };
                    ctx.validity_cell(&system, &goal)
                }
                "T3" => ctx.validity_cell(&system, &no_contradiction()),
                "T4" => ctx.validity_cell(&system, &distributive_background()),
                "T5" => ctx.scenario_cell(kind, GOAL_UNDERCUT_KED),
                "T6" => ctx.capability_cell(&system),
                "T7" => ctx.scenario_cell(kind, FALSE_PROMISING_KED),
                _ => ctx.scenario_cell(kind, KILLING_FOR_SLEEP_KED),
            };
            matrix
                .entry(id.to_string())
                .or_default()
                .insert(kind.as_str().to_string(), result);
            details
                .entry(id.to_string())
                .or_default()
                .insert(kind.as_str().to_string(), detail);
        }
    }

    let mut warnings = Vec::new();
    if bounds.subjects < 2 {
        warnings.push(
            "bounds allow only one subject: universalization across people is trivial, \
             so T2 cannot discriminate between the systems"
                .to_string(),
        );
    }

    let notes = vec![
        "well-formed maxims are read as two negated necessities (the default reading)"
            .to_string(),
        "T2 payloads: naive and kroy are tested with the act-level sentence verbatim; \
         custom is tested with the maxim-level counterpart, since its law attaches \
         prohibitions to maxims rather than acts"
            .to_string(),
        "custom axiom set: the universalizability law plus the distributivity axiom; \
         no further background was needed for T3/T4"
            .to_string(),
        "custom models at these bounds have exactly one world, so its validity results \
         above one world hold vacuously"
            .to_string(),
    ];

    let matches_expected = matrix == expected_matrix();

    TestReport {
        matrix,
        details,
        bounds: ReportBounds {
            worlds: bounds.worlds,
            subjects: bounds.subjects,
        },
        runtime_ms: start.elapsed().as_millis() as u64,
        warnings,
        notes,
        matches_expected,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Text,
    Json,
    Markdown,
}

pub fn render_table(r: &TestReport, fmt: TableFormat) -> String {
    match fmt {
        TableFormat::Json => {
            let mut s = serde_json::to_string_pretty(r).expect("report serializes");
            s.push('\n');
            s
        }
        TableFormat::Text => render_text(r),
        TableFormat::Markdown => render_markdown(r),
    }
}

fn cell_mark(c: CellResult) -> &'static str {
    match c {
        CellResult::Pass => "✓",
        CellResult::Fail => "×",
        CellResult::Error => "!",
    }
}

fn title_width() -> usize {
    TESTS
        .iter()
        .map(|(id, title, _)| id.len() + 1 + title.len())
        .max()
        .unwrap()
}

fn render_text(r: &TestReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "faithfulness suite at bounds (w={}, s={}) — {} ms",
        r.bounds.worlds, r.bounds.subjects, r.runtime_ms
    );
    out.push('\n');
    let w = title_width();
    let _ = writeln!(out, "  {:w$}  naive  kroy  custom", "test");
    for (id, title, _) in TESTS {
        let row = &r.matrix[id];
        let _ = writeln!(
            out,
            "  {:w$}  {:5}  {:4}  {:6}",
            format!("{id} {title}"),
            cell_mark(row["naive"]),
            cell_mark(row["kroy"]),
            cell_mark(row["custom"]),
        );
    }
    out.push('\n');
    let _ = writeln!(
        out,
        "matrix matches expected grid: {}",
        if r.matches_expected { "yes" } else { "NO" }
    );
    if !r.matches_expected {
        let expected = expected_matrix();
        for (id, _, _) in TESTS {
            for kind in SystemKind::ALL {
                let got = r.matrix[id][kind.as_str()];
                let want = expected[id][kind.as_str()];
                if got != want {
                    let _ = writeln!(
                        out,
                        "  {id}/{}: got {}, expected {} — {}",
                        kind.as_str(),
                        got.as_str(),
                        want.as_str(),
                        r.details[id][kind.as_str()]
                    );
                }
            }
        }
    }
    for wmsg in &r.warnings {
        let _ = writeln!(out, "warning: {wmsg}");
    }
    if !r.notes.is_empty() {
        out.push_str("notes:\n");
        for n in &r.notes {
            let _ = writeln!(out, "  - {n}");
        }
    }
    out
}

fn render_markdown(r: &TestReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "| test | naive | kroy | custom |");
    let _ = writeln!(out, "| --- | --- | --- | --- |");
    for (id, title, _) in TESTS {
        let row = &r.matrix[id];
        let _ = writeln!(
            out,
            "| {id} {title} | {} | {} | {} |",
            row["naive"].as_str(),
            row["kroy"].as_str(),
            row["custom"].as_str(),
        );
    }
    let _ = writeln!(
        out,
        "\nBounds (w={}, s={}), {} ms; matches expected grid: {}.",
        r.bounds.worlds, r.bounds.subjects, r.runtime_ms, r.matches_expected
    );
    out
}
