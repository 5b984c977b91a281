//! Reasoning engine for a bounded dyadic deontic logic extended with a
//! maxim-universalizability layer.
//!
//! The pipeline is: surface syntax ([`parser`]) -> AST ([`ast`]) -> macro
//! expansion ([`macros`]) -> either direct evaluation over finite models
//! ([`eval`]) or bounded model search ([`search`]).  On top of that sit the
//! ethical-system presets ([`systems`]), the scenario judge ([`judge`]) and
//! the comparative test harness ([`harness`]).

pub mod ast;
pub mod bounds;
pub mod eval;
pub mod frame;
pub mod ground;
pub mod harness;
pub mod judge;
pub mod ked;
pub mod macros;
pub mod model;
pub mod parser;
pub mod printer;
pub mod render;
pub mod search;
pub mod solver;
pub mod sorts;
pub mod systems;

pub use ast::{ActRef, Formula, MacroArg, MaximExpr, MaximRef, SubjectRef};
pub use bounds::{Bounds, Budget};
pub use eval::{eval, extension, EvalError};
pub use frame::{check_frame, FrameConditions, FrameViolation};
pub use ground::{ground, GroundError};
pub use harness::{expected_matrix, render_table, run_suite, CellResult, TableFormat, TestReport};
pub use judge::{judge, judge_with, JudgeError, JudgeOptions, Status, Verdict, Witness};
pub use ked::{load_scenario, parse_scenario, KedError, LoadError, Query, Scenario};
pub use macros::{expand, expand_all, ExpandError, ExpansionConfig, WellFormedReading};
pub use model::{Model, ModelError, WorldMask};
pub use parser::{parse_formula, parse_formulas, ParseError};
pub use printer::print_formula;
pub use render::{render_model_text, render_verdict, RenderFormat};
pub use search::{check_valid, find_model, SearchError, SearchOutcome, SearchStats, ValidityOutcome};
pub use systems::{System, SystemKind};
