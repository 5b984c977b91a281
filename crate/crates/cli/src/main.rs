//! `ddl-kant`: command-line front end for the reasoning engine.
//!
//! Exit codes are a stable contract:
//!   0  success (parsed / valid / model found / verdict decided / matrix matches)
//!   1  bad input content (syntax, sorts, undeclared symbols) or matrix mismatch
//!   2  negative result (countermodel / no model / undetermined verdict)
//!   3  search budget exhausted
//!   4  inconsistent scenario assumptions
//!   64 usage errors
//!   66 unreadable input files
//!
//! In `--json` mode stdout carries exactly one JSON document; logs and wall
//! clock timings go to stderr so reruns are byte-identical on stdout.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ddl_kant_core::bounds::{Bounds, Budget, DEFAULT_SUBJECTS, DEFAULT_WORLDS};
use ddl_kant_core::frame::FrameConditions;
use ddl_kant_core::harness::{render_table, run_suite, TableFormat};
use ddl_kant_core::judge::{judge_with, JudgeError, JudgeOptions};
use ddl_kant_core::ked::parse_scenario;
use ddl_kant_core::macros::{expand, expand_all, ExpansionConfig};
use ddl_kant_core::parser::{parse_formula, parse_formulas};
use ddl_kant_core::printer::print_formula;
use ddl_kant_core::render::{render_model_text, render_verdict, RenderFormat};
use ddl_kant_core::search::{check_valid, find_model, SearchError, SearchOutcome, SearchStats, ValidityOutcome};
use ddl_kant_core::systems::{System, SystemKind};
use ddl_kant_core::Formula;

const EX_CONTENT: u8 = 1;
const EX_NEGATIVE: u8 = 2;
const EX_BUDGET: u8 = 3;
const EX_INCONSISTENT: u8 = 4;
const EX_USAGE: u8 = 64;
const EX_NOINPUT: u8 = 66;

const MAX_FLAG_WORLDS: usize = 8;
const MAX_FLAG_SUBJECTS: usize = 8;

#[derive(Parser)]
#[command(
    name = "ddl-kant",
    version,
    about = "Bounded reasoning for dyadic obligations and maxim universalizability",
    after_help = "Defaults: --worlds 3, --subjects 2; search budget 60000 ms per query.\n\
                  The budget can be overridden with --budget-ms or the DDLKANT_BUDGET_MS\n\
                  environment variable (flag wins)."
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct BoundsArgs {
    /// Largest number of worlds to try (1..=8)
    #[arg(long, default_value_t = DEFAULT_WORLDS)]
    worlds: usize,
    /// Largest number of subjects to try (1..=8)
    #[arg(long, default_value_t = DEFAULT_SUBJECTS)]
    subjects: usize,
}

fn parse_system_name(s: &str) -> Result<SystemKind, String> {
    SystemKind::parse(s).ok_or_else(|| format!("unknown system `{s}` (expected naive, kroy, or custom)"))
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse a formula file and print each formula in canonical form
    Parse {
        /// File holding one or more formulas
        file: PathBuf,
    },
    /// Check whether a formula is valid under a system's axioms at bounds
    Check {
        /// System whose axioms to assume: naive, kroy, or custom
        #[arg(long, value_parser = parse_system_name)]
        system: SystemKind,
        /// File holding the single formula to check
        #[arg(long)]
        formula_file: PathBuf,
        #[command(flatten)]
        bounds: BoundsArgs,
        /// Emit the result as JSON on stdout
        #[arg(long)]
        json: bool,
        /// Search budget in milliseconds for this query
        #[arg(long)]
        budget_ms: Option<u64>,
    },
    /// Search for a model of axioms plus constraints at bounds
    FindModel {
        /// File holding axiom formulas (one or more)
        #[arg(long, required_unless_present = "system")]
        axioms_file: Option<PathBuf>,
        /// File holding additional constraint formulas
        #[arg(long)]
        constraints_file: Option<PathBuf>,
        /// Prepend this system's axioms: naive, kroy, or custom
        #[arg(long, value_parser = parse_system_name)]
        system: Option<SystemKind>,
        #[command(flatten)]
        bounds: BoundsArgs,
        /// Emit the result as JSON on stdout
        #[arg(long)]
        json: bool,
        /// Search budget in milliseconds for this query
        #[arg(long)]
        budget_ms: Option<u64>,
    },
    /// Judge a scenario file: prohibited, obligatory, permissible, or undetermined
    Judge {
        /// Scenario file (.ked)
        scenario: PathBuf,
        /// Emit the verdict as JSON on stdout
        #[arg(long)]
        json: bool,
        /// Search budget in milliseconds per claim
        #[arg(long)]
        budget_ms: Option<u64>,
    },
    /// Run the eight-test faithfulness suite over all three systems
    TestSuite {
        #[command(flatten)]
        bounds: BoundsArgs,
        /// Emit the report as JSON on stdout
        #[arg(long, conflicts_with = "markdown")]
        json: bool,
        /// Emit the report as a markdown table on stdout
        #[arg(long)]
        markdown: bool,
        /// Search budget in milliseconds per cell query
        #[arg(long)]
        budget_ms: Option<u64>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EX_USAGE,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    ExitCode::from(run(cli))
}

fn run(cli: Cli) -> u8 {
    match cli.cmd {
        Cmd::Parse { file } => cmd_parse(&file),
        Cmd::Check {
            system,
            formula_file,
            bounds,
            json,
            budget_ms,
        } => cmd_check(system, &formula_file, &bounds, json, budget_ms),
        Cmd::FindModel {
            axioms_file,
            constraints_file,
            system,
            bounds,
            json,
            budget_ms,
        } => cmd_find_model(
            axioms_file.as_deref(),
            constraints_file.as_deref(),
            system,
            &bounds,
            json,
            budget_ms,
        ),
        Cmd::Judge {
            scenario,
            json,
            budget_ms,
        } => cmd_judge(&scenario, json, budget_ms),
        Cmd::TestSuite {
            bounds,
            json,
            markdown,
            budget_ms,
        } => cmd_test_suite(&bounds, json, markdown, budget_ms),
    }
}

fn read_file(path: &Path) -> Result<String, u8> {
    std::fs::read_to_string(path).map_err(|e| {
        eprintln!("ddl-kant: cannot read {}: {e}", path.display());
        EX_NOINPUT
    })
}

fn validate_bounds(b: &BoundsArgs) -> Result<Bounds, u8> {
    if !(1..=MAX_FLAG_WORLDS).contains(&b.worlds) || !(1..=MAX_FLAG_SUBJECTS).contains(&b.subjects)
    {
        eprintln!(
            "ddl-kant: --worlds and --subjects must be between 1 and {MAX_FLAG_WORLDS}"
        );
        return Err(EX_USAGE);
    }
    Ok(Bounds::new(b.worlds, b.subjects))
}

fn resolve_budget(flag: Option<u64>) -> Budget {
    let from_env = || match std::env::var("DDLKANT_BUDGET_MS") {
        Ok(v) => match v.trim().parse::<u64>() {
            Ok(n) => Some(n),
            Err(_) => {
                eprintln!("ddl-kant: ignoring invalid DDLKANT_BUDGET_MS value `{v}`");
                None
            }
        },
        Err(_) => None,
    };
    match flag.or_else(from_env) {
        Some(ms) => Budget::with_millis(ms),
        None => Budget::default(),
    }
}

fn search_error_exit(e: &SearchError) -> u8 {
    eprintln!("ddl-kant: {e}");
    match e {
        SearchError::BudgetExceeded { .. } | SearchError::GroundingBlowup { .. } => EX_BUDGET,
        _ => EX_CONTENT,
    }
}

/// Wall-clock values are stripped from JSON payloads (logged to stderr
/// instead) so identical queries rerun to byte-identical stdout.
fn stats_json(stats: &SearchStats) -> serde_json::Value {
    serde_json::json!({
        "nodes": stats.nodes,
        "millis": 0,
        "sizes_tried": stats.sizes_tried,
    })
}

fn emit_json(value: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(value).expect("json serializes"));
}

fn bounds_json(b: &Bounds) -> serde_json::Value {
    serde_json::json!({"worlds": b.worlds, "subjects": b.subjects})
}

fn cmd_parse(file: &Path) -> u8 {
    let src = match read_file(file) {
        Ok(s) => s,
        Err(code) => return code,
    };
    match parse_formulas(&src) {
        Ok(fs) => {
            for f in &fs {
                println!("{}", print_formula(f));
            }
            0
        }
        Err(e) => {
            eprintln!("ddl-kant: {}: {e}", file.display());
            EX_CONTENT
        }
    }
}

fn cmd_check(
    system: SystemKind,
    formula_file: &Path,
    bounds_args: &BoundsArgs,
    json: bool,
    budget_ms: Option<u64>,
) -> u8 {
    let bounds = match validate_bounds(bounds_args) {
        Ok(b) => b,
        Err(code) => return code,
    };
    let budget = resolve_budget(budget_ms);
    let src = match read_file(formula_file) {
        Ok(s) => s,
        Err(code) => return code,
    };
    let cfg = ExpansionConfig::default();
    let goal: Formula = match parse_formula(&src).map_err(|e| e.to_string()).and_then(|f| {
        expand(&f, &cfg).map_err(|e| e.to_string())
    }) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("ddl-kant: {}: {e}", formula_file.display());
            return EX_CONTENT;
        }
    };
    let axioms = System::build(system, &cfg).axioms;
    match check_valid(&axioms, &goal, &bounds, &FrameConditions::default(), &budget) {
        Ok((outcome, stats)) => {
            eprintln!("ddl-kant: check finished in {} ms", stats.millis);
            let valid = matches!(outcome, ValidityOutcome::ValidAtBounds);
            if json {
                let mut v = serde_json::json!({
                    "command": "check",
                    "system": system.as_str(),
                    "bounds": bounds_json(&bounds),
                    "outcome": if valid { "valid-at-bounds" } else { "countermodel-found" },
                    "stats": stats_json(&stats),
                });
                if let ValidityOutcome::CountermodelFound(m) = &outcome {
                    v["model"] = serde_json::to_value(m.as_ref()).expect("model serializes");
                }
                emit_json(&v);
            } else {
                match &outcome {
                    ValidityOutcome::ValidAtBounds => println!(
                        "valid at bounds (w={}, s={})",
                        bounds.worlds, bounds.subjects
                    ),
                    ValidityOutcome::CountermodelFound(m) => {
                        println!(
                            "countermodel found at (w={}, s={}):",
                            m.n_worlds(),
                            m.n_subjects()
                        );
                        print!("{}", render_model_text(m));
                    }
                }
            }
            if valid {
                0
            } else {
                EX_NEGATIVE
            }
        }
        Err(e) => search_error_exit(&e),
    }
}

fn load_formula_list(path: Option<&Path>, cfg: &ExpansionConfig) -> Result<Vec<Formula>, u8> {
    let Some(path) = path else {
        return Ok(Vec::new());
    };
    let src = read_file(path)?;
    let parsed = parse_formulas(&src).map_err(|e| {
        eprintln!("ddl-kant: {}: {e}", path.display());
        EX_CONTENT
    })?;
    expand_all(&parsed, cfg).map_err(|e| {
        eprintln!("ddl-kant: {}: {e}", path.display());
        EX_CONTENT
    })
}

fn cmd_find_model(
    axioms_file: Option<&Path>,
    constraints_file: Option<&Path>,
    system: Option<SystemKind>,
    bounds_args: &BoundsArgs,
    json: bool,
    budget_ms: Option<u64>,
) -> u8 {
    let bounds = match validate_bounds(bounds_args) {
        Ok(b) => b,
        Err(code) => return code,
    };
    let budget = resolve_budget(budget_ms);
    let cfg = ExpansionConfig::default();
    let mut axioms = match system {
        Some(kind) => System::build(kind, &cfg).axioms,
        None => Vec::new(),
    };
    match load_formula_list(axioms_file, &cfg) {
        Ok(fs) => axioms.extend(fs),
        Err(code) => return code,
    }
    let constraints = match load_formula_list(constraints_file, &cfg) {
        Ok(fs) => fs,
        Err(code) => return code,
    };
    match find_model(&axioms, &constraints, &bounds, &FrameConditions::default(), &budget) {
        Ok((outcome, stats)) => {
            eprintln!("ddl-kant: search finished in {} ms", stats.millis);
            let found = matches!(outcome, SearchOutcome::ModelFound(_));
            if json {
                let mut v = serde_json::json!({
                    "command": "find-model",
                    "bounds": bounds_json(&bounds),
                    "outcome": if found { "model-found" } else { "no-model-at-bounds" },
                    "stats": stats_json(&stats),
                });
                if let SearchOutcome::ModelFound(m) = &outcome {
                    v["model"] = serde_json::to_value(m.as_ref()).expect("model serializes");
                }
                emit_json(&v);
            } else {
                match &outcome {
                    SearchOutcome::ModelFound(m) => {
                        println!("model found at (w={}, s={}):", m.n_worlds(), m.n_subjects());
                        print!("{}", render_model_text(m));
                    }
                    SearchOutcome::NoModelAtBounds => println!(
                        "no model at bounds (w={}, s={})",
                        bounds.worlds, bounds.subjects
                    ),
                }
            }
            if found {
                0
            } else {
                EX_NEGATIVE
            }
        }
        Err(e) => search_error_exit(&e),
    }
}

fn cmd_judge(scenario_path: &Path, json: bool, budget_ms: Option<u64>) -> u8 {
    let src = match read_file(scenario_path) {
        Ok(s) => s,
        Err(code) => return code,
    };
    let sc = match parse_scenario(&src) {
        Ok(sc) => sc,
        Err(e) => {
            eprintln!("ddl-kant: {}: {e}", scenario_path.display());
            return EX_CONTENT;
        }
    };
    let opts = JudgeOptions {
        budget: resolve_budget(budget_ms),
        ..JudgeOptions::default()
    };
    match judge_with(&sc, &opts) {
        Ok(verdict) => {
            let total_ms: u64 = verdict.witnesses.iter().map(|w| w.millis).sum();
            eprintln!("ddl-kant: judged in {total_ms} ms");
            if json {
                let mut v = verdict.clone();
                for w in &mut v.witnesses {
                    w.millis = 0;
                }
                print!("{}", render_verdict(&v, RenderFormat::Json));
            } else {
                print!("{}", render_verdict(&verdict, RenderFormat::Text));
            }
            if verdict.status.is_decided() {
                0
            } else {
                EX_NEGATIVE
            }
        }
        Err(e @ JudgeError::InconsistentAssumptions { .. }) => {
            eprintln!("ddl-kant: {e}");
            EX_INCONSISTENT
        }
        Err(JudgeError::Search(e)) => search_error_exit(&e),
        Err(e) => {
            eprintln!("ddl-kant: {e}");
            EX_CONTENT
        }
    }
}

fn cmd_test_suite(
    bounds_args: &BoundsArgs,
    json: bool,
    markdown: bool,
    budget_ms: Option<u64>,
) -> u8 {
    let bounds = match validate_bounds(bounds_args) {
        Ok(b) => b,
        Err(code) => return code,
    };
    let budget = resolve_budget(budget_ms);
    let report = run_suite(&bounds, &budget);
    eprintln!("ddl-kant: suite finished in {} ms", report.runtime_ms);
    if json {
        let mut r = report.clone();
        r.runtime_ms = 0;
        print!("{}", render_table(&r, TableFormat::Json));
    } else if markdown {
        print!("{}", render_table(&report, TableFormat::Markdown));
    } else {
        print!("{}", render_table(&report, TableFormat::Text));
    }
    if report.matches_expected {
        0
    } else {
        EX_CONTENT
    }
}
