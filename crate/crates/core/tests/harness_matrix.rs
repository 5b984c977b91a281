//! The comparative faithfulness suite: the shipped grid is reproduced at
//! the default bounds, degrades in the documented way when only one subject
//! is allowed, and renders/serializes stably.

use ddl_kant_core::harness::{TestReport, TESTS, TEST_IDS};
use ddl_kant_core::{
    expected_matrix, render_table, run_suite, Bounds, Budget, CellResult, TableFormat,
};

fn default_report() -> TestReport {
    run_suite(&Bounds::default(), &Budget::default())
}

#[test]
fn default_run_reproduces_the_expected_grid() {
    let r = default_report();
    assert_eq!(r.matrix, expected_matrix());
    assert!(r.matches_expected);
    assert_eq!((r.bounds.worlds, r.bounds.subjects), (3, 2));
    assert!(r.warnings.is_empty(), "{:?}", r.warnings);
    assert!(!r.notes.is_empty());

    // Cell-level spot checks of what the grid means.
    for id in TEST_IDS {
        assert_eq!(r.matrix[id]["naive"], CellResult::Fail, "{id}");
        assert_eq!(r.matrix[id]["custom"], CellResult::Pass, "{id}");
        let kroy_expected = if id == "T1" || id == "T2" {
            CellResult::Pass
        } else {
            CellResult::Fail
        };
        assert_eq!(r.matrix[id]["kroy"], kroy_expected, "{id}");
    }

    // Every cell carries a witness line, and the load-bearing ones say why.
    for id in TEST_IDS {
        for system in ["naive", "kroy", "custom"] {
            assert!(!r.details[id][system].is_empty(), "{id}/{system}");
        }
    }
    assert!(r.details["T1"]["naive"].contains("no added axioms"));
    assert!(r.details["T1"]["custom"].contains("base-logic countermodel"));
    assert!(r.details["T3"]["kroy"].contains("countermodel"));
    assert!(r.details["T5"]["custom"].contains("prohibited as expected"));
    assert!(r.details["T5"]["naive"].contains("expected prohibited"));
    assert!(r.details["T6"]["custom"].contains("maxims"));
}

#[test]
fn single_subject_bounds_warn_and_stop_discriminating() {
    let r = run_suite(&Bounds::new(3, 1), &Budget::default());
    assert!(
        r.warnings.iter().any(|w| w.contains("only one subject")),
        "{:?}",
        r.warnings
    );
    assert!(!r.matches_expected);
    // With one subject, universalizing across people is vacuous: the naive
    // system suddenly "passes" T2, and the kroy axiom collapses into a
    // tautology, so its T1 countermodel disappears.
    assert_eq!(r.matrix["T2"]["naive"], CellResult::Pass);
    assert_eq!(r.matrix["T1"]["kroy"], CellResult::Fail);
}

#[test]
fn report_round_trips_through_serde() {
    let r = default_report();
    let json = serde_json::to_string(&r).unwrap();
    let back: TestReport = serde_json::from_str(&json).unwrap();
    assert_eq!(back, r);
}

#[test]
fn table_rendering_in_all_three_formats() {
    let r = default_report();

    let text = render_table(&r, TableFormat::Text);
    assert!(text.contains("faithfulness suite at bounds (w=3, s=2)"), "{text}");
    assert!(text.contains('✓') && text.contains('×'), "{text}");
    assert!(text.contains("matrix matches expected grid: yes"), "{text}");
    for (id, title, _) in TESTS {
        assert!(text.contains(&format!("{id} {title}")), "{text}");
    }

    let md = render_table(&r, TableFormat::Markdown);
    assert!(md.starts_with("| test | naive | kroy | custom |"), "{md}");
    assert!(md.contains("| --- | --- | --- | --- |"), "{md}");
    assert!(md.contains("pass") && md.contains("fail"), "{md}");
    assert!(md.contains("matches expected grid: true"), "{md}");

    let json: serde_json::Value =
        serde_json::from_str(&render_table(&r, TableFormat::Json)).unwrap();
    assert_eq!(json["matrix"]["T1"]["naive"], "fail");
    assert_eq!(json["matrix"]["T2"]["kroy"], "pass");
    assert_eq!(json["matrix"]["T8"]["custom"], "pass");
    assert_eq!(json["matches_expected"], true);

    // A run that misses the grid names the offending cells.
    let off = run_suite(&Bounds::new(3, 1), &Budget::default());
    let text = render_table(&off, TableFormat::Text);
    assert!(text.contains("matrix matches expected grid: NO"), "{text}");
    assert!(text.contains("T2/naive: got pass, expected fail"), "{text}");
}
