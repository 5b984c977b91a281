//! Parser/printer contract: canonical printing then parsing is the identity,
//! errors carry usable positions, and the lexer/parser never panic.

mod common;

use common::{arb_surface_formula, p};
use ddl_kant_core::ast::{ActRef, MaximExpr, MaximRef};
use ddl_kant_core::{
    parse_formula, parse_formulas, print_formula, Formula, MacroArg, SubjectRef,
};
use proptest::prelude::*;

#[test]
fn core_forms_parse_to_expected_ast() {
    assert_eq!(p("true"), Formula::Top);
    assert_eq!(p("p"), Formula::atom("p"));
    assert_eq!(p("(not p)"), Formula::not(Formula::atom("p")));
    assert_eq!(
        p("(and p (or q r))"),
        Formula::and(
            Formula::atom("p"),
            Formula::or(Formula::atom("q"), Formula::atom("r"))
        )
    );
    assert_eq!(
        p("(ob p q)"),
        Formula::ob(Formula::atom("p"), Formula::atom("q"))
    );
    assert_eq!(
        p("(act lie alice)"),
        Formula::Apply("lie".into(), SubjectRef::Const("alice".into()))
    );
    assert_eq!(
        p("(forall-subject x (act lie x))"),
        Formula::forall_subject("x", Formula::Apply("lie".into(), SubjectRef::Var("x".into())))
    );
    assert_eq!(
        p("(forall-term t (ob p t))"),
        Formula::forall_term("t", Formula::ob(Formula::atom("p"), Formula::TermVar("t".into())))
    );
}

#[test]
fn sugar_desugars() {
    assert_eq!(p("false"), Formula::not(Formula::Top));
    assert_eq!(
        p("(diamond p)"),
        Formula::not(Formula::nec(Formula::not(Formula::atom("p"))))
    );
    // Monadic ob defaults its context to truth.
    assert_eq!(p("(ob p)"), Formula::ob(Formula::atom("p"), Formula::Top));
    assert_eq!(print_formula(&p("(ob p)")), "(ob p true)");
}

#[test]
fn world_set_literals() {
    assert_eq!(p("(worlds)"), Formula::TermConst(0));
    assert_eq!(p("(worlds w1 w3)"), Formula::TermConst(0b101));
    assert_eq!(print_formula(&Formula::TermConst(0)), "(worlds)");
    assert_eq!(print_formula(&Formula::TermConst(0b101)), "(worlds w1 w3)");
    assert_eq!(
        p("(open-app (worlds) (worlds w2) bob)"),
        Formula::OpenConst(vec![0, 0b10], SubjectRef::Const("bob".into()))
    );

    assert!(parse_formula("(worlds w1 w1)").is_err(), "duplicate world");
    assert!(parse_formula("(worlds w0)").is_err(), "no zeroth world");
    assert!(parse_formula("(worlds w17)").is_err(), "beyond mask width");
    assert!(parse_formula("(open-app alice)").is_err(), "rows required");
}

#[test]
fn macro_calls_and_maxim_literals() {
    let f = p("(prohibited (maxim p lie q) alice)");
    assert_eq!(
        f,
        Formula::MacroCall(
            "prohibited".into(),
            vec![
                MacroArg::Maxim(MaximRef::Lit(Box::new(MaximExpr {
                    circumstances: Formula::atom("p"),
                    act: ActRef::Action("lie".into()),
                    goal: Formula::atom("q"),
                }))),
                MacroArg::Subject(SubjectRef::Const("alice".into())),
            ]
        )
    );
    assert_eq!(print_formula(&f), "(prohibited (maxim p lie q) alice)");

    // Maxim variables resolve only under their binder.
    assert!(parse_formula("(will m alice)").is_err());
    let g = p("(forall-maxim m (will m alice))");
    assert_eq!(
        g,
        Formula::forall_maxim(
            "m",
            Formula::MacroCall(
                "will".into(),
                vec![
                    MacroArg::Maxim(MaximRef::Var("m".into())),
                    MacroArg::Subject(SubjectRef::Const("alice".into())),
                ]
            )
        )
    );
}

#[test]
fn scope_decides_name_roles() {
    // The same token is an atom outside the binder and a variable inside.
    assert_eq!(p("t"), Formula::atom("t"));
    assert_eq!(
        p("(forall-term t t)"),
        Formula::forall_term("t", Formula::TermVar("t".into()))
    );
    // Inner binders shadow outer ones of a different sort.
    let f = p("(forall-term t (forall-open o (act o alice)))");
    assert_eq!(
        f,
        Formula::forall_term(
            "t",
            Formula::forall_open(
                "o",
                Formula::OpenApply("o".into(), SubjectRef::Const("alice".into()))
            )
        )
    );
    // A subject variable cannot sit in formula position.
    assert!(parse_formula("(forall-subject x x)").is_err());
    // An open variable cannot be used as a subject.
    assert!(parse_formula("(forall-open o (act lie o))").is_err());
}

#[test]
fn reserved_names_rejected_where_ambiguous() {
    assert!(parse_formula("(forall-subject box p)").is_err());
    assert!(parse_formula("(forall-term and p)").is_err());
    assert!(parse_formula("(act lie ob)").is_err());
    assert!(parse_formula("(will (maxim p ob q) alice)").is_err());
}

#[test]
fn error_positions_point_at_the_offender() {
    let e = parse_formula("(and p").unwrap_err();
    assert_eq!((e.line, e.col), (1, 7));

    let e = parse_formula("(and p q) r").unwrap_err();
    assert_eq!((e.line, e.col), (1, 11));

    let e = parse_formula("(and p\n  (implies q %))").unwrap_err();
    assert_eq!((e.line, e.col), (2, 14));

    let e = parse_formula("(frobnicate p)").unwrap_err();
    assert_eq!((e.line, e.col), (1, 2));
    assert!(e.to_string().contains("frobnicate"), "{e}");

    let e = parse_formula("").unwrap_err();
    assert_eq!((e.line, e.col), (1, 1));
}

#[test]
fn comments_and_whitespace_are_skipped() {
    let f = p("; leading comment\n(and p ; inline\n  q)\n; trailing");
    assert_eq!(f, Formula::and(Formula::atom("p"), Formula::atom("q")));

    let fs = parse_formulas("p\n(not q)\n; done\n").unwrap();
    assert_eq!(fs, vec![Formula::atom("p"), Formula::not(Formula::atom("q"))]);
    assert_eq!(parse_formulas("; nothing but comments\n").unwrap(), vec![]);
}

#[test]
fn corpus_and_formula_files_round_trip() {
    let root = concat!(env!("CARGO_MANIFEST_DIR"), "/../..");
    let mut seen = 0;
    for entry in std::fs::read_dir(format!("{root}/corpus")).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().and_then(|e| e.to_str()) != Some("ked") {
            continue;
        }
        seen += 1;
        let sc = ddl_kant_core::load_scenario(&path)
            .unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        let mut formulas = vec![sc.maxim.circumstances.clone(), sc.maxim.goal.clone()];
        formulas.extend(sc.assumptions.iter().cloned());
        for f in formulas {
            assert_eq!(p(&print_formula(&f)), f, "in {}", path.display());
        }
    }
    assert!(seen >= 6, "corpus shrank to {seen} scenarios");

    let law = std::fs::read_to_string(format!("{root}/formulas/universalizability-law.l")).unwrap();
    for f in parse_formulas(&law).unwrap() {
        assert_eq!(p(&print_formula(&f)), f);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 10_000, .. ProptestConfig::default() })]

    /// print -> parse is the identity on well-formed closed ASTs.
    #[test]
    fn print_parse_round_trip(f in arb_surface_formula()) {
        let printed = print_formula(&f);
        let back = parse_formula(&printed);
        prop_assert_eq!(back.as_ref(), Ok(&f), "printed: {}", printed);
        // And printing is a fixed point from then on.
        prop_assert_eq!(print_formula(&back.unwrap()), printed);
    }
}

proptest! {
    /// The parser returns, with in-range positions, on arbitrary input.
    #[test]
    fn parser_total_on_junk(src in "[ ()a-z0-9_\\-;\\n]{0,60}") {
        if let Err(e) = parse_formulas(&src) {
            let lines: Vec<&str> = src.split('\n').collect();
            prop_assert!(e.line >= 1 && e.line <= lines.len().max(1));
            prop_assert!(e.col >= 1);
        }
    }

    /// Non-ASCII and control characters are reported, not mangled.
    #[test]
    fn parser_total_on_unicode(src in "\\PC{0,30}") {
        let _ = parse_formulas(&src);
    }
}
