//! Grounding: quantifier elimination at fixed domain sizes preserves truth
//! world-for-world, produces genuinely ground output, and charges its
//! instantiation cap honestly.

mod common;

use common::{arb_model, arb_semantic_formula, p};
use ddl_kant_core::ground::ground_with_cap;
use ddl_kant_core::{
    extension, ground, print_formula, Bounds, Formula, GroundError, SubjectRef,
};
use proptest::prelude::*;

/// Conjuncts along the right-nested `and` spine.
fn spine_len(f: &Formula) -> usize {
    match f {
        Formula::And(_, b) => 1 + spine_len(b),
        _ => 1,
    }
}

#[test]
fn subject_quantifier_unrolls_to_named_instances() {
    let f = p("(forall-subject x (act a x))");
    let g = ground(&f, &Bounds::new(3, 2)).unwrap();
    assert_eq!(
        g,
        Formula::and(
            Formula::Apply("a".into(), SubjectRef::Const("s1".into())),
            Formula::Apply("a".into(), SubjectRef::Const("s2".into())),
        )
    );
    // One subject: the conjunction collapses to the single instance.
    let g1 = ground(&f, &Bounds::new(3, 1)).unwrap();
    assert_eq!(g1, Formula::Apply("a".into(), SubjectRef::Const("s1".into())));
}

#[test]
fn term_quantifier_unrolls_over_the_powerset() {
    let f = p("(forall-term t (ob p t))");
    let g = ground(&f, &Bounds::new(3, 1)).unwrap();
    assert_eq!(spine_len(&g), 8);
    let g = ground(&f, &Bounds::new(1, 1)).unwrap();
    assert_eq!(
        g,
        Formula::and(
            Formula::ob(Formula::atom("p"), Formula::TermConst(0)),
            Formula::ob(Formula::atom("p"), Formula::TermConst(1)),
        )
    );
}

#[test]
fn open_quantifier_unrolls_over_subject_indexed_rows() {
    // Eight world-sets per subject, two subjects: 64 instances.
    let f = p("(forall-open o (act o s1))");
    let g = ground(&f, &Bounds::new(3, 2)).unwrap();
    assert_eq!(spine_len(&g), 64);
    assert!(g.is_ground());

    // At (1,1) the four instances are the two one-row literals.
    let g = ground(&f, &Bounds::new(1, 1)).unwrap();
    assert_eq!(
        g,
        Formula::and(
            Formula::OpenConst(vec![0], SubjectRef::Const("s1".into())),
            Formula::OpenConst(vec![1], SubjectRef::Const("s1".into())),
        )
    );
}

#[test]
fn maxim_quantifier_grounds_to_its_body() {
    let f = Formula::forall_maxim("m", p("(ob p true)"));
    assert_eq!(ground(&f, &Bounds::new(2, 1)).unwrap(), p("(ob p true)"));
}

#[test]
fn grounding_errors() {
    assert_eq!(
        ground(&Formula::TermVar("t".into()), &Bounds::new(1, 1)),
        Err(GroundError::UnboundVariable("t".into()))
    );
    assert_eq!(
        ground(&p("(will (maxim p a q) s1)"), &Bounds::new(1, 1)),
        Err(GroundError::MacroPresent("will".into()))
    );
    assert_eq!(ground(&p("p"), &Bounds::new(0, 1)), Err(GroundError::EmptyDomain));
    assert_eq!(ground(&p("p"), &Bounds::new(1, 0)), Err(GroundError::EmptyDomain));
    assert_eq!(ground(&p("p"), &Bounds::new(17, 1)), Err(GroundError::TooManyWorlds(17)));
}

#[test]
fn instantiation_cap_counts_instances() {
    // One open quantifier at (2,2): 4^2 = 16 rows, one charge each.
    let f = p("(forall-open o (act o s1))");
    assert!(ground_with_cap(&f, &Bounds::new(2, 2), 16).is_ok());
    assert_eq!(
        ground_with_cap(&f, &Bounds::new(2, 2), 15),
        Err(GroundError::Blowup { cap: 15 })
    );
    // Nested quantifiers multiply.
    let f = p("(forall-subject x (forall-term t (ob (act a x) t)))");
    assert!(ground_with_cap(&f, &Bounds::new(2, 2), 10).is_ok());
    assert_eq!(
        ground_with_cap(&f, &Bounds::new(2, 2), 9),
        Err(GroundError::Blowup { cap: 9 })
    );
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 10_000, .. ProptestConfig::default() })]

    /// Grounding at the model's exact size preserves the extension, and the
    /// output is ground and survives a print/parse round-trip.
    #[test]
    fn ground_agrees_with_eval(
        (m, f, nw, ns) in (1usize..=2, 1usize..=2).prop_flat_map(|(nw, ns)| {
            (arb_model(nw, ns), arb_semantic_formula(nw, ns), Just(nw), Just(ns))
        })
    ) {
        let g = ground(&f, &Bounds::new(nw, ns)).expect("generated formulas are closed");
        prop_assert!(g.is_ground(), "not ground: {:?}", g);
        prop_assert_eq!(extension(&f, &m), extension(&g, &m), "formula {:?}", f);
        let printed = print_formula(&g);
        let back = ddl_kant_core::parse_formula(&printed);
        prop_assert_eq!(back.as_ref(), Ok(&g));
    }
}
