//! Frame-condition checker against brute-force enumeration: the admissible
//! obligation functions at one and two worlds are frozen in full, violation
//! witnesses are re-verified definitionally, and toggles act independently.

mod common;

use std::collections::BTreeSet;

use common::{arb_model, canonical_frame, frame_valid_obs, ObMap};
use ddl_kant_core::{check_frame, FrameConditions, FrameViolation, Model, WorldMask};
use proptest::prelude::*;

fn ob_map(entries: &[(WorldMask, &[WorldMask])]) -> ObMap {
    entries
        .iter()
        .map(|(ctx, fam)| (*ctx, fam.iter().copied().collect::<BTreeSet<_>>()))
        .collect()
}

fn model_with_ob(n_worlds: usize, ob: ObMap) -> Model {
    let mut m = canonical_frame(n_worlds, 1);
    m.ob = ob;
    m
}

#[test]
fn one_world_admissible_functions_frozen() {
    // Exactly two: no obligations at all, or "stay in the one world".
    let got = frame_valid_obs(1, &FrameConditions::all());
    assert_eq!(got, vec![ob_map(&[]), ob_map(&[(0b1, &[0b1])])]);
}

#[test]
fn two_world_admissible_functions_frozen() {
    // On each singleton context a nonempty ob is forced to be the sets
    // covering that world; the full context then has four admissible
    // families.  Note the last: both singletons obligatory at once passes
    // every condition, because aggregation (C3) only binds when the sets
    // overlap inside the context.
    let shared: &[(WorldMask, &[WorldMask])] = &[(0b01, &[0b01, 0b11]), (0b10, &[0b10, 0b11])];
    let tops: [&[WorldMask]; 4] = [&[0b11], &[0b01, 0b11], &[0b10, 0b11], &[0b01, 0b10, 0b11]];
    let mut want = vec![ob_map(&[])];
    for top in tops {
        let mut entries = shared.to_vec();
        entries.push((0b11, top));
        want.push(ob_map(&entries));
    }
    assert_eq!(frame_valid_obs(2, &FrameConditions::all()), want);
}

#[test]
fn condition_counts_cross_check() {
    // C1 alone bans the four (context, empty-set) bits: 2^12 survivors.
    let c1 = FrameConditions { c1: true, ..FrameConditions::none() };
    assert_eq!(frame_valid_obs(2, &c1).len(), 1 << 12);
    // No conditions: every membership grid (16 bits resp. 4 bits).
    assert_eq!(frame_valid_obs(2, &FrameConditions::none()).len(), 1 << 16);
    assert_eq!(frame_valid_obs(1, &FrameConditions::none()).len(), 1 << 4);
    // Dropping C3 changes nothing at two worlds: distinct candidate sets
    // that overlap inside the context are nested there, and the nested
    // intersection is already a member.
    let no3 = FrameConditions { c3: false, ..FrameConditions::all() };
    assert_eq!(frame_valid_obs(2, &no3).len(), 5);
    // Dropping C5 opens up genuinely new functions.
    let no5 = FrameConditions { c5: false, ..FrameConditions::all() };
    assert_eq!(frame_valid_obs(2, &no5).len(), 20);
}

#[test]
fn violations_carry_exact_witnesses() {
    // C1, the C2 closure it breaks at the empty context, and the C4
    // persistence it breaks toward the full context.
    let m = model_with_ob(1, ob_map(&[(0, &[0])]));
    assert_eq!(
        check_frame(&m, &FrameConditions::all()),
        vec![
            FrameViolation::C1 { context: 0 },
            FrameViolation::C2 { context: 0, in_ob: 0, out_ob: 1 },
            FrameViolation::C4 { context: 0, wider: 1, y: 0 },
        ]
    );

    // C2: sets agreeing inside the context must stand or fall together.
    let m = model_with_ob(2, ob_map(&[(0b01, &[0b01])]));
    let c2 = FrameConditions { c2: true, ..FrameConditions::none() };
    assert_eq!(
        check_frame(&m, &c2),
        vec![FrameViolation::C2 { context: 0b01, in_ob: 0b01, out_ob: 0b11 }]
    );

    // C3 needs three worlds: two members overlapping inside the context
    // without being nested.
    let m = model_with_ob(3, ob_map(&[(0b111, &[0b011, 0b101])]));
    let c3 = FrameConditions { c3: true, ..FrameConditions::none() };
    assert_eq!(
        check_frame(&m, &c3),
        vec![FrameViolation::C3 { context: 0b111, y: 0b011, z: 0b101 }]
    );

    // C4: an obligation inside a context must persist, padded, to wider ones.
    let m = model_with_ob(2, ob_map(&[(0b01, &[0b01])]));
    let c4 = FrameConditions { c4: true, ..FrameConditions::none() };
    assert_eq!(
        check_frame(&m, &c4),
        vec![FrameViolation::C4 { context: 0b01, wider: 0b11, y: 0b01 }]
    );

    // C5: an obligation still touching a narrower context restricts to it.
    let m = model_with_ob(2, ob_map(&[(0b11, &[0b11])]));
    assert_eq!(
        check_frame(&m, &FrameConditions::all()),
        vec![
            FrameViolation::C5 { context: 0b11, narrower: 0b01, z: 0b11 },
            FrameViolation::C5 { context: 0b11, narrower: 0b10, z: 0b11 },
        ]
    );
}

#[test]
fn toggles_select_which_conditions_fire() {
    // This function breaks C2 and C4 but nothing else; each toggle exposes
    // exactly its own condition's violations.
    let m = model_with_ob(2, ob_map(&[(0b01, &[0b01])]));
    let all = check_frame(&m, &FrameConditions::all());
    assert_eq!(all.len(), 2);
    assert!(all.iter().any(|v| matches!(v, FrameViolation::C2 { .. })));
    assert!(all.iter().any(|v| matches!(v, FrameViolation::C4 { .. })));
    assert!(check_frame(&m, &FrameConditions::none()).is_empty());
    let c5 = FrameConditions { c5: true, ..FrameConditions::none() };
    assert!(check_frame(&m, &c5).is_empty());
}

/// Re-derive a reported violation from the obligation function itself.
fn genuine(m: &Model, v: &FrameViolation) -> bool {
    match *v {
        FrameViolation::C1 { context } => m.ob_contains(context, 0),
        FrameViolation::C2 { context, in_ob, out_ob } => {
            in_ob & context == out_ob & context
                && m.ob_contains(context, in_ob)
                && !m.ob_contains(context, out_ob)
        }
        FrameViolation::C3 { context, y, z } => {
            m.ob_contains(context, y)
                && m.ob_contains(context, z)
                && context & y & z != 0
                && !m.ob_contains(context, y & z)
        }
        FrameViolation::C4 { context, wider, y } => {
            context & wider == context
                && y & context == y
                && m.ob_contains(context, y)
                && !m.ob_contains(wider, (wider & !context) | y)
        }
        FrameViolation::C5 { context, narrower, z } => {
            narrower & context == narrower
                && m.ob_contains(context, z)
                && narrower & z != 0
                && !m.ob_contains(narrower, z)
        }
    }
}

fn arb_conditions() -> impl Strategy<Value = FrameConditions> {
    (any::<bool>(), any::<bool>(), any::<bool>(), any::<bool>(), any::<bool>())
        .prop_map(|(c1, c2, c3, c4, c5)| FrameConditions { c1, c2, c3, c4, c5 })
}

proptest! {
    /// Every violation the checker reports is definitionally real, and a
    /// clean bill of health under a subset of conditions is consistent with
    /// the full check's findings.
    #[test]
    fn reported_violations_are_genuine(
        m in arb_model(2, 1),
        fc in arb_conditions(),
    ) {
        let found = check_frame(&m, &fc);
        for v in &found {
            prop_assert!(genuine(&m, v), "bogus witness {v:?}");
        }
        let full = check_frame(&m, &FrameConditions::all());
        prop_assert!(found.len() <= full.len());
        if fc == FrameConditions::all() {
            prop_assert_eq!(found, full);
        }
    }
}
