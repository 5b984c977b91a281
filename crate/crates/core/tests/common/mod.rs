//! Shared helpers for the integration suites: scoped formula strategies and
//! a brute-force reference engine for sizes small enough to enumerate.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::sync::OnceLock;

use ddl_kant_core::ast::{subject_name, ActRef, MaximExpr, MaximRef};
use ddl_kant_core::eval::holds_everywhere;
use ddl_kant_core::model::full_mask;
use ddl_kant_core::parser::MACRO_NAMES;
use ddl_kant_core::{
    check_frame, parse_formula, Formula, FrameConditions, MacroArg, Model, SubjectRef, WorldMask,
};
use proptest::prelude::*;

pub fn p(src: &str) -> Formula {
    parse_formula(src).unwrap_or_else(|e| panic!("parse failure on {src:?}: {e}"))
}

// ---------------------------------------------------------------------------
// Name pools.  Pools for different syntactic roles are disjoint, so a name
// decides its role and print -> parse cannot reinterpret it.

pub const ATOM_POOL: &[&str] = &["p", "q", "r"];
pub const ACTION_POOL: &[&str] = &["a", "b"];
pub const SUBJECT_CONST_POOL: &[&str] = &["alice", "bob", "s1"];
const SUBJECT_VARS: &[&str] = &["x", "y"];
const TERM_VARS: &[&str] = &["t", "u"];
const OPEN_VARS: &[&str] = &["o", "oo"];
const MAXIM_VARS: &[&str] = &["m", "mm"];

/// Bound variables currently in scope, by sort.
#[derive(Clone, Default)]
struct Scope {
    subject: Vec<&'static str>,
    term: Vec<&'static str>,
    open: Vec<&'static str>,
    maxim: Vec<&'static str>,
}

fn select_str(pool: &[&'static str]) -> impl Strategy<Value = &'static str> {
    proptest::sample::select(pool.to_vec())
}

// ---------------------------------------------------------------------------
// Surface formulas: everything the grammar can express, for print/parse
// round-trips.  Closed by construction (variables only drawn from scope).

fn arb_surface_subject(scope: &Scope) -> BoxedStrategy<SubjectRef> {
    let consts = select_str(SUBJECT_CONST_POOL).prop_map(|c| SubjectRef::Const(c.to_string()));
    if scope.subject.is_empty() {
        consts.boxed()
    } else {
        let vars =
            select_str(&scope.subject.clone()).prop_map(|v| SubjectRef::Var(v.to_string()));
        prop_oneof![2 => consts, 3 => vars].boxed()
    }
}

fn arb_world_mask() -> impl Strategy<Value = WorldMask> {
    // Up to four worlds; printed as `(worlds ...)`, possibly empty.
    0u32..16
}

fn arb_maxim_ref(depth: u32, scope: &Scope) -> BoxedStrategy<MaximRef> {
    let lit = {
        let act = if scope.open.is_empty() {
            select_str(ACTION_POOL)
                .prop_map(|a| ActRef::Action(a.to_string()))
                .boxed()
        } else {
            prop_oneof![
                select_str(ACTION_POOL).prop_map(|a| ActRef::Action(a.to_string())),
                select_str(&scope.open.clone()).prop_map(|v| ActRef::OpenVar(v.to_string())),
            ]
            .boxed()
        };
        (
            arb_surface_formula_at(depth, scope.clone()),
            act,
            arb_surface_formula_at(depth, scope.clone()),
        )
            .prop_map(|(circumstances, act, goal)| {
                MaximRef::Lit(Box::new(MaximExpr { circumstances, act, goal }))
            })
    };
    if scope.maxim.is_empty() {
        lit.boxed()
    } else {
        let vars = select_str(&scope.maxim.clone()).prop_map(|v| MaximRef::Var(v.to_string()));
        prop_oneof![2 => lit, 1 => vars].boxed()
    }
}

fn arb_surface_leaf(scope: &Scope) -> BoxedStrategy<Formula> {
    let mut opts: Vec<BoxedStrategy<Formula>> = vec![
        Just(Formula::Top).boxed(),
        select_str(ATOM_POOL).prop_map(Formula::atom).boxed(),
        arb_world_mask().prop_map(Formula::TermConst).boxed(),
        (select_str(ACTION_POOL), arb_surface_subject(scope))
            .prop_map(|(a, s)| Formula::Apply(a.to_string(), s))
            .boxed(),
        (
            proptest::collection::vec(arb_world_mask(), 1..=3),
            arb_surface_subject(scope),
        )
            .prop_map(|(rows, s)| Formula::OpenConst(rows, s))
            .boxed(),
    ];
    if !scope.term.is_empty() {
        opts.push(
            select_str(&scope.term.clone())
                .prop_map(|v| Formula::TermVar(v.to_string()))
                .boxed(),
        );
    }
    if !scope.open.is_empty() {
        opts.push(
            (select_str(&scope.open.clone()), arb_surface_subject(scope))
                .prop_map(|(v, s)| Formula::OpenApply(v.to_string(), s))
                .boxed(),
        );
    }
    proptest::strategy::Union::new(opts).boxed()
}

fn arb_surface_formula_at(depth: u32, scope: Scope) -> BoxedStrategy<Formula> {
    if depth == 0 {
        return arb_surface_leaf(&scope);
    }
    let d = depth - 1;
    let sub = || arb_surface_formula_at(d, scope.clone());
    let binder = |pool: &'static [&'static str], sort: usize| {
        let scope = scope.clone();
        select_str(pool)
            .prop_flat_map(move |v| {
                let mut inner = scope.clone();
                match sort {
                    0 => inner.subject.push(v),
                    1 => inner.term.push(v),
                    2 => inner.open.push(v),
                    _ => inner.maxim.push(v),
                }
                arb_surface_formula_at(d, inner).prop_map(move |body| (v, body))
            })
            .boxed()
    };
    let macro_call = (
        select_str(&MACRO_NAMES),
        arb_maxim_ref(d.min(1), &scope),
        arb_surface_subject(&scope),
    )
        .prop_map(|(name, mr, s)| {
            Formula::MacroCall(name.to_string(), vec![MacroArg::Maxim(mr), MacroArg::Subject(s)])
        });
    prop_oneof![
        3 => arb_surface_leaf(&scope),
        2 => sub().prop_map(Formula::not),
        1 => sub().prop_map(Formula::nec),
        2 => (sub(), sub()).prop_map(|(a, b)| Formula::and(a, b)),
        1 => (sub(), sub()).prop_map(|(a, b)| Formula::or(a, b)),
        2 => (sub(), sub()).prop_map(|(a, b)| Formula::implies(a, b)),
        1 => (sub(), sub()).prop_map(|(a, b)| Formula::iff(a, b)),
        2 => (sub(), sub()).prop_map(|(a, b)| Formula::ob(a, b)),
        1 => binder(SUBJECT_VARS, 0).prop_map(|(v, b)| Formula::forall_subject(v, b)),
        1 => binder(TERM_VARS, 1).prop_map(|(v, b)| Formula::forall_term(v, b)),
        1 => binder(OPEN_VARS, 2).prop_map(|(v, b)| Formula::forall_open(v, b)),
        1 => binder(MAXIM_VARS, 3).prop_map(|(v, b)| Formula::forall_maxim(v, b)),
        1 => macro_call,
    ]
    .boxed()
}

/// Closed surface formulas over the shared pools, covering every grammar
/// production including macros and maxim literals.
pub fn arb_surface_formula() -> BoxedStrategy<Formula> {
    arb_surface_formula_at(3, Scope::default())
}

// ---------------------------------------------------------------------------
// Semantic formulas: closed, macro-free, with every literal valid in a model
// of the given exact size (grounded open rows match the subject count, masks
// stay in the world domain, subject constants are canonical and in range).

fn arb_semantic_subject(n_subjects: usize, scope: &Scope) -> BoxedStrategy<SubjectRef> {
    let consts = (0..n_subjects).prop_map(|i| SubjectRef::Const(subject_name(i)));
    if scope.subject.is_empty() {
        consts.boxed()
    } else {
        let vars =
            select_str(&scope.subject.clone()).prop_map(|v| SubjectRef::Var(v.to_string()));
        prop_oneof![1 => consts, 2 => vars].boxed()
    }
}

/// Atom and action pools for the semantic strategies.
pub type SigPools = (&'static [&'static str], &'static [&'static str]);

fn arb_semantic_leaf(
    n_worlds: usize,
    n_subjects: usize,
    sig: SigPools,
    scope: &Scope,
) -> BoxedStrategy<Formula> {
    let full = full_mask(n_worlds);
    let mut opts: Vec<BoxedStrategy<Formula>> = vec![
        Just(Formula::Top).boxed(),
        select_str(sig.0).prop_map(Formula::atom).boxed(),
        (0..=full).prop_map(Formula::TermConst).boxed(),
        (select_str(sig.1), arb_semantic_subject(n_subjects, scope))
            .prop_map(|(a, s)| Formula::Apply(a.to_string(), s))
            .boxed(),
        (
            proptest::collection::vec(0..=full, n_subjects),
            arb_semantic_subject(n_subjects, scope),
        )
            .prop_map(|(rows, s)| Formula::OpenConst(rows, s))
            .boxed(),
    ];
    if !scope.term.is_empty() {
        opts.push(
            select_str(&scope.term.clone())
                .prop_map(|v| Formula::TermVar(v.to_string()))
                .boxed(),
        );
    }
    if !scope.open.is_empty() {
        opts.push(
            (select_str(&scope.open.clone()), arb_semantic_subject(n_subjects, scope))
                .prop_map(|(v, s)| Formula::OpenApply(v.to_string(), s))
                .boxed(),
        );
    }
    proptest::strategy::Union::new(opts).boxed()
}

fn arb_semantic_formula_at(
    depth: u32,
    n_worlds: usize,
    n_subjects: usize,
    sig: SigPools,
    scope: Scope,
) -> BoxedStrategy<Formula> {
    if depth == 0 {
        return arb_semantic_leaf(n_worlds, n_subjects, sig, &scope);
    }
    let d = depth - 1;
    let sub = || arb_semantic_formula_at(d, n_worlds, n_subjects, sig, scope.clone());
    let binder = |pool: &'static [&'static str], sort: usize| {
        let scope = scope.clone();
        select_str(pool)
            .prop_flat_map(move |v| {
                let mut inner = scope.clone();
                match sort {
                    0 => inner.subject.push(v),
                    1 => inner.term.push(v),
                    _ => inner.open.push(v),
                }
                arb_semantic_formula_at(d, n_worlds, n_subjects, sig, inner)
                    .prop_map(move |body| (v, body))
            })
            .boxed()
    };
    prop_oneof![
        3 => arb_semantic_leaf(n_worlds, n_subjects, sig, &scope),
        2 => sub().prop_map(Formula::not),
        1 => sub().prop_map(Formula::nec),
        2 => (sub(), sub()).prop_map(|(a, b)| Formula::and(a, b)),
        1 => (sub(), sub()).prop_map(|(a, b)| Formula::or(a, b)),
        2 => (sub(), sub()).prop_map(|(a, b)| Formula::implies(a, b)),
        1 => (sub(), sub()).prop_map(|(a, b)| Formula::iff(a, b)),
        2 => (sub(), sub()).prop_map(|(a, b)| Formula::ob(a, b)),
        1 => binder(SUBJECT_VARS, 0).prop_map(|(v, b)| Formula::forall_subject(v, b)),
        1 => binder(TERM_VARS, 1).prop_map(|(v, b)| Formula::forall_term(v, b)),
        1 => binder(OPEN_VARS, 2).prop_map(|(v, b)| Formula::forall_open(v, b)),
    ]
    .boxed()
}

/// Closed macro-free formulas that evaluate without error over any model of
/// exactly `(n_worlds, n_subjects)` with the pool signature.
pub fn arb_semantic_formula(n_worlds: usize, n_subjects: usize) -> BoxedStrategy<Formula> {
    arb_semantic_formula_at(3, n_worlds, n_subjects, (ATOM_POOL, ACTION_POOL), Scope::default())
}

/// Same, over a caller-chosen (smaller) atom/action signature.
pub fn arb_semantic_formula_sig(
    n_worlds: usize,
    n_subjects: usize,
    sig: SigPools,
) -> BoxedStrategy<Formula> {
    arb_semantic_formula_at(3, n_worlds, n_subjects, sig, Scope::default())
}

// ---------------------------------------------------------------------------
// Model strategy: arbitrary valuation, action rows, and obligation grid
// (not necessarily frame-valid) at an exact size with canonical subjects.

pub type ObMap = BTreeMap<WorldMask, BTreeSet<WorldMask>>;

fn grid_to_ob(grid: u64, n_worlds: usize) -> ObMap {
    let n_masks = full_mask(n_worlds) as usize + 1;
    let mut ob: ObMap = BTreeMap::new();
    for x in 0..n_masks {
        for y in 0..n_masks {
            if grid & (1u64 << (x * n_masks + y)) != 0 {
                ob.entry(x as WorldMask).or_default().insert(y as WorldMask);
            }
        }
    }
    ob
}

/// Model skeleton with canonical names and identity-interpreted canonical
/// subject constants.
pub fn canonical_frame(n_worlds: usize, n_subjects: usize) -> Model {
    let mut m = Model::canonical(n_worlds, n_subjects);
    for i in 0..n_subjects {
        m.subj_interp.insert(subject_name(i), i);
    }
    m
}

pub fn arb_model(n_worlds: usize, n_subjects: usize) -> BoxedStrategy<Model> {
    assert!(n_worlds <= 2, "obligation grid strategy is 4^n bits");
    let full = full_mask(n_worlds);
    let n_masks = full as usize + 1;
    let grid_bits = (n_masks * n_masks) as u32;
    let vals = proptest::collection::vec(0..=full, ATOM_POOL.len());
    let acts = proptest::collection::vec(0..=full, ACTION_POOL.len() * n_subjects);
    let grid = 0u64..(1u64 << grid_bits);
    (vals, acts, grid)
        .prop_map(move |(vals, acts, grid)| {
            let mut m = canonical_frame(n_worlds, n_subjects);
            for (atom, v) in ATOM_POOL.iter().zip(vals) {
                m.val.insert(atom.to_string(), v);
            }
            for (k, action) in ACTION_POOL.iter().enumerate() {
                let row = acts[k * n_subjects..(k + 1) * n_subjects].to_vec();
                m.act_val.insert(action.to_string(), row);
            }
            m.ob = grid_to_ob(grid, n_worlds);
            m
        })
        .boxed()
}

// ---------------------------------------------------------------------------
// Brute-force reference engine.

/// Every obligation function over `n_worlds` worlds satisfying the frame
/// conditions, by direct enumeration of the `2^(4^n)` membership grids.
pub fn frame_valid_obs(n_worlds: usize, fc: &FrameConditions) -> Vec<ObMap> {
    assert!(n_worlds <= 2, "grid enumeration is 2^(4^n)");
    let n_masks = full_mask(n_worlds) as usize + 1;
    let n_bits = n_masks * n_masks;
    let mut out = Vec::new();
    let mut probe = Model::canonical(n_worlds, 1);
    for grid in 0u64..(1u64 << n_bits) {
        probe.ob = grid_to_ob(grid, n_worlds);
        if check_frame(&probe, fc).is_empty() {
            out.push(probe.ob.clone());
        }
    }
    out
}

/// `frame_valid_obs` under the default (all-on) conditions, cached.
pub fn frame_valid_obs_all(n_worlds: usize) -> &'static [ObMap] {
    static NW1: OnceLock<Vec<ObMap>> = OnceLock::new();
    static NW2: OnceLock<Vec<ObMap>> = OnceLock::new();
    match n_worlds {
        1 => NW1.get_or_init(|| frame_valid_obs(1, &FrameConditions::all())),
        2 => NW2.get_or_init(|| frame_valid_obs(2, &FrameConditions::all())),
        _ => panic!("cached only for 1..=2 worlds"),
    }
}

/// All models at exactly `(n_worlds, n_subjects)` over the given signature,
/// using the supplied admissible obligation functions.  Canonical subject
/// constants are interpreted as themselves; the extra `consts` range over
/// every subject index, mirroring the solver's interpretation odometer.
pub fn enumerate_models(
    n_worlds: usize,
    n_subjects: usize,
    atoms: &[&str],
    actions: &[&str],
    consts: &[&str],
    obs: &[ObMap],
) -> Vec<Model> {
    let full = full_mask(n_worlds);
    let n_masks = full as usize + 1;
    let mask_slots = atoms.len() + actions.len() * n_subjects;
    let slots = mask_slots + consts.len();
    let radix = |k: usize| if k < mask_slots { n_masks } else { n_subjects };
    let mut out = Vec::new();
    let mut odo = vec![0usize; slots];
    loop {
        for ob in obs {
            let mut m = canonical_frame(n_worlds, n_subjects);
            for (k, atom) in atoms.iter().enumerate() {
                m.val.insert(atom.to_string(), odo[k] as WorldMask);
            }
            for (k, action) in actions.iter().enumerate() {
                let base = atoms.len() + k * n_subjects;
                let row: Vec<WorldMask> =
                    (0..n_subjects).map(|j| odo[base + j] as WorldMask).collect();
                m.act_val.insert(action.to_string(), row);
            }
            for (k, c) in consts.iter().enumerate() {
                m.subj_interp.insert(c.to_string(), odo[mask_slots + k]);
            }
            m.ob = ob.clone();
            out.push(m);
        }
        let mut k = 0;
        loop {
            if k == slots {
                return out;
            }
            if odo[k] + 1 < radix(k) {
                odo[k] += 1;
                break;
            }
            odo[k] = 0;
            k += 1;
        }
    }
}

/// True iff every formula holds at every world.  Evaluation errors (e.g. a
/// canonical subject constant beyond the model's subject count) count as
/// failure, mirroring the solver's treatment of inadmissible sizes.
pub fn model_satisfies(m: &Model, formulas: &[Formula]) -> bool {
    formulas
        .iter()
        .all(|f| holds_everywhere(f, m).unwrap_or(false))
}

/// First size (worlds-major, subjects-minor, matching search order) within
/// the caps at which some frame-valid model satisfies all formulas.
pub fn brute_first_sat_size(
    formulas: &[Formula],
    max_worlds: usize,
    max_subjects: usize,
    sig: (&[&str], &[&str], &[&str]),
    fc: &FrameConditions,
) -> Option<(usize, usize)> {
    let (atoms, actions, consts) = sig;
    for nw in 1..=max_worlds {
        let obs = frame_valid_obs(nw, fc);
        for ns in 1..=max_subjects {
            if enumerate_models(nw, ns, atoms, actions, consts, &obs)
                .iter()
                .any(|m| model_satisfies(m, formulas))
            {
                return Some((nw, ns));
            }
        }
    }
    None
}

/// First size at which some frame-valid model of the axioms has a world
/// where the goal fails: the brute-force countermodel search.
pub fn brute_first_countermodel_size(
    axioms: &[Formula],
    goal: &Formula,
    max_worlds: usize,
    max_subjects: usize,
    sig: (&[&str], &[&str], &[&str]),
    fc: &FrameConditions,
) -> Option<(usize, usize)> {
    let (atoms, actions, consts) = sig;
    for nw in 1..=max_worlds {
        let obs = frame_valid_obs(nw, fc);
        for ns in 1..=max_subjects {
            let hit = enumerate_models(nw, ns, atoms, actions, consts, &obs)
                .iter()
                .any(|m| {
                    model_satisfies(m, axioms)
                        && matches!(
                            ddl_kant_core::extension(goal, m),
                            Ok(e) if e != m.full()
                        )
                });
            if hit {
                return Some((nw, ns));
            }
        }
    }
    None
}

/// All frame violations under the default conditions, as a convenience.
pub fn violations(m: &Model) -> usize {
    check_frame(m, &FrameConditions::all()).len()
}
