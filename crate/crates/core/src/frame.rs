//! Frame conditions on the obligation function, each individually
//! toggleable.  `check_frame` reports every violation it finds, with the
//! witnessing sets, so callers can show *why* a candidate model is out.

use serde::{Deserialize, Serialize};

use crate::model::{all_subsets, Model, WorldMask};

/// Which conditions to require.  Defaults to all five.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameConditions {
    /// Nothing impossible is obligatory: the empty set is never in `ob(X)`.
    pub c1: bool,
    /// Only the part inside the context matters: sets agreeing on `X` are
    /// either both in `ob(X)` or both out.
    pub c2: bool,
    /// Jointly satisfiable obligations aggregate: their intersection is
    /// obligatory too.
    pub c3: bool,
    /// Obligations persist to wider contexts, padded with the new worlds.
    pub c4: bool,
    /// Obligations restrict to narrower contexts they still touch.
    pub c5: bool,
}

impl Default for FrameConditions {
    fn default() -> Self {
        FrameConditions { c1: true, c2: true, c3: true, c4: true, c5: true }
    }
}

impl FrameConditions {
    pub fn all() -> Self {
        Self::default()
    }

    pub fn none() -> Self {
        FrameConditions { c1: false, c2: false, c3: false, c4: false, c5: false }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FrameViolation {
    /// `∅ ∈ ob(context)`.
    C1 { context: WorldMask },
    /// `y ∩ context == z ∩ context` but only `y` is in `ob(context)`.
    C2 { context: WorldMask, in_ob: WorldMask, out_ob: WorldMask },
    /// `y, z ∈ ob(context)`, `context ∩ y ∩ z ≠ ∅`, but `y ∩ z ∉ ob(context)`.
    C3 { context: WorldMask, y: WorldMask, z: WorldMask },
    /// `y ⊆ context ⊆ wider`, `y ∈ ob(context)`, but
    /// `(wider ∖ context) ∪ y ∉ ob(wider)`.
    C4 { context: WorldMask, wider: WorldMask, y: WorldMask },
    /// `narrower ⊆ context`, `z ∈ ob(context)`, `narrower ∩ z ≠ ∅`, but
    /// `z ∉ ob(narrower)`.
    C5 { context: WorldMask, narrower: WorldMask, z: WorldMask },
}

/// Check the enabled conditions over the whole powerset; empty result means
/// the model's `ob` is admissible.
pub fn check_frame(m: &Model, fc: &FrameConditions) -> Vec<FrameViolation> {
    let n = m.n_worlds();
    let mut out = Vec::new();
    for x in all_subsets(n) {
        if fc.c1 && m.ob_contains(x, 0) {
            out.push(FrameViolation::C1 { context: x });
        }
        if fc.c2 {
            for y in all_subsets(n) {
                for z in all_subsets(n) {
                    if y < z && y & x == z & x && m.ob_contains(x, y) && !m.ob_contains(x, z) {
                        out.push(FrameViolation::C2 { context: x, in_ob: y, out_ob: z });
                    }
                    if y < z && y & x == z & x && m.ob_contains(x, z) && !m.ob_contains(x, y) {
                        out.push(FrameViolation::C2 { context: x, in_ob: z, out_ob: y });
                    }
                }
            }
        }
        if fc.c3 {
            for y in all_subsets(n) {
                for z in all_subsets(n) {
                    if y <= z
                        && m.ob_contains(x, y)
                        && m.ob_contains(x, z)
                        && x & y & z != 0
                        && !m.ob_contains(x, y & z)
                    {
                        out.push(FrameViolation::C3 { context: x, y, z });
                    }
                }
            }
        }
        if fc.c4 {
            for z in all_subsets(n) {
                if x & z != x {
                    continue; // need x ⊆ z
                }
                for y in all_subsets(n) {
                    if y & x == y && m.ob_contains(x, y) && !m.ob_contains(z, (z & !x) | y) {
                        out.push(FrameViolation::C4 { context: x, wider: z, y });
                    }
                }
            }
        }
        if fc.c5 {
            for y in all_subsets(n) {
                if y & x != y {
                    continue; // need y ⊆ x
                }
                for z in all_subsets(n) {
                    if m.ob_contains(x, z) && y & z != 0 && !m.ob_contains(y, z) {
                        out.push(FrameViolation::C5 { context: x, narrower: y, z });
                    }
                }
            }
        }
    }
    out
}
