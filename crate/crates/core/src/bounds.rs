//! Search bounds (domain sizes plus signature) and resource budgets.

use serde::{Deserialize, Serialize};

use crate::sorts::Signature;

/// Domain-size caps and the signature to interpret.  Search tries every
/// world/subject count up to the caps; grounding uses the caps as the exact
/// domain sizes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bounds {
    pub worlds: usize,
    pub subjects: usize,
    pub atoms: Vec<String>,
    pub actions: Vec<String>,
    pub subject_consts: Vec<String>,
}

pub const DEFAULT_WORLDS: usize = 3;
pub const DEFAULT_SUBJECTS: usize = 2;

impl Default for Bounds {
    fn default() -> Self {
        Bounds::new(DEFAULT_WORLDS, DEFAULT_SUBJECTS)
    }
}

impl Bounds {
    pub fn new(worlds: usize, subjects: usize) -> Self {
        Bounds {
            worlds,
            subjects,
            atoms: Vec::new(),
            actions: Vec::new(),
            subject_consts: Vec::new(),
        }
    }

    /// Fold a formula signature into the bounds, keeping lists sorted and
    /// duplicate-free so variable numbering downstream is canonical.
    pub fn absorb(&mut self, sig: &Signature) {
        for a in &sig.atoms {
            if !self.atoms.contains(a) {
                self.atoms.push(a.clone());
            }
        }
        for a in &sig.actions {
            if !self.actions.contains(a) {
                self.actions.push(a.clone());
            }
        }
        for c in &sig.subject_consts {
            if !self.subject_consts.contains(c) {
                self.subject_consts.push(c.clone());
            }
        }
        self.atoms.sort();
        self.actions.sort();
        self.subject_consts.sort();
    }

    pub fn with_atoms(mut self, atoms: &[&str]) -> Self {
        self.atoms = atoms.iter().map(|s| s.to_string()).collect();
        self.atoms.sort();
        self
    }

    pub fn with_actions(mut self, actions: &[&str]) -> Self {
        self.actions = actions.iter().map(|s| s.to_string()).collect();
        self.actions.sort();
        self
    }

    pub fn with_subject_consts(mut self, consts: &[&str]) -> Self {
        self.subject_consts = consts.iter().map(|s| s.to_string()).collect();
        self.subject_consts.sort();
        self
    }
}

/// Resource ceiling for one search call, shared across all sizes it tries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    /// Solver steps: decisions plus propagated assignments.
    pub max_nodes: u64,
    /// Wall-clock ceiling in milliseconds.
    pub max_millis: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_nodes: 10_000_000, max_millis: 60_000 }
    }
}

impl Budget {
    pub fn with_millis(millis: u64) -> Self {
        Budget { max_millis: millis, ..Budget::default() }
    }
}
