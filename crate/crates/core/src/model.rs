//! Finite models and their JSON form.
//!
//! World sets are bitmasks (`WorldMask`), bit `i` = world with index `i`.
//! The obligation function `ob` maps a context world-set to the family of
//! world-sets obligatory in that context; it is stored in full, with every
//! membership explicit, so frame-condition checking is a direct lookup.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ast::{subject_name, world_name};

pub type WorldMask = u32;

/// Worlds are indexed into a u32 mask; anything larger than this is outside
/// the engine's intended bounded-search regime anyway.
pub const MAX_WORLDS: usize = 16;

pub fn full_mask(n_worlds: usize) -> WorldMask {
    debug_assert!(n_worlds <= MAX_WORLDS);
    if n_worlds == 0 {
        0
    } else {
        (1u32 << n_worlds) - 1
    }
}

/// All subsets of an `n_worlds`-world domain, ascending as masks.
pub fn all_subsets(n_worlds: usize) -> impl Iterator<Item = WorldMask> {
    0..=full_mask(n_worlds)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Model {
    pub worlds: Vec<String>,
    pub subjects: Vec<String>,
    /// context mask -> set of obligatory masks (explicit membership).
    pub ob: BTreeMap<WorldMask, BTreeSet<WorldMask>>,
    /// atom -> extension mask.
    pub val: BTreeMap<String, WorldMask>,
    /// action -> per-subject-index extension masks (always one per subject).
    pub act_val: BTreeMap<String, Vec<WorldMask>>,
    /// subject constant -> subject index.
    pub subj_interp: BTreeMap<String, usize>,
}

impl Model {
    /// A model skeleton over canonical names (`w1..`, `s1..`) with empty
    /// obligations and no atoms or actions.
    pub fn canonical(n_worlds: usize, n_subjects: usize) -> Model {
        Model {
            worlds: (0..n_worlds).map(world_name).collect(),
            subjects: (0..n_subjects).map(subject_name).collect(),
            ob: BTreeMap::new(),
            val: BTreeMap::new(),
            act_val: BTreeMap::new(),
            subj_interp: BTreeMap::new(),
        }
    }

    pub fn n_worlds(&self) -> usize {
        self.worlds.len()
    }

    pub fn n_subjects(&self) -> usize {
        self.subjects.len()
    }

    pub fn full(&self) -> WorldMask {
        full_mask(self.n_worlds())
    }

    pub fn ob_contains(&self, context: WorldMask, candidate: WorldMask) -> bool {
        self.ob
            .get(&context)
            .map(|s| s.contains(&candidate))
            .unwrap_or(false)
    }

    /// Structural sanity: name uniqueness, masks within the world domain,
    /// total `act_val` rows, interpreted constants in range.
    pub fn validate(&self) -> Result<(), ModelError> {
        let nw = self.n_worlds();
        if nw == 0 {
            return Err(ModelError::EmptyWorldDomain);
        }
        if nw > MAX_WORLDS {
            return Err(ModelError::TooManyWorlds(nw));
        }
        if self.subjects.is_empty() {
            return Err(ModelError::EmptySubjectDomain);
        }
        let mut seen = BTreeSet::new();
        for w in &self.worlds {
            if !seen.insert(w.clone()) {
                return Err(ModelError::DuplicateName(w.clone()));
            }
        }
        let mut seen = BTreeSet::new();
        for s in &self.subjects {
            if !seen.insert(s.clone()) {
                return Err(ModelError::DuplicateName(s.clone()));
            }
        }
        let full = self.full();
        let in_domain = |m: WorldMask| m & !full == 0;
        for (ctx, fam) in &self.ob {
            if !in_domain(*ctx) || fam.iter().any(|y| !in_domain(*y)) {
                return Err(ModelError::MaskOutOfDomain);
            }
        }
        for mask in self.val.values() {
            if !in_domain(*mask) {
                return Err(ModelError::MaskOutOfDomain);
            }
        }
        for (a, row) in &self.act_val {
            if row.len() != self.n_subjects() {
                return Err(ModelError::ActionRowArity(a.clone()));
            }
            if row.iter().any(|m| !in_domain(*m)) {
                return Err(ModelError::MaskOutOfDomain);
            }
        }
        for (c, idx) in &self.subj_interp {
            if *idx >= self.n_subjects() {
                return Err(ModelError::SubjectIndexOutOfRange(c.clone(), *idx));
            }
        }
        Ok(())
    }

    fn mask_to_names(&self, mask: WorldMask) -> Vec<String> {
        (0..self.n_worlds())
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| self.worlds[i].clone())
            .collect()
    }

    fn names_to_mask(worlds: &[String], names: &[String]) -> Result<WorldMask, ModelError> {
        let mut mask = 0;
        for n in names {
            let i = worlds
                .iter()
                .position(|w| w == n)
                .ok_or_else(|| ModelError::UnknownWorld(n.clone()))?;
            mask |= 1 << i;
        }
        Ok(mask)
    }
}

/// Serialized layout.  World sets appear as name lists sorted by world index;
/// only contexts with a nonempty obligatory family are listed, ascending by
/// context mask, so serialization is canonical byte-for-byte.
#[derive(Serialize, Deserialize)]
struct ModelJson {
    worlds: Vec<String>,
    subjects: Vec<String>,
    ob: Vec<ObEntryJson>,
    val: BTreeMap<String, Vec<String>>,
    act_val: BTreeMap<String, BTreeMap<String, Vec<String>>>,
    subjects_interp: BTreeMap<String, String>,
}

#[derive(Serialize, Deserialize)]
struct ObEntryJson {
    context: Vec<String>,
    obligatory: Vec<Vec<String>>,
}

impl Serialize for Model {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        let ob = self
            .ob
            .iter()
            .filter(|(_, fam)| !fam.is_empty())
            .map(|(ctx, fam)| ObEntryJson {
                context: self.mask_to_names(*ctx),
                obligatory: fam.iter().map(|y| self.mask_to_names(*y)).collect(),
            })
            .collect();
        let val = self
            .val
            .iter()
            .map(|(a, m)| (a.clone(), self.mask_to_names(*m)))
            .collect();
        let act_val = self
            .act_val
            .iter()
            .map(|(a, row)| {
                let per_subject = row
                    .iter()
                    .enumerate()
                    .map(|(i, m)| (self.subjects[i].clone(), self.mask_to_names(*m)))
                    .collect();
                (a.clone(), per_subject)
            })
            .collect();
        let subjects_interp = self
            .subj_interp
            .iter()
            .map(|(c, i)| (c.clone(), self.subjects[*i].clone()))
            .collect();
        ModelJson {
            worlds: self.worlds.clone(),
            subjects: self.subjects.clone(),
            ob,
            val,
            act_val,
            subjects_interp,
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for Model {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let raw = ModelJson::deserialize(de)?;
        Model::try_from(raw).map_err(serde::de::Error::custom)
    }
}

impl TryFrom<ModelJson> for Model {
    type Error = ModelError;

    fn try_from(raw: ModelJson) -> Result<Model, ModelError> {
        let mut ob: BTreeMap<WorldMask, BTreeSet<WorldMask>> = BTreeMap::new();
        for entry in &raw.ob {
            let ctx = Model::names_to_mask(&raw.worlds, &entry.context)?;
            let fam = ob.entry(ctx).or_default();
            for y in &entry.obligatory {
                fam.insert(Model::names_to_mask(&raw.worlds, y)?);
            }
        }
        let mut val = BTreeMap::new();
        for (a, names) in &raw.val {
            val.insert(a.clone(), Model::names_to_mask(&raw.worlds, names)?);
        }
        let mut act_val = BTreeMap::new();
        for (a, per_subject) in &raw.act_val {
            let mut row = vec![0; raw.subjects.len()];
            for (s, names) in per_subject {
                let i = raw
                    .subjects
                    .iter()
                    .position(|x| x == s)
                    .ok_or_else(|| ModelError::UnknownSubject(s.clone()))?;
                row[i] = Model::names_to_mask(&raw.worlds, names)?;
            }
            if per_subject.len() != raw.subjects.len() {
                return Err(ModelError::ActionRowArity(a.clone()));
            }
            act_val.insert(a.clone(), row);
        }
        let mut subj_interp = BTreeMap::new();
        for (c, s) in &raw.subjects_interp {
            let i = raw
                .subjects
                .iter()
                .position(|x| x == s)
                .ok_or_else(|| ModelError::UnknownSubject(s.clone()))?;
            subj_interp.insert(c.clone(), i);
        }
        let model = Model {
            worlds: raw.worlds,
            subjects: raw.subjects,
            ob,
            val,
            act_val,
            subj_interp,
        };
        model.validate()?;
        Ok(model)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("model has no worlds")]
    EmptyWorldDomain,
    #[error("model has no subjects")]
    EmptySubjectDomain,
    #[error("model has {0} worlds; at most {MAX_WORLDS} supported")]
    TooManyWorlds(usize),
    #[error("duplicate world or subject name `{0}`")]
    DuplicateName(String),
    #[error("unknown world name `{0}`")]
    UnknownWorld(String),
    #[error("unknown subject name `{0}`")]
    UnknownSubject(String),
    #[error("world set mentions a world outside the domain")]
    MaskOutOfDomain,
    #[error("action `{0}` does not assign an extension to every subject")]
    ActionRowArity(String),
    #[error("subject constant `{0}` maps to out-of-range index {1}")]
    SubjectIndexOutOfRange(String, usize),
}
