//! Human-readable rendering of verdicts and models.  JSON output is plain
//! serde serialization of the same structures, so the two formats never
//! drift.

use std::fmt::Write as _;

use crate::judge::Verdict;
use crate::model::{Model, WorldMask};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RenderFormat {
    Text,
    Json,
}

fn mask_to_set(mask: WorldMask, worlds: &[String]) -> String {
    if mask == 0 {
        return "{}".to_string();
    }
    let names: Vec<&str> = worlds
        .iter()
        .enumerate()
        .filter(|(i, _)| mask & (1 << i) != 0)
        .map(|(_, w)| w.as_str())
        .collect();
    format!("{{{}}}", names.join(" "))
}

/// A world/subject table for a model: one column per world, one row per
/// atom and per action-subject pair, followed by the obligation families
/// and the subject-constant interpretation.
pub fn render_model_text(m: &Model) -> String {
    let mut rows: Vec<(String, WorldMask)> = Vec::new();
    for (atom, mask) in &m.val {
        rows.push((atom.clone(), *mask));
    }
    for (action, per_subject) in &m.act_val {
        for (i, mask) in per_subject.iter().enumerate() {
            rows.push((format!("{action}({})", m.subjects[i]), *mask));
        }
    }

    let label_width = rows
        .iter()
        .map(|(l, _)| l.len())
        .chain(std::iter::once(5))
        .max()
        .unwrap();

    let mut out = String::new();
    let _ = writeln!(
        out,
        "model: {} world(s) {}, {} subject(s) {}",
        m.n_worlds(),
        mask_to_set(m.full(), &m.worlds),
        m.n_subjects(),
        format!("{{{}}}", m.subjects.join(" ")),
    );
    if !rows.is_empty() {
        let mut header = format!("  {:label_width$}", "");
        for w in &m.worlds {
            let _ = write!(header, "  {w:>3}");
        }
        out.push_str(&header);
        out.push('\n');
        for (label, mask) in &rows {
            let _ = write!(out, "  {label:label_width$}");
            for i in 0..m.n_worlds() {
                let cell = if mask & (1 << i) != 0 { "x" } else { "." };
                let _ = write!(out, "  {cell:>3}");
            }
            out.push('\n');
        }
    }
    if m.ob.values().all(|fam| fam.is_empty()) {
        out.push_str("  ob: empty at every context\n");
    } else {
        for (context, family) in &m.ob {
            if family.is_empty() {
                continue;
            }
            let members: Vec<String> =
                family.iter().map(|y| mask_to_set(*y, &m.worlds)).collect();
            let _ = writeln!(
                out,
                "  ob{} = {}",
                mask_to_set(*context, &m.worlds),
                members.join(", ")
            );
        }
    }
    for (constant, idx) in &m.subj_interp {
        let _ = writeln!(out, "  {constant} -> {}", m.subjects[*idx]);
    }
    out
}

pub fn render_verdict(v: &Verdict, fmt: RenderFormat) -> String {
    match fmt {
        RenderFormat::Json => {
            let mut s = serde_json::to_string_pretty(v).expect("verdict serializes");
            s.push('\n');
            s
        }
        RenderFormat::Text => render_verdict_text(v),
    }
}

fn render_verdict_text(v: &Verdict) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "scenario {} (system {}, query {})",
        v.scenario, v.system, v.query
    );
    let at = format!("bounds w={}, s={}", v.bounds.worlds, v.bounds.subjects);
    let headline = if v.status.is_decided() {
        format!("{} (valid at {at})", v.status.as_str().to_uppercase())
    } else {
        format!("{} (no claim valid at {at})", v.status.as_str().to_uppercase())
    };
    out.push_str(&headline);
    out.push('\n');

    out.push_str("\nassumptions:\n");
    if v.assumptions.is_empty() {
        out.push_str("  (none)\n");
    } else {
        for (i, a) in v.assumptions.iter().enumerate() {
            let _ = writeln!(out, "  {}. {a}", i + 1);
        }
    }

    let _ = writeln!(out, "\nclaims checked (for subject {}):", v.star);
    for w in &v.witnesses {
        if w.valid {
            let _ = writeln!(out, "  {}: valid at {at} ({} ms)", w.claim, w.millis);
        } else {
            let _ = writeln!(out, "  {}: countermodel found ({} ms)", w.claim, w.millis);
            if let Some(model) = &w.countermodel {
                for line in render_model_text(model).lines() {
                    let _ = writeln!(out, "    {line}");
                }
            }
        }
    }
    out
}
