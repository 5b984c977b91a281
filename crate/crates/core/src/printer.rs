//! Canonical printing.  Output uses only core forms (no `diamond`/`false`
//! sugar, `ob` always binary), so printing then parsing is the identity on
//! well-formed ASTs.

use std::fmt::Write;

use crate::ast::{world_name, ActRef, Formula, MacroArg, MaximRef, SubjectRef};
use crate::model::WorldMask;

pub fn print_formula(f: &Formula) -> String {
    let mut out = String::new();
    write_formula(&mut out, f);
    out
}

fn write_mask(out: &mut String, mask: WorldMask) {
    out.push_str("(worlds");
    for i in 0..32 {
        if mask & (1 << i) != 0 {
            let _ = write!(out, " {}", world_name(i));
        }
    }
    out.push(')');
}

fn write_subject(out: &mut String, s: &SubjectRef) {
    out.push_str(s.name());
}

fn write_formula(out: &mut String, f: &Formula) {
    match f {
        Formula::Top => out.push_str("true"),
        Formula::Atom(a) | Formula::TermVar(a) => out.push_str(a),
        Formula::Apply(a, s) | Formula::OpenApply(a, s) => {
            let _ = write!(out, "(act {a} ");
            write_subject(out, s);
            out.push(')');
        }
        Formula::TermConst(mask) => write_mask(out, *mask),
        Formula::OpenConst(masks, s) => {
            out.push_str("(open-app");
            for m in masks {
                out.push(' ');
                write_mask(out, *m);
            }
            out.push(' ');
            write_subject(out, s);
            out.push(')');
        }
        Formula::Not(a) => unary(out, "not", a),
        Formula::Nec(a) => unary(out, "box", a),
        Formula::And(a, b) => binary(out, "and", a, b),
        Formula::Or(a, b) => binary(out, "or", a, b),
        Formula::Implies(a, b) => binary(out, "implies", a, b),
        Formula::Iff(a, b) => binary(out, "iff", a, b),
        Formula::Ob(a, b) => binary(out, "ob", a, b),
        Formula::ForallSubject(v, body) => quantifier(out, "forall-subject", v, body),
        Formula::ForallTerm(v, body) => quantifier(out, "forall-term", v, body),
        Formula::ForallOpen(v, body) => quantifier(out, "forall-open", v, body),
        Formula::ForallMaxim(v, body) => quantifier(out, "forall-maxim", v, body),
        Formula::MacroCall(name, args) => {
            let _ = write!(out, "({name}");
            for arg in args {
                out.push(' ');
                match arg {
                    MacroArg::Subject(s) => write_subject(out, s),
                    MacroArg::Maxim(MaximRef::Var(v)) => out.push_str(v),
                    MacroArg::Maxim(MaximRef::Lit(m)) => {
                        out.push_str("(maxim ");
                        write_formula(out, &m.circumstances);
                        match &m.act {
                            ActRef::Action(a) | ActRef::OpenVar(a) => {
                                let _ = write!(out, " {a} ");
                            }
                        }
                        write_formula(out, &m.goal);
                        out.push(')');
                    }
                }
            }
            out.push(')');
        }
    }
}

fn unary(out: &mut String, op: &str, a: &Formula) {
    let _ = write!(out, "({op} ");
    write_formula(out, a);
    out.push(')');
}

fn binary(out: &mut String, op: &str, a: &Formula, b: &Formula) {
    let _ = write!(out, "({op} ");
    write_formula(out, a);
    out.push(' ');
    write_formula(out, b);
    out.push(')');
}

fn quantifier(out: &mut String, op: &str, var: &str, body: &Formula) {
    let _ = write!(out, "({op} {var} ");
    write_formula(out, body);
    out.push(')');
}
