//! CPLEX-style LP text export.

use super::{MilpModel, Sense, VarId, VarKind};
use std::borrow::Cow;
use std::fmt::Write;

const TERMS_PER_LINE: usize = 6;
const CONST_VAR: &str = "obj_constant__";

/// Name as written to LP files. Square brackets open quadratic sections in
/// LP readers, so they become parentheses.
pub fn lp_name(name: &str) -> Cow<'_, str> {
    if name.contains(['[', ']']) {
        Cow::Owned(name.replace('[', "(").replace(']', ")"))
    } else {
        Cow::Borrowed(name)
    }
}

fn fmt_num(x: f64) -> String {
    // Display gives the shortest representation that round-trips.
    format!("{x}")
}

fn write_terms(out: &mut String, model: &MilpModel, terms: &[(f64, VarId)], extra: Option<(f64, &str)>) {
    let mut items: Vec<(f64, Cow<'_, str>)> = terms
        .iter()
        .map(|&(c, v)| (c, lp_name(&model.variable(v).name)))
        .collect();
    items.extend(extra.map(|(c, n)| (c, Cow::Borrowed(n))));
    if items.is_empty() {
        // Readers need at least one term; a zero coefficient keeps the row valid.
        match model.variables().first() {
            Some(v) => items.push((0.0, lp_name(&v.name))),
            None => items.push((0.0, Cow::Borrowed(CONST_VAR))),
        }
    }
    for (k, (c, name)) in items.iter().enumerate() {
        if k > 0 && k % TERMS_PER_LINE == 0 {
            out.push_str("\n   ");
        }
        let sign = if *c < 0.0 { '-' } else { '+' };
        let _ = write!(out, " {sign} {} {name}", fmt_num(c.abs()));
    }
}

fn fmt_bound(x: f64) -> String {
    if x == f64::INFINITY {
        "+inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        fmt_num(x)
    }
}

/// Deterministic LP-format text for `model` (objective, constraints,
/// bounds, generals, binaries). A nonzero objective constant is carried by
/// an extra variable fixed at 1.
pub fn export_lp(model: &MilpModel) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "\\ Problem: {}", model.name());
    out.push_str("Minimize\n obj:");
    let obj = model.objective();
    let has_const = obj.constant != 0.0 || model.num_vars() == 0;
    write_terms(
        &mut out,
        model,
        &obj.terms,
        has_const.then_some((obj.constant, CONST_VAR)),
    );
    out.push_str("\nSubject To\n");
    for c in model.constraints() {
        let _ = write!(out, " {}:", lp_name(&c.name));
        write_terms(&mut out, model, &c.terms, None);
        let op = match c.sense {
            Sense::Le => "<=",
            Sense::Eq => "=",
            Sense::Ge => ">=",
        };
        let _ = writeln!(out, " {op} {}", fmt_num(c.rhs));
    }
    out.push_str("Bounds\n");
    for var in model.variables() {
        let (lo, hi) = (var.lower, var.upper);
        let name = lp_name(&var.name);
        let default = match var.kind {
            VarKind::Binary => lo == 0.0 && hi == 1.0,
            _ => lo == 0.0 && hi == f64::INFINITY,
        };
        if default {
            continue;
        }
        if lo == f64::NEG_INFINITY && hi == f64::INFINITY {
            let _ = writeln!(out, " {name} free");
        } else if lo == hi {
            let _ = writeln!(out, " {name} = {}", fmt_num(lo));
        } else {
            let _ = writeln!(out, " {} <= {name} <= {}", fmt_bound(lo), fmt_bound(hi));
        }
    }
    if has_const {
        let _ = writeln!(out, " {CONST_VAR} = 1");
    }
    let generals: Vec<Cow<'_, str>> = model
        .variables()
        .iter()
        .filter(|v| v.kind == VarKind::Integer)
        .map(|v| lp_name(&v.name))
        .collect();
    if !generals.is_empty() {
        out.push_str("Generals\n");
        for name in generals {
            let _ = writeln!(out, " {name}");
        }
    }
    let binaries: Vec<Cow<'_, str>> = model
        .variables()
        .iter()
        .filter(|v| v.kind == VarKind::Binary)
        .map(|v| lp_name(&v.name))
        .collect();
    if !binaries.is_empty() {
        out.push_str("Binaries\n");
        for name in binaries {
            let _ = writeln!(out, " {name}");
        }
    }
    out.push_str("End\n");
    out
}
