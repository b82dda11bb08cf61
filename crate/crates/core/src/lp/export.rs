//! Plain-text LP export in the CPLEX LP dialect.

use std::fmt::Write;

use super::model::LpModel;

fn term(out: &mut String, coeff: f64, name: &str) {
    let sign = if coeff < 0.0 { '-' } else { '+' };
    let _ = write!(out, " {sign} {} {name}", coeff.abs());
}

fn bound(v: f64) -> String {
    if v == f64::INFINITY {
        "+inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{v}")
    }
}

/// Renders the model with rows in build order and one bounds line per
/// variable.
pub fn to_lp_format(model: &LpModel) -> String {
    let name = |j: usize| model.variables[j].name.as_str();
    let mut out = String::from("Minimize\n obj:");
    if model.objective.is_empty() {
        out.push_str(" 0");
    }
    for &(j, c) in &model.objective {
        term(&mut out, c, name(j));
    }
    out.push_str("\nSubject To\n");
    for c in &model.constraints {
        let _ = write!(out, " {}:", c.name);
        if c.coeffs.is_empty() {
            out.push_str(" 0");
        }
        for &(j, a) in &c.coeffs {
            term(&mut out, a, name(j));
        }
        let _ = writeln!(out, " {} {}", c.sense.symbol(), c.rhs);
    }
    out.push_str("Bounds\n");
    for v in &model.variables {
        if v.lower == f64::NEG_INFINITY && v.upper == f64::INFINITY {
            let _ = writeln!(out, " {} free", v.name);
        } else if v.lower == v.upper {
            let _ = writeln!(out, " {} = {}", v.name, v.lower);
        } else {
            let _ = writeln!(out, " {} <= {} <= {}", bound(v.lower), v.name, bound(v.upper));
        }
    }
    out.push_str("End\n");
    out
}
