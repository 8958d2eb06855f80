//! Reading and writing models in CPLEX LP text format.
//!
//! Only the subset produced by [`write_lp`] is read back: a `Minimize`
//! objective, named constraints, `lo <= x <= hi` bounds and the
//! `Binaries`/`Generals` sections.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::ilp::model::{Model, Sense};

const TERMS_PER_LINE: usize = 8;

pub fn write_lp(model: &Model) -> String {
    let mut out = String::new();
    out.push_str("\\ integer program\nMinimize\n obj:");
    let objective: Vec<String> = model
        .variables
        .iter()
        .filter(|v| v.cost != 0.0)
        .map(|v| format!("{} {} {}", if v.cost < 0.0 { "-" } else { "+" }, v.cost.abs(), v.name))
        .collect();
    push_wrapped(&mut out, &objective);
    out.push_str("Subject To\n");
    for c in &model.constraints {
        let _ = write!(out, " {}:", c.name);
        let terms: Vec<String> = c
            .terms
            .iter()
            .map(|&(j, a)| {
                format!(
                    "{} {} {}",
                    if a < 0 { "-" } else { "+" },
                    a.abs(),
                    model.variables[j].name
                )
            })
            .collect();
        let mut terms = terms;
        if terms.is_empty() {
            // an empty row still needs a left-hand side
            terms.push(format!("+ 0 {}", model.variables.first().map_or("x", |v| &v.name)));
        }
        terms.push(format!("{} {}", c.sense.symbol(), c.rhs));
        push_wrapped(&mut out, &terms);
    }
    out.push_str("Bounds\n");
    for v in &model.variables {
        let _ = writeln!(out, " {} <= {} <= {}", v.lower, v.name, v.upper);
    }
    let binaries: Vec<String> = model
        .variables
        .iter()
        .filter(|v| v.lower >= 0 && v.upper <= 1)
        .map(|v| v.name.clone())
        .collect();
    let generals: Vec<String> = model
        .variables
        .iter()
        .filter(|v| !(v.lower >= 0 && v.upper <= 1))
        .map(|v| v.name.clone())
        .collect();
    if !binaries.is_empty() {
        out.push_str("Binaries\n");
        push_wrapped(&mut out, &binaries);
    }
    if !generals.is_empty() {
        out.push_str("Generals\n");
        push_wrapped(&mut out, &generals);
    }
    out.push_str("End\n");
    out
}

fn push_wrapped(out: &mut String, items: &[String]) {
    for chunk in items.chunks(TERMS_PER_LINE) {
        out.push(' ');
        out.push_str(&chunk.join(" "));
        out.push('\n');
    }
    if items.is_empty() {
        out.push('\n');
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    None,
    Objective,
    Constraints,
    Bounds,
    Integers,
}

/// Parses LP text written by [`write_lp`].
pub fn read_lp(text: &str) -> Result<Model> {
    let mut section = Section::None;
    let mut objective: Vec<String> = Vec::new();
    let mut constraints: Vec<String> = Vec::new();
    let mut bounds: Vec<(usize, String)> = Vec::new();
    let mut integers: Vec<String> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('\\').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        match line.to_ascii_lowercase().as_str() {
            "minimize" | "minimise" | "min" => {
                section = Section::Objective;
                continue;
            }
            "subject to" | "such that" | "st" | "s.t." => {
                section = Section::Constraints;
                continue;
            }
            "bounds" => {
                section = Section::Bounds;
                continue;
            }
            "binaries" | "binary" | "generals" | "general" => {
                section = Section::Integers;
                continue;
            }
            "end" => break,
            _ => {}
        }
        match section {
            Section::Objective => objective.extend(line.split_whitespace().map(str::to_owned)),
            Section::Constraints => constraints.extend(line.split_whitespace().map(str::to_owned)),
            Section::Bounds => bounds.push((idx + 1, line.to_owned())),
            Section::Integers => integers.extend(line.split_whitespace().map(str::to_owned)),
            Section::None => {
                return Err(Error::Parse {
                    line: idx + 1,
                    message: format!("content before any section: {line:?}"),
                })
            }
        }
    }

    let mut model = Model::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut lookup = |model: &mut Model, name: &str| -> usize {
        *index
            .entry(name.to_owned())
            .or_insert_with(|| model.add_variable(name, 0, 1, 0.0))
    };

    // objective: "obj:" then signed terms
    let terms = strip_label(&objective).1;
    for (coef, name) in parse_terms(terms)? {
        let j = lookup(&mut model, &name);
        model.variables[j].cost += coef;
    }

    // constraints split at "<label>:" tokens
    let mut statements: Vec<Vec<String>> = Vec::new();
    for tok in constraints {
        if tok.ends_with(':') || statements.is_empty() {
            statements.push(Vec::new());
        }
        statements.last_mut().expect("pushed above").push(tok);
    }
    for st in statements {
        let (label, body) = strip_label(&st);
        let pos = body
            .iter()
            .position(|t| matches!(t.as_str(), "<=" | ">=" | "=" | "=<" | "=>"))
            .ok_or_else(|| Error::Model(format!("constraint {label} has no sense")))?;
        let sense = match body[pos].as_str() {
            "<=" | "=<" => Sense::Le,
            ">=" | "=>" => Sense::Ge,
            _ => Sense::Eq,
        };
        let rhs = body
            .get(pos + 1)
            .and_then(|t| t.parse::<i64>().ok())
            .ok_or_else(|| Error::Model(format!("constraint {label} has a bad right-hand side")))?;
        let mut row = Vec::new();
        for (coef, name) in parse_terms(&body[..pos])? {
            let j = lookup(&mut model, &name);
            if coef.fract() != 0.0 {
                return Err(Error::Model(format!(
                    "constraint {label} has a non-integral coefficient"
                )));
            }
            if coef != 0.0 {
                row.push((j, coef as i64));
            }
        }
        model.add_constraint(label, row, sense, rhs);
    }

    for (line, text) in bounds {
        let toks: Vec<&str> = text.split_whitespace().collect();
        let parsed = match toks.as_slice() {
            [lo, "<=", name, "<=", hi] => lo.parse::<i64>().ok().zip(hi.parse::<i64>().ok()).map(|b| (*name, b)),
            [name, "=", v] => v.parse::<i64>().ok().map(|v| (*name, (v, v))),
            _ => None,
        };
        let (name, (lo, hi)) = parsed.ok_or_else(|| Error::Parse {
            line,
            message: format!("unsupported bound {text:?}"),
        })?;
        let j = lookup(&mut model, name);
        model.variables[j].lower = lo;
        model.variables[j].upper = hi;
    }
    for name in integers {
        lookup(&mut model, &name);
    }
    model.validate()?;
    Ok(model)
}

fn strip_label(tokens: &[String]) -> (String, &[String]) {
    match tokens.first() {
        Some(t) if t.ends_with(':') => (t.trim_end_matches(':').to_owned(), &tokens[1..]),
        _ => (String::new(), tokens),
    }
}

/// `[+|-] [coef] name` sequences.
fn parse_terms(tokens: &[String]) -> Result<Vec<(f64, String)>> {
    let mut out = Vec::new();
    let mut sign = 1.0;
    let mut coef: Option<f64> = None;
    for t in tokens {
        match t.as_str() {
            "+" => sign = 1.0,
            "-" => sign = -1.0,
            _ => {
                if let Ok(c) = t.parse::<f64>() {
                    coef = Some(c);
                } else {
                    out.push((sign * coef.unwrap_or(1.0), t.clone()));
                    sign = 1.0;
                    coef = None;
                }
            }
        }
    }
    if coef.is_some() {
        return Err(Error::Model("dangling coefficient in expression".into()));
    }
    Ok(out)
}
