//! Plain-text LP format.
//!
//! ```text
//! # comment
//! var x 0 inf
//! var y -inf 5/2
//! max
//! 2*x + 3*y
//! cap: x + y <= 4
//! x - 1/2*y >= -1
//! ```
//!
//! Variable declarations come first, then `max` or `min` on its own line,
//! then the objective (`0` for a pure feasibility problem), then one
//! constraint per line with an optional `name:` prefix. Coefficients are
//! integers or `p/q`; constant terms on a constraint's left side are moved to
//! the right.

use std::fmt::Write as _;

use num_traits::Zero;

use super::{LinExpr, LinearProgram, Relation, Sense, VarId};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct LpParseError {
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> LpParseError {
    LpParseError {
        line,
        message: message.into(),
    }
}

fn is_name_char(c: char) -> bool {
    c.is_alphanumeric() || "_.[](),'".contains(c)
}

fn valid_name(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_alphabetic() || c == '_') && chars.all(is_name_char)
}

fn parse_bound(tok: &str, line: usize) -> Result<Option<Rational>, LpParseError> {
    match tok {
        "inf" | "+inf" | "-inf" => Ok(None),
        _ => tok
            .parse()
            .map(Some)
            .map_err(|_| err(line, format!("bad bound {tok:?}"))),
    }
}

/// Parses `expr` into variable terms plus a constant.
fn parse_expr(
    s: &str,
    lp: &LinearProgram,
    line: usize,
) -> Result<(Vec<(VarId, Rational)>, Rational), LpParseError> {
    let mut terms = Vec::new();
    let mut constant = Rational::zero();
    let mut chars = s.chars().peekable();
    let mut expect_term = true;
    let mut negative = false;
    let mut seen_any = false;
    while let Some(&c) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
            continue;
        }
        if c == '+' || c == '-' {
            chars.next();
            if !expect_term && seen_any {
                expect_term = true;
            }
            if c == '-' {
                negative = !negative;
            }
            continue;
        }
        if !expect_term {
            return Err(err(line, format!("missing operator before {c:?}")));
        }
        let mut tok = String::new();
        while let Some(&c) = chars.peek() {
            if is_name_char(c) || c == '/' || c == '*' {
                tok.push(c);
                chars.next();
            } else {
                break;
            }
        }
        if tok.is_empty() {
            return Err(err(line, format!("unexpected character {c:?}")));
        }
        let (coef, name) = match tok.split_once('*') {
            Some((a, b)) => {
                let a: Rational = a
                    .parse()
                    .map_err(|_| err(line, format!("bad coefficient {a:?}")))?;
                (a, Some(b))
            }
            None if tok.starts_with(|c: char| c.is_ascii_digit()) => {
                let a: Rational = tok
                    .parse()
                    .map_err(|_| err(line, format!("bad number {tok:?}")))?;
                (a, None)
            }
            None => (Rational::from_integer(1), Some(tok.as_str())),
        };
        let coef = if negative { -coef } else { coef };
        match name {
            Some(n) => {
                let id = lp
                    .var_index(n)
                    .ok_or_else(|| err(line, format!("undeclared variable {n:?}")))?;
                terms.push((id, coef));
            }
            None => constant += coef,
        }
        negative = false;
        expect_term = false;
        seen_any = true;
    }
    if expect_term && seen_any {
        return Err(err(line, "expression ends with an operator"));
    }
    if !seen_any {
        return Err(err(line, "empty expression"));
    }
    Ok((terms, constant))
}

pub fn parse_lp(text: &str) -> Result<LinearProgram, LpParseError> {
    let mut lp = LinearProgram::new(Sense::Max);
    let mut sense_seen = false;
    let mut objective_seen = false;
    let mut last_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if !sense_seen {
            let toks: Vec<&str> = content.split_whitespace().collect();
            match toks.as_slice() {
                ["var", name, lo, hi] => {
                    if !valid_name(name) {
                        return Err(err(line, format!("invalid variable name {name:?}")));
                    }
                    if lp.var_index(name).is_some() {
                        return Err(err(line, format!("variable {name:?} declared twice")));
                    }
                    let lower = parse_bound(lo, line)?;
                    let upper = parse_bound(hi, line)?;
                    if *lo == "inf" || *lo == "+inf" || *hi == "-inf" {
                        return Err(err(
                            line,
                            "lower bound must be finite or -inf, upper finite or inf",
                        ));
                    }
                    if let (Some(l), Some(u)) = (&lower, &upper) {
                        if l > u {
                            return Err(err(line, "lower bound exceeds upper bound"));
                        }
                    }
                    lp.add_var(*name, lower, upper);
                }
                ["max"] => {
                    lp.sense = Sense::Max;
                    sense_seen = true;
                }
                ["min"] => {
                    lp.sense = Sense::Min;
                    sense_seen = true;
                }
                _ => return Err(err(line, "expected `var NAME LOWER UPPER`, `max` or `min`")),
            }
            continue;
        }
        if !objective_seen {
            let (terms, constant) = parse_expr(content, &lp, line)?;
            if !constant.is_zero() {
                return Err(err(line, "objective may not contain a constant term"));
            }
            lp.objective = LinExpr::from_terms(terms);
            objective_seen = true;
            continue;
        }
        let (name, body) = match content.split_once(':') {
            Some((n, b)) => {
                let n = n.trim();
                if !valid_name(n) {
                    return Err(err(line, format!("invalid constraint name {n:?}")));
                }
                (n.to_string(), b)
            }
            None => (format!("c{}", lp.constraints.len()), content),
        };
        let (rel, pos, len) = ["<=", ">=", "="]
            .iter()
            .find_map(|op| body.find(op).map(|p| (*op, p, op.len())))
            .ok_or_else(|| err(line, "missing relation (<=, >=, =)"))?;
        let relation = match rel {
            "<=" => Relation::Le,
            ">=" => Relation::Ge,
            _ => Relation::Eq,
        };
        let (terms, constant) = parse_expr(&body[..pos], &lp, line)?;
        let rhs_text = body[pos + len..].trim();
        let (rhs_terms, rhs_const) = parse_expr(rhs_text, &lp, line)?;
        if !rhs_terms.is_empty() {
            return Err(err(line, "right-hand side must be a constant"));
        }
        lp.add_constraint(name, terms, relation, rhs_const - constant);
    }
    if !sense_seen {
        return Err(err(last_line, "missing `max` or `min`"));
    }
    if !objective_seen {
        return Err(err(last_line, "missing objective line"));
    }
    Ok(lp)
}

fn write_expr(out: &mut String, lp: &LinearProgram, e: &LinExpr) {
    if e.is_empty() {
        out.push('0');
        return;
    }
    for (k, (j, c)) in e.terms().iter().enumerate() {
        let name = &lp.variables[j.0].name;
        let (sign, mag) = if c.is_negative() {
            ("-", -c)
        } else {
            ("+", c.clone())
        };
        if k == 0 {
            if sign == "-" {
                out.push('-');
            }
        } else {
            let _ = write!(out, " {sign} ");
        }
        if mag == Rational::from_integer(1) {
            out.push_str(name);
        } else {
            let _ = write!(out, "{mag}*{name}");
        }
    }
}

/// Renders `lp` in the text format. Names that are not valid identifiers are
/// replaced by `x<index>` / `r<index>`.
pub fn write_lp(lp: &LinearProgram) -> String {
    let mut renamed = lp.clone();
    for (j, v) in renamed.variables.iter_mut().enumerate() {
        if !valid_name(&v.name) || lp.variables[..j].iter().any(|w| w.name == v.name) {
            v.name = format!("x{j}");
        }
    }
    let mut out = String::new();
    for v in &renamed.variables {
        let lo = v
            .lower
            .as_ref()
            .map_or("-inf".to_string(), |l| l.to_string());
        let hi = v
            .upper
            .as_ref()
            .map_or("inf".to_string(), |u| u.to_string());
        let _ = writeln!(out, "var {} {lo} {hi}", v.name);
    }
    out.push_str(match lp.sense {
        Sense::Max => "max\n",
        Sense::Min => "min\n",
    });
    write_expr(&mut out, &renamed, &renamed.objective);
    out.push('\n');
    for (i, c) in renamed.constraints.iter().enumerate() {
        let name = if valid_name(&c.name) {
            c.name.clone()
        } else {
            format!("r{i}")
        };
        let _ = write!(out, "{name}: ");
        write_expr(&mut out, &renamed, &c.expr);
        let _ = writeln!(out, " {} {}", c.relation, c.rhs);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};

    #[test]
    fn parses_small_program() {
        let lp = parse_lp(
            "# demo\nvar x 0 inf\nvar y -inf 5/2\nmax\n2*x + 3*y\ncap: x + y <= 4\nx - 1/2*y >= -1\n",
        )
        .unwrap();
        assert_eq!(lp.num_vars(), 2);
        assert_eq!(lp.variables[1].upper, Some(q(5, 2)));
        assert_eq!(lp.variables[1].lower, None);
        assert_eq!(lp.constraints.len(), 2);
        assert_eq!(lp.constraints[0].name, "cap");
        assert_eq!(lp.constraints[1].expr.coeff(VarId(1)), q(-1, 2));
        assert_eq!(lp.constraints[1].rhs, qi(-1));
        assert_eq!(lp.objective.coeff(VarId(0)), qi(2));
    }

    #[test]
    fn round_trips_through_writer() {
        let src = "var x 0 inf\nvar y -inf inf\nmin\n-x + 2/3*y\nr: -x - y = -7/3\ns: 3*x >= 0\n";
        let lp = parse_lp(src).unwrap();
        let again = parse_lp(&write_lp(&lp)).unwrap();
        assert_eq!(lp, again);
    }

    #[test]
    fn constant_on_left_moves_right() {
        let lp = parse_lp("var x 0 1\nmax\nx\nx + 1 <= 3\n").unwrap();
        assert_eq!(lp.constraints[0].rhs, qi(2));
    }

    #[test]
    fn reports_errors_with_line() {
        let e = parse_lp("var x 0 inf\nmax\nx\nx + z <= 1\n").unwrap_err();
        assert_eq!(e.line, 4);
        assert!(e.message.contains("undeclared"));
        let e = parse_lp("var x 0 inf\nmax\nx\nx 1\n").unwrap_err();
        assert_eq!(e.line, 4);
        assert!(parse_lp("var x 0.5 inf\nmax\nx\n").is_err());
        assert!(parse_lp("var x 0 inf\n").is_err());
    }
}
