use crate::error::{FrogError, Result};
use crate::formula::{Cnf, Literal, Qbf, Quantifier};

fn err(line: usize, msg: impl Into<String>) -> FrogError {
    FrogError::Parse { line, msg: msg.into() }
}

struct Parsed {
    vars: u32,
    prefix: Vec<(Quantifier, u32)>,
    clauses: Vec<[Literal; 3]>,
}

fn parse(bytes: &[u8], quantified: bool) -> Result<Parsed> {
    let text = std::str::from_utf8(bytes).map_err(|e| err(0, format!("not UTF-8: {e}")))?;
    let mut header: Option<(u32, usize)> = None;
    let mut prefix = Vec::new();
    let mut clauses = Vec::new();
    let mut pending: Vec<Literal> = Vec::new();
    let mut pending_line = 0;
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('c') || trimmed == "%" {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix('p') {
            if header.is_some() {
                return Err(err(line, "second header"));
            }
            let f: Vec<&str> = rest.split_whitespace().collect();
            match f.as_slice() {
                ["cnf", v, c] => {
                    let v = v.parse().map_err(|_| err(line, format!("bad variable count `{v}`")))?;
                    let c = c.parse().map_err(|_| err(line, format!("bad clause count `{c}`")))?;
                    header = Some((v, c));
                }
                _ => return Err(err(line, "expected `p cnf <vars> <clauses>`")),
            }
            continue;
        }
        let Some((vars, _)) = header else {
            return Err(err(line, "data before the `p cnf` header"));
        };
        let (quant, body) = match trimmed.split_once(char::is_whitespace) {
            Some(("e", b)) => (Some(Quantifier::Exists), b),
            Some(("a", b)) => (Some(Quantifier::Forall), b),
            _ => (None, trimmed),
        };
        if let Some(q) = quant {
            if !quantified {
                return Err(err(line, "quantifier line in a plain DIMACS file"));
            }
            if !clauses.is_empty() || !pending.is_empty() {
                return Err(err(line, "quantifier line after clauses"));
            }
            let nums = literals(body, line, vars)?;
            match nums.split_last() {
                Some((0, vs)) => {
                    for &v in vs {
                        if v < 0 {
                            return Err(err(line, format!("negative variable {v} in quantifier line")));
                        }
                        prefix.push((q, v as u32));
                    }
                }
                _ => return Err(err(line, "quantifier line must end with 0")),
            }
            continue;
        }
        for l in literals(body, line, vars)? {
            if pending.is_empty() {
                pending_line = line;
            }
            if l == 0 {
                clauses.push(to_three(&pending, pending_line)?);
                pending.clear();
            } else {
                pending.push(l);
            }
        }
    }
    let Some((vars, count)) = header else {
        return Err(err(0, "missing `p cnf` header"));
    };
    if !pending.is_empty() {
        return Err(err(pending_line, "clause is not terminated by 0"));
    }
    if clauses.len() != count {
        return Err(err(0, format!("header declares {count} clauses, found {}", clauses.len())));
    }
    Ok(Parsed { vars, prefix, clauses })
}

fn literals(body: &str, line: usize, vars: u32) -> Result<Vec<Literal>> {
    body.split_whitespace()
        .map(|tok| {
            let l: Literal = tok.parse().map_err(|_| err(line, format!("bad literal `{tok}`")))?;
            if l.unsigned_abs() > vars {
                return Err(err(line, format!("literal {l} exceeds declared {vars} variables")));
            }
            Ok(l)
        })
        .collect()
}

/// Pads short clauses by repeating their last literal.
fn to_three(lits: &[Literal], line: usize) -> Result<[Literal; 3]> {
    match *lits {
        [] => Err(err(line, "empty clause")),
        [a] => Ok([a, a, a]),
        [a, b] => Ok([a, b, b]),
        [a, b, c] => Ok([a, b, c]),
        _ => Err(err(line, format!("clause has {} literals, at most 3 are supported", lits.len()))),
    }
}

/// Reads a DIMACS CNF file. Clauses with fewer than three literals are
/// padded by repetition; longer clauses are rejected.
pub fn parse_dimacs(bytes: &[u8]) -> Result<Cnf> {
    let p = parse(bytes, false)?;
    Cnf::new(p.vars, p.clauses)
}

/// Reads a prenex QDIMACS file; every variable must be quantified once.
pub fn parse_qdimacs(bytes: &[u8]) -> Result<Qbf> {
    let p = parse(bytes, true)?;
    let matrix = Cnf::new(p.vars, p.clauses)?;
    Qbf::new(p.prefix, matrix).map_err(|e| match e {
        FrogError::Gadget(msg) => err(0, msg),
        other => other,
    })
}
