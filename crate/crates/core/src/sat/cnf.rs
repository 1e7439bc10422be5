use std::fmt::Write as _;

use super::SatError;

/// A CNF formula over variables `1..=var_count` with DIMACS-style signed
/// literals.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CnfFormula {
    var_count: u32,
    clauses: Vec<Vec<i32>>,
}

impl CnfFormula {
    pub fn new(var_count: u32) -> Self {
        Self { var_count, clauses: Vec::new() }
    }

    /// Allocates a fresh variable and returns it.
    pub fn new_var(&mut self) -> i32 {
        self.var_count += 1;
        self.var_count as i32
    }

    pub fn add_clause(&mut self, lits: &[i32]) -> Result<(), SatError> {
        if lits.is_empty() {
            return Err(SatError::EmptyClause);
        }
        for &l in lits {
            if l == 0 || l.unsigned_abs() > self.var_count {
                return Err(SatError::LiteralOutOfRange { literal: l, var_count: self.var_count });
            }
        }
        self.clauses.push(lits.to_vec());
        Ok(())
    }

    pub fn var_count(&self) -> u32 {
        self.var_count
    }

    pub fn clauses(&self) -> &[Vec<i32>] {
        &self.clauses
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    /// Whether `model` (indexed by variable, slot 0 unused) satisfies every
    /// clause.
    pub fn is_satisfied_by(&self, model: &[bool]) -> bool {
        self.clauses.iter().all(|c| {
            c.iter().any(|&l| {
                let v = model.get(l.unsigned_abs() as usize).copied().unwrap_or(false);
                v == (l > 0)
            })
        })
    }
}

/// Serializes to DIMACS CNF: a `p cnf` header and one zero-terminated clause
/// per line.
pub fn to_dimacs(f: &CnfFormula) -> String {
    let mut out = format!("p cnf {} {}\n", f.var_count, f.clauses.len());
    for c in &f.clauses {
        for l in c {
            write!(out, "{l} ").unwrap();
        }
        out.push_str("0\n");
    }
    out
}

/// Parses DIMACS CNF. Comment lines (`c ...`) and a trailing `%` line are
/// skipped; clauses may span lines.
pub fn parse_dimacs(text: &str) -> Result<CnfFormula, SatError> {
    let mut header: Option<(u32, usize)> = None;
    let mut formula = CnfFormula::default();
    let mut current = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('%') {
            break;
        }
        let bad = |msg: &str| SatError::Parse { line: lineno + 1, message: msg.to_string() };
        if line.starts_with('p') {
            let parts: Vec<&str> = line.split_whitespace().collect();
            if header.is_some() || parts.len() != 4 || parts[1] != "cnf" {
                return Err(bad("malformed problem line"));
            }
            let vars = parts[2].parse().map_err(|_| bad("bad variable count"))?;
            let clauses = parts[3].parse().map_err(|_| bad("bad clause count"))?;
            header = Some((vars, clauses));
            formula = CnfFormula::new(vars);
            continue;
        }
        if header.is_none() {
            return Err(bad("clause before problem line"));
        }
        for tok in line.split_whitespace() {
            let lit: i32 = tok.parse().map_err(|_| bad("bad literal"))?;
            if lit == 0 {
                formula.add_clause(&current).map_err(|e| bad(&e.to_string()))?;
                current.clear();
            } else {
                current.push(lit);
            }
        }
    }
    let (_, expected) = header.ok_or(SatError::Parse { line: 0, message: "missing problem line".into() })?;
    if !current.is_empty() {
        return Err(SatError::Parse { line: 0, message: "unterminated final clause".into() });
    }
    if formula.num_clauses() != expected {
        return Err(SatError::Parse {
            line: 0,
            message: format!("header announces {expected} clauses, found {}", formula.num_clauses()),
        });
    }
    Ok(formula)
}

/// Result line of an external SAT solver in the competition output format.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExternalOutput {
    /// Literals from the `v` lines.
    Satisfiable(Vec<i32>),
    Unsatisfiable,
    Unknown,
}

/// Reads `s SATISFIABLE` / `s UNSATISFIABLE` plus `v` lines.
pub fn parse_solver_output(text: &str) -> Result<ExternalOutput, SatError> {
    let mut status = None;
    let mut lits = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        let bad = || SatError::Parse { line: lineno + 1, message: "bad value line".into() };
        if let Some(rest) = line.strip_prefix("s ") {
            status = Some(rest.trim().to_string());
        } else if let Some(rest) = line.strip_prefix("v ") {
            for tok in rest.split_whitespace() {
                let l: i32 = tok.parse().map_err(|_| bad())?;
                if l != 0 {
                    lits.push(l);
                }
            }
        }
    }
    match status.as_deref() {
        Some("SATISFIABLE") => Ok(ExternalOutput::Satisfiable(lits)),
        Some("UNSATISFIABLE") => Ok(ExternalOutput::Unsatisfiable),
        Some("UNKNOWN") => Ok(ExternalOutput::Unknown),
        _ => Err(SatError::Parse { line: 0, message: "missing or unrecognized status line".into() }),
    }
}
