//! CNF formulas, DIMACS input and brute-force oracles.

use crate::error::{Error, Result};
use std::collections::BTreeSet;

/// A literal: 1-based variable index and polarity (`true` = positive).
pub type Literal = (usize, bool);

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Cnf {
    pub num_vars: usize,
    pub clauses: Vec<Vec<Literal>>,
}

impl Cnf {
    pub fn new(num_vars: usize, clauses: Vec<Vec<Literal>>) -> Result<Self> {
        for c in &clauses {
            if let Some((v, _)) = c.iter().find(|(v, _)| *v == 0 || *v > num_vars) {
                return Err(Error::InvalidInput(format!(
                    "variable {v} outside 1..={num_vars}"
                )));
            }
        }
        Ok(Cnf { num_vars, clauses })
    }

    /// Every clause has exactly three literals (repetitions allowed).
    pub fn is_3cnf(&self) -> bool {
        self.clauses.iter().all(|c| c.len() == 3)
    }

    pub fn require_3cnf(&self) -> Result<()> {
        if self.is_3cnf() {
            Ok(())
        } else {
            Err(Error::InvalidInput("formula is not in 3CNF".into()))
        }
    }

    /// Distinct literals of clause `j`.
    pub fn literal_set(&self, j: usize) -> BTreeSet<Literal> {
        self.clauses[j].iter().copied().collect()
    }

    /// `assignment[i]` is the value of variable `i + 1`.
    pub fn satisfied_by(&self, assignment: &[bool]) -> bool {
        self.clauses
            .iter()
            .all(|c| c.iter().any(|&(v, pos)| assignment[v - 1] == pos))
    }

    /// All `2^n` assignments, variable 1 as the lowest bit.
    pub fn assignments(&self) -> impl Iterator<Item = Vec<bool>> + '_ {
        (0u64..1 << self.num_vars).map(move |mask| (0..self.num_vars).map(|i| mask >> i & 1 == 1).collect())
    }

    pub fn count_satisfying(&self) -> u64 {
        self.assignments().filter(|a| self.satisfied_by(a)).count() as u64
    }

    pub fn is_satisfiable(&self) -> bool {
        self.assignments().any(|a| self.satisfied_by(&a))
    }

    /// Strictly more than half of the assignments satisfy the formula.
    pub fn is_majority_satisfiable(&self) -> bool {
        2 * self.count_satisfying() > 1u64 << self.num_vars
    }

    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.num_vars, self.clauses.len());
        for c in &self.clauses {
            for (v, pos) in c {
                let v = *v as i64;
                out.push_str(&format!("{} ", if *pos { v } else { -v }));
            }
            out.push_str("0\n");
        }
        out
    }
}

/// Parses DIMACS CNF: `c` comment lines, one `p cnf <vars> <clauses>`
/// header, then zero-terminated clauses (which may span lines).
pub fn parse_dimacs(text: &str) -> Result<Cnf> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses = Vec::new();
    let mut current = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
            continue;
        }
        if line.starts_with('p') {
            let parts: Vec<&str> = line.split_whitespace().collect();
            if header.is_some() || parts.len() != 4 || parts[1] != "cnf" {
                return Err(Error::InvalidInput(format!("bad DIMACS header `{line}`")));
            }
            let num = |s: &str| {
                s.parse::<usize>()
                    .map_err(|_| Error::InvalidInput(format!("bad number `{s}` in header")))
            };
            header = Some((num(parts[2])?, num(parts[3])?));
            continue;
        }
        if header.is_none() {
            return Err(Error::InvalidInput("clause before the DIMACS header".into()));
        }
        for tok in line.split_whitespace() {
            let x: i64 = tok
                .parse()
                .map_err(|_| Error::InvalidInput(format!("bad literal `{tok}`")))?;
            if x == 0 {
                clauses.push(std::mem::take(&mut current));
            } else {
                current.push((x.unsigned_abs() as usize, x > 0));
            }
        }
    }
    let (vars, count) = header.ok_or_else(|| Error::InvalidInput("missing DIMACS header".into()))?;
    if !current.is_empty() {
        clauses.push(current);
    }
    if clauses.len() != count {
        return Err(Error::InvalidInput(format!(
            "header announces {count} clauses, found {}",
            clauses.len()
        )));
    }
    Cnf::new(vars, clauses)
}

/// Whether the directed graph on `0..n` has a path from `start` visiting
/// every vertex exactly once, by trying every ordering.
pub fn has_hamiltonian_path(n: usize, edges: &BTreeSet<(usize, usize)>, start: usize) -> bool {
    fn go(n: usize, edges: &BTreeSet<(usize, usize)>, at: usize, seen: &mut Vec<bool>, depth: usize) -> bool {
        if depth == n {
            return true;
        }
        for next in 0..n {
            if !seen[next] && edges.contains(&(at, next)) {
                seen[next] = true;
                if go(n, edges, next, seen, depth + 1) {
                    return true;
                }
                seen[next] = false;
            }
        }
        false
    }
    if start >= n {
        return false;
    }
    let mut seen = vec![false; n];
    seen[start] = true;
    go(n, edges, start, &mut seen, 1)
}
