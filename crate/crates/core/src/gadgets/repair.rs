//! Isomorphic-repair reductions: 3SAT with a fixed expression, and
//! Hamiltonian paths with an expression that grows with the graph.

use super::cnf::Cnf;
use super::sat::{BOT, CLAUSE, TOP, VAR};
use crate::datagraph::{DataGraph, NodeId};
use crate::error::{Error, Result};
use crate::gxpath::ast::build::*;
use crate::gxpath::NodeExpr;
use std::collections::BTreeSet;

pub const DOWN_POS: &str = "down_+";
pub const DOWN_NEG: &str = "down_-";
pub const NOT_CLAUSE: &str = "notClause";
pub const DOWN: &str = "down";

/// Variables `1..=n` with `notClause` loops, clauses `n+1..=n+m`, and
/// `down_+` / `down_-` edges from each variable to the clauses it occurs in.
pub fn isorepair_graph(cnf: &Cnf) -> DataGraph {
    let n = cnf.num_vars as NodeId;
    let mut b = DataGraph::builder([DOWN_POS, DOWN_NEG, NOT_CLAUSE]);
    for i in 1..=n {
        b = b.node(i, VAR).edge(i, NOT_CLAUSE, i);
    }
    for j in 0..cnf.clauses.len() {
        let c = n + 1 + j as NodeId;
        b = b.node(c, CLAUSE);
        for (v, pos) in cnf.literal_set(j) {
            b = b.edge(v as NodeId, if pos { DOWN_POS } else { DOWN_NEG }, c);
        }
    }
    b.build().expect("well-formed layout")
}

/// Clause nodes keep their value and see a variable set to make one of
/// their literals true.
pub fn isorepair_expression() -> NodeExpr {
    let nu1 = any_of([
        exists(concat(inv(DOWN_POS), test(eq(TOP)))),
        exists(concat(inv(DOWN_NEG), test(eq(BOT)))),
        neq(CLAUSE),
    ]);
    let nu2 = or(exists(label(NOT_CLAUSE)), eq(CLAUSE));
    and(nu1, nu2)
}

/// Some data-only change of the graph satisfies the expression at every
/// node iff the formula is satisfiable.
pub fn gadget_isorepair(cnf: &Cnf) -> (DataGraph, NodeExpr) {
    (isorepair_graph(cnf), isorepair_expression())
}

/// Reads an assignment off a repaired graph (variables valued `T`).
pub fn assignment_of(repaired: &DataGraph, cnf: &Cnf) -> Vec<bool> {
    (1..=cnf.num_vars as NodeId)
        .map(|i| repaired.data(i).map(String::as_str) == Some(TOP))
        .collect()
}

/// A directed graph on `0..n` becomes nodes `1..=n` with data `0` and `down`
/// edges; the expression asks for a walk through the values `1, …, n`.
pub fn gadget_hampath(
    n: usize,
    edges: &BTreeSet<(usize, usize)>,
    start: usize,
) -> Result<(DataGraph, NodeId, NodeExpr)> {
    if n == 0 || start >= n {
        return Err(Error::InvalidInput("start vertex outside the graph".into()));
    }
    let mut b = DataGraph::builder([DOWN]);
    for v in 0..n {
        b = b.node(v as NodeId + 1, "0");
    }
    for &(u, v) in edges {
        if u >= n || v >= n {
            return Err(Error::InvalidInput(format!("edge ({u}, {v}) outside 0..{n}")));
        }
        b = b.edge(u as NodeId + 1, DOWN, v as NodeId + 1);
    }
    let mut path = test(eq("1"));
    for k in 2..=n {
        path = concat(path, concat(label(DOWN), test(eq(&k.to_string()))));
    }
    Ok((b.build()?, start as NodeId + 1, exists(path)))
}
