//! MAJSAT encoded as global PQA: the posterior is uniform over the `2^n`
//! assignment graphs and the query checks the assignment.
//!
//! Node layout: variables `1..=n`, clauses `n+1..=n+m`, then `F` and `T`.

use super::cnf::Cnf;
use super::repair::{DOWN_NEG, DOWN_POS};
use super::sat::{BOT, CLAUSE, TOP, VAR};
use crate::datagraph::{DataGraph, Edge, NodeId};
use crate::emdg::{Budget, Prior, Pudg, RealizationModel, Restriction};
use crate::gxpath::ast::build::*;
use crate::gxpath::NodeExpr;
use crate::rational::{half_pow, Rational};
use num_traits::{One, Zero};
use std::collections::BTreeSet;
use std::sync::Arc;

pub const ASSIGNED: &str = "assigned";

#[derive(Clone, Debug)]
pub struct MajsatGadget {
    pub pudg: Pudg,
    /// Clause nodes must see a true literal.
    pub query: NodeExpr,
    /// The same check written without negation.
    pub positive_query: NodeExpr,
    pub bound: Rational,
}

fn ids(cnf: &Cnf) -> (NodeId, NodeId) {
    let (n, m) = (cnf.num_vars as NodeId, cnf.clauses.len() as NodeId);
    (n + m + 1, n + m + 2)
}

fn formula_graph(cnf: &Cnf) -> DataGraph {
    let n = cnf.num_vars as NodeId;
    let mut b = DataGraph::builder([DOWN_POS, DOWN_NEG, ASSIGNED]);
    for i in 1..=n {
        b = b.node(i, VAR);
    }
    for j in 0..cnf.clauses.len() {
        let c = n + 1 + j as NodeId;
        b = b.node(c, CLAUSE);
        for (v, pos) in cnf.literal_set(j) {
            b = b.edge(v as NodeId, if pos { DOWN_POS } else { DOWN_NEG }, c);
        }
    }
    let (bot, top) = ids(cnf);
    b.node(bot, BOT).node(top, TOP).build().expect("well-formed layout")
}

fn assigned_edges(cnf: &Cnf, assignment: &[bool]) -> Vec<Edge> {
    let (bot, top) = ids(cnf);
    assignment
        .iter()
        .enumerate()
        .map(|(i, &val)| Edge::new(i as NodeId + 1, ASSIGNED, if val { top } else { bot }))
        .collect()
}

/// `H_v`: the formula plus one `assigned` edge per variable.
pub fn assignment_graph(cnf: &Cnf, assignment: &[bool]) -> DataGraph {
    formula_graph(cnf)
        .with_edges(&assigned_edges(cnf, assignment))
        .expect("declared labels")
}

fn satisfied_somewhere() -> [NodeExpr; 2] {
    [
        exists(concat(inv(DOWN_POS), concat(label(ASSIGNED), test(eq(TOP))))),
        exists(concat(inv(DOWN_NEG), concat(label(ASSIGNED), test(eq(BOT))))),
    ]
}

pub fn majsat_query() -> NodeExpr {
    let [pos, neg] = satisfied_somewhere();
    any_of([not(eq(CLAUSE)), pos, neg])
}

pub fn majsat_positive_query() -> NodeExpr {
    let [pos, neg] = satisfied_somewhere();
    any_of([eq(VAR), eq(TOP), eq(BOT), pos, neg])
}

/// Mass `1/2^n` on each `H_v`, with the `H_v` as support.
fn assignment_prior(cnf: &Cnf) -> Prior {
    let graphs: Arc<BTreeSet<DataGraph>> = Arc::new(cnf.assignments().map(|a| assignment_graph(cnf, &a)).collect());
    let mass = half_pow(cnf.num_vars as u64);
    let lookup = graphs.clone();
    Prior::intensional(move |g| {
        if lookup.contains(g) {
            mass.clone()
        } else {
            Rational::zero()
        }
    })
    .with_support(move |_: &DataGraph, _: &Restriction, _: &Budget| Ok(graphs.iter().cloned().collect()))
}

fn flat(restriction: Restriction) -> RealizationModel {
    RealizationModel::new("flat", restriction, |_, _| Rational::one())
}

fn gadget(cnf: &Cnf, observed: DataGraph, restriction: Restriction) -> MajsatGadget {
    MajsatGadget {
        pudg: Pudg::new(assignment_prior(cnf), flat(restriction), observed),
        query: majsat_query(),
        positive_query: majsat_positive_query(),
        bound: Rational::new(1.into(), 2.into()),
    }
}

/// The observation is the bare formula; the observer dropped the
/// `assigned` edges.
pub fn gadget_majsat_subset(cnf: &Cnf) -> MajsatGadget {
    gadget(cnf, formula_graph(cnf), Restriction::subset())
}

/// The observation carries both `assigned` edges of every variable.
pub fn gadget_majsat_superset(cnf: &Cnf) -> MajsatGadget {
    let both: Vec<Edge> = [false, true]
        .iter()
        .flat_map(|&v| assigned_edges(cnf, &vec![v; cnf.num_vars]))
        .collect();
    let observed = formula_graph(cnf).with_edges(&both).expect("declared labels");
    gadget(cnf, observed, Restriction::superset())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gxpath::{satisfies_global, Expr};
    use crate::pqa::{global_pqa, pqa_bound};

    fn cnf(n: usize, clauses: &[&[i64]]) -> Cnf {
        Cnf::new(
            n,
            clauses
                .iter()
                .map(|c| c.iter().map(|&x| (x.unsigned_abs() as usize, x > 0)).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn query_checks_the_assignment() {
        let f = cnf(3, &[&[1, -2], &[2, 3], &[-1, -3]]);
        for a in f.assignments() {
            let h = assignment_graph(&f, &a);
            for q in [majsat_query(), majsat_positive_query()] {
                assert_eq!(satisfies_global(&h, &Expr::Node(q)).unwrap(), f.satisfied_by(&a));
            }
        }
    }

    #[test]
    fn majority_examples() {
        let cases = [
            (cnf(1, &[&[1]]), false),
            (cnf(1, &[&[1, -1]]), true),
            (cnf(2, &[&[1, 2]]), true),
            (cnf(2, &[&[1], &[2]]), false),
        ];
        for (f, expected) in cases {
            assert_eq!(f.is_majority_satisfiable(), expected);
            for g in [gadget_majsat_subset(&f), gadget_majsat_superset(&f)] {
                let q = Expr::Node(g.query.clone());
                assert_eq!(pqa_bound(&g.pudg, &q, &g.bound).unwrap(), expected, "{f:?}");
                let p = global_pqa(&g.pudg, &q).unwrap().probability;
                let count = Rational::from_integer(f.count_satisfying().into());
                assert_eq!(p, count * half_pow(f.num_vars as u64));
                let pos = Expr::Node(g.positive_query.clone());
                assert_eq!(pqa_bound(&g.pudg, &pos, &g.bound).unwrap(), expected);
            }
        }
    }
}
