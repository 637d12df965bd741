//! 3SAT encoded as data cleaning: the prior favours graphs that carry a
//! satisfying assignment, the observer erases the assignment, and a clean
//! graph beats the bound exactly when the formula is satisfiable.
//!
//! Node layout for `n` variables and `m` clauses: variables `1..=n` (data
//! `var`), clauses `n+1..=n+m` (data `clause`), then `F` and `T`.

use super::cnf::{Cnf, Literal};
use crate::datagraph::{DataGraph, Edge, NodeId};
use crate::emdg::{uniform_subset, uniform_superset, Budget, KDataPrior, Prior, Pudg, RealizationModel, Restriction};
use crate::error::Result;
use crate::rational::{half_pow, Rational};
use num_bigint::BigUint;
use num_integer::binomial;
use num_traits::{One, Zero};
use std::collections::{BTreeMap, BTreeSet};

pub const VAR: &str = "var";
pub const CLAUSE: &str = "clause";
pub const TOP: &str = "T";
pub const BOT: &str = "F";
pub const IS_LITERAL: &str = "is_literal";
pub const IS_LITERAL_NEGATED: &str = "is_literal_negated";
pub const VALUE: &str = "value";
pub const E1: &str = "e1";
pub const E2: &str = "e2";
pub const CHOSEN: &str = "chosen";
pub const UNCHOSEN: &str = "unchosen";

/// How a graph records the assignment.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Encoding {
    /// A `value` edge from each variable to `F` or `T`.
    Value,
    /// Edges to both `F` and `T`, one `chosen`, the other `unchosen`.
    Chosen,
}

impl Encoding {
    pub fn alphabet(self) -> Vec<&'static str> {
        match self {
            Encoding::Value => vec![IS_LITERAL, IS_LITERAL_NEGATED, VALUE, E1, E2],
            Encoding::Chosen => vec![IS_LITERAL, IS_LITERAL_NEGATED, CHOSEN, UNCHOSEN, E1, E2],
        }
    }
}

/// Position of cell `(n, m)` when the table is walked one anti-diagonal at a
/// time, each diagonal from `m = 0` upwards. Starts at 1.
pub fn diagonal_index(n: u64, m: u64) -> u64 {
    let d = n + m;
    d * (d + 1) / 2 + m + 1
}

/// Prior mass of all graphs encoding formulas with `n` variables and `m`
/// clauses: `2^{-diagonal_index(n, m)}`. The cells sum to one.
pub fn table_weight(n: u64, m: u64) -> Rational {
    half_pow(diagonal_index(n, m))
}

/// Possible clauses over `n` variables: sets of at most three of the `2n`
/// literals.
pub fn clause_choices(n: u64) -> BigUint {
    (0..=3u64)
        .map(|s| binomial(BigUint::from(2 * n), BigUint::from(s)))
        .sum()
}

/// Graphs sharing one table cell: formulas times assignments times the two
/// `F`→`T` labels.
pub fn graph_count(n: u64, m: u64) -> BigUint {
    BigUint::from(2u32) * (BigUint::one() << n) * num_traits::pow(clause_choices(n), m as usize)
}

fn ids(cnf: &Cnf) -> (NodeId, NodeId) {
    let (n, m) = (cnf.num_vars as NodeId, cnf.clauses.len() as NodeId);
    (n + m + 1, n + m + 2)
}

/// Variables, clauses, `F`, `T` and the literal edges; nothing else.
pub fn formula_graph(cnf: &Cnf, enc: Encoding) -> DataGraph {
    let n = cnf.num_vars as NodeId;
    let mut b = DataGraph::builder(enc.alphabet());
    for i in 1..=n {
        b = b.node(i, VAR);
    }
    for j in 0..cnf.clauses.len() {
        b = b.node(n + 1 + j as NodeId, CLAUSE);
        for (v, pos) in cnf.literal_set(j) {
            b = b.edge(v as NodeId, if pos { IS_LITERAL } else { IS_LITERAL_NEGATED }, n + 1 + j as NodeId);
        }
    }
    let (bot, top) = ids(cnf);
    b.node(bot, BOT).node(top, TOP).build().expect("well-formed layout")
}

fn assignment_edges(cnf: &Cnf, assignment: &[bool], e1: bool, enc: Encoding) -> Vec<Edge> {
    let (bot, top) = ids(cnf);
    let mut out = Vec::new();
    for (i, &val) in assignment.iter().enumerate() {
        let x = i as NodeId + 1;
        let (yes, no) = if val { (top, bot) } else { (bot, top) };
        match enc {
            Encoding::Value => out.push(Edge::new(x, VALUE, yes)),
            Encoding::Chosen => {
                out.push(Edge::new(x, CHOSEN, yes));
                out.push(Edge::new(x, UNCHOSEN, no));
            }
        }
    }
    out.push(Edge::new(bot, if e1 { E1 } else { E2 }, top));
    out
}

/// `G_{φ,v}` with the `F`→`T` edge labelled `e1` or `e2`.
pub fn assignment_graph(cnf: &Cnf, assignment: &[bool], e1: bool, enc: Encoding) -> DataGraph {
    formula_graph(cnf, enc)
        .with_edges(&assignment_edges(cnf, assignment, e1, enc))
        .expect("declared labels")
}

/// Reads the node layout and literal edges; `None` unless `g` has the
/// shape of an encoded formula. Clauses with more than three literals are
/// rejected.
fn decode_formula(g: &DataGraph, enc: Encoding) -> Option<Cnf> {
    let expected: BTreeSet<String> = enc.alphabet().into_iter().map(String::from).collect();
    if *g.alphabet() != expected || g.node_count() < 2 {
        return None;
    }
    let total = g.node_count() as NodeId;
    if !g.nodes().eq(1..=total) {
        return None;
    }
    let n = g.data_map().values().take_while(|d| *d == VAR).count() as NodeId;
    let m = total.checked_sub(n + 2)?;
    for j in 1..=m {
        if g.data(n + j)? != CLAUSE {
            return None;
        }
    }
    if g.data(total - 1)? != BOT || g.data(total)? != TOP {
        return None;
    }
    let mut clauses: Vec<BTreeSet<Literal>> = vec![BTreeSet::new(); m as usize];
    for e in g.edges() {
        let lit = match e.label.as_str() {
            IS_LITERAL => true,
            IS_LITERAL_NEGATED => false,
            _ => continue,
        };
        if !(1..=n).contains(&e.from) || !(n + 1..=n + m).contains(&e.to) {
            return None;
        }
        clauses[(e.to - n - 1) as usize].insert((e.from as usize, lit));
    }
    if clauses.iter().any(|c| c.len() > 3) {
        return None;
    }
    Some(Cnf {
        num_vars: n as usize,
        clauses: clauses.into_iter().map(|c| c.into_iter().collect()).collect(),
    })
}

/// Full decoding of `G_{φ,v}`: formula, assignment and whether the `F`→`T`
/// edge is `e1`.
pub fn decode(g: &DataGraph, enc: Encoding) -> Option<(Cnf, Vec<bool>, bool)> {
    let cnf = decode_formula(g, enc)?;
    let (bot, top) = ids(&cnf);
    let mut assignment = Vec::with_capacity(cnf.num_vars);
    for i in 1..=cnf.num_vars as NodeId {
        let to_top = labels(g, i, top);
        let to_bot = labels(g, i, bot);
        let val = match enc {
            Encoding::Value => match (to_bot.as_slice(), to_top.as_slice()) {
                ([], [VALUE]) => true,
                ([VALUE], []) => false,
                _ => return None,
            },
            Encoding::Chosen => match (to_bot.as_slice(), to_top.as_slice()) {
                ([UNCHOSEN], [CHOSEN]) => true,
                ([CHOSEN], [UNCHOSEN]) => false,
                _ => return None,
            },
        };
        assignment.push(val);
    }
    let e1 = match labels(g, bot, top).as_slice() {
        [E1] => true,
        [E2] => false,
        _ => return None,
    };
    // nothing beyond literal edges, the assignment and the F→T edge
    let expected = cnf.clauses.iter().map(|c| c.len()).sum::<usize>()
        + match enc {
            Encoding::Value => cnf.num_vars,
            Encoding::Chosen => 2 * cnf.num_vars,
        }
        + 1;
    (g.edge_count() == expected).then_some((cnf, assignment, e1))
}

fn labels(g: &DataGraph, u: NodeId, v: NodeId) -> Vec<&str> {
    g.labels_between(u, v).into_iter().collect()
}

/// `T(n,m)/C(n,m)` times `1 + [v ⊨ φ]` for `e1`, `1 − [v ⊨ φ]` for `e2`.
pub fn sat_prior_weight(g: &DataGraph, enc: Encoding) -> Rational {
    let Some((cnf, assignment, e1)) = decode(g, enc) else {
        return Rational::zero();
    };
    let (n, m) = (cnf.num_vars as u64, cnf.clauses.len() as u64);
    let base = table_weight(n, m) / Rational::from_integer(graph_count(n, m).into());
    let sat = cnf.satisfied_by(&assignment);
    match (e1, sat) {
        (true, true) => base * Rational::from_integer(2.into()),
        (false, true) => Rational::zero(),
        _ => base,
    }
}

/// The prior, with a support enumerator listing the `2·2^n` assignment
/// graphs of the formula encoded in the observation.
pub fn sat_prior(enc: Encoding) -> Prior {
    Prior::intensional(move |g| sat_prior_weight(g, enc)).with_support(
        move |observed: &DataGraph, _: &Restriction, _: &Budget| {
            let Some(cnf) = decode_formula(observed, enc) else {
                return Ok(Vec::new());
            };
            let mut out = Vec::new();
            for a in cnf.assignments() {
                for e1 in [true, false] {
                    let g = assignment_graph(&cnf, &a, e1, enc);
                    if !sat_prior_weight(&g, enc).is_zero() {
                        out.push(g);
                    }
                }
            }
            Ok(out)
        },
    )
}

/// Cleaning instance plus the strict bound that a clean graph's posterior
/// beats iff the formula is satisfiable.
#[derive(Clone, Debug)]
pub struct SatGadget {
    pub pudg: Pudg,
    pub bound: Rational,
}

/// Satisfying assignments get posterior `1/2^n`, the others `1/2^{n+1}`.
fn bound(cnf: &Cnf) -> Rational {
    half_pow(cnf.num_vars as u64 + 1)
}

/// The observer deletes edges uniformly; the observation is the bare
/// formula.
pub fn gadget_sat_subset(cnf: &Cnf) -> Result<SatGadget> {
    cnf.require_3cnf()?;
    let observed = formula_graph(cnf, Encoding::Value);
    Ok(SatGadget {
        pudg: Pudg::new(sat_prior(Encoding::Value), uniform_subset(), observed),
        bound: bound(cnf),
    })
}

/// The observer adds edges uniformly; the observation carries both `value`
/// edges of every variable and both `F`→`T` labels.
pub fn gadget_sat_superset(cnf: &Cnf) -> Result<SatGadget> {
    cnf.require_3cnf()?;
    let (bot, top) = ids(cnf);
    let mut extra = vec![Edge::new(bot, E1, top), Edge::new(bot, E2, top)];
    for i in 1..=cnf.num_vars as NodeId {
        extra.push(Edge::new(i, VALUE, bot));
        extra.push(Edge::new(i, VALUE, top));
    }
    let observed = formula_graph(cnf, Encoding::Value)
        .with_edges(&extra)
        .expect("declared labels");
    Ok(SatGadget {
        pudg: Pudg::new(sat_prior(Encoding::Value), uniform_superset(), observed),
        bound: bound(cnf),
    })
}

/// Each non-`unchosen` edge independently turns `unchosen` with
/// probability 1/2; nothing else changes.
pub fn chosen_erasure() -> RealizationModel {
    RealizationModel::new(
        "chosen_erasure",
        Restriction::Update {
            max_relabeled_pairs: None,
            max_updates: Some(0),
            f: KDataPrior::identity(),
        },
        |clean, obs| {
            if clean.alphabet() != obs.alphabet() || clean.data_map() != obs.data_map() {
                return Rational::zero();
            }
            let pairs = |g: &DataGraph| {
                let mut m: BTreeMap<(NodeId, NodeId), BTreeSet<String>> = BTreeMap::new();
                for e in g.edges() {
                    m.entry((e.from, e.to)).or_default().insert(e.label.clone());
                }
                m
            };
            let (c, o) = (pairs(clean), pairs(obs));
            if !c.keys().eq(o.keys()) {
                return Rational::zero();
            }
            for (k, lc) in &c {
                let lo = &o[k];
                if lc.len() != lo.len() || lo.difference(lc).any(|l| l != UNCHOSEN) {
                    return Rational::zero();
                }
            }
            let kept = clean.edges().iter().filter(|e| e.label != UNCHOSEN).count();
            half_pow(kept as u64)
        },
    )
}

/// The observation has every assignment edge and the `F`→`T` edge
/// relabelled `unchosen`.
pub fn gadget_sat_update(cnf: &Cnf) -> Result<SatGadget> {
    cnf.require_3cnf()?;
    let (bot, top) = ids(cnf);
    let mut extra = vec![Edge::new(bot, UNCHOSEN, top)];
    for i in 1..=cnf.num_vars as NodeId {
        extra.push(Edge::new(i, UNCHOSEN, bot));
        extra.push(Edge::new(i, UNCHOSEN, top));
    }
    let observed = formula_graph(cnf, Encoding::Chosen)
        .with_edges(&extra)
        .expect("declared labels");
    Ok(SatGadget {
        pudg: Pudg::new(sat_prior(Encoding::Chosen), chosen_erasure(), observed),
        bound: bound(cnf),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cleaning::clean_bound;
    use crate::emdg::{posterior, validate_class};
    use itertools::Itertools;

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
    fn table_matches_the_displayed_cells() {
        let cells = [((0, 0), 1), ((1, 0), 2), ((0, 1), 3), ((2, 0), 4), ((1, 1), 5), ((0, 2), 6), ((3, 0), 7), ((2, 1), 8), ((1, 2), 9)];
        for ((n, m), k) in cells {
            assert_eq!(diagonal_index(n, m), k);
        }
        // the first K diagonals cover cells 1..=K(K+1)/2
        for k in 1..8u64 {
            let total: Rational = (0..k).flat_map(|d| (0..=d).map(move |m| table_weight(d - m, m))).sum();
            assert_eq!(total, Rational::one() - half_pow(k * (k + 1) / 2));
        }
    }

    /// Every graph of one cell, enumerated independently of the decoder.
    fn cell_graphs(n: usize, m: usize) -> Vec<DataGraph> {
        let lits: Vec<Literal> = (1..=n).flat_map(|v| [(v, true), (v, false)]).collect();
        let clause_sets: Vec<Vec<Literal>> = (0..=3).flat_map(|s| lits.iter().copied().combinations(s)).collect();
        let mut out = Vec::new();
        for clauses in (0..m).map(|_| clause_sets.iter().cloned()).multi_cartesian_product() {
            let f = Cnf::new(n, clauses).unwrap();
            for a in f.assignments() {
                for e1 in [true, false] {
                    out.push(assignment_graph(&f, &a, e1, Encoding::Value));
                }
            }
        }
        if m == 0 {
            let f = Cnf::new(n, vec![]).unwrap();
            out = f.assignments().flat_map(|a| [true, false].map(|e1| assignment_graph(&f, &a, e1, Encoding::Value))).collect();
        }
        out
    }

    #[test]
    fn cells_carry_their_table_mass() {
        for (n, m) in [(0, 0), (1, 0), (0, 1), (1, 1), (2, 1), (1, 2)] {
            let gs = cell_graphs(n, m);
            assert_eq!(BigUint::from(gs.len()), graph_count(n as u64, m as u64));
            let total: Rational = gs.iter().map(|g| sat_prior_weight(g, Encoding::Value)).sum();
            assert_eq!(total, table_weight(n as u64, m as u64), "cell ({n}, {m})");
        }
    }

    #[test]
    fn decode_round_trips() {
        let f = cnf(3, &[&[1, -2, 3], &[-1, -1, 2]]);
        for enc in [Encoding::Value, Encoding::Chosen] {
            for a in f.assignments() {
                let g = assignment_graph(&f, &a, false, enc);
                let (_, back, e1) = decode(&g, enc).unwrap();
                assert_eq!(back, a);
                assert!(!e1);
            }
            assert!(decode(&formula_graph(&f, enc), enc).is_none());
        }
    }

    fn check(f: &Cnf) {
        let sat = f.is_satisfiable();
        for g in [gadget_sat_subset(f), gadget_sat_superset(f), gadget_sat_update(f)] {
            let g = g.unwrap();
            assert_eq!(clean_bound(&g.pudg, &g.bound).unwrap(), sat, "{f:?}");
            let post = posterior(&g.pudg).unwrap();
            let top = post.iter().map(|(_, p)| p.clone()).max().unwrap();
            assert_eq!(top, if sat { half_pow(f.num_vars as u64) } else { g.bound.clone() });
        }
    }

    #[test]
    fn tiny_formulas() {
        check(&cnf(1, &[&[1, 1, 1]]));
        check(&cnf(1, &[&[1, 1, 1], &[-1, -1, -1]]));
        check(&cnf(3, &[&[1, 2, 3], &[-1, -2, -3], &[1, -2, 3]]));
        check(&cnf(2, &[&[1, 2, 2], &[1, -2, -2], &[-1, 2, 2], &[-1, -2, -2]]));
        assert!(gadget_sat_subset(&cnf(1, &[&[1]])).is_err());
    }

    #[test]
    fn declared_classes_hold() {
        let f = cnf(2, &[&[1, -2, 2]]);
        for (g, enc) in [
            (gadget_sat_subset(&f).unwrap(), Encoding::Value),
            (gadget_sat_superset(&f).unwrap(), Encoding::Value),
            (gadget_sat_update(&f).unwrap(), Encoding::Chosen),
        ] {
            let samples: Vec<DataGraph> = f.assignments().map(|a| assignment_graph(&f, &a, true, enc)).collect();
            assert!(validate_class(&g.pudg.model, &samples));
        }
        let update = gadget_sat_update(&f).unwrap().pudg.model;
        let wrong = update.with_restriction(Restriction::NodeUpdate {
            max_updates: None,
            f: KDataPrior::identity(),
        });
        let samples = vec![assignment_graph(&f, &[true, false], true, Encoding::Chosen)];
        assert!(!validate_class(&wrong, &samples));
    }
}
