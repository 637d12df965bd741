//! Matching-based cleaners for node-update observers: the fixed-alphabet
//! assignment (rooks placement) and cardinality targets.

use super::hungarian::{assign, Product};
use crate::datagraph::{fresh_strings, DataGraph, DataValue, NodeId};
use crate::error::{Error, Result};
use crate::rational::Rational;
use num_traits::{One, Signed};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

pub type DeltaFn = dyn Fn(&str, &str) -> u64 + Send + Sync;
pub type EnumeratorFn = dyn Fn(&str, usize) -> Vec<DataValue> + Send + Sync;

/// Cost `δ(c, d)` of an observed value `c` standing for the clean value
/// `d`, with `δ(c, c) = 0`, plus an enumerator listing candidate clean values
/// for `c` in nondecreasing cost order.
#[derive(Clone)]
pub struct TransitionCost {
    delta: Arc<DeltaFn>,
    enumerator: Arc<EnumeratorFn>,
}

impl fmt::Debug for TransitionCost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("TransitionCost")
    }
}

impl TransitionCost {
    /// `enumerator(c, len)` must return the first `len` values of an
    /// exhaustive stream sorted by `δ(c, ·)`.
    pub fn new(
        delta: impl Fn(&str, &str) -> u64 + Send + Sync + 'static,
        enumerator: impl Fn(&str, usize) -> Vec<DataValue> + Send + Sync + 'static,
    ) -> Self {
        let delta = Arc::new(delta);
        let d = delta.clone();
        TransitionCost {
            delta: Arc::new(move |a: &str, b: &str| if a == b { 0 } else { d(a, b) }),
            enumerator: Arc::new(enumerator),
        }
    }

    /// Finite universe with an explicit cost table; missing entries cost
    /// `default`.
    pub fn from_table(
        universe: impl IntoIterator<Item = DataValue>,
        table: BTreeMap<(DataValue, DataValue), u64>,
        default: u64,
    ) -> Self {
        let universe: BTreeSet<DataValue> = universe.into_iter().collect();
        let table = Arc::new(table);
        let t = table.clone();
        let delta = move |a: &str, b: &str| {
            t.get(&(a.to_string(), b.to_string())).copied().unwrap_or(default)
        };
        let delta_for_enum = delta.clone();
        TransitionCost::new(delta, move |c: &str, len: usize| {
            let mut vals: Vec<&DataValue> = universe.iter().filter(|d| d.as_str() != c).collect();
            vals.sort_by_key(|d| delta_for_enum(c, d));
            std::iter::once(c.to_string())
                .chain(vals.into_iter().cloned())
                .take(len)
                .collect()
        })
    }

    /// Every change costs 1. Over an unbounded universe the enumerator
    /// continues with generated values.
    pub fn uniform(universe: Option<Vec<DataValue>>) -> Self {
        TransitionCost::new(
            |_, _| 1,
            move |c: &str, len: usize| {
                let mut out = vec![c.to_string()];
                if let Some(u) = &universe {
                    out.extend(u.iter().filter(|d| d.as_str() != c).cloned());
                    out.dedup();
                } else {
                    out.extend(fresh_strings([c], len.saturating_sub(1)));
                }
                out.truncate(len);
                out
            },
        )
    }

    pub fn delta(&self, from: &str, to: &str) -> u64 {
        (self.delta)(from, to)
    }

    pub fn enumerate(&self, from: &str, len: usize) -> Vec<DataValue> {
        (self.enumerator)(from, len)
    }

    /// `Σ_v δ(D_observed(v), D_clean(v))` over shared nodes.
    pub fn graph_cost(&self, observed: &DataGraph, clean: &DataGraph) -> u64 {
        observed
            .data_map()
            .iter()
            .map(|(v, c)| clean.data(*v).map_or(0, |d| self.delta(c, d)))
            .sum()
    }
}

/// Required number of nodes per data value.
pub type CardinalityTarget = BTreeMap<DataValue, usize>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixedAssignment {
    pub graph: DataGraph,
    /// Product of `w` over the nodes that were not fixed in advance.
    pub product: Rational,
}

/// Assigns the `n` values of `values` bijectively to the `n` nodes,
/// extending `known` and maximizing `Π w(value, node)` over the free nodes.
/// Zero weights are forbidden cells.
pub fn clean_fixed_assignment(
    observed: &DataGraph,
    values: &[DataValue],
    known: &BTreeMap<NodeId, DataValue>,
    w: impl Fn(&str, NodeId) -> Rational,
) -> Result<FixedAssignment> {
    let n = observed.node_count();
    let distinct: BTreeSet<&DataValue> = values.iter().collect();
    if distinct.len() != values.len() || values.len() != n {
        return Err(Error::InvalidInput(format!(
            "need exactly {n} distinct values, got {}",
            values.len()
        )));
    }
    let mut used = BTreeSet::new();
    for (v, d) in known {
        if !observed.contains_node(*v) {
            return Err(Error::MissingNode(*v));
        }
        if !distinct.contains(d) || !used.insert(d) {
            return Err(Error::InvalidInput(format!(
                "fixed value `{d}` is unknown or used twice"
            )));
        }
    }
    let free_nodes: Vec<NodeId> = observed.nodes().filter(|v| !known.contains_key(v)).collect();
    let free_values: Vec<&DataValue> = values.iter().filter(|d| !used.contains(d)).collect();
    let mut cost = Vec::with_capacity(free_nodes.len());
    for &v in &free_nodes {
        let mut row = Vec::with_capacity(free_values.len());
        for d in &free_values {
            let x = w(d, v);
            if x.is_negative() || x > Rational::one() {
                return Err(Error::InvalidInput(format!("weight of ({d}, {v}) is not in [0, 1]")));
            }
            row.push(x.is_positive().then(|| Product(x.recip())));
        }
        cost.push(row);
    }
    let perm = assign(&cost).ok_or_else(|| {
        Error::Infeasible("zero weights leave no complete assignment".into())
    })?;
    let mut data = known.clone();
    let mut product = Rational::one();
    for (i, &v) in free_nodes.iter().enumerate() {
        let d = free_values[perm[i]];
        product *= w(d, v);
        data.insert(v, d.clone());
    }
    Ok(FixedAssignment {
        graph: observed.with_data_map(&data)?,
        product,
    })
}

/// Re-labels nodes so that value `c` appears exactly `T(c)` times, with
/// minimum total `δ(observed, clean)`.
pub fn clean_cardinality(
    observed: &DataGraph,
    target: &CardinalityTarget,
    delta: &TransitionCost,
) -> Result<(DataGraph, u64)> {
    let n = observed.node_count();
    let total: usize = target.values().sum();
    if total != n {
        return Err(Error::InvalidInput(format!(
            "cardinality target sums to {total}, the graph has {n} nodes"
        )));
    }
    if target.keys().any(String::is_empty) {
        return Err(Error::EmptyDataValue);
    }
    // one column per copy u_{c,i}; copies of the same value share costs
    let columns: Vec<&DataValue> = target
        .iter()
        .flat_map(|(c, &k)| std::iter::repeat(c).take(k))
        .collect();
    let rows: Vec<(NodeId, &DataValue)> = observed.data_map().iter().map(|(v, d)| (*v, d)).collect();
    let mut cost = Vec::with_capacity(n);
    for (_, d) in &rows {
        let mut by_value: BTreeMap<&DataValue, i64> = BTreeMap::new();
        let row = columns
            .iter()
            .map(|c| {
                let x = *by_value
                    .entry(c)
                    .or_insert_with(|| i64::try_from(delta.delta(d, c)).unwrap_or(i64::MAX / 4));
                Some(x)
            })
            .collect();
        cost.push(row);
    }
    let perm = assign(&cost).expect("complete bipartite graphs have perfect matchings");
    let mut data = BTreeMap::new();
    let mut total_cost = 0u64;
    for (i, (v, d)) in rows.iter().enumerate() {
        let c = columns[perm[i]];
        total_cost += delta.delta(d, c);
        data.insert(*v, c.clone());
    }
    Ok((observed.with_data_map(&data)?, total_cost))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;

    fn nodes(data: &[&str]) -> DataGraph {
        let mut b = DataGraph::builder(["a"]);
        for (i, d) in data.iter().enumerate() {
            b = b.node(i as u64 + 1, *d);
        }
        b.build().unwrap()
    }

    #[test]
    fn single_node_assignment() {
        let g = nodes(&["?"]);
        let r = clean_fixed_assignment(&g, &["c".into()], &BTreeMap::new(), |_, _| Rational::one()).unwrap();
        assert_eq!(r.graph.data(1).unwrap(), "c");
    }

    #[test]
    fn two_by_two_diagonal() {
        let g = nodes(&["?", "?"]);
        let w = |d: &str, v: NodeId| match (d, v) {
            ("p", 1) => frac(9, 10),
            ("p", 2) => frac(1, 10),
            ("q", 1) => frac(2, 10),
            _ => frac(8, 10),
        };
        let r = clean_fixed_assignment(&g, &["p".into(), "q".into()], &BTreeMap::new(), w).unwrap();
        assert_eq!(r.product, frac(72, 100));
        assert_eq!(r.graph.data(1).unwrap(), "p");
        let known = BTreeMap::from([(1, "q".to_string())]);
        let r = clean_fixed_assignment(&g, &["p".into(), "q".into()], &known, w).unwrap();
        assert_eq!(r.product, frac(1, 10));
    }

    #[test]
    fn zero_rows_are_infeasible() {
        let g = nodes(&["?", "?"]);
        let w = |d: &str, _| if d == "p" { Rational::one() } else { Rational::from_integer(0.into()) };
        let r = clean_fixed_assignment(&g, &["p".into(), "q".into()], &BTreeMap::new(), w);
        assert!(matches!(r, Err(Error::Infeasible(_))));
    }

    #[test]
    fn cardinality_flip() {
        let g = nodes(&["a", "a"]);
        let delta = TransitionCost::from_table(
            ["a".to_string(), "b".to_string()],
            BTreeMap::from([(("a".into(), "b".into()), 3), (("b".into(), "a".into()), 1)]),
            100,
        );
        let t = BTreeMap::from([("a".to_string(), 1), ("b".to_string(), 1)]);
        let (h, cost) = clean_cardinality(&g, &t, &delta).unwrap();
        assert_eq!(cost, 3);
        assert_eq!(h.data_values().len(), 2);
        let same = BTreeMap::from([("a".to_string(), 2)]);
        let (h, cost) = clean_cardinality(&g, &same, &delta).unwrap();
        assert_eq!((h, cost), (g, 0));
    }

    #[test]
    fn enumerators_are_sorted() {
        let delta = TransitionCost::from_table(
            ["a".to_string(), "b".to_string(), "c".to_string()],
            BTreeMap::from([(("a".into(), "c".into()), 1)]),
            5,
        );
        assert_eq!(delta.enumerate("a", 3), vec!["a", "c", "b"]);
        let u = TransitionCost::uniform(None);
        let e = u.enumerate("x", 4);
        assert_eq!(e.len(), 4);
        assert_eq!(e[0], "x");
    }
}
