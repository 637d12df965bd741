//! Fewest-distinct-values cleaning, which is minimum hitting set.

use crate::datagraph::{DataGraph, DataValue, Edge, EdgeLabel, NodeId};
use crate::error::{Error, Result};
use std::collections::{BTreeMap, BTreeSet};

/// Default exactness cap on `Σ |X_v|`.
pub const EXACT_CAP: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HittingSet<T> {
    pub set: BTreeSet<T>,
    /// `false` when the greedy fallback was used.
    pub exact: bool,
}

fn greedy<T: Ord + Clone>(sets: &[BTreeSet<T>]) -> BTreeSet<T> {
    let mut open: Vec<&BTreeSet<T>> = sets.iter().collect();
    let mut chosen = BTreeSet::new();
    while !open.is_empty() {
        let mut counts: BTreeMap<&T, usize> = BTreeMap::new();
        for s in &open {
            for x in s.iter() {
                *counts.entry(x).or_default() += 1;
            }
        }
        // most covering, smallest on ties
        let best = counts
            .iter()
            .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0)))
            .map(|(x, _)| (*x).clone())
            .expect("open sets are non-empty");
        open.retain(|s| !s.contains(&best));
        chosen.insert(best);
    }
    chosen
}

struct Search<'a, T> {
    sets: &'a [BTreeSet<T>],
    best: BTreeSet<T>,
}

impl<'a, T: Ord + Clone> Search<'a, T> {
    /// Size of a greedily built family of pairwise disjoint open sets: any
    /// hitting set needs one distinct element per member.
    fn packing_bound(&self, open: &[usize]) -> usize {
        let mut seen: BTreeSet<&T> = BTreeSet::new();
        let mut order = open.to_vec();
        order.sort_by_key(|&i| self.sets[i].len());
        let mut count = 0;
        for i in order {
            if self.sets[i].iter().all(|x| !seen.contains(x)) {
                seen.extend(self.sets[i].iter());
                count += 1;
            }
        }
        count
    }

    fn go(&mut self, chosen: &mut BTreeSet<T>, open: Vec<usize>) {
        if open.is_empty() {
            if chosen.len() < self.best.len() {
                self.best = chosen.clone();
            }
            return;
        }
        if chosen.len() + self.packing_bound(&open) >= self.best.len() {
            return;
        }
        let pivot = *open
            .iter()
            .min_by_key(|&&i| self.sets[i].len())
            .expect("non-empty");
        for x in self.sets[pivot].clone() {
            let rest: Vec<usize> = open
                .iter()
                .copied()
                .filter(|&i| !self.sets[i].contains(&x))
                .collect();
            chosen.insert(x.clone());
            self.go(chosen, rest);
            chosen.remove(&x);
        }
    }
}

/// Minimum hitting set by branch and bound when `Σ|S| ≤ cap`, greedy
/// otherwise.
pub fn min_hitting_set<T: Ord + Clone>(sets: &[BTreeSet<T>], cap: usize) -> Result<HittingSet<T>> {
    if sets.iter().any(BTreeSet::is_empty) {
        return Err(Error::InvalidInput("cannot hit an empty set".into()));
    }
    let start = greedy(sets);
    let total: usize = sets.iter().map(BTreeSet::len).sum();
    if total > cap {
        return Ok(HittingSet {
            set: start,
            exact: false,
        });
    }
    let mut s = Search { sets, best: start };
    s.go(&mut BTreeSet::new(), (0..sets.len()).collect());
    Ok(HittingSet {
        set: s.best,
        exact: true,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinDistinct {
    pub graph: DataGraph,
    pub assignment: BTreeMap<NodeId, DataValue>,
    pub values: BTreeSet<DataValue>,
    pub exact: bool,
}

/// Picks each node's value from `X_v` using as few distinct values as
/// possible. A node keeps its observed value when that is among the chosen
/// ones. Nodes without an entry keep their value, which joins the hit set.
pub fn clean_min_distinct(
    observed: &DataGraph,
    x: &BTreeMap<NodeId, BTreeSet<DataValue>>,
    cap: usize,
) -> Result<MinDistinct> {
    let mut sets = Vec::new();
    let mut order = Vec::new();
    for v in observed.nodes() {
        let current = observed.data(v).expect("node exists");
        let allowed = match x.get(&v) {
            Some(s) => s.clone(),
            None => BTreeSet::from([current.clone()]),
        };
        if allowed.iter().any(String::is_empty) {
            return Err(Error::EmptyDataValue);
        }
        sets.push(allowed);
        order.push((v, current));
    }
    for v in x.keys() {
        if !observed.contains_node(*v) {
            return Err(Error::MissingNode(*v));
        }
    }
    let hit = min_hitting_set(&sets, cap)?;
    let mut assignment = BTreeMap::new();
    for ((v, current), allowed) in order.iter().zip(&sets) {
        let pick = if allowed.contains(*current) && hit.set.contains(*current) {
            (*current).clone()
        } else {
            allowed
                .iter()
                .find(|d| hit.set.contains(*d))
                .expect("hitting set meets every set")
                .clone()
        };
        assignment.insert(*v, pick);
    }
    let values = assignment.values().cloned().collect();
    Ok(MinDistinct {
        graph: observed.with_data_map(&assignment)?,
        assignment,
        values,
        exact: hit.exact,
    })
}

/// Edge-label variant: each edge picks its label from `X_e`, minimizing the
/// number of distinct labels. Returns the relabeled graph (edges that end up
/// identical merge) and whether the answer is exact.
pub fn clean_min_distinct_labels(
    observed: &DataGraph,
    x: &BTreeMap<Edge, BTreeSet<EdgeLabel>>,
    cap: usize,
) -> Result<(DataGraph, BTreeSet<EdgeLabel>, bool)> {
    let edges: Vec<&Edge> = observed.edges().iter().collect();
    let sets: Vec<BTreeSet<EdgeLabel>> = edges
        .iter()
        .map(|e| x.get(*e).cloned().unwrap_or_else(|| BTreeSet::from([e.label.clone()])))
        .collect();
    for (e, s) in x {
        if !observed.edges().contains(e) {
            return Err(Error::InvalidInput(format!("{e:?} is not an edge")));
        }
        if let Some(l) = s.iter().find(|l| !observed.alphabet().contains(*l)) {
            return Err(Error::UnknownLabel(l.clone()));
        }
    }
    let hit = min_hitting_set(&sets, cap)?;
    let relabeled: Vec<Edge> = edges
        .iter()
        .zip(&sets)
        .map(|(e, s)| {
            let label = if s.contains(&e.label) && hit.set.contains(&e.label) {
                e.label.clone()
            } else {
                s.iter().find(|l| hit.set.contains(*l)).expect("hit").clone()
            };
            Edge::new(e.from, label, e.to)
        })
        .collect();
    let all: Vec<&Edge> = observed.edges().iter().collect();
    let g = observed.without_edges(all).with_edges(&relabeled)?;
    let used = relabeled.into_iter().map(|e| e.label).collect();
    Ok((g, used, hit.exact))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn set(xs: &[&str]) -> BTreeSet<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn examples() {
        let g = DataGraph::builder(["a"]).node(1, "p").node(2, "q").build().unwrap();
        let all_c = BTreeMap::from([(1, set(&["c"])), (2, set(&["c"]))]);
        let r = clean_min_distinct(&g, &all_c, EXACT_CAP).unwrap();
        assert_eq!(r.values, set(&["c"]));
        let pair = BTreeMap::from([(1, set(&["a", "b"])), (2, set(&["b", "c"]))]);
        let r = clean_min_distinct(&g, &pair, EXACT_CAP).unwrap();
        assert_eq!(r.values, set(&["b"]));
        assert!(r.exact);
        let r = clean_min_distinct(&g, &pair, 1).unwrap();
        assert!(!r.exact);
    }

    #[test]
    fn label_variant() {
        let g = DataGraph::builder(["a", "b", "c"])
            .node(1, "p")
            .node(2, "q")
            .edge(1, "a", 2)
            .edge(2, "c", 1)
            .build()
            .unwrap();
        let x = BTreeMap::from([
            (Edge::new(1, "a", 2), set(&["a", "b"])),
            (Edge::new(2, "c", 1), set(&["b", "c"])),
        ]);
        let (h, used, exact) = clean_min_distinct_labels(&g, &x, EXACT_CAP).unwrap();
        assert_eq!(used, set(&["b"]));
        assert!(exact);
        assert!(h.has_edge(1, "b", 2) && h.has_edge(2, "b", 1));
    }

    fn brute(sets: &[BTreeSet<u8>]) -> usize {
        let universe: Vec<u8> = sets.iter().flatten().copied().collect::<BTreeSet<_>>().into_iter().collect();
        (0u32..1 << universe.len())
            .filter(|mask| {
                sets.iter()
                    .all(|s| (0..universe.len()).any(|i| mask >> i & 1 == 1 && s.contains(&universe[i])))
            })
            .map(|m| m.count_ones() as usize)
            .min()
            .unwrap()
    }

    proptest! {
        #[test]
        fn exact_matches_brute_force(sets in proptest::collection::vec(proptest::collection::btree_set(0u8..8, 1..=3), 1..=10)) {
            let r = min_hitting_set(&sets, EXACT_CAP).unwrap();
            prop_assert!(r.exact);
            prop_assert!(sets.iter().all(|s| s.iter().any(|x| r.set.contains(x))));
            prop_assert_eq!(r.set.len(), brute(&sets));
        }
    }
}
