//! Enumeration of the clean graphs that an observer could have turned into a
//! given observation.

use super::model::{KDataPrior, RealizationModel, Restriction};
use super::Budget;
use crate::datagraph::{DataGraph, Edge, NodeId};
use crate::error::{Error, Result};
use itertools::Itertools;
use num_bigint::BigUint;
use num_integer::binomial;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use std::collections::{BTreeMap, BTreeSet};

struct Tally<'a> {
    out: Vec<DataGraph>,
    budget: &'a Budget,
    what: &'static str,
}

impl<'a> Tally<'a> {
    fn new(budget: &'a Budget, what: &'static str) -> Self {
        Tally {
            out: Vec::new(),
            budget,
            what,
        }
    }

    fn push(&mut self, g: DataGraph) -> Result<()> {
        if self.out.len() as u64 >= self.budget.max_candidates {
            return Err(Error::budget(
                self.what,
                format!("more than {}", self.budget.max_candidates),
                self.budget.max_candidates,
            ));
        }
        self.out.push(g);
        Ok(())
    }

    fn finish(mut self) -> Vec<DataGraph> {
        self.out.sort();
        self.out.dedup();
        self.out
    }
}

fn check_exponent(items: usize, budget: &Budget, what: &str) -> Result<()> {
    if items as u64 > budget.exponent_cap as u64 {
        return Err(Error::budget(
            format!("unbounded {what} enumeration over {items} items"),
            format!("2^{items} candidates"),
            format!("2^{}", budget.exponent_cap),
        ));
    }
    Ok(())
}

/// Every graph the restriction admits for `observed`, before any weights
/// are consulted. Canonical order, no duplicates.
pub fn candidates(restriction: &Restriction, observed: &DataGraph, budget: &Budget) -> Result<Vec<DataGraph>> {
    match restriction {
        Restriction::Subset {
            max_added_edges,
            node_deletions,
        } => {
            if *node_deletions {
                return Err(Error::Unsupported(
                    "subset observers that delete nodes need a prior with a support enumerator".into(),
                ));
            }
            let absent = observed.absent_edges();
            let k = match max_added_edges {
                Some(k) => (*k).min(absent.len()),
                None => {
                    check_exponent(absent.len(), budget, "subset")?;
                    absent.len()
                }
            };
            let mut t = Tally::new(budget, "subset cosupport");
            for size in 0..=k {
                for added in absent.iter().combinations(size) {
                    t.push(observed.with_edges(added)?)?;
                }
            }
            Ok(t.finish())
        }
        Restriction::Superset {
            max_removed,
            node_additions,
        } => {
            let nodes: Vec<NodeId> = if *node_additions {
                observed.nodes().collect()
            } else {
                Vec::new()
            };
            if max_removed.is_none() {
                check_exponent(nodes.len() + observed.edge_count(), budget, "superset")?;
            }
            let cap = max_removed.unwrap_or(usize::MAX);
            let mut t = Tally::new(budget, "superset cosupport");
            for size in 0..=nodes.len().min(cap) {
                for gone in nodes.iter().combinations(size) {
                    let gone: BTreeSet<NodeId> = gone.into_iter().copied().collect();
                    let base = observed.without_nodes(&gone);
                    let used = gone.len() + observed.edge_count() - base.edge_count();
                    if used > cap {
                        continue;
                    }
                    let edges: Vec<&Edge> = base.edges().iter().collect();
                    let left = (cap - used).min(edges.len());
                    for k in 0..=left {
                        for removed in edges.iter().combinations(k) {
                            t.push(base.without_edges(removed.into_iter().copied()))?;
                        }
                    }
                }
            }
            Ok(t.finish())
        }
        Restriction::NodeUpdate { max_updates, f } => {
            let mut t = Tally::new(budget, "node-update cosupport");
            data_variants(observed, f, *max_updates, &mut t)?;
            Ok(t.finish())
        }
        Restriction::Update {
            max_relabeled_pairs,
            max_updates,
            f,
        } => {
            let pairs = relabel_options(observed);
            let mut t = Tally::new(budget, "update cosupport");
            let mut chosen: Vec<(usize, usize)> = Vec::new();
            relabel_dfs(
                observed,
                &pairs,
                0,
                max_relabeled_pairs.unwrap_or(usize::MAX),
                &mut chosen,
                &mut |g: DataGraph, t: &mut Tally| data_variants(&g, f, *max_updates, t),
                &mut t,
            )?;
            Ok(t.finish())
        }
        Restriction::General => Err(Error::Unsupported(
            "a general observer has no cosupport enumerator; supply a prior with one".into(),
        )),
    }
}

/// All re-assignments of at most `z` data values allowed by `f`.
fn data_variants(g: &DataGraph, f: &KDataPrior, z: Option<usize>, t: &mut Tally) -> Result<()> {
    let options: Vec<(NodeId, Vec<String>)> = g
        .data_map()
        .iter()
        .map(|(v, c)| (*v, f.alternatives(c).into_iter().cloned().collect()))
        .filter(|(_, alts): &(NodeId, Vec<String>)| !alts.is_empty())
        .collect();
    let z = z.unwrap_or(usize::MAX);
    let mut updates = BTreeMap::new();
    fn go(
        g: &DataGraph,
        options: &[(NodeId, Vec<String>)],
        i: usize,
        z: usize,
        updates: &mut BTreeMap<NodeId, String>,
        t: &mut Tally,
    ) -> Result<()> {
        if i == options.len() {
            return t.push(g.with_data_map(updates)?);
        }
        go(g, options, i + 1, z, updates, t)?;
        if updates.len() < z {
            let (v, alts) = &options[i];
            for d in alts {
                updates.insert(*v, d.clone());
                go(g, options, i + 1, z, updates, t)?;
                updates.remove(v);
            }
        }
        Ok(())
    }
    go(g, &options, 0, z, &mut updates, t)
}

type PairOptions = Vec<((NodeId, NodeId), BTreeSet<String>, Vec<BTreeSet<String>>)>;

/// For each pair carrying labels: its current label set and every other
/// label set of the same size.
fn relabel_options(g: &DataGraph) -> PairOptions {
    let mut sets: BTreeMap<(NodeId, NodeId), BTreeSet<String>> = BTreeMap::new();
    for e in g.edges() {
        sets.entry((e.from, e.to)).or_default().insert(e.label.clone());
    }
    sets.into_iter()
        .map(|(pair, current)| {
            let others = g
                .alphabet()
                .iter()
                .cloned()
                .combinations(current.len())
                .map(|c| c.into_iter().collect::<BTreeSet<_>>())
                .filter(|s| *s != current)
                .collect();
            (pair, current, others)
        })
        .collect()
}

fn relabel_dfs(
    g: &DataGraph,
    pairs: &PairOptions,
    i: usize,
    k: usize,
    chosen: &mut Vec<(usize, usize)>,
    emit: &mut dyn FnMut(DataGraph, &mut Tally) -> Result<()>,
    t: &mut Tally,
) -> Result<()> {
    if i == pairs.len() {
        let mut removed = Vec::new();
        let mut added = Vec::new();
        for &(p, o) in chosen.iter() {
            let ((u, v), current, others) = &pairs[p];
            removed.extend(current.iter().map(|l| Edge::new(*u, l.clone(), *v)));
            added.extend(others[o].iter().map(|l| Edge::new(*u, l.clone(), *v)));
        }
        let h = g.without_edges(&removed).with_edges(&added)?;
        return emit(h, t);
    }
    relabel_dfs(g, pairs, i + 1, k, chosen, emit, t)?;
    if chosen.len() < k {
        for o in 0..pairs[i].2.len() {
            chosen.push((i, o));
            relabel_dfs(g, pairs, i + 1, k, chosen, emit, t)?;
            chosen.pop();
        }
    }
    Ok(())
}

/// Candidates with positive weight under `model`.
pub fn cosupport(model: &RealizationModel, observed: &DataGraph, budget: &Budget) -> Result<Vec<DataGraph>> {
    let all = candidates(model.restriction(), observed, budget)?;
    Ok(all
        .into_par_iter()
        .filter(|g| model.weight(g, observed).is_positive())
        .collect())
}

fn binomial_sum(n: usize, k: usize, base: &BigUint) -> BigUint {
    let mut total = BigUint::zero();
    let mut power = BigUint::one();
    for i in 0..=k.min(n) {
        total += binomial(BigUint::from(n), BigUint::from(i)) * &power;
        power *= base;
    }
    total
}

/// Closed-form upper bound on the number of candidates for `restriction`.
pub fn cosupport_size_bound(restriction: &Restriction, observed: &DataGraph) -> Result<BigUint> {
    let n = observed.node_count();
    let sigma = observed.alphabet().len();
    let one = BigUint::one();
    match restriction {
        Restriction::Subset {
            max_added_edges,
            node_deletions,
        } => {
            if *node_deletions {
                return Err(Error::Unsupported(
                    "node deletions make the cosupport unbounded".into(),
                ));
            }
            let missing = crate::datagraph::missing_edges(observed) as usize;
            Ok(match max_added_edges {
                Some(k) => binomial_sum(missing, *k, &one),
                None => one << missing,
            })
        }
        Restriction::Superset {
            max_removed,
            node_additions,
        } => {
            let extra = if *node_additions { n } else { 0 };
            Ok(match max_removed {
                Some(c) => binomial_sum(observed.edge_count() + extra, *c, &one),
                None => one << (n * n * sigma + extra),
            })
        }
        Restriction::NodeUpdate { max_updates, f } => Ok(binomial_sum(
            n,
            max_updates.unwrap_or(n),
            &BigUint::from(f.k()),
        )),
        Restriction::Update {
            max_relabeled_pairs,
            max_updates,
            f,
        } => {
            let pairs = relabel_options(observed);
            let widest = pairs
                .iter()
                .map(|(_, current, _)| binomial(sigma, current.len()) - 1)
                .max()
                .unwrap_or(0);
            let labels = binomial_sum(
                pairs.len(),
                max_relabeled_pairs.unwrap_or(pairs.len()),
                &BigUint::from(widest),
            );
            let data = binomial_sum(n, max_updates.unwrap_or(n), &BigUint::from(f.k()));
            Ok(labels * data)
        }
        Restriction::General => Err(Error::Unsupported(
            "a general observer has no closed-form cosupport bound".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::emdg::model::{edge_deletion, uniform_superset};
    use crate::rational::frac;

    fn path3() -> DataGraph {
        DataGraph::builder(["a"])
            .node(1, "x")
            .node(2, "y")
            .edge(1, "a", 2)
            .build()
            .unwrap()
    }

    #[test]
    fn subset_with_zero_budget_is_identity() {
        let g = path3();
        let r = Restriction::Subset {
            max_added_edges: Some(0),
            node_deletions: false,
        };
        assert_eq!(candidates(&r, &g, &Budget::default()).unwrap(), vec![g]);
    }

    #[test]
    fn subset_one_addition_over_five_missing() {
        // 2 nodes, 2 labels: 8 possible edges, 3 present, 5 missing
        let g = DataGraph::builder(["a", "b"])
            .node(1, "x")
            .node(2, "y")
            .edge(1, "a", 2)
            .edge(2, "a", 1)
            .edge(1, "b", 1)
            .build()
            .unwrap();
        let r = Restriction::Subset {
            max_added_edges: Some(1),
            node_deletions: false,
        };
        let c = candidates(&r, &g, &Budget::default()).unwrap();
        assert_eq!(c.len(), 6);
        assert!(BigUint::from(c.len()) <= cosupport_size_bound(&r, &g).unwrap());
        let m = edge_deletion(frac(1, 2)).unwrap();
        let m = m.with_restriction(r);
        assert_eq!(cosupport(&m, &g, &Budget::default()).unwrap().len(), 6);
    }

    #[test]
    fn superset_bound_is_two_to_the_n_squared() {
        let g = DataGraph::builder(["a"]).node(1, "x").node(2, "y").build().unwrap();
        assert_eq!(
            cosupport_size_bound(&Restriction::superset(), &g).unwrap(),
            BigUint::from(16u32)
        );
        let full = g.with_edges(&g.absent_edges()).unwrap();
        let c = cosupport(&uniform_superset(), &full, &Budget::default()).unwrap();
        assert_eq!(c.len(), 16);
    }

    #[test]
    fn node_update_counts() {
        let g = DataGraph::builder(["a"])
            .node(1, "c")
            .node(2, "c")
            .node(3, "c")
            .build()
            .unwrap();
        let f = KDataPrior::new(
            2,
            BTreeMap::from([(
                "c".to_string(),
                BTreeSet::from(["c".to_string(), "d".to_string()]),
            )]),
        )
        .unwrap();
        let r = Restriction::NodeUpdate {
            max_updates: Some(1),
            f: f.clone(),
        };
        let c = candidates(&r, &g, &Budget::default()).unwrap();
        assert_eq!(c.len(), 4);
        let zero = Restriction::NodeUpdate { max_updates: Some(0), f };
        assert_eq!(cosupport_size_bound(&zero, &g).unwrap(), BigUint::one());
    }

    #[test]
    fn update_relabels_preserving_counts() {
        let g = DataGraph::builder(["a", "b", "c"])
            .node(1, "x")
            .node(2, "y")
            .edge(1, "a", 2)
            .edge(2, "a", 1)
            .edge(2, "b", 1)
            .build()
            .unwrap();
        let r = Restriction::Update {
            max_relabeled_pairs: None,
            max_updates: Some(0),
            f: KDataPrior::identity(),
        };
        let c = candidates(&r, &g, &Budget::default()).unwrap();
        // pair (1,2): 3 single labels; pair (2,1): 3 label pairs
        assert_eq!(c.len(), 9);
        assert!(c.iter().all(|h| r.admits(h, &g)));
    }

    #[test]
    fn budget_is_enforced() {
        let g = DataGraph::builder(["a"]).node(1, "x").node(2, "y").build().unwrap();
        let tight = Budget {
            max_candidates: 3,
            ..Budget::default()
        };
        assert!(matches!(
            candidates(&Restriction::subset(), &g, &tight),
            Err(Error::BudgetExceeded { .. })
        ));
        let small_cap = Budget {
            exponent_cap: 2,
            ..Budget::default()
        };
        assert!(matches!(
            candidates(&Restriction::subset(), &g, &small_cap),
            Err(Error::BudgetExceeded { .. })
        ));
    }
}
