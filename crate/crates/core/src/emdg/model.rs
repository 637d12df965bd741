//! Realization models (noisy observers) and their structural classes.

use crate::datagraph::{fresh_strings, subgraph_leq, DataGraph, DataValue, Edge, EdgeLabel, NodeId};
use crate::error::{Error, Result};
use crate::rational::{format_rational, Rational};
use num_traits::{One, Pow, Signed, Zero};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ModelClass {
    Subset,
    Superset,
    Update,
    NodeUpdate,
    General,
}

/// Candidate clean values for each observed value, at most `k` of them.
/// The observed value itself is always admissible and is not counted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KDataPrior {
    k: usize,
    map: BTreeMap<DataValue, BTreeSet<DataValue>>,
}

impl KDataPrior {
    pub fn new(k: usize, map: BTreeMap<DataValue, BTreeSet<DataValue>>) -> Result<Self> {
        for (c, vals) in &map {
            let extra = vals.iter().filter(|d| *d != c).count();
            if extra > k {
                return Err(Error::InvalidInput(format!(
                    "k-data-prior lists {extra} values for `{c}`, more than k = {k}"
                )));
            }
            if vals.iter().any(String::is_empty) {
                return Err(Error::EmptyDataValue);
            }
        }
        Ok(KDataPrior { k, map })
    }

    /// Only the observed value is admissible.
    pub fn identity() -> Self {
        KDataPrior {
            k: 0,
            map: BTreeMap::new(),
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn map(&self) -> &BTreeMap<DataValue, BTreeSet<DataValue>> {
        &self.map
    }

    /// Clean values other than `observed` itself, in sorted order.
    pub fn alternatives(&self, observed: &str) -> Vec<&DataValue> {
        self.map
            .get(observed)
            .map(|s| s.iter().filter(|d| d.as_str() != observed).collect())
            .unwrap_or_default()
    }

    pub fn allows(&self, observed: &str, clean: &str) -> bool {
        observed == clean || self.map.get(observed).is_some_and(|s| s.contains(clean))
    }

    /// Observed values that may stand for `clean`, excluding `clean` itself.
    pub fn confusers(&self, clean: &str) -> Vec<&DataValue> {
        self.map
            .iter()
            .filter(|(c, s)| c.as_str() != clean && s.contains(clean))
            .map(|(c, _)| c)
            .collect()
    }
}

/// The observer's structural restriction together with the parameters that
/// bound its cosupport. `None` bounds mean "unbounded".
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Restriction {
    /// Observed ⊆ clean: the observer only deletes.
    Subset {
        max_added_edges: Option<usize>,
        node_deletions: bool,
    },
    /// Observed ⊇ clean: the observer only adds.
    Superset {
        max_removed: Option<usize>,
        node_additions: bool,
    },
    /// Same nodes and edges, data values rewritten per `f`.
    NodeUpdate {
        max_updates: Option<usize>,
        f: KDataPrior,
    },
    /// Same nodes, same number of labels between every pair; data rewritten
    /// per `f`.
    Update {
        max_relabeled_pairs: Option<usize>,
        max_updates: Option<usize>,
        f: KDataPrior,
    },
    General,
}

impl Restriction {
    pub fn subset() -> Self {
        Restriction::Subset {
            max_added_edges: None,
            node_deletions: false,
        }
    }

    pub fn superset() -> Self {
        Restriction::Superset {
            max_removed: None,
            node_additions: false,
        }
    }

    pub fn klass(&self) -> ModelClass {
        match self {
            Restriction::Subset { .. } => ModelClass::Subset,
            Restriction::Superset { .. } => ModelClass::Superset,
            Restriction::NodeUpdate { .. } => ModelClass::NodeUpdate,
            Restriction::Update { .. } => ModelClass::Update,
            Restriction::General => ModelClass::General,
        }
    }

    /// Whether `(clean, observed)` is allowed, parameters included.
    pub fn admits(&self, clean: &DataGraph, observed: &DataGraph) -> bool {
        if clean.alphabet() != observed.alphabet() {
            return false;
        }
        match self {
            Restriction::Subset {
                max_added_edges,
                node_deletions,
            } => {
                if !subgraph_leq(observed, clean).unwrap_or(false) {
                    return false;
                }
                if !node_deletions && clean.node_count() != observed.node_count() {
                    return false;
                }
                max_added_edges.map_or(true, |k| clean.edge_count() - observed.edge_count() <= k)
            }
            Restriction::Superset {
                max_removed,
                node_additions,
            } => {
                if !subgraph_leq(clean, observed).unwrap_or(false) {
                    return false;
                }
                if !node_additions && clean.node_count() != observed.node_count() {
                    return false;
                }
                let removed = observed.node_count() - clean.node_count() + observed.edge_count()
                    - clean.edge_count();
                max_removed.map_or(true, |c| removed <= c)
            }
            Restriction::NodeUpdate { max_updates, f } => {
                clean.edges() == observed.edges() && data_ok(clean, observed, *max_updates, f)
            }
            Restriction::Update {
                max_relabeled_pairs,
                max_updates,
                f,
            } => {
                let Some(changed) = relabeled_pairs(clean, observed) else {
                    return false;
                };
                max_relabeled_pairs.map_or(true, |k| changed <= k)
                    && data_ok(clean, observed, *max_updates, f)
            }
            Restriction::General => true,
        }
    }
}

/// Same node set; every changed value allowed by `f`; at most `z` changes.
fn data_ok(clean: &DataGraph, observed: &DataGraph, z: Option<usize>, f: &KDataPrior) -> bool {
    if !clean.nodes().eq(observed.nodes()) {
        return false;
    }
    let mut changes = 0;
    for (v, c) in observed.data_map() {
        let d = clean.data(*v).expect("same node set");
        if d != c {
            if !f.allows(c, d) {
                return false;
            }
            changes += 1;
        }
    }
    z.map_or(true, |z| changes <= z)
}

fn label_sets(g: &DataGraph) -> BTreeMap<(NodeId, NodeId), BTreeSet<&str>> {
    let mut out: BTreeMap<(NodeId, NodeId), BTreeSet<&str>> = BTreeMap::new();
    for e in g.edges() {
        out.entry((e.from, e.to)).or_default().insert(&e.label);
    }
    out
}

/// Number of node pairs whose label sets differ, or `None` if some pair's
/// label count changes or the node sets differ.
pub(crate) fn relabeled_pairs(clean: &DataGraph, observed: &DataGraph) -> Option<usize> {
    if !clean.nodes().eq(observed.nodes()) {
        return None;
    }
    let (a, b) = (label_sets(clean), label_sets(observed));
    if !a.keys().eq(b.keys()) {
        return None;
    }
    let mut changed = 0;
    for (k, la) in &a {
        let lb = &b[k];
        if la.len() != lb.len() {
            return None;
        }
        if la != lb {
            changed += 1;
        }
    }
    Some(changed)
}

/// The class property alone, without parameters.
pub fn class_holds(klass: ModelClass, clean: &DataGraph, observed: &DataGraph) -> bool {
    if clean.alphabet() != observed.alphabet() {
        return false;
    }
    match klass {
        ModelClass::Subset => subgraph_leq(observed, clean).unwrap_or(false),
        ModelClass::Superset => subgraph_leq(clean, observed).unwrap_or(false),
        ModelClass::NodeUpdate => {
            clean.nodes().eq(observed.nodes()) && clean.edges() == observed.edges()
        }
        ModelClass::Update => relabeled_pairs(clean, observed).is_some(),
        ModelClass::General => true,
    }
}

pub type LikelihoodFn = dyn Fn(&DataGraph, &DataGraph) -> Rational + Send + Sync;

/// A noisy observer: `weight(clean, observed)` is the probability that
/// `clean` is observed as `observed`.
#[derive(Clone)]
pub struct RealizationModel {
    name: String,
    restriction: Restriction,
    raw: Arc<LikelihoodFn>,
}

impl fmt::Debug for RealizationModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RealizationModel")
            .field("name", &self.name)
            .field("restriction", &self.restriction)
            .finish()
    }
}

impl RealizationModel {
    pub fn new(
        name: impl Into<String>,
        restriction: Restriction,
        weight: impl Fn(&DataGraph, &DataGraph) -> Rational + Send + Sync + 'static,
    ) -> Self {
        RealizationModel {
            name: name.into(),
            restriction,
            raw: Arc::new(weight),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn restriction(&self) -> &Restriction {
        &self.restriction
    }

    pub fn klass(&self) -> ModelClass {
        self.restriction.klass()
    }

    /// Same weights under a different declared restriction.
    pub fn with_restriction(&self, restriction: Restriction) -> Self {
        RealizationModel {
            restriction,
            ..self.clone()
        }
    }

    /// Zero whenever the declared restriction rejects the pair.
    pub fn weight(&self, clean: &DataGraph, observed: &DataGraph) -> Rational {
        if self.restriction.admits(clean, observed) {
            (self.raw)(clean, observed)
        } else {
            Rational::zero()
        }
    }

    /// The weight function as supplied, ignoring the declared restriction.
    pub fn raw_weight(&self, clean: &DataGraph, observed: &DataGraph) -> Rational {
        (self.raw)(clean, observed)
    }
}

fn check_probability(p: &Rational, what: &str) -> Result<()> {
    if !p.is_positive() || p >= &Rational::one() {
        return Err(Error::InvalidInput(format!(
            "{what} must lie strictly between 0 and 1, got {}",
            format_rational(p)
        )));
    }
    Ok(())
}

fn same_nodes_and_data(a: &DataGraph, b: &DataGraph) -> bool {
    a.alphabet() == b.alphabet() && a.data_map() == b.data_map()
}

/// Each edge is dropped independently with probability `p`.
pub fn edge_deletion(p: Rational) -> Result<RealizationModel> {
    check_probability(&p, "deletion probability")?;
    let keep = Rational::one() - &p;
    Ok(RealizationModel::new("edge_deletion", Restriction::subset(), move |clean, obs| {
        if !same_nodes_and_data(clean, obs) || !obs.edges().is_subset(clean.edges()) {
            return Rational::zero();
        }
        let deleted = (clean.edge_count() - obs.edge_count()) as u32;
        Pow::pow(&p, deleted) * Pow::pow(&keep, obs.edge_count() as u32)
    }))
}

/// Edges labeled `ℓ` are dropped with probability `p[ℓ]`; labels without an
/// entry are never dropped.
pub fn edge_deletion_per_label(p: BTreeMap<EdgeLabel, Rational>) -> Result<RealizationModel> {
    for (l, q) in &p {
        check_probability(q, &format!("deletion probability of `{l}`"))?;
    }
    Ok(RealizationModel::new(
        "edge_deletion_per_label",
        Restriction::subset(),
        move |clean, obs| {
            if !same_nodes_and_data(clean, obs) || !obs.edges().is_subset(clean.edges()) {
                return Rational::zero();
            }
            let mut w = Rational::one();
            for e in clean.edges() {
                let q = p.get(&e.label);
                let kept = obs.edges().contains(e);
                match (q, kept) {
                    (Some(q), true) => w *= Rational::one() - q,
                    (Some(q), false) => w *= q,
                    (None, true) => {}
                    (None, false) => return Rational::zero(),
                }
            }
            w
        },
    ))
}

/// Every sub-graph on the same nodes equally likely: `1 / 2^{|E|}`.
pub fn uniform_subset() -> RealizationModel {
    let mut m = edge_deletion(Rational::new(1.into(), 2.into())).expect("1/2 is a probability");
    m.name = "uniform_subset".into();
    m
}

/// Each absent edge is added independently with probability `p`.
pub fn edge_addition(p: Rational) -> Result<RealizationModel> {
    check_probability(&p, "addition probability")?;
    let skip = Rational::one() - &p;
    Ok(RealizationModel::new("edge_addition", Restriction::superset(), move |clean, obs| {
        if !same_nodes_and_data(clean, obs) || !clean.edges().is_subset(obs.edges()) {
            return Rational::zero();
        }
        let n = clean.node_count() as u64;
        let possible = clean.alphabet().len() as u64 * n * n;
        let added = (obs.edge_count() - clean.edge_count()) as u32;
        let still_absent = (possible - obs.edge_count() as u64) as u32;
        Pow::pow(&p, added) * Pow::pow(&skip, still_absent)
    }))
}

/// Every super-graph on the same nodes equally likely:
/// `2^{-(|Σ_e|·n² − |E|)}`.
pub fn uniform_superset() -> RealizationModel {
    let mut m = edge_addition(Rational::new(1.into(), 2.into())).expect("1/2 is a probability");
    m.name = "uniform_superset".into();
    m
}

/// Each node whose clean value `c` has confusers (observed values `c'`
/// with `c ∈ f(c')`) is corrupted with probability `q`, showing one of them
/// uniformly at random. Nodes without confusers are always observed as is.
pub fn data_update(q: Rational, f: KDataPrior, max_updates: Option<usize>) -> Result<RealizationModel> {
    check_probability(&q, "update probability")?;
    let restriction = Restriction::NodeUpdate {
        max_updates,
        f: f.clone(),
    };
    Ok(RealizationModel::new("data_update", restriction, move |clean, obs| {
        if !class_holds(ModelClass::NodeUpdate, clean, obs) {
            return Rational::zero();
        }
        let mut w = Rational::one();
        for (v, c) in clean.data_map() {
            let seen = obs.data(*v).expect("same node set");
            let confusers = f.confusers(c);
            if seen == c {
                if !confusers.is_empty() {
                    w *= Rational::one() - &q;
                }
            } else if confusers.iter().any(|d| *d == seen) {
                w *= &q / Rational::from_integer(confusers.len().into());
            } else {
                return Rational::zero();
            }
        }
        w
    }))
}

/// Observations used to probe a model's class: sub- and super-graphs, data
/// changes, label swaps, node deletions and additions.
fn probes(g: &DataGraph) -> Vec<DataGraph> {
    let mut out = vec![g.clone()];
    let edges: Vec<&Edge> = g.edges().iter().collect();
    if edges.len() <= 10 {
        for mask in 0u32..(1 << edges.len()) {
            let removed: Vec<&Edge> = (0..edges.len())
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| edges[i])
                .collect();
            out.push(g.without_edges(removed));
        }
    } else {
        for e in &edges {
            out.push(g.without_edges([*e]));
        }
    }
    let absent = g.absent_edges();
    for e in &absent {
        out.push(g.with_edges([e]).expect("absent edges are valid"));
    }
    if !absent.is_empty() {
        out.push(g.with_edges(&absent).expect("absent edges are valid"));
    }
    let mut values: BTreeSet<String> = g.data_values().into_iter().map(String::from).collect();
    values.extend(fresh_strings(g.data_values(), 1));
    for v in g.nodes() {
        for d in &values {
            if g.data(v) != Some(d) {
                out.push(g.with_data(v, d.clone()).expect("node exists"));
            }
        }
    }
    for e in &edges {
        for l in g.alphabet() {
            if !g.has_edge(e.from, l, e.to) {
                let swapped = Edge::new(e.from, l.clone(), e.to);
                out.push(
                    g.without_edges([*e])
                        .with_edges([&swapped])
                        .expect("label is declared"),
                );
            }
        }
    }
    for v in g.nodes() {
        out.push(g.without_nodes(&BTreeSet::from([v])));
    }
    let fresh = fresh_strings(g.data_values(), 1).remove(0);
    out.push(g.with_node(g.next_node_id(), fresh).expect("id is unused"));
    out.sort();
    out.dedup();
    out
}

/// Checks the declared class property on every probe observation of every
/// sample that the raw weight function gives positive mass.
pub fn validate_class(model: &RealizationModel, samples: &[DataGraph]) -> bool {
    samples.iter().all(|clean| {
        probes(clean).iter().all(|obs| {
            !model.raw_weight(clean, obs).is_positive() || class_holds(model.klass(), clean, obs)
        })
    })
}
