//! Finite data-graphs: nodes carrying one data value each, and labeled
//! directed edges over a declared edge alphabet.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

pub type NodeId = u64;
pub type DataValue = String;
pub type EdgeLabel = String;

/// Reserved prefix for generated values, labels and constants. Inputs are
/// free to use it; [`fresh_strings`] always checks the avoid-set.
pub const FRESH_PREFIX: &str = "#fresh";

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub from: NodeId,
    pub label: EdgeLabel,
    pub to: NodeId,
}

impl Edge {
    pub fn new(from: NodeId, label: impl Into<EdgeLabel>, to: NodeId) -> Self {
        Edge {
            from,
            label: label.into(),
            to,
        }
    }
}

/// Immutable data-graph value. Build with [`GraphBuilder`]; every operation
/// that changes a graph returns a new one.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DataGraph {
    alphabet: BTreeSet<EdgeLabel>,
    data: BTreeMap<NodeId, DataValue>,
    edges: BTreeSet<Edge>,
}

/// Canonical order: node lists, then edge lists, then data maps (in node
/// order), then alphabets. Used for every deterministic tie-break.
impl Ord for DataGraph {
    fn cmp(&self, other: &Self) -> Ordering {
        self.data
            .keys()
            .cmp(other.data.keys())
            .then_with(|| self.edges.iter().cmp(other.edges.iter()))
            .then_with(|| self.data.values().cmp(other.data.values()))
            .then_with(|| self.alphabet.cmp(&other.alphabet))
    }
}

impl PartialOrd for DataGraph {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, Debug)]
pub struct GraphBuilder {
    graph: DataGraph,
    error: Option<Error>,
}

impl GraphBuilder {
    pub fn node(mut self, id: NodeId, data: impl Into<DataValue>) -> Self {
        if self.error.is_none() {
            let data = data.into();
            if data.is_empty() {
                self.error = Some(Error::EmptyDataValue);
            } else if self.graph.data.insert(id, data).is_some() {
                self.error = Some(Error::DuplicateNode(id));
            }
        }
        self
    }

    pub fn edge(mut self, from: NodeId, label: impl Into<EdgeLabel>, to: NodeId) -> Self {
        if self.error.is_none() {
            self.graph.edges.insert(Edge::new(from, label, to));
        }
        self
    }

    pub fn build(self) -> Result<DataGraph> {
        if let Some(e) = self.error {
            return Err(e);
        }
        self.graph.validate()?;
        Ok(self.graph)
    }
}

impl DataGraph {
    pub fn builder<I, S>(alphabet: I) -> GraphBuilder
    where
        I: IntoIterator<Item = S>,
        S: Into<EdgeLabel>,
    {
        GraphBuilder {
            graph: DataGraph::empty(alphabet),
            error: None,
        }
    }

    pub fn empty<I, S>(alphabet: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<EdgeLabel>,
    {
        DataGraph {
            alphabet: alphabet.into_iter().map(Into::into).collect(),
            data: BTreeMap::new(),
            edges: BTreeSet::new(),
        }
    }

    fn validate(&self) -> Result<()> {
        for e in &self.edges {
            if !self.alphabet.contains(&e.label) {
                return Err(Error::UnknownLabel(e.label.clone()));
            }
            for end in [e.from, e.to] {
                if !self.data.contains_key(&end) {
                    return Err(Error::DanglingEndpoint(end));
                }
            }
        }
        if self.data.values().any(String::is_empty) {
            return Err(Error::EmptyDataValue);
        }
        Ok(())
    }

    pub fn alphabet(&self) -> &BTreeSet<EdgeLabel> {
        &self.alphabet
    }

    pub fn nodes(&self) -> impl ExactSizeIterator<Item = NodeId> + '_ {
        self.data.keys().copied()
    }

    pub fn node_count(&self) -> usize {
        self.data.len()
    }

    pub fn contains_node(&self, v: NodeId) -> bool {
        self.data.contains_key(&v)
    }

    pub fn data(&self, v: NodeId) -> Option<&DataValue> {
        self.data.get(&v)
    }

    pub fn data_map(&self) -> &BTreeMap<NodeId, DataValue> {
        &self.data
    }

    pub fn edges(&self) -> &BTreeSet<Edge> {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, from: NodeId, label: &str, to: NodeId) -> bool {
        self.edges.contains(&Edge::new(from, label, to))
    }

    /// Labels on the ordered pair `(from, to)` (the set `L(from, to)`).
    pub fn labels_between(&self, from: NodeId, to: NodeId) -> BTreeSet<&str> {
        self.edges
            .range(Edge::new(from, "", 0)..)
            .take_while(|e| e.from == from)
            .filter(|e| e.to == to)
            .map(|e| e.label.as_str())
            .collect()
    }

    pub fn data_values(&self) -> BTreeSet<&str> {
        self.data.values().map(String::as_str).collect()
    }

    /// Smallest id larger than every existing node id.
    pub fn next_node_id(&self) -> NodeId {
        self.data.keys().next_back().map_or(0, |m| m + 1)
    }

    /// Every `(from, label, to)` triple over the alphabet that is not an edge.
    pub fn absent_edges(&self) -> Vec<Edge> {
        let mut out = Vec::new();
        for &from in self.data.keys() {
            for label in &self.alphabet {
                for &to in self.data.keys() {
                    let e = Edge::new(from, label.clone(), to);
                    if !self.edges.contains(&e) {
                        out.push(e);
                    }
                }
            }
        }
        out
    }

    pub fn with_data(&self, v: NodeId, value: impl Into<DataValue>) -> Result<DataGraph> {
        let value = value.into();
        if value.is_empty() {
            return Err(Error::EmptyDataValue);
        }
        let mut g = self.clone();
        match g.data.get_mut(&v) {
            Some(slot) => *slot = value,
            None => return Err(Error::MissingNode(v)),
        }
        Ok(g)
    }

    /// Replaces data values for the given nodes in one step.
    pub fn with_data_map(&self, updates: &BTreeMap<NodeId, DataValue>) -> Result<DataGraph> {
        let mut g = self.clone();
        for (v, value) in updates {
            if value.is_empty() {
                return Err(Error::EmptyDataValue);
            }
            match g.data.get_mut(v) {
                Some(slot) => slot.clone_from(value),
                None => return Err(Error::MissingNode(*v)),
            }
        }
        Ok(g)
    }

    pub fn with_edges<'a>(&self, added: impl IntoIterator<Item = &'a Edge>) -> Result<DataGraph> {
        let mut g = self.clone();
        g.edges.extend(added.into_iter().cloned());
        g.validate()?;
        Ok(g)
    }

    pub fn without_edges<'a>(&self, removed: impl IntoIterator<Item = &'a Edge>) -> DataGraph {
        let mut g = self.clone();
        for e in removed {
            g.edges.remove(e);
        }
        g
    }

    /// Drops the given nodes together with their incident edges.
    pub fn without_nodes(&self, removed: &BTreeSet<NodeId>) -> DataGraph {
        let mut g = self.clone();
        g.data.retain(|v, _| !removed.contains(v));
        g.edges
            .retain(|e| !removed.contains(&e.from) && !removed.contains(&e.to));
        g
    }

    /// Sub-graph induced by `keep`.
    pub fn induced(&self, keep: &BTreeSet<NodeId>) -> DataGraph {
        let mut g = self.clone();
        g.data.retain(|v, _| keep.contains(v));
        g.edges
            .retain(|e| keep.contains(&e.from) && keep.contains(&e.to));
        g
    }

    pub fn with_alphabet<I, S>(&self, extra: I) -> DataGraph
    where
        I: IntoIterator<Item = S>,
        S: Into<EdgeLabel>,
    {
        let mut g = self.clone();
        g.alphabet.extend(extra.into_iter().map(Into::into));
        g
    }

    pub fn with_node(&self, id: NodeId, value: impl Into<DataValue>) -> Result<DataGraph> {
        let value = value.into();
        if value.is_empty() {
            return Err(Error::EmptyDataValue);
        }
        if self.data.contains_key(&id) {
            return Err(Error::DuplicateNode(id));
        }
        let mut g = self.clone();
        g.data.insert(id, value);
        Ok(g)
    }
}

/// `g ⊆ h`: nodes, edges and shared data all agree.
pub fn subgraph_leq(g: &DataGraph, h: &DataGraph) -> Result<bool> {
    if g.alphabet != h.alphabet {
        return Err(Error::AlphabetMismatch);
    }
    let nodes_ok = g
        .data
        .iter()
        .all(|(v, d)| h.data.get(v).is_some_and(|hd| hd == d));
    Ok(nodes_ok && g.edges.is_subset(&h.edges))
}

/// Same nodes and labeled edges; data values are ignored.
pub fn equiv_up_to_data(g: &DataGraph, h: &DataGraph) -> bool {
    g.data.keys().eq(h.data.keys()) && g.edges == h.edges
}

/// `|Σ_e|·n² − |E|`.
pub fn missing_edges(g: &DataGraph) -> u64 {
    let n = g.node_count() as u64;
    g.alphabet.len() as u64 * n * n - g.edge_count() as u64
}

/// `count` strings starting with [`FRESH_PREFIX`] that avoid every member
/// of `avoid` and each other.
pub fn fresh_strings<'a>(avoid: impl IntoIterator<Item = &'a str>, count: usize) -> Vec<String> {
    fresh_with_prefix(FRESH_PREFIX, avoid, count)
}

pub fn fresh_with_prefix<'a>(
    prefix: &str,
    avoid: impl IntoIterator<Item = &'a str>,
    count: usize,
) -> Vec<String> {
    let avoid: BTreeSet<&str> = avoid.into_iter().collect();
    let mut out = Vec::with_capacity(count);
    let mut i = 0usize;
    while out.len() < count {
        let candidate = format!("{prefix}{i}");
        if !avoid.contains(candidate.as_str()) {
            out.push(candidate);
        }
        i += 1;
    }
    out
}

/// A fresh name derived from `base` (used for readable labels like `a*`).
pub fn fresh_named<'a>(base: &str, avoid: impl IntoIterator<Item = &'a str>) -> String {
    let avoid: BTreeSet<&str> = avoid.into_iter().collect();
    if !avoid.contains(base) {
        return base.to_string();
    }
    let mut i = 1usize;
    loop {
        let candidate = format!("{base}#{i}");
        if !avoid.contains(candidate.as_str()) {
            return candidate;
        }
        i += 1;
    }
}

#[derive(Serialize, Deserialize)]
struct NodeJson {
    id: NodeId,
    data: DataValue,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphJson {
    edge_alphabet: Vec<EdgeLabel>,
    nodes: Vec<NodeJson>,
    edges: Vec<Edge>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    origin: Option<NodeId>,
}

/// A graph plus the optional origin node carried by the JSON format.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphDocument {
    pub graph: DataGraph,
    pub origin: Option<NodeId>,
}

pub fn parse_graph_document(text: &str) -> Result<GraphDocument> {
    let raw: GraphJson = serde_json::from_str(text).map_err(|e| Error::Json(e.to_string()))?;
    graph_from_json(raw)
}

pub fn graph_document_from_value(value: &serde_json::Value) -> Result<GraphDocument> {
    let raw: GraphJson =
        serde_json::from_value(value.clone()).map_err(|e| Error::Json(e.to_string()))?;
    graph_from_json(raw)
}

fn graph_from_json(raw: GraphJson) -> Result<GraphDocument> {
    let alphabet: BTreeSet<EdgeLabel> = raw.edge_alphabet.into_iter().collect();
    let mut builder = GraphBuilder {
        graph: DataGraph {
            alphabet,
            data: BTreeMap::new(),
            edges: BTreeSet::new(),
        },
        error: None,
    };
    for n in raw.nodes {
        builder = builder.node(n.id, n.data);
    }
    for e in raw.edges {
        builder = builder.edge(e.from, e.label, e.to);
    }
    let graph = builder.build()?;
    if let Some(o) = raw.origin {
        if !graph.contains_node(o) {
            return Err(Error::MissingNode(o));
        }
    }
    Ok(GraphDocument {
        graph,
        origin: raw.origin,
    })
}

pub fn parse_graph(text: &str) -> Result<DataGraph> {
    Ok(parse_graph_document(text)?.graph)
}

pub fn graph_to_value(g: &DataGraph, origin: Option<NodeId>) -> serde_json::Value {
    let raw = GraphJson {
        edge_alphabet: g.alphabet.iter().cloned().collect(),
        nodes: g
            .data
            .iter()
            .map(|(&id, d)| NodeJson {
                id,
                data: d.clone(),
            })
            .collect(),
        edges: g.edges.iter().cloned().collect(),
        origin,
    };
    serde_json::to_value(raw).expect("graph JSON is always serializable")
}

/// Canonical JSON text: nodes ascending, edges by (source, label, target).
pub fn serialize_graph(g: &DataGraph) -> String {
    graph_to_value(g, None).to_string()
}
