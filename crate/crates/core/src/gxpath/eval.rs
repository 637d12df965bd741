//! Bottom-up evaluation of path and node expressions.
//!
//! The evaluator also runs over *partial* data assignments, where some nodes
//! have no data value yet. Every denotation is then a pair `lo ⊆ hi`: `lo`
//! holds under every completion of the assignment and `hi` contains
//! everything that holds under some completion. With full data `lo == hi`
//! (shared through one `Rc`), which is the ordinary semantics.

use super::ast::{Expr, NodeExpr, PathExpr};
use super::relation::{BitMatrix, BitSet};
use crate::datagraph::{DataGraph, NodeId};
use crate::error::{Error, Result};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::rc::Rc;

/// Index-based view of a graph's nodes and edges.
#[derive(Clone, Debug)]
pub struct Structure {
    ids: Vec<NodeId>,
    index: HashMap<NodeId, usize>,
    adjacency: BTreeMap<String, BitMatrix>,
}

impl Structure {
    pub fn new(g: &DataGraph) -> Self {
        let ids: Vec<NodeId> = g.nodes().collect();
        let index: HashMap<NodeId, usize> = ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let n = ids.len();
        let mut adjacency: BTreeMap<String, BitMatrix> = g
            .alphabet()
            .iter()
            .map(|l| (l.clone(), BitMatrix::empty(n)))
            .collect();
        for e in g.edges() {
            adjacency
                .get_mut(&e.label)
                .expect("edge labels are in the alphabet")
                .insert(index[&e.from], index[&e.to]);
        }
        Structure {
            ids,
            index,
            adjacency,
        }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[NodeId] {
        &self.ids
    }

    pub fn index_of(&self, v: NodeId) -> Option<usize> {
        self.index.get(&v).copied()
    }

    fn check_labels<'a>(&self, labels: impl IntoIterator<Item = &'a str>) -> Result<()> {
        for l in labels {
            if !self.adjacency.contains_key(l) {
                return Err(Error::UnknownLabel(l.to_string()));
            }
        }
        Ok(())
    }
}

/// Data values interned to small integers, possibly with holes.
#[derive(Clone, Debug)]
pub struct DataAssignment {
    values: Vec<Option<u32>>,
    interner: BTreeMap<String, u32>,
}

impl DataAssignment {
    pub fn from_graph(g: &DataGraph, st: &Structure) -> Self {
        let mut a = DataAssignment {
            values: vec![None; st.len()],
            interner: BTreeMap::new(),
        };
        for (i, &v) in st.ids().iter().enumerate() {
            let d = g.data(v).expect("structure built from this graph");
            let id = a.intern(d);
            a.values[i] = Some(id);
        }
        a
    }

    pub fn unassigned(n: usize) -> Self {
        DataAssignment {
            values: vec![None; n],
            interner: BTreeMap::new(),
        }
    }

    pub fn intern(&mut self, value: &str) -> u32 {
        let next = self.interner.len() as u32;
        *self.interner.entry(value.to_string()).or_insert(next)
    }

    pub fn set(&mut self, index: usize, value: Option<u32>) {
        self.values[index] = value;
    }

    pub fn get(&self, index: usize) -> Option<u32> {
        self.values[index]
    }

    fn lookup(&self, value: &str) -> Option<u32> {
        self.interner.get(value).copied()
    }
}

#[derive(Clone, Debug)]
pub struct Bounds<T> {
    pub lo: Rc<T>,
    pub hi: Rc<T>,
}

impl<T> Bounds<T> {
    fn exact(v: T) -> Self {
        let r = Rc::new(v);
        Bounds {
            lo: r.clone(),
            hi: r,
        }
    }

    fn is_exact(&self) -> bool {
        Rc::ptr_eq(&self.lo, &self.hi)
    }

    fn map<U>(&self, f: impl Fn(&T) -> U) -> Bounds<U> {
        if self.is_exact() {
            Bounds::exact(f(&self.lo))
        } else {
            Bounds {
                lo: Rc::new(f(&self.lo)),
                hi: Rc::new(f(&self.hi)),
            }
        }
    }

    fn zip<U, V>(&self, other: &Bounds<U>, f: impl Fn(&T, &U) -> V) -> Bounds<V> {
        if self.is_exact() && other.is_exact() {
            Bounds::exact(f(&self.lo, &other.lo))
        } else {
            Bounds {
                lo: Rc::new(f(&self.lo, &other.lo)),
                hi: Rc::new(f(&self.hi, &other.hi)),
            }
        }
    }

    /// Antitone maps (complement, negation) swap the bounds.
    fn flip(&self, f: impl Fn(&T) -> T) -> Bounds<T> {
        if self.is_exact() {
            Bounds::exact(f(&self.lo))
        } else {
            Bounds {
                lo: Rc::new(f(&self.hi)),
                hi: Rc::new(f(&self.lo)),
            }
        }
    }
}

/// One evaluation pass. Memo tables live for a single call and are keyed by
/// AST node identity.
pub struct Evaluator<'a> {
    st: &'a Structure,
    data: &'a DataAssignment,
    paths: HashMap<*const PathExpr, Bounds<BitMatrix>>,
    nodes: HashMap<*const NodeExpr, Bounds<BitSet>>,
}

impl<'a> Evaluator<'a> {
    pub fn new(st: &'a Structure, data: &'a DataAssignment) -> Self {
        Evaluator {
            st,
            data,
            paths: HashMap::new(),
            nodes: HashMap::new(),
        }
    }

    fn n(&self) -> usize {
        self.st.len()
    }

    pub fn path(&mut self, p: &PathExpr) -> Bounds<BitMatrix> {
        let key = p as *const PathExpr;
        if let Some(b) = self.paths.get(&key) {
            return b.clone();
        }
        let n = self.n();
        let out = match p {
            PathExpr::Epsilon => Bounds::exact(BitMatrix::identity(n)),
            PathExpr::Wildcard => {
                let mut m = BitMatrix::empty(n);
                for a in self.st.adjacency.values() {
                    m = m.union(a);
                }
                Bounds::exact(m)
            }
            // undeclared labels are rejected before evaluation; an absent
            // matrix here denotes the empty relation
            PathExpr::Label(l) => Bounds::exact(
                self.st.adjacency.get(l).cloned().unwrap_or_else(|| BitMatrix::empty(n)),
            ),
            PathExpr::InverseLabel(l) => Bounds::exact(
                self.st
                    .adjacency
                    .get(l)
                    .map_or_else(|| BitMatrix::empty(n), BitMatrix::transpose),
            ),
            PathExpr::Test(phi) => self.node(phi).map(BitMatrix::diagonal),
            PathExpr::Concat(a, b) => {
                let (x, y) = (self.path(a), self.path(b));
                x.zip(&y, BitMatrix::compose)
            }
            PathExpr::Union(a, b) => {
                let (x, y) = (self.path(a), self.path(b));
                x.zip(&y, BitMatrix::union)
            }
            PathExpr::Intersect(a, b) => {
                let (x, y) = (self.path(a), self.path(b));
                x.zip(&y, BitMatrix::intersect)
            }
            PathExpr::Star(a) => self.path(a).map(BitMatrix::star),
            PathExpr::Complement(a) => self.path(a).flip(BitMatrix::complement),
            PathExpr::Repeat(a, lo, hi) => {
                let base = self.path(a);
                base.map(|m| repeat_range(m, *lo, *hi))
            }
        };
        self.paths.insert(key, out.clone());
        out
    }

    pub fn node(&mut self, phi: &NodeExpr) -> Bounds<BitSet> {
        let key = phi as *const NodeExpr;
        if let Some(b) = self.nodes.get(&key) {
            return b.clone();
        }
        let out = match phi {
            NodeExpr::Not(a) => self.node(a).flip(BitSet::complement),
            NodeExpr::And(a, b) => {
                let (x, y) = (self.node(a), self.node(b));
                x.zip(&y, |s, t| {
                    let mut s = s.clone();
                    s.intersect_with(t);
                    s
                })
            }
            NodeExpr::Or(a, b) => {
                let (x, y) = (self.node(a), self.node(b));
                x.zip(&y, |s, t| {
                    let mut s = s.clone();
                    s.union_with(t);
                    s
                })
            }
            NodeExpr::Exists(p) => self.path(p).map(BitMatrix::domain),
            NodeExpr::DataEq(c) => self.data_test(c, true),
            NodeExpr::DataNeq(c) => self.data_test(c, false),
            NodeExpr::PathEq(p, q) => self.compare(p, q, true),
            NodeExpr::PathNeq(p, q) => self.compare(p, q, false),
        };
        self.nodes.insert(key, out.clone());
        out
    }

    fn has_holes(&self) -> bool {
        self.data.values.iter().any(Option::is_none)
    }

    fn data_test(&self, c: &str, equal: bool) -> Bounds<BitSet> {
        let n = self.n();
        let target = self.data.lookup(c);
        let mut lo = BitSet::empty(n);
        let mut hi = BitSet::empty(n);
        for i in 0..n {
            match self.data.values[i] {
                Some(d) => {
                    if (Some(d) == target) == equal {
                        lo.insert(i);
                        hi.insert(i);
                    }
                }
                None => hi.insert(i),
            }
        }
        if self.has_holes() {
            Bounds {
                lo: Rc::new(lo),
                hi: Rc::new(hi),
            }
        } else {
            Bounds::exact(lo)
        }
    }

    /// `<p = q>` / `<p != q>`: some p-successor and some q-successor whose
    /// data values are equal / different.
    fn compare(&mut self, p: &PathExpr, q: &PathExpr, equal: bool) -> Bounds<BitSet> {
        let (pb, qb) = (self.path(p), self.path(q));
        let n = self.n();
        let witness = |pm: &BitMatrix, qm: &BitMatrix, optimistic: bool| {
            let mut out = BitSet::empty(n);
            for v in 0..n {
                let (pr, qr) = (pm.row(v), qm.row(v));
                if pr.is_empty() || qr.is_empty() {
                    continue;
                }
                let mut kp = BTreeSet::new();
                let mut kq = BTreeSet::new();
                let mut holes = false;
                for w in pr.iter() {
                    match self.data.values[w] {
                        Some(d) => {
                            kp.insert(d);
                        }
                        None => holes = true,
                    }
                }
                for w in qr.iter() {
                    match self.data.values[w] {
                        Some(d) => {
                            kq.insert(d);
                        }
                        None => holes = true,
                    }
                }
                let known = if equal {
                    kp.intersection(&kq).next().is_some()
                } else {
                    !kp.is_empty() && !kq.is_empty() && kp.union(&kq).nth(1).is_some()
                };
                if known || (optimistic && holes) {
                    out.insert(v);
                }
            }
            out
        };
        if pb.is_exact() && qb.is_exact() && !self.has_holes() {
            Bounds::exact(witness(&pb.lo, &qb.lo, false))
        } else {
            Bounds {
                lo: Rc::new(witness(&pb.lo, &qb.lo, false)),
                hi: Rc::new(witness(&pb.hi, &qb.hi, true)),
            }
        }
    }
}

fn repeat_range(m: &BitMatrix, lo: u32, hi: u32) -> BitMatrix {
    let n = m.size();
    let mut power = BitMatrix::identity(n);
    let mut acc = BitMatrix::empty(n);
    for k in 0..=hi {
        if k >= lo {
            acc = acc.union(&power);
        }
        if k < hi {
            power = power.compose(m);
        }
    }
    acc
}

fn prepare(g: &DataGraph, e: &Expr) -> Result<(Structure, DataAssignment)> {
    let st = Structure::new(g);
    st.check_labels(e.labels())?;
    let data = DataAssignment::from_graph(g, &st);
    Ok((st, data))
}

/// Denotation of a path expression as a matrix over the graph's node order.
pub fn path_matrix(g: &DataGraph, p: &PathExpr) -> Result<(Structure, BitMatrix)> {
    let (st, data) = prepare(g, &Expr::Path(p.clone()))?;
    let m = Evaluator::new(&st, &data).path(p).lo.as_ref().clone();
    Ok((st, m))
}

pub fn node_set(g: &DataGraph, phi: &NodeExpr) -> Result<(Structure, BitSet)> {
    let (st, data) = prepare(g, &Expr::Node(phi.clone()))?;
    let s = Evaluator::new(&st, &data).node(phi).lo.as_ref().clone();
    Ok((st, s))
}

pub fn eval_path(g: &DataGraph, p: &PathExpr) -> Result<BTreeSet<(NodeId, NodeId)>> {
    let (st, m) = path_matrix(g, p)?;
    Ok(m.pairs().map(|(i, j)| (st.ids[i], st.ids[j])).collect())
}

pub fn eval_node(g: &DataGraph, phi: &NodeExpr) -> Result<BTreeSet<NodeId>> {
    let (st, s) = node_set(g, phi)?;
    Ok(s.iter().map(|i| st.ids[i]).collect())
}

/// Node expressions hold at every node, path expressions on every pair.
/// The empty graph satisfies everything.
pub fn satisfies_global(g: &DataGraph, e: &Expr) -> Result<bool> {
    match e {
        Expr::Node(phi) => Ok(node_set(g, phi)?.1.is_full()),
        Expr::Path(p) => Ok(path_matrix(g, p)?.1.is_full()),
    }
}

/// The denotation is non-empty (existential reading).
pub fn satisfies_somewhere(g: &DataGraph, e: &Expr) -> Result<bool> {
    match e {
        Expr::Node(phi) => Ok(!node_set(g, phi)?.1.is_empty()),
        Expr::Path(p) => Ok(!path_matrix(g, p)?.1.is_empty()),
    }
}

pub fn satisfies_at(g: &DataGraph, o: NodeId, phi: &NodeExpr) -> Result<bool> {
    if !g.contains_node(o) {
        return Err(Error::MissingNode(o));
    }
    let (st, s) = node_set(g, phi)?;
    Ok(s.contains(st.index[&o]))
}

pub fn satisfies_pair(g: &DataGraph, u: NodeId, v: NodeId, p: &PathExpr) -> Result<bool> {
    for x in [u, v] {
        if !g.contains_node(x) {
            return Err(Error::MissingNode(x));
        }
    }
    let (st, m) = path_matrix(g, p)?;
    Ok(m.contains(st.index[&u], st.index[&v]))
}

/// Checks that every label of `e` is declared by `g`.
pub fn check_labels(g: &DataGraph, e: &Expr) -> Result<()> {
    for l in e.labels() {
        if !g.alphabet().contains(l) {
            return Err(Error::UnknownLabel(l.to_string()));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gxpath::ast::build::*;
    use crate::gxpath::parser::parse_query;

    fn two_nodes() -> DataGraph {
        DataGraph::builder(["a"])
            .node(1, "x")
            .node(2, "x")
            .edge(1, "a", 2)
            .build()
            .unwrap()
    }

    #[test]
    fn epsilon_and_complement() {
        let g = two_nodes();
        assert_eq!(eval_path(&g, &eps()).unwrap(), BTreeSet::from([(1, 1), (2, 2)]));
        assert_eq!(
            eval_path(&g, &complement(eps())).unwrap(),
            BTreeSet::from([(1, 2), (2, 1)])
        );
    }

    #[test]
    fn star_of_single_edge() {
        let g = two_nodes();
        assert_eq!(
            eval_path(&g, &star(label("a"))).unwrap(),
            BTreeSet::from([(1, 1), (2, 2), (1, 2)])
        );
        assert_eq!(eval_path(&g, &inv("a")).unwrap(), BTreeSet::from([(2, 1)]));
    }

    #[test]
    fn path_equality_witness() {
        let g = two_nodes();
        assert_eq!(eval_node(&g, &path_eq(eps(), label("a"))).unwrap(), BTreeSet::from([1]));
        assert!(eval_node(&g, &path_neq(eps(), label("a"))).unwrap().is_empty());
        let h = g.with_data(2, "y").unwrap();
        assert_eq!(eval_node(&h, &path_neq(eps(), label("a"))).unwrap(), BTreeSet::from([1]));
    }

    #[test]
    fn repeat_bounds() {
        let g = DataGraph::builder(["a"])
            .node(1, "x")
            .node(2, "x")
            .node(3, "x")
            .edge(1, "a", 2)
            .edge(2, "a", 3)
            .build()
            .unwrap();
        assert_eq!(eval_path(&g, &repeat(label("a"), 2, 2)).unwrap(), BTreeSet::from([(1, 3)]));
        assert_eq!(eval_path(&g, &repeat(label("a"), 0, 0)).unwrap(), eval_path(&g, &eps()).unwrap());
        assert_eq!(
            eval_path(&g, &repeat(label("a"), 0, 5)).unwrap(),
            eval_path(&g, &star(label("a"))).unwrap()
        );
    }

    #[test]
    fn unknown_label_is_an_error() {
        let g = two_nodes();
        assert_eq!(eval_path(&g, &label("b")), Err(Error::UnknownLabel("b".into())));
        assert!(eval_path(&g, &any()).is_ok());
    }

    #[test]
    fn global_and_local_satisfaction() {
        let empty = DataGraph::empty(["a"]);
        assert!(satisfies_global(&empty, &Expr::Node(eq("x"))).unwrap());
        assert!(satisfies_global(&empty, &Expr::Path(label("a"))).unwrap());
        let mut b = DataGraph::builder(["a"]).node(1, "x").node(2, "y");
        for (v, w) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
            b = b.edge(v, "a", w);
        }
        let complete = b.build().unwrap();
        assert!(satisfies_global(&complete, &Expr::Path(any())).unwrap());
        assert!(satisfies_at(&complete, 2, &eq("y")).unwrap());
        assert!(satisfies_pair(&complete, 1, 1, &eps()).unwrap());
        assert_eq!(satisfies_at(&complete, 7, &eq("y")), Err(Error::MissingNode(7)));
    }

    #[test]
    fn figure_one_friend_sources() {
        let g = crate::datagraph::parse_graph(
            r#"{"edge_alphabet":["friend","follows","blocked"],
            "nodes":[{"id":1,"data":"Alice"},{"id":2,"data":"Dave"},{"id":3,"data":"Carl"},{"id":4,"data":"Bob"}],
            "edges":[{"from":1,"label":"blocked","to":4},{"from":4,"label":"follows","to":1},
                     {"from":1,"label":"follows","to":3},{"from":1,"label":"friend","to":2},
                     {"from":2,"label":"friend","to":1},{"from":2,"label":"friend","to":3},
                     {"from":3,"label":"friend","to":2},{"from":3,"label":"follows","to":4},
                     {"from":4,"label":"follows","to":3}]}"#,
        )
        .unwrap();
        let q = match parse_query("<friend>").unwrap() {
            Expr::Node(n) => n,
            _ => unreachable!(),
        };
        assert_eq!(eval_node(&g, &q).unwrap(), BTreeSet::from([1, 2, 3]));
        assert_eq!(eval_node(&g, &eq("Alice")).unwrap(), BTreeSet::from([1]));
    }

    #[test]
    fn partial_data_bounds_bracket_every_completion() {
        // node 2 unassigned; its completions are "x" or anything else
        let g = two_nodes();
        let st = Structure::new(&g);
        let mut partial = DataAssignment::unassigned(2);
        let x = partial.intern("x");
        partial.set(0, Some(x));
        let phi = or(path_eq(eps(), label("a")), not(exists(concat(label("a"), test(eq("x"))))));
        let b = Evaluator::new(&st, &partial).node(&phi);
        for completion in ["x", "y"] {
            let full = g.with_data(2, completion).unwrap();
            let exact = eval_node(&full, &phi).unwrap();
            let exact: BTreeSet<usize> = exact.iter().map(|v| st.index_of(*v).unwrap()).collect();
            let lo: BTreeSet<usize> = b.lo.iter().collect();
            let hi: BTreeSet<usize> = b.hi.iter().collect();
            assert!(lo.is_subset(&exact) && exact.is_subset(&hi));
        }
    }
}
