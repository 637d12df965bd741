//! Expression-driven repairs: change data values only, until a node
//! expression holds (at an origin or everywhere).
//!
//! Origin instances in the positive core fragment are solved by removing
//! stars, bounding the witness size with `c_bound` and searching the induced
//! sub-graphs of that size around the origin. Values outside the expression's
//! constants are interchangeable, so only `c` fresh ones are ever tried.
//! Everything else falls back to a search over all nodes. Both searches
//! prune with three-valued evaluation over partial assignments.

use super::matching::TransitionCost;
use crate::datagraph::{fresh_strings, DataGraph, DataValue, NodeId};
use crate::emdg::Budget;
use crate::error::{Error, Result};
use crate::gxpath::eval::{DataAssignment, Evaluator, Structure};
use crate::gxpath::fragment::{require_fragment, uses_path_equality};
use crate::gxpath::{
    c_bound, eliminate_star, fragment_of, mentioned_data_values, satisfies_at, satisfies_global,
    Expr, Fragment, NodeExpr,
};
use itertools::Itertools;
use std::collections::{BTreeMap, BTreeSet};

#[derive(Clone, Debug)]
struct Candidate {
    cost: u64,
    value: u32,
    /// Position among the interchangeable fresh values, if it is one.
    fresh: Option<usize>,
}

struct Search<'a> {
    st: Structure,
    phi: &'a NodeExpr,
    origin: Option<usize>,
    order: Vec<usize>,
    candidates: Vec<Vec<Candidate>>,
    data: DataAssignment,
    chosen: Vec<u32>,
    best: Option<(u64, Vec<u32>)>,
    steps: u64,
    limit: u64,
}

enum Status {
    Impossible,
    Certain,
    Open,
}

impl<'a> Search<'a> {
    fn status(&mut self) -> Result<Status> {
        self.steps += 1;
        if self.steps > self.limit {
            return Err(Error::budget("repair search steps", self.steps, self.limit));
        }
        let b = Evaluator::new(&self.st, &self.data).node(self.phi);
        Ok(match self.origin {
            Some(o) if !b.hi.contains(o) => Status::Impossible,
            Some(o) if b.lo.contains(o) => Status::Certain,
            None if !b.hi.is_full() => Status::Impossible,
            None if b.lo.is_full() => Status::Certain,
            _ => Status::Open,
        })
    }

    fn go(&mut self, pos: usize, cost: u64, fresh_used: usize) -> Result<()> {
        if self.best.as_ref().is_some_and(|(c, _)| *c <= cost) {
            return Ok(());
        }
        match self.status()? {
            Status::Impossible => return Ok(()),
            Status::Certain => {
                self.best = Some((cost, self.chosen.clone()));
                return Ok(());
            }
            Status::Open if pos == self.order.len() => return Ok(()),
            Status::Open => {}
        }
        let slot = self.order[pos];
        for cand in self.candidates[pos].clone() {
            if cand.fresh.is_some_and(|j| j > fresh_used) {
                continue;
            }
            let next_fresh = match cand.fresh {
                Some(j) if j == fresh_used => fresh_used + 1,
                _ => fresh_used,
            };
            self.data.set(slot, Some(cand.value));
            self.chosen.push(cand.value);
            let r = self.go(pos + 1, cost + cand.cost, next_fresh);
            self.chosen.pop();
            self.data.set(slot, None);
            r?;
        }
        Ok(())
    }
}

/// Interns every candidate value; returns the id → value table.
fn intern_all(data: &mut DataAssignment, values: &[DataValue]) -> Vec<(u32, DataValue)> {
    values.iter().map(|v| (data.intern(v), v.clone())).collect()
}

struct Outcome {
    cost: u64,
    updates: BTreeMap<NodeId, DataValue>,
}

/// Runs one search over the nodes `nodes` of `h` (with `nodes[0]` the
/// origin when there is one). `options(v)` lists `(cost, value, fresh rank)`
/// per node.
fn run(
    h: &DataGraph,
    phi: &NodeExpr,
    origin: Option<NodeId>,
    nodes: &[NodeId],
    options: &dyn Fn(NodeId) -> Vec<(u64, DataValue, Option<usize>)>,
    limit: u64,
) -> Result<(Option<Outcome>, u64)> {
    let st = Structure::new(h);
    let mut data = DataAssignment::unassigned(st.len());
    let mut names: BTreeMap<u32, DataValue> = BTreeMap::new();
    let mut candidates = Vec::new();
    for &v in nodes {
        let opts = options(v);
        let values: Vec<DataValue> = opts.iter().map(|o| o.1.clone()).collect();
        let ids = intern_all(&mut data, &values);
        names.extend(ids.iter().cloned());
        candidates.push(
            opts.iter()
                .zip(ids)
                .map(|((cost, _, fresh), (id, _))| Candidate {
                    cost: *cost,
                    value: id,
                    fresh: *fresh,
                })
                .collect(),
        );
    }
    // nodes outside the search keep their values
    for (i, &v) in st.ids().iter().enumerate() {
        if !nodes.contains(&v) {
            let id = data.intern(h.data(v).expect("node exists"));
            names.insert(id, h.data(v).expect("node exists").clone());
            data.set(i, Some(id));
        }
    }
    let mut s = Search {
        origin: origin.map(|o| st.index_of(o).expect("origin is a node")),
        order: nodes.iter().map(|v| st.index_of(*v).expect("node exists")).collect(),
        st,
        phi,
        candidates,
        data,
        chosen: Vec::new(),
        best: None,
        steps: 0,
        limit,
    };
    s.go(0, 0, 0)?;
    let steps = s.steps;
    Ok((
        s.best.map(|(cost, chosen)| Outcome {
            cost,
            updates: nodes
                .iter()
                .zip(chosen)
                .map(|(v, id)| (*v, names[&id].clone()))
                .collect(),
        }),
        steps,
    ))
}

/// Subsets of `min(c, n)` nodes containing `o`, `o` first.
fn neighbourhoods(g: &DataGraph, o: NodeId, c: u64) -> Vec<Vec<NodeId>> {
    let others: Vec<NodeId> = g.nodes().filter(|v| *v != o).collect();
    let size = (c.max(1) as usize).min(g.node_count()) - 1;
    others
        .into_iter()
        .combinations(size)
        .map(|rest| std::iter::once(o).chain(rest).collect())
        .collect()
}

fn fresh_pool(g: &DataGraph, mentioned: &BTreeSet<DataValue>, count: usize) -> Vec<DataValue> {
    let avoid: Vec<&str> = mentioned
        .iter()
        .map(String::as_str)
        .chain(g.data_values())
        .collect();
    fresh_strings(avoid, count)
}

fn repair_options(
    mentioned: &BTreeSet<DataValue>,
    fresh: &[DataValue],
) -> impl Fn(NodeId) -> Vec<(u64, DataValue, Option<usize>)> {
    let mut opts: Vec<(u64, DataValue, Option<usize>)> =
        mentioned.iter().map(|c| (0, c.clone(), None)).collect();
    opts.extend(fresh.iter().enumerate().map(|(j, d)| (0, d.clone(), Some(j))));
    move |_| opts.clone()
}

/// A graph equal to `g` up to data values satisfying `nu` at `origin` (or at
/// every node when `origin` is `None`), if one exists. `g` itself is
/// returned when it already satisfies `nu`.
pub fn isomorphic_repair(
    g: &DataGraph,
    nu: &NodeExpr,
    origin: Option<NodeId>,
    budget: &Budget,
) -> Result<Option<DataGraph>> {
    let e = Expr::Node(nu.clone());
    let already = match origin {
        Some(o) => satisfies_at(g, o, nu)?,
        None => satisfies_global(g, &e)?,
    };
    if already {
        return Ok(Some(g.clone()));
    }
    if g.node_count() == 0 {
        return Ok(None);
    }
    let mentioned = mentioned_data_values(&e);
    let mut spent = 0u64;
    let found = match origin {
        Some(o) if fragment_of(&e) <= Fragment::PosCoreReg => {
            let (h, e2) = eliminate_star(g, &e)?;
            let Expr::Node(nu2) = e2 else { unreachable!("node in, node out") };
            let c = c_bound(&Expr::Node(nu2.clone()))?;
            let fresh = fresh_pool(g, &mentioned, (c as usize).min(g.node_count()));
            let options = repair_options(&mentioned, &fresh);
            let mut found = None;
            for s in neighbourhoods(&h, o, c) {
                let keep: BTreeSet<NodeId> = s.iter().copied().collect();
                let sub = h.induced(&keep);
                let (r, steps) = run(&sub, &nu2, Some(o), &s, &options, budget.max_candidates - spent)?;
                spent += steps;
                if let Some(r) = r {
                    found = Some(r);
                    break;
                }
            }
            found
        }
        _ => {
            let fresh = fresh_pool(g, &mentioned, g.node_count());
            let options = repair_options(&mentioned, &fresh);
            let mut nodes: Vec<NodeId> = g.nodes().collect();
            if let Some(o) = origin {
                nodes.retain(|v| *v != o);
                nodes.insert(0, o);
            }
            run(g, nu, origin, &nodes, &options, budget.max_candidates)?.0
        }
    };
    match found {
        Some(r) => Ok(Some(g.with_data_map(&r.updates)?)),
        None => Ok(None),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OriginRepair {
    pub graph: DataGraph,
    pub cost: u64,
}

/// Cheapest data-only change of `g` (by `Σ δ(old, new)`) under which `nu`
/// holds at `o`. `nu` must be in the positive core fragment and must not use
/// `<p = q>`. Per node, candidate values are the expression's constants, the
/// current value and the first `n + |constants|` values of the cost
/// enumerator.
pub fn clean_origin_expression(
    g: &DataGraph,
    o: NodeId,
    nu: &NodeExpr,
    delta: &TransitionCost,
    budget: &Budget,
) -> Result<OriginRepair> {
    let e = Expr::Node(nu.clone());
    if uses_path_equality(&e) {
        return Err(Error::Fragment(
            "the origin cleaner does not support <p = q>".into(),
        ));
    }
    require_fragment(&e, Fragment::PosCoreReg, "clean_origin_expression")?;
    if satisfies_at(g, o, nu)? {
        return Ok(OriginRepair {
            graph: g.clone(),
            cost: 0,
        });
    }
    let (h, e2) = eliminate_star(g, &e)?;
    let Expr::Node(nu2) = e2 else { unreachable!("node in, node out") };
    let c = c_bound(&Expr::Node(nu2.clone()))?;
    let mentioned = mentioned_data_values(&e);
    let prefix = g.node_count() + mentioned.len();
    let options = |v: NodeId| {
        let current = g.data(v).expect("node exists");
        let mut vals: BTreeSet<DataValue> = mentioned.clone();
        vals.insert(current.clone());
        vals.extend(delta.enumerate(current, prefix));
        let mut out: Vec<(u64, DataValue, Option<usize>)> = vals
            .into_iter()
            .map(|d| (delta.delta(current, &d), d, None))
            .collect();
        out.sort();
        out
    };
    let mut best: Option<Outcome> = None;
    let mut spent = 0u64;
    for s in neighbourhoods(&h, o, c) {
        let keep: BTreeSet<NodeId> = s.iter().copied().collect();
        let sub = h.induced(&keep);
        let (r, steps) = run(&sub, &nu2, Some(o), &s, &options, budget.max_candidates - spent)?;
        spent += steps;
        if let Some(r) = r {
            if best.as_ref().map_or(true, |b| r.cost < b.cost) {
                best = Some(r);
            }
        }
    }
    let best = best.ok_or_else(|| {
        Error::Infeasible("no data assignment satisfies the expression at the origin".into())
    })?;
    Ok(OriginRepair {
        graph: g.with_data_map(&best.updates)?,
        cost: best.cost,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gxpath::ast::build::*;
    use crate::gxpath::parse_node;

    fn line() -> DataGraph {
        DataGraph::builder(["a"])
            .node(1, "y")
            .node(2, "y")
            .node(3, "z")
            .edge(1, "a", 2)
            .edge(2, "a", 3)
            .build()
            .unwrap()
    }

    #[test]
    fn already_satisfied() {
        let g = line();
        let r = isomorphic_repair(&g, &eq("y"), Some(1), &Budget::default()).unwrap();
        assert_eq!(r, Some(g));
    }

    #[test]
    fn single_data_test() {
        let g = line();
        let r = isomorphic_repair(&g, &eq("x"), Some(1), &Budget::default())
            .unwrap()
            .unwrap();
        assert_eq!(r.data(1).unwrap(), "x");
        let c = clean_origin_expression(&g, 1, &eq("x"), &TransitionCost::uniform(None), &Budget::default())
            .unwrap();
        assert_eq!(c.cost, 1);
        assert_eq!(c.graph.data(1).unwrap(), "x");
        assert_eq!(c.graph.data(2).unwrap(), "y");
    }

    #[test]
    fn path_with_star() {
        let g = line();
        let nu = parse_node(r#"<a* / [="goal"]> & ="start""#).unwrap();
        let r = isomorphic_repair(&g, &nu, Some(1), &Budget::default())
            .unwrap()
            .unwrap();
        assert!(satisfies_at(&r, 1, &nu).unwrap());
        let c = clean_origin_expression(&g, 1, &nu, &TransitionCost::uniform(None), &Budget::default())
            .unwrap();
        assert_eq!(c.cost, 2);
    }

    #[test]
    fn global_mode() {
        let g = line();
        // every node needs an a-successor or to be "end"
        let nu = parse_node(r#"<a> | ="end""#).unwrap();
        let r = isomorphic_repair(&g, &nu, None, &Budget::default()).unwrap().unwrap();
        assert_eq!(r.data(3).unwrap(), "end");
        let impossible = parse_node(r#"<a> & ="end""#).unwrap();
        assert_eq!(isomorphic_repair(&g, &impossible, None, &Budget::default()).unwrap(), None);
    }

    #[test]
    fn distinct_values_needed() {
        // <a != eps> at 1 and at 2 forces a difference along each edge
        let g = line();
        let nu = and(path_neq(label("a"), eps()), exists(concat(label("a"), test(path_neq(label("a"), eps())))));
        let r = isomorphic_repair(&g, &nu, Some(1), &Budget::default()).unwrap().unwrap();
        assert!(satisfies_at(&r, 1, &nu).unwrap());
    }

    #[test]
    fn rejects_path_equality() {
        let g = line();
        let nu = path_eq(eps(), label("a"));
        assert!(clean_origin_expression(&g, 1, &nu, &TransitionCost::uniform(None), &Budget::default()).is_err());
    }

    fn brute(g: &DataGraph, o: NodeId, nu: &NodeExpr) -> Option<u64> {
        let mut pool: BTreeSet<String> = mentioned_data_values(&Expr::Node(nu.clone()));
        pool.extend(g.data_values().into_iter().map(String::from));
        pool.extend(["f0", "f1", "f2"].map(String::from));
        let pool: Vec<String> = pool.into_iter().collect();
        let nodes: Vec<NodeId> = g.nodes().collect();
        let mut best = None;
        for combo in (0..nodes.len()).map(|_| pool.iter()).multi_cartesian_product() {
            let map: BTreeMap<NodeId, String> = nodes.iter().copied().zip(combo.into_iter().cloned()).collect();
            let h = g.with_data_map(&map).unwrap();
            if satisfies_at(&h, o, nu).unwrap() {
                let cost = nodes.iter().filter(|v| g.data(**v) != h.data(**v)).count() as u64;
                best = Some(best.map_or(cost, |b: u64| b.min(cost)));
            }
        }
        best
    }

    const EXPRS: [&str; 6] = [
        r#"<a / [="x"]>"#,
        r#"<a / a / [="x"]> & ="y""#,
        r#"<a != a>"#,
        r#"<a* / [="x"]> & !="x""#,
        r#"<a^- / [!="y"]> | ="x""#,
        r#"<a / a = eps>"#,
    ];

    proptest::proptest! {
        #[test]
        fn agrees_with_brute_force(
            edges in proptest::collection::btree_set((1u64..=3, 1u64..=3), 0..6),
            data in proptest::collection::vec(0usize..3, 3),
            which in 0usize..EXPRS.len(),
        ) {
            let vals = ["x", "y", "z"];
            let mut b = DataGraph::builder(["a"]);
            for (i, d) in data.iter().enumerate() {
                b = b.node(i as u64 + 1, vals[*d]);
            }
            for (u, v) in &edges {
                b = b.edge(*u, "a", *v);
            }
            let g = b.build().unwrap();
            let nu = parse_node(EXPRS[which]).unwrap();
            let expected = brute(&g, 1, &nu);
            let r = isomorphic_repair(&g, &nu, Some(1), &Budget::default()).unwrap();
            proptest::prop_assert_eq!(r.is_some(), expected.is_some());
            if let Some(h) = r {
                proptest::prop_assert!(satisfies_at(&h, 1, &nu).unwrap());
            }
            if !uses_path_equality(&Expr::Node(nu.clone())) {
                let c = clean_origin_expression(&g, 1, &nu, &TransitionCost::uniform(None), &Budget::default());
                match expected {
                    Some(cost) => {
                        let c = c.unwrap();
                        proptest::prop_assert_eq!(c.cost, cost);
                        proptest::prop_assert!(satisfies_at(&c.graph, 1, &nu).unwrap());
                    }
                    None => proptest::prop_assert!(c.is_err()),
                }
            }
        }
    }
}
