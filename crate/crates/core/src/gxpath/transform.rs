//! Structural transforms: star elimination, the certificate-size bound, and
//! the translations between global, origin and bi-pointed semantics.
//!
//! Every transform that adds edges on fresh labels first rewrites `_` as the
//! union of the original labels, so the new edges stay invisible to the
//! rewritten expression.

use super::ast::build::*;
use super::ast::{Expr, NodeExpr, PathExpr};
use super::eval::{path_matrix, Structure};
use super::fragment::{mentioned_data_values, require_fragment, Fragment};
use crate::datagraph::{fresh_named, fresh_strings, DataGraph, Edge, NodeId};
use crate::error::{Error, Result};
use std::collections::{BTreeMap, BTreeSet};

/// The empty relation without constants or negation: `[<eps != eps>]`.
fn empty_path() -> PathExpr {
    test(path_neq(eps(), eps()))
}

fn labels_union(alphabet: &BTreeSet<String>) -> PathExpr {
    alphabet
        .iter()
        .map(|l| label(l))
        .reduce(union)
        .unwrap_or_else(empty_path)
}

/// Generic bottom-up rewriting of an expression tree.
struct Rewriter<'a> {
    path: &'a dyn Fn(&PathExpr, &mut dyn FnMut(&PathExpr) -> PathExpr) -> Option<PathExpr>,
}

impl Rewriter<'_> {
    fn path(&self, p: &PathExpr) -> PathExpr {
        let mut recurse = |q: &PathExpr| self.path(q);
        if let Some(out) = (self.path)(p, &mut recurse) {
            return out;
        }
        use PathExpr::*;
        match p {
            Epsilon | Wildcard | Label(_) | InverseLabel(_) => p.clone(),
            Test(n) => test(self.node(n)),
            Concat(a, b) => concat(self.path(a), self.path(b)),
            Union(a, b) => union(self.path(a), self.path(b)),
            Intersect(a, b) => inter(self.path(a), self.path(b)),
            Star(a) => star(self.path(a)),
            Complement(a) => complement(self.path(a)),
            Repeat(a, n, m) => repeat(self.path(a), *n, *m),
        }
    }

    fn node(&self, n: &NodeExpr) -> NodeExpr {
        use NodeExpr::*;
        match n {
            Not(a) => not(self.node(a)),
            And(a, b) => and(self.node(a), self.node(b)),
            Or(a, b) => or(self.node(a), self.node(b)),
            Exists(p) => exists(self.path(p)),
            DataEq(_) | DataNeq(_) => n.clone(),
            PathEq(p, q) => path_eq(self.path(p), self.path(q)),
            PathNeq(p, q) => path_neq(self.path(p), self.path(q)),
        }
    }

    fn expr(&self, e: &Expr) -> Expr {
        match e {
            Expr::Path(p) => Expr::Path(self.path(p)),
            Expr::Node(n) => Expr::Node(self.node(n)),
        }
    }
}

fn without_wildcard_expr(e: &Expr, alphabet: &BTreeSet<String>) -> Expr {
    let f = |p: &PathExpr, _: &mut dyn FnMut(&PathExpr) -> PathExpr| match p {
        PathExpr::Wildcard => Some(labels_union(alphabet)),
        _ => None,
    };
    Rewriter { path: &f }.expr(e)
}

/// `_` replaced by the union of `alphabet`.
pub fn without_wildcard(p: &PathExpr, alphabet: &BTreeSet<String>) -> PathExpr {
    match without_wildcard_expr(&Expr::Path(p.clone()), alphabet) {
        Expr::Path(p) => p,
        Expr::Node(_) => unreachable!(),
    }
}

pub fn without_wildcard_node(n: &NodeExpr, alphabet: &BTreeSet<String>) -> NodeExpr {
    match without_wildcard_expr(&Expr::Node(n.clone()), alphabet) {
        Expr::Node(n) => n,
        Expr::Path(_) => unreachable!(),
    }
}

fn starred_labels(e: &Expr) -> Result<BTreeSet<String>> {
    fn walk_path(p: &PathExpr, out: &mut BTreeSet<String>, bad: &mut bool) {
        use PathExpr::*;
        match p {
            Epsilon | Wildcard | Label(_) | InverseLabel(_) => {}
            Test(n) => walk_node(n, out, bad),
            Concat(a, b) | Union(a, b) | Intersect(a, b) => {
                walk_path(a, out, bad);
                walk_path(b, out, bad);
            }
            Star(a) => match &**a {
                Label(l) | InverseLabel(l) => {
                    out.insert(l.clone());
                }
                _ => *bad = true,
            },
            Complement(a) | Repeat(a, _, _) => walk_path(a, out, bad),
        }
    }
    fn walk_node(n: &NodeExpr, out: &mut BTreeSet<String>, bad: &mut bool) {
        use NodeExpr::*;
        match n {
            Not(a) => walk_node(a, out, bad),
            And(a, b) | Or(a, b) => {
                walk_node(a, out, bad);
                walk_node(b, out, bad);
            }
            Exists(p) => walk_path(p, out, bad),
            DataEq(_) | DataNeq(_) => {}
            PathEq(p, q) | PathNeq(p, q) => {
                walk_path(p, out, bad);
                walk_path(q, out, bad);
            }
        }
    }
    let mut out = BTreeSet::new();
    let mut bad = false;
    match e {
        Expr::Path(p) => walk_path(p, &mut out, &mut bad),
        Expr::Node(n) => walk_node(n, &mut out, &mut bad),
    }
    if bad {
        return Err(Error::Fragment(
            "star elimination needs every star applied to a label or an inverse label".into(),
        ));
    }
    Ok(out)
}

/// Replaces each `ℓ*` (and `ℓ⁻*`) by a fresh label whose edges are the
/// reflexive-transitive closure of `ℓ`. Denotations are preserved exactly.
pub fn eliminate_star(g: &DataGraph, e: &Expr) -> Result<(DataGraph, Expr)> {
    super::eval::check_labels(g, e)?;
    let starred = starred_labels(e)?;
    if starred.is_empty() {
        return Ok((g.clone(), e.clone()));
    }
    let st = Structure::new(g);
    let mut taken: BTreeSet<String> = g.alphabet().clone();
    let mut renamed: BTreeMap<String, String> = BTreeMap::new();
    let mut new_edges = Vec::new();
    for l in &starred {
        let fresh = fresh_named(&format!("{l}*"), taken.iter().map(String::as_str));
        taken.insert(fresh.clone());
        let (_, closure) = path_matrix(g, &star(label(l)))?;
        for (i, j) in closure.pairs() {
            new_edges.push(Edge::new(st.ids()[i], fresh.clone(), st.ids()[j]));
        }
        renamed.insert(l.clone(), fresh);
    }
    let original = g.alphabet().clone();
    let rewrite = |p: &PathExpr, _: &mut dyn FnMut(&PathExpr) -> PathExpr| match p {
        PathExpr::Wildcard => Some(labels_union(&original)),
        PathExpr::Star(inner) => match &**inner {
            PathExpr::Label(l) => Some(label(&renamed[l])),
            PathExpr::InverseLabel(l) => Some(inv(&renamed[l])),
            _ => None,
        },
        _ => None,
    };
    let e2 = Rewriter { path: &rewrite }.expr(e);
    let g2 = g
        .with_alphabet(renamed.values().cloned())
        .with_edges(&new_edges)?;
    Ok((g2, e2))
}

/// Certificate-size bound for star-free positive expressions: any witnessed
/// satisfaction survives in some induced sub-graph with at most this many
/// nodes. Unions take the max of the branches.
pub fn c_bound(e: &Expr) -> Result<u64> {
    require_fragment(e, Fragment::PosReg, "c_bound")?;
    match e {
        Expr::Path(p) => c_path(p),
        Expr::Node(n) => c_node(n),
    }
}

fn c_path(p: &PathExpr) -> Result<u64> {
    use PathExpr::*;
    Ok(match p {
        Epsilon => 1,
        Wildcard | Label(_) | InverseLabel(_) => 2,
        Test(n) => c_node(n)?,
        Concat(a, b) | Intersect(a, b) => c_path(a)? + c_path(b)? - 1,
        Union(a, b) => c_path(a)?.max(c_path(b)?),
        Repeat(a, _, m) => (u64::from(*m) * c_path(a)?).max(1),
        Star(_) => return Err(Error::Fragment("c_bound is undefined for starred expressions".into())),
        Complement(_) => return Err(Error::Fragment("c_bound needs a positive expression".into())),
    })
}

fn c_node(n: &NodeExpr) -> Result<u64> {
    use NodeExpr::*;
    Ok(match n {
        DataEq(_) | DataNeq(_) => 1,
        And(a, b) => c_node(a)? + c_node(b)? - 1,
        Or(a, b) => c_node(a)?.max(c_node(b)?),
        Exists(p) => c_path(p)?,
        PathEq(p, q) | PathNeq(p, q) => c_path(p)? + c_path(q)? - 1,
        Not(_) => return Err(Error::Fragment("c_bound needs a positive expression".into())),
    })
}

fn taken_labels(g: &DataGraph) -> BTreeSet<String> {
    g.alphabet().clone()
}

/// Global satisfaction of `nu` on `g` becomes satisfaction at a fresh origin
/// `p0`: `p0` starts a cycle through every node on a fresh label, carries a
/// loop on a second fresh label, and the result formula walks the cycle
/// checking `nu` at each node.
pub fn to_origin(g: &DataGraph, nu: &NodeExpr) -> Result<(DataGraph, NodeId, NodeExpr)> {
    let e = Expr::Node(nu.clone());
    require_fragment(&e, Fragment::PosReg, "to_origin")?;
    super::eval::check_labels(g, &e)?;
    let mut taken = taken_labels(g);
    let cycle = fresh_named("cycle", taken.iter().map(String::as_str));
    taken.insert(cycle.clone());
    let lp = fresh_named("loop", taken.iter().map(String::as_str));

    let p0 = g.next_node_id();
    let mentioned = mentioned_data_values(&e);
    let avoid: Vec<&str> = g.data_values().into_iter().chain(mentioned.iter().map(String::as_str)).collect();
    let p0_value = fresh_strings(avoid, 1).remove(0);

    let order: Vec<NodeId> = std::iter::once(p0).chain(g.nodes()).collect();
    let mut edges = vec![Edge::new(p0, lp.clone(), p0)];
    for (i, &v) in order.iter().enumerate() {
        let w = order[(i + 1) % order.len()];
        edges.push(Edge::new(v, cycle.clone(), w));
    }
    let g2 = g
        .with_alphabet([cycle.clone(), lp.clone()])
        .with_node(p0, p0_value)?
        .with_edges(&edges)?;
    let f_nu = without_wildcard_node(nu, g.alphabet());
    let nu2 = exists(seq([
        star(concat(label(&cycle), test(f_nu))),
        label(&cycle),
        label(&lp),
    ]));
    Ok((g2, p0, nu2))
}

/// Satisfaction at `o` becomes global satisfaction: every other node gets a
/// loop on a fresh label, and the formula is `<loop> | nu`.
pub fn to_global(g: &DataGraph, o: NodeId, nu: &NodeExpr) -> Result<(DataGraph, NodeExpr)> {
    if !g.contains_node(o) {
        return Err(Error::MissingNode(o));
    }
    super::eval::check_labels(g, &Expr::Node(nu.clone()))?;
    let lp = fresh_named("loop", taken_labels(g).iter().map(String::as_str));
    let edges: Vec<Edge> = g
        .nodes()
        .filter(|&v| v != o)
        .map(|v| Edge::new(v, lp.clone(), v))
        .collect();
    let g2 = g.with_alphabet([lp.clone()]).with_edges(&edges)?;
    let nu2 = or(exists(label(&lp)), without_wildcard_node(nu, g.alphabet()));
    Ok((g2, nu2))
}

/// Global satisfaction of a path expression becomes satisfaction on the pair
/// `(u, v)` of fresh nodes: `u` reaches every original node on a fresh
/// label `i`, every original node reaches `v` on a fresh label `f`, and the
/// formula is `!(i / !p / f)`.
///
/// Complements nested inside `p` are restricted to original nodes (tested via
/// the fresh data values of `u` and `v`); without that, a nested complement
/// could route through `u` or `v`.
pub fn path_to_bipointed(g: &DataGraph, p: &PathExpr) -> Result<(DataGraph, NodeId, NodeId, PathExpr)> {
    let e = Expr::Path(p.clone());
    super::eval::check_labels(g, &e)?;
    let mut taken = taken_labels(g);
    let li = fresh_named("i", taken.iter().map(String::as_str));
    taken.insert(li.clone());
    let lf = fresh_named("f", taken.iter().map(String::as_str));

    let u = g.next_node_id();
    let v = u + 1;
    let mentioned = mentioned_data_values(&e);
    let avoid: Vec<&str> = g.data_values().into_iter().chain(mentioned.iter().map(String::as_str)).collect();
    let fresh = fresh_strings(avoid, 2);

    let mut edges = Vec::new();
    for x in g.nodes() {
        edges.push(Edge::new(u, li.clone(), x));
        edges.push(Edge::new(x, lf.clone(), v));
    }
    let g2 = g
        .with_alphabet([li.clone(), lf.clone()])
        .with_node(u, fresh[0].clone())?
        .with_node(v, fresh[1].clone())?
        .with_edges(&edges)?;

    let original = test(and(neq(&fresh[0]), neq(&fresh[1])));
    let alphabet = g.alphabet().clone();
    let relativize = |q: &PathExpr, recurse: &mut dyn FnMut(&PathExpr) -> PathExpr| match q {
        PathExpr::Wildcard => Some(labels_union(&alphabet)),
        PathExpr::Complement(inner) => Some(seq([
            original.clone(),
            complement(recurse(inner)),
            original.clone(),
        ])),
        _ => None,
    };
    let inner = Rewriter { path: &relativize }.path(p);
    let p2 = complement(seq([label(&li), complement(inner), label(&lf)]));
    Ok((g2, u, v, p2))
}

/// Satisfaction on the pair `(u, v)` becomes global satisfaction: every node
/// reaches `u` on a fresh label `i`, `v` reaches every node on a fresh label
/// `f`, and the formula is `i / p / f`.
pub fn path_to_global(g: &DataGraph, u: NodeId, v: NodeId, p: &PathExpr) -> Result<(DataGraph, PathExpr)> {
    for x in [u, v] {
        if !g.contains_node(x) {
            return Err(Error::MissingNode(x));
        }
    }
    super::eval::check_labels(g, &Expr::Path(p.clone()))?;
    let mut taken = taken_labels(g);
    let li = fresh_named("i", taken.iter().map(String::as_str));
    taken.insert(li.clone());
    let lf = fresh_named("f", taken.iter().map(String::as_str));
    let mut edges = Vec::new();
    for x in g.nodes() {
        edges.push(Edge::new(x, li.clone(), u));
        edges.push(Edge::new(v, lf.clone(), x));
    }
    let g2 = g.with_alphabet([li.clone(), lf.clone()]).with_edges(&edges)?;
    let p2 = seq([label(&li), without_wildcard(p, g.alphabet()), label(&lf)]);
    Ok((g2, p2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gxpath::eval::{eval_node, eval_path, satisfies_at, satisfies_global, satisfies_pair};
    use crate::gxpath::fragment::fragment_of;

    fn path3() -> DataGraph {
        DataGraph::builder(["a"])
            .node(1, "x")
            .node(2, "y")
            .node(3, "z")
            .edge(1, "a", 2)
            .edge(2, "a", 3)
            .build()
            .unwrap()
    }

    #[test]
    fn star_free_input_is_unchanged() {
        let g = path3();
        let e: Expr = concat(label("a"), any()).into();
        let (g2, e2) = eliminate_star(&g, &e).unwrap();
        assert_eq!(g2, g);
        assert_eq!(e2, e);
    }

    #[test]
    fn closure_edges_on_a_path() {
        let g = path3();
        let (g2, e2) = eliminate_star(&g, &star(label("a")).into()).unwrap();
        assert_eq!(e2, Expr::Path(label("a*")));
        let added: BTreeSet<(NodeId, NodeId)> = g2
            .edges()
            .iter()
            .filter(|e| e.label == "a*")
            .map(|e| (e.from, e.to))
            .collect();
        assert_eq!(
            added,
            BTreeSet::from([(1, 1), (2, 2), (3, 3), (1, 2), (2, 3), (1, 3)])
        );
        assert_eq!(fragment_of(&e2), Fragment::PosCoreRegStarFree);
        let inverse = star(inv("a"));
        let (g3, e3) = eliminate_star(&g, &inverse.clone().into()).unwrap();
        let Expr::Path(p3) = e3 else { unreachable!() };
        assert_eq!(eval_path(&g3, &p3).unwrap(), eval_path(&g, &inverse).unwrap());
    }

    #[test]
    fn non_core_star_is_rejected() {
        let g = path3();
        assert!(matches!(
            eliminate_star(&g, &star(concat(label("a"), label("a"))).into()),
            Err(Error::Fragment(_))
        ));
    }

    #[test]
    fn c_bound_examples() {
        assert_eq!(c_bound(&eps().into()).unwrap(), 1);
        assert_eq!(c_bound(&concat(label("a"), label("b")).into()).unwrap(), 3);
        assert_eq!(c_bound(&repeat(label("a"), 1, 4).into()).unwrap(), 8);
        assert_eq!(c_bound(&union(label("a"), concat(label("a"), label("b"))).into()).unwrap(), 3);
        assert_eq!(c_bound(&repeat(label("a"), 0, 0).into()).unwrap(), 1);
        assert!(c_bound(&star(label("a")).into()).is_err());
        assert!(c_bound(&not(eq("x")).into()).is_err());
    }

    #[test]
    fn origin_transform_on_empty_graph() {
        let g = DataGraph::empty(["a"]);
        let (g2, o, nu2) = to_origin(&g, &eq("x")).unwrap();
        assert_eq!(g2.node_count(), 1);
        assert_eq!(g2.edge_count(), 2);
        assert!(satisfies_at(&g2, o, &nu2).unwrap());
    }

    #[test]
    fn origin_transform_tautology() {
        let g = DataGraph::builder(["a"]).node(1, "x").node(2, "y").build().unwrap();
        let (g2, o, nu2) = to_origin(&g, &exists(eps())).unwrap();
        assert!(satisfies_at(&g2, o, &nu2).unwrap());
        let (g3, o3, nu3) = to_origin(&g, &eq("x")).unwrap();
        assert!(!satisfies_at(&g3, o3, &nu3).unwrap());
    }

    #[test]
    fn global_transform_examples() {
        let g = path3();
        for (o, phi) in [(1, exists(label("a"))), (3, exists(label("a"))), (2, eq("y"))] {
            let (g2, nu2) = to_global(&g, o, &phi).unwrap();
            assert_eq!(
                satisfies_at(&g, o, &phi).unwrap(),
                satisfies_global(&g2, &nu2.into()).unwrap()
            );
        }
    }

    #[test]
    fn bipointed_examples() {
        let g = path3();
        for p in [eps(), label("a"), star(label("a")), complement(eps()), concat(complement(eps()), complement(eps()))] {
            let (g2, u, v, p2) = path_to_bipointed(&g, &p).unwrap();
            assert_eq!(
                satisfies_global(&g, &p.clone().into()).unwrap(),
                satisfies_pair(&g2, u, v, &p2).unwrap(),
                "{p}"
            );
            for (x, y) in [(1, 1), (1, 3), (3, 1)] {
                let (g3, p3) = path_to_global(&g, x, y, &p).unwrap();
                assert_eq!(
                    satisfies_pair(&g, x, y, &p).unwrap(),
                    satisfies_global(&g3, &p3.into()).unwrap()
                );
            }
        }
        // the identity path holds globally on a single node
        let single = DataGraph::builder(["a"]).node(5, "x").build().unwrap();
        let (g2, u, v, p2) = path_to_bipointed(&single, &eps()).unwrap();
        assert!(satisfies_pair(&g2, u, v, &p2).unwrap());
    }

    #[test]
    fn wildcard_is_rewritten_before_adding_labels() {
        // `_ / _` fails at node 3 of the path; the fresh cycle edges must not
        // make it hold there after the transform
        let g = path3();
        let phi = exists(concat(any(), any()));
        assert!(!satisfies_global(&g, &phi.clone().into()).unwrap());
        let (g2, o, nu2) = to_origin(&g, &phi).unwrap();
        assert!(!satisfies_at(&g2, o, &nu2).unwrap());
        assert!(eval_node(&g, &phi).unwrap().contains(&1));
    }
}
