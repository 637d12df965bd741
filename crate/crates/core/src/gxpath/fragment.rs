use super::ast::{Expr, NodeExpr, PathExpr};
use crate::datagraph::DataValue;
use crate::error::{Error, Result};
use std::collections::BTreeSet;

/// Syntactic fragments, ordered from most to least restrictive.
///
/// The wildcard counts as the finite union of the declared labels, so it is
/// allowed in the core fragments; `_*` is a star over a non-atomic path.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Fragment {
    PosCoreRegStarFree,
    PosCoreReg,
    PosReg,
    Reg,
}

#[derive(Default)]
struct Usage {
    negation: bool,
    star: bool,
    nonatomic_star: bool,
}

fn scan_path(p: &PathExpr, u: &mut Usage) {
    use PathExpr::*;
    match p {
        Epsilon | Wildcard | Label(_) | InverseLabel(_) => {}
        Test(n) => scan_node(n, u),
        Concat(a, b) | Union(a, b) | Intersect(a, b) => {
            scan_path(a, u);
            scan_path(b, u);
        }
        Star(a) => {
            u.star = true;
            if !matches!(**a, Label(_) | InverseLabel(_)) {
                u.nonatomic_star = true;
            }
            scan_path(a, u);
        }
        Complement(a) => {
            u.negation = true;
            scan_path(a, u);
        }
        Repeat(a, _, _) => scan_path(a, u),
    }
}

fn scan_node(n: &NodeExpr, u: &mut Usage) {
    use NodeExpr::*;
    match n {
        Not(a) => {
            u.negation = true;
            scan_node(a, u);
        }
        And(a, b) | Or(a, b) => {
            scan_node(a, u);
            scan_node(b, u);
        }
        Exists(p) => scan_path(p, u),
        DataEq(_) | DataNeq(_) => {}
        PathEq(p, q) | PathNeq(p, q) => {
            scan_path(p, u);
            scan_path(q, u);
        }
    }
}

pub fn fragment_of(e: &Expr) -> Fragment {
    let mut u = Usage::default();
    match e {
        Expr::Path(p) => scan_path(p, &mut u),
        Expr::Node(n) => scan_node(n, &mut u),
    }
    if u.negation {
        Fragment::Reg
    } else if u.nonatomic_star {
        Fragment::PosReg
    } else if u.star {
        Fragment::PosCoreReg
    } else {
        Fragment::PosCoreRegStarFree
    }
}

/// Errors unless `e` lies in `fragment` (or a more restrictive one).
pub fn require_fragment(e: &Expr, fragment: Fragment, context: &str) -> Result<()> {
    let actual = fragment_of(e);
    if actual <= fragment {
        Ok(())
    } else {
        Err(Error::Fragment(format!(
            "{context} needs {fragment:?}, the expression is {actual:?}"
        )))
    }
}

/// All constants mentioned in data tests (the set written Σ_n^e).
pub fn mentioned_data_values(e: &Expr) -> BTreeSet<DataValue> {
    let mut out = BTreeSet::new();
    match e {
        Expr::Path(p) => path_constants(p, &mut out),
        Expr::Node(n) => node_constants(n, &mut out),
    }
    out
}

fn path_constants(p: &PathExpr, out: &mut BTreeSet<DataValue>) {
    use PathExpr::*;
    match p {
        Epsilon | Wildcard | Label(_) | InverseLabel(_) => {}
        Test(n) => node_constants(n, out),
        Concat(a, b) | Union(a, b) | Intersect(a, b) => {
            path_constants(a, out);
            path_constants(b, out);
        }
        Star(a) | Complement(a) | Repeat(a, _, _) => path_constants(a, out),
    }
}

fn node_constants(n: &NodeExpr, out: &mut BTreeSet<DataValue>) {
    use NodeExpr::*;
    match n {
        Not(a) => node_constants(a, out),
        And(a, b) | Or(a, b) => {
            node_constants(a, out);
            node_constants(b, out);
        }
        Exists(p) => path_constants(p, out),
        DataEq(c) | DataNeq(c) => {
            out.insert(c.clone());
        }
        PathEq(p, q) | PathNeq(p, q) => {
            path_constants(p, out);
            path_constants(q, out);
        }
    }
}

/// True when some `<p = q>` appears (excluded by the δ-cost origin cleaner).
pub fn uses_path_equality(e: &Expr) -> bool {
    fn in_path(p: &PathExpr) -> bool {
        use PathExpr::*;
        match p {
            Epsilon | Wildcard | Label(_) | InverseLabel(_) => false,
            Test(n) => in_node(n),
            Concat(a, b) | Union(a, b) | Intersect(a, b) => in_path(a) || in_path(b),
            Star(a) | Complement(a) | Repeat(a, _, _) => in_path(a),
        }
    }
    fn in_node(n: &NodeExpr) -> bool {
        use NodeExpr::*;
        match n {
            Not(a) => in_node(a),
            And(a, b) | Or(a, b) => in_node(a) || in_node(b),
            Exists(p) => in_path(p),
            DataEq(_) | DataNeq(_) => false,
            PathEq(..) => true,
            PathNeq(p, q) => in_path(p) || in_path(q),
        }
    }
    match e {
        Expr::Path(p) => in_path(p),
        Expr::Node(n) => in_node(n),
    }
}
