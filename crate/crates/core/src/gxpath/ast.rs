use crate::datagraph::{DataValue, EdgeLabel};
use std::collections::BTreeSet;
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PathExpr {
    Epsilon,
    Wildcard,
    Label(EdgeLabel),
    InverseLabel(EdgeLabel),
    Test(Box<NodeExpr>),
    Concat(Box<PathExpr>, Box<PathExpr>),
    Union(Box<PathExpr>, Box<PathExpr>),
    Intersect(Box<PathExpr>, Box<PathExpr>),
    Star(Box<PathExpr>),
    Complement(Box<PathExpr>),
    Repeat(Box<PathExpr>, u32, u32),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeExpr {
    Not(Box<NodeExpr>),
    And(Box<NodeExpr>, Box<NodeExpr>),
    Or(Box<NodeExpr>, Box<NodeExpr>),
    Exists(Box<PathExpr>),
    DataEq(DataValue),
    DataNeq(DataValue),
    PathEq(Box<PathExpr>, Box<PathExpr>),
    PathNeq(Box<PathExpr>, Box<PathExpr>),
}

/// A query is either a path expression or a node expression.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    Path(PathExpr),
    Node(NodeExpr),
}

impl From<PathExpr> for Expr {
    fn from(p: PathExpr) -> Self {
        Expr::Path(p)
    }
}

impl From<NodeExpr> for Expr {
    fn from(n: NodeExpr) -> Self {
        Expr::Node(n)
    }
}

/// Terse constructors, handy in tests and gadget builders.
pub mod build {
    use super::*;

    pub fn eps() -> PathExpr {
        PathExpr::Epsilon
    }
    pub fn any() -> PathExpr {
        PathExpr::Wildcard
    }
    pub fn label(l: &str) -> PathExpr {
        PathExpr::Label(l.to_string())
    }
    pub fn inv(l: &str) -> PathExpr {
        PathExpr::InverseLabel(l.to_string())
    }
    pub fn test(n: NodeExpr) -> PathExpr {
        PathExpr::Test(Box::new(n))
    }
    pub fn concat(p: PathExpr, q: PathExpr) -> PathExpr {
        PathExpr::Concat(Box::new(p), Box::new(q))
    }
    /// Left-nested concatenation of a non-empty sequence.
    pub fn seq(parts: impl IntoIterator<Item = PathExpr>) -> PathExpr {
        let mut it = parts.into_iter();
        let first = it.next().expect("seq needs at least one part");
        it.fold(first, concat)
    }
    pub fn union(p: PathExpr, q: PathExpr) -> PathExpr {
        PathExpr::Union(Box::new(p), Box::new(q))
    }
    pub fn inter(p: PathExpr, q: PathExpr) -> PathExpr {
        PathExpr::Intersect(Box::new(p), Box::new(q))
    }
    pub fn star(p: PathExpr) -> PathExpr {
        PathExpr::Star(Box::new(p))
    }
    pub fn complement(p: PathExpr) -> PathExpr {
        PathExpr::Complement(Box::new(p))
    }
    pub fn repeat(p: PathExpr, n: u32, m: u32) -> PathExpr {
        PathExpr::Repeat(Box::new(p), n, m)
    }
    pub fn not(n: NodeExpr) -> NodeExpr {
        NodeExpr::Not(Box::new(n))
    }
    pub fn and(a: NodeExpr, b: NodeExpr) -> NodeExpr {
        NodeExpr::And(Box::new(a), Box::new(b))
    }
    pub fn or(a: NodeExpr, b: NodeExpr) -> NodeExpr {
        NodeExpr::Or(Box::new(a), Box::new(b))
    }
    /// Left-nested disjunction of a non-empty sequence.
    pub fn any_of(parts: impl IntoIterator<Item = NodeExpr>) -> NodeExpr {
        let mut it = parts.into_iter();
        let first = it.next().expect("any_of needs at least one part");
        it.fold(first, or)
    }
    pub fn exists(p: PathExpr) -> NodeExpr {
        NodeExpr::Exists(Box::new(p))
    }
    pub fn eq(c: &str) -> NodeExpr {
        NodeExpr::DataEq(c.to_string())
    }
    pub fn neq(c: &str) -> NodeExpr {
        NodeExpr::DataNeq(c.to_string())
    }
    pub fn path_eq(p: PathExpr, q: PathExpr) -> NodeExpr {
        NodeExpr::PathEq(Box::new(p), Box::new(q))
    }
    pub fn path_neq(p: PathExpr, q: PathExpr) -> NodeExpr {
        NodeExpr::PathNeq(Box::new(p), Box::new(q))
    }
}

impl PathExpr {
    /// Number of AST nodes, counting node sub-expressions.
    pub fn size(&self) -> usize {
        use PathExpr::*;
        1 + match self {
            Epsilon | Wildcard | Label(_) | InverseLabel(_) => 0,
            Test(n) => n.size(),
            Concat(p, q) | Union(p, q) | Intersect(p, q) => p.size() + q.size(),
            Star(p) | Complement(p) | Repeat(p, _, _) => p.size(),
        }
    }

    pub fn labels(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        self.collect_labels(&mut out);
        out
    }

    fn collect_labels<'a>(&'a self, out: &mut BTreeSet<&'a str>) {
        use PathExpr::*;
        match self {
            Epsilon | Wildcard => {}
            Label(l) | InverseLabel(l) => {
                out.insert(l);
            }
            Test(n) => n.collect_labels(out),
            Concat(p, q) | Union(p, q) | Intersect(p, q) => {
                p.collect_labels(out);
                q.collect_labels(out);
            }
            Star(p) | Complement(p) | Repeat(p, _, _) => p.collect_labels(out),
        }
    }
}

impl NodeExpr {
    pub fn size(&self) -> usize {
        use NodeExpr::*;
        1 + match self {
            Not(a) => a.size(),
            And(a, b) | Or(a, b) => a.size() + b.size(),
            Exists(p) => p.size(),
            DataEq(_) | DataNeq(_) => 0,
            PathEq(p, q) | PathNeq(p, q) => p.size() + q.size(),
        }
    }

    pub fn labels(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        self.collect_labels(&mut out);
        out
    }

    fn collect_labels<'a>(&'a self, out: &mut BTreeSet<&'a str>) {
        use NodeExpr::*;
        match self {
            Not(a) => a.collect_labels(out),
            And(a, b) | Or(a, b) => {
                a.collect_labels(out);
                b.collect_labels(out);
            }
            Exists(p) => p.collect_labels(out),
            DataEq(_) | DataNeq(_) => {}
            PathEq(p, q) | PathNeq(p, q) => {
                p.collect_labels(out);
                q.collect_labels(out);
            }
        }
    }
}

impl Expr {
    pub fn labels(&self) -> BTreeSet<&str> {
        match self {
            Expr::Path(p) => p.labels(),
            Expr::Node(n) => n.labels(),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Expr::Path(p) => p.size(),
            Expr::Node(n) => n.size(),
        }
    }
}

// ---------------------------------------------------------------------------
// Pretty printing. Output re-parses to the identical AST: binary operators
// parse left-associatively, so a right operand at the same level gets parens.

const KEYWORDS: [&str; 2] = ["eps", "not"];

pub(crate) fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphanumeric()
}

pub(crate) fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

/// Bare identifiers: `[A-Za-z0-9][A-Za-z0-9_]*`, where a `+` or `-` may
/// follow an underscore (so `down_+` is one identifier).
pub(crate) fn is_bare_identifier(s: &str) -> bool {
    let mut chars = s.chars().peekable();
    match chars.next() {
        Some(c) if is_ident_start(c) => {}
        _ => return false,
    }
    let mut prev = ' ';
    for c in chars {
        let ok = is_ident_char(c) || ((c == '+' || c == '-') && prev == '_');
        if !ok {
            return false;
        }
        prev = c;
    }
    !KEYWORDS.contains(&s)
}

fn write_name(f: &mut fmt::Formatter<'_>, s: &str) -> fmt::Result {
    if is_bare_identifier(s) {
        f.write_str(s)
    } else {
        f.write_str("\"")?;
        for c in s.chars() {
            match c {
                '"' => f.write_str("\\\"")?,
                '\\' => f.write_str("\\\\")?,
                _ => write!(f, "{c}")?,
            }
        }
        f.write_str("\"")
    }
}

// path levels: 0 union, 1 intersect, 2 concat, 3 complement, 4 postfix/atom
fn path_level(p: &PathExpr) -> u8 {
    match p {
        PathExpr::Union(..) => 0,
        PathExpr::Intersect(..) => 1,
        PathExpr::Concat(..) => 2,
        PathExpr::Complement(..) => 3,
        _ => 4,
    }
}

fn write_path(f: &mut fmt::Formatter<'_>, p: &PathExpr, min_level: u8) -> fmt::Result {
    let paren = path_level(p) < min_level;
    if paren {
        f.write_str("(")?;
    }
    match p {
        PathExpr::Epsilon => f.write_str("eps")?,
        PathExpr::Wildcard => f.write_str("_")?,
        PathExpr::Label(l) => write_name(f, l)?,
        PathExpr::InverseLabel(l) => {
            write_name(f, l)?;
            f.write_str("^-")?;
        }
        PathExpr::Test(n) => {
            f.write_str("[")?;
            write_node(f, n, 0)?;
            f.write_str("]")?;
        }
        PathExpr::Union(a, b) => {
            write_path(f, a, 0)?;
            f.write_str(" + ")?;
            write_path(f, b, 1)?;
        }
        PathExpr::Intersect(a, b) => {
            write_path(f, a, 1)?;
            f.write_str(" & ")?;
            write_path(f, b, 2)?;
        }
        PathExpr::Concat(a, b) => {
            write_path(f, a, 2)?;
            f.write_str(" / ")?;
            write_path(f, b, 3)?;
        }
        PathExpr::Complement(a) => {
            f.write_str("!")?;
            write_path(f, a, 3)?;
        }
        PathExpr::Star(a) => {
            write_path(f, a, 4)?;
            f.write_str("*")?;
        }
        PathExpr::Repeat(a, n, m) => {
            write_path(f, a, 4)?;
            write!(f, "{{{n},{m}}}")?;
        }
    }
    if paren {
        f.write_str(")")?;
    }
    Ok(())
}

// node levels: 0 or, 1 and, 2 not, 3 atom
fn node_level(n: &NodeExpr) -> u8 {
    match n {
        NodeExpr::Or(..) => 0,
        NodeExpr::And(..) => 1,
        NodeExpr::Not(..) => 2,
        _ => 3,
    }
}

fn write_node(f: &mut fmt::Formatter<'_>, n: &NodeExpr, min_level: u8) -> fmt::Result {
    let paren = node_level(n) < min_level;
    if paren {
        f.write_str("(")?;
    }
    match n {
        NodeExpr::Or(a, b) => {
            write_node(f, a, 0)?;
            f.write_str(" | ")?;
            write_node(f, b, 1)?;
        }
        NodeExpr::And(a, b) => {
            write_node(f, a, 1)?;
            f.write_str(" & ")?;
            write_node(f, b, 2)?;
        }
        NodeExpr::Not(a) => {
            f.write_str("not ")?;
            write_node(f, a, 2)?;
        }
        NodeExpr::Exists(p) => {
            f.write_str("<")?;
            write_path(f, p, 0)?;
            f.write_str(">")?;
        }
        NodeExpr::DataEq(c) => {
            f.write_str("=")?;
            write_name(f, c)?;
        }
        NodeExpr::DataNeq(c) => {
            f.write_str("!=")?;
            write_name(f, c)?;
        }
        NodeExpr::PathEq(p, q) => {
            f.write_str("<")?;
            write_path(f, p, 0)?;
            f.write_str(" = ")?;
            write_path(f, q, 0)?;
            f.write_str(">")?;
        }
        NodeExpr::PathNeq(p, q) => {
            f.write_str("<")?;
            write_path(f, p, 0)?;
            f.write_str(" != ")?;
            write_path(f, q, 0)?;
            f.write_str(">")?;
        }
    }
    if paren {
        f.write_str(")")?;
    }
    Ok(())
}

impl fmt::Display for PathExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_path(f, self, 0)
    }
}

impl fmt::Display for NodeExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_node(f, self, 0)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Path(p) => p.fmt(f),
            Expr::Node(n) => n.fmt(f),
        }
    }
}
