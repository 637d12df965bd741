use anyhow::{Context, Result};
use pudg_core::datagraph::{graph_document_from_value, graph_to_value, GraphDocument};
use pudg_core::emdg::{parse_model, parse_prior, Prior, RealizationModel};
use pudg_core::gxpath::{parse_query, Expr, NodeExpr, PathExpr};
use pudg_core::rational::{format_rational, parse_rational, to_decimal};
use pudg_core::{DataGraph, NodeId, Rational};
use serde_json::{json, Value};
use std::fmt;
use std::io::Read;
use std::path::Path;

/// Unreadable or unparsable input; maps to exit code 2.
#[derive(Debug)]
pub struct Malformed(pub String);

impl fmt::Display for Malformed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Malformed {}

pub fn malformed(msg: impl Into<String>) -> anyhow::Error {
    Malformed(msg.into()).into()
}

/// Reads a file, or stdin for `-`.
pub fn read_text(path: &str) -> Result<String> {
    if path == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| malformed(format!("reading stdin: {e}")))?;
        return Ok(s);
    }
    std::fs::read_to_string(path).map_err(|e| malformed(format!("reading {path}: {e}")))
}

pub fn read_json(path: &str) -> Result<Value> {
    let text = read_text(path)?;
    serde_json::from_str(&text).map_err(|e| malformed(format!("{path}: {e}")))
}

pub fn load_graph(path: &str) -> Result<GraphDocument> {
    let v = read_json(path)?;
    Ok(graph_document_from_value(&v).with_context(|| format!("graph {path}"))?)
}

pub fn load_model(path: &str) -> Result<RealizationModel> {
    Ok(parse_model(&read_text(path)?).with_context(|| format!("model {path}"))?)
}

pub fn load_prior(path: &str) -> Result<Prior> {
    Ok(parse_prior(&read_text(path)?).with_context(|| format!("prior {path}"))?)
}

/// A query given inline or as the path of a file holding it.
pub fn load_query(arg: &str, max_repeat: u32) -> Result<Expr> {
    let text = if Path::new(arg).is_file() {
        read_text(arg)?
    } else {
        arg.to_string()
    };
    let e = parse_query(text.trim())?;
    let m = max_repeat_of(&e);
    if m > max_repeat {
        return Err(malformed(format!(
            "repetition bound {m} exceeds --max-repeat {max_repeat}"
        )));
    }
    Ok(e)
}

pub fn node_query(e: Expr, what: &str) -> Result<NodeExpr> {
    match e {
        Expr::Node(n) => Ok(n),
        Expr::Path(_) => Err(malformed(format!("{what} needs a node expression"))),
    }
}

pub fn path_query(e: Expr, what: &str) -> Result<PathExpr> {
    match e {
        Expr::Path(p) => Ok(p),
        Expr::Node(_) => Err(malformed(format!("{what} needs a path expression"))),
    }
}

pub fn parse_bound(text: &str) -> Result<Rational> {
    Ok(parse_rational(text).with_context(|| format!("bound `{text}`"))?)
}

fn max_repeat_path(p: &PathExpr) -> u32 {
    use PathExpr::*;
    match p {
        Epsilon | Wildcard | Label(_) | InverseLabel(_) => 0,
        Test(n) => max_repeat_node(n),
        Concat(a, b) | Union(a, b) | Intersect(a, b) => max_repeat_path(a).max(max_repeat_path(b)),
        Star(a) | Complement(a) => max_repeat_path(a),
        Repeat(a, _, m) => (*m).max(max_repeat_path(a)),
    }
}

fn max_repeat_node(n: &NodeExpr) -> u32 {
    use NodeExpr::*;
    match n {
        Not(a) => max_repeat_node(a),
        And(a, b) | Or(a, b) => max_repeat_node(a).max(max_repeat_node(b)),
        Exists(p) => max_repeat_path(p),
        DataEq(_) | DataNeq(_) => 0,
        PathEq(p, q) | PathNeq(p, q) => max_repeat_path(p).max(max_repeat_path(q)),
    }
}

pub fn max_repeat_of(e: &Expr) -> u32 {
    match e {
        Expr::Path(p) => max_repeat_path(p),
        Expr::Node(n) => max_repeat_node(n),
    }
}

/// Exact string plus a decimal approximation.
pub fn rational_fields(out: &mut serde_json::Map<String, Value>, name: &str, r: Option<&Rational>) {
    match r {
        Some(r) => {
            out.insert(name.into(), json!(format_rational(r)));
            out.insert(format!("{name}_decimal"), json!(to_decimal(r)));
        }
        None => {
            out.insert(name.into(), Value::Null);
        }
    }
}

pub fn graph_json(g: &DataGraph, origin: Option<NodeId>) -> Value {
    graph_to_value(g, origin)
}

/// Canonical output: keys sorted, two-space indentation, trailing newline.
/// A closed stdout (e.g. piped into `head`) is not an error.
pub fn emit(v: &Value) {
    use std::io::Write;
    let text = serde_json::to_string_pretty(v).expect("JSON values serialize");
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

pub fn write_file(dir: &Path, name: &str, contents: &str) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let p = dir.join(name);
    std::fs::write(&p, contents).with_context(|| format!("writing {}", p.display()))
}
