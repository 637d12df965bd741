use crate::io::{emit, load_graph, load_query, malformed};
use crate::Settings;
use anyhow::Result;
use pudg_core::gxpath::{eval_node, eval_path, satisfies_at, satisfies_global, satisfies_pair, Expr};
use pudg_core::NodeId;
use serde_json::json;

#[derive(clap::Args, Debug)]
#[command(group = clap::ArgGroup::new("target").multiple(false))]
pub struct Args {
    #[arg(long)]
    graph: String,
    /// Query text, or a file holding it.
    #[arg(long)]
    query: String,
    /// Check a node expression at one node.
    #[arg(long, group = "target")]
    origin: Option<NodeId>,
    /// Check a path expression on one pair.
    #[arg(long, num_args = 2, value_names = ["U", "V"], group = "target")]
    pair: Option<Vec<NodeId>>,
    /// List the full denotation (the default).
    #[arg(long, group = "target")]
    all: bool,
}

pub fn run(a: Args, s: &Settings) -> Result<u8> {
    let g = load_graph(&a.graph)?.graph;
    let e = load_query(&a.query, s.max_repeat)?;
    let out = match (&e, a.origin, a.pair.as_deref()) {
        (Expr::Node(n), Some(o), None) => json!({"origin": o, "satisfied": satisfies_at(&g, o, n)?}),
        (Expr::Path(p), None, Some(&[u, v])) => {
            json!({"pair": [u, v], "satisfied": satisfies_pair(&g, u, v, p)?})
        }
        (Expr::Node(n), None, None) => json!({
            "kind": "node",
            "nodes": eval_node(&g, n)?,
            "global": satisfies_global(&g, &e)?,
        }),
        (Expr::Path(p), None, None) => json!({
            "kind": "path",
            "pairs": eval_path(&g, p)?.into_iter().map(|(u, v)| [u, v]).collect::<Vec<_>>(),
        }),
        (Expr::Path(_), Some(_), _) => return Err(malformed("--origin needs a node expression")),
        (Expr::Node(_), _, Some(_)) => return Err(malformed("--pair needs a path expression")),
        _ => return Err(malformed("--pair takes exactly two nodes")),
    };
    emit(&out);
    Ok(0)
}
