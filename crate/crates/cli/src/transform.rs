use crate::io::{emit, graph_json, load_graph, load_query, malformed, node_query, path_query};
use crate::Settings;
use anyhow::Result;
use pudg_core::gxpath::{
    eliminate_star, fragment_of, path_to_bipointed, path_to_global, to_global, to_origin, Expr,
};
use pudg_core::NodeId;
use serde_json::json;

#[derive(clap::ValueEnum, Clone, Copy, Debug)]
pub enum Kind {
    /// Remove Kleene stars from a positive core expression.
    StarElim,
    /// Global node expression to origin semantics.
    ToOrigin,
    /// Origin node expression to global semantics.
    ToGlobal,
    /// Path expression to a bipointed graph.
    Bipointed,
    /// Path expression checked on one pair to global semantics.
    PathToGlobal,
}

#[derive(clap::Args, Debug)]
pub struct Args {
    #[arg(long)]
    graph: String,
    /// Query text, or a file holding it.
    #[arg(long)]
    query: String,
    #[arg(long, value_enum)]
    kind: Kind,
    /// Origin for `to-global` (defaults to the graph file's origin).
    #[arg(long)]
    origin: Option<NodeId>,
    /// Pair for `path-to-global`.
    #[arg(long, num_args = 2, value_names = ["U", "V"])]
    pair: Option<Vec<NodeId>>,
}

pub fn run(a: Args, s: &Settings) -> Result<u8> {
    let doc = load_graph(&a.graph)?;
    let g = &doc.graph;
    let e = load_query(&a.query, s.max_repeat)?;
    let (h, q, extra) = match a.kind {
        Kind::StarElim => {
            let (h, q) = eliminate_star(g, &e)?;
            (h, q, json!({}))
        }
        Kind::ToOrigin => {
            let (h, o, nu) = to_origin(g, &node_query(e, "to-origin")?)?;
            (h, Expr::Node(nu), json!({"origin": o}))
        }
        Kind::ToGlobal => {
            let o = a.origin.or(doc.origin).ok_or_else(|| malformed("to-global needs an origin"))?;
            let (h, nu) = to_global(g, o, &node_query(e, "to-global")?)?;
            (h, Expr::Node(nu), json!({}))
        }
        Kind::Bipointed => {
            let (h, u, v, p) = path_to_bipointed(g, &path_query(e, "bipointed")?)?;
            (h, Expr::Path(p), json!({"pair": [u, v]}))
        }
        Kind::PathToGlobal => {
            let Some(&[u, v]) = a.pair.as_deref() else {
                return Err(malformed("path-to-global needs --pair U V"));
            };
            let (h, p) = path_to_global(g, u, v, &path_query(e, "path-to-global")?)?;
            (h, Expr::Path(p), json!({}))
        }
    };
    let mut out = json!({
        "graph": graph_json(&h, extra.get("origin").and_then(|o| o.as_u64())),
        "query": q.to_string(),
        "fragment": format!("{:?}", fragment_of(&q)),
    });
    for (k, v) in extra.as_object().expect("object") {
        out[k] = v.clone();
    }
    emit(&out);
    Ok(0)
}
