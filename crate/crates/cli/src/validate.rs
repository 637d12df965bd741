use crate::io::{load_graph, load_model, load_prior, load_query, emit, read_text};
use crate::Settings;
use anyhow::{Context, Result};
use pudg_core::constraints::parse_restriction_set;
use pudg_core::datagraph::Edge;
use pudg_core::emdg::validate_class;
use pudg_core::gxpath::eval::check_labels;
use pudg_core::gxpath::fragment_of;
use pudg_core::DataGraph;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

#[derive(clap::Args, Debug)]
pub struct Args {
    #[arg(long)]
    graph: String,
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    prior: Option<String>,
    #[arg(long)]
    query: Option<String>,
    #[arg(long)]
    constraints: Option<String>,
    /// Random clean graphs probed by the class check, besides the observed one.
    #[arg(long, default_value_t = 32)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

/// A graph on the same nodes and alphabet with random edges and data drawn
/// from the observed values.
fn random_like(g: &DataGraph, rng: &mut ChaCha8Rng) -> DataGraph {
    let mut pool: Vec<Edge> = g.edges().iter().cloned().collect();
    if pool.len() < 256 {
        pool.extend(g.absent_edges().into_iter().take(256));
    }
    let values: Vec<&str> = g.data_values().into_iter().collect();
    let data = g
        .nodes()
        .map(|v| (v, values.choose(rng).expect("graphs have a node").to_string()))
        .collect();
    let edges: Vec<Edge> = pool.into_iter().filter(|_| rng.gen_bool(0.5)).collect();
    let bare = g.without_edges(g.edges().iter());
    bare.with_data_map(&data)
        .and_then(|h| h.with_edges(&edges))
        .expect("same nodes and alphabet")
}

pub fn run(a: Args, s: &Settings) -> Result<u8> {
    let doc = load_graph(&a.graph)?;
    let g = &doc.graph;
    let mut out = Map::new();
    out.insert(
        "graph".into(),
        json!({"nodes": g.node_count(), "edges": g.edge_count(), "origin": doc.origin}),
    );
    let mut ok = true;
    if let Some(m) = &a.model {
        let model = load_model(m)?;
        let mut samples = vec![g.clone()];
        if g.node_count() > 0 {
            let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
            samples.extend((0..a.samples).map(|_| random_like(g, &mut rng)));
        }
        let valid = validate_class(&model, &samples);
        ok &= valid;
        out.insert(
            "model".into(),
            json!({
                "name": model.name(),
                "class": format!("{:?}", model.klass()),
                "samples": samples.len(),
                "valid": valid,
            }),
        );
    }
    if let Some(p) = &a.prior {
        let prior = load_prior(p)?;
        let info = match prior.entries() {
            Some(e) => json!({"kind": "explicit", "graphs": e.len()}),
            None => json!({"kind": "intensional"}),
        };
        out.insert("prior".into(), info);
    }
    if let Some(q) = &a.query {
        let e = load_query(q, s.max_repeat)?;
        check_labels(g, &e)?;
        out.insert(
            "query".into(),
            json!({"text": e.to_string(), "fragment": format!("{:?}", fragment_of(&e))}),
        );
    }
    if let Some(c) = &a.constraints {
        let w = parse_restriction_set(&read_text(c)?).with_context(|| format!("constraints {c}"))?;
        out.insert("constraints".into(), json!({"count": w.entries().len()}));
    }
    out.insert("valid".into(), json!(ok));
    emit(&Value::Object(out));
    Ok(if ok { 0 } else { 1 })
}
