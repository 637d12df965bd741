use crate::io::{
    emit, graph_json, load_graph, load_model, load_prior, load_query, malformed, node_query, parse_bound, rational_fields,
    read_json, read_text,
};
use crate::Settings;
use anyhow::{Context, Result};
use pudg_core::cleaning::{
    clean, clean_bound, clean_cardinality, clean_fixed_assignment, clean_min_distinct, clean_node_update,
    clean_origin_expression, clean_subset_bounded, clean_superset_bounded, isomorphic_repair, CleaningResult,
    TransitionCost,
};
use pudg_core::constraints::{parse_restriction_set, reweight_explicit, reweight_prior};
use pudg_core::datagraph::GraphDocument;
use pudg_core::emdg::{KDataPrior, Prior, Pudg, Restriction};
use pudg_core::rational::parse_rational;
use pudg_core::{NodeId, Rational};
use num_traits::Zero;
use serde_json::{json, Map, Value};
use std::collections::{BTreeMap, BTreeSet};

/// Observed graph, observer, prior and optional weighted constraints.
#[derive(clap::Args, Debug)]
pub struct PudgArgs {
    /// Observed graph (JSON).
    #[arg(long)]
    pub graph: String,
    /// Observer descriptor (JSON).
    #[arg(long)]
    pub model: Option<String>,
    /// Prior descriptor (JSON); defaults to the flat prior.
    #[arg(long)]
    pub prior: Option<String>,
    /// Weighted restriction set applied to the prior.
    #[arg(long)]
    pub constraints: Option<String>,
}

pub fn build_pudg(a: &PudgArgs, observed: GraphDocument, s: &Settings) -> Result<Pudg> {
    let model = load_model(a.model.as_deref().ok_or_else(|| malformed("--model is required"))?)?;
    let mut prior = match &a.prior {
        Some(p) => load_prior(p)?,
        None => Prior::intensional(|_| Rational::from_integer(1.into())),
    };
    if let Some(c) = &a.constraints {
        let w = parse_restriction_set(&read_text(c)?).with_context(|| format!("constraints {c}"))?;
        prior = if prior.entries().is_some() {
            reweight_explicit(&prior, &w)?
        } else {
            reweight_prior(&prior, &w)
        };
    }
    Ok(s.pudg(Pudg::new(prior, model, observed.graph)))
}

pub fn load_pudg(a: &PudgArgs, s: &Settings) -> Result<Pudg> {
    let doc = load_graph(&a.graph)?;
    build_pudg(a, doc, s)
}

#[derive(clap::ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Solver {
    /// Picked from the instance file, the query, or the observer class.
    Auto,
    Exhaustive,
    SubsetBounded,
    SupersetBounded,
    NodeUpdate,
    Matching,
    Cardinality,
    Hitting,
    OriginExpr,
    Repair,
}

#[derive(clap::Args, Debug)]
pub struct Args {
    #[command(flatten)]
    pudg: PudgArgs,
    #[arg(long, value_enum, default_value = "auto")]
    solver: Solver,
    /// Decide whether some clean graph has posterior probability above this.
    #[arg(long)]
    bound: Option<String>,
    /// Size parameter of the bounded cleaners (`k_e`, `c` or `z`).
    #[arg(long)]
    k: Option<usize>,
    /// Specialized instance (matching weights, cardinality target and
    /// costs, or allowed value sets).
    #[arg(long)]
    instance: Option<String>,
    /// Node expression for the origin and repair solvers.
    #[arg(long)]
    query: Option<String>,
    /// Origin node (defaults to the graph file's origin).
    #[arg(long)]
    origin: Option<NodeId>,
}

fn metadata(
    score: Option<&Rational>,
    probability: Option<&Rational>,
    cost: Option<u64>,
    examined: Option<u64>,
    exact: bool,
) -> Value {
    let mut m = Map::new();
    rational_fields(&mut m, "score", score);
    rational_fields(&mut m, "probability", probability);
    m.insert("cost".into(), json!(cost));
    m.insert("candidates_examined".into(), json!(examined));
    m.insert("exact".into(), json!(exact));
    Value::Object(m)
}

fn from_result(r: &CleaningResult) -> Value {
    json!({
        "graph": graph_json(&r.best, None),
        "metadata": metadata(Some(&r.score), r.probability.as_ref(), None, Some(r.candidates_examined), r.probability.is_some()),
    })
}

fn infer(a: &Args, instance: Option<&Value>, pudg: Option<&Pudg>) -> Result<Solver> {
    if let Some(v) = instance {
        for (key, solver) in [
            ("values", Solver::Matching),
            ("target", Solver::Cardinality),
            ("allowed", Solver::Hitting),
        ] {
            if v.get(key).is_some() {
                return Ok(solver);
            }
        }
    }
    if a.query.is_some() {
        return Ok(if instance.is_some() { Solver::OriginExpr } else { Solver::Repair });
    }
    let Some(p) = pudg else {
        return Err(malformed("need --model, --instance or --query"));
    };
    Ok(match (p.model.restriction(), a.k) {
        (Restriction::Subset { .. }, Some(_)) => Solver::SubsetBounded,
        (Restriction::Superset { .. }, Some(_)) => Solver::SupersetBounded,
        (Restriction::NodeUpdate { .. }, Some(_)) => Solver::NodeUpdate,
        _ => Solver::Exhaustive,
    })
}

fn str_map<T>(v: &Value, what: &str, f: impl Fn(&Value) -> Result<T>) -> Result<BTreeMap<String, T>> {
    let Some(obj) = v.as_object() else {
        return Err(malformed(format!("`{what}` must be an object")));
    };
    obj.iter().map(|(k, x)| Ok((k.clone(), f(x)?))).collect()
}

fn node_key(k: &str) -> Result<NodeId> {
    k.parse().map_err(|_| malformed(format!("bad node id `{k}`")))
}

fn string(v: &Value) -> Result<String> {
    v.as_str().map(String::from).ok_or_else(|| malformed(format!("expected a string, got {v}")))
}

fn strings(v: &Value) -> Result<Vec<String>> {
    v.as_array()
        .ok_or_else(|| malformed(format!("expected an array, got {v}")))?
        .iter()
        .map(string)
        .collect()
}

/// `{"universe": [...], "table": [["a", "b", 3], ...], "default": 1}`; with
/// no table every change costs `default`.
fn transition_cost(v: Option<&Value>, fallback_universe: Vec<String>) -> Result<TransitionCost> {
    let Some(v) = v else {
        return Ok(TransitionCost::uniform(Some(fallback_universe)));
    };
    let universe = match v.get("universe") {
        Some(u) => strings(u)?,
        None => fallback_universe,
    };
    let default = v.get("default").and_then(Value::as_u64).unwrap_or(1);
    let mut table = BTreeMap::new();
    for row in v.get("table").and_then(Value::as_array).into_iter().flatten() {
        match row.as_array().map(Vec::as_slice) {
            Some([a, b, c]) => {
                let cost = c.as_u64().ok_or_else(|| malformed("costs are natural numbers"))?;
                table.insert((string(a)?, string(b)?), cost);
            }
            _ => return Err(malformed("table rows are [from, to, cost]")),
        }
    }
    Ok(TransitionCost::from_table(universe, table, default))
}

fn origin_of(a: &Args, doc: &GraphDocument) -> Option<NodeId> {
    a.origin.or(doc.origin)
}

pub fn run(a: Args, s: &Settings) -> Result<u8> {
    let doc = load_graph(&a.pudg.graph)?;
    let instance = a.instance.as_deref().map(read_json).transpose()?;
    let pudg = match a.pudg.model {
        Some(_) => Some(build_pudg(&a.pudg, doc.clone(), s)?),
        None => None,
    };
    let solver = match a.solver {
        Solver::Auto => infer(&a, instance.as_ref(), pudg.as_ref())?,
        other => other,
    };
    let need_pudg = || pudg.as_ref().ok_or_else(|| malformed("this solver needs --model"));
    let need_k = || a.k.ok_or_else(|| malformed("this solver needs --k"));
    let need_instance = || instance.as_ref().ok_or_else(|| malformed("this solver needs --instance"));
    let g = &doc.graph;
    let out = match solver {
        Solver::Auto => unreachable!("resolved above"),
        Solver::Exhaustive => {
            let p = need_pudg()?;
            let mut out = match clean(p) {
                Ok(r) => from_result(&r),
                Err(pudg_core::Error::NoCandidate) if a.bound.is_some() => json!({"graph": null}),
                Err(e) => return Err(e.into()),
            };
            if let Some(b) = &a.bound {
                out["decision"] = json!(clean_bound(p, &parse_bound(b)?)?);
            }
            out
        }
        Solver::SubsetBounded => from_result(&clean_subset_bounded(need_pudg()?, need_k()?)?),
        Solver::SupersetBounded => from_result(&clean_superset_bounded(need_pudg()?, need_k()?)?),
        Solver::NodeUpdate => {
            let p = need_pudg()?;
            let f = match p.model.restriction() {
                Restriction::NodeUpdate { f, .. } | Restriction::Update { f, .. } => f.clone(),
                _ => KDataPrior::identity(),
            };
            from_result(&clean_node_update(p, &f, need_k()?)?)
        }
        Solver::Matching => {
            let v = need_instance()?;
            let values = strings(v.get("values").ok_or_else(|| malformed("matching needs `values`"))?)?;
            let known = match v.get("known") {
                Some(k) => str_map(k, "known", string)?
                    .into_iter()
                    .map(|(n, d)| Ok((node_key(&n)?, d)))
                    .collect::<Result<BTreeMap<_, _>>>()?,
                None => BTreeMap::new(),
            };
            let empty = json!({});
            let weights = str_map(v.get("weights").unwrap_or(&empty), "weights", |row| {
                str_map(row, "weights row", |x| {
                    Ok(parse_rational(&string(x)?)?)
                })
            })?;
            let mut w: BTreeMap<(String, NodeId), Rational> = BTreeMap::new();
            for (d, row) in weights {
                for (n, x) in row {
                    w.insert((d.clone(), node_key(&n)?), x);
                }
            }
            let r = clean_fixed_assignment(g, &values, &known, |d, n| {
                w.get(&(d.to_string(), n)).cloned().unwrap_or_else(Rational::zero)
            })?;
            json!({
                "graph": graph_json(&r.graph, None),
                "metadata": metadata(Some(&r.product), None, None, None, true),
            })
        }
        Solver::Cardinality => {
            let v = need_instance()?;
            let target = str_map(
                v.get("target").ok_or_else(|| malformed("cardinality needs `target`"))?,
                "target",
                |x| x.as_u64().map(|n| n as usize).ok_or_else(|| malformed("target counts are naturals")),
            )?;
            let universe: BTreeSet<String> = target.keys().cloned().chain(g.data_values().into_iter().map(String::from)).collect();
            let delta = transition_cost(v.get("delta"), universe.into_iter().collect())?;
            let (h, cost) = clean_cardinality(g, &target, &delta)?;
            json!({
                "graph": graph_json(&h, None),
                "metadata": metadata(None, None, Some(cost), None, true),
            })
        }
        Solver::Hitting => {
            let v = need_instance()?;
            let allowed = str_map(
                v.get("allowed").ok_or_else(|| malformed("hitting needs `allowed`"))?,
                "allowed",
                |x| Ok(strings(x)?.into_iter().collect::<BTreeSet<_>>()),
            )?
            .into_iter()
            .map(|(n, set)| Ok((node_key(&n)?, set)))
            .collect::<Result<BTreeMap<_, _>>>()?;
            let cap = v.get("cap").and_then(Value::as_u64).unwrap_or(s.budget.max_candidates) as usize;
            let r = clean_min_distinct(g, &allowed, cap)?;
            json!({
                "graph": graph_json(&r.graph, None),
                "values": r.values,
                "metadata": metadata(None, None, Some(r.values.len() as u64), None, r.exact),
            })
        }
        Solver::OriginExpr => {
            let q = a.query.as_deref().ok_or_else(|| malformed("origin-expr needs --query"))?;
            let nu = node_query(load_query(q, s.max_repeat)?, "origin-expr")?;
            let o = origin_of(&a, &doc).ok_or_else(|| malformed("origin-expr needs an origin"))?;
            let mut universe: BTreeSet<String> = g.data_values().into_iter().map(String::from).collect();
            universe.extend(pudg_core::gxpath::mentioned_data_values(&pudg_core::gxpath::Expr::Node(nu.clone())));
            let delta = match instance.as_ref().and_then(|v| v.get("delta")) {
                Some(d) => transition_cost(Some(d), universe.into_iter().collect())?,
                None => TransitionCost::uniform(None),
            };
            let r = clean_origin_expression(g, o, &nu, &delta, &s.budget)?;
            json!({
                "graph": graph_json(&r.graph, Some(o)),
                "metadata": metadata(None, None, Some(r.cost), None, true),
            })
        }
        Solver::Repair => {
            let q = a.query.as_deref().ok_or_else(|| malformed("repair needs --query"))?;
            let nu = node_query(load_query(q, s.max_repeat)?, "repair")?;
            let o = origin_of(&a, &doc);
            match isomorphic_repair(g, &nu, o, &s.budget)? {
                Some(h) => json!({
                    "graph": graph_json(&h, o),
                    "metadata": metadata(None, None, None, None, true),
                }),
                None => return Err(pudg_core::Error::NoCandidate.into()),
            }
        }
    };
    emit(&out);
    Ok(0)
}
