//! JSON descriptors for the builtin observers, e.g.
//! `{"class": "subset", "kind": "edge_deletion", "p": "1/2"}`.
//!
//! Kinds: `edge_deletion`, `edge_addition`, `uniform`, `data_update` and
//! `flat`. `class` fixes the declared restriction and its bounds, `kind` fixes the
//! weight function. A mismatch is representable on purpose so that
//! `validate_class` can catch it.
//!
//! Priors are either a list `[{"graph": …, "weight": "1/2"}, …]`,
//! `{"kind": "uniform", "graphs": [...]}` or `{"kind": "flat"}` (weight one
//! on every graph, so the posterior is proportional to the observer alone).

use super::prior::Prior;
use super::model::{
    data_update, edge_addition, edge_deletion, edge_deletion_per_label, KDataPrior, RealizationModel,
    Restriction,
};
use crate::datagraph::graph_document_from_value;
use crate::error::{Error, Result};
use crate::rational::{parse_rational, Rational};
use num_traits::{One, Zero};
use serde::Deserialize;
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelJson {
    class: String,
    kind: String,
    p: Option<String>,
    q: Option<String>,
    p_by_label: Option<BTreeMap<String, String>>,
    f: Option<BTreeMap<String, Vec<String>>>,
    k: Option<usize>,
    max_added_edges: Option<usize>,
    #[serde(default)]
    node_deletions: bool,
    max_removed: Option<usize>,
    #[serde(default)]
    node_additions: bool,
    max_updates: Option<usize>,
    max_relabeled_pairs: Option<usize>,
}

fn rational_field(value: &Option<String>, name: &str) -> Result<Rational> {
    match value {
        Some(s) => parse_rational(s),
        None => Err(Error::InvalidInput(format!("model descriptor needs `{name}`"))),
    }
}

fn k_data_prior(m: &ModelJson) -> Result<KDataPrior> {
    match &m.f {
        None => Ok(KDataPrior::identity()),
        Some(f) => {
            let map: BTreeMap<String, BTreeSet<String>> = f
                .iter()
                .map(|(c, vs)| (c.clone(), vs.iter().cloned().collect()))
                .collect();
            let widest = map
                .iter()
                .map(|(c, vs)| vs.iter().filter(|d| *d != c).count())
                .max()
                .unwrap_or(0);
            KDataPrior::new(m.k.unwrap_or(widest), map)
        }
    }
}

fn restriction(m: &ModelJson) -> Result<Restriction> {
    Ok(match m.class.as_str() {
        "subset" => Restriction::Subset {
            max_added_edges: m.max_added_edges,
            node_deletions: m.node_deletions,
        },
        "superset" => Restriction::Superset {
            max_removed: m.max_removed,
            node_additions: m.node_additions,
        },
        "node_update" => Restriction::NodeUpdate {
            max_updates: m.max_updates,
            f: k_data_prior(m)?,
        },
        "update" => Restriction::Update {
            max_relabeled_pairs: m.max_relabeled_pairs,
            max_updates: m.max_updates,
            f: k_data_prior(m)?,
        },
        "general" => Restriction::General,
        other => {
            return Err(Error::InvalidInput(format!("unknown model class `{other}`")));
        }
    })
}

pub fn model_from_value(value: &serde_json::Value) -> Result<RealizationModel> {
    let m: ModelJson =
        serde_json::from_value(value.clone()).map_err(|e| Error::Json(e.to_string()))?;
    let declared = restriction(&m)?;
    let half = || Rational::new(1.into(), 2.into());
    let base = match m.kind.as_str() {
        "edge_deletion" => match &m.p_by_label {
            Some(per) => edge_deletion_per_label(
                per.iter()
                    .map(|(l, p)| Ok((l.clone(), parse_rational(p)?)))
                    .collect::<Result<_>>()?,
            )?,
            None => edge_deletion(rational_field(&m.p, "p")?)?,
        },
        "edge_addition" => edge_addition(rational_field(&m.p, "p")?)?,
        // weight one on every admitted pair: the posterior is the prior
        // conditioned on the cosupport
        "flat" => {
            let r = declared.clone();
            RealizationModel::new("flat", Restriction::General, move |clean, obs| {
                if r.admits(clean, obs) {
                    Rational::one()
                } else {
                    Rational::zero()
                }
            })
        }
        "uniform" => match m.class.as_str() {
            "subset" => edge_deletion(half())?,
            "superset" => edge_addition(half())?,
            other => {
                return Err(Error::InvalidInput(format!(
                    "no uniform observer for class `{other}`"
                )))
            }
        },
        "data_update" => data_update(rational_field(&m.q, "q")?, k_data_prior(&m)?, m.max_updates)?,
        other => return Err(Error::InvalidInput(format!("unknown model kind `{other}`"))),
    };
    Ok(base.with_restriction(declared))
}

pub fn parse_model(text: &str) -> Result<RealizationModel> {
    let v: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::Json(e.to_string()))?;
    model_from_value(&v)
}

fn json_err(e: serde_json::Error) -> Error {
    Error::Json(e.to_string())
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PriorEntry {
    graph: serde_json::Value,
    weight: String,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum PriorJson {
    Explicit { entries: Vec<PriorEntry> },
    Uniform { graphs: Vec<serde_json::Value> },
    Flat,
}

fn explicit(entries: Vec<PriorEntry>) -> Result<Prior> {
    let mut out = Vec::with_capacity(entries.len());
    for e in entries {
        out.push((graph_document_from_value(&e.graph)?.graph, parse_rational(&e.weight)?));
    }
    Prior::explicit(out)
}

pub fn prior_from_value(value: &serde_json::Value) -> Result<Prior> {
    if value.is_array() {
        return explicit(serde_json::from_value(value.clone()).map_err(json_err)?);
    }
    match serde_json::from_value(value.clone()).map_err(json_err)? {
        PriorJson::Explicit { entries } => explicit(entries),
        PriorJson::Uniform { graphs } => Prior::uniform(
            graphs
                .iter()
                .map(|g| Ok(graph_document_from_value(g)?.graph))
                .collect::<Result<Vec<_>>>()?,
        ),
        PriorJson::Flat => Ok(Prior::intensional(|_| Rational::one())),
    }
}

pub fn parse_prior(text: &str) -> Result<Prior> {
    let v: serde_json::Value = serde_json::from_str(text).map_err(json_err)?;
    prior_from_value(&v)
}
