use crate::io::{emit, graph_json, malformed, read_json, read_text, write_file};
use crate::Settings;
use anyhow::Result;
use clap::ValueEnum;
use pudg_core::cleaning::{clean_bound, isomorphic_repair};
use pudg_core::gadgets::{
    gadget_hampath, gadget_isorepair, gadget_majsat_subset, gadget_majsat_superset, gadget_sat_subset,
    gadget_sat_superset, gadget_sat_update, has_hamiltonian_path, parse_dimacs, Cnf, MajsatGadget, SatGadget,
};
use pudg_core::gxpath::Expr;
use pudg_core::pqa::pqa_bound;
use pudg_core::rational::format_rational;
use serde_json::{json, Value};
use std::collections::BTreeSet;
use std::path::PathBuf;

#[derive(clap::ValueEnum, Clone, Copy, Debug)]
pub enum Kind {
    SatSubset,
    SatSuperset,
    SatUpdate,
    Isorepair,
    Hampath,
    MajsatSubset,
    MajsatSuperset,
}

#[derive(clap::Args, Debug)]
pub struct Args {
    #[arg(long, value_enum)]
    kind: Kind,
    /// DIMACS CNF formula (every kind except hampath).
    #[arg(long)]
    cnf: Option<String>,
    /// Digraph `{"n": 4, "edges": [[0, 1], ...], "start": 0}` for hampath,
    /// vertices numbered from 0.
    #[arg(long)]
    digraph: Option<String>,
    /// Start vertex, overriding the digraph file.
    #[arg(long)]
    start: Option<usize>,
    /// Also solve the instance and compare with a brute-force oracle.
    #[arg(long)]
    solve: bool,
    /// Directory receiving observed.json, query.txt and bundle.json.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn formula(a: &Args) -> Result<Cnf> {
    let path = a.cnf.as_deref().ok_or_else(|| malformed("this gadget needs --cnf"))?;
    Ok(parse_dimacs(&read_text(path)?)?)
}

fn sat_bundle(g: SatGadget, cnf: &Cnf, solve: bool) -> Result<Value> {
    let mut out = json!({
        "observed": graph_json(&g.pudg.observed, None),
        "model": g.pudg.model.name(),
        "class": format!("{:?}", g.pudg.model.klass()),
        "bound": format_rational(&g.bound),
    });
    if solve {
        out["decision"] = json!(clean_bound(&g.pudg, &g.bound)?);
        out["oracle"] = json!(cnf.is_satisfiable());
    }
    Ok(out)
}

fn majsat_bundle(g: MajsatGadget, cnf: &Cnf, solve: bool) -> Result<Value> {
    let mut out = json!({
        "observed": graph_json(&g.pudg.observed, None),
        "model": g.pudg.model.name(),
        "class": format!("{:?}", g.pudg.model.klass()),
        "query": g.query.to_string(),
        "positive_query": g.positive_query.to_string(),
        "bound": format_rational(&g.bound),
    });
    if solve {
        out["decision"] = json!(pqa_bound(&g.pudg, &Expr::Node(g.query.clone()), &g.bound)?);
        out["oracle"] = json!(cnf.is_majority_satisfiable());
    }
    Ok(out)
}

fn hampath(a: &Args, s: &Settings) -> Result<Value> {
    let path = a.digraph.as_deref().ok_or_else(|| malformed("hampath needs --digraph"))?;
    let v = read_json(path)?;
    let n = v.get("n").and_then(Value::as_u64).ok_or_else(|| malformed("digraph needs `n`"))? as usize;
    let start = match a.start {
        Some(st) => st,
        None => v.get("start").and_then(Value::as_u64).unwrap_or(0) as usize,
    };
    let mut edges = BTreeSet::new();
    for e in v.get("edges").and_then(Value::as_array).into_iter().flatten() {
        match e.as_array().map(Vec::as_slice) {
            Some([x, y]) => match (x.as_u64(), y.as_u64()) {
                (Some(x), Some(y)) => {
                    edges.insert((x as usize, y as usize));
                }
                _ => return Err(malformed("digraph edges are pairs of naturals")),
            },
            _ => return Err(malformed("digraph edges are pairs of naturals")),
        }
    }
    let (g, o, nu) = gadget_hampath(n, &edges, start)?;
    let mut out = json!({
        "observed": graph_json(&g, Some(o)),
        "origin": o,
        "query": nu.to_string(),
    });
    if a.solve {
        out["decision"] = json!(isomorphic_repair(&g, &nu, Some(o), &s.budget)?.is_some());
        out["oracle"] = json!(has_hamiltonian_path(n, &edges, start));
    }
    Ok(out)
}

pub fn run(a: Args, s: &Settings) -> Result<u8> {
    let mut out = match a.kind {
        Kind::SatSubset => {
            let f = formula(&a)?;
            sat_bundle(gadget_sat_subset(&f)?, &f, a.solve)?
        }
        Kind::SatSuperset => {
            let f = formula(&a)?;
            sat_bundle(gadget_sat_superset(&f)?, &f, a.solve)?
        }
        Kind::SatUpdate => {
            let f = formula(&a)?;
            sat_bundle(gadget_sat_update(&f)?, &f, a.solve)?
        }
        Kind::Isorepair => {
            let f = formula(&a)?;
            let (g, nu) = gadget_isorepair(&f);
            let mut out = json!({"observed": graph_json(&g, None), "query": nu.to_string()});
            if a.solve {
                out["decision"] = json!(isomorphic_repair(&g, &nu, None, &s.budget)?.is_some());
                out["oracle"] = json!(f.is_satisfiable());
            }
            out
        }
        Kind::Hampath => hampath(&a, s)?,
        Kind::MajsatSubset => {
            let f = formula(&a)?;
            majsat_bundle(gadget_majsat_subset(&f), &f, a.solve)?
        }
        Kind::MajsatSuperset => {
            let f = formula(&a)?;
            majsat_bundle(gadget_majsat_superset(&f), &f, a.solve)?
        }
    };
    out["kind"] = json!(a.kind.to_possible_value().expect("no skipped variants").get_name());
    if let Some(dir) = &a.out {
        write_file(dir, "observed.json", &serde_json::to_string_pretty(&out["observed"])?)?;
        if let Some(q) = out.get("query").and_then(Value::as_str) {
            write_file(dir, "query.txt", &format!("{q}\n"))?;
        }
        write_file(dir, "bundle.json", &serde_json::to_string_pretty(&out)?)?;
    }
    emit(&out);
    Ok(0)
}
