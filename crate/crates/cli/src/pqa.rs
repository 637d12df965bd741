use crate::clean::{load_pudg, PudgArgs};
use crate::io::{emit, load_query, parse_bound, rational_fields};
use crate::Settings;
use anyhow::Result;
use pudg_core::pqa::{pqa, PqaMode};
use serde_json::{json, Map, Value};

#[derive(clap::ValueEnum, Clone, Copy, Debug)]
pub enum Mode {
    Global,
    Existential,
}

#[derive(clap::Args, Debug)]
pub struct Args {
    #[command(flatten)]
    pudg: PudgArgs,
    /// Query text, or a file holding it.
    #[arg(long)]
    query: String,
    #[arg(long, value_enum, default_value = "global")]
    mode: Mode,
    /// Also decide whether the probability is strictly above this value.
    #[arg(long)]
    bound: Option<String>,
}

pub fn run(a: Args, s: &Settings) -> Result<u8> {
    let pudg = load_pudg(&a.pudg, s)?;
    let e = load_query(&a.query, s.max_repeat)?;
    let bound = a.bound.as_deref().map(parse_bound).transpose()?;
    let mode = match a.mode {
        Mode::Global => PqaMode::Global,
        Mode::Existential => PqaMode::Existential,
    };
    let ans = pqa(&pudg, &e, mode)?;
    let mut out = Map::new();
    rational_fields(&mut out, "probability", Some(&ans.probability));
    rational_fields(&mut out, "mass_accounted", Some(&ans.mass_accounted));
    out.insert("candidates_examined".into(), json!(ans.candidates_examined));
    if let Some(b) = bound {
        out.insert("decision".into(), json!(ans.probability > b));
    }
    emit(&Value::Object(out));
    Ok(0)
}
