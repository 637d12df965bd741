//! `pudg`: query evaluation, cleaning, probabilistic query answering,
//! expression transforms and reduction gadgets from the command line.
//!
//! Exit codes: 0 success, 1 other failure, 2 malformed input, 3 no
//! candidate graph (or no feasible solution), 4 enumeration budget exceeded.

mod clean;
mod eval;
mod gadget;
mod io;
mod pqa;
mod transform;
mod validate;

use clap::{Parser, Subcommand};
use pudg_core::emdg::{Budget, Pudg};
use pudg_core::Error;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "pudg", version, about = "Probabilistic unclean data-graphs")]
struct Cli {
    /// Worker threads for parallel scoring (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Maximum number of candidate graphs any enumeration may visit.
    #[arg(long, global = true, env = "PUDG_BUDGET", default_value_t = Budget::default().max_candidates)]
    budget: u64,
    /// Largest `m` accepted in a repetition `p{n,m}`.
    #[arg(long, global = true, default_value_t = 64)]
    max_repeat: u32,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate a query on a graph.
    Eval(eval::Args),
    /// Find the most likely clean graph.
    Clean(clean::Args),
    /// Posterior probability that a query holds.
    Pqa(pqa::Args),
    /// Rewrite a query (and graph) into another form.
    Transform(transform::Args),
    /// Build a reduction instance from a CNF formula or a digraph.
    Gadget(gadget::Args),
    /// Check input files and the declared observer class.
    Validate(validate::Args),
}

pub struct Settings {
    pub budget: Budget,
    pub max_repeat: u32,
}

impl Settings {
    pub fn pudg(&self, mut p: Pudg) -> Pudg {
        p.budget = self.budget;
        p
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<io::Malformed>().is_some() {
        return 2;
    }
    match err.downcast_ref::<Error>() {
        Some(Error::NoCandidate | Error::Infeasible(_)) => 3,
        Some(Error::BudgetExceeded { .. }) => 4,
        Some(Error::Unsupported(_)) | None => 1,
        Some(_) => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    if cli.budget == 0 {
        eprintln!("error: budget must be positive");
        return ExitCode::from(2);
    }
    let settings = Settings {
        budget: Budget {
            max_candidates: cli.budget,
            ..Budget::default()
        },
        max_repeat: cli.max_repeat,
    };
    let result = match cli.command {
        Command::Eval(a) => eval::run(a, &settings),
        Command::Clean(a) => clean::run(a, &settings),
        Command::Pqa(a) => pqa::run(a, &settings),
        Command::Transform(a) => transform::run(a, &settings),
        Command::Gadget(a) => gadget::run(a, &settings),
        Command::Validate(a) => validate::run(a, &settings),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
