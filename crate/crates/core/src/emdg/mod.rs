//! Epistemic models: priors, noisy observers and the Bayesian inverse.
//!
//! The posterior of a clean graph `G` given the observation `G'` is
//! `I(G)·R(G)(G') / Σ_J I(J)·R(J)(G')`. Candidates come from the prior's
//! conditional support when it has one, otherwise from the observer's
//! cosupport.

pub mod cosupport;
pub mod descriptor;
pub mod model;
pub mod prior;

pub use cosupport::{candidates, cosupport, cosupport_size_bound};
pub use descriptor::{model_from_value, parse_model, parse_prior, prior_from_value};
pub use model::{
    class_holds, data_update, edge_addition, edge_deletion, edge_deletion_per_label, uniform_subset,
    uniform_superset, validate_class, KDataPrior, ModelClass, RealizationModel, Restriction,
};
pub use prior::Prior;

use crate::datagraph::DataGraph;
use crate::error::{Error, Result};
use crate::rational::Rational;
use num_traits::{Signed, Zero};
use rayon::prelude::*;

/// Enumeration limits. Exceeding either is an error, never a truncation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub max_candidates: u64,
    /// Largest `e` for which unbounded subset/superset enumeration of `2^e`
    /// graphs is attempted.
    pub exponent_cap: u32,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_candidates: 1_000_000,
            exponent_cap: 20,
        }
    }
}

/// Prior, observer and one observation.
#[derive(Clone, Debug)]
pub struct Pudg {
    pub prior: Prior,
    pub model: RealizationModel,
    pub observed: DataGraph,
    pub budget: Budget,
}

impl Pudg {
    pub fn new(prior: Prior, model: RealizationModel, observed: DataGraph) -> Self {
        Pudg {
            prior,
            model,
            observed,
            budget: Budget::default(),
        }
    }

    pub fn with_budget(mut self, budget: Budget) -> Self {
        self.budget = budget;
        self
    }

    /// Graphs to score: the prior's support if enumerable, else the
    /// observer's candidates.
    pub fn candidate_graphs(&self) -> Result<Vec<DataGraph>> {
        match self
            .prior
            .support(&self.observed, self.model.restriction(), &self.budget)
        {
            Some(r) => r,
            None => candidates(self.model.restriction(), &self.observed, &self.budget),
        }
    }
}

/// Unnormalized posterior: every candidate with positive
/// `prior × likelihood`, in canonical graph order.
#[derive(Clone, Debug)]
pub struct Scores {
    pub entries: Vec<(DataGraph, Rational)>,
    pub total: Rational,
    pub examined: u64,
}

impl Scores {
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Highest score; ties go to the canonically smallest graph.
    pub fn best(&self) -> Option<&(DataGraph, Rational)> {
        self.entries
            .iter()
            .reduce(|best, x| if x.1 > best.1 { x } else { best })
    }
}

/// Scores the given graphs (in parallel; the result does not depend on the
/// schedule).
pub fn score_graphs(pudg: &Pudg, mut graphs: Vec<DataGraph>) -> Scores {
    graphs.sort();
    graphs.dedup();
    let examined = graphs.len() as u64;
    let entries: Vec<(DataGraph, Rational)> = graphs
        .into_par_iter()
        .filter_map(|g| {
            let p = pudg.prior.weight(&g);
            if !p.is_positive() {
                return None;
            }
            let r = pudg.model.weight(&g, &pudg.observed);
            let s = p * r;
            s.is_positive().then_some((g, s))
        })
        .collect();
    let total = entries.iter().fold(Rational::zero(), |acc, (_, s)| acc + s);
    Scores {
        entries,
        total,
        examined,
    }
}

pub fn scores(pudg: &Pudg) -> Result<Scores> {
    Ok(score_graphs(pudg, pudg.candidate_graphs()?))
}

/// Exact posterior over clean graphs. Empty when no candidate has positive
/// mass.
pub fn inverse_realization(pudg: &Pudg) -> Result<Vec<(DataGraph, Rational)>> {
    let s = scores(pudg)?;
    Ok(normalize(s))
}

pub(crate) fn normalize(s: Scores) -> Vec<(DataGraph, Rational)> {
    let total = s.total;
    s.entries
        .into_iter()
        .map(|(g, w)| (g, w / &total))
        .collect()
}

/// Posterior, failing when it is undefined.
pub fn posterior(pudg: &Pudg) -> Result<Vec<(DataGraph, Rational)>> {
    let p = inverse_realization(pudg)?;
    if p.is_empty() {
        return Err(Error::NoCandidate);
    }
    Ok(p)
}
