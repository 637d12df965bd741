//! Priors (probabilistic data-graphs).

use super::model::Restriction;
use super::Budget;
use crate::datagraph::DataGraph;
use crate::error::{Error, Result};
use crate::rational::{format_rational, Rational};
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

pub type WeightFn = dyn Fn(&DataGraph) -> Rational + Send + Sync;

/// Conditional support enumerator: given the observation, the observer's
/// restriction and a budget, every positive-weight graph that could have
/// produced the observation.
pub type SupportFn = dyn Fn(&DataGraph, &Restriction, &Budget) -> Result<Vec<DataGraph>> + Send + Sync;

#[derive(Clone)]
pub enum Prior {
    /// Finitely many graphs with positive weights summing to exactly one.
    Explicit(Arc<BTreeMap<DataGraph, Rational>>),
    /// A weight oracle, not necessarily normalized, with an optional
    /// conditional support enumerator.
    Intensional {
        weight: Arc<WeightFn>,
        support: Option<Arc<SupportFn>>,
    },
}

impl fmt::Debug for Prior {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Prior::Explicit(m) => f.debug_struct("Explicit").field("graphs", &m.len()).finish(),
            Prior::Intensional { support, .. } => f
                .debug_struct("Intensional")
                .field("support", &support.is_some())
                .finish(),
        }
    }
}

impl Prior {
    pub fn explicit(entries: impl IntoIterator<Item = (DataGraph, Rational)>) -> Result<Prior> {
        let mut map = BTreeMap::new();
        let mut total = Rational::zero();
        for (g, w) in entries {
            if !w.is_positive() {
                return Err(Error::InvalidInput(format!(
                    "prior weight {} is not positive",
                    format_rational(&w)
                )));
            }
            total += &w;
            if map.insert(g, w).is_some() {
                return Err(Error::InvalidInput("graph listed twice in prior".into()));
            }
        }
        if !total.is_one() {
            return Err(Error::InvalidInput(format!(
                "prior weights sum to {}, not 1",
                format_rational(&total)
            )));
        }
        Ok(Prior::Explicit(Arc::new(map)))
    }

    /// Equal mass on each distinct graph.
    pub fn uniform(graphs: impl IntoIterator<Item = DataGraph>) -> Result<Prior> {
        let graphs: std::collections::BTreeSet<DataGraph> = graphs.into_iter().collect();
        if graphs.is_empty() {
            return Err(Error::InvalidInput("uniform prior over no graphs".into()));
        }
        let w = Rational::new(1.into(), graphs.len().into());
        Prior::explicit(graphs.into_iter().map(|g| (g, w.clone())))
    }

    pub fn intensional(weight: impl Fn(&DataGraph) -> Rational + Send + Sync + 'static) -> Prior {
        Prior::Intensional {
            weight: Arc::new(weight),
            support: None,
        }
    }

    /// Attaches a conditional support enumerator. An explicit prior is first
    /// turned into an intensional one with the same weights.
    pub fn with_support(
        self,
        support: impl Fn(&DataGraph, &Restriction, &Budget) -> Result<Vec<DataGraph>> + Send + Sync + 'static,
    ) -> Prior {
        let weight = match self {
            Prior::Intensional { weight, .. } => weight,
            Prior::Explicit(m) => Arc::new(move |g: &DataGraph| m.get(g).cloned().unwrap_or_else(Rational::zero)),
        };
        Prior::Intensional {
            weight,
            support: Some(Arc::new(support)),
        }
    }

    pub fn weight(&self, g: &DataGraph) -> Rational {
        match self {
            Prior::Explicit(m) => m.get(g).cloned().unwrap_or_else(Rational::zero),
            Prior::Intensional { weight, .. } => weight(g),
        }
    }

    pub fn entries(&self) -> Option<&BTreeMap<DataGraph, Rational>> {
        match self {
            Prior::Explicit(m) => Some(m),
            Prior::Intensional { .. } => None,
        }
    }

    pub fn has_support(&self) -> bool {
        matches!(self, Prior::Explicit(_) | Prior::Intensional { support: Some(_), .. })
    }

    /// Support graphs relevant to `observed`, or `None` if this prior cannot
    /// enumerate its support.
    pub fn support(
        &self,
        observed: &DataGraph,
        restriction: &Restriction,
        budget: &Budget,
    ) -> Option<Result<Vec<DataGraph>>> {
        match self {
            Prior::Explicit(m) => Some(if m.len() as u64 > budget.max_candidates {
                Err(Error::budget("explicit prior support", m.len(), budget.max_candidates))
            } else {
                Ok(m.keys().cloned().collect())
            }),
            Prior::Intensional { support, .. } => support.as_ref().map(|f| {
                let mut out = f(observed, restriction, budget)?;
                out.sort();
                out.dedup();
                if out.len() as u64 > budget.max_candidates {
                    return Err(Error::budget("prior support", out.len(), budget.max_candidates));
                }
                Ok(out)
            }),
        }
    }

    /// The same prior with every weight multiplied by `lambda` (so no longer
    /// normalized). Posteriors and argmaxes do not change.
    pub fn scaled(&self, lambda: Rational) -> Prior {
        self.map_weight(move |_, w| w * &lambda)
    }

    /// Rewrites the weight oracle; the support enumerator is kept and
    /// graphs whose new weight is zero are filtered out of it.
    pub fn map_weight(
        &self,
        f: impl Fn(&DataGraph, Rational) -> Rational + Send + Sync + 'static,
    ) -> Prior {
        let base = self.clone();
        let f = Arc::new(f);
        let weight = {
            let base = base.clone();
            let f = f.clone();
            Arc::new(move |g: &DataGraph| {
                let w = base.weight(g);
                if w.is_zero() {
                    w
                } else {
                    f(g, w)
                }
            })
        };
        let support: Option<Arc<SupportFn>> = if base.has_support() {
            let weight = weight.clone();
            Some(Arc::new(move |obs: &DataGraph, r: &Restriction, b: &Budget| {
                let graphs = base.support(obs, r, b).expect("support checked above")?;
                Ok(graphs.into_iter().filter(|g| weight(g).is_positive()).collect())
            }))
        } else {
            None
        };
        Prior::Intensional { weight, support }
    }
}
