//! Data cleaning: the most likely clean graph given an observation.

pub mod hitting;
pub mod hungarian;
pub mod matching;
pub mod repair;

pub use hitting::{clean_min_distinct, clean_min_distinct_labels, min_hitting_set, HittingSet, MinDistinct};
pub use matching::{
    clean_cardinality, clean_fixed_assignment, CardinalityTarget, FixedAssignment, TransitionCost,
};
pub use repair::{clean_origin_expression, isomorphic_repair, OriginRepair};

use crate::datagraph::DataGraph;
use crate::emdg::{self, KDataPrior, ModelClass, Pudg, Restriction, Scores};
use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CleaningResult {
    pub best: DataGraph,
    /// Unnormalized `I(G)·R(G)(G')`.
    pub score: Rational,
    /// Posterior probability, when the examined candidates cover the whole
    /// cosupport.
    pub probability: Option<Rational>,
    pub candidates_examined: u64,
}

fn pick(scores: Scores, exhaustive: bool) -> Result<CleaningResult> {
    let (best, score) = scores.best().cloned().ok_or(Error::NoCandidate)?;
    let probability = exhaustive.then(|| &score / &scores.total);
    Ok(CleaningResult {
        best,
        score,
        probability,
        candidates_examined: scores.examined,
    })
}

/// Argmax of the posterior over every enumerable candidate. Ties go to the
/// canonically smallest graph.
pub fn clean(pudg: &Pudg) -> Result<CleaningResult> {
    pick(emdg::scores(pudg)?, true)
}

/// Whether some clean graph has posterior probability strictly above `b`.
pub fn clean_bound(pudg: &Pudg, b: &Rational) -> Result<bool> {
    match clean(pudg) {
        Ok(r) => Ok(r.probability.expect("exhaustive") > *b),
        Err(Error::NoCandidate) => Ok(false),
        Err(e) => Err(e),
    }
}

fn require_class(pudg: &Pudg, klass: ModelClass, solver: &str) -> Result<()> {
    if pudg.model.klass() != klass {
        return Err(Error::InvalidInput(format!(
            "{solver} needs a {klass:?} observer, got {:?}",
            pudg.model.klass()
        )));
    }
    Ok(())
}

fn bounded(pudg: &Pudg, r: Restriction, covers: bool) -> Result<CleaningResult> {
    let graphs = emdg::candidates(&r, &pudg.observed, &pudg.budget)?;
    pick(emdg::score_graphs(pudg, graphs), covers)
}

fn within(declared: &Option<usize>, bound: usize) -> bool {
    declared.is_some_and(|d| d <= bound)
}

/// Subset observer that deleted at most `k_e` edges (no node deletions):
/// `Σ_{i≤k_e} C(missing, i)` candidates.
pub fn clean_subset_bounded(pudg: &Pudg, k_e: usize) -> Result<CleaningResult> {
    require_class(pudg, ModelClass::Subset, "clean_subset_bounded")?;
    let covers = match pudg.model.restriction() {
        Restriction::Subset {
            max_added_edges,
            node_deletions,
        } => !node_deletions && within(max_added_edges, k_e),
        _ => false,
    };
    bounded(
        pudg,
        Restriction::Subset {
            max_added_edges: Some(k_e),
            node_deletions: false,
        },
        covers,
    )
}

/// Superset observer that added fewer than `c + 1` nodes and edges in total.
pub fn clean_superset_bounded(pudg: &Pudg, c: usize) -> Result<CleaningResult> {
    require_class(pudg, ModelClass::Superset, "clean_superset_bounded")?;
    let (node_additions, covers) = match pudg.model.restriction() {
        Restriction::Superset {
            max_removed,
            node_additions,
        } => (*node_additions, within(max_removed, c)),
        _ => (false, false),
    };
    bounded(
        pudg,
        Restriction::Superset {
            max_removed: Some(c),
            node_additions,
        },
        covers,
    )
}

/// Node-update observer that rewrote at most `z` data values, each clean
/// value drawn from `f` of the observed one.
pub fn clean_node_update(pudg: &Pudg, f: &KDataPrior, z: usize) -> Result<CleaningResult> {
    require_class(pudg, ModelClass::NodeUpdate, "clean_node_update")?;
    let covers = match pudg.model.restriction() {
        Restriction::NodeUpdate { max_updates, f: declared } => {
            within(max_updates, z) && declared == f
        }
        _ => false,
    };
    bounded(
        pudg,
        Restriction::NodeUpdate {
            max_updates: Some(z),
            f: f.clone(),
        },
        covers,
    )
}
