//! Weighted restriction sets: constraints that scale down the prior mass of
//! the graphs satisfying them.

use crate::datagraph::{DataGraph, NodeId};
use crate::emdg::Prior;
use crate::error::{Error, Result};
use crate::gxpath::{parse_query, satisfies_at, satisfies_global, Expr};
use crate::rational::{parse_rational, Rational};
use num_traits::{One, Signed, Zero};
use serde::Deserialize;
use std::collections::BTreeMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Semantics {
    /// Every node (or pair) satisfies the constraint.
    Global,
    /// The node expression holds at this node; graphs without it violate.
    Origin(NodeId),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedConstraint {
    pub expr: Expr,
    pub weight: Rational,
    pub semantics: Semantics,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WeightedRestrictionSet {
    entries: Vec<WeightedConstraint>,
}

impl WeightedRestrictionSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Weights live in `[0, 1)`: a constraint can penalize or exclude, never
    /// reward.
    pub fn push(&mut self, expr: Expr, weight: Rational, semantics: Semantics) -> Result<()> {
        if weight.is_negative() || weight >= Rational::one() {
            return Err(Error::InvalidInput("constraint weights must lie in [0, 1)".into()));
        }
        if matches!(semantics, Semantics::Origin(_)) && !matches!(expr, Expr::Node(_)) {
            return Err(Error::InvalidInput(
                "origin semantics needs a node expression".into(),
            ));
        }
        self.entries.push(WeightedConstraint {
            expr,
            weight,
            semantics,
        });
        Ok(())
    }

    pub fn with(mut self, expr: Expr, weight: Rational, semantics: Semantics) -> Result<Self> {
        self.push(expr, weight, semantics)?;
        Ok(self)
    }

    pub fn entries(&self) -> &[WeightedConstraint] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `Π κ(G, φ)` over all constraints.
    pub fn factor(&self, g: &DataGraph) -> Rational {
        self.entries
            .iter()
            .map(|c| kappa(g, c))
            .fold(Rational::one(), |acc, k| acc * k)
    }

    /// Which constraints `g` satisfies, in order.
    pub fn pattern(&self, g: &DataGraph) -> Vec<bool> {
        self.entries.iter().map(|c| holds(g, c)).collect()
    }
}

fn holds(g: &DataGraph, c: &WeightedConstraint) -> bool {
    // labels the graph does not declare are empty relations
    let g = g.with_alphabet(c.expr.labels());
    match (&c.semantics, &c.expr) {
        (Semantics::Global, e) => satisfies_global(&g, e).expect("labels declared"),
        (Semantics::Origin(o), Expr::Node(nu)) => {
            g.contains_node(*o) && satisfies_at(&g, *o, nu).expect("labels declared")
        }
        (Semantics::Origin(_), Expr::Path(_)) => unreachable!("rejected on insertion"),
    }
}

/// `w(φ)` when `g` satisfies the constraint, 1 otherwise.
pub fn kappa(g: &DataGraph, c: &WeightedConstraint) -> Rational {
    if holds(g, c) {
        c.weight.clone()
    } else {
        Rational::one()
    }
}

/// The prior with each weight multiplied by `Π κ`, left unnormalized. Its
/// support enumerator (if any) drops graphs whose mass became zero.
pub fn reweight_prior(prior: &Prior, w: &WeightedRestrictionSet) -> Prior {
    if w.is_empty() {
        return prior.clone();
    }
    let w = w.clone();
    prior.map_weight(move |g, p| p * w.factor(g))
}

/// Explicit priors reweight to explicit priors. Errors with `NoCandidate`
/// when every graph was excluded.
pub fn reweight_explicit(prior: &Prior, w: &WeightedRestrictionSet) -> Result<Prior> {
    let entries = prior
        .entries()
        .ok_or_else(|| Error::InvalidInput("prior is not explicit".into()))?;
    let scaled: Vec<(DataGraph, Rational)> = entries
        .iter()
        .map(|(g, p)| (g.clone(), p * w.factor(g)))
        .filter(|(_, p)| p.is_positive())
        .collect();
    let total: Rational = scaled.iter().map(|(_, p)| p).sum();
    if total.is_zero() {
        return Err(Error::NoCandidate);
    }
    Prior::explicit(scaled.into_iter().map(|(g, p)| (g, p / &total)))
}

/// Normalized mass of `g` after a single constraint, given the prior mass
/// `p_phi` of the graphs satisfying it:
/// `I(G)·κ / (p_phi·w + 1 − p_phi)`.
pub fn single_constraint_closed_form(
    g: &DataGraph,
    prior_weight: &Rational,
    c: &WeightedConstraint,
    p_phi: &Rational,
) -> Result<Rational> {
    if p_phi.is_negative() || *p_phi > Rational::one() {
        return Err(Error::InvalidInput("p_phi must be a probability".into()));
    }
    let denom = p_phi * &c.weight + (Rational::one() - p_phi);
    if denom.is_zero() {
        return Err(Error::NoCandidate);
    }
    Ok(prior_weight * kappa(g, c) / denom)
}

/// `Σ_S mass(S)·Π_{i∈S} w_i` where `S` ranges over the satisfaction
/// patterns. `masses` maps each pattern to the prior mass of graphs with
/// exactly that pattern.
pub fn combination_normalizer(
    w: &WeightedRestrictionSet,
    masses: &BTreeMap<Vec<bool>, Rational>,
) -> Result<Rational> {
    let mut total = Rational::zero();
    for (pattern, mass) in masses {
        if pattern.len() != w.entries.len() {
            return Err(Error::InvalidInput("pattern length differs from the constraint count".into()));
        }
        let mut term = mass.clone();
        for (sat, c) in pattern.iter().zip(&w.entries) {
            if *sat {
                term *= &c.weight;
            }
        }
        total += term;
    }
    Ok(total)
}

/// Normalized mass of `g` under several constraints given the per-pattern
/// masses.
pub fn closed_form(
    g: &DataGraph,
    prior_weight: &Rational,
    w: &WeightedRestrictionSet,
    masses: &BTreeMap<Vec<bool>, Rational>,
) -> Result<Rational> {
    let z = combination_normalizer(w, masses)?;
    if z.is_zero() {
        return Err(Error::NoCandidate);
    }
    Ok(prior_weight * w.factor(g) / z)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EntryDoc {
    query: String,
    weight: String,
    #[serde(default)]
    semantics: Option<String>,
    #[serde(default)]
    origin: Option<NodeId>,
}

/// Parses `[{"query": "...", "weight": "1/3", "semantics": "global"}, ...]`.
/// Origin semantics is written `"semantics": "origin", "origin": <id>`.
pub fn parse_restriction_set(text: &str) -> Result<WeightedRestrictionSet> {
    let docs: Vec<EntryDoc> = serde_json::from_str(text).map_err(|e| Error::Json(e.to_string()))?;
    let mut set = WeightedRestrictionSet::new();
    for d in docs {
        let semantics = match (d.semantics.as_deref().unwrap_or("global"), d.origin) {
            ("global", None) => Semantics::Global,
            ("origin", Some(o)) => Semantics::Origin(o),
            (s, o) => {
                return Err(Error::InvalidInput(format!(
                    "bad semantics `{s}` (origin {o:?})"
                )))
            }
        };
        set.push(parse_query(&d.query)?, parse_rational(&d.weight)?, semantics)?;
    }
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gxpath::ast::build::*;
    use crate::rational::frac;

    fn g(data: &str, loop_: bool) -> DataGraph {
        let mut b = DataGraph::builder(["a"]).node(1, data);
        if loop_ {
            b = b.edge(1, "a", 1);
        }
        b.build().unwrap()
    }

    fn looped() -> Expr {
        Expr::Node(exists(label("a")))
    }

    #[test]
    fn kappa_cases() {
        let c = |w| WeightedConstraint {
            expr: looped(),
            weight: w,
            semantics: Semantics::Global,
        };
        assert_eq!(kappa(&g("x", false), &c(frac(1, 3))), Rational::one());
        assert_eq!(kappa(&g("x", true), &c(frac(1, 3))), frac(1, 3));
        assert_eq!(kappa(&g("x", true), &c(Rational::zero())), Rational::zero());
        // undeclared labels never hold
        let other = WeightedConstraint {
            expr: Expr::Node(exists(label("zzz"))),
            weight: Rational::zero(),
            semantics: Semantics::Global,
        };
        assert_eq!(kappa(&g("x", true), &other), Rational::one());
    }

    #[test]
    fn weights_must_be_below_one() {
        let mut w = WeightedRestrictionSet::new();
        assert!(w.push(looped(), Rational::one(), Semantics::Global).is_err());
        assert!(w.push(Expr::Path(eps()), frac(1, 2), Semantics::Origin(1)).is_err());
    }

    #[test]
    fn four_graph_reweighting() {
        let gs = [g("x", false), g("x", true), g("y", false), g("y", true)];
        let prior = Prior::explicit(gs.iter().cloned().zip([frac(1, 10), frac(2, 10), frac(3, 10), frac(4, 10)])).unwrap();
        let w = WeightedRestrictionSet::new().with(looped(), frac(1, 2), Semantics::Global).unwrap();
        let r = reweight_explicit(&prior, &w).unwrap();
        // 1 + 1 + 3 + 2 = 7 tenths
        assert_eq!(r.weight(&gs[1]), frac(1, 7));
        assert_eq!(r.weight(&gs[2]), frac(3, 7));
        let p_phi = frac(6, 10);
        let c = &w.entries()[0];
        for x in &gs {
            let cf = single_constraint_closed_form(x, &prior.weight(x), c, &p_phi).unwrap();
            assert_eq!(cf, r.weight(x));
        }
        let lazy = reweight_prior(&prior, &w);
        assert_eq!(lazy.weight(&gs[3]), frac(2, 10));
        assert_eq!(reweight_prior(&prior, &WeightedRestrictionSet::new()).weight(&gs[3]), frac(4, 10));
    }

    #[test]
    fn hard_constraints_exclude() {
        let gs = [g("x", true), g("y", true)];
        let prior = Prior::uniform(gs.clone()).unwrap();
        let w = WeightedRestrictionSet::new().with(looped(), Rational::zero(), Semantics::Global).unwrap();
        assert!(matches!(reweight_explicit(&prior, &w), Err(Error::NoCandidate)));
        assert!(reweight_prior(&prior, &w).weight(&gs[0]).is_zero());
        let c = &w.entries()[0];
        assert_eq!(
            single_constraint_closed_form(&gs[0], &frac(1, 2), c, &Rational::one()),
            Err(Error::NoCandidate)
        );
    }

    #[test]
    fn closed_form_edge_cases() {
        let c = WeightedConstraint {
            expr: looped(),
            weight: frac(1, 4),
            semantics: Semantics::Global,
        };
        let x = g("x", false);
        assert_eq!(single_constraint_closed_form(&x, &frac(1, 3), &c, &Rational::zero()).unwrap(), frac(1, 3));
        let y = g("x", true);
        assert_eq!(single_constraint_closed_form(&y, &frac(1, 3), &c, &Rational::one()).unwrap(), frac(1, 3));
    }

    #[test]
    fn multi_constraint_normalizer() {
        let gs = [g("x", false), g("x", true), g("y", false), g("y", true)];
        let masses_in = [frac(1, 10), frac(2, 10), frac(3, 10), frac(4, 10)];
        let prior = Prior::explicit(gs.iter().cloned().zip(masses_in)).unwrap();
        let w = WeightedRestrictionSet::new()
            .with(looped(), frac(1, 2), Semantics::Global)
            .unwrap()
            .with(Expr::Node(eq("y")), frac(1, 3), Semantics::Origin(1))
            .unwrap();
        let mut masses = BTreeMap::new();
        for x in &gs {
            *masses.entry(w.pattern(x)).or_insert_with(Rational::zero) += prior.weight(x);
        }
        let r = reweight_explicit(&prior, &w).unwrap();
        for x in &gs {
            assert_eq!(closed_form(x, &prior.weight(x), &w, &masses).unwrap(), r.weight(x));
        }
    }

    #[test]
    fn parses_json() {
        let w = parse_restriction_set(r#"[{"query": "<a>", "weight": "1/3"}, {"query": "=\"x\"", "weight": "0", "semantics": "origin", "origin": 1}]"#).unwrap();
        assert_eq!(w.entries().len(), 2);
        assert_eq!(w.entries()[1].semantics, Semantics::Origin(1));
        assert!(parse_restriction_set(r#"[{"query": "<a>", "weight": "1"}]"#).is_err());
    }
}
