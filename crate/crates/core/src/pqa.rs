//! Probabilistic query answering by exact enumeration of the posterior.

use crate::emdg::{self, Pudg};
use crate::error::{Error, Result};
use crate::gxpath::{satisfies_global, satisfies_somewhere, Expr};
use crate::rational::Rational;
use num_traits::Zero;
use rayon::prelude::*;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PqaAnswer {
    pub probability: Rational,
    /// Posterior mass the enumeration covered; 1 whenever it completes.
    pub mass_accounted: Rational,
    pub candidates_examined: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PqaMode {
    /// The query holds at every node (or on every pair).
    Global,
    /// The query holds at some node (or on some pair).
    Existential,
}

/// Posterior probability that `e` holds under `mode`.
pub fn pqa(pudg: &Pudg, e: &Expr, mode: PqaMode) -> Result<PqaAnswer> {
    let s = emdg::scores(pudg)?;
    if s.entries.is_empty() {
        return Err(Error::NoCandidate);
    }
    let hits: Vec<bool> = s
        .entries
        .par_iter()
        .map(|(g, _)| match mode {
            PqaMode::Global => satisfies_global(g, e),
            PqaMode::Existential => satisfies_somewhere(g, e),
        })
        .collect::<Result<_>>()?;
    let mut holds = Rational::zero();
    for ((_, w), hit) in s.entries.iter().zip(hits) {
        if hit {
            holds += w;
        }
    }
    Ok(PqaAnswer {
        probability: holds / &s.total,
        mass_accounted: Rational::from_integer(1.into()),
        candidates_examined: s.examined,
    })
}

pub fn global_pqa(pudg: &Pudg, e: &Expr) -> Result<PqaAnswer> {
    pqa(pudg, e, PqaMode::Global)
}

pub fn existential_pqa(pudg: &Pudg, e: &Expr) -> Result<PqaAnswer> {
    pqa(pudg, e, PqaMode::Existential)
}

/// Whether the global probability of `e` is strictly above `b`.
pub fn pqa_bound(pudg: &Pudg, e: &Expr, b: &Rational) -> Result<bool> {
    Ok(global_pqa(pudg, e)?.probability > *b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datagraph::DataGraph;
    use crate::emdg::{Prior, RealizationModel, Restriction};
    use crate::gxpath::ast::build::*;
    use crate::gxpath::{parse_path, NodeExpr, PathExpr};
    use crate::rational::frac;
    use num_traits::One;
    use proptest::prelude::*;

    fn social(edges: &[(u64, &str, u64)]) -> DataGraph {
        let mut b = DataGraph::builder(["friend", "follows"]);
        for (i, name) in ["Alice", "Bob", "Carl", "Dave"].iter().enumerate() {
            b = b.node(i as u64 + 1, *name);
        }
        for (u, l, v) in edges {
            b = b.edge(*u, *l, *v);
        }
        b.build().unwrap()
    }

    /// The toy network: 1 Alice, 2 Bob, 3 Carl, 4 Dave. Each world adds
    /// edges to the previous one; only the last is connected within three
    /// steps in every direction.
    fn worlds() -> Pudg {
        let base = [(1, "friend", 2), (2, "friend", 1), (2, "follows", 1), (2, "follows", 3)];
        let g1 = social(&base);
        let g2 = social(&[&base[..], &[(1, "friend", 4)]].concat());
        let g3 = social(&[&base[..], &[(1, "friend", 4), (4, "friend", 3), (3, "follows", 2)]].concat());
        let prior = Prior::explicit([(g1.clone(), frac(5, 10)), (g2, frac(4, 10)), (g3, frac(1, 10))]).unwrap();
        let model = RealizationModel::new("flat", Restriction::subset(), |_, _| Rational::one());
        Pudg::new(prior, model, g1)
    }

    fn alpha() -> PathExpr {
        parse_path("(friend + follows){0,3}").unwrap()
    }

    #[test]
    fn worked_example() {
        let pudg = worlds();
        let a = Expr::Path(alpha());
        let g = global_pqa(&pudg, &a).unwrap();
        assert_eq!(g.probability, frac(1, 10));
        assert_eq!(g.mass_accounted, Rational::one());
        let not_a = Expr::Path(complement(alpha()));
        assert_eq!(existential_pqa(&pudg, &not_a).unwrap().probability, frac(9, 10));
        assert_eq!(global_pqa(&pudg, &not_a).unwrap().probability, Rational::zero());
        assert_eq!(existential_pqa(&pudg, &a).unwrap().probability, Rational::one());
        assert!(pqa_bound(&pudg, &a, &frac(1, 20)).unwrap());
        assert!(!pqa_bound(&pudg, &a, &frac(1, 10)).unwrap());
        assert!(!pqa_bound(&pudg, &a, &Rational::one()).unwrap());
    }

    #[test]
    fn trivial_queries() {
        let pudg = worlds();
        let taut = Expr::Node(exists(eps()));
        assert_eq!(global_pqa(&pudg, &taut).unwrap().probability, Rational::one());
        let contra = Expr::Node(and(eq("Alice"), neq("Alice")));
        assert_eq!(existential_pqa(&pudg, &contra).unwrap().probability, Rational::zero());
    }

    #[test]
    fn empty_intersection() {
        let g = social(&[]);
        let prior = Prior::uniform([g.clone()]).unwrap();
        let model = RealizationModel::new("never", Restriction::General, |_, _| Rational::zero());
        let pudg = Pudg::new(prior, model, g);
        assert_eq!(global_pqa(&pudg, &Expr::Node(eq("x"))), Err(Error::NoCandidate));
    }

    fn random_pudg(seeds: &[(u8, u8)]) -> Pudg {
        let gs: Vec<(DataGraph, Rational)> = seeds
            .iter()
            .enumerate()
            .map(|(i, (mask, w))| {
                let mut b = DataGraph::builder(["a"]).node(1, "x").node(2, if i % 2 == 0 { "x" } else { "y" });
                for (bit, (u, v)) in [(1, 1), (1, 2), (2, 1), (2, 2)].iter().enumerate() {
                    if mask >> bit & 1 == 1 {
                        b = b.edge(*u, "a", *v);
                    }
                }
                (b.build().unwrap(), Rational::from_integer((*w as i64 + 1).into()))
            })
            .collect();
        let mut merged = std::collections::BTreeMap::new();
        for (g, w) in gs {
            *merged.entry(g).or_insert_with(Rational::zero) += w;
        }
        let total: Rational = merged.values().sum();
        let prior = Prior::explicit(merged.into_iter().map(|(g, w)| (g, w / &total))).unwrap();
        let model = RealizationModel::new("flat", Restriction::General, |_, _| Rational::one());
        Pudg::new(prior, model, DataGraph::empty(["a"]))
    }

    proptest! {
        #[test]
        fn duality(seeds in proptest::collection::vec((0u8..16, 0u8..5), 1..6), which in 0usize..4) {
            let pudg = random_pudg(&seeds);
            let nu: NodeExpr = [
                exists(label("a")),
                eq("y"),
                path_eq(label("a"), eps()),
                exists(concat(label("a"), test(neq("x")))),
            ][which].clone();
            let g = global_pqa(&pudg, &Expr::Node(nu.clone())).unwrap().probability;
            let e = existential_pqa(&pudg, &Expr::Node(not(nu))).unwrap().probability;
            prop_assert_eq!(g + e, Rational::one());
            let p = label("a");
            let g = global_pqa(&pudg, &Expr::Path(p.clone())).unwrap().probability;
            let e = existential_pqa(&pudg, &Expr::Path(complement(p))).unwrap().probability;
            prop_assert_eq!(g + e, Rational::one());
        }
    }
}
