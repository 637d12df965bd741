//! Minimum-cost perfect assignment (Hungarian method with potentials),
//! generic over the cost group so that exact rationals work unchanged.

use crate::rational::Rational;
use num_traits::{One, Zero};
use std::cmp::Ordering;

/// A totally ordered abelian group, written additively.
pub trait CostGroup: Clone + Ord {
    fn identity() -> Self;
    fn combine(&self, other: &Self) -> Self;
    fn remove(&self, other: &Self) -> Self;
}

impl CostGroup for i64 {
    fn identity() -> Self {
        0
    }
    fn combine(&self, other: &Self) -> Self {
        self + other
    }
    fn remove(&self, other: &Self) -> Self {
        self - other
    }
}

impl CostGroup for num_bigint::BigInt {
    fn identity() -> Self {
        Self::zero()
    }
    fn combine(&self, other: &Self) -> Self {
        self + other
    }
    fn remove(&self, other: &Self) -> Self {
        self - other
    }
}

/// Positive rationals under multiplication. Minimizing a product of
/// `1/w` maximizes the product of the `w`, with no logarithms involved.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Product(pub Rational);

impl PartialOrd for Product {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Product {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.cmp(&other.0)
    }
}

impl CostGroup for Product {
    fn identity() -> Self {
        Product(Rational::one())
    }
    fn combine(&self, other: &Self) -> Self {
        Product(&self.0 * &other.0)
    }
    fn remove(&self, other: &Self) -> Self {
        Product(&self.0 / &other.0)
    }
}

/// `cost[i][j]` is `None` for forbidden cells. Returns the column assigned
/// to each row of a minimum-cost perfect matching of a square matrix, or
/// `None` when no perfect matching avoids the forbidden cells.
pub fn assign<C: CostGroup>(cost: &[Vec<Option<C>>]) -> Option<Vec<usize>> {
    let n = cost.len();
    assert!(cost.iter().all(|r| r.len() == n), "cost matrix must be square");
    // 1-based with a virtual column 0, as in the classical formulation
    let mut u = vec![C::identity(); n + 1];
    let mut v = vec![C::identity(); n + 1];
    let mut owner = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        owner[0] = i;
        let mut j0 = 0usize;
        let mut minv: Vec<Option<C>> = vec![None; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta: Option<C> = None;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                if let Some(c) = &cost[i0 - 1][j - 1] {
                    let reduced = c.remove(&u[i0]).remove(&v[j]);
                    if minv[j].as_ref().map_or(true, |m| reduced < *m) {
                        minv[j] = Some(reduced);
                        way[j] = j0;
                    }
                }
                if let Some(m) = &minv[j] {
                    if delta.as_ref().map_or(true, |d| m < d) {
                        delta = Some(m.clone());
                        j1 = j;
                    }
                }
            }
            let delta = delta?;
            for j in 0..=n {
                if used[j] {
                    u[owner[j]] = u[owner[j]].combine(&delta);
                    v[j] = v[j].remove(&delta);
                } else if let Some(m) = &mut minv[j] {
                    *m = m.remove(&delta);
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut row_to_col = vec![0usize; n];
    for j in 1..=n {
        row_to_col[owner[j] - 1] = j - 1;
    }
    Some(row_to_col)
}
