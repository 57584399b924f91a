//! Market-clearing prices from a maximum matching, and the price-vector
//! transformations that preserve market clearing.
//!
//! Given a perfect matching `M`, a price vector under which every buyer
//! weakly prefers their own product must satisfy
//! `p[M(i)] <= p[M(j)] + v[i][M(i)] - v[i][M(j)]` for all `i, j`. That is a
//! system of difference constraints; shortest distances from an extra source
//! node solve it, and a negative cycle proves there is no solution. Such a
//! cycle is also an alternating cycle along which reassigning products
//! strictly raises total welfare, so it certifies `M` is not maximum.

mod digraph;
mod transforms;

pub use digraph::{shortest_paths_or_cycle, ConstraintDigraph, Edge, NegativeCycle, ShortestPathResult};
pub use transforms::{convex_combine, diagonal_shift, elementwise_max, elementwise_min, normalize};

use crate::error::Error;
use crate::market::{Matching, PriceVector, ValuationMatrix};
use crate::rational::Rational;

/// Certificate that a perfect matching is not welfare-maximal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NotMaximum {
    /// Buyers `b_1, ..., b_m` (0-based). In the improved matching buyer
    /// `b_{k+1}` takes the product `b_k` held, and `b_1` takes `b_m`'s.
    pub cycle: Vec<usize>,
    /// Total cycle length in the constraint graph; the welfare gain of the
    /// rotation is its negation.
    pub total_length: Rational,
    /// `assignment[i]` is the product buyer `i` holds in the input matching;
    /// constraint-graph node `i + 1` is labeled by that product.
    pub assignment: Vec<usize>,
}

impl NotMaximum {
    pub fn welfare_gain(&self) -> Rational {
        -&self.total_length
    }

    /// The pairs the rotation introduces, as `(buyer, product)`.
    pub fn rotated_pairs(&self) -> Vec<(usize, usize)> {
        let m = self.cycle.len();
        (0..m)
            .map(|k| {
                let giver = self.cycle[k];
                let taker = self.cycle[(k + 1) % m];
                (taker, self.assignment[giver])
            })
            .collect()
    }

    /// The input matching with the cycle rotated in.
    pub fn improved_matching(&self) -> Matching {
        let mut assignment = self.assignment.clone();
        for (buyer, product) in self.rotated_pairs() {
            assignment[buyer] = product;
        }
        Matching::from_assignment(&assignment).expect("rotation permutes products")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PricingOutcome {
    Clearing(PriceVector),
    NotMaximum(NotMaximum),
}

/// Market-clearing prices under which `matching` is induced, or a
/// welfare-improving cycle showing that `matching` is not maximum.
pub fn prices_from_matching(valuations: &ValuationMatrix, matching: &Matching) -> Result<PricingOutcome, Error> {
    let n = valuations.n();
    matching.validate(n)?;
    let assignment = matching.assignment(n).ok_or(Error::NotPerfect {
        size: matching.len(),
        n,
    })?;
    let graph = ConstraintDigraph::from_matching(valuations, &assignment);
    Ok(match shortest_paths_or_cycle(&graph) {
        ShortestPathResult::Distances { distances, .. } => {
            let mut prices = vec![Rational::zero(); n];
            for (node, distance) in distances.into_iter().enumerate() {
                prices[assignment[node]] = distance;
            }
            PricingOutcome::Clearing(PriceVector::new(prices))
        }
        ShortestPathResult::NegativeCycle(cycle) => PricingOutcome::NotMaximum(NotMaximum {
            cycle: cycle.nodes.iter().map(|node| node - 1).collect(),
            total_length: cycle.total_length,
            assignment,
        }),
    })
}
