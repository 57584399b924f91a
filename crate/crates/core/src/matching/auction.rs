//! Ascending-price auction.
//!
//! Valuations are first scaled by the LCM of their denominators, so all
//! arithmetic below is on integers and prices move in unit steps. Each round
//! looks for a perfect matching in the preferred-product graph; if there is
//! none, every product in the neighborhood of the returned constricted set
//! gets one unit more expensive. Whenever all prices are positive they are
//! shifted down so the cheapest is 0.
//!
//! Each raise lowers `sum(prices) + sum(max payoffs)` by at least
//! `|S| - |N(S)| >= 1`, and that quantity is bounded below once the minimum
//! price is pinned at 0, so the loop terminates.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::market::{
    argmax_set, find_perfect_matching, graph_from_sets_unchecked, Matching, PerfectMatchingOutcome,
    PreferredProductGraph, PriceVector, ValuationMatrix,
};
use crate::rational::{common_denominator, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuctionRound {
    pub constricted: Vec<usize>,
    pub neighborhood: Vec<usize>,
    pub raised: Vec<usize>,
    /// Prices after the raise and any normalization.
    pub prices: PriceVector,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AuctionTrace {
    pub rounds: Vec<AuctionRound>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuctionResult {
    pub prices: PriceVector,
    pub matching: Matching,
    pub trace: AuctionTrace,
}

fn integer_graph(n: usize, scaled: &[BigInt], prices: &[BigInt]) -> PreferredProductGraph {
    let preferred = scaled
        .chunks(n)
        .map(|row| {
            let payoffs: Vec<BigInt> = row.iter().zip(prices).map(|(v, p)| v - p).collect();
            argmax_set(&payoffs)
        })
        .collect();
    graph_from_sets_unchecked(n, preferred)
}

fn unscale(prices: &[BigInt], scale: &BigInt) -> PriceVector {
    prices
        .iter()
        .map(|p| Rational::from_parts(p.clone(), scale.clone()))
        .collect()
}

/// Runs the auction to completion. The returned prices clear the market,
/// the returned matching is perfect in their preferred-product graph, and the
/// cheapest product costs 0.
pub fn solve_auction(valuations: &ValuationMatrix) -> AuctionResult {
    let n = valuations.n();
    let scale = common_denominator(valuations.values());
    let scaled: Vec<BigInt> = valuations
        .values()
        .iter()
        .map(|v| v.numer() * (&scale / v.denom()))
        .collect();

    let mut prices = vec![BigInt::zero(); n];
    let mut trace = AuctionTrace::default();
    loop {
        let graph = integer_graph(n, &scaled, &prices);
        match find_perfect_matching(&graph) {
            PerfectMatchingOutcome::Perfect(matching) => {
                return AuctionResult {
                    prices: unscale(&prices, &scale),
                    matching,
                    trace,
                };
            }
            PerfectMatchingOutcome::NoPerfectMatching(set) => {
                debug_assert!(set.neighborhood.len() < set.buyers.len());
                for &product in &set.neighborhood {
                    prices[product] += 1;
                }
                if prices.iter().all(Signed::is_positive) {
                    let min = prices.iter().min().cloned().expect("n >= 1");
                    prices.iter_mut().for_each(|p| *p -= &min);
                }
                trace.rounds.push(AuctionRound {
                    raised: set.neighborhood.clone(),
                    constricted: set.buyers,
                    neighborhood: set.neighborhood,
                    prices: unscale(&prices, &scale),
                });
            }
        }
    }
}
