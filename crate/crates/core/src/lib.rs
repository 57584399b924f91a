//! Exact solvers and checkers for square matching markets.
//!
//! A market is an `n x n` matrix of nonnegative valuations: buyer `i` values
//! product `j` at `v[i][j]`. A price vector clears the market when every
//! buyer can be handed a distinct product that maximizes their payoff
//! `v[i][j] - p[j]`. The crate computes clearing prices (by an ascending
//! auction, or from any maximum matching via difference constraints),
//! enumerates the matchings a price vector induces, and checks on concrete
//! instances that clearing prices induce exactly the maximum-welfare
//! matchings.
//!
//! All arithmetic is exact ([`Rational`]). Buyers and products are 0-based.

pub mod error;
pub mod market;
pub mod matching;
pub mod pricing;
pub mod rational;
pub mod verify;

pub use error::{Error, PriceArg};
pub use market::{
    buyer_payoffs, find_perfect_matching, is_market_clearing, neighborhood, preferred_graph, social_welfare,
    BuyerPayoff, ConstrictedSet, Matching, PerfectMatchingOutcome, PreferredProductGraph, PriceVector,
    ValuationMatrix,
};
pub use matching::{
    brute_force_max_matchings, brute_force_max_matchings_capped, enumerate_perfect_matchings, solve_auction,
    AuctionResult, AuctionTrace, CapExceeded, MatchingSet, MaximumMatchings, DEFAULT_ENUMERATION_CAP,
    DEFAULT_ORACLE_CAP,
};
pub use pricing::{
    convex_combine, diagonal_shift, elementwise_max, elementwise_min, normalize, prices_from_matching, NotMaximum,
    PricingOutcome,
};
pub use rational::Rational;
pub use verify::VerificationReport;
