//! Maximum-weight perfect matchings: the ascending-price auction, the
//! brute-force oracle and perfect-matching enumeration.

mod auction;
mod enumerate;
mod oracle;

use std::collections::BTreeSet;

use serde::{Serialize, Serializer};

pub use auction::{solve_auction, AuctionResult, AuctionRound, AuctionTrace};
pub use enumerate::{
    enumerate_perfect_matchings, CapExceeded, DEFAULT_ENUMERATION_CAP,
};
pub use oracle::{
    brute_force_max_matchings, brute_force_max_matchings_capped, permutations, MaximumMatchings,
    DEFAULT_ORACLE_CAP,
};

use crate::market::Matching;

/// A set of perfect matchings over a common market size, in canonical order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MatchingSet {
    n: usize,
    matchings: BTreeSet<Matching>,
}

impl MatchingSet {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            matchings: BTreeSet::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Inserts a perfect matching; returns `false` if it was already present.
    ///
    /// # Panics
    /// If `matching` is not perfect for this set's size.
    pub fn insert(&mut self, matching: Matching) -> bool {
        assert!(
            matching.is_perfect(self.n),
            "MatchingSet holds perfect matchings of size {}",
            self.n
        );
        self.matchings.insert(matching)
    }

    pub fn len(&self) -> usize {
        self.matchings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matchings.is_empty()
    }

    pub fn contains(&self, matching: &Matching) -> bool {
        self.matchings.contains(matching)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Matching> {
        self.matchings.iter()
    }

    pub fn first(&self) -> Option<&Matching> {
        self.matchings.first()
    }

    pub fn is_subset(&self, other: &MatchingSet) -> bool {
        self.matchings.is_subset(&other.matchings)
    }

    /// Members of `self` missing from `other`.
    pub fn difference<'a>(&'a self, other: &'a MatchingSet) -> impl Iterator<Item = &'a Matching> {
        self.matchings.difference(&other.matchings)
    }
}

impl<'a> IntoIterator for &'a MatchingSet {
    type Item = &'a Matching;
    type IntoIter = std::collections::btree_set::Iter<'a, Matching>;

    fn into_iter(self) -> Self::IntoIter {
        self.matchings.iter()
    }
}

impl Serialize for MatchingSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(&self.matchings)
    }
}
