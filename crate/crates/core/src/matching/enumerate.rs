//! Exhaustive listing of the perfect matchings of a preferred-product graph.
//!
//! Backtracking over buyers: at every node, buyers left with a single free
//! preferred product are assigned immediately (repeating until nothing is
//! forced), a buyer with no free product prunes the branch, and otherwise we
//! branch on the buyer with the fewest free products.

use thiserror::Error;

use super::MatchingSet;
use crate::market::{Matching, PreferredProductGraph};

pub const DEFAULT_ENUMERATION_CAP: usize = 10_000;

/// More than `cap` perfect matchings exist; `partial` holds the first `cap`.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("more than {cap} perfect matchings")]
pub struct CapExceeded {
    pub cap: usize,
    pub partial: MatchingSet,
}

struct Search<'a> {
    graph: &'a PreferredProductGraph,
    cap: usize,
    assigned: Vec<Option<usize>>,
    taken: Vec<bool>,
    found: MatchingSet,
}

struct Full;

impl Search<'_> {
    fn free_options(&self, buyer: usize) -> impl Iterator<Item = usize> + '_ {
        self.graph
            .preferred(buyer)
            .iter()
            .copied()
            .filter(|&p| !self.taken[p])
    }

    fn assign(&mut self, buyer: usize, product: usize) {
        self.assigned[buyer] = Some(product);
        self.taken[product] = true;
    }

    fn unassign(&mut self, buyer: usize) {
        if let Some(product) = self.assigned[buyer].take() {
            self.taken[product] = false;
        }
    }

    fn run(&mut self) -> Result<(), Full> {
        let mut forced = Vec::new();
        let outcome = self.propagate_and_branch(&mut forced);
        for buyer in forced {
            self.unassign(buyer);
        }
        outcome
    }

    fn propagate_and_branch(&mut self, forced: &mut Vec<usize>) -> Result<(), Full> {
        // (buyer, free option count) of the least-flexible unassigned buyer
        let branch_on = loop {
            let mut tightest: Option<(usize, usize)> = None;
            let mut progressed = false;
            for buyer in 0..self.graph.n() {
                if self.assigned[buyer].is_some() {
                    continue;
                }
                let mut options = self.free_options(buyer);
                let Some(first) = options.next() else {
                    return Ok(());
                };
                let count = 1 + options.count();
                if count == 1 {
                    self.assign(buyer, first);
                    forced.push(buyer);
                    progressed = true;
                } else if tightest.is_none_or(|(_, c)| count < c) {
                    tightest = Some((buyer, count));
                }
            }
            if !progressed {
                break tightest;
            }
        };

        let Some((buyer, _)) = branch_on else {
            return self.record();
        };
        let options: Vec<usize> = self.free_options(buyer).collect();
        for product in options {
            self.assign(buyer, product);
            let outcome = self.run();
            self.unassign(buyer);
            outcome?;
        }
        Ok(())
    }

    fn record(&mut self) -> Result<(), Full> {
        if self.found.len() == self.cap {
            return Err(Full);
        }
        let assignment: Vec<usize> = self
            .assigned
            .iter()
            .map(|p| p.expect("every buyer assigned"))
            .collect();
        self.found
            .insert(Matching::from_assignment(&assignment).expect("taken products are distinct"));
        Ok(())
    }
}

/// Every perfect matching of `graph`, or [`CapExceeded`] when there are more
/// than `cap` of them.
pub fn enumerate_perfect_matchings(
    graph: &PreferredProductGraph,
    cap: usize,
) -> Result<MatchingSet, CapExceeded> {
    let n = graph.n();
    let mut search = Search {
        graph,
        cap,
        assigned: vec![None; n],
        taken: vec![false; n],
        found: MatchingSet::new(n),
    };
    match search.run() {
        Ok(()) => Ok(search.found),
        Err(Full) => Err(CapExceeded {
            cap,
            partial: search.found,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::market::{preferred_graph, PriceVector, ValuationMatrix};
    use crate::matching::permutations;

    fn graph(rows: &[&[i64]], prices: &[i64]) -> PreferredProductGraph {
        let v = ValuationMatrix::from_integers(rows).unwrap();
        preferred_graph(&v, &PriceVector::from_integers(prices)).unwrap()
    }

    #[test]
    fn identity_has_one_matching() {
        let out = enumerate_perfect_matchings(&graph(&[&[1, 0], &[0, 1]], &[0, 0]), 10).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out.first().unwrap().pairs(), &[(0, 0), (1, 1)]);
    }

    #[test]
    fn complete_graph_has_all_permutations() {
        let out = enumerate_perfect_matchings(&graph(&[&[4; 3], &[4; 3], &[4; 3]], &[0, 0, 0]), 100).unwrap();
        assert_eq!(out.len(), 6);
        for p in permutations(3) {
            assert!(out.contains(&Matching::from_assignment(&p).unwrap()));
        }
    }

    #[test]
    fn forced_buyer_leaves_single_completion() {
        let g = graph(&[&[12, 4, 2], &[8, 7, 6], &[7, 5, 2]], &[3, 1, 0]);
        let out = enumerate_perfect_matchings(&g, 10).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out.first().unwrap().pairs(), &[(0, 0), (1, 2), (2, 1)]);
    }

    #[test]
    fn no_perfect_matching_gives_empty_set() {
        let out = enumerate_perfect_matchings(&graph(&[&[2, 0], &[2, 0]], &[0, 0]), 10).unwrap();
        assert!(out.is_empty());
    }

    #[test]
    fn cap_exceeded_keeps_partial() {
        let rows = vec![vec![1i64; 5]; 5];
        let v = ValuationMatrix::from_integers(&rows).unwrap();
        let g = preferred_graph(&v, &PriceVector::zeros(5)).unwrap();
        let err = enumerate_perfect_matchings(&g, 7).unwrap_err();
        assert_eq!(err.cap, 7);
        assert_eq!(err.partial.len(), 7);
        // exactly at the cap is fine
        assert_eq!(enumerate_perfect_matchings(&g, 120).unwrap().len(), 120);
        assert!(enumerate_perfect_matchings(&g, 119).is_err());
    }
}
