//! Market data model: valuations, prices, matchings and the preferred-product
//! graph, plus the market-clearing decision procedure.
//!
//! Buyers and products are 0-based in this API. Error messages report them
//! 1-based.

use std::collections::VecDeque;
use std::fmt;
use std::ops::Index;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::rational::Rational;

/// Square, nonnegative valuation matrix. Entry `(i, j)` is what buyer `i`
/// is willing to pay for product `j`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ValuationMatrix {
    n: usize,
    values: Vec<Rational>,
}

impl ValuationMatrix {
    pub fn new(rows: Vec<Vec<Rational>>) -> Result<Self, Error> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::NotSquare("no rows".into()));
        }
        let mut values = Vec::with_capacity(n * n);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != n {
                return Err(Error::NotSquare(format!(
                    "row {} has {} entries, expected {n}",
                    i + 1,
                    row.len()
                )));
            }
            for (j, value) in row.into_iter().enumerate() {
                if value.is_negative() {
                    return Err(Error::NegativeValuation {
                        buyer: i + 1,
                        product: j + 1,
                        value: value.to_string(),
                    });
                }
                values.push(value);
            }
        }
        Ok(Self { n, values })
    }

    pub fn from_integers<R: AsRef<[i64]>>(rows: &[R]) -> Result<Self, Error> {
        Self::new(
            rows.iter()
                .map(|row| row.as_ref().iter().map(|&v| Rational::from_integer(v)).collect())
                .collect(),
        )
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, buyer: usize, product: usize) -> &Rational {
        &self.values[buyer * self.n + product]
    }

    pub fn row(&self, buyer: usize) -> &[Rational] {
        &self.values[buyer * self.n..(buyer + 1) * self.n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Rational]> {
        self.values.chunks(self.n)
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn max_value(&self) -> Rational {
        self.values.iter().max().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
        self.rows().map(<[Rational]>::to_vec).collect()
    }
}

impl fmt::Debug for ValuationMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.rows()).finish()
    }
}

/// One price per product. Prices may be negative.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PriceVector(Vec<Rational>);

impl PriceVector {
    pub fn new(prices: Vec<Rational>) -> Self {
        Self(prices)
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![Rational::zero(); n])
    }

    pub fn from_integers(prices: &[i64]) -> Self {
        Self(prices.iter().map(|&p| Rational::from_integer(p)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Rational] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Rational> {
        self.0.iter()
    }

    pub fn into_inner(self) -> Vec<Rational> {
        self.0
    }

    pub fn min_price(&self) -> Option<&Rational> {
        self.0.iter().min()
    }

    pub(crate) fn expect_len(&self, n: usize) -> Result<(), Error> {
        if self.0.len() == n {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: n,
                actual: self.0.len(),
            })
        }
    }
}

impl Index<usize> for PriceVector {
    type Output = Rational;
    fn index(&self, product: usize) -> &Rational {
        &self.0[product]
    }
}

impl FromIterator<Rational> for PriceVector {
    fn from_iter<I: IntoIterator<Item = Rational>>(iter: I) -> Self {
        Self(iter.into_iter().collect())
    }
}

impl fmt::Debug for PriceVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.0).finish()
    }
}

/// A set of `(buyer, product)` pairs with no repeated buyer or product.
///
/// Pairs are kept sorted by buyer, so the derived ordering is the canonical
/// lexicographic order used by [`crate::MatchingSet`].
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize)]
#[serde(transparent)]
pub struct Matching {
    pairs: Vec<(usize, usize)>,
}

impl Matching {
    pub fn new<I: IntoIterator<Item = (usize, usize)>>(pairs: I) -> Result<Self, Error> {
        let mut pairs: Vec<_> = pairs.into_iter().collect();
        pairs.sort_unstable();
        for window in pairs.windows(2) {
            if window[0].0 == window[1].0 {
                return Err(Error::InvalidMatching {
                    what: "buyer",
                    index: window[0].0 + 1,
                });
            }
        }
        let mut products: Vec<usize> = pairs.iter().map(|&(_, p)| p).collect();
        products.sort_unstable();
        for window in products.windows(2) {
            if window[0] == window[1] {
                return Err(Error::InvalidMatching {
                    what: "product",
                    index: window[0] + 1,
                });
            }
        }
        Ok(Self { pairs })
    }

    /// Perfect matching that gives buyer `i` product `assignment[i]`.
    pub fn from_assignment(assignment: &[usize]) -> Result<Self, Error> {
        Self::new(assignment.iter().copied().enumerate())
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn product_of(&self, buyer: usize) -> Option<usize> {
        self.pairs
            .binary_search_by_key(&buyer, |&(b, _)| b)
            .ok()
            .map(|k| self.pairs[k].1)
    }

    /// Checks that every index is below `n`.
    pub fn validate(&self, n: usize) -> Result<(), Error> {
        for &(b, p) in &self.pairs {
            if b >= n {
                return Err(Error::IndexOutOfRange { what: "buyer", index: b + 1, n });
            }
            if p >= n {
                return Err(Error::IndexOutOfRange { what: "product", index: p + 1, n });
            }
        }
        Ok(())
    }

    pub fn is_perfect(&self, n: usize) -> bool {
        self.pairs.len() == n && self.validate(n).is_ok()
    }

    /// Product of each buyer, when the matching is perfect for size `n`.
    pub fn assignment(&self, n: usize) -> Option<Vec<usize>> {
        self.is_perfect(n)
            .then(|| self.pairs.iter().map(|&(_, p)| p).collect())
    }

    pub fn is_subgraph_of(&self, graph: &PreferredProductGraph) -> bool {
        self.pairs.iter().all(|&(b, p)| graph.contains(b, p))
    }
}

impl fmt::Debug for Matching {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set()
            .entries(self.pairs.iter().map(|&(b, p)| (b + 1, p + 1)))
            .finish()
    }
}

/// For each buyer, every product that maximizes `v[i][j] - p[j]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PreferredProductGraph {
    n: usize,
    preferred: Vec<Vec<usize>>,
}

impl PreferredProductGraph {
    /// Builds a graph from explicit preferred sets. Each set must be nonempty
    /// and in range; duplicates are dropped.
    pub fn from_sets(n: usize, sets: Vec<Vec<usize>>) -> Result<Self, Error> {
        if sets.len() != n {
            return Err(Error::DimensionMismatch { expected: n, actual: sets.len() });
        }
        let mut preferred = Vec::with_capacity(n);
        for (buyer, mut set) in sets.into_iter().enumerate() {
            set.sort_unstable();
            set.dedup();
            if set.is_empty() {
                return Err(Error::Parse(format!("buyer {} has no preferred product", buyer + 1)));
            }
            if let Some(&p) = set.iter().find(|&&p| p >= n) {
                return Err(Error::IndexOutOfRange { what: "product", index: p + 1, n });
            }
            preferred.push(set);
        }
        Ok(Self { n, preferred })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn preferred(&self, buyer: usize) -> &[usize] {
        &self.preferred[buyer]
    }

    pub fn contains(&self, buyer: usize, product: usize) -> bool {
        self.preferred
            .get(buyer)
            .is_some_and(|set| set.binary_search(&product).is_ok())
    }

    pub fn edge_count(&self) -> usize {
        self.preferred.iter().map(Vec::len).sum()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.preferred
            .iter()
            .enumerate()
            .flat_map(|(b, set)| set.iter().map(move |&p| (b, p)))
    }
}

/// Best attainable payoff of each buyer under a price vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BuyerPayoff {
    u: Vec<Rational>,
}

impl BuyerPayoff {
    pub fn values(&self) -> &[Rational] {
        &self.u
    }

    pub fn get(&self, buyer: usize) -> &Rational {
        &self.u[buyer]
    }
}

/// A Hall violator: buyers whose preferred products, taken together, are
/// fewer than the buyers themselves.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConstrictedSet {
    pub buyers: Vec<usize>,
    pub neighborhood: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PerfectMatchingOutcome {
    Perfect(Matching),
    NoPerfectMatching(ConstrictedSet),
}

impl PerfectMatchingOutcome {
    pub fn matching(&self) -> Option<&Matching> {
        match self {
            Self::Perfect(m) => Some(m),
            Self::NoPerfectMatching(_) => None,
        }
    }
}

/// Sum of valuations over the matched pairs.
pub fn social_welfare(valuations: &ValuationMatrix, matching: &Matching) -> Result<Rational, Error> {
    matching.validate(valuations.n())?;
    Ok(matching
        .pairs()
        .iter()
        .map(|&(b, p)| valuations.get(b, p))
        .sum())
}

fn payoff_rows<'a>(
    valuations: &'a ValuationMatrix,
    prices: &'a PriceVector,
) -> impl Iterator<Item = Vec<Rational>> + 'a {
    valuations
        .rows()
        .map(move |row| row.iter().zip(prices.iter()).map(|(v, p)| v - p).collect())
}

pub fn buyer_payoffs(valuations: &ValuationMatrix, prices: &PriceVector) -> Result<BuyerPayoff, Error> {
    prices.expect_len(valuations.n())?;
    let u = payoff_rows(valuations, prices)
        .map(|row| row.into_iter().max().expect("n >= 1"))
        .collect();
    Ok(BuyerPayoff { u })
}

pub fn preferred_graph(
    valuations: &ValuationMatrix,
    prices: &PriceVector,
) -> Result<PreferredProductGraph, Error> {
    prices.expect_len(valuations.n())?;
    let preferred = payoff_rows(valuations, prices)
        .map(|row| argmax_set(&row))
        .collect();
    Ok(PreferredProductGraph {
        n: valuations.n(),
        preferred,
    })
}

/// All indices attaining the maximum of `row`.
pub(crate) fn argmax_set<T: Ord>(row: &[T]) -> Vec<usize> {
    let best = row.iter().max().expect("nonempty row");
    row.iter()
        .enumerate()
        .filter(|(_, x)| *x == best)
        .map(|(j, _)| j)
        .collect()
}

pub(crate) fn graph_from_sets_unchecked(n: usize, preferred: Vec<Vec<usize>>) -> PreferredProductGraph {
    PreferredProductGraph { n, preferred }
}

/// Maximum-cardinality matching by repeated augmenting-path search. Returns
/// `buyer -> product` assignments (`None` for unmatched) and the inverse map.
fn maximum_matching(graph: &PreferredProductGraph) -> (Vec<Option<usize>>, Vec<Option<usize>>) {
    let n = graph.n();
    let mut buyer_to_product = vec![None; n];
    let mut product_to_buyer = vec![None; n];
    let mut visited = vec![false; n];

    fn augment(
        buyer: usize,
        graph: &PreferredProductGraph,
        visited: &mut [bool],
        buyer_to_product: &mut [Option<usize>],
        product_to_buyer: &mut [Option<usize>],
    ) -> bool {
        for &product in graph.preferred(buyer) {
            if visited[product] {
                continue;
            }
            visited[product] = true;
            let free = match product_to_buyer[product] {
                None => true,
                Some(other) => augment(other, graph, visited, buyer_to_product, product_to_buyer),
            };
            if free {
                buyer_to_product[buyer] = Some(product);
                product_to_buyer[product] = Some(buyer);
                return true;
            }
        }
        false
    }

    for buyer in 0..n {
        visited.iter_mut().for_each(|v| *v = false);
        augment(
            buyer,
            graph,
            &mut visited,
            &mut buyer_to_product,
            &mut product_to_buyer,
        );
    }
    (buyer_to_product, product_to_buyer)
}

/// Finds a perfect matching of `graph`, or a constricted buyer set proving
/// none exists.
///
/// The constricted set is everything reachable by alternating paths from an
/// unmatched buyer in a maximum matching; its neighborhood is exactly one
/// product smaller than the set.
pub fn find_perfect_matching(graph: &PreferredProductGraph) -> PerfectMatchingOutcome {
    let (buyer_to_product, product_to_buyer) = maximum_matching(graph);
    let Some(root) = buyer_to_product.iter().position(Option::is_none) else {
        let pairs = buyer_to_product
            .iter()
            .enumerate()
            .map(|(b, p)| (b, p.expect("all matched")));
        return PerfectMatchingOutcome::Perfect(
            Matching::new(pairs).expect("augmenting search keeps the matching injective"),
        );
    };

    let n = graph.n();
    let mut in_s = vec![false; n];
    let mut in_ns = vec![false; n];
    let mut queue = VecDeque::from([root]);
    in_s[root] = true;
    while let Some(buyer) = queue.pop_front() {
        for &product in graph.preferred(buyer) {
            if in_ns[product] {
                continue;
            }
            in_ns[product] = true;
            let mate = product_to_buyer[product]
                .expect("a reachable free product would be an augmenting path");
            if !in_s[mate] {
                in_s[mate] = true;
                queue.push_back(mate);
            }
        }
    }
    let collect = |mask: &[bool]| mask.iter().enumerate().filter(|(_, &x)| x).map(|(k, _)| k).collect();
    PerfectMatchingOutcome::NoPerfectMatching(ConstrictedSet {
        buyers: collect(&in_s),
        neighborhood: collect(&in_ns),
    })
}

pub fn is_market_clearing(valuations: &ValuationMatrix, prices: &PriceVector) -> Result<bool, Error> {
    let graph = preferred_graph(valuations, prices)?;
    Ok(matches!(
        find_perfect_matching(&graph),
        PerfectMatchingOutcome::Perfect(_)
    ))
}

/// Neighborhood of a buyer set in `graph`, sorted.
pub fn neighborhood(graph: &PreferredProductGraph, buyers: &[usize]) -> Vec<usize> {
    let mut products: Vec<usize> = buyers
        .iter()
        .flat_map(|&b| graph.preferred(b).iter().copied())
        .collect();
    products.sort_unstable();
    products.dedup();
    products
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(rows: &[&[i64]]) -> ValuationMatrix {
        ValuationMatrix::from_integers(rows).unwrap()
    }

    fn example3() -> ValuationMatrix {
        v(&[&[12, 4, 2], &[8, 7, 6], &[7, 5, 2]])
    }

    fn pm(pairs: &[(usize, usize)]) -> Matching {
        Matching::new(pairs.iter().copied()).unwrap()
    }

    #[test]
    fn rejects_bad_matrices() {
        assert!(matches!(
            ValuationMatrix::from_integers::<[i64; 0]>(&[]),
            Err(Error::NotSquare(_))
        ));
        assert!(matches!(
            ValuationMatrix::from_integers(&[vec![1, 2], vec![3]]),
            Err(Error::NotSquare(_))
        ));
        assert!(matches!(
            ValuationMatrix::from_integers(&[vec![1, 2, 3], vec![4, 5, 6]]),
            Err(Error::NotSquare(_))
        ));
        assert_eq!(
            ValuationMatrix::from_integers(&[[1, -2], [3, 4]]),
            Err(Error::NegativeValuation { buyer: 1, product: 2, value: "-2".into() })
        );
    }

    #[test]
    fn matching_rejects_shared_endpoints() {
        assert!(matches!(
            Matching::new([(0, 1), (0, 2)]),
            Err(Error::InvalidMatching { what: "buyer", index: 1 })
        ));
        assert!(matches!(
            Matching::new([(0, 1), (2, 1)]),
            Err(Error::InvalidMatching { what: "product", index: 2 })
        ));
        let m = pm(&[(2, 0), (0, 1)]);
        assert_eq!(m.pairs(), &[(0, 1), (2, 0)]);
        assert_eq!(m.product_of(2), Some(0));
        assert_eq!(m.product_of(1), None);
        assert!(!m.is_perfect(3));
    }

    #[test]
    fn social_welfare_examples() {
        assert_eq!(social_welfare(&v(&[&[5]]), &pm(&[(0, 0)])).unwrap(), 5.into());
        assert_eq!(social_welfare(&example3(), &Matching::empty()).unwrap(), 0.into());
        let m2 = v(&[&[3, 2], &[1, 4]]);
        assert_eq!(social_welfare(&m2, &pm(&[(0, 0), (1, 1)])).unwrap(), 7.into());
        // brute force over both permutations of the 2x2 case
        let other = social_welfare(&m2, &pm(&[(0, 1), (1, 0)])).unwrap();
        assert_eq!(other, 3.into());
        assert_eq!(
            social_welfare(&m2, &pm(&[(0, 2)])),
            Err(Error::IndexOutOfRange { what: "product", index: 3, n: 2 })
        );
        assert_eq!(
            social_welfare(&m2, &pm(&[(5, 0)])),
            Err(Error::IndexOutOfRange { what: "buyer", index: 6, n: 2 })
        );
    }

    #[test]
    fn preferred_graph_examples() {
        let g = preferred_graph(&v(&[&[1, 0], &[0, 1]]), &PriceVector::zeros(2)).unwrap();
        assert_eq!(g.preferred(0), &[0]);
        assert_eq!(g.preferred(1), &[1]);

        for t in [-7, 0, 3, 100] {
            let g = preferred_graph(&v(&[&[5]]), &PriceVector::from_integers(&[t])).unwrap();
            assert_eq!(g.preferred(0), &[0]);
        }

        // payoff rows (9,3,2), (5,6,6), (4,4,2)
        let g = preferred_graph(&example3(), &PriceVector::from_integers(&[3, 1, 0])).unwrap();
        assert_eq!(g.preferred(0), &[0]);
        assert_eq!(g.preferred(1), &[1, 2]);
        assert_eq!(g.preferred(2), &[0, 1]);

        assert_eq!(
            preferred_graph(&example3(), &PriceVector::zeros(2)),
            Err(Error::DimensionMismatch { expected: 3, actual: 2 })
        );
    }

    #[test]
    fn buyer_payoff_examples() {
        let u = buyer_payoffs(&v(&[&[1, 0], &[0, 1]]), &PriceVector::zeros(2)).unwrap();
        assert_eq!(u.values(), &[1.into(), 1.into()]);
        let u = buyer_payoffs(&v(&[&[5]]), &PriceVector::from_integers(&[2])).unwrap();
        assert_eq!(u.values(), &[3.into()]);
        let u = buyer_payoffs(&example3(), &PriceVector::from_integers(&[3, 1, 0])).unwrap();
        assert_eq!(u.values(), &[9.into(), 6.into(), 4.into()]);
        assert!(buyer_payoffs(&example3(), &PriceVector::zeros(4)).is_err());
    }

    #[test]
    fn fractional_prices_compare_exactly() {
        let vals = ValuationMatrix::new(vec![vec!["1/3".parse().unwrap(), "0".parse().unwrap()]; 2]).unwrap();
        let prices = PriceVector::new(vec!["1/3".parse().unwrap(), Rational::zero()]);
        let g = preferred_graph(&vals, &prices).unwrap();
        assert_eq!(g.preferred(0), &[0, 1]);
    }

    #[test]
    fn find_perfect_matching_examples() {
        let g = preferred_graph(&v(&[&[1, 0], &[0, 1]]), &PriceVector::zeros(2)).unwrap();
        assert_eq!(
            find_perfect_matching(&g),
            PerfectMatchingOutcome::Perfect(pm(&[(0, 0), (1, 1)]))
        );

        let g = preferred_graph(&v(&[&[2, 0], &[2, 0]]), &PriceVector::zeros(2)).unwrap();
        assert_eq!(
            find_perfect_matching(&g),
            PerfectMatchingOutcome::NoPerfectMatching(ConstrictedSet {
                buyers: vec![0, 1],
                neighborhood: vec![0],
            })
        );

        let g = preferred_graph(&example3(), &PriceVector::from_integers(&[3, 1, 0])).unwrap();
        assert_eq!(
            find_perfect_matching(&g),
            PerfectMatchingOutcome::Perfect(pm(&[(0, 0), (1, 2), (2, 1)]))
        );
    }

    #[test]
    fn constricted_set_is_a_hall_violator() {
        // buyers 0,1,2 all want only {0,1}; buyer 3 wants everything
        let g = PreferredProductGraph::from_sets(
            4,
            vec![vec![0, 1], vec![0, 1], vec![1, 0], vec![0, 1, 2, 3]],
        )
        .unwrap();
        let PerfectMatchingOutcome::NoPerfectMatching(s) = find_perfect_matching(&g) else {
            panic!("expected a constricted set");
        };
        assert_eq!(neighborhood(&g, &s.buyers), s.neighborhood);
        assert!(s.neighborhood.len() < s.buyers.len());
    }

    #[test]
    fn market_clearing_examples() {
        assert!(is_market_clearing(&v(&[&[1, 0], &[0, 1]]), &PriceVector::zeros(2)).unwrap());
        assert!(!is_market_clearing(&v(&[&[2, 0], &[2, 0]]), &PriceVector::zeros(2)).unwrap());
        assert!(is_market_clearing(&example3(), &PriceVector::from_integers(&[3, 1, 0])).unwrap());
        assert!(is_market_clearing(&example3(), &PriceVector::zeros(1)).is_err());
    }

    #[test]
    fn graph_from_sets_validates() {
        assert!(PreferredProductGraph::from_sets(2, vec![vec![0]]).is_err());
        assert!(PreferredProductGraph::from_sets(2, vec![vec![0], vec![]]).is_err());
        assert!(PreferredProductGraph::from_sets(2, vec![vec![0], vec![2]]).is_err());
        let g = PreferredProductGraph::from_sets(2, vec![vec![1, 0, 1], vec![1]]).unwrap();
        assert_eq!(g.preferred(0), &[0, 1]);
        assert_eq!(g.edge_count(), 3);
    }
}
