//! Exhaustive `n!` search over perfect matchings. Ground truth for every
//! theorem check, so it deliberately shares no code with the auction or the
//! enumerator.

use std::ops::Add;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use super::MatchingSet;
use crate::error::Error;
use crate::market::{Matching, ValuationMatrix};
use crate::rational::{common_denominator, Rational};

pub const DEFAULT_ORACLE_CAP: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaximumMatchings {
    pub matchings: MatchingSet,
    pub welfare: Rational,
}

pub fn brute_force_max_matchings(valuations: &ValuationMatrix) -> Result<MaximumMatchings, Error> {
    brute_force_max_matchings_capped(valuations, DEFAULT_ORACLE_CAP)
}

pub fn brute_force_max_matchings_capped(
    valuations: &ValuationMatrix,
    cap: usize,
) -> Result<MaximumMatchings, Error> {
    let n = valuations.n();
    if n > cap {
        return Err(Error::OracleCapExceeded { n, cap });
    }
    // Work on integers: every welfare is scaled by the same positive factor.
    let scale = common_denominator(valuations.values());
    let scaled: Vec<BigInt> = valuations
        .values()
        .iter()
        .map(|v| v.numer() * (&scale / v.denom()))
        .collect();

    let (best, assignments) = match scaled.iter().map(ToPrimitive::to_i64).collect::<Option<Vec<_>>>() {
        Some(small) => {
            let small: Vec<i128> = small.into_iter().map(i128::from).collect();
            let (best, found) = search(n, &small);
            (BigInt::from(best), found)
        }
        None => search(n, &scaled),
    };

    let mut matchings = MatchingSet::new(n);
    for assignment in assignments {
        matchings.insert(Matching::from_assignment(&assignment).expect("permutation"));
    }
    Ok(MaximumMatchings {
        matchings,
        welfare: Rational::from_parts(best, scale),
    })
}

fn search<T>(n: usize, values: &[T]) -> (T, Vec<Vec<usize>>)
where
    T: Clone + Ord + Zero,
    for<'a> &'a T: Add<&'a T, Output = T>,
{
    struct State<'a, T> {
        n: usize,
        values: &'a [T],
        used: Vec<bool>,
        current: Vec<usize>,
        best: Option<T>,
        found: Vec<Vec<usize>>,
    }

    fn descend<T>(state: &mut State<'_, T>, partial: T)
    where
        T: Clone + Ord + Zero,
        for<'a> &'a T: Add<&'a T, Output = T>,
    {
        let buyer = state.current.len();
        if buyer == state.n {
            match &state.best {
                Some(best) if partial < *best => {}
                Some(best) if partial == *best => state.found.push(state.current.clone()),
                _ => {
                    state.best = Some(partial);
                    state.found.clear();
                    state.found.push(state.current.clone());
                }
            }
            return;
        }
        for product in 0..state.n {
            if state.used[product] {
                continue;
            }
            state.used[product] = true;
            state.current.push(product);
            let next = &partial + &state.values[buyer * state.n + product];
            descend(state, next);
            state.current.pop();
            state.used[product] = false;
        }
    }

    let mut state = State {
        n,
        values,
        used: vec![false; n],
        current: Vec::with_capacity(n),
        best: None,
        found: Vec::new(),
    };
    descend(&mut state, T::zero());
    (state.best.expect("n >= 1"), state.found)
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..n).collect();
    loop {
        out.push(current.clone());
        // next lexicographic permutation
        let Some(i) = (1..n).rev().find(|&i| current[i - 1] < current[i]) else {
            return out;
        };
        let j = (i..n).rev().find(|&j| current[j] > current[i - 1]).expect("pivot");
        current.swap(i - 1, j);
        current[i..].reverse();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::market::social_welfare;

    fn v(rows: &[&[i64]]) -> ValuationMatrix {
        ValuationMatrix::from_integers(rows).unwrap()
    }

    #[test]
    fn permutations_are_complete() {
        assert_eq!(permutations(1), vec![vec![0]]);
        assert_eq!(permutations(3).len(), 6);
        assert_eq!(permutations(5).len(), 120);
        let mut p = permutations(4);
        let before = p.clone();
        p.sort();
        p.dedup();
        assert_eq!(p, before);
    }

    #[test]
    fn single_entry() {
        let out = brute_force_max_matchings(&v(&[&[5]])).unwrap();
        assert_eq!(out.welfare, 5.into());
        assert_eq!(out.matchings.len(), 1);
        assert!(out.matchings.contains(&Matching::from_assignment(&[0]).unwrap()));
    }

    #[test]
    fn full_symmetry_returns_all() {
        let out = brute_force_max_matchings(&v(&[&[1, 1], &[1, 1]])).unwrap();
        assert_eq!(out.welfare, 2.into());
        assert_eq!(out.matchings.len(), 2);
    }

    #[test]
    fn three_by_three_is_unique() {
        let vals = v(&[&[12, 4, 2], &[8, 7, 6], &[7, 5, 2]]);
        // welfare of each permutation, lexicographic order
        let welfares: Vec<Rational> = permutations(3)
            .iter()
            .map(|p| social_welfare(&vals, &Matching::from_assignment(p).unwrap()).unwrap())
            .collect();
        let expected: Vec<Rational> = [21, 23, 14, 17, 15, 16].into_iter().map(Rational::from).collect();
        assert_eq!(welfares, expected);

        let out = brute_force_max_matchings(&vals).unwrap();
        assert_eq!(out.welfare, 23.into());
        assert_eq!(out.matchings.len(), 1);
        assert_eq!(out.matchings.first().unwrap().pairs(), &[(0, 0), (1, 2), (2, 1)]);
    }

    #[test]
    fn fractional_and_huge_values() {
        let half: Rational = "1/2".parse().unwrap();
        let third: Rational = "1/3".parse().unwrap();
        let vals = ValuationMatrix::new(vec![
            vec![half.clone(), third.clone()],
            vec![third.clone(), half.clone()],
        ])
        .unwrap();
        let out = brute_force_max_matchings(&vals).unwrap();
        assert_eq!(out.welfare, Rational::one());

        let big: Rational = "123456789012345678901234567890".parse().unwrap();
        let vals = ValuationMatrix::new(vec![
            vec![big.clone(), Rational::zero()],
            vec![Rational::zero(), big.clone()],
        ])
        .unwrap();
        let out = brute_force_max_matchings(&vals).unwrap();
        assert_eq!(out.welfare, &big + &big);
    }

    #[test]
    fn cap_is_enforced() {
        let vals = ValuationMatrix::from_integers(&vec![vec![0; 9]; 9]).unwrap();
        assert_eq!(
            brute_force_max_matchings(&vals),
            Err(Error::OracleCapExceeded { n: 9, cap: 8 })
        );
        let small = v(&[&[1, 2], &[3, 4]]);
        assert!(brute_force_max_matchings_capped(&small, 1).is_err());
        assert!(brute_force_max_matchings_capped(&small, 2).is_ok());
    }
}
