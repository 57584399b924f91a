//! Seeded random markets. Small integer valuations make ties, and therefore
//! multiple maximum matchings, common.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::market::ValuationMatrix;
use crate::rational::Rational;

pub const DEFAULT_MAX_VALUE: i64 = 20;
pub const DEFAULT_MAX_SIZE: usize = 7;

#[derive(Debug, Clone)]
pub struct InstanceGenerator {
    rng: ChaCha8Rng,
    max_value: i64,
    max_size: usize,
}

impl InstanceGenerator {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            max_value: DEFAULT_MAX_VALUE,
            max_size: DEFAULT_MAX_SIZE,
        }
    }

    pub fn with_max_value(mut self, max_value: i64) -> Self {
        assert!(max_value >= 0);
        self.max_value = max_value;
        self
    }

    pub fn with_max_size(mut self, max_size: usize) -> Self {
        assert!(max_size >= 1);
        self.max_size = max_size;
        self
    }

    pub fn size(&mut self) -> usize {
        self.rng.random_range(1..=self.max_size)
    }

    /// Uniform integer valuations in `[0, max_value]`.
    pub fn market(&mut self, n: usize) -> ValuationMatrix {
        let rows: Vec<Vec<i64>> = (0..n)
            .map(|_| (0..n).map(|_| self.rng.random_range(0..=self.max_value)).collect())
            .collect();
        ValuationMatrix::from_integers(&rows).expect("square and nonnegative")
    }

    /// Like [`market`](Self::market) but one buyer's row is copied onto
    /// another's, so swapping those two buyers preserves welfare and there
    /// are at least two maximum matchings. Requires `n >= 2`.
    pub fn market_with_duplicate_row(&mut self, n: usize) -> ValuationMatrix {
        assert!(n >= 2, "need two buyers to duplicate a row");
        let mut rows = self.market(n).to_rows();
        let source = self.rng.random_range(0..n);
        let mut target = self.rng.random_range(0..n - 1);
        if target >= source {
            target += 1;
        }
        rows[target] = rows[source].clone();
        ValuationMatrix::new(rows).expect("square and nonnegative")
    }

    /// Random rational in `[lo, hi]` with denominator up to 12.
    pub fn rational_in(&mut self, lo: &Rational, hi: &Rational) -> Rational {
        let denom: i64 = self.rng.random_range(1..=12);
        let steps: i64 = self.rng.random_range(0..=denom);
        let frac = Rational::new(steps, denom).expect("denominator is positive");
        lo + &(&frac * &(hi - lo))
    }

    pub fn alpha(&mut self) -> Rational {
        self.rational_in(&Rational::zero(), &Rational::one())
    }

    pub fn index(&mut self, len: usize) -> usize {
        self.rng.random_range(0..len)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_for_a_seed() {
        let a = InstanceGenerator::new(7).market(5);
        let b = InstanceGenerator::new(7).market(5);
        assert_eq!(a, b);
        assert_ne!(a, InstanceGenerator::new(8).market(5));
    }

    #[test]
    fn values_in_range() {
        let mut generator = InstanceGenerator::new(1);
        for _ in 0..20 {
            let n = generator.size();
            assert!((1..=DEFAULT_MAX_SIZE).contains(&n));
            let v = generator.market(n);
            assert!(v.values().iter().all(|x| *x >= Rational::zero() && *x <= Rational::from(20)));
        }
    }

    #[test]
    fn duplicated_rows() {
        let mut generator = InstanceGenerator::new(3);
        for n in 2..6 {
            let v = generator.market_with_duplicate_row(n);
            let rows = v.to_rows();
            let mut seen = rows.clone();
            seen.sort();
            seen.dedup();
            assert!(seen.len() < rows.len());
        }
    }

    #[test]
    fn rationals_in_range() {
        let mut generator = InstanceGenerator::new(11);
        let lo = Rational::from(-20);
        let hi = Rational::from(20);
        for _ in 0..200 {
            let t = generator.rational_in(&lo, &hi);
            assert!(t >= lo && t <= hi);
            let a = generator.alpha();
            assert!(a >= Rational::zero() && a <= Rational::one());
        }
    }
}
