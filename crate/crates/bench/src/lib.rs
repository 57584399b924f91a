//! Fixed inputs for the benchmarks in `benches/`.

use matchmarket::verify::InstanceGenerator;
use matchmarket::ValuationMatrix;

/// A seeded random market of size `n` with values in `0..=20`.
pub fn random_market(n: usize, seed: u64) -> ValuationMatrix {
    InstanceGenerator::new(seed).market(n)
}

/// Every buyer values every product equally, so all `n!` matchings tie.
pub fn flat_market(n: usize) -> ValuationMatrix {
    ValuationMatrix::from_integers(&vec![vec![1; n]; n]).expect("square")
}
