//! Instance-level checkers for the structural facts about clearing prices.
//!
//! Each checker compares what the solvers produce against the brute-force
//! oracle. A failing check is a bug somewhere in this crate, and carries a
//! [`Counterexample`] that [`Counterexample::replay`] confirms using the
//! market primitives only.

mod generator;
mod report;

pub use generator::{InstanceGenerator, DEFAULT_MAX_SIZE, DEFAULT_MAX_VALUE};
pub use report::{
    valuation_hash, CheckResult, Claim, Counterexample, CycleStep, InstanceDescriptor, VerificationReport,
};

use crate::error::{Error, PriceArg};
use crate::market::{is_market_clearing, preferred_graph, social_welfare, Matching, PriceVector, ValuationMatrix};
use crate::matching::{
    brute_force_max_matchings, enumerate_perfect_matchings, solve_auction, MatchingSet, MaximumMatchings,
    DEFAULT_ORACLE_CAP,
};
use crate::pricing::{
    convex_combine, diagonal_shift, elementwise_max, elementwise_min, prices_from_matching, PricingOutcome,
};
use crate::rational::Rational;

/// `PM(p)`: every perfect matching of `G(p)`.
///
/// Enumeration is bounded by `n!`, so it never hits its cap; callers keep `n`
/// within the oracle cap.
pub fn induced_matchings(valuations: &ValuationMatrix, prices: &PriceVector) -> Result<MatchingSet, Error> {
    let graph = preferred_graph(valuations, prices)?;
    let bound = (1..=valuations.n()).product::<usize>();
    Ok(enumerate_perfect_matchings(&graph, bound).expect("a graph on n buyers has at most n! perfect matchings"))
}

fn oracle_sized(valuations: &ValuationMatrix) -> Result<(), Error> {
    let n = valuations.n();
    if n > DEFAULT_ORACLE_CAP {
        Err(Error::OracleCapExceeded { n, cap: DEFAULT_ORACLE_CAP })
    } else {
        Ok(())
    }
}

fn require_clearing(valuations: &ValuationMatrix, prices: &PriceVector, which: PriceArg) -> Result<(), Error> {
    if is_market_clearing(valuations, prices)? {
        Ok(())
    } else {
        Err(Error::NotClearing(which))
    }
}

fn property1_result(prices: &PriceVector, induced: &MatchingSet, oracle: &MaximumMatchings) -> CheckResult {
    if induced.is_empty() {
        return CheckResult::fail(Claim::Property1, Counterexample::NotClearing { prices: prices.clone() });
    }
    match induced.difference(&oracle.matchings).next() {
        None => CheckResult::pass(Claim::Property1),
        Some(bad) => CheckResult::fail(
            Claim::Property1,
            Counterexample::SuboptimalInduced {
                prices: prices.clone(),
                induced: bad.clone(),
                better: oracle.matchings.first().expect("oracle is nonempty").clone(),
            },
        ),
    }
}

/// `PM(p)` is nonempty and contained in the set of maximum matchings.
pub fn check_property1(valuations: &ValuationMatrix, prices: &PriceVector) -> Result<VerificationReport, Error> {
    let oracle = brute_force_max_matchings(valuations)?;
    let induced = induced_matchings(valuations, prices)?;
    let mut report = VerificationReport::new(valuations);
    report.push(
        property1_result(prices, &induced, &oracle)
            .with_note(format!("|PM(p)| = {}, |M*| = {}", induced.len(), oracle.matchings.len())),
    );
    Ok(report)
}

/// Every induced matching attains the oracle's maximum welfare. Vacuous
/// when `p` induces nothing.
pub fn check_fact1(valuations: &ValuationMatrix, prices: &PriceVector) -> Result<VerificationReport, Error> {
    let oracle = brute_force_max_matchings(valuations)?;
    let induced = induced_matchings(valuations, prices)?;
    let mut report = VerificationReport::new(valuations);
    let mut result = CheckResult::pass(Claim::Fact1).with_note(format!("welfare {}", oracle.welfare));
    for matching in &induced {
        if social_welfare(valuations, matching)? != oracle.welfare {
            result = CheckResult::fail(
                Claim::Fact1,
                Counterexample::SuboptimalInduced {
                    prices: prices.clone(),
                    induced: matching.clone(),
                    better: oracle.matchings.first().expect("oracle is nonempty").clone(),
                },
            );
            break;
        }
    }
    report.push(result);
    Ok(report)
}

/// `PM(p)` equals the full set of maximum matchings.
pub fn check_theorem2(valuations: &ValuationMatrix, prices: &PriceVector) -> Result<VerificationReport, Error> {
    oracle_sized(valuations)?;
    require_clearing(valuations, prices, PriceArg::First)?;
    let oracle = brute_force_max_matchings(valuations)?;
    let induced = induced_matchings(valuations, prices)?;
    let mut report = VerificationReport::new(valuations);
    let some_induced = induced.first().expect("p clears").clone();
    let result = if let Some(missing) = oracle.matchings.difference(&induced).next() {
        CheckResult::fail(
            Claim::Theorem2,
            Counterexample::MissingMaximum {
                prices: prices.clone(),
                matching: missing.clone(),
                induced: some_induced,
            },
        )
    } else if let Some(extra) = induced.difference(&oracle.matchings).next() {
        CheckResult::fail(
            Claim::Theorem2,
            Counterexample::SuboptimalInduced {
                prices: prices.clone(),
                induced: extra.clone(),
                better: oracle.matchings.first().expect("oracle is nonempty").clone(),
            },
        )
    } else {
        CheckResult::pass(Claim::Theorem2).with_note(format!("|M*| = {}", oracle.matchings.len()))
    };
    report.push(result);
    Ok(report)
}

/// Traces the alternating cycle of `m` (induced by `p`) and `other` (induced
/// by `q`) through `start`, returning one step per buyer on it. Each step's
/// term is nonnegative whenever both inputs are what they claim to be, and
/// the terms telescope to zero, so all of them must vanish.
pub fn alternating_cycle(
    prices_p: &PriceVector,
    prices_q: &PriceVector,
    m: &[usize],
    other: &[usize],
    start: usize,
) -> Vec<CycleStep> {
    let n = m.len();
    let mut owner_in_m = vec![0; n];
    for (buyer, &product) in m.iter().enumerate() {
        owner_in_m[product] = buyer;
    }
    let mut steps = Vec::new();
    let mut buyer = start;
    loop {
        let p_product = m[buyer];
        let q_product = other[buyer];
        let term = (&prices_p[q_product] - &prices_p[p_product]) - (&prices_q[q_product] - &prices_q[p_product]);
        steps.push(CycleStep {
            buyer,
            p_product,
            q_product,
            term,
        });
        buyer = owner_in_m[q_product];
        if buyer == start {
            return steps;
        }
    }
}

fn lemma1_cycle_result(
    valuations: &ValuationMatrix,
    (p, pm_p): (&PriceVector, &MatchingSet),
    (q, pm_q): (&PriceVector, &MatchingSet),
) -> CheckResult {
    let n = valuations.n();
    let mut cycles = 0usize;
    for (prices_a, set_a, prices_b, set_b) in [(p, pm_p, q, pm_q), (q, pm_q, p, pm_p)] {
        let witness = set_b.first().expect("clearing").assignment(n).expect("perfect");
        for matching in set_a {
            let assignment = matching.assignment(n).expect("perfect");
            let mut visited = vec![false; n];
            for start in 0..n {
                if visited[start] || assignment[start] == witness[start] {
                    continue;
                }
                let cycle = alternating_cycle(prices_a, prices_b, &assignment, &witness, start);
                cycles += 1;
                for step in &cycle {
                    visited[step.buyer] = true;
                }
                let total: Rational = cycle.iter().map(|s| &s.term).sum();
                let balanced = total.is_zero() && cycle.iter().all(|s| s.term.is_zero());
                if !balanced {
                    return CheckResult::fail(
                        Claim::Lemma1Cycle,
                        Counterexample::CycleImbalance {
                            p: prices_a.clone(),
                            q: prices_b.clone(),
                            cycle,
                        },
                    );
                }
            }
        }
    }
    CheckResult::pass(Claim::Lemma1Cycle).with_note(format!("{cycles} alternating cycles, all terms zero"))
}

/// `PM(p) = PM(q)` for two clearing vectors, plus the alternating-cycle
/// argument evaluated on every induced matching.
pub fn check_lemma1(
    valuations: &ValuationMatrix,
    p: &PriceVector,
    q: &PriceVector,
) -> Result<VerificationReport, Error> {
    oracle_sized(valuations)?;
    require_clearing(valuations, p, PriceArg::First)?;
    require_clearing(valuations, q, PriceArg::Second)?;
    let pm_p = induced_matchings(valuations, p)?;
    let pm_q = induced_matchings(valuations, q)?;
    let graphs_differ = preferred_graph(valuations, p)? != preferred_graph(valuations, q)?;

    let mut report = VerificationReport::new(valuations);
    let sets = if let Some(m) = pm_p.difference(&pm_q).next() {
        CheckResult::fail(
            Claim::Lemma1,
            Counterexample::InducedSetsDiffer { p: p.clone(), q: q.clone(), matching: m.clone() },
        )
    } else if let Some(m) = pm_q.difference(&pm_p).next() {
        CheckResult::fail(
            Claim::Lemma1,
            Counterexample::InducedSetsDiffer { p: q.clone(), q: p.clone(), matching: m.clone() },
        )
    } else {
        let graphs = if graphs_differ { "G(p) != G(q)" } else { "G(p) = G(q)" };
        CheckResult::pass(Claim::Lemma1).with_note(format!("|PM| = {}, {graphs}", pm_p.len()))
    };
    report.push(sets);
    report.push(lemma1_cycle_result(valuations, (p, &pm_p), (q, &pm_q)));
    Ok(report)
}

/// Whether `G(p)` and `G(q)` differ as graphs.
pub fn preferred_graphs_differ(valuations: &ValuationMatrix, p: &PriceVector, q: &PriceVector) -> Result<bool, Error> {
    Ok(preferred_graph(valuations, p)? != preferred_graph(valuations, q)?)
}

fn closure_result<I>(valuations: &ValuationMatrix, claim: Claim, vectors: I) -> Result<CheckResult, Error>
where
    I: IntoIterator<Item = PriceVector>,
{
    let mut tried = 0usize;
    for r in vectors {
        tried += 1;
        if !is_market_clearing(valuations, &r)? {
            return Ok(CheckResult::fail(claim, Counterexample::NotClearing { prices: r }));
        }
    }
    Ok(CheckResult::pass(claim).with_note(format!("{tried} vectors clear")))
}

/// The transformed vectors `check_theorem1` tests, for a given seed.
#[derive(Debug, Clone)]
pub struct ClosureSamples {
    pub shifts: Vec<(Rational, PriceVector)>,
    pub combinations: Vec<(Rational, PriceVector)>,
    pub max: PriceVector,
    pub min: PriceVector,
}

/// `samples` diagonal shifts of `p` by `t` in `[-max v, max v]`, `samples`
/// convex combinations with random `alpha`, then the elementwise max and min.
pub fn closure_samples(
    valuations: &ValuationMatrix,
    p: &PriceVector,
    q: &PriceVector,
    samples: usize,
    seed: u64,
) -> Result<ClosureSamples, Error> {
    let mut generator = InstanceGenerator::new(seed);
    let bound = valuations.max_value();
    let lo = -&bound;
    let shifts = (0..samples)
        .map(|_| {
            let t = generator.rational_in(&lo, &bound);
            let r = diagonal_shift(p, &t);
            (t, r)
        })
        .collect();
    let combinations = (0..samples)
        .map(|_| {
            let alpha = generator.alpha();
            convex_combine(p, q, &alpha).map(|r| (alpha, r))
        })
        .collect::<Result<_, _>>()?;
    Ok(ClosureSamples {
        shifts,
        combinations,
        max: elementwise_max(p, q)?,
        min: elementwise_min(p, q)?,
    })
}

/// All four closure transformations of clearing `p`, `q` clear the market.
pub fn check_theorem1(
    valuations: &ValuationMatrix,
    p: &PriceVector,
    q: &PriceVector,
    samples: usize,
    seed: u64,
) -> Result<VerificationReport, Error> {
    require_clearing(valuations, p, PriceArg::First)?;
    require_clearing(valuations, q, PriceArg::Second)?;
    let drawn = closure_samples(valuations, p, q, samples, seed)?;
    let mut report = VerificationReport::new(valuations).with_seed(seed);
    report.push(closure_result(valuations, Claim::Theorem1Shift, drawn.shifts.into_iter().map(|(_, r)| r))?);
    report.push(closure_result(
        valuations,
        Claim::Theorem1Convex,
        drawn.combinations.into_iter().map(|(_, r)| r),
    )?);
    report.push(closure_result(valuations, Claim::Theorem1Max, [drawn.max])?);
    report.push(closure_result(valuations, Claim::Theorem1Min, [drawn.min])?);
    Ok(report)
}

/// Clearing vectors built from up to `limit` distinct maximum matchings via
/// the difference-constraint construction.
pub fn prices_for_maximum_matchings(
    valuations: &ValuationMatrix,
    oracle: &MaximumMatchings,
    limit: usize,
) -> Result<Vec<(Matching, PriceVector)>, Error> {
    let mut out = Vec::new();
    for matching in oracle.matchings.iter().take(limit) {
        match prices_from_matching(valuations, matching)? {
            PricingOutcome::Clearing(prices) => out.push((matching.clone(), prices)),
            PricingOutcome::NotMaximum(witness) => {
                panic!("oracle matching {matching:?} refuted by negative cycle {:?}", witness.cycle)
            }
        }
    }
    Ok(out)
}

/// Runs every checker on one instance.
///
/// The auction's vector is paired with vectors built from up to three
/// maximum matchings (and `extra`, when given) for the two-vector checks.
pub fn check_instance(
    valuations: &ValuationMatrix,
    extra: Option<&PriceVector>,
    samples: usize,
    seed: u64,
) -> Result<VerificationReport, Error> {
    oracle_sized(valuations)?;
    let auction = solve_auction(valuations).prices;
    let oracle = brute_force_max_matchings(valuations)?;
    let mut vectors = vec![auction.clone()];
    vectors.extend(
        prices_for_maximum_matchings(valuations, &oracle, 3)?
            .into_iter()
            .map(|(_, p)| p),
    );
    if let Some(extra) = extra {
        require_clearing(valuations, extra, PriceArg::Second)?;
        vectors.push(extra.clone());
    }

    let mut report = VerificationReport::new(valuations).with_seed(seed);
    report.merge(check_property1(valuations, &auction)?);
    report.merge(check_fact1(valuations, &auction)?);
    report.merge(check_theorem2(valuations, &auction)?);
    for q in &vectors[1..] {
        report.merge(check_lemma1(valuations, &auction, q)?);
    }
    let partner = vectors.last().expect("at least the auction vector");
    report.merge(check_theorem1(valuations, &auction, partner, samples, seed)?);
    Ok(report)
}
