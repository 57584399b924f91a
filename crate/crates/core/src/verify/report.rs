use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::Error;
use crate::market::{is_market_clearing, preferred_graph, social_welfare, Matching, PriceVector, ValuationMatrix};
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Claim {
    /// Clearing prices induce a nonempty set of maximum matchings.
    Property1,
    /// Two clearing vectors induce the same perfect matchings.
    Lemma1,
    /// The alternating-cycle argument behind `Lemma1`, evaluated term by term.
    Lemma1Cycle,
    Theorem1Shift,
    Theorem1Convex,
    Theorem1Max,
    Theorem1Min,
    /// Clearing prices induce every maximum matching.
    Theorem2,
    /// Induced matchings attain the maximum welfare.
    Fact1,
}

impl Claim {
    pub fn id(self) -> &'static str {
        match self {
            Claim::Property1 => "property-1",
            Claim::Lemma1 => "lemma-1",
            Claim::Lemma1Cycle => "lemma-1-cycle",
            Claim::Theorem1Shift => "theorem-1-shift",
            Claim::Theorem1Convex => "theorem-1-convex",
            Claim::Theorem1Max => "theorem-1-max",
            Claim::Theorem1Min => "theorem-1-min",
            Claim::Theorem2 => "theorem-2",
            Claim::Fact1 => "fact-1",
        }
    }
}

impl Serialize for Claim {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.id())
    }
}

impl std::fmt::Display for Claim {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.id())
    }
}

/// One buyer on an alternating cycle between a matching induced by `p` and
/// one induced by `q`. `term` is
/// `(p[q_product] - p[p_product]) - (q[q_product] - q[p_product])`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CycleStep {
    pub buyer: usize,
    pub p_product: usize,
    pub q_product: usize,
    pub term: Rational,
}

/// Evidence attached to a failed check. Every variant can be replayed with
/// the market primitives alone.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Counterexample {
    /// `prices` does not clear the market.
    NotClearing { prices: PriceVector },
    /// `induced` is perfect in `G(prices)` yet `better` has higher welfare.
    SuboptimalInduced {
        prices: PriceVector,
        induced: Matching,
        better: Matching,
    },
    /// `matching` is not induced by `prices` although its welfare is at
    /// least that of `induced`, which is.
    MissingMaximum {
        prices: PriceVector,
        matching: Matching,
        induced: Matching,
    },
    /// Both vectors clear, `matching` is induced by `p` but not by `q`.
    InducedSetsDiffer {
        p: PriceVector,
        q: PriceVector,
        matching: Matching,
    },
    /// Both vectors clear and some `(buyer, p_product)` edge on the cycle is
    /// missing from `G(q)`.
    CycleImbalance {
        p: PriceVector,
        q: PriceVector,
        cycle: Vec<CycleStep>,
    },
}

impl Counterexample {
    /// True when the payload really violates its claim on `valuations`.
    pub fn replay(&self, valuations: &ValuationMatrix) -> Result<bool, Error> {
        let n = valuations.n();
        Ok(match self {
            Counterexample::NotClearing { prices } => !is_market_clearing(valuations, prices)?,
            Counterexample::SuboptimalInduced { prices, induced, better } => {
                let graph = preferred_graph(valuations, prices)?;
                induced.is_perfect(n)
                    && better.is_perfect(n)
                    && induced.is_subgraph_of(&graph)
                    && social_welfare(valuations, better)? > social_welfare(valuations, induced)?
            }
            Counterexample::MissingMaximum { prices, matching, induced } => {
                let graph = preferred_graph(valuations, prices)?;
                matching.is_perfect(n)
                    && induced.is_perfect(n)
                    && induced.is_subgraph_of(&graph)
                    && !matching.is_subgraph_of(&graph)
                    && social_welfare(valuations, matching)? >= social_welfare(valuations, induced)?
            }
            Counterexample::InducedSetsDiffer { p, q, matching } => {
                is_market_clearing(valuations, p)?
                    && is_market_clearing(valuations, q)?
                    && matching.is_perfect(n)
                    && matching.is_subgraph_of(&preferred_graph(valuations, p)?)
                    && !matching.is_subgraph_of(&preferred_graph(valuations, q)?)
            }
            Counterexample::CycleImbalance { p, q, cycle } => {
                let g_q = preferred_graph(valuations, q)?;
                is_market_clearing(valuations, p)?
                    && is_market_clearing(valuations, q)?
                    && cycle.iter().any(|step| !g_q.contains(step.buyer, step.p_product))
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub claim: Claim,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Counterexample>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckResult {
    pub fn pass(claim: Claim) -> Self {
        Self {
            claim,
            passed: true,
            counterexample: None,
            note: None,
        }
    }

    pub fn fail(claim: Claim, counterexample: Counterexample) -> Self {
        Self {
            claim,
            passed: false,
            counterexample: Some(counterexample),
            note: None,
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InstanceDescriptor {
    pub n: usize,
    pub valuation_hash: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl InstanceDescriptor {
    pub fn of(valuations: &ValuationMatrix) -> Self {
        Self {
            n: valuations.n(),
            valuation_hash: valuation_hash(valuations),
            seed: None,
        }
    }
}

/// First 16 hex digits of SHA-256 over the row-major canonical literals.
pub fn valuation_hash(valuations: &ValuationMatrix) -> String {
    let mut hasher = Sha256::new();
    hasher.update(valuations.n().to_string().as_bytes());
    for value in valuations.values() {
        hasher.update(b";");
        hasher.update(value.to_string().as_bytes());
    }
    let digest = hasher.finalize();
    hex::encode(&digest[..8])
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub instance: InstanceDescriptor,
    pub checks: Vec<CheckResult>,
}

impl VerificationReport {
    pub fn new(valuations: &ValuationMatrix) -> Self {
        Self {
            instance: InstanceDescriptor::of(valuations),
            checks: Vec::new(),
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.instance.seed = Some(seed);
        self
    }

    pub fn push(&mut self, check: CheckResult) {
        self.checks.push(check);
    }

    /// Appends the checks of `other`, which must describe the same instance.
    pub fn merge(&mut self, other: VerificationReport) {
        debug_assert_eq!(self.instance.valuation_hash, other.instance.valuation_hash);
        if self.instance.seed.is_none() {
            self.instance.seed = other.instance.seed;
        }
        self.checks.extend(other.checks);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }

    /// One line of JSON, no trailing newline.
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}
