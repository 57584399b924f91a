use std::path::Path;

use matchmarket::verify::{check_instance, InstanceGenerator, VerificationReport};
use matchmarket::{
    enumerate_perfect_matchings, find_perfect_matching, normalize, preferred_graph, prices_from_matching,
    social_welfare, solve_auction, Matching, PerfectMatchingOutcome, PriceVector, PricingOutcome,
    ValuationMatrix,
};
use serde_json::{json, Value};

use crate::input::{parse_price_list, read_market, Format};
use crate::CliError;

fn emit(value: &Value) {
    println!("{value}");
}

fn one_based(indices: &[usize]) -> String {
    let items: Vec<String> = indices.iter().map(|i| (i + 1).to_string()).collect();
    format!("{{{}}}", items.join(", "))
}

fn welfare_string(valuations: &ValuationMatrix, matching: &Matching) -> Result<String, CliError> {
    Ok(social_welfare(valuations, matching)?.to_string())
}

pub fn solve(path: &Path, format: Option<Format>) -> Result<u8, CliError> {
    let market = read_market(path, format)?;
    let result = solve_auction(&market.valuations);
    let prices = normalize(&result.prices);
    eprintln!("auction cleared after {} price rounds", result.trace.rounds.len());
    emit(&json!({
        "prices": prices,
        "matching": result.matching,
        "welfare": welfare_string(&market.valuations, &result.matching)?,
    }));
    Ok(0)
}

fn supplied_prices(flag: Option<&str>, from_file: Option<PriceVector>) -> Result<Option<PriceVector>, CliError> {
    match flag {
        Some(text) => parse_price_list(text).map(Some),
        None => Ok(from_file),
    }
}

pub fn verify(path: &Path, format: Option<Format>, prices: Option<&str>) -> Result<u8, CliError> {
    let market = read_market(path, format)?;
    let prices = supplied_prices(prices, market.prices)?
        .ok_or_else(|| CliError::Shape("no prices given (use --prices or a \"prices\" key)".into()))?;
    let graph = preferred_graph(&market.valuations, &prices)?;
    match find_perfect_matching(&graph) {
        PerfectMatchingOutcome::Perfect(matching) => {
            emit(&json!({ "clearing": true, "matching": matching }));
        }
        PerfectMatchingOutcome::NoPerfectMatching(set) => {
            eprintln!(
                "not clearing: buyers {} only want products {}",
                one_based(&set.buyers),
                one_based(&set.neighborhood)
            );
            emit(&json!({
                "clearing": false,
                "witness": set.buyers,
                "neighborhood": set.neighborhood,
            }));
        }
    }
    Ok(0)
}

pub fn prices(path: &Path, format: Option<Format>, pairs: &[(usize, usize)]) -> Result<u8, CliError> {
    let market = read_market(path, format)?;
    let matching = if pairs.is_empty() {
        market
            .matching
            .ok_or_else(|| CliError::Shape("no matching given (use --pair or a \"matching\" key)".into()))?
    } else {
        Matching::new(pairs.iter().copied())?
    };
    match prices_from_matching(&market.valuations, &matching)? {
        PricingOutcome::Clearing(prices) => {
            emit(&json!({ "prices": prices }));
            Ok(0)
        }
        PricingOutcome::NotMaximum(witness) => {
            let improved = witness.improved_matching();
            eprintln!(
                "matching is not maximum: rotating products along buyers {} gains {}",
                one_based(&witness.cycle),
                witness.welfare_gain()
            );
            emit(&json!({
                "not_maximum": {
                    "cycle": witness.cycle,
                    "total_length": witness.total_length,
                    "welfare_gain": witness.welfare_gain(),
                    "improved_matching": improved,
                }
            }));
            Ok(4)
        }
    }
}

pub fn enumerate(path: &Path, format: Option<Format>, prices: Option<&str>, cap: usize) -> Result<u8, CliError> {
    if cap == 0 {
        return Err(CliError::Parse("--cap must be at least 1".into()));
    }
    let market = read_market(path, format)?;
    let prices = match supplied_prices(prices, market.prices)? {
        Some(p) => p,
        None => solve_auction(&market.valuations).prices,
    };
    let graph = preferred_graph(&market.valuations, &prices)?;
    let matchings = match enumerate_perfect_matchings(&graph, cap) {
        Ok(set) => set,
        Err(exceeded) => {
            emit(&json!({ "cap_exceeded": exceeded.cap, "partial": exceeded.partial }));
            return Err(CliError::Cap(format!("more than {cap} induced matchings")));
        }
    };
    let welfare = matchings
        .first()
        .map(|m| welfare_string(&market.valuations, m))
        .transpose()?;
    emit(&json!({
        "prices": prices,
        "clearing": !matchings.is_empty(),
        "matchings": matchings,
        "welfare": welfare,
    }));
    Ok(0)
}

/// Prints the report line; returns whether every check passed.
fn report(valuations: &ValuationMatrix, report: &VerificationReport) -> Result<bool, CliError> {
    println!("{}", report.to_json_line());
    let mut ok = true;
    for failure in report.failures() {
        ok = false;
        let replays = match &failure.counterexample {
            Some(cx) => cx.replay(valuations)?,
            None => false,
        };
        eprintln!(
            "FAILED {} on instance {} (counterexample replays: {replays})",
            failure.claim, report.instance.valuation_hash
        );
    }
    Ok(ok)
}

pub fn check_file(path: &Path, format: Option<Format>, seed: u64, samples: usize) -> Result<u8, CliError> {
    let market = read_market(path, format)?;
    let result = check_instance(&market.valuations, market.prices.as_ref(), samples, seed)?;
    Ok(if report(&market.valuations, &result)? { 0 } else { 6 })
}

pub fn check_random(count: usize, max_n: usize, seed: u64, samples: usize) -> Result<u8, CliError> {
    if max_n == 0 {
        return Err(CliError::Parse("--max-n must be at least 1".into()));
    }
    let mut generator = InstanceGenerator::new(seed).with_max_size(max_n);
    let mut all_ok = true;
    for k in 0..count {
        let n = generator.size();
        // every fifth instance gets a guaranteed tie
        let valuations = if k % 5 == 4 && n >= 2 {
            generator.market_with_duplicate_row(n)
        } else {
            generator.market(n)
        };
        let instance_seed = seed.wrapping_add(k as u64);
        let result = check_instance(&valuations, None, samples, instance_seed)?;
        all_ok &= report(&valuations, &result)?;
    }
    eprintln!("checked {count} instances: {}", if all_ok { "all passed" } else { "FAILURES" });
    Ok(if all_ok { 0 } else { 6 })
}
