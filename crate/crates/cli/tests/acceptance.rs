//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use matchmarket::verify::{
    check_lemma1, closure_samples, induced_matchings, preferred_graphs_differ, prices_for_maximum_matchings,
    InstanceGenerator,
};
use matchmarket::{
    brute_force_max_matchings, is_market_clearing, prices_from_matching, social_welfare, solve_auction, Matching,
    MatchingSet, MaximumMatchings, PriceVector, PricingOutcome, Rational, ValuationMatrix,
};
use serde_json::Value;

const SEED: u64 = 20_240_601;
const INSTANCES: usize = 200;
const CLOSURE_PAIRS: usize = 100;
const NON_MAXIMUM: usize = 100;

struct Instance {
    valuations: ValuationMatrix,
    duplicated: bool,
    oracle: MaximumMatchings,
}

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Outcome { passed, detail: detail.into() }
    }
}

/// Induced sets gathered by suites 1 to 4, checked by suite 6.
#[derive(Default)]
struct Collected {
    sets: Vec<(usize, MatchingSet)>,
}

fn instances() -> Vec<Instance> {
    let mut generator = InstanceGenerator::new(SEED);
    (0..INSTANCES)
        .map(|k| {
            let n = generator.size();
            let duplicated = k % 5 == 0;
            let valuations = if duplicated {
                generator.market_with_duplicate_row(n.max(2))
            } else {
                generator.market(n)
            };
            let oracle = brute_force_max_matchings(&valuations).expect("n <= 7");
            Instance { valuations, duplicated, oracle }
        })
        .collect()
}

fn auction_induces_subset(all: &[Instance], seen: &mut Collected) -> Outcome {
    let start = Instant::now();
    for (k, inst) in all.iter().enumerate() {
        let p = solve_auction(&inst.valuations).prices;
        if !is_market_clearing(&inst.valuations, &p).unwrap() {
            return Outcome::new(false, format!("instance {k}: auction prices do not clear"));
        }
        let pm = induced_matchings(&inst.valuations, &p).unwrap();
        if pm.is_empty() || !pm.is_subset(&inst.oracle.matchings) {
            return Outcome::new(false, format!("instance {k}: PM(p) empty or not inside M*"));
        }
        seen.sets.push((k, pm));
    }
    let elapsed = start.elapsed();
    Outcome::new(
        elapsed < Duration::from_secs(60),
        format!("{INSTANCES} instances in {:.2}s", elapsed.as_secs_f64()),
    )
}

fn auction_induces_all(all: &[Instance]) -> Outcome {
    let mut tied = 0;
    for (k, inst) in all.iter().enumerate() {
        let p = solve_auction(&inst.valuations).prices;
        let pm = induced_matchings(&inst.valuations, &p).unwrap();
        if pm != inst.oracle.matchings {
            return Outcome::new(
                false,
                format!("instance {k}: |PM(p)| = {}, |M*| = {}", pm.len(), inst.oracle.matchings.len()),
            );
        }
        if inst.duplicated && inst.oracle.matchings.len() >= 2 {
            tied += 1;
        }
    }
    Outcome::new(tied >= 30, format!("PM(p) = M* on all {INSTANCES}; {tied} duplicated-row instances with |M*| >= 2"))
}

fn distinct_vectors_agree(all: &[Instance], seen: &mut Collected) -> Outcome {
    let mut compared = 0;
    let mut graphs_differ = 0;
    let mut example = None;
    for (k, inst) in all.iter().enumerate() {
        if inst.oracle.matchings.len() < 2 {
            continue;
        }
        let v = &inst.valuations;
        let mut vectors: Vec<PriceVector> = prices_for_maximum_matchings(v, &inst.oracle, 2)
            .unwrap()
            .into_iter()
            .map(|(_, p)| p)
            .collect();
        vectors.push(solve_auction(v).prices);
        for p in &vectors {
            seen.sets.push((k, induced_matchings(v, p).unwrap()));
        }
        for a in 0..vectors.len() {
            for b in a + 1..vectors.len() {
                let (p, q) = (&vectors[a], &vectors[b]);
                compared += 1;
                if !check_lemma1(v, p, q).unwrap().passed() {
                    return Outcome::new(false, format!("instance {k}: PM(p) != PM(q)"));
                }
                if preferred_graphs_differ(v, p, q).unwrap() {
                    graphs_differ += 1;
                    example.get_or_insert_with(|| format!("instance {k}: p = {p:?}, q = {q:?}"));
                }
            }
        }
    }
    let note = example.map(|e| format!("; first G(p) != G(q) at {e}")).unwrap_or_default();
    Outcome::new(
        compared > 0 && graphs_differ > 0,
        format!("{compared} pairs agree, {graphs_differ} with G(p) != G(q){note}"),
    )
}

fn closure_holds(all: &[Instance], seen: &mut Collected) -> Outcome {
    let start = Instant::now();
    let mut vectors = 0;
    for (k, inst) in all.iter().take(CLOSURE_PAIRS).enumerate() {
        let v = &inst.valuations;
        let p = solve_auction(v).prices;
        let last = inst.oracle.matchings.iter().last().unwrap();
        let PricingOutcome::Clearing(q) = prices_from_matching(v, last).unwrap() else {
            return Outcome::new(false, format!("instance {k}: maximum matching refuted"));
        };
        let drawn = closure_samples(v, &p, &q, 10, SEED ^ k as u64).unwrap();
        let results = drawn
            .shifts
            .into_iter()
            .chain(drawn.combinations)
            .map(|(_, r)| r)
            .chain([drawn.max, drawn.min]);
        for r in results {
            vectors += 1;
            if !is_market_clearing(v, &r).unwrap() {
                return Outcome::new(false, format!("instance {k}: transformed vector {r:?} does not clear"));
            }
            seen.sets.push((k, induced_matchings(v, &r).unwrap()));
        }
    }
    let elapsed = start.elapsed();
    Outcome::new(
        elapsed < Duration::from_secs(30),
        format!("{CLOSURE_PAIRS} pairs, {vectors} vectors clear in {:.2}s", elapsed.as_secs_f64()),
    )
}

fn non_maximum_rejected() -> Outcome {
    let mut generator = InstanceGenerator::new(SEED.wrapping_add(1));
    let mut tested = 0;
    let mut draws = 0;
    while tested < NON_MAXIMUM {
        draws += 1;
        if draws > 100 * NON_MAXIMUM {
            return Outcome::new(false, format!("only {tested} non-maximum matchings found"));
        }
        let n = generator.size().max(2);
        let v = generator.market(n);
        let oracle = brute_force_max_matchings(&v).unwrap();
        let perms = matchmarket::matching::permutations(n);
        let candidate = (0..20)
            .map(|_| Matching::from_assignment(&perms[generator.index(perms.len())]).unwrap())
            .find(|m| !oracle.matchings.contains(m));
        let Some(m) = candidate else { continue };
        tested += 1;
        let PricingOutcome::NotMaximum(witness) = prices_from_matching(&v, &m).unwrap() else {
            return Outcome::new(false, format!("non-maximum matching {m:?} was priced"));
        };
        let before = social_welfare(&v, &m).unwrap();
        let after = social_welfare(&v, &witness.improved_matching()).unwrap();
        if after <= before || &after - &before != witness.welfare_gain() {
            return Outcome::new(false, format!("rotation of {m:?} does not gain {}", witness.welfare_gain()));
        }
    }
    Outcome::new(true, format!("{tested} non-maximum matchings refuted, rotations all gain"))
}

fn induced_are_maximum(all: &[Instance], seen: &Collected) -> Outcome {
    let mut matchings = 0;
    for (k, set) in &seen.sets {
        let inst = &all[*k];
        for m in set {
            matchings += 1;
            let w: Rational = social_welfare(&inst.valuations, m).unwrap();
            if w != inst.oracle.welfare {
                return Outcome::new(false, format!("instance {k}: {m:?} has welfare {w}, max {}", inst.oracle.welfare));
            }
        }
    }
    Outcome::new(matchings > 0, format!("{} induced sets, {matchings} matchings at maximum welfare", seen.sets.len()))
}

fn cli(args: &[&str]) -> Result<Value, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_matchmarket"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("{args:?} exited {:?}", out.status.code()));
    }
    serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())
}

fn prices_flag(prices: &Value) -> String {
    prices
        .as_array()
        .unwrap()
        .iter()
        .map(|p| p.as_str().unwrap().to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn round_trip(file: &Path) -> Result<Value, String> {
    let path = file.to_str().unwrap();
    let solved = cli(&["solve", "-i", path])?;
    let p = prices_flag(&solved["prices"]);
    if cli(&["verify", "-i", path, "--prices", &p])?["clearing"] != true {
        return Err(format!("{path}: solve prices do not verify"));
    }
    let mut pair_args = vec!["prices", "-i", path];
    let pairs: Vec<String> = solved["matching"]
        .as_array()
        .unwrap()
        .iter()
        .map(|pair| format!("{}:{}", pair[0], pair[1]))
        .collect();
    for pair in &pairs {
        pair_args.extend(["--pair", pair.as_str()]);
    }
    let q = prices_flag(&cli(&pair_args)?["prices"]);
    if cli(&["verify", "-i", path, "--prices", &q])?["clearing"] != true {
        return Err(format!("{path}: constructed prices do not verify"));
    }
    let plain = cli(&["enumerate", "-i", path])?;
    let with_p = cli(&["enumerate", "-i", path, "--prices", &p])?;
    let with_q = cli(&["enumerate", "-i", path, "--prices", &q])?;
    if plain["matchings"] != with_p["matchings"] || plain["matchings"] != with_q["matchings"] {
        return Err(format!("{path}: enumerations disagree"));
    }
    Ok(solved)
}

fn cli_round_trip() -> Outcome {
    let dir = tempfile::TempDir::new().unwrap();
    let fixture = dir.path().join("three.csv");
    std::fs::write(&fixture, "12,4,2\n8,7,6\n7,5,2\n").unwrap();
    let mut files = vec![fixture.clone()];
    let mut generator = InstanceGenerator::new(SEED.wrapping_add(2));
    for k in 0..5 {
        let n = generator.size().max(2);
        let v = generator.market_with_duplicate_row(n);
        let rows: Vec<String> = v
            .rows()
            .map(|row| row.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
            .collect();
        let path = dir.path().join(format!("random{k}.csv"));
        std::fs::write(&path, rows.join("\n")).unwrap();
        files.push(path);
    }
    for file in &files {
        match round_trip(file) {
            Ok(solved) if file == &fixture && solved["welfare"] != "23" => {
                return Outcome::new(false, format!("fixture welfare {}", solved["welfare"]));
            }
            Ok(_) => {}
            Err(e) => return Outcome::new(false, e),
        }
    }
    Outcome::new(true, format!("{} markets round-trip; fixture welfare 23", files.len()))
}

fn main() -> ExitCode {
    let build = Instant::now();
    let all = instances();
    eprintln!("generated {INSTANCES} instances in {:.2}s", build.elapsed().as_secs_f64());
    let mut seen = Collected::default();

    let results = [
        ("auction prices clear and induce maximum matchings", auction_induces_subset(&all, &mut seen)),
        ("auction prices induce every maximum matching", auction_induces_all(&all)),
        ("distinct clearing vectors induce the same matchings", distinct_vectors_agree(&all, &mut seen)),
        ("shift, convex combination, max and min preserve clearing", closure_holds(&all, &mut seen)),
        ("non-maximum matchings yield an improving cycle", non_maximum_rejected()),
        ("every induced matching has maximum welfare", induced_are_maximum(&all, &seen)),
        ("command-line solve, verify, prices and enumerate agree", cli_round_trip()),
    ];

    let mut ok = true;
    for (k, (name, outcome)) in results.iter().enumerate() {
        let tag = if outcome.passed { "PASS" } else { "FAIL" };
        println!("{tag} [{}] {name}: {}", k + 1, outcome.detail);
        ok &= outcome.passed;
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
