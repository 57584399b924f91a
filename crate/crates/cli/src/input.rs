//! Market files: CSV (one row of valuations per line) or a JSON object with
//! `valuations` and optional `prices` and `matching` keys. Numbers may be
//! JSON numbers or strings; either way they must be exact rational literals.

use std::path::Path;

use matchmarket::{Matching, PriceVector, Rational, ValuationMatrix};
use serde_json::Value;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    #[value(alias = "json-like")]
    Json,
}

#[derive(Debug, Clone)]
pub struct MarketFile {
    pub valuations: ValuationMatrix,
    pub prices: Option<PriceVector>,
    pub matching: Option<Matching>,
}

pub fn read_market(path: &Path, format: Option<Format>) -> Result<MarketFile, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Parse(format!("cannot read {}: {e}", path.display())))?;
    let format = format.unwrap_or_else(|| guess_format(path, &text));
    match format {
        Format::Csv => parse_csv(&text),
        Format::Json => parse_json(&text),
    }
}

fn guess_format(path: &Path, text: &str) -> Format {
    match path.extension().and_then(|e| e.to_str()) {
        Some(ext) if ext.eq_ignore_ascii_case("csv") => Format::Csv,
        Some(ext) if ext.eq_ignore_ascii_case("json") => Format::Json,
        _ if text.trim_start().starts_with('{') => Format::Json,
        _ => Format::Csv,
    }
}

fn parse_rational(text: &str) -> Result<Rational, CliError> {
    text.parse().map_err(|e: matchmarket::Error| CliError::Parse(e.to_string()))
}

pub fn parse_csv(text: &str) -> Result<MarketFile, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| CliError::Parse(e.to_string()))?;
        let row = record.iter().map(parse_rational).collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
    }
    Ok(MarketFile {
        valuations: ValuationMatrix::new(rows)?,
        prices: None,
        matching: None,
    })
}

fn json_rational(value: &Value) -> Result<Rational, CliError> {
    match value {
        Value::Number(n) => parse_rational(&n.to_string()),
        Value::String(s) => parse_rational(s),
        other => Err(CliError::Parse(format!("expected a number, got {other}"))),
    }
}

fn json_array<'a>(value: &'a Value, what: &str) -> Result<&'a Vec<Value>, CliError> {
    value
        .as_array()
        .ok_or_else(|| CliError::Parse(format!("{what} must be an array")))
}

fn json_index(value: &Value) -> Result<usize, CliError> {
    value
        .as_u64()
        .and_then(|i| usize::try_from(i).ok())
        .ok_or_else(|| CliError::Parse(format!("expected a 0-based index, got {value}")))
}

pub fn parse_json(text: &str) -> Result<MarketFile, CliError> {
    let root: Value = serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
    let object = root
        .as_object()
        .ok_or_else(|| CliError::Parse("expected a JSON object".into()))?;
    let valuations = object
        .get("valuations")
        .ok_or_else(|| CliError::Parse("missing key \"valuations\"".into()))?;
    let rows = json_array(valuations, "valuations")?
        .iter()
        .map(|row| json_array(row, "a valuation row")?.iter().map(json_rational).collect())
        .collect::<Result<Vec<Vec<_>>, _>>()?;
    let valuations = ValuationMatrix::new(rows)?;

    let prices = object
        .get("prices")
        .map(|p| json_array(p, "prices")?.iter().map(json_rational).collect::<Result<PriceVector, _>>())
        .transpose()?;
    let matching = object
        .get("matching")
        .map(|m| {
            let pairs = json_array(m, "matching")?
                .iter()
                .map(|pair| match json_array(pair, "a matching pair")?.as_slice() {
                    [b, p] => Ok((json_index(b)?, json_index(p)?)),
                    _ => Err(CliError::Parse("matching pairs are [buyer, product]".into())),
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok::<_, CliError>(Matching::new(pairs)?)
        })
        .transpose()?;
    Ok(MarketFile {
        valuations,
        prices,
        matching,
    })
}

/// Comma-separated price list, e.g. `3,1,0` or `1/2,0`.
pub fn parse_price_list(text: &str) -> Result<PriceVector, CliError> {
    text.split(',').map(|x| parse_rational(x.trim())).collect()
}

/// `b:p` with 0-based indices.
pub fn parse_pair(text: &str) -> Result<(usize, usize), String> {
    let (b, p) = text
        .split_once(':')
        .ok_or_else(|| format!("expected BUYER:PRODUCT, got {text:?}"))?;
    let b = b.trim().parse().map_err(|_| format!("bad buyer index in {text:?}"))?;
    let p = p.trim().parse().map_err(|_| format!("bad product index in {text:?}"))?;
    Ok((b, p))
}
