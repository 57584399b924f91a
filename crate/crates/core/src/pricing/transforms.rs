//! Price-vector transformations under which the set of market-clearing
//! vectors is closed.

use crate::error::Error;
use crate::market::PriceVector;
use crate::rational::Rational;

fn same_len(p: &PriceVector, q: &PriceVector) -> Result<(), Error> {
    if p.len() == q.len() {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            expected: p.len(),
            actual: q.len(),
        })
    }
}

/// `p + (t, ..., t)`.
pub fn diagonal_shift(p: &PriceVector, t: &Rational) -> PriceVector {
    p.iter().map(|x| x + t).collect()
}

/// `alpha * p + (1 - alpha) * q` for `alpha` in `[0, 1]`.
pub fn convex_combine(p: &PriceVector, q: &PriceVector, alpha: &Rational) -> Result<PriceVector, Error> {
    if alpha.is_negative() || *alpha > Rational::one() {
        return Err(Error::AlphaOutOfRange(alpha.to_string()));
    }
    same_len(p, q)?;
    let beta = Rational::one() - alpha;
    Ok(p.iter().zip(q.iter()).map(|(x, y)| alpha * x + &beta * y).collect())
}

pub fn elementwise_max(p: &PriceVector, q: &PriceVector) -> Result<PriceVector, Error> {
    same_len(p, q)?;
    Ok(p.iter().zip(q.iter()).map(|(x, y)| x.clone().max(y.clone())).collect())
}

pub fn elementwise_min(p: &PriceVector, q: &PriceVector) -> Result<PriceVector, Error> {
    same_len(p, q)?;
    Ok(p.iter().zip(q.iter()).map(|(x, y)| x.clone().min(y.clone())).collect())
}

/// Shifts `p` so its cheapest product costs 0.
pub fn normalize(p: &PriceVector) -> PriceVector {
    match p.min_price() {
        Some(min) => diagonal_shift(p, &-min),
        None => p.clone(),
    }
}
