use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use super::SecurityError;
use crate::decoders::hypergeometric_tail;

/// Probability that two randomly re-mapped sets of sizes `p` and `p2` in a
/// universe of size ρ overlap in at least ⌈(max + k)/2⌉ elements, the
/// precondition of the correlation attack.
///
/// ρ is a parameter: the natural value is the field order, but the
/// universe d·|P| can be passed instead.
pub fn linkage_probability(rho: u64, p: u64, p2: u64, k: u64) -> Result<BigRational, SecurityError> {
    let (p, p2) = if p >= p2 { (p, p2) } else { (p2, p) };
    if p > rho {
        return Err(SecurityError::Range(format!("set size {p} exceeds ρ = {rho}")));
    }
    let omega0 = (p + k).div_ceil(2);
    if omega0 == 0 {
        return Ok(BigRational::one());
    }
    // Overlap J of a random p-subset with a fixed p2-subset is
    // Hypergeometric(ρ, p2, p); the tail from ω0 is one minus the sum.
    hypergeometric_tail(rho, p2, p, omega0).map_err(|e| SecurityError::Range(e.to_string()))
}

pub fn linkage_probability_f64(rho: u64, p: u64, p2: u64, k: u64) -> Result<f64, SecurityError> {
    let r = linkage_probability(rho, p, p2, k)?;
    Ok(r.to_f64().unwrap_or(0.0))
}

/// log2 of a positive rational, exact enough for very small values.
pub fn log2_rational(r: &BigRational) -> f64 {
    let (n, d) = (r.numer(), r.denom());
    if *n <= BigInt::from(0) {
        return f64::NEG_INFINITY;
    }
    let shift = |x: &BigInt| {
        let bits = x.bits();
        let drop = bits.saturating_sub(60);
        ((x >> drop).to_f64().unwrap()).log2() + drop as f64
    };
    shift(n) - shift(d)
}
