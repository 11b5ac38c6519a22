//! Single-step success probabilities of the three strategies, evaluated as
//! exact rationals.
//!
//! With u pairs of which ω are genuine:
//!
//! * Lagrange: C(ω, k) / C(u, k);
//! * Reed–Solomon on c pairs: P[J ≥ ⌈(c+k)/2⌉];
//! * Guruswami–Sudan on c pairs: P[J ≥ ⌈√(c(k−1))⌉];
//!
//! where J ~ Hypergeometric(u, ω, c) counts genuine pairs among c drawn.
//! The GS threshold is the asymptotic one; a decoder at finite
//! multiplicity needs the larger radius of [`super::gs_parameters`], which
//! can be plugged into [`hypergeometric_tail`] directly.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::{DecodeError, Strategy};

pub(crate) fn binomial(n: u64, r: u64) -> BigUint {
    if r > n {
        return BigUint::zero();
    }
    let r = r.min(n - r);
    let mut acc = BigUint::one();
    for i in 0..r {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

fn ceil_sqrt(n: u64) -> u64 {
    let r = n.isqrt();
    if r * r == n {
        r
    } else {
        r + 1
    }
}

/// P[J ≥ from] for J ~ Hypergeometric(population u, successes ω, draws c).
pub fn hypergeometric_tail(u: u64, omega: u64, c: u64, from: u64) -> Result<BigRational, DecodeError> {
    if omega > u || c > u {
        return Err(DecodeError::Range(format!(
            "need ω ≤ u and c ≤ u, got u={u} ω={omega} c={c}"
        )));
    }
    let mut num = BigUint::zero();
    for j in from..=omega.min(c) {
        num += binomial(omega, j) * binomial(u - omega, c - j);
    }
    Ok(BigRational::new(BigInt::from(num), BigInt::from(binomial(u, c))))
}

pub fn success_probability(
    u: u64,
    omega: u64,
    k: u64,
    c: u64,
    strategy: Strategy,
) -> Result<BigRational, DecodeError> {
    if k == 0 {
        return Err(DecodeError::ZeroK);
    }
    if omega > u {
        return Err(DecodeError::Range(format!("ω = {omega} exceeds u = {u}")));
    }
    match strategy {
        Strategy::LagrangeIterated => {
            if k > u {
                return Err(DecodeError::Range(format!("k = {k} exceeds u = {u}")));
            }
            Ok(BigRational::new(
                BigInt::from(binomial(omega, k)),
                BigInt::from(binomial(u, k)),
            ))
        }
        Strategy::RsGaoIterated | Strategy::GsList => {
            if k > c || c > u {
                return Err(DecodeError::Range(format!("need k ≤ c ≤ u, got k={k} c={c} u={u}")));
            }
            let from = match strategy {
                Strategy::RsGaoIterated => (c + k).div_ceil(2),
                _ => ceil_sqrt(c * (k - 1)),
            };
            hypergeometric_tail(u, omega, c, from)
        }
    }
}

pub fn success_probability_f64(u: u64, omega: u64, k: u64, c: u64, strategy: Strategy) -> Result<f64, DecodeError> {
    Ok(success_probability(u, omega, k, c, strategy)?
        .to_f64()
        .expect("probability in [0, 1]"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn lagrange_examples() {
        assert_eq!(success_probability(4, 3, 2, 0, Strategy::LagrangeIterated).unwrap(), q(1, 2));
        for u in 1..30 {
            for k in 1..=u {
                assert!(success_probability(u, u, k, 0, Strategy::LagrangeIterated).unwrap().is_one());
                if k > 1 {
                    assert!(success_probability(u, k - 1, k, 0, Strategy::LagrangeIterated)
                        .unwrap()
                        .is_zero());
                }
            }
        }
    }

    #[test]
    fn reed_solomon_full_set_is_a_step_function() {
        for u in 1..25u64 {
            for k in 1..=u {
                for omega in 0..=u {
                    let p = success_probability(u, omega, k, u, Strategy::RsGaoIterated).unwrap();
                    let want = omega >= (u + k).div_ceil(2);
                    assert_eq!(p.is_one(), want);
                    assert_eq!(p.is_zero(), !want);
                }
            }
        }
    }

    #[test]
    fn monotone_in_omega() {
        for strategy in Strategy::ALL {
            for c in 4..=10 {
                let mut last = BigRational::zero();
                for omega in 0..=10 {
                    let p = success_probability(10, omega, 4, c, strategy).unwrap();
                    assert!(p >= last);
                    last = p;
                }
            }
        }
    }

    #[test]
    fn tail_matches_enumeration() {
        // Enumerate all 6-bit masks with c ones; genuine pairs are the first ω.
        let (u, c) = (6u64, 3u64);
        for omega in 0..=u {
            for from in 0..=c {
                let mut hits = 0;
                let mut total = 0;
                for mask in 0u32..64 {
                    if mask.count_ones() as u64 != c {
                        continue;
                    }
                    total += 1;
                    if (mask & ((1 << omega) - 1)).count_ones() as u64 >= from {
                        hits += 1;
                    }
                }
                assert_eq!(hypergeometric_tail(u, omega, c, from).unwrap(), q(hits, total));
            }
        }
    }

    #[test]
    fn gs_threshold_uses_integer_square_root() {
        assert_eq!(ceil_sqrt(12), 4);
        assert_eq!(ceil_sqrt(16), 4);
        assert_eq!(ceil_sqrt(17), 5);
        assert_eq!(
            success_probability(10, 6, 4, 10, Strategy::GsList).unwrap(),
            hypergeometric_tail(10, 6, 10, 6).unwrap()
        );
    }

    #[test]
    fn argument_errors() {
        assert!(success_probability(4, 5, 2, 4, Strategy::GsList).is_err());
        assert!(success_probability(4, 2, 3, 2, Strategy::RsGaoIterated).is_err());
        assert!(success_probability(4, 2, 2, 5, Strategy::RsGaoIterated).is_err());
        assert!(success_probability(4, 2, 5, 0, Strategy::LagrangeIterated).is_err());
        assert!(success_probability(4, 2, 0, 4, Strategy::LagrangeIterated).is_err());
    }
}
