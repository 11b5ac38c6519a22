use serde::Serialize;

use super::SecurityError;

/// False-accept security in bits: log2 of the expected work l·ln(0.5)/ln(1−FMR)
/// to reach success probability one half with attempts of cost l.
pub fn fas_bits(fmr: f64, l: f64) -> Result<f64, SecurityError> {
    if !(fmr > 0.0 && fmr < 1.0) {
        return Err(SecurityError::Range(format!("FMR must lie in (0, 1), got {fmr}")));
    }
    if !(l >= 1.0) {
        return Err(SecurityError::Range(format!("operation count must be at least 1, got {l}")));
    }
    Ok((l * 0.5f64.ln() / (-fmr).ln_1p()).log2())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FasEntry {
    pub k: u32,
    pub bits: Option<f64>,
    pub extrapolated: bool,
}

/// Fills gaps in a FAS series (sorted by k) by extending the line through
/// the last two estimated points before each gap. Entries that cannot be
/// filled stay `None`.
pub fn fas_extrapolate(series: &[(u32, Option<f64>)]) -> Vec<FasEntry> {
    let mut out: Vec<FasEntry> = Vec::with_capacity(series.len());
    let mut anchors: Vec<(u32, f64)> = Vec::new();
    for &(k, bits) in series {
        match bits {
            Some(b) => {
                anchors.push((k, b));
                out.push(FasEntry {
                    k,
                    bits: Some(b),
                    extrapolated: false,
                });
            }
            None => {
                let bits = match anchors.as_slice() {
                    [.., (k0, b0), (k1, b1)] if k1 != k0 => {
                        let slope = (b1 - b0) / (*k1 as f64 - *k0 as f64);
                        Some(b1 + slope * (k as f64 - *k1 as f64))
                    }
                    _ => None,
                };
                out.push(FasEntry {
                    k,
                    bits,
                    extrapolated: bits.is_some(),
                });
            }
        }
    }
    out
}

/// Brute-force security of guessing κ among k-coefficient polynomials,
/// reported as k bits. It overestimates real security and is meant to be
/// shown next to FAS, not instead of it.
pub fn bfs_floor(k: u32) -> f64 {
    k as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn examples() {
        assert!(fas_bits(0.5, 1.0).unwrap().abs() < 1e-12);
        let b = fas_bits(0.01, 1024.0).unwrap();
        // 1024 * ln 2 / -ln 0.99 = 70624.4...
        let direct = (1024.0 * std::f64::consts::LN_2 / -(0.99f64.ln())).log2();
        assert!((b - direct).abs() < 1e-12);
        assert!((b - 16.108).abs() < 1e-3);
        for bad in [0.0, 1.0, -0.1, f64::NAN] {
            assert!(fas_bits(bad, 1.0).is_err());
        }
        assert!(fas_bits(0.1, 0.5).is_err());
    }

    #[test]
    fn decreasing_in_fmr() {
        let mut last = f64::INFINITY;
        for i in 1..100 {
            let b = fas_bits(i as f64 / 100.0, 64.0).unwrap();
            assert!(b < last);
            last = b;
        }
    }

    #[test]
    fn median_attempts_match_geometric_simulation() {
        // The number of attempts to reach probability 1/2 is the median of a
        // geometric distribution.
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let fmr = 0.02;
        let trials = 20000;
        let mut counts: Vec<u32> = (0..trials)
            .map(|_| {
                let mut n = 1;
                while !rng.random_bool(fmr) {
                    n += 1;
                }
                n
            })
            .collect();
        counts.sort_unstable();
        let median = counts[trials / 2] as f64;
        let closed = 2f64.powf(fas_bits(fmr, 1.0).unwrap());
        assert!((median - closed).abs() / closed < 0.05, "{median} vs {closed}");
    }

    #[test]
    fn extrapolation() {
        let out = fas_extrapolate(&[(100, Some(10.0)), (110, Some(12.0)), (120, None), (130, None)]);
        assert_eq!(out[2], FasEntry { k: 120, bits: Some(14.0), extrapolated: true });
        assert_eq!(out[3].bits, Some(16.0));
        let full = [(1, Some(1.0)), (2, Some(3.0))];
        assert!(fas_extrapolate(&full).iter().all(|e| !e.extrapolated));
        let short = fas_extrapolate(&[(1, Some(1.0)), (2, None)]);
        assert_eq!(short[1], FasEntry { k: 2, bits: None, extrapolated: false });
    }

    #[test]
    fn extrapolation_non_decreasing_with_rising_anchors() {
        let out = fas_extrapolate(&[(10, Some(5.0)), (20, Some(5.5)), (30, None), (40, None), (50, None)]);
        assert!(out.windows(2).all(|w| w[1].bits >= w[0].bits));
    }

    #[test]
    fn bfs_is_k() {
        assert_eq!(bfs_floor(384), 384.0);
        assert!(bfs_floor(10) < bfs_floor(11));
    }
}
