//! Linking two vault records through the extended Euclidean algorithm.
//!
//! Write the records as V = κ1 + F·G1 and W = κ2 + F·G2, where F collects
//! the shared locking factors and G1, G2 (including any blinding) the rest.
//! Then G2·V + G1·W = G2·κ1 + G1·κ2 has degree below deg G1 + k, far below
//! what unrelated polynomials produce, and the remainder sequence of
//! (V, W) exposes it as a row r = s·V + t·W with deg r < deg t + k once
//! 2·deg t ≤ deg V − k. Normalising t to a monic A gives
//! R = B·κ1 + A·κ2; after dividing out gcd(A, B), for deg A ≥ k
//!
//! ```text
//! κ1 = R · B⁻¹ mod A,   κ2 = (R − B·κ1) / A,
//! ```
//!
//! and the shared elements are the common roots of V − κ1 and W − κ2.
//! When deg A < k (nearly identical sets) the keys are not determined and
//! only the link is reported, provided the degree gap is large enough that
//! unrelated records would show it with probability below 2^-32.

use crate::gf2e::{poly_gcd, EuclidRows, Field, FieldElement, Poly};
use crate::vault::VaultRecord;

use super::SecurityError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorrelationResult {
    pub linked: bool,
    /// Shared field elements (after any re-mapping), when they could be
    /// separated from the keys.
    pub common: Option<Vec<FieldElement>>,
}

impl CorrelationResult {
    fn unlinked() -> Self {
        CorrelationResult {
            linked: false,
            common: None,
        }
    }
}

fn inverse_mod(f: &Field, b: &Poly, a: &Poly) -> Option<Poly> {
    let (_, b) = b.div_rem(f, a).ok()?;
    let last = EuclidRows::new(f, a, &b).take_while(|row| !row.r.is_zero()).last()?;
    if last.r.degree() != Some(0) {
        return None;
    }
    let c = f.inv(last.r.coeff(0)).ok()?;
    Some(last.t.scale(f, c))
}

fn common_roots(f: &Field, v: &Poly, w: &Poly) -> Vec<FieldElement> {
    f.elements()
        .filter(|&x| v.eval(f, x).is_zero() && w.eval(f, x).is_zero())
        .collect()
}

pub fn correlation_attack(rec1: &VaultRecord, rec2: &VaultRecord) -> Result<CorrelationResult, SecurityError> {
    if rec1.params() != rec2.params() {
        return Err(SecurityError::ParamMismatch);
    }
    let f = rec1.params().field();
    let k = rec1.params().k() as isize;
    let (v, w) = if rec1.vault().degree_or_neg() >= rec2.vault().degree_or_neg() {
        (rec1.vault(), rec2.vault())
    } else {
        (rec2.vault(), rec1.vault())
    };
    let deg_v = v.degree_or_neg();
    if w.is_zero() || deg_v < 1 {
        return Ok(CorrelationResult::unlinked());
    }
    // Gap needed in the weak case: ρ^-gap · deg V < 2^-32.
    let e = f.degree() as f64;
    let min_gap = ((32.0 + (deg_v as f64).log2()) / e).ceil() as isize;

    for row in EuclidRows::new(f, v, w) {
        let Some(dt) = row.t.degree() else { continue };
        let dt = dt as isize;
        if 2 * dt > deg_v - k {
            break;
        }
        let dr = row.r.degree_or_neg();
        if dr >= dt + k {
            continue;
        }
        let lam = f.inv(row.t.leading_coeff()).expect("nonzero leading coefficient");
        let mut a = row.t.scale(f, lam);
        let mut b = row.s.scale(f, lam);
        let mut r = row.r.scale(f, lam);
        let g = poly_gcd(f, &a, &b);
        if g.degree() != Some(0) {
            let (rq, rr) = r.div_rem(f, &g).expect("nonzero gcd");
            if !rr.is_zero() {
                continue;
            }
            r = rq;
            a = a.div_rem(f, &g).expect("nonzero gcd").0;
            b = b.div_rem(f, &g).expect("nonzero gcd").0;
        }
        if a.degree_or_neg() >= k {
            let Some(b_inv) = inverse_mod(f, &b, &a) else { continue };
            let (_, k1) = r.mul(f, &b_inv).div_rem(f, &a).expect("monic divisor");
            if k1.degree_or_neg() >= k {
                continue;
            }
            let (k2, rem) = r.sub(&b.mul(f, &k1)).div_rem(f, &a).expect("monic divisor");
            if !rem.is_zero() || k2.degree_or_neg() >= k {
                continue;
            }
            let common = common_roots(f, &v.sub(&k1), &w.sub(&k2));
            if !common.is_empty() {
                return Ok(CorrelationResult {
                    linked: true,
                    common: Some(common),
                });
            }
        } else if deg_v - 1 - (dr + dt) >= min_gap && 2 * dt + k < deg_v {
            return Ok(CorrelationResult {
                linked: true,
                common: None,
            });
        }
    }
    Ok(CorrelationResult::unlinked())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::feature_pipeline::{BinarisationScheme, FeatureSet};
    use crate::vault::{bind, bind_with, BindOptions, VaultParams};
    use rand::seq::index::sample;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn related_sets(rng: &mut ChaCha8Rng, nm: usize, size: usize, overlap: usize) -> (FeatureSet, FeatureSet) {
        let pool = sample(rng, nm, 2 * size - overlap).into_vec();
        let a: Vec<u32> = pool[..size].iter().map(|&x| x as u32).collect();
        let b: Vec<u32> = pool[size - overlap..].iter().map(|&x| x as u32).collect();
        (FeatureSet::new(a), FeatureSet::new(b))
    }

    fn plain() -> BindOptions {
        BindOptions {
            use_bijection: false,
            hide_degree: false,
            salt: Vec::new(),
        }
    }

    #[test]
    fn recovers_overlap_of_unprotected_related_records() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        // n = 64, d = 4, LSSC: nm = 192 in GF(256)
        let params = VaultParams::new(64, 4, BinarisationScheme::Lssc, 16).unwrap();
        for _ in 0..20 {
            let (a, b) = related_sets(&mut rng, 192, 96, 70);
            let (r1, _) = bind_with(&a, &params, &plain(), &mut rng).unwrap();
            let (r2, _) = bind_with(&b, &params, &plain(), &mut rng).unwrap();
            let res = correlation_attack(&r1, &r2).unwrap();
            assert!(res.linked);
            let mut want: Vec<u16> = a
                .elements()
                .iter()
                .filter(|x| b.contains(**x))
                .map(|&x| x as u16)
                .collect();
            want.sort_unstable();
            let got: Vec<u16> = res.common.unwrap().iter().map(|x| x.value()).collect();
            assert_eq!(got, want);
        }
    }

    #[test]
    fn below_the_overlap_condition_fails() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let params = VaultParams::new(64, 4, BinarisationScheme::Lssc, 16).unwrap();
        for _ in 0..20 {
            // (96 + 16) / 2 = 56 is required.
            let (a, b) = related_sets(&mut rng, 192, 96, 50);
            let (r1, _) = bind_with(&a, &params, &plain(), &mut rng).unwrap();
            let (r2, _) = bind_with(&b, &params, &plain(), &mut rng).unwrap();
            assert!(!correlation_attack(&r1, &r2).unwrap().linked);
        }
    }

    #[test]
    fn identical_unprotected_sets_are_linked() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let params = VaultParams::new(64, 4, BinarisationScheme::Lssc, 16).unwrap();
        let (a, _) = related_sets(&mut rng, 192, 96, 96);
        let (r1, _) = bind_with(&a, &params, &plain(), &mut rng).unwrap();
        let (r2, _) = bind_with(&a, &params, &plain(), &mut rng).unwrap();
        assert_eq!(
            correlation_attack(&r1, &r2).unwrap(),
            CorrelationResult { linked: true, common: None }
        );
    }

    #[test]
    fn blinding_alone_needs_overlap_relative_to_nm() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        // nm = 48, k = 4: overlap of 26 ≥ (48 + 4) / 2 links.
        let params = VaultParams::new(16, 4, BinarisationScheme::Lssc, 4).unwrap();
        let opts = BindOptions {
            use_bijection: false,
            ..Default::default()
        };
        for _ in 0..10 {
            let (a, b) = related_sets(&mut rng, 48, 30, 27);
            let (r1, _) = bind_with(&a, &params, &opts, &mut rng).unwrap();
            let (r2, _) = bind_with(&b, &params, &opts, &mut rng).unwrap();
            let res = correlation_attack(&r1, &r2).unwrap();
            assert!(res.linked);
            assert_eq!(res.common.unwrap().len(), 27);
        }
    }

    #[test]
    fn disjoint_sets_are_not_linked() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let params = VaultParams::new(64, 4, BinarisationScheme::Lssc, 16).unwrap();
        for _ in 0..20 {
            let (a, b) = related_sets(&mut rng, 192, 90, 0);
            let (r1, _) = bind_with(&a, &params, &plain(), &mut rng).unwrap();
            let (r2, _) = bind_with(&b, &params, &plain(), &mut rng).unwrap();
            assert!(!correlation_attack(&r1, &r2).unwrap().linked);
        }
    }

    #[test]
    fn protected_records_of_one_set_are_not_linked() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let params = VaultParams::new(64, 4, BinarisationScheme::Lssc, 16).unwrap();
        for _ in 0..200 {
            let (a, _) = related_sets(&mut rng, 192, 96, 96);
            let (r1, _) = bind(&a, &params, &mut rng).unwrap();
            let (r2, _) = bind(&a, &params, &mut rng).unwrap();
            assert!(!correlation_attack(&r1, &r2).unwrap().linked);
        }
    }

    #[test]
    fn parameter_mismatch() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let p1 = VaultParams::new(8, 4, BinarisationScheme::Lssc, 4).unwrap();
        let p2 = p1.with_k(5).unwrap();
        let set = FeatureSet::new(vec![1, 2, 3]);
        let (r1, _) = bind(&set, &p1, &mut rng).unwrap();
        let (r2, _) = bind(&set, &p2, &mut rng).unwrap();
        assert_eq!(correlation_attack(&r1, &r2), Err(SecurityError::ParamMismatch));
    }
}
