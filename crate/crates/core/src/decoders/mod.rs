//! Polynomial reconstruction from an unlocking set.
//!
//! Three strategies recover κ from u pairs of which ω lie on it:
//!
//! * iterated Lagrange: interpolate random k-subsets;
//! * iterated Reed–Solomon: run Gao's decoder on random c-subsets;
//! * Guruswami–Sudan: list-decode all pairs (or random c-subsets).
//!
//! Every candidate passes through the hash gate of [`KeyCheck`] before it is
//! returned, so a successful [`DecodeOutcome`] always carries the bound key.
//!
//! Work is reported in units of one k-point Lagrange interpolation; the
//! relative cost of the other decoders comes from a [`CostModel`].

mod cost;
mod gao;
mod gs;
mod probability;

pub use cost::{CostModel, CostSource};
pub use gao::decode_gao;
pub use gs::{decode_gs, gs_parameters, multiplicity_for_radius, GsParameters};
pub use probability::{hypergeometric_tail, success_probability, success_probability_f64};

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf2e::{lagrange_interpolate, Field, FieldElement, FieldError, Poly};
use crate::vault::{key_digest, SecretKey, UnlockingSet};

/// Iteration budget used for iterated Lagrange decoding by default.
pub const DEFAULT_LAGRANGE_ITERATIONS: u64 = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecodeError {
    #[error("k must be positive")]
    ZeroK,
    #[error("multiplicity must be at least 1")]
    ZeroMultiplicity,
    #[error("subset size {c} is smaller than k = {k}")]
    SubsetTooSmall { c: usize, k: usize },
    #[error("argument out of range: {0}")]
    Range(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    LagrangeIterated,
    RsGaoIterated,
    GsList,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [Strategy::LagrangeIterated, Strategy::RsGaoIterated, Strategy::GsList];

    /// Short label used in reports.
    pub fn label(self) -> &'static str {
        match self {
            Strategy::LagrangeIterated => "LG",
            Strategy::RsGaoIterated => "RS",
            Strategy::GsList => "GS",
        }
    }
}

impl std::str::FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "lg" | "lagrange" | "lagrange_iterated" => Ok(Strategy::LagrangeIterated),
            "rs" | "gao" | "rs_gao_iterated" => Ok(Strategy::RsGaoIterated),
            "gs" | "gs_list" => Ok(Strategy::GsList),
            _ => Err(format!("unknown decoder `{s}`")),
        }
    }
}

/// Size of the random subset fed to the iterated RS and GS decoders.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubsetSize {
    /// All u pairs: a single deterministic pass.
    All,
    /// c pairs per iteration; values above u are clamped to u.
    Fixed(usize),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecoderConfig {
    pub strategy: Strategy,
    pub max_iterations: u64,
    pub subset: SubsetSize,
    pub multiplicity: u32,
    pub seed: u64,
    /// Salt prepended to κ when checking the hash.
    #[serde(default)]
    pub salt: Vec<u8>,
    /// Record wall-clock time per decode.
    #[serde(default = "default_true")]
    pub timing: bool,
    #[serde(default)]
    pub cost: CostModel,
}

fn default_true() -> bool {
    true
}

impl DecoderConfig {
    /// Lagrange with 2^16 attempts; RS and GS as one pass over all pairs
    /// with multiplicity 1.
    pub fn for_strategy(strategy: Strategy) -> Self {
        DecoderConfig {
            strategy,
            max_iterations: match strategy {
                Strategy::LagrangeIterated => DEFAULT_LAGRANGE_ITERATIONS,
                _ => 1,
            },
            subset: SubsetSize::All,
            multiplicity: 1,
            seed: 0,
            salt: Vec::new(),
            timing: true,
            cost: CostModel::default(),
        }
    }

    fn subset_size(&self, u: usize, k: usize) -> Result<usize, DecodeError> {
        let c = match self.subset {
            SubsetSize::All => u,
            SubsetSize::Fixed(c) => c.min(u),
        };
        if c < k && u >= k {
            return Err(DecodeError::SubsetTooSmall { c, k });
        }
        Ok(c)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecodeOutcome {
    pub success: bool,
    pub key: Option<SecretKey>,
    pub iterations: u64,
    pub elapsed: Duration,
    /// Work in Lagrange-interpolation units.
    pub operation_units: f64,
}

/// The hash gate: accepts a candidate iff SHA-256(salt || κ) matches.
#[derive(Clone, Copy, Debug)]
pub struct KeyCheck<'a> {
    key_hash: &'a [u8; 32],
    salt: &'a [u8],
}

impl<'a> KeyCheck<'a> {
    pub fn new(key_hash: &'a [u8; 32], salt: &'a [u8]) -> Self {
        KeyCheck { key_hash, salt }
    }

    /// The padded key if `p` has degree < k and its hash matches.
    pub fn verify(&self, p: &Poly, k: usize) -> Option<SecretKey> {
        let key = SecretKey::from_poly(p, k).ok()?;
        (key_digest(key.coeffs(), self.salt) == *self.key_hash).then_some(key)
    }
}

/// Runs the configured strategy with an RNG seeded from `config.seed`.
pub fn decode(
    field: &Field,
    set: &UnlockingSet,
    k: usize,
    check: &KeyCheck,
    config: &DecoderConfig,
) -> Result<DecodeOutcome, DecodeError> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    decode_with_rng(field, set, k, check, config, &mut rng)
}

pub fn decode_with_rng<R: Rng + ?Sized>(
    field: &Field,
    set: &UnlockingSet,
    k: usize,
    check: &KeyCheck,
    config: &DecoderConfig,
    rng: &mut R,
) -> Result<DecodeOutcome, DecodeError> {
    match config.strategy {
        Strategy::LagrangeIterated => decode_lagrange_iterated(field, set, k, check, config, rng),
        Strategy::RsGaoIterated => decode_rs_iterated(field, set, k, check, config, rng),
        Strategy::GsList => decode_gs_iterated(field, set, k, check, config, rng),
    }
}

/// Uniform c-subset of 0..u by Floyd's algorithm, in increasing order.
pub fn sample_subset<R: Rng + ?Sized>(rng: &mut R, u: usize, c: usize) -> Vec<usize> {
    assert!(c <= u);
    let mut chosen = vec![false; u];
    for j in u - c..u {
        let t = rng.random_range(0..=j);
        if chosen[t] {
            chosen[j] = true;
        } else {
            chosen[t] = true;
        }
    }
    (0..u).filter(|&i| chosen[i]).collect()
}

fn subset_points(set: &UnlockingSet, idx: &[usize]) -> Vec<(FieldElement, FieldElement)> {
    idx.iter().map(|&i| set.points()[i]).collect()
}

fn validate(k: usize, config: &DecoderConfig) -> Result<(), DecodeError> {
    if k == 0 {
        return Err(DecodeError::ZeroK);
    }
    if config.multiplicity == 0 {
        return Err(DecodeError::ZeroMultiplicity);
    }
    Ok(())
}

// Shared driver: `attempt` is run on successive subsets until the budget is
// spent or it yields a verified key.
fn iterate<R, F>(
    set: &UnlockingSet,
    k: usize,
    c: usize,
    config: &DecoderConfig,
    unit: f64,
    rng: &mut R,
    mut attempt: F,
) -> Result<DecodeOutcome, DecodeError>
where
    R: Rng + ?Sized,
    F: FnMut(&[(FieldElement, FieldElement)]) -> Result<Option<SecretKey>, DecodeError>,
{
    let start = config.timing.then(Instant::now);
    let u = set.len();
    let finish = |key: Option<SecretKey>, iterations: u64| DecodeOutcome {
        success: key.is_some(),
        key,
        iterations,
        elapsed: start.map(|s| s.elapsed()).unwrap_or_default(),
        operation_units: iterations as f64 * unit,
    };
    if u < k {
        return Ok(finish(None, 0));
    }
    // Sampling all u pairs gives the same input every time.
    let budget = if c == u { 1 } else { config.max_iterations.max(1) };
    for it in 1..=budget {
        let key = if c == u {
            attempt(set.points())?
        } else {
            attempt(&subset_points(set, &sample_subset(rng, u, c)))?
        };
        if key.is_some() {
            return Ok(finish(key, it));
        }
    }
    Ok(finish(None, budget))
}

/// Interpolates random k-subsets until one hashes to the stored digest.
pub fn decode_lagrange_iterated<R: Rng + ?Sized>(
    field: &Field,
    set: &UnlockingSet,
    k: usize,
    check: &KeyCheck,
    config: &DecoderConfig,
    rng: &mut R,
) -> Result<DecodeOutcome, DecodeError> {
    validate(k, config)?;
    let c = k.min(set.len());
    iterate(set, k, c, config, 1.0, rng, |pts| {
        Ok(check.verify(&lagrange_interpolate(field, pts)?, k))
    })
}

/// Runs Gao's decoder on random c-subsets.
pub fn decode_rs_iterated<R: Rng + ?Sized>(
    field: &Field,
    set: &UnlockingSet,
    k: usize,
    check: &KeyCheck,
    config: &DecoderConfig,
    rng: &mut R,
) -> Result<DecodeOutcome, DecodeError> {
    validate(k, config)?;
    let c = config.subset_size(set.len(), k)?;
    iterate(set, k, c, config, config.cost.gao_units, rng, |pts| {
        Ok(decode_gao(field, pts, k)?.and_then(|p| check.verify(&p, k)))
    })
}

/// Guruswami–Sudan list decoding, by default a single pass over all pairs.
pub fn decode_gs_iterated<R: Rng + ?Sized>(
    field: &Field,
    set: &UnlockingSet,
    k: usize,
    check: &KeyCheck,
    config: &DecoderConfig,
    rng: &mut R,
) -> Result<DecodeOutcome, DecodeError> {
    validate(k, config)?;
    let c = config.subset_size(set.len(), k)?;
    let s = config.multiplicity;
    iterate(set, k, c, config, config.cost.gs_units, rng, |pts| {
        Ok(decode_gs(field, pts, k, s)?
            .iter()
            .find_map(|p| check.verify(p, k)))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::seq::SliceRandom;

    fn gf(e: u8) -> Field {
        Field::new(e).unwrap()
    }

    /// u pairs with distinct random abscissae; the first `omega` lie on the
    /// key polynomial, the rest are off it.
    pub(crate) fn instance(
        f: &Field,
        key: &SecretKey,
        u: usize,
        omega: usize,
        rng: &mut ChaCha8Rng,
    ) -> UnlockingSet {
        let mut xs: Vec<FieldElement> = f.elements().collect();
        xs.shuffle(rng);
        let kp = key.to_poly();
        let pts = xs[..u]
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let y = kp.eval(f, x);
                if i < omega {
                    (x, y)
                } else {
                    (x, f.add(y, f.random_nonzero(rng)))
                }
            })
            .collect();
        UnlockingSet::from_points(pts).unwrap()
    }

    #[test]
    fn floyd_subsets_are_sorted_distinct_and_uniform() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut hits = [0u32; 6];
        let trials = 30000;
        for _ in 0..trials {
            let s = sample_subset(&mut rng, 6, 2);
            assert_eq!(s.len(), 2);
            assert!(s[0] < s[1]);
            for i in s {
                hits[i] += 1;
            }
        }
        let expect = trials as f64 / 3.0;
        for h in hits {
            assert!((h as f64 - expect).abs() < 5.0 * (trials as f64 * (2.0 / 9.0)).sqrt());
        }
        assert_eq!(sample_subset(&mut rng, 5, 5), vec![0, 1, 2, 3, 4]);
        assert!(sample_subset(&mut rng, 5, 0).is_empty());
    }

    #[test]
    fn all_genuine_succeeds_on_first_iteration() {
        let f = gf(6);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for strategy in Strategy::ALL {
            let key = SecretKey::random(&f, 5, &mut rng);
            let hash = key.digest(b"");
            let set = instance(&f, &key, 12, 12, &mut rng);
            let cfg = DecoderConfig::for_strategy(strategy);
            let out = decode(&f, &set, 5, &KeyCheck::new(&hash, b""), &cfg).unwrap();
            assert!(out.success);
            assert_eq!(out.iterations, 1);
            assert_eq!(out.key.unwrap(), key);
            assert!(out.operation_units >= 1.0);
        }
    }

    #[test]
    fn too_few_pairs_fail_immediately() {
        let f = gf(4);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let key = SecretKey::random(&f, 5, &mut rng);
        let hash = key.digest(b"");
        let set = instance(&f, &key, 4, 4, &mut rng);
        for strategy in Strategy::ALL {
            let out = decode(&f, &set, 5, &KeyCheck::new(&hash, b""), &DecoderConfig::for_strategy(strategy)).unwrap();
            assert!(!out.success);
            assert_eq!(out.iterations, 0);
        }
    }

    #[test]
    fn below_k_genuine_exhausts_budget_without_a_key() {
        let f = gf(5);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let key = SecretKey::random(&f, 4, &mut rng);
        let hash = key.digest(b"");
        let set = instance(&f, &key, 10, 3, &mut rng);
        for strategy in Strategy::ALL {
            let mut cfg = DecoderConfig::for_strategy(strategy);
            cfg.max_iterations = 300;
            cfg.subset = SubsetSize::Fixed(6);
            let out = decode(&f, &set, 4, &KeyCheck::new(&hash, b""), &cfg).unwrap();
            assert!(!out.success && out.key.is_none());
            assert_eq!(out.iterations, 300);
        }
    }

    #[test]
    fn operation_units_grow_with_iterations() {
        let f = gf(5);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let key = SecretKey::random(&f, 4, &mut rng);
        let hash = key.digest(b"");
        let set = instance(&f, &key, 10, 2, &mut rng);
        let mut cfg = DecoderConfig::for_strategy(Strategy::GsList);
        cfg.cost = CostModel::fixed(1.0, 7.5);
        cfg.subset = SubsetSize::Fixed(8);
        let mut last = 0.0;
        for budget in [1, 2, 5, 9] {
            cfg.max_iterations = budget;
            let out = decode(&f, &set, 4, &KeyCheck::new(&hash, b""), &cfg).unwrap();
            assert!(out.operation_units >= 1.0 && out.operation_units > last);
            assert_eq!(out.operation_units, 7.5 * budget as f64);
            last = out.operation_units;
        }
    }

    #[test]
    fn config_errors() {
        let f = gf(4);
        let set = UnlockingSet::from_points(vec![(FieldElement::new(1), FieldElement::new(1))]).unwrap();
        let hash = [0u8; 32];
        let check = KeyCheck::new(&hash, b"");
        let mut cfg = DecoderConfig::for_strategy(Strategy::GsList);
        assert_eq!(decode(&f, &set, 0, &check, &cfg), Err(DecodeError::ZeroK));
        cfg.multiplicity = 0;
        assert_eq!(decode(&f, &set, 1, &check, &cfg), Err(DecodeError::ZeroMultiplicity));
        let mut cfg = DecoderConfig::for_strategy(Strategy::RsGaoIterated);
        cfg.subset = SubsetSize::Fixed(0);
        assert_eq!(
            decode(&f, &set, 1, &check, &cfg),
            Err(DecodeError::SubsetTooSmall { c: 0, k: 1 })
        );
    }

    #[test]
    fn strategy_names_parse() {
        for s in Strategy::ALL {
            assert_eq!(s.label().parse::<Strategy>().unwrap(), s);
        }
        assert!("xx".parse::<Strategy>().is_err());
    }
}
