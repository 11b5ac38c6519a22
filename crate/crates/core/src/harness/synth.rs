use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{Dataset, HarnessError, Role};
use crate::feature_pipeline::RealFeatureVector;

/// Gaussian stand-in for face embeddings: each subject has an archetype
/// drawn from N(0, σ_b² I); each sample adds N(0, σ_w² I) and is scaled to
/// unit length. Training and evaluation subjects are disjoint.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthConfig {
    pub n: usize,
    /// Subjects in the evaluation set.
    pub subjects: usize,
    /// Subjects in the training set; defaults to `subjects`.
    #[serde(default)]
    pub train_subjects: Option<usize>,
    pub samples_per_subject: usize,
    pub sigma_within: f64,
    pub sigma_between: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            n: 512,
            subjects: 100,
            train_subjects: None,
            samples_per_subject: 4,
            sigma_within: 0.5,
            sigma_between: 1.0,
            seed: 1,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: &str| Err(HarnessError::Config(m.to_string()));
        if self.n == 0 || self.subjects == 0 || self.samples_per_subject == 0 || self.train_subjects == Some(0) {
            return bad("synthetic counts must be positive");
        }
        if !(self.sigma_between > 0.0 && self.sigma_between.is_finite()) {
            return bad("sigma_between must be positive");
        }
        if !(self.sigma_within >= 0.0 && self.sigma_within.is_finite()) {
            return bad("sigma_within must be non-negative");
        }
        Ok(())
    }
}

fn population(cfg: &SynthConfig, subjects: usize, prefix: &str, stream: u64) -> Vec<RealFeatureVector> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(stream);
    let mut gauss = move |sigma: f64| -> f64 { sigma * rng.sample::<f64, _>(StandardNormal) };
    let mut out = Vec::with_capacity(subjects * cfg.samples_per_subject);
    for s in 0..subjects {
        let archetype: Vec<f64> = (0..cfg.n).map(|_| gauss(cfg.sigma_between)).collect();
        for j in 0..cfg.samples_per_subject {
            let mut v: Vec<f64> = archetype.iter().map(|a| a + gauss(cfg.sigma_within)).collect();
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 0.0 {
                v.iter_mut().for_each(|x| *x /= norm);
            }
            out.push(RealFeatureVector::new(format!("{prefix}{s:05}"), j.to_string(), v));
        }
    }
    out
}

/// Returns (train, eval), tagged with their roles.
pub fn generate_synthetic(cfg: &SynthConfig) -> Result<(Dataset, Dataset), HarnessError> {
    cfg.validate()?;
    let train = population(cfg, cfg.train_subjects.unwrap_or(cfg.subjects), "t", 1);
    let eval = population(cfg, cfg.subjects, "e", 2);
    Ok((
        Dataset::new(train, Some(Role::Train))?,
        Dataset::new(eval, Some(Role::Eval))?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::write_features;

    fn small() -> SynthConfig {
        SynthConfig {
            n: 16,
            subjects: 5,
            train_subjects: Some(7),
            samples_per_subject: 3,
            ..Default::default()
        }
    }

    #[test]
    fn shape_and_norm() {
        let (train, eval) = generate_synthetic(&small()).unwrap();
        assert_eq!(train.len(), 21);
        assert_eq!(eval.len(), 15);
        assert_eq!(eval.subjects().len(), 5);
        for s in eval.samples() {
            let norm: f64 = s.values.iter().map(|x| x * x).sum();
            assert!((norm - 1.0).abs() < 1e-12);
        }
        assert!(train.samples().iter().all(|s| s.subject_id.starts_with('t')));
    }

    #[test]
    fn byte_identical_under_seed() {
        let csv = |d: &Dataset| {
            let mut buf = Vec::new();
            write_features(d, &mut buf).unwrap();
            buf
        };
        let (a, b) = generate_synthetic(&small()).unwrap();
        let (c, d) = generate_synthetic(&small()).unwrap();
        assert_eq!(csv(&a), csv(&c));
        assert_eq!(csv(&b), csv(&d));
        let other = SynthConfig { seed: 2, ..small() };
        assert_ne!(csv(&generate_synthetic(&other).unwrap().1), csv(&b));
    }

    #[test]
    fn zero_within_noise_repeats_samples() {
        let cfg = SynthConfig {
            sigma_within: 0.0,
            ..small()
        };
        let (_, eval) = generate_synthetic(&cfg).unwrap();
        for (_, idx) in eval.subjects() {
            for &i in &idx[1..] {
                assert_eq!(eval.samples()[i].values, eval.samples()[idx[0]].values);
            }
        }
    }

    #[test]
    fn rejects_bad_config() {
        for cfg in [
            SynthConfig { n: 0, ..small() },
            SynthConfig { sigma_between: 0.0, ..small() },
            SynthConfig { sigma_within: -1.0, ..small() },
            SynthConfig { train_subjects: Some(0), ..small() },
        ] {
            assert!(generate_synthetic(&cfg).is_err());
        }
    }
}
