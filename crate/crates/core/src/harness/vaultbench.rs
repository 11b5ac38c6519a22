use std::fmt::Write as _;
use std::path::PathBuf;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::{ChaCha20Rng, ChaCha8Rng};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Dataset, HarnessError, SynthConfig};
use crate::decoders::{self, CostModel, DecoderConfig, KeyCheck, Strategy, SubsetSize};
use crate::feature_pipeline::{
    fit_quantiser, BinarisationScheme, FeatureSet, FeatureTransform, FitOptions, QuantisationScheme,
};
use crate::security::{MetricsOptions, MetricsReport, TrialOutcome};
use crate::vault::{bind_with, serialize_record, unlock_set_with, BindOptions, VaultError, VaultParams, VaultRecord};

/// One decoder column of the experiment. Unset fields take the defaults of
/// [`DecoderConfig::for_strategy`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecoderSpec {
    pub strategy: Strategy,
    #[serde(default)]
    pub max_iterations: Option<u64>,
    #[serde(default)]
    pub subset: Option<SubsetSize>,
    #[serde(default)]
    pub multiplicity: Option<u32>,
}

impl DecoderSpec {
    pub fn new(strategy: Strategy) -> Self {
        DecoderSpec {
            strategy,
            max_iterations: None,
            subset: None,
            multiplicity: None,
        }
    }

    fn config(&self) -> DecoderConfig {
        let mut c = DecoderConfig::for_strategy(self.strategy);
        if let Some(i) = self.max_iterations {
            c.max_iterations = i;
        }
        if let Some(s) = self.subset {
            c.subset = s;
        }
        if let Some(s) = self.multiplicity {
            c.multiplicity = s;
        }
        c
    }
}

/// Which probes are compared with which references in non-mated trials.
/// References are always the first sample of each subject and mated
/// trials compare every other sample of the subject with it.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NonMatedPairing {
    /// Every non-reference sample against every other subject's reference.
    #[default]
    ProbesVsReferences,
    /// Only the second sample of each subject against every other
    /// subject's reference.
    FirstProbeVsReferences,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Protection {
    #[serde(default = "yes")]
    pub use_bijection: bool,
    #[serde(default = "yes")]
    pub hide_degree: bool,
    /// UTF-8 salt prepended to κ before hashing.
    #[serde(default)]
    pub salt: String,
}

impl Default for Protection {
    fn default() -> Self {
        Protection {
            use_bijection: true,
            hide_degree: true,
            salt: String::new(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputPaths {
    #[serde(default)]
    pub tsv: Option<PathBuf>,
    #[serde(default)]
    pub json: Option<PathBuf>,
    /// Directory receiving every enrolled record.
    #[serde(default)]
    pub records_dir: Option<PathBuf>,
}

fn yes() -> bool {
    true
}

fn default_quantisation() -> QuantisationScheme {
    QuantisationScheme::EqualProbable
}

/// A vault experiment: for every (d, scheme) the quantiser is fitted on the
/// training data, evaluation references are enrolled at each k and all
/// decoders are run on the same mated and non-mated pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub seed: u64,
    pub intervals: Vec<u16>,
    pub schemes: Vec<BinarisationScheme>,
    #[serde(default = "default_quantisation")]
    pub quantisation: QuantisationScheme,
    #[serde(default)]
    pub fit: FitOptions,
    pub k: Vec<u16>,
    pub decoders: Vec<DecoderSpec>,
    #[serde(default)]
    pub pairing: NonMatedPairing,
    #[serde(default)]
    pub max_mated: Option<usize>,
    #[serde(default)]
    pub max_nonmated: Option<usize>,
    #[serde(default)]
    pub protection: Protection,
    /// Wall-clock timing per decode. Reports are only reproducible with
    /// timing off.
    #[serde(default = "yes")]
    pub timing: bool,
    /// Worker threads; defaults to 1 with timing on and all cores otherwise.
    #[serde(default)]
    pub threads: Option<usize>,
    /// Rounds of the Gao/GS cost microbenchmark per k; 0 keeps unit costs.
    #[serde(default)]
    pub calibration_rounds: usize,
    #[serde(default)]
    pub rule_of_three: bool,
    #[serde(default)]
    pub output: OutputPaths,
    /// Data source when no feature files are given.
    #[serde(default)]
    pub synthetic: Option<SynthConfig>,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, HarnessError> {
        toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))
    }

    /// Checks the grid against vector length `n` before any trial runs.
    pub fn validate(&self, n: usize) -> Result<(), HarnessError> {
        let cfg = |m: String| Err(HarnessError::Config(m));
        if self.intervals.is_empty() || self.schemes.is_empty() || self.k.is_empty() || self.decoders.is_empty() {
            return cfg("intervals, schemes, k and decoders must be non-empty".into());
        }
        let n = u16::try_from(n).map_err(|_| HarnessError::Config(format!("n = {n} is too large")))?;
        for &d in &self.intervals {
            for &scheme in &self.schemes {
                let base = VaultParams::new(n, d, scheme, 1).map_err(|e| HarnessError::Config(e.to_string()))?;
                let nm = base.universe();
                if let Some(&k) = self.k.iter().find(|&&k| k == 0 || k as usize > nm) {
                    return cfg(format!("k = {k} outside 1..={nm} for d = {d}, scheme {}", scheme.name()));
                }
            }
        }
        for d in &self.decoders {
            let c = d.config();
            if c.max_iterations == 0 || c.multiplicity == 0 {
                return cfg(format!("decoder {}: iterations and multiplicity must be positive", d.strategy.label()));
            }
        }
        if self.threads == Some(0) {
            return cfg("threads must be positive".into());
        }
        Ok(())
    }

    fn bind_options(&self) -> BindOptions {
        BindOptions {
            use_bijection: self.protection.use_bijection,
            hide_degree: self.protection.hide_degree,
            salt: self.protection.salt.as_bytes().to_vec(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SetSizeStats {
    pub count: usize,
    pub mean: f64,
    pub sd: f64,
    /// Coefficient of variation sd / mean.
    pub cv: f64,
    pub min: usize,
    pub max: usize,
    /// Expected |P| under equal-probable quantisation.
    pub expected: Option<f64>,
}

impl SetSizeStats {
    pub fn from_sizes(sizes: &[usize], expected: Option<f64>) -> Self {
        let count = sizes.len();
        let mean = sizes.iter().sum::<usize>() as f64 / count as f64;
        let var = if count > 1 {
            sizes.iter().map(|&s| (s as f64 - mean).powi(2)).sum::<f64>() / (count - 1) as f64
        } else {
            0.0
        };
        SetSizeStats {
            count,
            mean,
            sd: var.sqrt(),
            cv: if mean > 0.0 { var.sqrt() / mean } else { 0.0 },
            min: sizes.iter().copied().min().unwrap_or(0),
            max: sizes.iter().copied().max().unwrap_or(0),
            expected,
        }
    }
}

/// Expected |P| when every interval is equally likely: nm/2 bits are set on
/// average, except one-hot which sets exactly one bit per element.
pub fn expected_set_size(n: usize, d: u16, scheme: BinarisationScheme) -> f64 {
    match scheme {
        BinarisationScheme::OneHot => n as f64,
        s => (n * s.bits_per_element(d).unwrap_or(0)) as f64 / 2.0,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CostEntry {
    pub k: u16,
    pub cost: CostModel,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VaultSection {
    pub d: u16,
    pub scheme: BinarisationScheme,
    pub quantisation: QuantisationScheme,
    pub nm: usize,
    pub field_order: usize,
    pub references: usize,
    /// References that could not be enrolled (empty set, or a set one short
    /// of the universe with degree hiding on).
    pub enroll_skipped: usize,
    pub mated_pairs: usize,
    pub nonmated_pairs: usize,
    pub set_size: SetSizeStats,
    pub costs: Vec<CostEntry>,
    pub metrics: MetricsReport,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecordFile {
    pub name: String,
    pub bytes: Vec<u8>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VaultBenchReport {
    pub config: ExperimentConfig,
    pub sections: Vec<VaultSection>,
    #[serde(skip)]
    pub records: Vec<RecordFile>,
}

impl VaultBenchReport {
    /// Tab-separated rows with `#` header lines echoing the seed, the full
    /// configuration and per-section statistics.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# vault benchmark");
        let _ = writeln!(out, "# seed\t{}", self.config.seed);
        let _ = writeln!(out, "# config\t{}", serde_json::to_string(&self.config).expect("config serializes"));
        for s in &self.sections {
            let z = &s.set_size;
            let _ = writeln!(
                out,
                "# section\td={}\tscheme={}\tquantisation={}\tnm={}\tfield_order={}\treferences={}\tskipped={}\tmated={}\tnonmated={}\tset_mean={:.3}\tset_sd={:.3}\tset_cv={:.5}\tset_min={}\tset_max={}",
                s.d,
                s.scheme.name(),
                s.quantisation.name(),
                s.nm,
                s.field_order,
                s.references,
                s.enroll_skipped,
                s.mated_pairs,
                s.nonmated_pairs,
                z.mean,
                z.sd,
                z.cv,
                z.min,
                z.max
            );
            for c in &s.costs {
                let _ = writeln!(
                    out,
                    "# cost\td={}\tscheme={}\tk={}\tgao_units={:.3}\tgs_units={:.3}\tsource={}",
                    s.d,
                    s.scheme.name(),
                    c.k,
                    c.cost.gao_units,
                    c.cost.gs_units,
                    if c.cost.is_calibrated() { "calibrated" } else { "fixed" }
                );
            }
        }
        let _ = writeln!(out, "d\tscheme\t{}", MetricsReport::TSV_COLUMNS.join("\t"));
        for s in &self.sections {
            for line in s.metrics.to_tsv().lines().skip(1) {
                let _ = writeln!(out, "{}\t{}\t{line}", s.d, s.scheme.name());
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// SplitMix64 over a sequence of words: independent seeds per trial.
fn substream(words: &[u64]) -> u64 {
    let mut h: u64 = 0x243f_6a88_85a3_08d3;
    for &w in words {
        h ^= w;
        h = h.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = h;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        h = z ^ (z >> 31);
    }
    h
}

struct Pairs {
    /// (reference subject, probe sample), mated first.
    list: Vec<(usize, usize)>,
    mated: usize,
}

fn build_pairs(
    cfg: &ExperimentConfig,
    subjects: &[Vec<usize>],
    enrolled: &[bool],
    salt: u64,
) -> Pairs {
    let cap = |mut v: Vec<(usize, usize)>, max: Option<usize>, tag: u64| {
        if let Some(max) = max.filter(|&m| m < v.len()) {
            let mut rng = ChaCha8Rng::seed_from_u64(substream(&[cfg.seed, salt, tag]));
            let mut keep = sample(&mut rng, v.len(), max).into_vec();
            keep.sort_unstable();
            v = keep.into_iter().map(|i| v[i]).collect();
        }
        v
    };
    let mut mated = Vec::new();
    let mut nonmated = Vec::new();
    for (a, samples) in subjects.iter().enumerate() {
        if enrolled[a] {
            mated.extend(samples[1..].iter().map(|&p| (a, p)));
        }
        let probes = match cfg.pairing {
            NonMatedPairing::ProbesVsReferences => &samples[1..],
            NonMatedPairing::FirstProbeVsReferences => &samples[1..2],
        };
        for &p in probes {
            nonmated.extend((0..subjects.len()).filter(|&b| b != a && enrolled[b]).map(|b| (b, p)));
        }
    }
    let mut list = cap(mated, cfg.max_mated, 1);
    let m = list.len();
    list.extend(cap(nonmated, cfg.max_nonmated, 2));
    Pairs { list, mated: m }
}

fn trial(
    record: &VaultRecord,
    probe: &FeatureSet,
    config: &DecoderConfig,
    use_bijection: bool,
) -> Result<crate::decoders::DecodeOutcome, HarnessError> {
    let set = unlock_set_with(record, probe, use_bijection)?;
    let check = KeyCheck::new(record.key_hash(), &config.salt);
    Ok(decoders::decode(
        record.params().field(),
        &set,
        record.params().k() as usize,
        &check,
        config,
    )?)
}

/// Runs the experiment on `eval`, with quantisers fitted on `train`.
/// Identical inputs and seeds give identical reports and records when
/// timing and cost calibration are off.
pub fn run_vault_benchmark(
    train: &Dataset,
    eval: &Dataset,
    cfg: &ExperimentConfig,
) -> Result<VaultBenchReport, HarnessError> {
    train.check_trainable()?;
    eval.check_evaluable()?;
    if train.dim() != eval.dim() {
        return Err(HarnessError::Config(format!(
            "training vectors have {} elements, evaluation vectors {}",
            train.dim(),
            eval.dim()
        )));
    }
    cfg.validate(eval.dim())?;
    let threads = cfg.threads.unwrap_or(if cfg.timing { 1 } else { 0 });
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| HarnessError::Config(format!("thread pool: {e}")))?;
    pool.install(|| run_sections(train, eval, cfg))
}

fn run_sections(train: &Dataset, eval: &Dataset, cfg: &ExperimentConfig) -> Result<VaultBenchReport, HarnessError> {
    let subjects: Vec<Vec<usize>> = eval.subjects().into_iter().map(|(_, v)| v).collect();
    let opts = cfg.bind_options();
    let n = eval.dim();
    let mut sections = Vec::new();
    let mut records = Vec::new();
    let mut k_sorted = cfg.k.clone();
    k_sorted.sort_unstable();
    k_sorted.dedup();

    for &d in &cfg.intervals {
        let model = fit_quantiser(train.samples(), d, cfg.quantisation, &cfg.fit)?;
        for &scheme in &cfg.schemes {
            let section_id = substream(&[d as u64, scheme.code() as u64]);
            let t = FeatureTransform::new(model.clone(), scheme)?;
            let sets: Vec<FeatureSet> = eval
                .samples()
                .par_iter()
                .map(|s| t.feature_set(&s.values))
                .collect::<Result<_, _>>()?;
            let sizes: Vec<usize> = sets.iter().map(FeatureSet::len).collect();
            let expected =
                (cfg.quantisation == QuantisationScheme::EqualProbable).then(|| expected_set_size(n, d, scheme));
            let set_size = SetSizeStats::from_sizes(&sizes, expected);
            let base = VaultParams::for_transform(&t, 1)?;
            let nm = base.universe();
            let enrolled: Vec<bool> = subjects
                .iter()
                .map(|s| {
                    let t = sets[s[0]].len();
                    t > 0 && !(opts.hide_degree && nm - t == 1)
                })
                .collect();
            let pairs = build_pairs(cfg, &subjects, &enrolled, section_id);

            let mut outcomes: Vec<TrialOutcome> = Vec::new();
            let mut costs = Vec::new();
            for &k in &k_sorted {
                let params = base.with_k(k)?;
                let recs: Vec<Option<VaultRecord>> = subjects
                    .iter()
                    .enumerate()
                    .map(|(i, s)| {
                        if !enrolled[i] {
                            return Ok(None);
                        }
                        let mut rng = ChaCha20Rng::seed_from_u64(substream(&[cfg.seed, section_id, k as u64, i as u64]));
                        bind_with(&sets[s[0]], &params, &opts, &mut rng).map(|(r, _)| Some(r))
                    })
                    .collect::<Result<_, VaultError>>()?;
                for (i, r) in recs.iter().enumerate() {
                    if let Some(r) = r {
                        records.push(RecordFile {
                            name: format!("d{d}_{}_k{k}_s{i:05}.fvr", scheme.name()),
                            bytes: serialize_record(r),
                        });
                    }
                }

                let cost = if cfg.calibration_rounds > 0 {
                    let u = (set_size.mean.round() as usize).clamp(k as usize, params.field().order());
                    let s = cfg.decoders.iter().filter_map(|d| d.multiplicity).max().unwrap_or(1);
                    let mut rng = ChaCha8Rng::seed_from_u64(substream(&[cfg.seed, section_id, k as u64, 3]));
                    CostModel::calibrate(params.field(), u, k as usize, s, cfg.calibration_rounds, &mut rng)
                } else {
                    CostModel::default()
                };
                costs.push(CostEntry { k, cost });

                for (di, spec) in cfg.decoders.iter().enumerate() {
                    let mut base_cfg = spec.config();
                    base_cfg.salt = opts.salt.clone();
                    base_cfg.timing = cfg.timing;
                    base_cfg.cost = cost;
                    let run = |pi: usize| -> Result<TrialOutcome, HarnessError> {
                        let (subject, probe) = pairs.list[pi];
                        let rec = recs[subject].as_ref().expect("pairs only use enrolled references");
                        let mut c = base_cfg.clone();
                        c.seed = substream(&[cfg.seed, section_id, k as u64, di as u64, pi as u64]);
                        let o = trial(rec, &sets[probe], &c, opts.use_bijection)?;
                        Ok(TrialOutcome {
                            mated: pi < pairs.mated,
                            k,
                            strategy: spec.strategy,
                            success: o.success,
                            elapsed_secs: o.elapsed.as_secs_f64(),
                            operation_units: o.operation_units,
                        })
                    };
                    if cfg.timing && !pairs.list.is_empty() {
                        run(0)?;
                    }
                    let batch: Vec<TrialOutcome> =
                        (0..pairs.list.len()).into_par_iter().map(run).collect::<Result<_, _>>()?;
                    outcomes.extend(batch);
                }
            }
            if pairs.mated == 0 || pairs.list.len() == pairs.mated {
                return Err(HarnessError::Config(format!(
                    "d = {d}, scheme {}: no {} trials (enrolled {} of {} references)",
                    scheme.name(),
                    if pairs.mated == 0 { "mated" } else { "non-mated" },
                    enrolled.iter().filter(|&&e| e).count(),
                    subjects.len()
                )));
            }
            let metrics = MetricsReport::from_outcomes(
                &outcomes,
                MetricsOptions {
                    rule_of_three: cfg.rule_of_three,
                },
            )?;
            sections.push(VaultSection {
                d,
                scheme,
                quantisation: cfg.quantisation,
                nm,
                field_order: base.field().order(),
                references: subjects.len(),
                enroll_skipped: enrolled.iter().filter(|&&e| !e).count(),
                mated_pairs: pairs.mated,
                nonmated_pairs: pairs.list.len() - pairs.mated,
                set_size,
                costs,
                metrics,
            });
        }
    }
    Ok(VaultBenchReport {
        config: cfg.clone(),
        sections,
        records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::generate_synthetic;

    pub(crate) fn small_experiment() -> (Dataset, Dataset, ExperimentConfig) {
        let synth = SynthConfig {
            n: 24,
            subjects: 6,
            train_subjects: Some(40),
            samples_per_subject: 3,
            sigma_within: 0.3,
            sigma_between: 1.0,
            seed: 11,
        };
        let (train, eval) = generate_synthetic(&synth).unwrap();
        let cfg = ExperimentConfig {
            seed: 3,
            intervals: vec![4],
            schemes: vec![BinarisationScheme::Lssc],
            quantisation: QuantisationScheme::EqualProbable,
            fit: FitOptions::default(),
            k: vec![4, 12, 24],
            decoders: vec![
                DecoderSpec {
                    max_iterations: Some(64),
                    ..DecoderSpec::new(Strategy::LagrangeIterated)
                },
                DecoderSpec::new(Strategy::RsGaoIterated),
                DecoderSpec::new(Strategy::GsList),
            ],
            pairing: NonMatedPairing::ProbesVsReferences,
            max_mated: None,
            max_nonmated: None,
            protection: Protection::default(),
            timing: false,
            threads: None,
            calibration_rounds: 0,
            rule_of_three: true,
            output: OutputPaths::default(),
            synthetic: Some(synth),
        };
        (train, eval, cfg)
    }

    #[test]
    fn row_count_and_pair_counts() {
        let (train, eval, cfg) = small_experiment();
        let rep = run_vault_benchmark(&train, &eval, &cfg).unwrap();
        assert_eq!(rep.sections.len(), 1);
        let s = &rep.sections[0];
        assert_eq!(s.metrics.rows.len(), 3 * 3);
        assert_eq!(s.mated_pairs, 6 * 2);
        assert_eq!(s.nonmated_pairs, 6 * 2 * 5);
        assert_eq!(rep.records.len(), 3 * 6);
        assert_eq!(s.nm, 72);
        assert_eq!(s.field_order, 128);
    }

    #[test]
    fn self_probes_never_fail() {
        // Probing each reference with itself: every decoder must succeed
        // once k is at most the smallest reference set.
        let (train, mut eval, mut cfg) = small_experiment();
        let samples: Vec<_> = eval
            .samples()
            .iter()
            .map(|s| {
                let mut s = s.clone();
                if s.sample_id != "0" {
                    let reference = eval
                        .samples()
                        .iter()
                        .find(|r| r.subject_id == s.subject_id && r.sample_id == "0")
                        .unwrap();
                    s.values = reference.values.clone();
                }
                s
            })
            .collect();
        eval = Dataset::new(samples, eval.role()).unwrap();
        cfg.k = vec![4, 8];
        let rep = run_vault_benchmark(&train, &eval, &cfg).unwrap();
        assert!(rep.sections[0].set_size.min >= 8);
        for r in &rep.sections[0].metrics.rows {
            assert_eq!(r.rates.fnmr, 0.0, "{r:?}");
        }
    }

    #[test]
    fn deterministic_and_seed_sensitive() {
        let (train, eval, cfg) = small_experiment();
        let a = run_vault_benchmark(&train, &eval, &cfg).unwrap();
        let b = run_vault_benchmark(&train, &eval, &ExperimentConfig { threads: Some(3), ..cfg.clone() }).unwrap();
        assert_eq!(a.to_tsv(), b.to_tsv().replace("\"threads\":3", "\"threads\":null"));
        assert_eq!(a.records, b.records);
        let c = run_vault_benchmark(&train, &eval, &ExperimentConfig { seed: 4, ..cfg }).unwrap();
        assert_ne!(a.records, c.records);
    }

    #[test]
    fn config_errors_before_trials() {
        let (train, eval, cfg) = small_experiment();
        let too_big = ExperimentConfig {
            k: vec![4, 73],
            ..cfg.clone()
        };
        assert!(matches!(run_vault_benchmark(&train, &eval, &too_big), Err(HarnessError::Config(_))));
        let boolean = ExperimentConfig {
            schemes: vec![BinarisationScheme::Boolean],
            ..cfg.clone()
        };
        assert!(run_vault_benchmark(&train, &eval, &boolean).is_err());
        assert!(matches!(run_vault_benchmark(&eval, &eval, &cfg), Err(HarnessError::Protocol(_))));
    }

    #[test]
    fn caps_and_pairing_rule() {
        let (train, eval, cfg) = small_experiment();
        let capped = ExperimentConfig {
            max_nonmated: Some(7),
            max_mated: Some(5),
            k: vec![4],
            ..cfg.clone()
        };
        let s = &run_vault_benchmark(&train, &eval, &capped).unwrap().sections[0];
        assert_eq!((s.mated_pairs, s.nonmated_pairs), (5, 7));
        let first = ExperimentConfig {
            pairing: NonMatedPairing::FirstProbeVsReferences,
            k: vec![4],
            ..cfg
        };
        let s = &run_vault_benchmark(&train, &eval, &first).unwrap().sections[0];
        assert_eq!(s.nonmated_pairs, 6 * 5);
    }

    #[test]
    fn toml_round_trip() {
        let (_, _, cfg) = small_experiment();
        let text = toml::to_string(&cfg).unwrap();
        assert_eq!(ExperimentConfig::from_toml(&text).unwrap(), cfg);
        let minimal = "intervals = [4]\nschemes = [\"lssc\"]\nk = [8]\n[[decoders]]\nstrategy = \"gs_list\"\nmultiplicity = 2\n";
        let c = ExperimentConfig::from_toml(minimal).unwrap();
        assert!(c.timing && c.protection.use_bijection);
        assert!(ExperimentConfig::from_toml("intervals = [4]\nbogus = 1\n").is_err());
    }

    #[test]
    fn set_size_stats() {
        let s = SetSizeStats::from_sizes(&[2, 4, 6], Some(4.0));
        assert_eq!((s.mean, s.sd, s.min, s.max), (4.0, 2.0, 2, 6));
        assert_eq!(expected_set_size(512, 4, BinarisationScheme::Lssc), 768.0);
        assert_eq!(expected_set_size(512, 4, BinarisationScheme::OneHot), 512.0);
        assert_eq!(expected_set_size(512, 4, BinarisationScheme::Brgc), 512.0);
    }
}
