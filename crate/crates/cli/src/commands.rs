use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use fuzzy_vault::decoders::{self, DecoderConfig, KeyCheck, Strategy, SubsetSize};
use fuzzy_vault::feature_pipeline::{
    fit_quantiser, BinarisationScheme, FeatureTransform, FitOptions, QuantisationScheme, QuantiserModel,
    RangeSpec, RealFeatureVector,
};
use fuzzy_vault::harness::{
    export_features, generate_synthetic, ingest_features, run_binarisation_benchmark, run_vault_benchmark,
    BinarisationGrid, Dataset, ExperimentConfig, HarnessError, SynthConfig,
};
use fuzzy_vault::security::{
    bfs_floor, correlation_attack, fas_bits, linkage_probability, linkage_probability_f64, log2_rational, SecurityError,
};
use fuzzy_vault::vault::{
    bind_with, deserialize_record, serialize_record, unlock_set_with, BindOptions, VaultError, VaultParams,
    VaultRecord,
};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use super::*;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
    NoMatch,
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::NoMatch => 1,
            CliError::Usage(_) => 2,
            CliError::Data(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage: {m}"),
            CliError::Data(m) => f.write_str(m),
            CliError::NoMatch => f.write_str("no match"),
        }
    }
}

macro_rules! data_errors {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Data(e.to_string())
            }
        }
    )*};
}
data_errors!(HarnessError, VaultError, SecurityError, decoders::DecodeError, fuzzy_vault::feature_pipeline::PipelineError);

type Result<T> = std::result::Result<T, CliError>;

fn usage(m: impl Into<String>) -> CliError {
    CliError::Usage(m.into())
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, bytes: impl AsRef<[u8]>) -> Result<()> {
    fs::write(path, bytes).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn parse_toml<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    toml::from_str(&read_text(path)?).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

fn parse_scheme(s: &str) -> Result<BinarisationScheme> {
    s.parse().map_err(|_| usage(format!("unknown binarisation scheme `{s}`")))
}

fn parse_quantisation(s: &str) -> Result<QuantisationScheme> {
    s.parse().map_err(|_| usage(format!("unknown quantisation `{s}`")))
}

fn load_model(path: &Path) -> Result<QuantiserModel> {
    QuantiserModel::from_document(&read_text(path)?).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn load_record(path: &Path) -> Result<VaultRecord> {
    let bytes = fs::read(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    deserialize_record(&bytes).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn select(sel: &SampleSel) -> Result<RealFeatureVector> {
    let data = ingest_features(&sel.input)?;
    data.samples()
        .iter()
        .find(|s| s.subject_id == sel.subject && sel.sample.as_ref().is_none_or(|id| &s.sample_id == id))
        .cloned()
        .ok_or_else(|| {
            CliError::Data(format!(
                "{}: no sample for subject `{}`{}",
                sel.input.display(),
                sel.subject,
                sel.sample.as_ref().map(|s| format!(" with sample id `{s}`")).unwrap_or_default()
            ))
        })
}

fn load_pair(data: &DataArgs, synthetic: Option<&SynthConfig>) -> Result<(Dataset, Dataset)> {
    match (&data.train, &data.eval, synthetic) {
        (Some(t), Some(e), _) => Ok((ingest_features(t)?, ingest_features(e)?)),
        (None, None, Some(s)) => Ok(generate_synthetic(s)?),
        _ => Err(usage("give --train and --eval, or a synthetic data source")),
    }
}

pub fn synth(a: SynthArgs) -> Result<()> {
    let mut cfg: SynthConfig = match &a.config {
        Some(p) => parse_toml(p)?,
        None => SynthConfig::default(),
    };
    macro_rules! set {
        ($($field:ident = $flag:ident),*) => {$( if let Some(v) = a.$flag { cfg.$field = v; } )*};
    }
    set!(n = n, subjects = subjects, samples_per_subject = samples, sigma_within = sigma_within,
        sigma_between = sigma_between, seed = seed);
    if a.train_subjects.is_some() {
        cfg.train_subjects = a.train_subjects;
    }
    cfg.validate().map_err(|e| usage(e.to_string()))?;
    let (train, eval) = generate_synthetic(&cfg)?;
    export_features(&train, &a.train_out)?;
    export_features(&eval, &a.eval_out)?;
    println!("train\t{}\t{} samples", a.train_out.display(), train.len());
    println!("eval\t{}\t{} samples", a.eval_out.display(), eval.len());
    Ok(())
}

pub fn fit(a: FitArgs) -> Result<()> {
    let q = parse_quantisation(&a.quantisation)?;
    let range = match (&a.range, a.range_from_training) {
        (Some(r), _) => RangeSpec::Fixed { lo: r[0], hi: r[1] },
        (None, true) => RangeSpec::FromTraining,
        (None, false) => RangeSpec::default(),
    };
    let data = ingest_features(&a.train)?;
    data.check_trainable()?;
    let opts = FitOptions {
        range,
        allow_degenerate: a.allow_degenerate,
    };
    let model = fit_quantiser(data.samples(), a.d, q, &opts)?;
    write_file(&a.out, model.to_document())?;
    println!("model\t{}\tn={}\td={}\t{}", a.out.display(), model.len(), a.d, q.name());
    Ok(())
}

pub fn transform(a: TransformArgs) -> Result<()> {
    let t = FeatureTransform::new(load_model(&a.model)?, parse_scheme(&a.scheme)?)?;
    let data = ingest_features(&a.input)?;
    let mut out = String::new();
    for s in data.samples() {
        if a.binary {
            let b = t.binary(&s.values)?;
            let bits: String = (0..b.len()).map(|i| if b.get(i) { '1' } else { '0' }).collect();
            let _ = writeln!(out, "{}\t{}\t{bits}", s.subject_id, s.sample_id);
        } else {
            let set = t.feature_set(&s.values)?;
            let elems: Vec<String> = set.elements().iter().map(u32::to_string).collect();
            let _ = writeln!(out, "{}\t{}\t{}\t{}", s.subject_id, s.sample_id, set.len(), elems.join(" "));
        }
    }
    match &a.out {
        Some(p) => write_file(p, out),
        None => {
            print!("{out}");
            Ok(())
        }
    }
}

pub fn enroll(a: EnrollArgs) -> Result<()> {
    let t = FeatureTransform::new(load_model(&a.model)?, parse_scheme(&a.scheme)?)?;
    let params = VaultParams::for_transform(&t, a.k).map_err(|e| usage(e.to_string()))?;
    let sample = select(&a.sel)?;
    let set = t.feature_set(&sample.values)?;
    let opts = BindOptions {
        use_bijection: !a.no_bijection,
        hide_degree: !a.no_degree_hiding,
        salt: a.salt.into_bytes(),
    };
    let mut rng = match a.seed {
        Some(s) => ChaCha20Rng::seed_from_u64(s),
        None => ChaCha20Rng::from_os_rng(),
    };
    let (record, _) = bind_with(&set, &params, &opts, &mut rng)?;
    write_file(&a.out, serialize_record(&record))?;
    println!("record\t{}", a.out.display());
    println!("set_size\t{}", set.len());
    println!("universe\t{}", params.universe());
    println!("key_hash\t{}", hex(record.key_hash()));
    Ok(())
}

pub fn verify(a: VerifyArgs) -> Result<()> {
    let record = load_record(&a.record)?;
    let p = record.params();
    let model = load_model(&a.model)?;
    if model.len() != p.n() as usize || model.intervals() != p.d() {
        return Err(CliError::Data(format!(
            "model (n={}, d={}) does not match the record (n={}, d={})",
            model.len(),
            model.intervals(),
            p.n(),
            p.d()
        )));
    }
    let t = FeatureTransform::new(model, p.scheme())?;
    let probe = t.feature_set(&select(&a.sel)?.values)?;
    let strategy: Strategy = a.decoder.parse().map_err(usage)?;
    let mut cfg = DecoderConfig::for_strategy(strategy);
    if let Some(s) = a.multiplicity {
        cfg.multiplicity = s;
    }
    if let Some(i) = a.iterations {
        cfg.max_iterations = i;
    }
    if let Some(c) = a.subset {
        cfg.subset = SubsetSize::Fixed(c);
    }
    cfg.seed = a.seed;
    cfg.salt = a.salt.into_bytes();
    let set = match unlock_set_with(&record, &probe, !a.no_bijection) {
        Ok(s) => s,
        Err(VaultError::EmptySet) => return Err(CliError::NoMatch),
        Err(e) => return Err(e.into()),
    };
    let check = KeyCheck::new(record.key_hash(), &cfg.salt);
    let out = decoders::decode(p.field(), &set, p.k() as usize, &check, &cfg).map_err(|e| usage(e.to_string()))?;
    println!("decoder\t{}", strategy.label());
    println!("iterations\t{}", out.iterations);
    match out.key {
        Some(key) => {
            println!("result\tmatch");
            println!("key_digest\t{}", hex(&key.digest(&cfg.salt)));
            Ok(())
        }
        None => {
            println!("result\tno match");
            Err(CliError::NoMatch)
        }
    }
}

pub fn bench_binarise(a: BenchBinariseArgs) -> Result<()> {
    let mut grid: BinarisationGrid = match &a.config {
        Some(p) => parse_toml(p)?,
        None => BinarisationGrid::default(),
    };
    if let Some(s) = &a.schemes {
        grid.schemes = s.iter().map(|x| parse_scheme(x)).collect::<Result<_>>()?;
    }
    if let Some(d) = &a.intervals {
        grid.intervals = d.clone();
    }
    if let Some(q) = &a.quantisations {
        grid.quantisations = q.iter().map(|x| parse_quantisation(x)).collect::<Result<_>>()?;
    }
    let synthetic: Option<SynthConfig> = a.synthetic.as_deref().map(parse_toml).transpose()?;
    let (train, eval) = load_pair(&a.data, synthetic.as_ref())?;
    let report = run_binarisation_benchmark(&train, &eval, &grid)?;
    if let Some(p) = &a.json {
        write_file(p, serde_json::to_string_pretty(&report).expect("report serializes"))?;
    }
    match &a.out {
        Some(p) => write_file(p, report.to_tsv()),
        None => {
            print!("{}", report.to_tsv());
            Ok(())
        }
    }
}

pub fn bench_vault(a: BenchVaultArgs) -> Result<()> {
    let mut cfg = ExperimentConfig::from_toml(&read_text(&a.config)?)
        .map_err(|e| CliError::Data(format!("{}: {e}", a.config.display())))?;
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    if a.no_timing {
        cfg.timing = false;
    }
    if a.threads.is_some() {
        cfg.threads = a.threads;
    }
    let (train, eval) = load_pair(&a.data, cfg.synthetic.as_ref())?;
    let report = run_vault_benchmark(&train, &eval, &cfg)?;
    let tsv = a.out.as_ref().or(cfg.output.tsv.as_ref());
    let json = a.json.as_ref().or(cfg.output.json.as_ref());
    if let Some(dir) = a.records_dir.as_ref().or(cfg.output.records_dir.as_ref()) {
        fs::create_dir_all(dir).map_err(|e| CliError::Data(format!("{}: {e}", dir.display())))?;
        for r in &report.records {
            write_file(&dir.join(&r.name), &r.bytes)?;
        }
    }
    if let Some(p) = json {
        write_file(p, report.to_json())?;
    }
    match tsv {
        Some(p) => write_file(p, report.to_tsv()),
        None => {
            print!("{}", report.to_tsv());
            Ok(())
        }
    }
}

pub fn security_report(a: SecurityArgs) -> Result<()> {
    let mut any = false;
    if let (Some(fmr), Some(l)) = (a.fmr, a.operations) {
        any = true;
        println!("fas_bits\t{:.4}", fas_bits(fmr, l).map_err(|e| usage(e.to_string()))?);
    }
    if let Some(k) = a.k {
        any = true;
        println!("bfs_bits\t{}", bfs_floor(k as u32));
    }
    if let (Some(rho), Some(p), Some(k)) = (a.rho, a.set_size, a.k) {
        any = true;
        let p2 = a.set_size2.unwrap_or(p);
        let prob = linkage_probability(rho, p, p2, k).map_err(|e| usage(e.to_string()))?;
        let approx = linkage_probability_f64(rho, p, p2, k).map_err(|e| usage(e.to_string()))?;
        println!("linkage_probability\t{approx:e}");
        println!("linkage_log2\t{:.3}", log2_rational(&prob));
    }
    if let Some(paths) = &a.correlate {
        any = true;
        let r1 = load_record(&paths[0])?;
        let r2 = load_record(&paths[1])?;
        let res = correlation_attack(&r1, &r2)?;
        println!("linked\t{}", res.linked);
        match res.common {
            Some(c) => println!("common_elements\t{}", c.len()),
            None => println!("common_elements\tNA"),
        }
    }
    if !any {
        return Err(usage("nothing to report; give --fmr/--operations, --rho/--set-size/--k or --correlate"));
    }
    Ok(())
}

pub fn record_inspect(a: InspectArgs) -> Result<()> {
    let bytes = fs::read(&a.record).map_err(|e| CliError::Data(format!("{}: {e}", a.record.display())))?;
    let record = deserialize_record(&bytes).map_err(|e| CliError::Data(format!("{}: {e}", a.record.display())))?;
    let p = record.params();
    let fields: Vec<(&str, String)> = vec![
        ("bytes", bytes.len().to_string()),
        ("field_degree", p.field().degree().to_string()),
        ("field_order", p.field().order().to_string()),
        ("n", p.n().to_string()),
        ("m", p.m().to_string()),
        ("d", p.d().to_string()),
        ("scheme", p.scheme().name().to_string()),
        ("k", p.k().to_string()),
        ("universe", p.universe().to_string()),
        ("vault_degree", record.vault().degree_or_neg().to_string()),
        ("key_hash", hex(record.key_hash())),
    ];
    if a.json {
        let map: serde_json::Map<String, serde_json::Value> =
            fields.into_iter().map(|(k, v)| (k.to_string(), serde_json::Value::String(v))).collect();
        println!("{}", serde_json::to_string_pretty(&map).expect("json"));
    } else {
        for (k, v) in fields {
            println!("{k}\t{v}");
        }
    }
    Ok(())
}
