use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Dataset, HarnessError};
use crate::feature_pipeline::{
    fit_quantiser, hamming_score, BinarisationScheme, BinaryVector, FeatureTransform, FitOptions, QuantisationScheme,
};
use crate::security::{decidability, eer};

/// Schemes, interval counts and quantisers to compare. Boolean is only
/// evaluated at d = 2.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BinarisationGrid {
    pub schemes: Vec<BinarisationScheme>,
    pub intervals: Vec<u16>,
    pub quantisations: Vec<QuantisationScheme>,
    #[serde(default)]
    pub fit: FitOptions,
}

impl Default for BinarisationGrid {
    fn default() -> Self {
        BinarisationGrid {
            schemes: BinarisationScheme::ALL.to_vec(),
            intervals: vec![2, 4, 8, 16],
            quantisations: QuantisationScheme::ALL.to_vec(),
            fit: FitOptions::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BinarisationRow {
    /// Binarisation scheme name, or `euclidean` for the real-valued baseline.
    pub method: String,
    pub quantisation: Option<QuantisationScheme>,
    pub d: Option<u16>,
    /// Length of the compared vectors (bits, or n for the baseline).
    pub length: usize,
    pub eer: f64,
    pub dprime: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BinarisationReport {
    pub grid: BinarisationGrid,
    pub mated_pairs: usize,
    pub nonmated_pairs: usize,
    pub rows: Vec<BinarisationRow>,
}

impl BinarisationReport {
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# binarisation benchmark");
        let _ = writeln!(out, "# grid\t{}", serde_json::to_string(&self.grid).expect("grid serializes"));
        let _ = writeln!(out, "# pairs\tmated={}\tnonmated={}", self.mated_pairs, self.nonmated_pairs);
        out.push_str("method\tquantisation\td\tlength\teer_percent\tdprime\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{:.4}\t{:.4}",
                r.method,
                r.quantisation.map_or("NA", |q| q.name()),
                r.d.map_or("NA".to_string(), |d| d.to_string()),
                r.length,
                100.0 * r.eer,
                r.dprime
            );
        }
        out
    }
}

/// Mated pairs: every two samples of one subject. Non-mated: every two
/// samples of different subjects.
pub(crate) fn all_pairs(eval: &Dataset) -> (Vec<(usize, usize)>, Vec<(usize, usize)>) {
    let subject_of: Vec<&str> = eval.samples().iter().map(|s| s.subject_id.as_str()).collect();
    let n = subject_of.len();
    let mut mated = Vec::new();
    let mut nonmated = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if subject_of[i] == subject_of[j] {
                mated.push((i, j));
            } else {
                nonmated.push((i, j));
            }
        }
    }
    (mated, nonmated)
}

fn scores<F: Fn(usize, usize) -> f64 + Sync>(pairs: &[(usize, usize)], f: F) -> Vec<f64> {
    pairs.par_iter().map(|&(i, j)| f(i, j)).collect()
}

fn row(
    method: &str,
    q: Option<QuantisationScheme>,
    d: Option<u16>,
    length: usize,
    mated: &[f64],
    nonmated: &[f64],
) -> Result<BinarisationRow, HarnessError> {
    Ok(BinarisationRow {
        method: method.to_string(),
        quantisation: q,
        d,
        length,
        eer: eer(mated, nonmated)?,
        dprime: decidability(mated, nonmated)?,
    })
}

/// Fits each quantiser on `train`, scores `eval` by Hamming distance for
/// every grid cell and adds a Euclidean-distance row on the raw vectors.
pub fn run_binarisation_benchmark(
    train: &Dataset,
    eval: &Dataset,
    grid: &BinarisationGrid,
) -> Result<BinarisationReport, HarnessError> {
    train.check_trainable()?;
    eval.check_evaluable()?;
    if train.dim() != eval.dim() {
        return Err(HarnessError::Config(format!(
            "training vectors have {} elements, evaluation vectors {}",
            train.dim(),
            eval.dim()
        )));
    }
    if grid.schemes.is_empty() || grid.intervals.is_empty() || grid.quantisations.is_empty() {
        return Err(HarnessError::Config("binarisation grid has an empty axis".into()));
    }
    if grid.schemes.contains(&BinarisationScheme::Boolean) && !grid.intervals.contains(&2) {
        return Err(HarnessError::Config("boolean binarisation needs d = 2 in the grid".into()));
    }
    let (mated, nonmated) = all_pairs(eval);
    if nonmated.is_empty() {
        return Err(HarnessError::Config("evaluation data has a single subject".into()));
    }

    let x = eval.samples();
    let euclid = |i: usize, j: usize| {
        x[i].values
            .iter()
            .zip(&x[j].values)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    };
    let mut rows = vec![row(
        "euclidean",
        None,
        None,
        eval.dim(),
        &scores(&mated, euclid),
        &scores(&nonmated, euclid),
    )?];

    for &q in &grid.quantisations {
        for &d in &grid.intervals {
            let model = fit_quantiser(train.samples(), d, q, &grid.fit)?;
            for &scheme in &grid.schemes {
                if scheme == BinarisationScheme::Boolean && d != 2 {
                    continue;
                }
                let t = FeatureTransform::new(model.clone(), scheme)?;
                let bins: Vec<BinaryVector> = x
                    .par_iter()
                    .map(|s| t.binary(&s.values))
                    .collect::<Result<_, _>>()?;
                let ham = |i: usize, j: usize| hamming_score(&bins[i], &bins[j]).expect("same encoding") as f64;
                rows.push(row(
                    scheme.name(),
                    Some(q),
                    Some(d),
                    t.universe(),
                    &scores(&mated, ham),
                    &scores(&nonmated, ham),
                )?);
            }
        }
    }
    Ok(BinarisationReport {
        grid: grid.clone(),
        mated_pairs: mated.len(),
        nonmated_pairs: nonmated.len(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{generate_synthetic, SynthConfig};

    fn data(sigma_within: f64) -> (Dataset, Dataset) {
        generate_synthetic(&SynthConfig {
            n: 32,
            subjects: 12,
            train_subjects: Some(60),
            samples_per_subject: 3,
            sigma_within,
            sigma_between: 1.0,
            seed: 5,
        })
        .unwrap()
    }

    #[test]
    fn noiseless_data_separates_perfectly() {
        let (train, eval) = data(0.0);
        let rep = run_binarisation_benchmark(&train, &eval, &BinarisationGrid::default()).unwrap();
        assert_eq!(rep.rows[0].method, "euclidean");
        // baseline + boolean + 4 schemes x 4 d, for both quantisers
        assert_eq!(rep.rows.len(), 1 + 2 * (1 + 4 * 4));
        for r in &rep.rows {
            assert_eq!(r.eer, 0.0, "{r:?}");
        }
        assert_eq!(rep.mated_pairs, 12 * 3);
        assert_eq!(rep.nonmated_pairs, 36 * 35 / 2 - 36);
        assert_eq!(rep.to_tsv().lines().filter(|l| !l.starts_with('#')).count(), rep.rows.len() + 1);
    }

    #[test]
    fn overwhelming_noise_gives_chance_eer() {
        let (train, eval) = data(50.0);
        let grid = BinarisationGrid {
            schemes: vec![BinarisationScheme::Lssc],
            intervals: vec![4],
            quantisations: vec![QuantisationScheme::EqualProbable],
            fit: FitOptions::default(),
        };
        let rep = run_binarisation_benchmark(&train, &eval, &grid).unwrap();
        for r in &rep.rows {
            assert!((r.eer - 0.5).abs() < 0.15, "{r:?}");
        }
    }

    #[test]
    fn grid_and_protocol_errors() {
        let (train, eval) = data(0.1);
        let grid = BinarisationGrid {
            intervals: vec![4],
            ..Default::default()
        };
        assert!(matches!(run_binarisation_benchmark(&train, &eval, &grid), Err(HarnessError::Config(_))));
        assert!(matches!(
            run_binarisation_benchmark(&eval, &eval, &BinarisationGrid::default()),
            Err(HarnessError::Protocol(_))
        ));
    }
}
