use serde::{Deserialize, Serialize};

use super::{PipelineError, RealFeatureVector};

/// How interval boundaries are placed for each vector element.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuantisationScheme {
    /// Every interval holds the same share of the training population.
    EqualProbable,
    /// Intervals of equal width over a global range.
    EqualSize,
}

impl QuantisationScheme {
    pub const ALL: [QuantisationScheme; 2] =
        [QuantisationScheme::EqualProbable, QuantisationScheme::EqualSize];

    pub fn name(self) -> &'static str {
        match self {
            QuantisationScheme::EqualProbable => "equal_probable",
            QuantisationScheme::EqualSize => "equal_size",
        }
    }
}

impl std::str::FromStr for QuantisationScheme {
    type Err = PipelineError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.replace('-', "_").as_str() {
            "equal_probable" | "ep" => Ok(QuantisationScheme::EqualProbable),
            "equal_size" | "es" => Ok(QuantisationScheme::EqualSize),
            _ => Err(PipelineError::UnknownName(s.to_string())),
        }
    }
}

/// Range used by equal-size quantisation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RangeSpec {
    Fixed { lo: f64, hi: f64 },
    /// Global minimum and maximum over all training values.
    FromTraining,
}

impl Default for RangeSpec {
    fn default() -> Self {
        RangeSpec::Fixed { lo: -0.3, hi: 0.3 }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    #[serde(default)]
    pub range: RangeSpec,
    /// Constant training elements get thresholds at +inf (always interval 0)
    /// instead of failing the fit.
    #[serde(default)]
    pub allow_degenerate: bool,
}

/// Per-element interval boundaries learned from training data.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantiserModel {
    pub(super) scheme: QuantisationScheme,
    pub(super) d: u16,
    pub(super) range: Option<(f64, f64)>,
    pub(super) thresholds: Vec<Vec<f64>>,
}

pub const MAX_INTERVALS: u16 = 128;

pub(crate) fn check_intervals(d: u16) -> Result<(), PipelineError> {
    if !(2..=MAX_INTERVALS).contains(&d) || !d.is_power_of_two() {
        return Err(PipelineError::BadIntervalCount(d));
    }
    Ok(())
}

impl QuantiserModel {
    pub fn scheme(&self) -> QuantisationScheme {
        self.scheme
    }

    /// Number of intervals per element.
    pub fn intervals(&self) -> u16 {
        self.d
    }

    /// Vector length n.
    pub fn len(&self) -> usize {
        self.thresholds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.thresholds.is_empty()
    }

    pub fn range(&self) -> Option<(f64, f64)> {
        self.range
    }

    /// The d-1 non-decreasing thresholds of element `i`.
    pub fn thresholds(&self, i: usize) -> &[f64] {
        &self.thresholds[i]
    }

    /// Interval index of a single value for element `i`: the number of
    /// thresholds at or below the value, so ties go to the right-hand
    /// interval and out-of-range values clamp to the outer intervals.
    pub fn interval_of(&self, i: usize, value: f64) -> u16 {
        self.thresholds[i].partition_point(|&t| t <= value) as u16
    }
}

/// Learns a quantiser with `d` intervals per element.
pub fn fit_quantiser(
    training: &[RealFeatureVector],
    d: u16,
    scheme: QuantisationScheme,
    opts: &FitOptions,
) -> Result<QuantiserModel, PipelineError> {
    check_intervals(d)?;
    if training.len() < d as usize {
        return Err(PipelineError::InsufficientTraining {
            have: training.len(),
            need: d as usize,
        });
    }
    let n = training[0].values.len();
    if n == 0 {
        return Err(PipelineError::EmptyVector);
    }
    for (row, v) in training.iter().enumerate() {
        if v.values.len() != n {
            return Err(PipelineError::LengthMismatch {
                expected: n,
                got: v.values.len(),
            });
        }
        if let Some(i) = v.values.iter().position(|x| !x.is_finite()) {
            return Err(PipelineError::NonFinite { row, element: i });
        }
    }

    let column = |i: usize| -> Vec<f64> { training.iter().map(|v| v.values[i]).collect() };
    let mut thresholds = Vec::with_capacity(n);
    let mut range = None;
    match scheme {
        QuantisationScheme::EqualProbable => {
            for i in 0..n {
                let mut col = column(i);
                col.sort_by(f64::total_cmp);
                if col[0] == col[col.len() - 1] {
                    if opts.allow_degenerate {
                        thresholds.push(vec![f64::INFINITY; d as usize - 1]);
                        continue;
                    }
                    return Err(PipelineError::DegenerateElement(i));
                }
                thresholds.push(quantile_thresholds(&col, d));
            }
        }
        QuantisationScheme::EqualSize => {
            let (lo, hi) = match opts.range {
                RangeSpec::Fixed { lo, hi } => (lo, hi),
                RangeSpec::FromTraining => training
                    .iter()
                    .flat_map(|v| v.values.iter().copied())
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| {
                        (lo.min(x), hi.max(x))
                    }),
            };
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(PipelineError::BadRange { lo, hi });
            }
            let row = even_thresholds(lo, hi, d);
            thresholds = vec![row; n];
            range = Some((lo, hi));
        }
    }
    Ok(QuantiserModel {
        scheme,
        d,
        range,
        thresholds,
    })
}

/// Thresholds at the j/d quantiles of a sorted sample: the midpoint of the
/// two order statistics on either side of position ceil(N*j/d).
fn quantile_thresholds(sorted: &[f64], d: u16) -> Vec<f64> {
    let n = sorted.len();
    (1..d as usize)
        .map(|j| {
            let p = (n * j).div_ceil(d as usize).clamp(1, n - 1);
            0.5 * (sorted[p - 1] + sorted[p])
        })
        .collect()
}

fn even_thresholds(lo: f64, hi: f64, d: u16) -> Vec<f64> {
    let d = d as f64;
    (1..d as usize)
        .map(|j| {
            let j = j as f64;
            (lo * (d - j) + hi * j) / d
        })
        .collect()
}

/// Interval indices of one vector, each in [0, d).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuantisedVector {
    pub(super) values: Vec<u16>,
    pub(super) d: u16,
}

impl QuantisedVector {
    pub fn new(values: Vec<u16>, d: u16) -> Result<Self, PipelineError> {
        check_intervals(d)?;
        if let Some(&v) = values.iter().find(|&&v| v >= d) {
            return Err(PipelineError::IndexOutOfRange { index: v, d });
        }
        Ok(QuantisedVector { values, d })
    }

    pub fn values(&self) -> &[u16] {
        &self.values
    }

    pub fn intervals(&self) -> u16 {
        self.d
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

pub fn quantise(
    model: &QuantiserModel,
    v: &RealFeatureVector,
) -> Result<QuantisedVector, PipelineError> {
    quantise_values(model, &v.values)
}

pub fn quantise_values(
    model: &QuantiserModel,
    values: &[f64],
) -> Result<QuantisedVector, PipelineError> {
    if values.len() != model.len() {
        return Err(PipelineError::LengthMismatch {
            expected: model.len(),
            got: values.len(),
        });
    }
    let out = values
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            if x.is_nan() {
                Err(PipelineError::NaN { element: i })
            } else {
                Ok(model.interval_of(i, x))
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(QuantisedVector {
        values: out,
        d: model.d,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn vecs(rows: &[&[f64]]) -> Vec<RealFeatureVector> {
        rows.iter()
            .enumerate()
            .map(|(i, r)| RealFeatureVector::new(i.to_string(), "0", r.to_vec()))
            .collect()
    }

    fn uniform_set(rng: &mut ChaCha8Rng, count: usize, n: usize) -> Vec<RealFeatureVector> {
        (0..count)
            .map(|i| {
                RealFeatureVector::new(
                    i.to_string(),
                    "0",
                    (0..n).map(|_| rng.random::<f64>()).collect(),
                )
            })
            .collect()
    }

    #[test]
    fn equal_probable_median_of_one_to_eight() {
        let rows: Vec<Vec<f64>> = (1..=8).map(|v| vec![v as f64]).collect();
        let refs: Vec<&[f64]> = rows.iter().map(|r| r.as_slice()).collect();
        let m = fit_quantiser(&vecs(&refs), 2, QuantisationScheme::EqualProbable, &Default::default())
            .unwrap();
        assert_eq!(m.thresholds(0), &[4.5]);
    }

    #[test]
    fn equal_size_default_range() {
        let train = vecs(&[&[0.0], &[0.1], &[0.2], &[0.3]]);
        let m = fit_quantiser(&train, 4, QuantisationScheme::EqualSize, &Default::default()).unwrap();
        let t = m.thresholds(0);
        assert_eq!(t.len(), 3);
        for (a, b) in t.iter().zip([-0.15, 0.0, 0.15]) {
            assert!((a - b).abs() < 1e-15, "{a} vs {b}");
        }
        assert_eq!(m.range(), Some((-0.3, 0.3)));
    }

    #[test]
    fn equal_size_from_training_range() {
        let train = vecs(&[&[-1.0, 0.0], &[0.0, 3.0]]);
        let opts = FitOptions {
            range: RangeSpec::FromTraining,
            ..Default::default()
        };
        let m = fit_quantiser(&train, 2, QuantisationScheme::EqualSize, &opts).unwrap();
        assert_eq!(m.thresholds(1), &[1.0]);
    }

    #[test]
    fn fit_errors() {
        let train = vecs(&[&[1.0, 2.0], &[1.0, 3.0]]);
        assert_eq!(
            fit_quantiser(&train, 4, QuantisationScheme::EqualProbable, &Default::default()),
            Err(PipelineError::InsufficientTraining { have: 2, need: 4 })
        );
        assert_eq!(
            fit_quantiser(&train, 2, QuantisationScheme::EqualProbable, &Default::default()),
            Err(PipelineError::DegenerateElement(0))
        );
        assert!(matches!(
            fit_quantiser(&train, 3, QuantisationScheme::EqualSize, &Default::default()),
            Err(PipelineError::BadIntervalCount(3))
        ));
        let bad = vecs(&[&[1.0, f64::NAN], &[1.0, 3.0]]);
        assert_eq!(
            fit_quantiser(&bad, 2, QuantisationScheme::EqualSize, &Default::default()),
            Err(PipelineError::NonFinite { row: 0, element: 1 })
        );
    }

    #[test]
    fn degenerate_element_collapses_to_first_interval() {
        let train = vecs(&[&[1.0, 2.0], &[1.0, 3.0], &[1.0, 4.0], &[1.0, 5.0]]);
        let opts = FitOptions {
            allow_degenerate: true,
            ..Default::default()
        };
        let m = fit_quantiser(&train, 4, QuantisationScheme::EqualProbable, &opts).unwrap();
        for x in [-10.0, 1.0, 1e300] {
            let q = quantise_values(&m, &[x, 3.0]).unwrap();
            assert_eq!(q.values()[0], 0);
        }
    }

    #[test]
    fn clamping_and_tie_rule() {
        let train = vecs(&[&[0.0], &[0.1], &[0.2], &[0.3]]);
        let m = fit_quantiser(&train, 4, QuantisationScheme::EqualSize, &Default::default()).unwrap();
        assert_eq!(quantise_values(&m, &[-5.0]).unwrap().values(), &[0]);
        assert_eq!(quantise_values(&m, &[5.0]).unwrap().values(), &[3]);
        assert_eq!(quantise_values(&m, &[0.0]).unwrap().values(), &[2]);
        assert_eq!(
            quantise_values(&m, &[f64::NAN]),
            Err(PipelineError::NaN { element: 0 })
        );
        assert!(matches!(
            quantise_values(&m, &[0.0, 1.0]),
            Err(PipelineError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn monotone_per_element() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let train = uniform_set(&mut rng, 200, 3);
        for scheme in QuantisationScheme::ALL {
            let m = fit_quantiser(&train, 8, scheme, &Default::default()).unwrap();
            for _ in 0..2000 {
                let a: f64 = rng.random_range(-0.5..1.5);
                let b: f64 = rng.random_range(-0.5..1.5);
                let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
                for i in 0..3 {
                    assert!(m.interval_of(i, lo) <= m.interval_of(i, hi));
                }
            }
        }
    }

    #[test]
    fn equal_probable_flat_on_uniform_data() {
        // Held-out mass per interval within 2% (absolute) of 1/d.
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let train = uniform_set(&mut rng, 20_000, 4);
        let d = 4u16;
        let m = fit_quantiser(&train, d, QuantisationScheme::EqualProbable, &Default::default())
            .unwrap();
        let held_out = uniform_set(&mut rng, 20_000, 4);
        for i in 0..4 {
            let mut hist = [0usize; 4];
            for v in &held_out {
                hist[m.interval_of(i, v.values[i]) as usize] += 1;
            }
            for h in hist {
                let frac = h as f64 / held_out.len() as f64;
                assert!((frac - 0.25).abs() < 0.02, "element {i}: {frac}");
            }
        }
    }
}
