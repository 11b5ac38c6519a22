//! Real vector -> quantised vector -> binary vector -> feature set.

mod binarise;
mod model_io;
mod quantiser;

pub use binarise::{
    binarise, hamming_score, to_feature_set, BinarisationScheme, BinaryVector, FeatureSet,
};
pub use model_io::{MODEL_BIT_CONVENTION, MODEL_FORMAT_VERSION};
pub use quantiser::{
    fit_quantiser, quantise, quantise_values, FitOptions, QuantisationScheme, QuantisedVector,
    QuantiserModel, RangeSpec, MAX_INTERVALS,
};

pub(crate) use quantiser::check_intervals;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PipelineError {
    #[error("interval count {0} must be a power of two in 2..=128")]
    BadIntervalCount(u16),
    #[error("need at least {need} training samples, have {have}")]
    InsufficientTraining { have: usize, need: usize },
    #[error("element {0} is constant over the training data")]
    DegenerateElement(usize),
    #[error("feature vectors must not be empty")]
    EmptyVector,
    #[error("vector length {got} does not match expected {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("training row {row} has a non-finite value at element {element}")]
    NonFinite { row: usize, element: usize },
    #[error("NaN at element {element}")]
    NaN { element: usize },
    #[error("invalid quantisation range [{lo}, {hi}]")]
    BadRange { lo: f64, hi: f64 },
    #[error("interval index {index} outside [0, {d})")]
    IndexOutOfRange { index: u16, d: u16 },
    #[error("boolean binarisation needs d = 2, got {0}")]
    BooleanNeedsTwoIntervals(u16),
    #[error("binary vectors differ in length or encoding ({left} vs {right} bits)")]
    BinaryMismatch { left: usize, right: usize },
    #[error("unknown name `{0}`")]
    UnknownName(String),
    #[error("quantiser model document: {0}")]
    Model(String),
}

/// One fixed-length real-valued feature vector with its labels.
#[derive(Clone, Debug, PartialEq)]
pub struct RealFeatureVector {
    pub subject_id: String,
    pub sample_id: String,
    pub values: Vec<f64>,
}

impl RealFeatureVector {
    pub fn new(subject_id: impl Into<String>, sample_id: impl Into<String>, values: Vec<f64>) -> Self {
        RealFeatureVector {
            subject_id: subject_id.into(),
            sample_id: sample_id.into(),
            values,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// A fitted quantiser paired with a binarisation scheme: the full mapping
/// from a real vector to a feature set.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureTransform {
    pub model: QuantiserModel,
    pub scheme: BinarisationScheme,
}

impl FeatureTransform {
    pub fn new(model: QuantiserModel, scheme: BinarisationScheme) -> Result<Self, PipelineError> {
        scheme.bits_per_element(model.intervals())?;
        Ok(FeatureTransform { model, scheme })
    }

    /// Bits per element m.
    pub fn bits_per_element(&self) -> usize {
        self.scheme
            .bits_per_element(self.model.intervals())
            .expect("validated at construction")
    }

    /// Length of the binary vector, n*m.
    pub fn universe(&self) -> usize {
        self.model.len() * self.bits_per_element()
    }

    pub fn binary(&self, values: &[f64]) -> Result<BinaryVector, PipelineError> {
        binarise(&quantise_values(&self.model, values)?, self.scheme)
    }

    pub fn feature_set(&self, values: &[f64]) -> Result<FeatureSet, PipelineError> {
        Ok(to_feature_set(&self.binary(values)?))
    }
}
