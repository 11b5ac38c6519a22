//! Text persistence for [`QuantiserModel`].
//!
//! The document is TOML:
//!
//! ```toml
//! format_version = 1
//! bit_convention = "element-major-lsb0"
//! scheme = "equal_probable"
//! d = 4
//! n = 2
//! thresholds = [[-0.1, 0.0, 0.1], [-0.2, 0.0, 0.2]]
//! ```
//!
//! `range = [lo, hi]` is present for equal-size models. Collapsed thresholds
//! of degenerate elements are written as `inf`.

use serde::{Deserialize, Serialize};

use super::{check_intervals, PipelineError, QuantisationScheme, QuantiserModel};

pub const MODEL_FORMAT_VERSION: u32 = 1;
/// Element i occupies bits i*m..i*m+m-1 of the binary vector, with bit
/// i*m + b holding bit b (least significant first) of its code.
pub const MODEL_BIT_CONVENTION: &str = "element-major-lsb0";

#[derive(Serialize, Deserialize)]
struct ModelDoc {
    format_version: u32,
    bit_convention: String,
    scheme: QuantisationScheme,
    d: u16,
    n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    range: Option<[f64; 2]>,
    thresholds: Vec<Vec<f64>>,
}

impl QuantiserModel {
    pub fn to_document(&self) -> String {
        let doc = ModelDoc {
            format_version: MODEL_FORMAT_VERSION,
            bit_convention: MODEL_BIT_CONVENTION.to_string(),
            scheme: self.scheme,
            d: self.d,
            n: self.thresholds.len(),
            range: self.range.map(|(lo, hi)| [lo, hi]),
            thresholds: self.thresholds.clone(),
        };
        toml::to_string(&doc).expect("model serializes")
    }

    pub fn from_document(text: &str) -> Result<Self, PipelineError> {
        let doc: ModelDoc =
            toml::from_str(text).map_err(|e| PipelineError::Model(e.to_string()))?;
        if doc.format_version != MODEL_FORMAT_VERSION {
            return Err(PipelineError::Model(format!(
                "unsupported format_version {}",
                doc.format_version
            )));
        }
        if doc.bit_convention != MODEL_BIT_CONVENTION {
            return Err(PipelineError::Model(format!(
                "unsupported bit_convention `{}`",
                doc.bit_convention
            )));
        }
        check_intervals(doc.d)?;
        if doc.thresholds.len() != doc.n || doc.n == 0 {
            return Err(PipelineError::Model(format!(
                "expected {} threshold rows, found {}",
                doc.n,
                doc.thresholds.len()
            )));
        }
        for (i, row) in doc.thresholds.iter().enumerate() {
            if row.len() != doc.d as usize - 1 {
                return Err(PipelineError::Model(format!(
                    "element {i}: expected {} thresholds, found {}",
                    doc.d - 1,
                    row.len()
                )));
            }
            if row.iter().any(|t| t.is_nan()) || row.windows(2).any(|w| w[0] > w[1]) {
                return Err(PipelineError::Model(format!(
                    "element {i}: thresholds must be ascending"
                )));
            }
        }
        Ok(QuantiserModel {
            scheme: doc.scheme,
            d: doc.d,
            range: doc.range.map(|[lo, hi]| (lo, hi)),
            thresholds: doc.thresholds,
        })
    }
}
