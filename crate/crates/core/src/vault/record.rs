//! Binary record layout (little-endian):
//!
//! | offset | size | field |
//! |---|---|---|
//! | 0 | 4 | magic `FFV1` |
//! | 4 | 1 | version = 1 |
//! | 5 | 1 | e |
//! | 6 | 2 | n |
//! | 8 | 2 | m |
//! | 10 | 1 | d |
//! | 11 | 1 | scheme code |
//! | 12 | 2 | k |
//! | 14 | 4 | coefficient count = nm + 1 |
//! | 18 | 2 each | coefficients of V, low degree first, each < 2^e |
//! | .. | 32 | key hash |
//!
//! Anything else, including trailing bytes, is rejected.

use thiserror::Error;

use super::{VaultError, VaultParams, VaultRecord};
use crate::feature_pipeline::BinarisationScheme;
use crate::gf2e::{FieldElement, Poly};

pub const RECORD_MAGIC: &[u8; 4] = b"FFV1";
pub const RECORD_VERSION: u8 = 1;
const HEADER_LEN: usize = 18;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatErrorKind {
    #[error("bad magic")]
    Magic,
    #[error("unsupported version {0}")]
    Version(u8),
    #[error("buffer ends early, need {needed} bytes")]
    Truncated { needed: usize },
    #[error("{0} trailing bytes")]
    Trailing(usize),
    #[error("unknown binarisation scheme code {0}")]
    Scheme(u8),
    #[error("inconsistent header: {0}")]
    Header(String),
    #[error("coefficient {0:#x} outside the field")]
    Coefficient(u16),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed vault record at byte {offset}: {kind}")]
pub struct FormatError {
    pub offset: usize,
    pub kind: FormatErrorKind,
}

fn err(offset: usize, kind: FormatErrorKind) -> VaultError {
    VaultError::Format(FormatError { offset, kind })
}

pub fn serialize_record(record: &VaultRecord) -> Vec<u8> {
    let p = &record.params;
    let count = p.universe() + 1;
    let mut out = Vec::with_capacity(HEADER_LEN + 2 * count + 32);
    out.extend_from_slice(RECORD_MAGIC);
    out.push(RECORD_VERSION);
    out.push(p.field.degree());
    out.extend_from_slice(&p.n.to_le_bytes());
    out.extend_from_slice(&p.m.to_le_bytes());
    out.push(p.d as u8);
    out.push(p.scheme.code());
    out.extend_from_slice(&p.k.to_le_bytes());
    out.extend_from_slice(&(count as u32).to_le_bytes());
    for i in 0..count {
        out.extend_from_slice(&record.vault.coeff(i).value().to_le_bytes());
    }
    out.extend_from_slice(&record.key_hash);
    out
}

pub fn deserialize_record(bytes: &[u8]) -> Result<VaultRecord, VaultError> {
    if bytes.len() < HEADER_LEN {
        return Err(err(bytes.len(), FormatErrorKind::Truncated { needed: HEADER_LEN }));
    }
    let u16_at = |o: usize| u16::from_le_bytes([bytes[o], bytes[o + 1]]);
    if &bytes[0..4] != RECORD_MAGIC {
        return Err(err(0, FormatErrorKind::Magic));
    }
    if bytes[4] != RECORD_VERSION {
        return Err(err(4, FormatErrorKind::Version(bytes[4])));
    }
    let e = bytes[5];
    let n = u16_at(6);
    let m = u16_at(8);
    let d = bytes[10] as u16;
    let scheme = BinarisationScheme::from_code(bytes[11])
        .ok_or_else(|| err(11, FormatErrorKind::Scheme(bytes[11])))?;
    let k = u16_at(12);
    let count = u32::from_le_bytes([bytes[14], bytes[15], bytes[16], bytes[17]]) as usize;

    let params = VaultParams::new(n, d, scheme, k).map_err(|e| err(6, FormatErrorKind::Header(e.to_string())))?;
    if params.m != m {
        return Err(err(8, FormatErrorKind::Header(format!("m = {m}, expected {}", params.m))));
    }
    if params.field.degree() != e {
        return Err(err(
            5,
            FormatErrorKind::Header(format!("e = {e}, expected {}", params.field.degree())),
        ));
    }
    if count != params.universe() + 1 {
        return Err(err(
            14,
            FormatErrorKind::Header(format!("coefficient count {count}, expected {}", params.universe() + 1)),
        ));
    }
    let total = HEADER_LEN + 2 * count + 32;
    if bytes.len() < total {
        return Err(err(bytes.len(), FormatErrorKind::Truncated { needed: total }));
    }
    if bytes.len() > total {
        return Err(err(total, FormatErrorKind::Trailing(bytes.len() - total)));
    }
    let order = params.field.order();
    let mut coeffs = Vec::with_capacity(count);
    for i in 0..count {
        let o = HEADER_LEN + 2 * i;
        let c = u16_at(o);
        if c as usize >= order {
            return Err(err(o, FormatErrorKind::Coefficient(c)));
        }
        coeffs.push(FieldElement::new(c));
    }
    let mut key_hash = [0u8; 32];
    key_hash.copy_from_slice(&bytes[total - 32..]);
    Ok(VaultRecord {
        params,
        vault: Poly::from_coeffs(coeffs),
        key_hash,
    })
}
