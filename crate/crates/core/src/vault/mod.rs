//! Key binding and retrieval.
//!
//! Binding draws a random secret polynomial κ with k coefficients, commits
//! to it with `key_hash = SHA-256(salt || κ)` and derives a record-specific
//! permutation σ of the field from that hash. The enrolment set P is mapped
//! through σ and locked as
//!
//! ```text
//! V(X) = κ(X) + Q(X) · ∏_{v ∈ σ(P)} (X − v)
//! ```
//!
//! where Q has no roots and degree nm − |P|, so deg V = nm regardless of the
//! set size. A probe set U unlocks the pairs (σ(x), V(σ(x))); those with
//! x ∈ P lie on κ.

mod bijection;
mod record;

pub use bijection::{derive_bijection, Bijection};
pub use record::{deserialize_record, serialize_record, FormatError, FormatErrorKind, RECORD_MAGIC, RECORD_VERSION};

use rand::Rng;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::decoders::{self, DecodeError, DecodeOutcome, DecoderConfig, KeyCheck};
use crate::feature_pipeline::{BinarisationScheme, FeatureSet, FeatureTransform, PipelineError};
use crate::gf2e::{extension_degree_for, poly_from_roots, sample_rootless_poly, Field, FieldElement, FieldError, Poly};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VaultError {
    #[error("feature set is empty")]
    EmptySet,
    #[error("feature element {element} outside the universe [0, {universe})")]
    ElementOutOfRange { element: u32, universe: usize },
    #[error("invalid vault parameters: {0}")]
    InvalidParams(String),
    #[error("cannot hide the degree of a set of size {t} in universe {universe}: no rootless polynomial of degree 1 exists")]
    DegreeHidingUnavailable { t: usize, universe: usize },
    #[error("secret key has {got} coefficients, expected {expected}")]
    KeyLength { expected: usize, got: usize },
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error(transparent)]
    Decode(#[from] DecodeError),
}

/// Public parameters of a vault: feature layout, key length and field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VaultParams {
    n: u16,
    m: u16,
    d: u16,
    scheme: BinarisationScheme,
    k: u16,
    field: Field,
}

impl VaultParams {
    /// Parameters for `n` elements quantised into `d` intervals and encoded
    /// with `scheme`; the field is the smallest GF(2^e) with 2^e ≥ nm.
    pub fn new(n: u16, d: u16, scheme: BinarisationScheme, k: u16) -> Result<Self, VaultError> {
        if d > 128 {
            return Err(VaultError::InvalidParams(format!("d = {d} exceeds 128")));
        }
        let m = scheme.bits_per_element(d)?;
        let nm = n as usize * m;
        if n == 0 {
            return Err(VaultError::InvalidParams("n must be positive".into()));
        }
        if nm > 1 << 16 {
            return Err(VaultError::InvalidParams(format!("universe nm = {nm} exceeds 2^16")));
        }
        if k == 0 || k as usize > nm {
            return Err(VaultError::InvalidParams(format!("k = {k} must lie in 1..={nm}")));
        }
        let field = Field::new(extension_degree_for(nm))?;
        Ok(VaultParams {
            n,
            m: m as u16,
            d,
            scheme,
            k,
            field,
        })
    }

    pub fn for_transform(t: &FeatureTransform, k: u16) -> Result<Self, VaultError> {
        let n = u16::try_from(t.model.len())
            .map_err(|_| VaultError::InvalidParams("more than 65535 elements".into()))?;
        Self::new(n, t.model.intervals(), t.scheme, k)
    }

    /// Same layout with a different key length.
    pub fn with_k(&self, k: u16) -> Result<Self, VaultError> {
        Self::new(self.n, self.d, self.scheme, k)
    }

    pub fn n(&self) -> u16 {
        self.n
    }

    pub fn m(&self) -> u16 {
        self.m
    }

    pub fn d(&self) -> u16 {
        self.d
    }

    pub fn scheme(&self) -> BinarisationScheme {
        self.scheme
    }

    pub fn k(&self) -> u16 {
        self.k
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    /// Size nm of the feature universe, which is also deg V.
    pub fn universe(&self) -> usize {
        self.n as usize * self.m as usize
    }

    fn check_set(&self, set: &FeatureSet) -> Result<(), VaultError> {
        match set.max() {
            None => Err(VaultError::EmptySet),
            Some(x) if x as usize >= self.universe() => Err(VaultError::ElementOutOfRange {
                element: x,
                universe: self.universe(),
            }),
            Some(_) => Ok(()),
        }
    }
}

/// The secret polynomial κ, always exactly k coefficients (low degree first).
#[derive(Clone, PartialEq, Eq)]
pub struct SecretKey {
    coeffs: Vec<FieldElement>,
}

impl std::fmt::Debug for SecretKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "SecretKey({} coefficients)", self.coeffs.len())
    }
}

impl SecretKey {
    pub fn from_coeffs(coeffs: Vec<FieldElement>) -> Self {
        SecretKey { coeffs }
    }

    /// Pads a polynomial of degree < k to k coefficients.
    pub fn from_poly(p: &Poly, k: usize) -> Result<Self, VaultError> {
        if p.coeffs().len() > k {
            return Err(VaultError::KeyLength {
                expected: k,
                got: p.coeffs().len(),
            });
        }
        let mut coeffs = p.coeffs().to_vec();
        coeffs.resize(k, FieldElement::ZERO);
        Ok(SecretKey { coeffs })
    }

    pub fn random<R: Rng + ?Sized>(field: &Field, k: usize, rng: &mut R) -> Self {
        SecretKey {
            coeffs: (0..k).map(|_| field.random(rng)).collect(),
        }
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    pub fn k(&self) -> usize {
        self.coeffs.len()
    }

    pub fn to_poly(&self) -> Poly {
        Poly::from_coeffs(self.coeffs.clone())
    }

    pub fn digest(&self, salt: &[u8]) -> [u8; 32] {
        key_digest(&self.coeffs, salt)
    }

    /// Number of pairs lying on κ.
    pub fn agreement(&self, field: &Field, set: &UnlockingSet) -> usize {
        let p = self.to_poly();
        set.points
            .iter()
            .filter(|&&(x, y)| p.eval(field, x) == y)
            .count()
    }
}

/// SHA-256 over `salt` followed by each coefficient as a little-endian u16.
pub fn key_digest(coeffs: &[FieldElement], salt: &[u8]) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update(salt);
    for c in coeffs {
        h.update(c.value().to_le_bytes());
    }
    h.finalize().into()
}

/// Variants of the binding procedure. The default is the full construction;
/// the switches exist for attack studies.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BindOptions {
    /// Map the set through σ before locking.
    pub use_bijection: bool,
    /// Multiply by a rootless Q so that deg V = nm.
    pub hide_degree: bool,
    /// Prepended to κ before hashing.
    pub salt: Vec<u8>,
}

impl Default for BindOptions {
    fn default() -> Self {
        BindOptions {
            use_bijection: true,
            hide_degree: true,
            salt: Vec::new(),
        }
    }
}

impl BindOptions {
    pub fn with_salt(salt: impl Into<Vec<u8>>) -> Self {
        BindOptions {
            salt: salt.into(),
            ..Default::default()
        }
    }
}

/// A protected template: public parameters, V(X) and the key commitment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VaultRecord {
    params: VaultParams,
    vault: Poly,
    key_hash: [u8; 32],
}

impl VaultRecord {
    /// Assembles a record from its parts; deg V must not exceed nm.
    pub fn from_parts(params: VaultParams, vault: Poly, key_hash: [u8; 32]) -> Result<Self, VaultError> {
        if vault.degree_or_neg() > params.universe() as isize {
            return Err(VaultError::InvalidParams(format!(
                "vault polynomial degree {} exceeds nm = {}",
                vault.degree_or_neg(),
                params.universe()
            )));
        }
        if vault.coeffs().iter().any(|c| c.index() >= params.field.order()) {
            return Err(VaultError::InvalidParams("coefficient outside the field".into()));
        }
        Ok(VaultRecord {
            params,
            vault,
            key_hash,
        })
    }

    pub fn params(&self) -> &VaultParams {
        &self.params
    }

    pub fn vault(&self) -> &Poly {
        &self.vault
    }

    pub fn key_hash(&self) -> &[u8; 32] {
        &self.key_hash
    }

    pub fn bijection(&self) -> Bijection {
        derive_bijection(&self.key_hash, &self.params.field)
    }
}

/// Evaluated pairs (x, V(x)) with distinct abscissae.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnlockingSet {
    points: Vec<(FieldElement, FieldElement)>,
}

impl UnlockingSet {
    /// Builds a set from raw pairs; abscissae must be distinct.
    pub fn from_points(points: Vec<(FieldElement, FieldElement)>) -> Result<Self, VaultError> {
        let mut xs: Vec<u16> = points.iter().map(|p| p.0.value()).collect();
        xs.sort_unstable();
        if let Some(w) = xs.windows(2).find(|w| w[0] == w[1]) {
            return Err(FieldError::DuplicateAbscissa(FieldElement::new(w[0])).into());
        }
        Ok(UnlockingSet { points })
    }

    pub fn points(&self) -> &[(FieldElement, FieldElement)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Locks `set` with the standard construction.
pub fn bind<R: Rng + ?Sized>(
    set: &FeatureSet,
    params: &VaultParams,
    rng: &mut R,
) -> Result<(VaultRecord, SecretKey), VaultError> {
    bind_with(set, params, &BindOptions::default(), rng)
}

pub fn bind_with<R: Rng + ?Sized>(
    set: &FeatureSet,
    params: &VaultParams,
    opts: &BindOptions,
    rng: &mut R,
) -> Result<(VaultRecord, SecretKey), VaultError> {
    params.check_set(set)?;
    let f = &params.field;
    let nm = params.universe();
    let t = set.len();
    if opts.hide_degree && nm - t == 1 {
        return Err(VaultError::DegreeHidingUnavailable { t, universe: nm });
    }
    let key = SecretKey::random(f, params.k as usize, rng);
    let key_hash = key.digest(&opts.salt);
    let points: Vec<FieldElement> = if opts.use_bijection {
        let sigma = derive_bijection(&key_hash, f);
        set.elements().iter().map(|&x| sigma.apply(x as u16)).collect()
    } else {
        set.elements().iter().map(|&x| FieldElement::new(x as u16)).collect()
    };
    let mut lock = poly_from_roots(f, &points);
    if opts.hide_degree {
        let q = sample_rootless_poly(f, nm - t, rng)?;
        lock = q.mul(f, &lock);
    }
    let vault = lock.add(&key.to_poly());
    Ok((
        VaultRecord {
            params: params.clone(),
            vault,
            key_hash,
        },
        key,
    ))
}

/// Evaluates V at σ(x) for every x in the probe set.
pub fn unlock_set(record: &VaultRecord, probe: &FeatureSet) -> Result<UnlockingSet, VaultError> {
    unlock_set_with(record, probe, true)
}

/// As [`unlock_set`], optionally skipping σ for records bound without it.
pub fn unlock_set_with(
    record: &VaultRecord,
    probe: &FeatureSet,
    use_bijection: bool,
) -> Result<UnlockingSet, VaultError> {
    record.params.check_set(probe)?;
    let f = &record.params.field;
    let sigma = use_bijection.then(|| record.bijection());
    let points = probe
        .elements()
        .iter()
        .map(|&x| {
            let sx = match &sigma {
                Some(s) => s.apply(x as u16),
                None => FieldElement::new(x as u16),
            };
            (sx, record.vault.eval(f, sx))
        })
        .collect();
    Ok(UnlockingSet { points })
}

/// Runs the configured decoder on the probe's unlocking set. A returned key
/// always matches the stored hash.
pub fn retrieve(
    record: &VaultRecord,
    probe: &FeatureSet,
    config: &DecoderConfig,
) -> Result<DecodeOutcome, VaultError> {
    let set = unlock_set(record, probe)?;
    let check = KeyCheck::new(&record.key_hash, &config.salt);
    Ok(decoders::decode(
        &record.params.field,
        &set,
        record.params.k as usize,
        &check,
        config,
    )?)
}
