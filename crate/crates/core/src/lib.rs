//! Unlinkable improved fuzzy vault for fixed-length real-valued biometric
//! feature vectors.
//!
//! The pipeline runs in four stages:
//!
//! 1. [`feature_pipeline`] quantises each vector element into one of `d`
//!    intervals, binarises the interval indices and maps the resulting bit
//!    vector to the set of positions holding a one.
//! 2. [`vault`] binds a random secret polynomial to that set: the set is
//!    re-mapped through a record-specific bijection seeded by the key hash and
//!    encoded in a degree-hiding vault polynomial.
//! 3. [`decoders`] reconstruct the secret from a probe set with iterated
//!    Lagrange interpolation, Gao's Reed–Solomon decoder or a Guruswami–Sudan
//!    list decoder; every candidate is checked against the stored hash.
//! 4. [`security`] turns decoding trials into error rates and false-accept
//!    security, and implements the record-linkage analysis.
//!
//! [`harness`] wires these together for synthetic or CSV-supplied features.

pub mod decoders;
pub mod feature_pipeline;
pub mod gf2e;
pub mod harness;
pub mod security;
pub mod vault;
