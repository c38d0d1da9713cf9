//! Zero-knowledge attestation of an SVM decision over motion-sensor features.

pub mod envelope;
pub mod errors;
pub mod features;
pub mod group;
pub mod ipa;
pub mod ipzkp;
pub mod model;
pub mod pedersen;
pub mod range;
pub mod sigma;
pub mod sqrt;
pub mod transcript;
pub mod wire;
pub mod zksvm;

pub use errors::{Error, WireError};
pub use group::{Basis, CommitParams, GroupPoint, GroupScalar};
pub use transcript::Transcript;
