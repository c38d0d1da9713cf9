//! Command-line workflows and the attestation service for `zksvm`.

pub mod app;
pub mod nonce;
pub mod service;
