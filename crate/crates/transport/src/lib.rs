//! Wire protocol and process roles for the annotated-stream schemes: an
//! untrusted prover service, a streaming verifier client, cost metering,
//! and byte-exact transcript recording.
//!
//! Frames are length-prefixed; all annotation travels in PROOF_SECTION
//! frames after the END token. The verifier's secrets (r, r2) are never
//! serialized; the 4-cycle challenge r1 is disclosed mid-protocol by
//! design.

pub mod client;
pub mod cost;
pub mod frame;
pub mod service;
pub mod transcript;
pub mod wire;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum TransportError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Core(#[from] annostream_core::Error),

    #[error("malformed frame: {0}")]
    MalformedFrame(String),

    #[error("malformed transcript: {0}")]
    MalformedTranscript(String),

    #[error("peer reported error: {0}")]
    Remote(String),

    #[error("protocol violation: {0}")]
    Protocol(String),
}

pub type Result<T> = std::result::Result<T, TransportError>;

/// Default service port, overridable through ANNOSTREAM_PORT.
pub const DEFAULT_PORT: u16 = 7117;

pub fn port_from_env() -> u16 {
    std::env::var("ANNOSTREAM_PORT")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_PORT)
}
