//! Verifiable graph-stream computation over annotated data streams.
//!
//! A computationally weak verifier makes a single pass over a turnstile (or
//! XOR) edge stream, keeping O(n) field elements of state, while an untrusted
//! prover appends an annotation after the final stream token. The verifier
//! either rejects or extracts the exact answer. Implemented schemes:
//!
//! * [`triangles`] - exact triangle counting, non-interactive, O(1) field
//!   operations per stream update.
//! * [`matching`] - exact maximum matching via Tutte-Berge certification.
//! * [`fourcycles`] - exact 4-cycle counting via a 3-message bivariate
//!   sum-check.
//! * [`reduction`] - the executable INDEX-to-disconnectivity/bipartiteness
//!   constructions in the XOR update model.
//!
//! [`stream`] holds the update models, deterministic generators, and the
//! brute-force oracles every scheme is tested against.

pub mod field;
pub mod fourcycles;
pub mod matching;
pub mod poly;
pub mod reduction;
pub mod stream;
pub mod triangles;

use thiserror::Error;

/// Errors shared across the scheme modules.
#[derive(Debug, Error)]
pub enum Error {
    /// Operands or objects built over different prime fields were mixed.
    #[error("field mismatch: operands belong to different field contexts")]
    FieldMismatch,

    /// Multiplicative inverse of zero requested.
    #[error("cannot invert zero")]
    InvertZero,

    /// No prime exists in the searchable window below 2^63.
    #[error("no prime found below 2^63 starting from {lower}")]
    PrimeWindowOverflow { lower: u64 },

    /// Parameters violate a documented precondition.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A stream violated the update-model contract.
    #[error("malformed stream: {0}")]
    MalformedStream(String),

    /// Instance too large for a brute-force oracle.
    #[error("oracle limited to n <= {limit}, got n = {n}")]
    OracleScale { n: u32, limit: u32 },

    /// A proof failed structural (framing/shape) validation. Distinct from a
    /// soundness rejection, which is a [`Verdict::Reject`].
    #[error("malformed proof: {0}")]
    MalformedProof(String),

    /// Protocol messages arrived out of order.
    #[error("protocol violation: {0}")]
    ProtocolViolation(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Outcome of a scheme verifier: the extracted answer, or rejection of the
/// prover's claims.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Accept(u64),
    Reject,
}

impl Verdict {
    pub fn is_accept(&self) -> bool {
        matches!(self, Verdict::Accept(_))
    }

    /// The accepted value, if any.
    pub fn value(&self) -> Option<u64> {
        match self {
            Verdict::Accept(v) => Some(*v),
            Verdict::Reject => None,
        }
    }
}
