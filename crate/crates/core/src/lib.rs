//! Fourier coefficients of elliptic-curve newforms, 2-adic congruence
//! certification, and non-vanishing in short intervals.
//!
//! The pipeline runs in three layers:
//!
//! * [`elliptic`] computes traces of Frobenius a_p for curves over Q, and
//!   [`qseries`] extends them to full q-expansions via the Hecke
//!   recurrence, so weight-2 newform coefficients come from point counts
//!   rather than modular-symbol machinery.
//! * [`congruence`] certifies a(n) = b(n) (mod 2^m) for all n from a
//!   finite Sturm-bound check, and classifies coefficients mod 4, where
//!   the possible residues of a(p^j) depend only on p mod 4 and j.
//! * [`intervals`] and [`gaps`] turn those congruences into non-vanishing
//!   statements: every interval (X, X + c X^(1/4)] contains an n with
//!   a(n) != 0, with the constant c estimated by exhaustive sweep, and
//!   runs of consecutive zero coefficients are measured and certified.
//!
//! Interchangeable algorithms (point counters, interval predicates, gap
//! certificates) live behind trait-object registries selected by name at
//! runtime, so the CLI and tests can pit implementations against each
//! other on identical inputs.

pub mod arith;
pub mod congruence;
pub mod elliptic;
pub mod fixtures;
pub mod gaps;
pub mod intervals;
pub mod qseries;
pub mod verify;

/// Unified error type for the whole crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Input outside the operation's mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// The Weierstrass equation has discriminant 0.
    #[error("singular curve: discriminant vanishes for {0}")]
    SingularCurve(String),

    /// An operation required a different reduction type at p.
    #[error("wrong reduction at {p}: {detail}")]
    WrongReduction { p: u64, detail: String },

    /// A coefficient past the trusted bound of a q-expansion was requested.
    #[error("coefficient a({n}) requested but only n <= {bound} is trusted")]
    PastTrustedBound { n: u64, bound: u64 },

    /// Extending a q-expansion required a prime coefficient that is absent.
    #[error("missing prime coefficient a({p}) needed by the Hecke recurrence")]
    MissingPrime { p: u64 },

    /// A named strategy, fixture label, or field was not found.
    #[error("unknown {kind}: {name}")]
    Unknown { kind: &'static str, name: String },

    /// A certificate's hypotheses do not cover the given input.
    #[error("not applicable: {0}")]
    NotApplicable(String),

    /// Serialized data violated the interchange schema.
    #[error("schema error: {0}")]
    Schema(String),

    /// A scan or statistic was asked of an empty data set.
    #[error("empty data: {0}")]
    EmptyData(String),

    /// A zero run hit the trusted bound before terminating.
    #[error("zero run starting at {start} is truncated by the trusted bound {bound}")]
    TruncatedRun { start: u64, bound: u64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn unknown(kind: &'static str, name: impl Into<String>) -> Self {
        Error::Unknown {
            kind,
            name: name.into(),
        }
    }

    pub fn schema(msg: impl Into<String>) -> Self {
        Error::Schema(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
