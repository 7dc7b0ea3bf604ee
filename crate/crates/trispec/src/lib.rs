//! Exact arithmetic for Fuchsian triangle groups and their geodesic length
//! spectra.
//!
//! The crate is organized around five layers:
//!
//! * [`realfield`] — exact arithmetic in the totally real fields
//!   Q(2cos(pi/N)) with certified interval evaluation of every Galois
//!   embedding.
//! * [`fuchsian`] — triangle groups Delta(a,b,c) as matrix groups with exact
//!   trace bookkeeping, trace fields, and arithmetic dimension.
//! * [`enumerate`] — breadth-first enumeration of group elements inside a
//!   displacement ball, exact deduplication, and conjugacy classes of
//!   hyperbolic elements (closed geodesics).
//! * [`spectrum`] — counting functions, clustering histograms, separation
//!   gaps, Galois/norm bound checks, and mean-multiplicity growth fits.
//! * [`cli`] — the command-line surface with cached runs and CSV reports.

pub mod cli;
pub mod enumerate;
pub mod fuchsian;
pub mod interval;
pub mod poly;
pub mod realfield;
pub mod spectrum;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("division by zero field element")]
    DivisionByZero,

    #[error("operands belong to different fields")]
    MixedFields,

    #[error("precision cap of {cap} bits exceeded while {context}")]
    PrecisionCap { cap: u32, context: String },

    #[error("interval division by an interval containing zero")]
    IntervalDivisionByZero,

    #[error("interval domain error: {0}")]
    IntervalDomain(String),

    #[error("signature {0} is not hyperbolic (1/a + 1/b + 1/c must be < 1)")]
    NotHyperbolic(String),

    #[error("invalid signature: {0}")]
    BadSignature(String),

    #[error("element is {0:?}, not hyperbolic; no translation length")]
    NotHyperbolicElement(crate::fuchsian::Classification),

    #[error("trace field scan did not stabilize at word cap {cap}")]
    NotStabilized { cap: usize },

    #[error("store incomplete for requested bound: need pruning radius >= {required:.4}, have {have:.4}")]
    IncompleteStore { required: f64, have: f64 },

    #[error("word cap {cap} reached before the frontier was exhausted; results are partial")]
    WordCapReached { cap: usize },

    #[error("deduplication could not separate words {word_a} and {word_b} at the precision cap")]
    DedupCollision { word_a: String, word_b: String },

    #[error("{count} conjugacy pair(s) undecided after exhausting the conjugator pool")]
    UndecidedConjugacy { count: usize },

    #[error("expected a unique unbounded non-identity embedding (arithmetic dimension 2), found r = {r}")]
    EmbeddingNotUnique { r: usize },

    #[error("embedding-boundedness scan disagrees with the character discriminant at embedding {embedding}")]
    BoundednessDisagreement { embedding: usize },

    #[error("trace difference failed the integrality certificate: {0}")]
    IntegralityViolation(String),

    #[error("theorem-backed inequality violated: {0}")]
    InequalityViolated(String),

    #[error("requested bound {requested:.4} exceeds enumerated bound {available:.4}")]
    BoundExceedsRun { requested: f64, available: f64 },

    #[error("cache file missing: {0}")]
    CacheMissing(String),

    #[error("cache file corrupt: {0}")]
    CacheCorrupt(String),

    #[error("fit window too short: need at least {need} grid points, have {have}")]
    WindowTooShort { need: usize, have: usize },

    #[error("invariant trace field not contained in the ambient field: {0}")]
    AmbientContainment(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serde(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
