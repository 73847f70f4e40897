//! Crate-wide error type with stable machine-readable codes.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite input {value} to Young function evaluation")]
    NonFiniteInput { value: f64 },

    #[error("invalid Young parameter: {detail}")]
    InvalidYoungParameter { detail: String },

    #[error("convexity certificate failed at x={x}, h={h}: second difference {second_difference}")]
    ConvexityViolation {
        x: f64,
        h: f64,
        second_difference: f64,
    },

    #[error("Young-function certificate failed: {detail} at x={x}")]
    YoungCertificateViolation { detail: String, x: f64 },

    #[error("conjugate objective still increasing at y_max={y_max} (value {value}); sup unbounded on range")]
    UnboundedOnRange { y_max: f64, value: f64 },

    #[error("degenerate Young function: phi({t}) = 0 for t > 0 inside the probe grid")]
    DegenerateFunction { t: f64 },

    #[error("tail-bound method inapplicable: {detail}")]
    MethodInapplicable { detail: String },

    #[error("expression parse error at byte {position}: {detail}")]
    ExprParse { position: usize, detail: String },

    #[error("invalid search parameters: {detail}")]
    InvalidSearchParams { detail: String },

    #[error("invalid hypergroup table: {detail}")]
    InvalidTable { detail: String },

    #[error("halo overflow: {detail}")]
    HaloOverflow { detail: String },

    #[error("{x} is not in the computed center (truncation-relative)")]
    NotInCenter { x: i64 },

    #[error("no aperiodicity bound found for a={a} within scan bound {scan_bound}")]
    NotAperiodicWithinBound { a: i64, scan_bound: u64 },

    #[error(
        "a={a} is periodic on the probe set (period {period}); no aperiodic element available"
    )]
    PeriodicElement { a: i64, period: u64 },

    #[error("invalid neighborhood: {detail}")]
    InvalidNeighborhood { detail: String },

    #[error("witness tail bounds not certifiable: {detail}")]
    TailBoundFailure { detail: String },

    #[error("sequence condition not satisfied by the witness: {detail}")]
    SequenceConditionFailure { detail: String },

    #[error("weight is not submultiplicative: conv({x},{y}) gives {lhs} > w(x)w(y) = {rhs}")]
    WeightNotSubmultiplicative { x: i64, y: i64, lhs: f64, rhs: f64 },

    #[error("schema violation: {detail}")]
    Schema { detail: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable short code for machine-readable CLI envelopes.
    pub fn code(&self) -> &'static str {
        match self {
            Error::NonFiniteInput { .. } => "E_NON_FINITE",
            Error::InvalidYoungParameter { .. } => "E_YOUNG_PARAM",
            Error::ConvexityViolation { .. } => "E_CONVEXITY",
            Error::YoungCertificateViolation { .. } => "E_YOUNG_CERT",
            Error::UnboundedOnRange { .. } => "E_UNBOUNDED_RANGE",
            Error::DegenerateFunction { .. } => "E_DEGENERATE",
            Error::MethodInapplicable { .. } => "E_METHOD_INAPPLICABLE",
            Error::ExprParse { .. } => "E_EXPR_PARSE",
            Error::InvalidSearchParams { .. } => "E_SEARCH_PARAMS",
            Error::InvalidTable { .. } => "E_TABLE",
            Error::HaloOverflow { .. } => "E_HALO_OVERFLOW",
            Error::NotInCenter { .. } => "E_NOT_IN_CENTER",
            Error::NotAperiodicWithinBound { .. } => "E_NOT_APERIODIC",
            Error::PeriodicElement { .. } => "E_PERIODIC",
            Error::InvalidNeighborhood { .. } => "E_NEIGHBORHOOD",
            Error::TailBoundFailure { .. } => "E_TAIL_BOUND",
            Error::SequenceConditionFailure { .. } => "E_SEQ_CONDITION",
            Error::WeightNotSubmultiplicative { .. } => "E_WEIGHT",
            Error::Schema { .. } => "E_SCHEMA",
            Error::Io(_) => "E_IO",
            Error::Json(_) => "E_JSON",
        }
    }
}
