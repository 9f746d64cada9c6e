use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Coarse classification used by front ends to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Config,
    Numeric,
    Resolvability,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("missing required keys: {}", .0.join(", "))]
    MissingKeys(Vec<&'static str>),
    #[error("invalid parameter: {0}")]
    Invalid(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("pole of the {branch} term at omega = {omega}")]
    Pole { branch: &'static str, omega: f64 },
    #[error("omega_e = {omega_e} lies in the polariton gap ({lower}, {upper})")]
    Gap { omega_e: f64, lower: f64, upper: f64 },
    #[error("omega_e = {omega_e} is outside the range of the {branch} branch")]
    Range { omega_e: f64, branch: &'static str },
    #[error("singular dynamical matrix at k = {k}, omega = {omega}")]
    Singular { k: f64, omega: f64 },
    #[error("root bracketing failed on [{lo}, {hi}]: {detail}")]
    Bracket { lo: f64, hi: f64, detail: String },
    #[error("dressed {branch} linewidth vanishes; the rate diverges and needs a strong-coupling treatment")]
    InfiniteRate { branch: &'static str },
    #[error("grid too coarse: {0}")]
    Resolution(String),
    #[error("empty input: {0}")]
    Empty(&'static str),
    #[error("no resolvable anticrossing near omega_e = {omega_e}")]
    NoAnticrossing { omega_e: f64 },
    #[error("unresolved splitting at omega_e = {omega_e}: half-splitting {half_splitting} below threshold {threshold}")]
    Unresolved {
        omega_e: f64,
        half_splitting: f64,
        threshold: f64,
    },
    #[error("{branch} branch has {records} valid records, need at least 2")]
    Coverage { branch: &'static str, records: usize },
    #[error("malformed spectral map: {0}")]
    Format(String),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Parse { .. } | Error::MissingKeys(_) | Error::Invalid(_) => ErrorKind::Config,
            Error::NoAnticrossing { .. } | Error::Unresolved { .. } | Error::Coverage { .. } => {
                ErrorKind::Resolvability
            }
            _ => ErrorKind::Numeric,
        }
    }
}
