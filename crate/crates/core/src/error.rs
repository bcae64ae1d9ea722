use thiserror::Error;

/// Errors produced by graph construction, filter algebra, solvers and the
/// network simulator.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("vertex {vertex} out of range for graph with {n} vertices")]
    InvalidVertex { vertex: usize, n: usize },

    #[error("graph construction failed: {0}")]
    Construction(String),

    #[error("graph generation failed after {attempts} attempts: {reason}")]
    Generation { attempts: usize, reason: String },

    #[error("operands are defined on different graphs")]
    GraphMismatch,

    #[error("filter is not symmetric: |H({i},{j}) - H({j},{i})| = {gap:e}")]
    Asymmetric { i: usize, j: usize, gap: f64 },

    #[error("singular matrix: {0}")]
    Singular(String),

    #[error("non-finite value at iteration {iteration}")]
    NonFinite { iteration: usize },

    #[error("communication range {range} is smaller than filter geodesic-width {width}")]
    RangeTooSmall { range: usize, width: usize },

    #[error("epoch {epoch}: communication range {range} is smaller than filter geodesic-width {width}")]
    EpochRange { epoch: usize, range: usize, width: usize },

    #[error("message {from} -> {to} spans {distance} hops, exceeding range {range}")]
    RangeViolation {
        from: usize,
        to: usize,
        distance: usize,
        range: usize,
    },

    #[error("parse error at line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        let line = e.position().map(|p| p.line()).unwrap_or(0);
        match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::Io(io),
            other => Error::Parse {
                line,
                message: format!("{other:?}"),
            },
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
