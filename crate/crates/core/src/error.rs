use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("non-finite value at flat index {0}")]
    NonFinite(usize),
    #[error("argument out of domain: {0}")]
    Domain(String),
    #[error("degenerate Mobius map: {0}")]
    DegenerateMap(String),
    #[error("singular matrix: {0}")]
    Singular(String),
    #[error("spectrum is not real: eigenvalue {re} + {im}i")]
    NonRealSpectrum { re: f64, im: f64 },
    #[error("spectral intervals overlap: [{a}, {b}] and [{c}, {d}]")]
    OverlappingIntervals { a: f64, b: f64, c: f64, d: f64 },
    #[error("singular shifted operator at ADI iteration {iteration}")]
    SingularShift { iteration: usize },
    #[error("ADI did not converge: relative residual {residual:e} after {iterations} iterations")]
    NotConverged {
        iterations: usize,
        residual: f64,
        history: Vec<f64>,
    },
    #[error("field is not incompressible: max divergence {0:e}")]
    NotIncompressible(f64),
    #[error("operation requires an even radial size m (got m = {0})")]
    OddRadialSize(usize),
    #[error("insufficient history: need {needed}, have {have}")]
    InsufficientHistory { needed: usize, have: usize },
    #[error("unsupported BDF order {0}")]
    UnsupportedOrder(usize),
    #[error("problem too large for dense path: {0}")]
    TooLarge(String),
    #[error("non-finite state at step {step}")]
    Blowup { step: usize },
    #[error("in Fourier mode {mode}: {source}")]
    InMode {
        mode: i64,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn in_mode(self, mode: i64) -> Self {
        match self {
            e @ Error::InMode { .. } => e,
            e => Error::InMode {
                mode,
                source: Box::new(e),
            },
        }
    }
}
