use thiserror::Error;

/// Errors raised by field construction, decomposition and quasinorm evaluation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LpError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("shape mismatch: expected {expected} samples, got {actual}")]
    ShapeMismatch { expected: usize, actual: usize },
    #[error("non-finite sample at flat index {0}")]
    NonFiniteSample(usize),
    #[error("test function cannot be resolved on this grid: {0}")]
    UnresolvableSpec(String),
    #[error("invalid exponent {0}: must be positive")]
    InvalidExponent(f64),
    #[error("dilation by 2^{0} would push spectral energy past the Nyquist frequency")]
    AliasingError(i32),
    #[error("dilation by 2^{0} requires a spectrum supported on multiples of 2^{1}")]
    NonDivisibleSpectrum(i32, i32),
    #[error("fewer than 3 resolvable dyadic bands (j_min={j_min}, j_max={j_max})")]
    RangeTooNarrow { j_min: i32, j_max: i32 },
    #[error("band {j} outside resolvable range [{j_min}, {j_max}]")]
    BandOutOfRange { j: i32, j_min: i32, j_max: i32 },
    #[error("relative spectral energy {fraction:e} lies outside the resolvable annulus")]
    UnresolvedEnergy { fraction: f64 },
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("step {0:?} is not an integer multiple of the grid spacing")]
    MisalignedStep(Vec<f64>),
    #[error("invalid difference specification: {0}")]
    InvalidDifference(String),
    #[error("axis {axis} invalid for dimension {dim}")]
    InvalidAxis { axis: usize, dim: usize },
    #[error("operation requires dimension >= {required}, got {dim}")]
    DimensionTooLow { dim: usize, required: usize },
    #[error("quadrature too coarse: {0}")]
    QuadratureTooCoarse(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("unknown theorem id {0:?}")]
    UnknownTheoremId(String),
    #[error("empty band decomposition")]
    EmptyDecomposition,
    #[error("no scales in band range")]
    BandRangeEmpty,
    #[error("window support violates the direction geometry: |theta.xi| = {value} outside [{lo}, {hi}]")]
    GeometryViolated { value: f64, lo: f64, hi: f64 },
    #[error("multiplier vanishes on the window support")]
    SingularMultiplier,
    #[error("field file: {0}")]
    FieldFormat(String),
}

pub type Result<T> = std::result::Result<T, LpError>;
