use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension {0} outside supported range 2..=8")]
    DimOutOfRange(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimMismatch { expected: usize, got: usize },
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error("matrix is not Hermitian (max |H - H^dagger| = {0:e})")]
    NotHermitian(f64),
    #[error("Jacobi eigensolver did not converge after {0} sweeps")]
    NoConvergence(usize),
    #[error("operator is not positive semi-definite (min eigenvalue {0:e})")]
    NotPsd(f64),
    #[error("matrix is not unitary (max |U^dagger U - I| = {0:e})")]
    NotUnitary(f64),
    #[error("trace is {0}, expected 1")]
    BadTrace(f64),
    #[error("effects do not sum to the identity (max deviation {0:e})")]
    NotResolution(f64),
    #[error("empty measurement")]
    EmptyMeasurement,
    #[error("outcome index {index} out of range for {len} outcomes")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("outcome {0} has vanishing probability")]
    ZeroProbabilityOutcome(usize),
    #[error("Bloch vector modulus {0} exceeds 1")]
    BlochOutOfBall(f64),
    #[error("parameter {name} = {value} outside {range}")]
    ParamOutOfRange {
        name: &'static str,
        value: f64,
        range: String,
    },
    #[error("square root of G = E(I-E) is degenerate (r0^2 = {0:e})")]
    DegenerateSqrt(f64),
    #[error("closed form has a vanishing denominator")]
    SingularDenominator,
    #[error("r0 vanishes on the infinite-strength boundary")]
    SingularR0,
    #[error("delta_in = {value} outside the tradeoff curve domain [{lo}, {hi}]")]
    OutOfCurveDomain { value: f64, lo: f64, hi: f64 },
    #[error("tradeoff curve degenerates to a point")]
    DegenerateCurve,
    #[error("strength undefined at alpha = 2")]
    SingularAlpha,
    #[error("b = {b} below the strength k = {k}")]
    BOutOfRange { b: f64, k: f64 },
    #[error("spectra have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("rank {k} outside 1..={dim}")]
    BadRank { k: usize, dim: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
