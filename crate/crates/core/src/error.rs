use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("non-finite sample at index {index}")]
    NonFinite { index: usize },
    #[error("quadrature needs at least 3 samples, got {0}")]
    TooFewSamples(usize),
    #[error("expected {expected} samples, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("grid too narrow: {0}")]
    GridTooNarrow(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("function has zero norm")]
    ZeroNorm,
    #[error("grids differ: {0}")]
    GridMismatch(String),
    #[error("support leaks {leakage:.3e} of the norm outside the target grid")]
    SupportLeakage { leakage: f64 },
    #[error("degenerate symmetrization: f {sign} exchange(f) vanishes")]
    DegenerateSymmetrization { sign: char },
    #[error("phase-matching function has no definite parity (deviation {deviation:.3e}); use a general JSA")]
    NoDefiniteParity { deviation: f64 },
    #[error("JSA is not a product f₊·f₋ (rank-1 residual {residual:.3e})")]
    NotSeparable { residual: f64 },
    #[error("shift {shift} moves {leakage:.3e} of the norm off the grid; a span of at least {required_span} is needed")]
    OffGrid { shift: f64, leakage: f64, required_span: f64 },
    #[error("no closed form for an anyonic JSA; use the oracle")]
    NoClosedForm,
    #[error("far-delay form needs sigma*tau0 >= 8: tau0 must be at least {required_tau0}")]
    FarRegime { required_tau0: f64 },
    #[error("{0} requires a {1} JSA")]
    WrongJsaForm(&'static str, &'static str),
    #[error("scan mismatch: {0}")]
    ScanMismatch(String),
    #[error("side lobes overlap the central cluster (boundary/peak ratio {ratio:.3e})")]
    LobeOverlap { ratio: f64 },
    #[error("anchor |f(a)| = {value:.3e} is below 1e-3 of the peak {peak:.3e}; use the maximum-modulus anchor")]
    WeakAnchor { value: f64, peak: f64 },
    #[error("zero overlap between estimate and reference")]
    ZeroOverlap,
}

pub type Result<T> = std::result::Result<T, Error>;
