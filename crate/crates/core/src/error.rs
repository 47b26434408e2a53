use thiserror::Error;

/// Every failure mode of the toolkit.
///
/// Mathematical "no" answers (a pair that is not a Γ-contraction, a
/// polynomial that is not Γ-distinguished) are reported through
/// [`Certificate`](crate::Certificate) verdicts, not through this type.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("commutator too large: |SP-PS| = {norm:.3e} exceeds {bound:.3e}")]
    CommutatorTooLarge { norm: f64, bound: f64 },

    #[error("not a contraction: I - P*P has eigenvalue {min_eigenvalue:.3e}")]
    NotAContraction { min_eigenvalue: f64 },

    #[error("fundamental equation inconsistent outside the defect block: |R_ij| = {entry:.3e} > {tol:.3e}")]
    RankDeficientInconsistent { entry: f64, tol: f64 },

    #[error("joint diagonalization failed after {attempts} random combinations")]
    JointDiagonalizationFailed { attempts: usize },

    #[error("spectral gap too small: eigenvalue of modulus {modulus} sits between the disc and the circle")]
    SpectralGapTooSmall { modulus: f64 },

    #[error("off-diagonal block {block} does not vanish (norm {norm:.3e})")]
    OffDiagonalCoupling { block: String, norm: f64 },

    #[error("matrix is not unitary: |U*U - I| = {defect:.3e}")]
    NotUnitary { defect: f64 },

    #[error("polynomial vanishes identically on {degenerate} of {total} scan slices")]
    DegenerateSlices { degenerate: usize, total: usize },

    #[error("numerical gcd unstable: {0}")]
    NumericalGcdUnstable(String),

    #[error("band unsafe: probe degree {probe_degree} + polynomial degree {poly_degree} exceeds truncation {truncation}")]
    BandUnsafe {
        probe_degree: usize,
        poly_degree: usize,
        truncation: usize,
    },

    #[error("matrix is not normal: |A*A - AA*| = {defect:.3e}")]
    NotNormal { defect: f64 },

    #[error("spectrum touches the unit circle: r(A) = {radius}")]
    SpectrumTouchesCircle { radius: f64 },

    #[error("pair is not a Γ-contraction: {0}")]
    NotGammaContraction(String),

    #[error("closed form mismatch for {what}: deviation {deviation:.3e}")]
    ClosedFormMismatch { what: String, deviation: f64 },

    #[error("spectrum point #{index} is not on the distinguished boundary")]
    PointNotOnDistinguishedBoundary { index: usize },

    #[error("empty joint spectrum")]
    EmptySpectrum,

    #[error("annihilation precondition failed: {0}")]
    AnnihilationPreconditionFailed(String),

    #[error("restriction to part {part} not annihilated: residual {residual:.3e}")]
    ResidualTooLarge { part: usize, residual: f64 },

    #[error("incomplete decomposition: {0}")]
    IncompleteDecomposition(String),

    #[error("invalid polynomial: {0}")]
    InvalidPolynomial(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
