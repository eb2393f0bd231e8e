use thiserror::Error;

/// Errors raised by the web-geometry routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite coordinate in point")]
    NonFinite,

    #[error("jet mismatch: {0}")]
    JetMismatch(String),

    #[error("derivative of order {requested} exceeds jet order {order}")]
    OrderExceeded { requested: usize, order: usize },

    #[error("reciprocal of a jet with vanishing constant term")]
    ZeroConstantTerm,

    #[error("{function} is singular at {at}")]
    DomainError { function: &'static str, at: String },

    #[error("expected a polynomial in {expected} variables, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("duplicate monomial with exponents {0:?}")]
    DuplicateMonomial(Vec<u32>),

    #[error("cubic coefficients vanish simultaneously (max |coefficient| = {max_abs:e})")]
    DegenerateCoefficients { max_abs: f64 },

    #[error("singular point: |D| = {disc_abs:e}, root multiplicity {multiplicity}")]
    SingularPoint { disc_abs: f64, multiplicity: usize },

    #[error("no valid affine chart: both dx = 0 and dy = 0 are degenerate")]
    NoValidChart,

    #[error("depressed form keeps a quadratic term in every chart (max |k2| = {max_abs:e})")]
    QuadraticTermPresent { max_abs: f64 },

    #[error("the three defining expressions of the connection disagree by {spread:e}")]
    InconsistentConnection { spread: f64 },

    #[error("associativity residual {residual:e} too large for the identity to apply")]
    NotASolution { residual: f64 },

    #[error("path meets the discriminant: |D| = {disc_abs:e} at {at}")]
    PathHitsDiscriminant { disc_abs: f64, at: String },

    #[error("algebra is not semisimple at this point (eigenvalue gap {gap:e})")]
    NonSemisimple { gap: f64 },

    #[error("potential is not quasi-homogeneous")]
    NotQuasiHomogeneous,

    #[error("Euler weights are not determined uniquely by the monomials")]
    AmbiguousWeights,

    #[error("series solve requires f_xxx != 0 at the base point")]
    VanishingLeadingDerivative,

    #[error("branch continuation failed: {0}")]
    BranchCollision(String),

    #[error("non-real root branch requested for real-plane integration")]
    ComplexBranch,

    #[error("geometric construction left the regular region: {0}")]
    LeftRegularRegion(String),

    #[error("invalid normal form: {0}")]
    InvalidNormalForm(String),

    #[error("bracket 12 + 2t^2 - 9tF vanishes near t = {t}")]
    BracketVanishing { t: f64 },

    #[error("no quasi-homogeneous weights found (best residual {best:e})")]
    Unclassified { best: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("integration failed: {0}")]
    Integration(String),
}

pub type Result<T> = std::result::Result<T, Error>;
