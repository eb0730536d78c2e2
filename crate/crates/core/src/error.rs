use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Broad failure classes, used by the command line to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// The inputs were well formed but the answer is "no" (e.g. not coherent).
    Verdict,
    /// Malformed or out-of-domain input.
    Input,
    /// A numerical procedure could not reach its tolerance.
    Numerical,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("determinant {det} is not 1 (|det - 1| = {dev:.3e})")]
    NotUnimodular { det: String, dev: f64 },
    #[error("matrix is not traceless (|tr| = {0:.3e})")]
    NotTraceless(f64),
    #[error("line matrix is not normalized (|det - 1| = {0:.3e})")]
    NotNormalized(f64),
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("element is parabolic or the identity (|tr^2 - 4| = {0:.3e})")]
    ParabolicOrIdentity(f64),

    #[error("gram matrix is not symmetric with unit diagonal: {0}")]
    InvalidGram(String),
    #[error("gram matrix has rank {0}, lines in H^3 realize rank at most 3")]
    RankTooHigh(usize),
    #[error("symmetric factorization failed: {0}")]
    FactorizationFailed(String),
    #[error("all pairwise values are within tolerance of +-1, degeneracy is undecidable")]
    Undecidable,
    #[error("no orientation-preserving isometry relates the configurations (residual {0:.3e})")]
    NoCongruence(f64),
    #[error("source configuration does not span the space of line matrices")]
    DegenerateSource,
    #[error("configurations have different sizes ({0} vs {1})")]
    SizeMismatch(usize, usize),

    #[error("peripheral element is parabolic (|tr^2 h - 4| = {0:.3e})")]
    ParabolicPeripheral(f64),
    #[error("peripheral subgroup is inadmissible")]
    Inadmissible,
    #[error("unknown ortholength method `{0}`")]
    UnknownMethod(String),

    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid gluing: {0}")]
    InvalidGluing(String),
    #[error("edge class mismatch: {0}")]
    EdgeClassMismatch(String),
    #[error("invalid triangulation: {0}")]
    InvalidTriangulation(String),
    #[error("expected {expected} parameters, got {got}")]
    ParamCount { expected: usize, got: usize },
    #[error("index {index} out of range ({len})")]
    OutOfRange { index: usize, len: usize },

    #[error("lines share an end-point (<l1,l2> = +-1)")]
    SharedEndpoint,
    #[error("parameters are not in P(K) (max hextet residual {0:.3e})")]
    NotInPK(f64),
    #[error("parameters lie in the excluded set T (coordinate {0} is +-1)")]
    InTExcluded(usize),
    #[error("parameters are not coherent")]
    NotCoherent,

    #[error("face {0} is incoherent along the developing path")]
    IncoherentFace(usize),
    #[error("seed hextet does not span the space of line matrices")]
    DegenerateSeed,
    #[error("path step {step} is invalid: {reason}")]
    InvalidPath { step: usize, reason: String },

    #[error("denominator V^2 - 3V + 3 vanishes (complete structure)")]
    DenominatorVanishes,
    #[error("p0 = -1 is a pole of the inverse map")]
    PoleP0,
    #[error("V = 1 is a pole of U = (V^2 + V - 1)/(V - 1)")]
    PoleV1,
    #[error("X = +-2 has no loxodromic normal form")]
    ParabolicNormalForm,

    #[error("Jacobian of the hextet system is singular at the start point")]
    SingularJacobian,
    #[error("start point is not on P(K) (residual {0:.3e})")]
    StartOffVariety(f64),
    #[error("invalid trace run: {0}")]
    InvalidRun(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        use Error::*;
        match self {
            NotCoherent | NoCongruence(_) => ErrorClass::Verdict,
            FactorizationFailed(_) | SingularJacobian | IncoherentFace(_) => ErrorClass::Numerical,
            _ => ErrorClass::Input,
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
