use crate::linalg::C64;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("format error at row {row}: {msg}")]
    Format { row: usize, msg: String },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("no samples")]
    NoSamples,

    #[error("validation error: {0}")]
    Validation(String),

    #[error("conjugate inconsistency at s = {s}: value is not the conjugate of its partner")]
    ConjugateInconsistency { s: C64 },

    #[error("node collision: left node {left} (index {i}) equals right node {right} (index {j})")]
    NodeCollision { i: usize, j: usize, left: C64, right: C64 },

    #[error("singular pencil: sE - A is rank deficient at every probe point; use SVD truncation")]
    SingularPencil,

    #[error("evaluation failed at s = {s}: matrix is singular or too ill-conditioned (cond = {cond:e})")]
    Evaluation { s: C64, cond: f64 },

    #[error("ill-conditioned Cauchy matrix (cond = {cond:e}); poles {poles:?}, nodes {nodes:?}")]
    IllConditioned { cond: f64, poles: Vec<C64>, nodes: Vec<C64> },

    #[error("realification failed: imaginary residue {residue:e} exceeds tolerance")]
    ImaginaryResidue { residue: f64 },

    #[error("not enough eigenvalues: requested {requested}, only {available} available")]
    NotEnoughPoles { requested: usize, available: usize },

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    /// True for failures caused by the inputs' form rather than by the numerics.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::Io(_) | Error::Format { .. } | Error::Json(_) | Error::NoSamples | Error::Validation(_)
        )
    }

    /// Short machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Io(_) => "io",
            Error::Format { .. } => "format",
            Error::Json(_) => "json",
            Error::NoSamples => "no_samples",
            Error::Validation(_) => "validation",
            Error::ConjugateInconsistency { .. } => "conjugate_inconsistency",
            Error::NodeCollision { .. } => "node_collision",
            Error::SingularPencil => "singular_pencil",
            Error::Evaluation { .. } => "evaluation",
            Error::IllConditioned { .. } => "ill_conditioned",
            Error::ImaginaryResidue { .. } => "imaginary_residue",
            Error::NotEnoughPoles { .. } => "not_enough_poles",
            Error::Numerical(_) => "numerical",
        }
    }
}
