use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid feature distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid classifier payoffs: {0}")]
    InvalidPayoffs(String),

    #[error("invalid agent success matrix: {0}")]
    InvalidSuccess(String),

    #[error("invalid group profile: {0}")]
    InvalidGroups(String),

    #[error("invalid population state: {0}")]
    InvalidState(String),

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("state leaves the simplex: s[{index}] = {value}")]
    OutOfSimplex { index: usize, value: f64 },

    #[error("norm order must satisfy p >= 1, got {0}")]
    InvalidNorm(f64),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{what} did not converge within {iterations} iterations")]
    NonConvergence { what: &'static str, iterations: usize },

    #[error("negative fitness W{label} = {value}")]
    NegativeFitness { label: usize, value: f64 },

    #[error("both fitnesses vanish for group {group}; replicator update undefined")]
    DegenerateFitness { group: usize },

    #[error("state is not on an equilibrium hyperplane (fitness gap {gap:e})")]
    NotAtEquilibrium { gap: f64 },

    #[error("equilibrium fitness is zero")]
    DegenerateEquilibrium,

    #[error("{}", match line { Some(l) => format!("config line {l}: {message}"), None => format!("config: {message}") })]
    Config { line: Option<usize>, message: String },

    #[error("i/o: {0}")]
    Io(String),
}

impl Error {
    /// Failures of an otherwise well-formed computation, as opposed to bad input.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence { .. }
                | Error::NegativeFitness { .. }
                | Error::DegenerateFitness { .. }
                | Error::DegenerateEquilibrium
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
