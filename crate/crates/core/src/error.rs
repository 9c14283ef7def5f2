use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("variable sets differ: [{left}] vs [{right}]")]
    VariableSet { left: String, right: String },

    #[error("monomial map is singular (exponent matrix not invertible)")]
    SingularMap,

    #[error("division by the zero polynomial")]
    DivisionByZero,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("operation requires polynomial-grade input, found exponent {exponent} in `{term}`")]
    NotPolynomialGrade { term: String, exponent: String },

    #[error("arity mismatch: expected {expected}, got {found}")]
    Arity { expected: usize, found: usize },

    #[error("n - l = {0} is odd; no wedge power of the bivector has that grade")]
    Parity(usize),

    #[error("casimir differentials wedge to zero while the bivector power is nonzero")]
    DegenerateCasimirs,

    #[error("`{0}` is not a verified casimir of the structure")]
    UnverifiedCasimir(String),

    #[error("polynomial `{0}` is not weighted-homogeneous")]
    NotHomogeneous(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("integration diverged after t = {last_time}")]
    Divergence { last_time: f64 },

    #[error("unknown catalog entry `{0}`")]
    UnknownEntry(String),

    #[error("parameter guard violated: {0}")]
    ParameterGuard(String),

    #[error("parse error at {line}:{col} near `{token}`: {message}")]
    Parse {
        line: usize,
        col: usize,
        token: String,
        message: String,
    },
}
