use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("field of order {p}^{m} is too large (q must be at most 65536)")]
    FieldTooLarge { p: u32, m: u32 },
    #[error("modulus is not a monic polynomial of degree {0} over the prime field")]
    BadModulus(u32),
    #[error("modulus is reducible over F_{0}")]
    ReducibleModulus(u32),
    #[error("polynomial {0} is reducible")]
    Reducible(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("elements belong to different fields")]
    FieldMismatch,
    #[error("rational function is constant; map degree undefined")]
    ConstantMap,
    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("stream possibly zero at depth {0}")]
    PossiblyZero(usize),
    #[error("multiple root: the w-derivative vanishes at the seed")]
    MultipleRoot,
    #[error("seed does not identify a branch: {0}")]
    AmbiguousSeed(String),
    #[error("element has negative valuation {0}; it is not in the valuation ring")]
    NegativeValuation(i64),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("orientation mismatch between streams")]
    OrientationMismatch,
    #[error("generators are linearly dependent modulo pi")]
    DependentGenerators,
    #[error("residue class {0} is not represented in the digit set")]
    MissingResidue(String),
    #[error("undetermined: state cap {0} exceeded before a repeated remainder")]
    StateCap(usize),
    #[error("no relation found within caps: {0}")]
    NoRelation(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("automaton state cap {cap} exceeded (degree bound {degree})")]
    AutomatonCap { cap: usize, degree: usize },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("json: {0}")]
    Json(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
