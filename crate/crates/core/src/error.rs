use thiserror::Error;

/// Errors raised by the exact-algebra and invariant computations.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EdsError {
    #[error("division by the zero function")]
    DivisionByZero,
    #[error("a coefficient denominator vanishes at the point")]
    Pole,
    #[error("objects live on different charts")]
    ChartMismatch,
    #[error("invalid chart: {0}")]
    InvalidChart(String),
    #[error("cannot contract a 0-form")]
    ContractZeroForm,
    #[error("expected a form of degree {expected}, found degree {found}")]
    DegreeMismatch { expected: usize, found: usize },
    #[error("generators are generically dependent: rank {rank} < {count} generators")]
    RankDeficient { rank: usize, count: usize },
    #[error("generators are dependent at the point: rank {rank} < {expected}")]
    DependentAtPoint { rank: usize, expected: usize },
    #[error("vector {index} does not lie in the annihilator at the point")]
    NotInAnnihilator { index: usize },
    #[error("vectors {0} and {1} are not in involution")]
    NotIntegral(usize, usize),
    #[error("the form vanishes identically")]
    VanishingForm,
    #[error("the form vanishes at the point")]
    VanishingAtPoint,
    #[error("component along {0} depends on a fibre coordinate; not a base field")]
    NotBaseField(String),
    #[error("chart is not a first-order contact chart: {0}")]
    NotContactChart(String),
    #[error("system is not in graph form: {0}")]
    NotGraphForm(String),
    #[error("no graph form and no sample points supplied")]
    NoRestriction,
    #[error("point {0} does not lie on the equation locus")]
    PointOffLocus(usize),
    #[error("bracket {{f{0}, f{1}}} = {2} does not vanish")]
    BracketHypothesis(usize, usize, String),
    #[error("regularity fails: dF ^ w vanishes identically")]
    Irregular,
    #[error("forms do not make up a coframe: rank {rank} < {dim}")]
    NotCoframe { rank: usize, dim: usize },
    #[error("{0}")]
    Invalid(String),
    #[error("computation cancelled")]
    Cancelled,
}
