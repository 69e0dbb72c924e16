use crate::group::GroupTableError;
use crate::words::WordError;

#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
pub enum Error {
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    GroupTable(#[from] GroupTableError),
    #[error("coordinate {0} is outside the stored window and no extension seed is set")]
    OutsideWindow(String),
    #[error("variable read coordinate {0} outside the enumeration window")]
    EscapesWindow(String),
    #[error("enumeration needs {states} window states, budget is {budget}")]
    BudgetExceeded { states: u128, budget: u64 },
    #[error("base coordinate {0} is missing from the window")]
    MissingBase(String),
    #[error("window too small: {0}")]
    WindowTooSmall(String),
    #[error("scan undetermined: {0}")]
    Undetermined(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("no solution: {0}")]
    NoSolution(String),
    #[error("multiple solutions: {0}")]
    Ambiguous(String),
    #[error("mismatch: {0}")]
    Mismatch(String),
    #[error("action is not free: {0}")]
    NotFree(String),
}

impl Error {
    pub fn is_undetermined(&self) -> bool {
        matches!(self, Error::Undetermined(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
