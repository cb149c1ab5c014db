use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid piecewise polynomial: {0}")]
    InvalidPoly(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("merged degree {degree} exceeds the cap {cap}")]
    DegreeCapExceeded { degree: usize, cap: usize },
    #[error("total integral {integral:e} exceeds the mean tolerance {tol:e}")]
    MeanNotZero { integral: f64, tol: f64 },
    #[error("quadrature tolerance not met: error bound {err_bound:e} above target {target:e}")]
    ToleranceNotMet { err_bound: f64, target: f64 },
    #[error("smoothness order {found} is below the required {required}")]
    InsufficientSmoothness { found: i32, required: i32 },
    #[error("sequence has Sobolev order 0; delta is undefined")]
    OrderZero,
    #[error("sequence '{label}' failed its Cauchy diagnostics at order {order}")]
    NotCauchy { label: String, order: usize },
    #[error("scale ladder has {available} usable widths below {width:e}, need {needed}")]
    LadderTooShallow {
        width: f64,
        available: usize,
        needed: usize,
    },
    #[error("budget {budget:e} unreachable before the width floor: {reason}")]
    BudgetUnreachable { budget: f64, reason: String },
    #[error("i/o error: {0}")]
    Io(String),
}
