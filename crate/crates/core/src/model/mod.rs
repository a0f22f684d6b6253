//! Problem definitions, nonlinearities and curve data types.

mod curve;
pub mod expr;
mod nonlinearity;
mod problem;

use thiserror::Error;

pub use curve::{
    detect_folds, split_branches, split_branches_with, CurveMeta, CurvePoint, Fold, Grid, JumpRule, NewtonIterate,
    NewtonReport, SolutionCurve, Terminal,
};
pub use expr::{Expr, ParseError, ParseErrorKind, Var};
pub use nonlinearity::{catalog_names, parse_nonlinearity, Nonlinearity};
pub use problem::{Family, ProblemSpec};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("unknown catalog nonlinearity '{0}'")]
    UnknownCatalog(String),
    #[error("{0}")]
    Invalid(String),
}
