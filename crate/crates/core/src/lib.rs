//! Global solution curves for nonlinear boundary-value problems.
//!
//! Every solver in this crate traces a bifurcation diagram by sweeping a
//! *global parameter*: a scalar that identifies a solution pair uniquely, so
//! each curve point is computed on its own and turns in the curve need no
//! special handling.
//!
//! | problem | global parameter | module |
//! |---|---|---|
//! | radial Dirichlet / Neumann, autonomous `f(u)` | `u(0)` | [`shootscale`] |
//! | radial p-Laplace Dirichlet | `u(0)` | [`plaplace`] |
//! | radial Dirichlet, `f(r, u)` | `u(0)` | [`nonauto`] |
//! | clamped beam `u'''' = λ f(u)` | `u(0)` | [`beam`] |
//! | `u'' + f(u) = μ sin kx + e(x)` on `(0, π)` | k-th harmonic `ξ` | [`harmonic`] |
//!
//! All of them sit on the adaptive Dormand–Prince integrator in [`ode`].

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::redundant_guards)]

pub mod beam;
pub mod harmonic;
pub mod model;
pub mod nonauto;
pub mod ode;
pub mod plaplace;
pub mod quadrature;
pub mod roots;
pub mod shootscale;
mod sweep;

pub use model::{
    catalog_names, detect_folds, parse_nonlinearity, split_branches, CurveMeta, CurvePoint, Expr, Family, Fold, Grid,
    JumpRule, ModelError, NewtonIterate, NewtonReport, Nonlinearity, ParseError, ProblemSpec, SolutionCurve, Terminal,
    Var,
};
pub use ode::{integrate, DenseTrajectory, Direction, EventSpec, IvpSystem, Outcome, Tolerances};
pub use sweep::SweepOptions;
