//! Grid sweeps shared by the shoot-and-scale solvers.

use crate::model::{split_branches_with, CurveMeta, CurvePoint, JumpRule, ProblemSpec, SolutionCurve, Terminal};

/// Execution options for independent per-point sweeps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepOptions {
    /// Worker count; `None` uses the global rayon pool, `Some(1)` runs
    /// sequentially.
    pub jobs: Option<usize>,
    pub jump: JumpRule,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            jobs: Some(1),
            jump: JumpRule::default(),
        }
    }
}

/// Maps `f` over `values`, in parallel when requested; output order always
/// follows `values`.
pub(crate) fn map_ordered<T, F>(values: &[f64], jobs: Option<usize>, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(f64) -> T + Sync,
{
    use rayon::prelude::*;
    match jobs {
        Some(1) => values.iter().map(|&v| f(v)).collect(),
        None => values.par_iter().map(|&v| f(v)).collect(),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| values.par_iter().map(|&v| f(v)).collect()),
            Err(_) => values.iter().map(|&v| f(v)).collect(),
        },
    }
}

/// Splits the full point list into branches, then keeps only branches made
/// of accepted points. Everything else goes to `meta.rejected`.
pub(crate) fn assemble<P, A>(
    points: Vec<CurvePoint>,
    problem: ProblemSpec,
    mut meta: CurveMeta,
    rule: JumpRule,
    extra_break: P,
    accept: A,
) -> SolutionCurve
where
    P: Fn(&CurvePoint, &CurvePoint) -> bool,
    A: Fn(Terminal) -> bool,
{
    let ranges = split_branches_with(&points, rule, extra_break);
    let mut kept = Vec::new();
    let mut branches = Vec::new();
    for range in ranges {
        let slice = &points[range];
        if accept(slice[0].terminal) {
            let start = kept.len();
            kept.extend_from_slice(slice);
            branches.push(start..kept.len());
        } else {
            meta.rejected.extend_from_slice(slice);
        }
    }
    SolutionCurve {
        points: kept,
        branches,
        problem,
        meta,
    }
}
