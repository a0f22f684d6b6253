//! Adaptive Dormand–Prince 5(4) integration with dense output and events.
//!
//! The integrator is explicit and non-stiff. Every accepted step keeps the
//! coefficients of the free fourth-order interpolant, so the solution can be
//! evaluated anywhere in the covered interval after the fact. Events are
//! detected by a sign change of `g` across an accepted step and refined on the
//! interpolant.

use thiserror::Error;

use crate::roots::illinois;

/// Right-hand side `dy = rhs(t, y)` written into the output slice.
pub type Rhs<'a> = Box<dyn Fn(f64, &[f64], &mut [f64]) + 'a>;

/// Event functional `g(t, y)`.
pub type EventFn<'a> = Box<dyn Fn(f64, &[f64]) -> f64 + 'a>;

const MAX_STEPS: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub rel: f64,
    pub abs: f64,
    /// Residual tolerance on `|g|` at a reported event.
    pub event: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            rel: 1e-10,
            abs: 1e-12,
            event: 1e-12,
        }
    }
}

impl Tolerances {
    /// Same tolerances scaled by `factor` (event tolerance unchanged).
    pub fn scaled(self, factor: f64) -> Tolerances {
        Tolerances {
            rel: self.rel * factor,
            abs: self.abs * factor,
            event: self.event,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Any,
    Decreasing,
    Increasing,
}

impl Direction {
    fn crosses(self, before: f64, after: f64) -> bool {
        let down = before > 0.0 && after <= 0.0;
        let up = before < 0.0 && after >= 0.0;
        match self {
            Direction::Any => down || up,
            Direction::Decreasing => down,
            Direction::Increasing => up,
        }
    }
}

pub struct EventSpec<'a> {
    pub g: EventFn<'a>,
    pub direction: Direction,
    /// The event is ignored for `t < active_after`.
    pub active_after: f64,
}

impl<'a> EventSpec<'a> {
    pub fn new(g: impl Fn(f64, &[f64]) -> f64 + 'a, direction: Direction, active_after: f64) -> Self {
        EventSpec {
            g: Box::new(g),
            direction,
            active_after,
        }
    }
}

pub struct IvpSystem<'a> {
    pub dim: usize,
    pub rhs: Rhs<'a>,
    pub t0: f64,
    pub y0: Vec<f64>,
    pub t_end: f64,
    pub events: Vec<EventSpec<'a>>,
    /// Upper bound on the step size.
    pub max_step: f64,
}

impl<'a> IvpSystem<'a> {
    pub fn new(rhs: impl Fn(f64, &[f64], &mut [f64]) + 'a, t0: f64, y0: Vec<f64>, t_end: f64) -> Self {
        IvpSystem {
            dim: y0.len(),
            rhs: Box::new(rhs),
            t0,
            y0,
            t_end,
            events: Vec::new(),
            max_step: f64::INFINITY,
        }
    }

    pub fn with_event(mut self, event: EventSpec<'a>) -> Self {
        self.events.push(event);
        self
    }

    pub fn with_max_step(mut self, h: f64) -> Self {
        self.max_step = h;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OdeError {
    #[error("system dimension must be at least 1 and match y0")]
    Dimension,
    #[error("t_end must exceed t0")]
    EmptySpan,
    #[error("tolerances must be positive")]
    Tolerance,
    #[error("initial state is not finite")]
    NonFiniteStart,
}

/// How an integration ended.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Outcome {
    ReachedEnd,
    Event,
    /// The right-hand side produced non-finite values and the step could not
    /// be reduced further; `t` is the last good time.
    NonFiniteRhs {
        t: f64,
    },
    /// The error controller demanded a step below `1e-14` times the span.
    StepUnderflow {
        t: f64,
    },
    MaxSteps {
        t: f64,
    },
}

impl Outcome {
    pub fn is_failure(&self) -> bool {
        !matches!(self, Outcome::ReachedEnd | Outcome::Event)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EventHit {
    pub index: usize,
    pub t: f64,
    pub y: Vec<f64>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Stats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
}

/// Accepted steps of an integration together with their interpolants.
#[derive(Debug, Clone)]
pub struct DenseTrajectory {
    dim: usize,
    times: Vec<f64>,
    states: Vec<f64>,
    coeffs: Vec<f64>,
    end: f64,
    pub first_event: Option<EventHit>,
    pub outcome: Outcome,
    pub stats: Stats,
}

impl DenseTrajectory {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn t_start(&self) -> f64 {
        self.times[0]
    }

    /// Last covered time: the event location, the end of the span, or the
    /// last good time before a failure.
    pub fn t_final(&self) -> f64 {
        self.end
    }

    /// Step boundaries of the accepted steps.
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// State at the `i`-th step boundary.
    pub fn state(&self, i: usize) -> &[f64] {
        &self.states[i * self.dim..(i + 1) * self.dim]
    }

    pub fn final_state(&self) -> Vec<f64> {
        self.evaluate(self.end)
    }

    /// Interpolated state at `t`, clamped to the covered interval.
    pub fn evaluate(&self, t: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        self.evaluate_into(t, &mut out);
        out
    }

    pub fn evaluate_into(&self, t: f64, out: &mut [f64]) {
        let t = t.clamp(self.times[0], self.end);
        let steps = self.times.len() - 1;
        if steps == 0 {
            out.copy_from_slice(self.state(0));
            return;
        }
        let i = match self.times.partition_point(|&s| s <= t) {
            0 => 0,
            k => (k - 1).min(steps - 1),
        };
        let t0 = self.times[i];
        let h = self.times[i + 1] - t0;
        let theta = (t - t0) / h;
        let theta1 = 1.0 - theta;
        let d = self.dim;
        let c = &self.coeffs[i * 5 * d..(i + 1) * 5 * d];
        for (j, o) in out.iter_mut().enumerate() {
            let (r1, r2, r3, r4, r5) = (c[j], c[d + j], c[2 * d + j], c[3 * d + j], c[4 * d + j]);
            *o = r1 + theta * (r2 + theta1 * (r3 + theta * (r4 + theta1 * r5)));
        }
    }

    /// First `t >= t_from` where component `component` crosses `level`,
    /// located on the interpolant.
    pub fn first_root(&self, component: usize, level: f64, t_from: f64, xtol: f64) -> Option<f64> {
        let g = |t: f64| self.evaluate(t)[component] - level;
        let mut ta = t_from.max(self.times[0]);
        if ta >= self.end {
            return None;
        }
        let mut ga = g(ta);
        if ga == 0.0 {
            return Some(ta);
        }
        let start = self.times.partition_point(|&s| s <= ta);
        let mut knots: Vec<f64> = self.times[start..].iter().copied().filter(|&s| s < self.end).collect();
        knots.push(self.end);
        for tb in knots {
            let gb = g(tb);
            if ga.signum() != gb.signum() || gb == 0.0 {
                let (t, _) = illinois(g, ta, ga, tb, gb, xtol, 0.0);
                return Some(t);
            }
            ta = tb;
            ga = gb;
        }
        None
    }
}

// Dormand–Prince 5(4) tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

fn rms_norm(v: &[f64], scale: &[f64]) -> f64 {
    let sum: f64 = v.iter().zip(scale).map(|(x, s)| (x / s).powi(2)).sum();
    (sum / v.len() as f64).sqrt()
}

fn all_finite(v: &[f64]) -> bool {
    v.iter().all(|x| x.is_finite())
}

struct EventState {
    last: Option<(f64, f64)>,
}

/// Integrates `sys` until `t_end` or the earliest armed event.
///
/// Failures during integration (non-finite right-hand side, step underflow)
/// do not produce an `Err`; they are recorded in [`DenseTrajectory::outcome`]
/// and the trajectory up to the last good time is returned.
pub fn integrate(sys: &IvpSystem<'_>, tol: &Tolerances) -> Result<DenseTrajectory, OdeError> {
    let dim = sys.dim;
    if dim == 0 || sys.y0.len() != dim {
        return Err(OdeError::Dimension);
    }
    if !(sys.t_end > sys.t0) {
        return Err(OdeError::EmptySpan);
    }
    if !(tol.rel > 0.0 && tol.abs > 0.0 && tol.event > 0.0) {
        return Err(OdeError::Tolerance);
    }
    if !all_finite(&sys.y0) {
        return Err(OdeError::NonFiniteStart);
    }

    let span = sys.t_end - sys.t0;
    let h_min = 1e-14 * span.max(sys.t0.abs());
    let mut stats = Stats::default();
    let rhs = |t: f64, y: &[f64], out: &mut [f64], stats: &mut Stats| {
        (sys.rhs)(t, y, out);
        stats.rhs_evals += 1;
    };

    let mut traj = DenseTrajectory {
        dim,
        times: vec![sys.t0],
        states: sys.y0.clone(),
        coeffs: Vec::new(),
        end: sys.t0,
        first_event: None,
        outcome: Outcome::ReachedEnd,
        stats,
    };

    let mut t = sys.t0;
    let mut y = sys.y0.clone();
    let mut k1 = vec![0.0; dim];
    rhs(t, &y, &mut k1, &mut stats);
    if !all_finite(&k1) {
        traj.outcome = Outcome::NonFiniteRhs { t };
        traj.stats = stats;
        return Ok(traj);
    }

    let mut k2 = vec![0.0; dim];
    let mut k3 = vec![0.0; dim];
    let mut k4 = vec![0.0; dim];
    let mut k5 = vec![0.0; dim];
    let mut k6 = vec![0.0; dim];
    let mut k7 = vec![0.0; dim];
    let mut ys = vec![0.0; dim];
    let mut y1 = vec![0.0; dim];
    let mut err = vec![0.0; dim];
    let mut scale = vec![0.0; dim];

    // Initial step selection.
    let mut h = {
        for i in 0..dim {
            scale[i] = tol.abs + tol.rel * y[i].abs();
        }
        let d0 = rms_norm(&y, &scale);
        let d1 = rms_norm(&k1, &scale);
        let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        let h0 = h0.min(span);
        for i in 0..dim {
            ys[i] = y[i] + h0 * k1[i];
        }
        rhs(t + h0, &ys, &mut k2, &mut stats);
        for i in 0..dim {
            err[i] = (k2[i] - k1[i]) / h0;
        }
        let d2 = if all_finite(&k2) {
            rms_norm(&err, &scale)
        } else {
            f64::INFINITY
        };
        let dm = d1.max(d2);
        let h1 = if dm <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / dm).powf(0.2)
        };
        (100.0 * h0).min(h1)
    };
    h = h.min(sys.max_step).min(span).max(h_min);

    let mut events: Vec<EventState> = sys.events.iter().map(|_| EventState { last: None }).collect();
    let mut last_rejected = false;

    loop {
        if stats.accepted >= MAX_STEPS {
            traj.outcome = Outcome::MaxSteps { t };
            break;
        }
        let remaining = sys.t_end - t;
        let mut last_step = false;
        if h >= remaining {
            h = remaining;
            last_step = true;
        }

        for i in 0..dim {
            ys[i] = y[i] + h * A21 * k1[i];
        }
        rhs(t + C2 * h, &ys, &mut k2, &mut stats);
        for i in 0..dim {
            ys[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
        }
        rhs(t + C3 * h, &ys, &mut k3, &mut stats);
        for i in 0..dim {
            ys[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
        }
        rhs(t + C4 * h, &ys, &mut k4, &mut stats);
        for i in 0..dim {
            ys[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        }
        rhs(t + C5 * h, &ys, &mut k5, &mut stats);
        for i in 0..dim {
            ys[i] = y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
        }
        let t_new = if last_step { sys.t_end } else { t + h };
        rhs(t_new, &ys, &mut k6, &mut stats);
        for i in 0..dim {
            y1[i] = y[i] + h * (A71 * k1[i] + A73 * k3[i] + A74 * k4[i] + A75 * k5[i] + A76 * k6[i]);
        }
        rhs(t_new, &y1, &mut k7, &mut stats);

        let finite = all_finite(&y1) && all_finite(&k7) && all_finite(&k6);
        let err_norm = if finite {
            for i in 0..dim {
                err[i] = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                scale[i] = tol.abs + tol.rel * y[i].abs().max(y1[i].abs());
            }
            rms_norm(&err, &scale)
        } else {
            f64::NAN
        };

        if !err_norm.is_finite() {
            stats.rejected += 1;
            h *= 0.25;
            last_rejected = true;
            if h < h_min {
                traj.outcome = Outcome::NonFiniteRhs { t };
                break;
            }
            continue;
        }

        if err_norm > 1.0 {
            stats.rejected += 1;
            let fac = (0.9 * err_norm.powf(-0.2)).clamp(0.2, 1.0);
            h *= fac;
            last_rejected = true;
            if h < h_min {
                traj.outcome = Outcome::StepUnderflow { t };
                break;
            }
            continue;
        }

        // Accept the step and record its interpolant.
        stats.accepted += 1;
        traj.coeffs.extend_from_slice(&y);
        for i in 0..dim {
            traj.coeffs.push(y1[i] - y[i]);
        }
        for i in 0..dim {
            traj.coeffs.push(h * k1[i] - (y1[i] - y[i]));
        }
        for i in 0..dim {
            let ydiff = y1[i] - y[i];
            let bspl = h * k1[i] - ydiff;
            traj.coeffs.push(ydiff - h * k7[i] - bspl);
        }
        for i in 0..dim {
            traj.coeffs
                .push(h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]));
        }
        traj.times.push(t_new);
        traj.states.extend_from_slice(&y1);
        traj.end = t_new;

        let t_old = t;
        t = t_new;
        std::mem::swap(&mut y, &mut y1);
        std::mem::swap(&mut k1, &mut k7);

        // Event detection over [t_old, t].
        let mut hit: Option<(usize, f64)> = None;
        for (k, (spec, state)) in sys.events.iter().zip(events.iter_mut()).enumerate() {
            if t < spec.active_after {
                continue;
            }
            let (ta, ga) = match state.last {
                Some(prev) => prev,
                None => {
                    let ta = t_old.max(spec.active_after);
                    (ta, (spec.g)(ta, &traj.evaluate(ta)))
                }
            };
            let gb = (spec.g)(t, &y);
            state.last = Some((t, gb));
            if spec.direction.crosses(ga, gb) {
                let g = |s: f64| (spec.g)(s, &traj.evaluate(s));
                let xtol = tol.event * t.abs().max(1.0);
                let (ts, _) = illinois(g, ta, ga, t, gb, xtol, tol.event);
                if hit.is_none_or(|(_, best)| ts < best) {
                    hit = Some((k, ts));
                }
            }
        }
        if let Some((index, ts)) = hit {
            traj.end = ts;
            traj.first_event = Some(EventHit {
                index,
                t: ts,
                y: traj.evaluate(ts),
            });
            traj.outcome = Outcome::Event;
            break;
        }

        if last_step {
            traj.outcome = Outcome::ReachedEnd;
            break;
        }

        let mut fac = if err_norm == 0.0 {
            10.0
        } else {
            (0.9 * err_norm.powf(-0.2)).clamp(0.2, 10.0)
        };
        if last_rejected {
            fac = fac.min(1.0);
        }
        last_rejected = false;
        h = (h * fac).min(sys.max_step);
        if h < h_min {
            traj.outcome = Outcome::StepUnderflow { t };
            break;
        }
    }
    traj.stats = stats;
    Ok(traj)
}
