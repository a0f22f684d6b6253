//! Bracketed scalar root refinement.

/// Refines a root of `f` inside `[a, b]` with the Illinois variant of
/// regula falsi. `fa` and `fb` must have opposite signs (or one be zero).
///
/// Stops once `|f| <= ftol` and the bracket is narrower than `xtol`, or the
/// bracket cannot shrink further in floating point. Returns the bracket end
/// with the smaller residual.
pub fn illinois<F: FnMut(f64) -> f64>(
    mut f: F,
    mut a: f64,
    mut fa: f64,
    mut b: f64,
    mut fb: f64,
    xtol: f64,
    ftol: f64,
) -> (f64, f64) {
    if fa == 0.0 {
        return (a, fa);
    }
    if fb == 0.0 {
        return (b, fb);
    }
    let mut side = 0i8;
    for _ in 0..300 {
        let width = (b - a).abs();
        let best = if fa.abs() < fb.abs() { (a, fa) } else { (b, fb) };
        if (best.1.abs() <= ftol && width <= xtol) || width <= 4.0 * f64::EPSILON * a.abs().max(b.abs()) {
            return best;
        }
        let mut c = (a * fb - b * fa) / (fb - fa);
        // Fall back to bisection when the secant point is degenerate.
        let lo = a.min(b);
        let hi = a.max(b);
        if !c.is_finite() || c <= lo || c >= hi {
            c = 0.5 * (a + b);
        }
        let fc = f(c);
        if fc == 0.0 {
            return (c, fc);
        }
        if !fc.is_finite() {
            // Shrink towards the finite side by bisection.
            b = c;
            fb = fa.signum() * -f64::MIN_POSITIVE;
            continue;
        }
        if fc.signum() == fb.signum() {
            b = c;
            fb = fc;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            a = c;
            fa = fc;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        }
    }
    if fa.abs() < fb.abs() {
        (a, fa)
    } else {
        (b, fb)
    }
}
