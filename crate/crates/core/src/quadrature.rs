//! Adaptive Simpson quadrature for one-dimensional integrals along segments.

/// Default absolute tolerance per integral.
pub const DEFAULT_TOL: f64 = 1e-10;

const INITIAL_PANELS: usize = 16;
const MAX_DEPTH: u32 = 40;

/// An integral value with the accumulated error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error_estimate: f64,
}

fn simpson(fa: f64, fm: f64, fb: f64, width: f64) -> f64 {
    width / 6.0 * (fa + 4.0 * fm + fb)
}

struct Panel {
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
}

fn refine<F: Fn(f64) -> f64>(f: &F, p: Panel, tol: f64, depth: u32) -> Integral {
    let m = 0.5 * (p.a + p.b);
    let (lm, rm) = (0.5 * (p.a + m), 0.5 * (m + p.b));
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(p.fa, flm, p.fm, m - p.a);
    let right = simpson(p.fm, frm, p.fb, p.b - m);
    let delta = left + right - p.whole;
    if depth >= MAX_DEPTH || delta.abs() <= 15.0 * tol {
        return Integral {
            value: left + right + delta / 15.0,
            error_estimate: delta.abs() / 15.0,
        };
    }
    let l = refine(
        f,
        Panel {
            a: p.a,
            b: m,
            fa: p.fa,
            fm: flm,
            fb: p.fm,
            whole: left,
        },
        0.5 * tol,
        depth + 1,
    );
    let r = refine(
        f,
        Panel {
            a: m,
            b: p.b,
            fa: p.fm,
            fm: frm,
            fb: p.fb,
            whole: right,
        },
        0.5 * tol,
        depth + 1,
    );
    Integral {
        value: l.value + r.value,
        error_estimate: l.error_estimate + r.error_estimate,
    }
}

/// Integrates `f` over `[a, b]` to absolute tolerance `tol`.
///
/// The interval is first cut into a fixed number of panels, so integrands
/// with kinks that a single Simpson rule happens to integrate exactly are
/// still resolved.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Integral {
    let mut total = Integral {
        value: 0.0,
        error_estimate: 0.0,
    };
    if b <= a {
        return total;
    }
    let width = (b - a) / INITIAL_PANELS as f64;
    let panel_tol = tol / INITIAL_PANELS as f64;
    let mut fa = f(a);
    for k in 0..INITIAL_PANELS {
        let lo = a + k as f64 * width;
        let hi = if k + 1 == INITIAL_PANELS {
            b
        } else {
            lo + width
        };
        let fm = f(0.5 * (lo + hi));
        let fb = f(hi);
        let part = refine(
            &f,
            Panel {
                a: lo,
                b: hi,
                fa,
                fm,
                fb,
                whole: simpson(fa, fm, fb, hi - lo),
            },
            panel_tol,
            0,
        );
        total.value += part.value;
        total.error_estimate += part.error_estimate;
        fa = fb;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn polynomials_are_exact() {
        let r = integrate(|x| x * x * x - 2.0 * x, 0.0, 2.0, 1e-12);
        assert_abs_diff_eq!(r.value, 0.0, epsilon = 1e-13);
    }

    #[test]
    fn kinked_integrand() {
        let r = integrate(|x: f64| (x - 1.0 / 3.0).abs(), 0.0, 1.0, 1e-12);
        assert_abs_diff_eq!(r.value, 5.0 / 18.0, epsilon = 1e-11);
    }

    #[test]
    fn smooth_integrand() {
        let r = integrate(f64::sin, 0.0, std::f64::consts::PI, 1e-10);
        assert_abs_diff_eq!(r.value, 2.0, epsilon = 1e-9);
    }

    #[test]
    fn empty_interval() {
        assert_eq!(integrate(|x| x, 0.5, 0.5, 1e-10).value, 0.0);
    }
}
