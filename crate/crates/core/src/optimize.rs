//! Bounded scalar maximisation and root bracketing.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Maximum {
    pub x: f64,
    pub value: f64,
    pub iterations: usize,
}

/// Golden-section search for the maximum of a unimodal `f` on `[lo, hi]`.
///
/// Stops once the bracket is narrower than `tol`. Only interior points are
/// evaluated, so `f` may be singular at the end points.
pub fn golden_max(mut f: impl FnMut(f64) -> f64, lo: f64, hi: f64, tol: f64) -> Maximum {
    let (mut a, mut b) = (lo.min(hi), lo.max(hi));
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    let mut iterations = 0;
    while b - a > tol && iterations < 500 {
        iterations += 1;
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
        // the interior points can coincide once the bracket hits rounding
        if c >= d {
            break;
        }
    }
    let (x, value) = if fc >= fd { (c, fc) } else { (d, fd) };
    Maximum { x, value, iterations }
}

/// Samples `f` on `samples` interior points, then runs golden-section search
/// on the two cells around the best sample. Robust against objectives that
/// are unimodal only near their maximum.
pub fn scan_golden_max(
    mut f: impl FnMut(f64) -> f64,
    lo: f64,
    hi: f64,
    samples: usize,
    tol: f64,
) -> Maximum {
    let samples = samples.max(3);
    let step = (hi - lo) / (samples + 1) as f64;
    let mut best = (0, f64::NEG_INFINITY);
    for k in 1..=samples {
        let v = f(lo + step * k as f64);
        if v > best.1 {
            best = (k, v);
        }
    }
    let centre = lo + step * best.0 as f64;
    golden_max(f, (centre - step).max(lo), (centre + step).min(hi), tol)
}

/// Bisection for a sign change of `f` on `[lo, hi]`.
/// Returns `None` when `f(lo)` and `f(hi)` have the same strict sign.
pub fn bisect(mut f: impl FnMut(f64) -> f64, lo: f64, hi: f64, tol: f64) -> Option<f64> {
    let (mut a, mut b) = (lo, hi);
    let (mut fa, fb) = (f(a), f(b));
    if fa == 0.0 {
        return Some(a);
    }
    if fb == 0.0 {
        return Some(b);
    }
    if fa.signum() == fb.signum() {
        return None;
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if (b - a).abs() <= tol || m == a || m == b {
            return Some(m);
        }
        let fm = f(m);
        if fm == 0.0 {
            return Some(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Some(0.5 * (a + b))
}

/// Vertex of the parabola through `(x−h, x, x+h)`. Exact when `f` is quadratic.
pub fn parabolic_vertex(mut f: impl FnMut(f64) -> f64, x: f64, h: f64) -> Option<f64> {
    let (fm, f0, fp) = (f(x - h), f(x), f(x + h));
    let curvature = fp - 2.0 * f0 + fm;
    if curvature == 0.0 || !curvature.is_finite() {
        return None;
    }
    Some(x - h * (fp - fm) / (2.0 * curvature))
}
