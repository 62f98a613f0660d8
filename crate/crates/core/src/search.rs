//! Derivative-free scalar maximization on an interval.
//!
//! Golden-section search, robust for the concave objectives produced by the
//! tilted minimization: endpoints are evaluated too (maxima sit on the
//! boundary in the degenerate regimes), and a single parabolic polish step
//! through the final bracket sharpens the value well past the interval
//! tolerance when the objective is smooth.

/// Result of [`golden_max`]: the best evaluated point, never an
/// interpolated one.
#[derive(Debug, Clone, Copy)]
pub struct GoldenResult {
    pub x: f64,
    pub value: f64,
    pub evaluations: usize,
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Maximizes `f` on `[lo, hi]`, shrinking the bracket to width `xtol`.
///
/// Returns the best point among all evaluations, which include both
/// endpoints and a final parabolic-fit candidate.
pub fn golden_max<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, xtol: f64) -> GoldenResult {
    assert!(hi >= lo, "invalid bracket [{lo}, {hi}]");
    assert!(xtol > 0.0, "xtol must be positive");

    let mut evals = 0usize;
    let mut best = (f64::NAN, f64::NEG_INFINITY);
    let consider = |x: f64, v: f64, best: &mut (f64, f64)| {
        // NaN never wins
        if v > best.1 {
            *best = (x, v);
        }
    };

    let v_lo = f(lo);
    evals += 1;
    consider(lo, v_lo, &mut best);
    if hi > lo {
        let v_hi = f(hi);
        evals += 1;
        consider(hi, v_hi, &mut best);
    }
    if hi - lo <= xtol {
        let mid = 0.5 * (lo + hi);
        if mid > lo && mid < hi {
            let v = f(mid);
            evals += 1;
            consider(mid, v, &mut best);
        }
        return GoldenResult {
            x: best.0,
            value: best.1,
            evaluations: evals,
        };
    }

    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    evals += 2;
    consider(x1, f1, &mut best);
    consider(x2, f2, &mut best);

    while b - a > xtol {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
            evals += 1;
            consider(x1, f1, &mut best);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
            evals += 1;
            consider(x2, f2, &mut best);
        }
    }

    // Parabolic polish: fit through the two interior points and the bracket
    // midpoint, then evaluate at the fitted vertex if it lands inside.
    let xm = 0.5 * (a + b);
    if xm != x1 && xm != x2 {
        let fm = f(xm);
        evals += 1;
        consider(xm, fm, &mut best);
        if let Some(xv) = parabola_vertex((x1, f1), (xm, fm), (x2, f2)) {
            if xv > a && xv < b && xv != x1 && xv != x2 && xv != xm {
                let fv = f(xv);
                evals += 1;
                consider(xv, fv, &mut best);
            }
        }
    }

    GoldenResult {
        x: best.0,
        value: best.1,
        evaluations: evals,
    }
}

/// Vertex of the parabola through three points, if it opens downward.
fn parabola_vertex(p1: (f64, f64), p2: (f64, f64), p3: (f64, f64)) -> Option<f64> {
    let (x1, y1) = p1;
    let (x2, y2) = p2;
    let (x3, y3) = p3;
    let d1 = (x2 - x1) * (y2 - y3);
    let d2 = (x2 - x3) * (y2 - y1);
    let denom = 2.0 * (d1 - d2);
    if denom == 0.0 || !denom.is_finite() {
        return None;
    }
    let num = (x2 - x1) * (x2 - x1) * (y2 - y3) - (x2 - x3) * (x2 - x3) * (y2 - y1);
    let xv = x2 - num / denom;
    // reject upward parabolas: the "vertex" would be the minimum
    let concave = {
        let s1 = (y2 - y1) / (x2 - x1);
        let s2 = (y3 - y2) / (x3 - x2);
        s2 < s1
    };
    if concave && xv.is_finite() {
        Some(xv)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_interior_maximum() {
        let f = |x: f64| -(x - 0.37).powi(2);
        let r = golden_max(f, 0.0, 1.0, 1e-4);
        assert!((r.x - 0.37).abs() < 1e-4);
        assert!(r.value > -1e-9);
    }

    #[test]
    fn polish_beats_the_interval_tolerance() {
        let f = |x: f64| -(x - 0.312345).powi(2);
        let r = golden_max(f, 0.0, 1.0, 1e-3);
        // a bare 1e-3 bracket would leave ~1e-7 value error; the parabolic
        // step takes a quadratic to machine precision
        assert!(r.value > -1e-14, "value = {}", r.value);
    }

    #[test]
    fn boundary_maximum_is_found() {
        let f = |x: f64| -x;
        let r = golden_max(f, 0.0, 1.0, 1e-4);
        assert_eq!(r.x, 0.0);
        assert_eq!(r.value, 0.0);

        let g = |x: f64| x;
        let r = golden_max(g, 0.0, 1.0, 1e-4);
        assert_eq!(r.x, 1.0);
    }

    #[test]
    fn degenerate_bracket() {
        let r = golden_max(|x| -x * x, 0.5, 0.5, 1e-4);
        assert_eq!(r.x, 0.5);
        assert_eq!(r.evaluations, 1);
    }

    #[test]
    fn flat_function() {
        let r = golden_max(|_| 2.5, 0.0, 1.0, 1e-4);
        assert_eq!(r.value, 2.5);
    }
}
