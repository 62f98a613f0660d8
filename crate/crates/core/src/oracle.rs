//! Independent references for certifying the iterative solvers on small
//! instances: the classical rate-distortion iteration (with a slope-parameter
//! bisection to hit a distortion target), the closed form for a binary source
//! under Hamming distortion, and dense simplex-grid minimizers for the
//! exponent objectives.
//!
//! None of these share code with the engine or the outer searches; that is
//! the point.

use crate::outer::OperatingPoint;
use crate::prob::{kl_divergence, Problem};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("grid step {0} must lie in (0, 0.1]")]
    BadStep(f64),
    #[error("constraint slack {0} must be >= 0")]
    BadSlack(f64),
    #[error("{oracle} supports at most {max} {what}, got {got}")]
    AlphabetTooLarge {
        oracle: &'static str,
        what: &'static str,
        max: usize,
        got: usize,
    },
}

/// Resolution of a grid oracle.
#[derive(Debug, Clone, Copy)]
pub struct GridSpec {
    step: f64,
    slack: Option<f64>,
}

impl GridSpec {
    pub fn new(step: f64) -> Result<Self, OracleError> {
        if !(step > 0.0 && step <= 0.1) {
            return Err(OracleError::BadStep(step));
        }
        Ok(Self { step, slack: None })
    }

    /// Overrides the feasibility slack used when a distortion constraint is
    /// checked at grid resolution (default: `step · d_max`).
    pub fn with_slack(mut self, slack: f64) -> Result<Self, OracleError> {
        if !(slack >= 0.0) {
            return Err(OracleError::BadSlack(slack));
        }
        self.slack = Some(slack);
        Ok(self)
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    fn slack_for(&self, d_max: f64) -> f64 {
        self.slack.unwrap_or(self.step * d_max)
    }
}

/// Binary entropy in nats, `h(x) = −x ln x − (1−x) ln(1−x)`.
pub fn binary_entropy(x: f64) -> f64 {
    assert!((0.0..=1.0).contains(&x));
    let mut h = 0.0;
    if x > 0.0 {
        h -= x * x.ln();
    }
    if x < 1.0 {
        h -= (1.0 - x) * (1.0 - x).ln();
    }
    h
}

/// Closed-form rate-distortion function of a binary source `(p, 1−p)` under
/// Hamming distortion: `h(min(p,1−p)) − h(Δ)` while the distortion target is
/// below `min(p,1−p)`, zero beyond it. Nats.
pub fn analytic_binary_hamming_rd(p: f64, delta: f64) -> f64 {
    assert!(p > 0.0 && p < 1.0, "p must lie in (0,1)");
    assert!(delta >= 0.0);
    let pm = p.min(1.0 - p);
    if delta >= pm {
        0.0
    } else {
        binary_entropy(pm) - binary_entropy(delta)
    }
}

/// `R(Δ|P)` by the classical alternating-minimization iteration for a fixed
/// slope, wrapped in a bisection that drives the achieved distortion to `Δ`.
///
/// Returns `+∞` when `Δ` is below the minimum achievable distortion (possible
/// only without the zero-row property). Accuracy at the returned point is set
/// by `tol` via the inner iteration plus a tangent-line correction in the
/// slope parameter.
pub fn ba_rate_distortion(problem: &Problem, delta: f64, tol: f64, max_iters: usize) -> f64 {
    assert!(delta >= 0.0, "delta must be >= 0");
    let nx = problem.nx();
    let ny = problem.ny();
    let p = problem.source().as_slice();
    let d = problem.distortion();

    // Minimum achievable distortion: the best reproduction for each symbol.
    let d_min: f64 = (0..nx)
        .map(|x| {
            p[x] * (0..ny)
                .map(|y| d.get(x, y))
                .fold(f64::INFINITY, f64::min)
        })
        .sum();
    if delta < d_min - 1e-12 {
        return f64::INFINITY;
    }

    // Rate hits zero once a single reproduction symbol meets the target.
    let d_zero_rate: f64 = (0..ny)
        .map(|y| (0..nx).map(|x| p[x] * d.get(x, y)).sum::<f64>())
        .fold(f64::INFINITY, f64::min);
    if delta >= d_zero_rate - 1e-15 {
        return 0.0;
    }

    // Bisect on the slope: achieved distortion decreases as the slope grows.
    let mut lo = 0.0_f64;
    let mut hi = 1e4_f64;
    let mut s = 0.5 * (lo + hi);
    let mut rate = 0.0;
    let mut dist = d_zero_rate;
    for _ in 0..200 {
        s = 0.5 * (lo + hi);
        let (r, dd) = ba_fixed_slope(p, d, nx, ny, s, tol, max_iters);
        rate = r;
        dist = dd;
        if (dist - delta).abs() <= 1e-9 {
            break;
        }
        if dist > delta {
            lo = s;
        } else {
            hi = s;
        }
        if hi - lo <= 1e-12 * s.max(1.0) {
            break;
        }
    }
    // First-order correction along the curve: dR/dΔ = −s at the solved point.
    (rate + s * (dist - delta)).max(0.0)
}

/// One fixed-slope alternating minimization: returns `(rate, distortion)` on
/// the rate-distortion curve at slope `−s`.
fn ba_fixed_slope(
    p: &[f64],
    d: &crate::prob::DistortionTable,
    nx: usize,
    ny: usize,
    s: f64,
    tol: f64,
    max_iters: usize,
) -> (f64, f64) {
    let mut a = vec![0.0; nx * ny];
    for x in 0..nx {
        for y in 0..ny {
            a[x * ny + y] = (-s * d.get(x, y)).exp();
        }
    }
    let mut qy = vec![1.0 / ny as f64; ny];
    let inner_tol = (tol * 1e-4).clamp(1e-16, 1e-12);
    let mut c = vec![0.0; nx];
    for _ in 0..max_iters {
        for x in 0..nx {
            let mut cx = 0.0;
            for y in 0..ny {
                cx += qy[y] * a[x * ny + y];
            }
            c[x] = cx.max(POS_MIN);
        }
        let mut next = vec![0.0; ny];
        for x in 0..nx {
            if p[x] == 0.0 {
                continue;
            }
            let w = p[x] / c[x];
            for y in 0..ny {
                next[y] += w * qy[y] * a[x * ny + y];
            }
        }
        let norm: f64 = next.iter().sum();
        for v in &mut next {
            *v /= norm;
        }
        let change = qy
            .iter()
            .zip(&next)
            .map(|(o, n)| (o - n).abs())
            .fold(0.0, f64::max);
        qy = next;
        if change < inner_tol {
            break;
        }
    }
    // Distortion and rate of the induced test channel V(y|x) ∝ q_Y(y)·a(x,y).
    for x in 0..nx {
        let mut cx = 0.0;
        for y in 0..ny {
            cx += qy[y] * a[x * ny + y];
        }
        c[x] = cx.max(POS_MIN);
    }
    let mut dist = 0.0;
    for x in 0..nx {
        if p[x] == 0.0 {
            continue;
        }
        for y in 0..ny {
            let v = qy[y] * a[x * ny + y] / c[x];
            dist += p[x] * v * d.get(x, y);
        }
    }
    // I(P, V) = −Σ_x P(x) ln c(x) − s·E[d] for this V.
    let mut rate = -s * dist;
    for x in 0..nx {
        if p[x] > 0.0 {
            rate -= p[x] * c[x].ln();
        }
    }
    (rate.max(0.0), dist)
}

const POS_MIN: f64 = 1e-300;

fn is_binary_hamming(problem: &Problem) -> bool {
    problem.nx() == 2
        && problem.ny() == 2
        && problem.distortion().get(0, 0) == 0.0
        && problem.distortion().get(1, 1) == 0.0
        && problem.distortion().get(0, 1) == 1.0
        && problem.distortion().get(1, 0) == 1.0
}

/// Rate-distortion value for a swapped source distribution on the same
/// reproduction alphabet, analytic on the binary Hamming instance and via
/// the iterative reference otherwise.
fn inner_rd(problem: &Problem, q_x: &[f64], delta: f64) -> f64 {
    if is_binary_hamming(problem) {
        if q_x[0] <= 0.0 || q_x[0] >= 1.0 {
            // degenerate source: reproduce its single symbol
            return 0.0;
        }
        return analytic_binary_hamming_rd(q_x[0], delta);
    }
    let source = match crate::prob::SourcePmf::new(q_x.to_vec()) {
        Ok(s) => s,
        Err(_) => return f64::INFINITY,
    };
    let swapped = Problem::new(source, problem.distortion().clone())
        .expect("same alphabet dimensions");
    ba_rate_distortion(&swapped, delta, 1e-9, 20_000)
}

/// Brute-force reference for the exponent in its source-distribution form:
/// minimizes `|R(Δ|q_X) − R|⁺ + D(q_X||P)` over a dense grid of source
/// distributions.
///
/// Exhaustive for `|X| = 2` (1-D grid) and `|X| = 3` (2-simplex); larger
/// alphabets are refused.
pub fn grid_gck(
    problem: &Problem,
    point: OperatingPoint,
    grid: GridSpec,
) -> Result<f64, OracleError> {
    let nx = problem.nx();
    if nx > 3 {
        return Err(OracleError::AlphabetTooLarge {
            oracle: "grid_gck",
            what: "source symbols",
            max: 3,
            got: nx,
        });
    }
    let p = problem.source().as_slice();
    let n = (1.0 / grid.step()).round().max(1.0) as usize;
    let mut best = f64::INFINITY;
    let mut eval = |q_x: &[f64]| {
        let r = inner_rd(problem, q_x, point.delta());
        let excess = (r - point.rate()).max(0.0);
        if excess.is_finite() {
            let v = excess + kl_divergence(q_x, p);
            if v < best {
                best = v;
            }
        }
    };
    match nx {
        1 => eval(&[1.0]),
        2 => {
            for i in 0..=n {
                let a = i as f64 / n as f64;
                eval(&[a, 1.0 - a]);
            }
        }
        3 => {
            for i in 0..=n {
                for j in 0..=(n - i) {
                    let a = i as f64 / n as f64;
                    let b = j as f64 / n as f64;
                    // subtraction can round a boundary coordinate to -1e-17,
                    // which validation would reject
                    eval(&[a, b, (1.0 - a - b).max(0.0)]);
                }
            }
        }
        _ => unreachable!(),
    }
    Ok(best)
}

/// Walks all tables with `cells ≤ 4` entries on a simplex grid of
/// resolution `1/n` (entries are exact multiples of `1/n` summing to 1).
fn for_each_simplex(cells: usize, n: usize, mut f: impl FnMut(&[f64])) {
    debug_assert!((1..=4).contains(&cells));
    let nf = n as f64;
    let mut q = [0.0f64; 4];
    match cells {
        1 => f(&[1.0]),
        2 => {
            for i in 0..=n {
                q[0] = i as f64 / nf;
                q[1] = (n - i) as f64 / nf;
                f(&q[..2]);
            }
        }
        3 => {
            for i in 0..=n {
                for j in 0..=(n - i) {
                    q[0] = i as f64 / nf;
                    q[1] = j as f64 / nf;
                    q[2] = (n - i - j) as f64 / nf;
                    f(&q[..3]);
                }
            }
        }
        4 => {
            for i in 0..=n {
                for j in 0..=(n - i) {
                    for k in 0..=(n - i - j) {
                        q[0] = i as f64 / nf;
                        q[1] = j as f64 / nf;
                        q[2] = k as f64 / nf;
                        q[3] = (n - i - j - k) as f64 / nf;
                        f(&q);
                    }
                }
            }
        }
        _ => unreachable!(),
    }
}

/// Marginals of a flat row-major table, on stack buffers (shapes here never
/// exceed 4 cells).
fn small_marginals(q: &[f64], nx: usize, ny: usize) -> ([f64; 4], [f64; 4]) {
    let mut qx = [0.0f64; 4];
    let mut qy = [0.0f64; 4];
    for x in 0..nx {
        for y in 0..ny {
            let v = q[x * ny + y];
            qx[x] += v;
            qy[y] += v;
        }
    }
    (qx, qy)
}

/// `λ·I + D(q_X||P)` pieces shared by the joint-grid objectives; returns
/// `(mutual information, source divergence)`, the latter `+∞` off the
/// support of `P`.
fn small_information_terms(q: &[f64], nx: usize, ny: usize, p: &[f64]) -> (f64, f64) {
    let (qx, qy) = small_marginals(q, nx, ny);
    let mut mi = 0.0;
    for x in 0..nx {
        for y in 0..ny {
            let v = q[x * ny + y];
            if v > 0.0 {
                mi += v * (v / (qx[x] * qy[y])).ln();
            }
        }
    }
    let mut dv = 0.0;
    for x in 0..nx {
        if qx[x] > 0.0 {
            if p[x] <= 0.0 {
                return (mi.max(0.0), f64::INFINITY);
            }
            dv += qx[x] * (qx[x] / p[x]).ln();
        }
    }
    (mi.max(0.0), dv)
}

fn small_expected_distortion(q: &[f64], d: &[f64]) -> f64 {
    q.iter().zip(d).map(|(&a, &b)| a * b).sum()
}

/// Brute-force reference for the exponent in its joint-distribution form:
/// minimizes `|I(q) − R|⁺ + D(q_X||P)` over a dense grid of joint tables
/// with `E_q[d] ≤ Δ`.
///
/// Grid points just outside the constraint (within `slack`) are pulled back
/// onto the boundary by mixing toward the minimum-distortion coupling with
/// the same `q_X`, so every evaluated table is genuinely feasible and the
/// result is a true upper bound. Supports 2×2 alphabets only. Returns `+∞`
/// if nothing on the grid is feasible.
pub fn grid_joint_g(
    problem: &Problem,
    point: OperatingPoint,
    grid: GridSpec,
) -> Result<f64, OracleError> {
    let cells = problem.nx() * problem.ny();
    if cells > 4 {
        return Err(OracleError::AlphabetTooLarge {
            oracle: "grid_joint_g",
            what: "joint cells",
            max: 4,
            got: cells,
        });
    }
    let nx = problem.nx();
    let ny = problem.ny();
    let p = problem.source().as_slice();
    let d = problem.distortion().as_slice();
    let slack = grid.slack_for(problem.distortion().d_max());
    let n = (1.0 / grid.step()).round().max(1.0) as usize;
    // Cheapest column per source symbol, for the pull-back anchor.
    let cheapest: Vec<usize> = (0..nx)
        .map(|x| {
            (0..ny)
                .min_by(|&a, &b| d[x * ny + a].total_cmp(&d[x * ny + b]))
                .unwrap()
        })
        .collect();
    let mut best = f64::INFINITY;
    for_each_simplex(cells, n, |q| {
        let ed = small_expected_distortion(q, d);
        let delta = point.delta();
        let mut candidate = [0.0f64; 4];
        let feasible = if ed <= delta {
            candidate[..cells].copy_from_slice(q);
            true
        } else if ed <= delta + slack {
            // anchor: same q_X, all conditional mass on the cheapest column
            let (qx, _) = small_marginals(q, nx, ny);
            let mut anchor = [0.0f64; 4];
            for x in 0..nx {
                anchor[x * ny + cheapest[x]] = qx[x];
            }
            let ed_anchor = small_expected_distortion(&anchor[..cells], d);
            if ed_anchor <= delta {
                let theta = (ed - delta) / (ed - ed_anchor);
                for i in 0..cells {
                    candidate[i] = (1.0 - theta) * q[i] + theta * anchor[i];
                }
                true
            } else {
                false
            }
        } else {
            false
        };
        if feasible {
            let (mi, dv) = small_information_terms(&candidate[..cells], nx, ny, p);
            let v = (mi - point.rate()).max(0.0) + dv;
            if v < best {
                best = v;
            }
        }
    });
    Ok(best)
}

/// Brute-force reference for the tilted objective: minimizes
/// `λ·I + D(q_X||P) + μ·E[d]` over a dense grid of joint tables.
/// Supports 2×2 alphabets only.
pub fn grid_omega(
    problem: &Problem,
    tilt: crate::engine::TiltParams,
    grid: GridSpec,
) -> Result<f64, OracleError> {
    let cells = problem.nx() * problem.ny();
    if cells > 4 {
        return Err(OracleError::AlphabetTooLarge {
            oracle: "grid_omega",
            what: "joint cells",
            max: 4,
            got: cells,
        });
    }
    let nx = problem.nx();
    let ny = problem.ny();
    let p = problem.source().as_slice();
    let d = problem.distortion().as_slice();
    let lam = tilt.lambda();
    let mu = tilt.mu();
    let n = (1.0 / grid.step()).round().max(1.0) as usize;
    let mut best = f64::INFINITY;
    for_each_simplex(cells, n, |q| {
        let (mi, dv) = small_information_terms(q, nx, ny, p);
        let v = lam * mi + dv + mu * small_expected_distortion(q, d);
        if v < best {
            best = v;
        }
    });
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::TiltParams;
    use crate::prob::{DistortionTable, SourcePmf};

    fn hamming_problem(p: Vec<f64>) -> Problem {
        Problem::new(SourcePmf::new(p).unwrap(), DistortionTable::hamming(2)).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn analytic_rd_values() {
        // ln 2 − h(0.1) = 0.3680642071684971
        assert!(close(
            analytic_binary_hamming_rd(0.5, 0.1),
            0.3680642071684971,
            1e-12
        ));
        assert_eq!(analytic_binary_hamming_rd(0.5, 0.5), 0.0);
        assert_eq!(analytic_binary_hamming_rd(0.2, 0.3), 0.0);
    }

    #[test]
    fn ba_matches_analytic_on_binary_hamming() {
        let prob = hamming_problem(vec![0.5, 0.5]);
        let r = ba_rate_distortion(&prob, 0.1, 1e-9, 20_000);
        assert!(close(r, analytic_binary_hamming_rd(0.5, 0.1), 1e-7));
    }

    #[test]
    fn ba_edge_cases() {
        let prob = hamming_problem(vec![0.5, 0.5]);
        // vacuous constraint
        assert_eq!(ba_rate_distortion(&prob, 1.0, 1e-9, 20_000), 0.0);
        // zero distortion: rate is the source entropy, ln 2
        let r0 = ba_rate_distortion(&prob, 0.0, 1e-9, 20_000);
        assert!(close(r0, std::f64::consts::LN_2, 1e-6), "R(0) = {r0}");
        // infeasible target without a zero-row table
        let bad = Problem::new(
            SourcePmf::new(vec![0.5, 0.5]).unwrap(),
            DistortionTable::new(vec![vec![0.5, 1.0], vec![1.0, 0.5]]).unwrap(),
        )
        .unwrap();
        assert_eq!(ba_rate_distortion(&bad, 0.1, 1e-9, 20_000), f64::INFINITY);
    }

    #[test]
    fn gck_zero_on_and_above_the_curve() {
        let prob = hamming_problem(vec![0.5, 0.5]);
        let grid = GridSpec::new(1e-3).unwrap();
        // R above R(Δ|P): the P grid point gives 0
        let point = OperatingPoint::new(0.4, 0.1).unwrap();
        let v = grid_gck(&prob, point, grid).unwrap();
        assert!(v.abs() < 1e-9, "v = {v}");
        // vacuous distortion: R(Δ|q_X) = 0 for every q_X
        let point = OperatingPoint::new(0.05, 1.0).unwrap();
        let v = grid_gck(&prob, point, grid).unwrap();
        assert!(v.abs() < 1e-9);
    }

    #[test]
    fn gck_below_the_curve_matches_closed_form() {
        // uniform binary Hamming collapses to |R(Δ|P) − R|⁺ exactly
        let prob = hamming_problem(vec![0.5, 0.5]);
        let grid = GridSpec::new(1e-4).unwrap();
        let point = OperatingPoint::new(0.2, 0.1).unwrap();
        let v = grid_gck(&prob, point, grid).unwrap();
        let expect = analytic_binary_hamming_rd(0.5, 0.1) - 0.2;
        assert!(close(v, expect, 1e-9), "v = {v}, expect = {expect}");
    }

    #[test]
    fn joint_grid_edges() {
        let prob = hamming_problem(vec![0.5, 0.5]);
        let grid = GridSpec::new(5e-3).unwrap();
        // vacuous constraint, large rate: product coupling at q_X = P wins
        let v = grid_joint_g(&prob, OperatingPoint::new(1.0, 1.0).unwrap(), grid).unwrap();
        assert!(v.abs() < 1e-12);
        // the deterministic zero-distortion coupling stays feasible at Δ=0
        let v = grid_joint_g(&prob, OperatingPoint::new(0.2, 0.0).unwrap(), grid).unwrap();
        assert!(v <= std::f64::consts::LN_2 - 0.2 + 1e-9);
    }

    #[test]
    fn slack_override_tightens_the_feasible_set() {
        let prob = hamming_problem(vec![0.5, 0.5]);
        let point = OperatingPoint::new(0.2, 0.1).unwrap();
        let relaxed = GridSpec::new(5e-3).unwrap();
        let hard = GridSpec::new(5e-3).unwrap().with_slack(0.0).unwrap();
        let a = grid_joint_g(&prob, point, relaxed).unwrap();
        let b = grid_joint_g(&prob, point, hard).unwrap();
        // shrinking the candidate set can only raise the minimum
        assert!(b >= a - 1e-12, "hard {b} under relaxed {a}");
        assert!(GridSpec::new(5e-3).unwrap().with_slack(-0.1).is_err());
        assert!(GridSpec::new(0.2).is_err());
    }

    #[test]
    fn joint_grid_agrees_with_gck_grid() {
        let prob = hamming_problem(vec![0.5, 0.5]);
        let point = OperatingPoint::new(0.2, 0.1).unwrap();
        let fine = GridSpec::new(1e-4).unwrap();
        let coarse = GridSpec::new(2e-3).unwrap();
        let a = grid_gck(&prob, point, fine).unwrap();
        let b = grid_joint_g(&prob, point, coarse).unwrap();
        assert!(close(a, b, 1e-3), "gck = {a}, joint = {b}");
    }

    #[test]
    fn omega_grid_trivial_cases() {
        let prob = hamming_problem(vec![0.75, 0.25]);
        let grid = GridSpec::new(5e-3).unwrap();
        // μ = 0: product grid point nearest q_X = P gives ~0
        let v = grid_omega(&prob, TiltParams::new(0.0, 0.5).unwrap(), grid).unwrap();
        assert!(v < 1e-4, "v = {v}");
        // λ = 0 with a zero in every row: mass on the free cells
        let v = grid_omega(&prob, TiltParams::new(2.0, 0.0).unwrap(), grid).unwrap();
        assert!(v < 1e-9, "v = {v}");
    }

    #[test]
    fn degenerate_shapes_are_handled() {
        // single source symbol: the only marginal is the point mass, so the
        // exponent collapses to |R(Δ|δ) − R|⁺ = 0
        let prob = Problem::new(
            SourcePmf::new(vec![1.0]).unwrap(),
            DistortionTable::new(vec![vec![0.0, 1.0]]).unwrap(),
        )
        .unwrap();
        let grid = GridSpec::new(0.01).unwrap();
        let v = grid_gck(&prob, OperatingPoint::new(0.1, 0.2).unwrap(), grid).unwrap();
        assert_eq!(v, 0.0);
        let v = grid_joint_g(&prob, OperatingPoint::new(0.1, 0.2).unwrap(), grid).unwrap();
        assert!(v.abs() < 1e-12);
        let v = grid_omega(&prob, TiltParams::new(2.0, 0.5).unwrap(), grid).unwrap();
        assert!(v.abs() < 1e-12);

        // single reproduction symbol: no rate can be saved, the tilted value
        // trades divergence against distortion on a 1-simplex
        let prob = Problem::new(
            SourcePmf::new(vec![0.6, 0.4]).unwrap(),
            DistortionTable::new(vec![vec![0.3], vec![0.0]]).unwrap(),
        )
        .unwrap();
        let tilt = TiltParams::new(1.5, 0.7).unwrap();
        let grid = GridSpec::new(1e-3).unwrap();
        let reference = grid_omega(&prob, tilt, grid).unwrap();
        let engine = crate::engine::solve_omega(
            &prob,
            tilt,
            &crate::engine::SolveOptions::default(),
        )
        .unwrap()
        .omega_value;
        assert!(
            close(engine, reference, 1e-4),
            "engine {engine} vs grid {reference}"
        );
    }

    #[test]
    fn oversize_alphabets_are_refused() {
        let prob = Problem::new(
            SourcePmf::new(vec![0.25; 4]).unwrap(),
            DistortionTable::hamming(4),
        )
        .unwrap();
        assert!(matches!(
            grid_gck(
                &prob,
                OperatingPoint::new(0.1, 0.1).unwrap(),
                GridSpec::new(0.01).unwrap()
            ),
            Err(OracleError::AlphabetTooLarge { .. })
        ));
        assert!(matches!(
            grid_omega(
                &prob,
                TiltParams::new(1.0, 0.5).unwrap(),
                GridSpec::new(0.01).unwrap()
            ),
            Err(OracleError::AlphabetTooLarge { .. })
        ));
    }
}
