//! Parametric outer maximization on top of the iterative solver.
//!
//! For an operating point `(R, Δ)` the exponent is recovered as
//!
//! ```text
//! G(R,Δ|P) = max over λ in [0,1] of max over μ ≥ 0 of
//!            Ω(μ,λ)(P) − λ·R − μ·Δ
//! ```
//!
//! The pair map `(μ,λ) ↦ Ω(μ,λ) − λR − μΔ` is concave (a pointwise minimum
//! of affine functions of the pair, minus an affine function), so nested
//! golden-section searches suffice: `μ` inner on an adaptively expanded
//! bracket, `λ` outer on `[0,1]`. The same `μ` search with the objective
//! rescaled by `1/λ` yields the cutoff rate, and for small `λ` the cutoff
//! rate approximates the rate-distortion function with a certifiable error
//! bound.

use crate::engine::{solve_omega, EngineError, SolveOptions, SolveReport, TiltParams};
use crate::oracle::ba_rate_distortion;
use crate::prob::Problem;
use crate::search::golden_max;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum OuterError {
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("lambda = {0} must lie in (0, 1]")]
    LambdaNotPositive(f64),
    #[error("lambda = {0} must lie in [0, 1]")]
    LambdaOutOfRange(f64),
    #[error("operating point must be nonnegative and finite: rate = {rate}, delta = {delta}")]
    BadOperatingPoint { rate: f64, delta: f64 },
}

/// A rate/distortion operating point, both in nonnegative units
/// (nats, distortion units).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatingPoint {
    rate: f64,
    delta: f64,
}

impl OperatingPoint {
    pub fn new(rate: f64, delta: f64) -> Result<Self, OuterError> {
        if !(rate >= 0.0 && rate.is_finite() && delta >= 0.0 && delta.is_finite()) {
            return Err(OuterError::BadOperatingPoint { rate, delta });
        }
        Ok(Self { rate, delta })
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }
}

/// Tunables shared by every outer search.
#[derive(Debug, Clone)]
pub struct SearchOptions {
    /// Bracket tolerance for the inner `μ` search.
    pub mu_tol: f64,
    /// Bracket tolerance for the outer `λ` search.
    pub lambda_tol: f64,
    /// Hard ceiling for the `μ` bracket expansion; hitting it sets the
    /// `mu_at_cap` flag (expected when `Δ = 0`).
    pub mu_cap: f64,
    /// Inner-solver stopping tolerance at the final refinement; bracket
    /// expansion runs looser.
    pub solve_tol: f64,
    pub solve_max_iters: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            mu_tol: 1e-4,
            lambda_tol: 1e-4,
            mu_cap: 1e4,
            solve_tol: 1e-10,
            solve_max_iters: 100_000,
        }
    }
}

/// Result of a one-dimensional maximization over `μ ≥ 0`.
#[derive(Debug, Clone, Copy)]
pub struct MuSearch {
    pub value: f64,
    pub mu_star: f64,
    /// The supremum over `μ` was not attained at a finite interior point:
    /// either the bracket expansion hit `mu_cap` with the maximizer still at
    /// the boundary, or the distortion target sits at the feasibility floor
    /// (where the objective saturates or diverges as `μ → ∞`).
    pub mu_at_cap: bool,
    /// Inner solver invocations.
    pub evaluations: usize,
    pub bracket_expansions: usize,
}

/// Which stage of a search an inner solve serves; bracket expansion runs
/// looser than refinement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum EvalPhase {
    Expansion,
    Refinement,
}

/// Iteration budget for inner solves whose value only steers the search.
/// Degenerate tilt corners converge at rate `1 − O(μ)` and would otherwise
/// burn the full budget on values that are zero to within tolerance anyway;
/// a capped run still overestimates by at most `O(1/cap)`.
const SEARCH_ITER_CAP: usize = 20_000;

fn solve_value(problem: &Problem, mu: f64, lambda: f64, tol: f64, max_iters: usize) -> f64 {
    let tilt = TiltParams::new(mu, lambda).expect("search keeps tilt in range");
    let opts = SolveOptions {
        tol,
        max_iters,
        initial: None,
        record_iterates: false,
    };
    solve_omega(problem, tilt, &opts)
        .expect("default initialization on a validated problem cannot fail")
        .omega_value
}

/// Maximizes `eval(μ, phase)` over `μ ≥ 0`: exponential bracket growth while
/// the objective still rises, then golden-section refinement on `[0, hi]`.
fn maximize_over_mu(mut eval: impl FnMut(f64, EvalPhase) -> f64, opts: &SearchOptions) -> MuSearch {
    let mut evaluations = 0usize;
    let mut bracket_expansions = 0usize;
    let mut hi = 1.0_f64;
    let mut g_half = eval(0.5 * hi, EvalPhase::Expansion);
    let mut g_hi = eval(hi, EvalPhase::Expansion);
    evaluations += 2;
    while g_hi > g_half && hi < opts.mu_cap {
        hi = (hi * 2.0).min(opts.mu_cap);
        bracket_expansions += 1;
        g_half = g_hi;
        g_hi = eval(hi, EvalPhase::Expansion);
        evaluations += 1;
    }
    let res = golden_max(|mu| eval(mu, EvalPhase::Refinement), 0.0, hi, opts.mu_tol);
    evaluations += res.evaluations;
    MuSearch {
        value: res.value,
        mu_star: res.x,
        mu_at_cap: hi >= opts.mu_cap && res.x >= 0.99 * opts.mu_cap,
        evaluations,
        bracket_expansions,
    }
}

/// The smallest expected distortion any coupling can reach, `Σ_x P(x)·min_y
/// d(x,y)`. At or below it the supremum over `μ` sits at infinity (the
/// objective saturates or diverges), so results there carry the `mu_at_cap`
/// flag.
fn distortion_floor(problem: &Problem) -> f64 {
    (0..problem.nx())
        .map(|x| {
            problem.source().get(x)
                * (0..problem.ny())
                    .map(|y| problem.distortion().get(x, y))
                    .fold(f64::INFINITY, f64::min)
        })
        .sum()
}

/// `G(μ,λ)(R,Δ|P) = Ω(μ,λ)(P) − λR − μΔ` via one inner solve.
pub fn g_mu_lambda(
    problem: &Problem,
    point: OperatingPoint,
    tilt: TiltParams,
    opts: &SearchOptions,
) -> Result<f64, OuterError> {
    let sopts = SolveOptions {
        tol: opts.solve_tol,
        max_iters: opts.solve_max_iters,
        initial: None,
        record_iterates: false,
    };
    let report = solve_omega(problem, tilt, &sopts)?;
    Ok(report.omega_value - tilt.lambda() * point.rate() - tilt.mu() * point.delta())
}

/// `G(λ)(R,Δ|P) = max over μ ≥ 0 of G(μ,λ)(R,Δ|P)`, the supporting-line
/// value at slope `−λ`.
pub fn g_lambda(
    problem: &Problem,
    point: OperatingPoint,
    lambda: f64,
    opts: &SearchOptions,
) -> Result<MuSearch, OuterError> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(OuterError::LambdaOutOfRange(lambda));
    }
    let cap = opts.solve_max_iters.min(SEARCH_ITER_CAP);
    let mut search = maximize_over_mu(
        |mu, phase| {
            let tol = match phase {
                EvalPhase::Expansion => opts.solve_tol.max(1e-7),
                EvalPhase::Refinement => opts.solve_tol,
            };
            solve_value(problem, mu, lambda, tol, cap)
                - lambda * point.rate()
                - mu * point.delta()
        },
        opts,
    );
    search.mu_at_cap |= point.delta() <= distortion_floor(problem);
    Ok(search)
}

/// Search bookkeeping carried on an [`ExponentResult`].
#[derive(Debug, Clone, Copy)]
pub struct SearchDiagnostics {
    /// Total inner solver invocations across the nested search.
    pub evaluations: usize,
    pub bracket_expansions: usize,
    pub mu_at_cap: bool,
}

/// The exponent value with its maximizing tilt pair.
#[derive(Debug, Clone)]
pub struct ExponentResult {
    /// `G(R,Δ|P)` in nats. Search values inside the zero band (under the
    /// outer search resolution) are reported as exactly 0, attained at
    /// `(λ*, μ*) = (0, 0)`.
    pub value: f64,
    pub lambda_star: f64,
    pub mu_star: f64,
    /// The converged inner solve at `(μ*, λ*)`.
    pub inner: SolveReport,
    pub diagnostics: SearchDiagnostics,
}

/// Negative values beyond this magnitude are reported as-is; anything
/// closer to zero is round-off (the tilt pair `(0,0)` always achieves 0).
const ZERO_CLAMP: f64 = 1e-6;

/// Search values inside this band of zero are below the outer tolerances
/// and the iteration's resolution at vanishing tilts. The exponent is then
/// reported as exactly 0, attained by the canonical tilt `(0,0)`.
const ZERO_SNAP: f64 = 1e-4;

/// The correct-decoding exponent `G(R,Δ|P)`: nested golden-section
/// maximization of `G(μ,λ)` over `λ ∈ [0,1]` and `μ ≥ 0`.
pub fn exponent(
    problem: &Problem,
    point: OperatingPoint,
    opts: &SearchOptions,
) -> Result<ExponentResult, OuterError> {
    let mut evaluations = 0usize;
    let mut bracket_expansions = 0usize;
    let mut best: Option<(f64, MuSearch)> = None;
    golden_max(
        |lambda| {
            let inner = g_lambda(problem, point, lambda, opts)
                .expect("golden search keeps lambda in [0,1]");
            evaluations += inner.evaluations;
            bracket_expansions += inner.bracket_expansions;
            if best.map_or(true, |(_, b)| inner.value > b.value) {
                best = Some((lambda, inner));
            }
            inner.value
        },
        0.0,
        1.0,
        opts.lambda_tol,
    );
    let (mut lambda_star, mut mu_search) = best.expect("at least the endpoints were evaluated");
    let mut value = mu_search.value;
    if value > -ZERO_CLAMP && value <= ZERO_SNAP {
        // In the zero region the maximizing tilt drifts toward (0,0), where
        // the inner iteration resolves the value only to O(1/iterations).
        // The pair (0,0) attains G = 0 exactly, so report that.
        value = 0.0;
        lambda_star = 0.0;
        mu_search = MuSearch {
            value: 0.0,
            mu_star: 0.0,
            ..mu_search
        };
    }
    debug_assert!(value >= -ZERO_CLAMP, "G = {value} below the (0,0) baseline");
    let tilt = TiltParams::new(mu_search.mu_star, lambda_star).expect("within range");
    let sopts = SolveOptions {
        tol: opts.solve_tol,
        max_iters: opts.solve_max_iters,
        initial: None,
        record_iterates: false,
    };
    let inner = solve_omega(problem, tilt, &sopts)?;
    evaluations += 1;
    Ok(ExponentResult {
        value,
        lambda_star,
        mu_star: mu_search.mu_star,
        inner,
        diagnostics: SearchDiagnostics {
            evaluations,
            bracket_expansions,
            mu_at_cap: mu_search.mu_at_cap,
        },
    })
}

/// The cutoff rate at slope parameter `λ`.
#[derive(Debug, Clone)]
pub struct CutoffResult {
    /// `R_cut(λ)(Δ|P)` in nats, nonnegative.
    pub value: f64,
    pub mu_star: f64,
    pub lambda: f64,
    pub mu_at_cap: bool,
    /// Inner solver invocations.
    pub evaluations: usize,
    /// The converged inner solve at `μ*`.
    pub inner: SolveReport,
}

/// `R_cut(λ)(Δ|P) = max over μ ≥ 0 of (Ω(μ,λ)(P) − μΔ)/λ`, the `R`-axis
/// intercept of the slope `−λ` supporting line to `G(·,Δ|P)`.
///
/// Requires `λ ∈ (0,1]`. The inner solver tolerance is tightened
/// proportionally to `λ` since the objective is rescaled by `1/λ`.
pub fn cutoff_rate(
    problem: &Problem,
    delta: f64,
    lambda: f64,
    opts: &SearchOptions,
) -> Result<CutoffResult, OuterError> {
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(OuterError::LambdaNotPositive(lambda));
    }
    if !(delta >= 0.0 && delta.is_finite()) {
        return Err(OuterError::BadOperatingPoint { rate: 0.0, delta });
    }
    // The objective is rescaled by 1/λ, so the inner tolerance tightens
    // proportionally; refinement keeps the full iteration budget here.
    let final_tol = (opts.solve_tol * lambda).max(1e-13);
    let mut search = maximize_over_mu(
        |mu, phase| {
            let (tol, iters) = match phase {
                EvalPhase::Expansion => (final_tol.max(1e-7), opts.solve_max_iters.min(SEARCH_ITER_CAP)),
                EvalPhase::Refinement => (final_tol, opts.solve_max_iters),
            };
            (solve_value(problem, mu, lambda, tol, iters) - mu * delta) / lambda
        },
        opts,
    );
    search.mu_at_cap |= delta <= distortion_floor(problem);
    let mut value = search.value;
    if value < 0.0 && value > -ZERO_CLAMP {
        value = 0.0;
    }
    let tilt = TiltParams::new(search.mu_star, lambda).expect("within range");
    let sopts = SolveOptions {
        tol: final_tol,
        max_iters: opts.solve_max_iters,
        initial: None,
        record_iterates: false,
    };
    let inner = solve_omega(problem, tilt, &sopts)?;
    Ok(CutoffResult {
        value,
        mu_star: search.mu_star,
        lambda,
        mu_at_cap: search.mu_at_cap,
        evaluations: search.evaluations + 1,
        inner,
    })
}

/// A rate-distortion approximation with its certificate.
#[derive(Debug, Clone)]
pub struct RdApproxResult {
    /// The approximation itself: `R_cut(λ)(Δ|P) ≤ R(Δ|P)`.
    pub approx: f64,
    pub lambda: f64,
    /// The guaranteed gap `c1·√λ·(ln λ⁻¹ + c2)`; meaningful only when
    /// `certified` is set.
    pub bound: f64,
    /// Whether `λ` lies in the validity range `(0, 1/(8α)]` with `Δ`
    /// interior to `(0, d_max)`.
    pub certified: bool,
    /// Finite-difference estimate of `R'(Δ|P)` feeding the constant `c2`.
    pub rd_derivative: f64,
    pub c1: f64,
    pub c2: f64,
    pub mu_star: f64,
    pub mu_at_cap: bool,
    /// Whether the inner solve at `μ*` converged.
    pub converged: bool,
}

/// Approximates `R(Δ|P)` by the cutoff rate at a small `λ`, with the error
/// bound `R(Δ|P) − R_cut(λ)(Δ|P) ≤ c1·√λ·(ln λ⁻¹ + c2)` certified for
/// `λ ≤ 1/(8α)`, `α = min(ln|X|, ln|Y|)`.
///
/// The derivative entering `c2` comes from central finite differences of the
/// independent rate-distortion reference, not from the quantity being
/// certified.
pub fn rd_approx(
    problem: &Problem,
    delta: f64,
    lambda: f64,
    opts: &SearchOptions,
) -> Result<RdApproxResult, OuterError> {
    let cut = cutoff_rate(problem, delta, lambda, opts)?;
    let alpha = (problem.nx() as f64).ln().min((problem.ny() as f64).ln());
    let d_max = problem.distortion().d_max();
    let certified = lambda <= 1.0 / (8.0 * alpha) && delta > 0.0 && delta < d_max;

    let rd_derivative = {
        let mut h = (delta * 1e-3).max(1e-4);
        if delta > 0.0 && h >= delta {
            h = 0.5 * delta;
        }
        if delta <= 0.0 {
            let r0 = ba_rate_distortion(problem, 0.0, 1e-9, 20_000);
            let r1 = ba_rate_distortion(problem, h, 1e-9, 20_000);
            (r1 - r0) / h
        } else {
            let lo = ba_rate_distortion(problem, delta - h, 1e-9, 20_000);
            let hi = ba_rate_distortion(problem, delta + h, 1e-9, 20_000);
            (hi - lo) / (2.0 * h)
        }
    };

    let c1 = 1.5 * (2.0 * alpha).sqrt();
    let c2 = (4.0 / 3.0) * ((problem.nx() * problem.ny()) as f64).ln() - (2.0 * alpha).ln()
        + (2.0 / 3.0) * d_max * rd_derivative.abs();
    let bound = c1 * lambda.sqrt() * ((1.0 / lambda).ln() + c2);

    Ok(RdApproxResult {
        approx: cut.value,
        lambda,
        bound,
        certified,
        rd_derivative,
        c1,
        c2,
        mu_star: cut.mu_star,
        mu_at_cap: cut.mu_at_cap,
        converged: cut.inner.converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::{DistortionTable, SourcePmf};

    fn hamming_problem(p: Vec<f64>) -> Problem {
        Problem::new(SourcePmf::new(p).unwrap(), DistortionTable::hamming(2)).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn g_mu_lambda_degenerate_tilts() {
        let prob = hamming_problem(vec![0.6, 0.4]);
        let opts = SearchOptions::default();
        let point = OperatingPoint::new(0.3, 0.2).unwrap();
        // λ = μ = 0 ⇒ 0 for any operating point
        let v = g_mu_lambda(&prob, point, TiltParams::new(0.0, 0.0).unwrap(), &opts).unwrap();
        assert!(v.abs() < 1e-9);
        // μ = 0 ⇒ −λR
        let v = g_mu_lambda(&prob, point, TiltParams::new(0.0, 0.7).unwrap(), &opts).unwrap();
        assert!(close(v, -0.7 * 0.3, 1e-9));
    }

    #[test]
    fn g_lambda_vacuous_distortion_pins_mu_at_zero() {
        // Δ ≥ d_max: raising μ only subtracts, so μ* = 0 and the value
        // is −λR
        let prob = hamming_problem(vec![0.6, 0.4]);
        let opts = SearchOptions::default();
        let point = OperatingPoint::new(0.25, 1.0).unwrap();
        let r = g_lambda(&prob, point, 0.8, &opts).unwrap();
        assert!(close(r.value, -0.8 * 0.25, 1e-8), "value = {}", r.value);
        assert!(r.mu_star < 1e-3, "mu_star = {}", r.mu_star);
        assert!(!r.mu_at_cap);
    }

    #[test]
    fn g_lambda_zero_lambda_with_zero_rows() {
        // true value is 0 (mass on the distortion-free cells kills every
        // term); the iteration needs ~1/μ steps at vanishing tilts, so the
        // search only resolves the supremum to O(1/max_iters)
        let prob = hamming_problem(vec![0.7, 0.3]);
        let opts = SearchOptions::default();
        let point = OperatingPoint::new(0.3, 0.1).unwrap();
        let r = g_lambda(&prob, point, 0.0, &opts).unwrap();
        assert!(r.value.abs() < 1e-5, "value = {}", r.value);
    }

    #[test]
    fn exponent_uniform_binary_hamming_closed_form() {
        // for the uniform binary source under Hamming distortion the
        // exponent collapses to |R(Δ|P) − R|⁺
        let prob = hamming_problem(vec![0.5, 0.5]);
        let opts = SearchOptions::default();
        let rd = crate::oracle::analytic_binary_hamming_rd(0.5, 0.1);

        let below = exponent(&prob, OperatingPoint::new(0.2, 0.1).unwrap(), &opts).unwrap();
        assert!(
            close(below.value, rd - 0.2, 2e-4),
            "G = {}, expect {}",
            below.value,
            rd - 0.2
        );

        let above = exponent(&prob, OperatingPoint::new(0.4, 0.1).unwrap(), &opts).unwrap();
        assert!(above.value.abs() <= 1e-4, "G = {}", above.value);
    }

    #[test]
    fn exponent_zero_when_distortion_vacuous() {
        let prob = hamming_problem(vec![0.7, 0.3]);
        let opts = SearchOptions::default();
        let r = exponent(&prob, OperatingPoint::new(0.05, 1.0).unwrap(), &opts).unwrap();
        assert!(r.value.abs() <= 1e-6, "G = {}", r.value);
    }

    #[test]
    fn cutoff_rejects_bad_lambda() {
        let prob = hamming_problem(vec![0.5, 0.5]);
        let opts = SearchOptions::default();
        assert!(matches!(
            cutoff_rate(&prob, 0.1, 0.0, &opts),
            Err(OuterError::LambdaNotPositive(_))
        ));
    }

    #[test]
    fn cutoff_vacuous_distortion_is_zero() {
        let prob = hamming_problem(vec![0.5, 0.5]);
        let opts = SearchOptions::default();
        let r = cutoff_rate(&prob, 1.0, 1.0, &opts).unwrap();
        assert!(r.value.abs() < 1e-8, "cutoff = {}", r.value);
    }

    #[test]
    fn cutoff_uniform_binary_equals_rd_for_all_lambda() {
        // uniform source: deviating q_X away from P costs more divergence
        // than it saves in rate for every λ ≤ 1, so the cutoff rate sits
        // exactly on R(Δ|P)
        let prob = hamming_problem(vec![0.5, 0.5]);
        let opts = SearchOptions::default();
        let rd = crate::oracle::analytic_binary_hamming_rd(0.5, 0.1);
        for lambda in [1.0, 0.3] {
            let r = cutoff_rate(&prob, 0.1, lambda, &opts).unwrap();
            assert!(
                close(r.value, rd, 5e-5),
                "lambda = {lambda}: cutoff = {}, rd = {rd}",
                r.value
            );
        }
    }

    #[test]
    fn rd_approx_constants_for_binary_alphabets() {
        let prob = hamming_problem(vec![0.5, 0.5]);
        let opts = SearchOptions::default();
        let r = rd_approx(&prob, 0.1, 1e-3, &opts).unwrap();
        // α = ln 2: validity cap 1/(8 ln 2) ≈ 0.1803, c1 = 1.5·√(2 ln 2)
        assert!(r.certified);
        assert!(close(r.c1, 1.7661151, 1e-6), "c1 = {}", r.c1);
        assert!(r.bound > 0.0);
        // sandwich against the closed form
        let rd = crate::oracle::analytic_binary_hamming_rd(0.5, 0.1);
        assert!(r.approx <= rd + 1e-4, "approx = {}, rd = {rd}", r.approx);
        assert!(r.approx >= rd - r.bound, "approx = {}, rd = {rd}", r.approx);
    }

    #[test]
    fn rd_approx_outside_validity_range_is_uncertified() {
        let prob = hamming_problem(vec![0.5, 0.5]);
        let opts = SearchOptions::default();
        let r = rd_approx(&prob, 0.1, 0.5, &opts).unwrap();
        assert!(!r.certified);
        assert!(r.approx.is_finite());
    }

    #[test]
    fn operating_point_validation() {
        assert!(OperatingPoint::new(-0.1, 0.0).is_err());
        assert!(OperatingPoint::new(0.0, f64::NAN).is_err());
        assert!(OperatingPoint::new(0.0, 0.0).is_ok());
    }
}
