//! The iterative joint-distribution solver.
//!
//! For a tilt pair `(μ, λ)` the quantity of interest is
//!
//! ```text
//! Ω(μ,λ)(P) = min over joint q of  λ·I(q_X, q_{Y|X}) + D(q_X||P) + μ·E_q[d]
//! ```
//!
//! The minimand equals the expectation under `q` of the per-cell tilted
//! weight
//!
//! ```text
//! ω_q(x,y) = (1−λ)·ln q_X(x) + λ·ln q_{X|Y}(x|y) + μ·d(x,y) − ln P(x)
//! ```
//!
//! and the solver iterates the multiplicative update
//! `q'(x,y) = q(x,y)·exp(−ω_q(x,y)) / Λ_q` with normalization
//! `Λ_q = E_q[exp(−ω_q)]`. Each step decreases the objective; `−ln Λ_q`
//! squeezes between consecutive objective values and converges to `Ω(μ,λ)`
//! from above, which is what the stopping rule watches. Everything is done
//! in the log domain: the update is a softmax over cells, so large `μ·d`
//! tilts cannot overflow.

use crate::prob::{kl_divergence, JointPmf, Problem};
use thiserror::Error;

/// Entries of an iterate are never allowed below this floor; multiplicative
/// updates on strongly tilted problems would otherwise drift into denormals.
pub const POSITIVITY_FLOOR: f64 = 1e-300;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("tilt parameters out of range: mu = {mu} (need >= 0), lambda = {lambda} (need 0..=1)")]
    BadTilt { mu: f64, lambda: f64 },
    #[error("joint is {qx}x{qy} but the problem is {px}x{py}")]
    ShapeMismatch {
        qx: usize,
        qy: usize,
        px: usize,
        py: usize,
    },
    #[error("joint distribution has a zero entry at ({x},{y}); this operation needs strict positivity")]
    ZeroEntry { x: usize, y: usize },
    #[error("joint distribution places mass on x = {x} where the source probability is zero")]
    SupportViolation { x: usize },
    #[error("initial distribution must be strictly positive, found zero at ({x},{y})")]
    BadInitial { x: usize, y: usize },
    #[error("solver options invalid: {0}")]
    BadOptions(&'static str),
}

/// The tilting pair: `μ ≥ 0` multiplies distortion, `λ ∈ [0,1]` multiplies
/// rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TiltParams {
    mu: f64,
    lambda: f64,
}

impl TiltParams {
    pub fn new(mu: f64, lambda: f64) -> Result<Self, EngineError> {
        if !(mu >= 0.0 && mu.is_finite() && (0.0..=1.0).contains(&lambda)) {
            return Err(EngineError::BadTilt { mu, lambda });
        }
        Ok(Self { mu, lambda })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }
}

/// One recorded iteration.
#[derive(Debug, Clone, Copy)]
pub struct TraceRow {
    /// 1-based iteration index.
    pub t: usize,
    /// Objective at the current iterate, `F(q,q) = E_q[ω_q]`.
    pub objective: f64,
    /// `−ln Λ_q`; nonincreasing in `t` and sandwiched between consecutive
    /// objective values.
    pub minus_log_lambda: f64,
    /// `D(q' || q)` between the updated and current iterate.
    pub step_kl: f64,
}

/// Per-iteration log of a solve.
#[derive(Debug, Clone, Default)]
pub struct IterationTrace {
    pub rows: Vec<TraceRow>,
}

/// Outcome of [`solve_omega`].
#[derive(Debug, Clone)]
pub struct SolveReport {
    /// Converged value of the tilted objective, `F(q̂, q̂)`.
    pub omega_value: f64,
    /// The minimizing joint distribution (full alphabet; rows with zero
    /// source probability carry zero mass).
    pub minimizer: JointPmf,
    /// Number of recorded iterations.
    pub iterations: usize,
    /// Whether the stopping rule fired before `max_iters`.
    pub converged: bool,
    /// How many cells were lifted to [`POSITIVITY_FLOOR`] across the run.
    pub clamp_events: usize,
    pub trace: IterationTrace,
    /// All iterates `q[1], q[2], …` when requested in the options.
    pub iterates: Option<Vec<JointPmf>>,
}

/// Options for [`solve_omega`].
#[derive(Debug, Clone)]
pub struct SolveOptions {
    /// Stop once the per-iteration change of `−ln Λ` and its estimated
    /// geometric tail are both below this.
    pub tol: f64,
    pub max_iters: usize,
    /// Starting point; uniform joint when absent. Must be strictly positive.
    pub initial: Option<JointPmf>,
    /// Keep every iterate in the report (memory ~ `max_iters·|X|·|Y|`).
    pub record_iterates: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iters: 100_000,
            initial: None,
            record_iterates: false,
        }
    }
}

impl SolveOptions {
    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_max_iters(mut self, max_iters: usize) -> Self {
        self.max_iters = max_iters;
        self
    }
}

/// Dense per-cell state for one problem/tilt pair, on the support of `P`.
struct Kernel {
    nx: usize,
    ny: usize,
    ln_p: Vec<f64>,
    dist: Vec<f64>,
    tilt: TiltParams,
}

impl Kernel {
    fn new(problem: &Problem, tilt: TiltParams) -> Self {
        let nx = problem.nx();
        let ny = problem.ny();
        let ln_p = (0..nx)
            .map(|x| {
                let p = problem.source().get(x);
                if p > 0.0 {
                    p.ln()
                } else {
                    f64::NEG_INFINITY
                }
            })
            .collect();
        let dist = problem.distortion().as_slice().to_vec();
        Self {
            nx,
            ny,
            ln_p,
            dist,
            tilt,
        }
    }

    /// ω over all cells for a strictly positive `q` (flat, row-major).
    fn omega(&self, q: &[f64]) -> Vec<f64> {
        let (qx, qy) = flat_marginals(q, self.nx, self.ny);
        let lam = self.tilt.lambda;
        let mu = self.tilt.mu;
        let mut w = vec![0.0; q.len()];
        for x in 0..self.nx {
            let ln_qx = qx[x].ln();
            for y in 0..self.ny {
                let i = x * self.ny + y;
                // ln q_{X|Y}(x|y) = ln q(x,y) − ln q_Y(y)
                let ln_cond = q[i].ln() - qy[y].ln();
                w[i] = (1.0 - lam) * ln_qx + lam * ln_cond + mu * self.dist[i] - self.ln_p[x];
            }
        }
        w
    }

    /// One multiplicative update. Returns the new iterate, `−ln Λ_q`, and
    /// the number of floored cells. The update exponent is
    /// `a(x,y) = ln q(x,y) − ω_q(x,y)`, so `q' = softmax(a)` and
    /// `ln Λ = ln Σ exp(a)`.
    fn step(&self, q: &[f64], omega: &[f64]) -> (Vec<f64>, f64, usize) {
        let n = q.len();
        let mut a = vec![0.0; n];
        let mut m = f64::NEG_INFINITY;
        for i in 0..n {
            a[i] = q[i].ln() - omega[i];
            if a[i] > m {
                m = a[i];
            }
        }
        let mut z = 0.0;
        for v in &a {
            z += (v - m).exp();
        }
        let ln_lambda = m + z.ln();
        let mut next = vec![0.0; n];
        let mut clamped = 0usize;
        let mut sum = 0.0;
        for i in 0..n {
            let mut v = (a[i] - ln_lambda).exp();
            if v < POSITIVITY_FLOOR {
                v = POSITIVITY_FLOOR;
                clamped += 1;
            }
            next[i] = v;
            sum += v;
        }
        for v in &mut next {
            *v /= sum;
        }
        (next, -ln_lambda, clamped)
    }

    fn objective(&self, q: &[f64], omega: &[f64]) -> f64 {
        q.iter().zip(omega).map(|(&qi, &wi)| qi * wi).sum()
    }

    fn embed(&self, reduced: &[f64], support: &[usize], full_nx: usize) -> JointPmf {
        let mut probs = vec![0.0; full_nx * self.ny];
        for (r, &x) in support.iter().enumerate() {
            for y in 0..self.ny {
                probs[x * self.ny + y] = reduced[r * self.ny + y];
            }
        }
        JointPmf::from_flat(full_nx, self.ny, probs).expect("iterate stays a distribution")
    }
}

fn flat_marginals(q: &[f64], nx: usize, ny: usize) -> (Vec<f64>, Vec<f64>) {
    let mut qx = vec![0.0; nx];
    let mut qy = vec![0.0; ny];
    for x in 0..nx {
        for y in 0..ny {
            let v = q[x * ny + y];
            qx[x] += v;
            qy[y] += v;
        }
    }
    (qx, qy)
}

fn check_shape(q: &JointPmf, problem: &Problem) -> Result<(), EngineError> {
    if q.nx() != problem.nx() || q.ny() != problem.ny() {
        return Err(EngineError::ShapeMismatch {
            qx: q.nx(),
            qy: q.ny(),
            px: problem.nx(),
            py: problem.ny(),
        });
    }
    Ok(())
}

fn check_strictly_positive(q: &JointPmf) -> Result<(), EngineError> {
    for x in 0..q.nx() {
        for y in 0..q.ny() {
            if q.get(x, y) <= 0.0 {
                return Err(EngineError::ZeroEntry { x, y });
            }
        }
    }
    Ok(())
}

fn check_support(q: &JointPmf, problem: &Problem) -> Result<(), EngineError> {
    let (qx, _) = q.marginals();
    for (x, &m) in qx.iter().enumerate() {
        if m > 0.0 && problem.source().get(x) == 0.0 {
            return Err(EngineError::SupportViolation { x });
        }
    }
    Ok(())
}

/// The tilted weight table `ω_q(x,y)` as nested rows.
///
/// Requires `q` strictly positive (so every marginal and conditional exists)
/// and supported within the source support.
pub fn omega_table(
    q: &JointPmf,
    problem: &Problem,
    tilt: TiltParams,
) -> Result<Vec<Vec<f64>>, EngineError> {
    check_shape(q, problem)?;
    check_strictly_positive(q)?;
    check_support(q, problem)?;
    let kernel = Kernel::new(problem, tilt);
    let w = kernel.omega(q.as_slice());
    Ok((0..q.nx())
        .map(|x| w[x * q.ny()..(x + 1) * q.ny()].to_vec())
        .collect())
}

/// The normalization factor `Λ_q = E_q[exp(−ω_q)] > 0`.
pub fn normalization(
    q: &JointPmf,
    problem: &Problem,
    tilt: TiltParams,
) -> Result<f64, EngineError> {
    check_shape(q, problem)?;
    check_strictly_positive(q)?;
    check_support(q, problem)?;
    let kernel = Kernel::new(problem, tilt);
    let w = kernel.omega(q.as_slice());
    let (_, minus_ln_lambda, _) = kernel.step(q.as_slice(), &w);
    Ok((-minus_ln_lambda).exp())
}

/// One multiplicative update `q' = q·exp(−ω_q)/Λ_q`, renormalized and floored
/// to strict positivity.
pub fn update_step(
    q: &JointPmf,
    problem: &Problem,
    tilt: TiltParams,
) -> Result<JointPmf, EngineError> {
    check_shape(q, problem)?;
    check_strictly_positive(q)?;
    check_support(q, problem)?;
    let kernel = Kernel::new(problem, tilt);
    let w = kernel.omega(q.as_slice());
    let (next, _, _) = kernel.step(q.as_slice(), &w);
    Ok(JointPmf::from_flat(q.nx(), q.ny(), next).expect("update preserves normalization"))
}

/// The objective `F(q,q) = E_q[ω_q]`, evaluated cellwise with `0·ln 0 = 0`.
///
/// Unlike [`omega_table`] this accepts zero entries in `q`; it equals
/// `λ·I(q) + D(q_X||P) + μ·E_q[d]` (see [`objective_terms`] for that route).
pub fn objective(q: &JointPmf, problem: &Problem, tilt: TiltParams) -> Result<f64, EngineError> {
    check_shape(q, problem)?;
    check_support(q, problem)?;
    let (qx, qy) = q.marginals();
    let lam = tilt.lambda;
    let mu = tilt.mu;
    let mut total = 0.0;
    for x in 0..q.nx() {
        for y in 0..q.ny() {
            let qv = q.get(x, y);
            if qv > 0.0 {
                // q(x,y) > 0 forces q_X(x) > 0 and q_Y(y) > 0
                let ln_cond = qv.ln() - qy[y].ln();
                let w = (1.0 - lam) * qx[x].ln() + lam * ln_cond + mu * problem.distortion().get(x, y)
                    - problem.source().get(x).ln();
                total += qv * w;
            }
        }
    }
    Ok(total)
}

/// The three functionals whose tilt-weighted sum equals [`objective`].
#[derive(Debug, Clone, Copy)]
pub struct ObjectiveTerms {
    pub mutual_information: f64,
    pub source_divergence: f64,
    pub expected_distortion: f64,
}

impl ObjectiveTerms {
    pub fn combined(&self, tilt: TiltParams) -> f64 {
        tilt.lambda() * self.mutual_information
            + self.source_divergence
            + tilt.mu() * self.expected_distortion
    }
}

/// Independent evaluation route for the objective: mutual information,
/// marginal divergence, and expected distortion computed by the
/// simplex primitives rather than cellwise weights.
pub fn objective_terms(q: &JointPmf, problem: &Problem) -> Result<ObjectiveTerms, EngineError> {
    check_shape(q, problem)?;
    check_support(q, problem)?;
    let (qx, _) = q.marginals();
    Ok(ObjectiveTerms {
        mutual_information: q.mutual_information(),
        source_divergence: kl_divergence(&qx, problem.source().as_slice()),
        expected_distortion: q.expected_distortion(problem.distortion()),
    })
}

/// The surrogate `F(p,q) = E_q[ω_p] + D(q||p)`.
///
/// This exists for verification: it majorizes both `F(q,q)` (minimized over
/// `p` at `p = q`) and `−ln Λ_p` (minimized over `q` at the updated point),
/// which is exactly what makes the iteration descend. No production path
/// calls it.
pub fn surrogate_objective(
    p: &JointPmf,
    q: &JointPmf,
    problem: &Problem,
    tilt: TiltParams,
) -> Result<f64, EngineError> {
    check_shape(p, problem)?;
    check_shape(q, problem)?;
    check_strictly_positive(p)?;
    check_support(p, problem)?;
    let kernel = Kernel::new(problem, tilt);
    let w = kernel.omega(p.as_slice());
    let mut total = 0.0;
    for i in 0..w.len() {
        let qv = q.as_slice()[i];
        if qv > 0.0 {
            total += qv * (w[i] + (qv / p.as_slice()[i]).ln());
        }
    }
    Ok(total)
}

/// Runs the multiplicative iteration until `−ln Λ` stabilizes within
/// `opts.tol` or `opts.max_iters` is reached.
///
/// Cells on source symbols with `P(x) = 0` are excluded up front (the
/// minimizer puts no mass there) and restored as zeros in the reported
/// minimizer. A user-supplied initial point must be strictly positive.
pub fn solve_omega(
    problem: &Problem,
    tilt: TiltParams,
    opts: &SolveOptions,
) -> Result<SolveReport, EngineError> {
    if !(opts.tol >= 0.0) {
        return Err(EngineError::BadOptions("tol must be >= 0"));
    }
    if opts.max_iters == 0 {
        return Err(EngineError::BadOptions("max_iters must be >= 1"));
    }

    let ny = problem.ny();
    let support: Vec<usize> = (0..problem.nx())
        .filter(|&x| problem.source().get(x) > 0.0)
        .collect();

    // Initial point on the reduced alphabet.
    let mut q: Vec<f64> = match &opts.initial {
        Some(init) => {
            check_shape(init, problem)?;
            for x in 0..init.nx() {
                for y in 0..init.ny() {
                    if init.get(x, y) <= 0.0 {
                        return Err(EngineError::BadInitial { x, y });
                    }
                }
            }
            let mut v = Vec::with_capacity(support.len() * ny);
            for &x in &support {
                for y in 0..ny {
                    v.push(init.get(x, y));
                }
            }
            let sum: f64 = v.iter().sum();
            v.iter_mut().for_each(|e| *e /= sum);
            v
        }
        None => vec![1.0 / (support.len() * ny) as f64; support.len() * ny],
    };

    // Reduced problem: drop zero-probability source symbols. The remaining
    // mass already sums to 1.
    let reduced = reduce_problem(problem, &support);
    let kernel = Kernel::new(&reduced, tilt);

    let mut trace = IterationTrace::default();
    let mut iterates = opts.record_iterates.then(Vec::new);
    let mut clamp_events = 0usize;
    let mut prev_mll = f64::INFINITY;
    let mut prev_change = f64::INFINITY;
    let mut converged = false;

    for t in 1..=opts.max_iters {
        if let Some(list) = iterates.as_mut() {
            list.push(kernel.embed(&q, &support, problem.nx()));
        }
        let w = kernel.omega(&q);
        let objective = kernel.objective(&q, &w);
        let (next, mll, clamped) = kernel.step(&q, &w);
        clamp_events += clamped;
        let step_kl = kl_flat(&next, &q);
        trace.rows.push(TraceRow {
            t,
            objective,
            minus_log_lambda: mll,
            step_kl,
        });
        q = next;
        if t > 1 {
            let change = (mll - prev_mll).abs();
            // The change alone underestimates the remaining gap when the
            // contraction factor is close to 1 (weak tilts), so also require
            // the geometric tail estimate change·ρ/(1−ρ) to clear the
            // tolerance. A machine-precision floor keeps termination sound
            // once the change is pure round-off.
            if change <= opts.tol {
                let floor = 1e-15 * mll.abs().max(1.0);
                if change <= floor {
                    converged = true;
                } else if prev_change.is_finite() && prev_change > 0.0 {
                    let rho = change / prev_change;
                    if rho < 1.0 && change * rho / (1.0 - rho) <= opts.tol {
                        converged = true;
                    }
                }
            }
            prev_change = change;
            if converged {
                break;
            }
        }
        prev_mll = mll;
    }

    let w = kernel.omega(&q);
    let omega_value = kernel.objective(&q, &w);
    Ok(SolveReport {
        omega_value,
        minimizer: kernel.embed(&q, &support, problem.nx()),
        iterations: trace.rows.len(),
        converged,
        clamp_events,
        trace,
        iterates,
    })
}

fn reduce_problem(problem: &Problem, support: &[usize]) -> Problem {
    if support.len() == problem.nx() {
        return problem.clone();
    }
    let source = crate::prob::SourcePmf::new(
        support.iter().map(|&x| problem.source().get(x)).collect(),
    )
    .expect("restriction to the support still sums to 1");
    let rows = support
        .iter()
        .map(|&x| {
            (0..problem.ny())
                .map(|y| problem.distortion().get(x, y))
                .collect()
        })
        .collect();
    let distortion = crate::prob::DistortionTable::new(rows).expect("rows stay nonnegative");
    Problem::new(source, distortion).expect("dimensions preserved")
}

fn kl_flat(p: &[f64], q: &[f64]) -> f64 {
    let mut total = 0.0;
    for (&pi, &qi) in p.iter().zip(q) {
        if pi > 0.0 {
            total += pi * (pi / qi).ln();
        }
    }
    total.max(0.0)
}
