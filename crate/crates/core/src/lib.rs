//! Solvers for the optimal exponent of correct-decoding probability in lossy
//! source coding at rates below the rate-distortion function.
//!
//! The centerpiece is an iterative algorithm that updates a joint distribution
//! over source and reproduction alphabets multiplicatively until it minimizes
//! a tilted objective `Ω(μ,λ) = min_q { λ·I(q) + D(q_X||P) + μ·E_q[d] }`. An
//! outer derivative-free maximization over the tilt pair `(μ, λ)` then yields
//! the exponent `G(R, Δ|P)`, the cutoff rate `R_cut(λ)(Δ|P)`, and a certified
//! approximation of the rate-distortion function `R(Δ|P)`.
//!
//! Modules:
//! - [`prob`]: validated pmf types, marginals/conditionals, divergence,
//!   mutual information, expected distortion. Everything downstream builds
//!   on these.
//! - [`engine`]: the tilted cell weights, the multiplicative update, and the
//!   convergent iteration computing `Ω(μ,λ)` with a full per-iteration trace.
//! - [`outer`]: golden-section maximization over `μ ≥ 0` and `λ ∈ [0,1]`,
//!   producing the exponent, the cutoff rate, and the rate-distortion
//!   approximation with its error bound.
//! - [`oracle`]: independent brute-force and closed-form references (grid
//!   enumeration, classical rate-distortion iteration) used to certify the
//!   iterative solvers on small instances.
//! - [`search`]: a small derivative-free scalar maximizer shared by the
//!   outer searches.
//!
//! All quantities are in nats; conversion to bits is a presentation concern.

pub mod engine;
pub mod oracle;
pub mod outer;
pub mod prob;
pub mod search;

pub use engine::{solve_omega, SolveOptions, SolveReport, TiltParams};
pub use outer::{cutoff_rate, exponent, rd_approx, OperatingPoint, SearchOptions};
pub use prob::{DistortionTable, JointPmf, Problem, SourcePmf};
