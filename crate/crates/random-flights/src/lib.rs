//! Monte Carlo toolkit for random flights with Poisson switching moments.
//!
//! A particle in `R^d` starts at the origin and moves with unit speed, picking
//! a fresh direction on the unit sphere at switching moments `T_k = f(Γ_k)`,
//! where `Γ_k` is a unit-rate Poisson arrival process. Rescaled to `[0, 1]`,
//! the trajectory is a polyline `X_n`; depending on the growth of `f` it
//! converges to one of three limit processes:
//!
//! * polynomial `f(t) = t^α`, `α > 1/2` — a time-changed Gaussian integral,
//! * exponential `f(t) = e^{βt}`, `β > 0` — a piecewise-linear random series
//!   with countably many vertices,
//! * super-exponential (`f'/f → ∞`) — the degenerate segment `ε₁·t`.
//!
//! This crate builds the rescaled flights ([`flight`]), samples the limit laws
//! ([`limits`]), computes empirical Wasserstein distances between path samples
//! under the sup metric on `C[0,1]` ([`transport`]), and certifies the
//! supporting moment lemmas, martingale bounds and tail conditions numerically
//! ([`verify`]). [`experiments`] orchestrates convergence and tail tables and
//! [`cli`] exposes everything as the `flights` binary.
//!
//! Every sampling operation is a pure function of its inputs and a
//! [`RandomSeed`]; identical seeds give bit-identical outputs.

pub mod cli;
pub mod experiments;
pub mod flight;
pub mod limits;
pub mod path;
pub mod regime;
pub mod stochastic;
pub mod transport;
pub mod verify;

pub use flight::{
    build_exponential_flight, build_flight, build_polynomial_flight, build_superexp_flight,
    FlightRealization, Representation,
};
pub use limits::{
    sample_limit, sample_limit_exponential, sample_limit_polynomial, sample_limit_superexp,
    CovMatrix, LimitSamplerConfig,
};
pub use path::{sup_distance, sup_norm, PathSample, Polyline, SampleKind, SampleMeta};
pub use regime::{ExpSquare, GrowthFunction, RegimeConfig};
pub use stochastic::{
    exact_gamma_moment, gamma_ratio, sample_directions, sample_directions_with, sample_gamma_path,
    DirectionSequence, GammaPath, RandomSeed, SphereLaw, UniformSphere,
};
pub use transport::{
    brute_force_plan, cost_matrix, empirical_wasserstein, solve_entropic, solve_exact, CostMatrix,
    Method, SolverTag, TransportPlan, WassersteinEstimate,
};
pub use verify::CheckReport;

/// Errors shared across the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A precondition on a parameter was violated. The message names the
    /// parameter and the violated constraint.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Two objects that must live in the same `R^d` do not.
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    /// Evaluation time outside `[0, 1]`.
    #[error("time {0} outside [0, 1]")]
    TimeOutOfRange(f64),

    /// A path sample must contain at least one path.
    #[error("empty path sample")]
    EmptySample,

    /// The exhaustive assignment oracle only handles small instances.
    #[error("brute-force solver limited to size <= 8, got {0}")]
    BruteForceTooLarge(usize),

    /// Matrix scaling did not reach the marginal tolerance.
    #[error(
        "entropic solver did not converge after {iters} iterations \
         (marginal violation {violation:.3e}, tolerance {tol:.3e})"
    )]
    EntropicNoConvergence {
        iters: usize,
        violation: f64,
        tol: f64,
    },

    /// The supplied log-growth function is not increasing where it was used.
    #[error("log-growth function is not increasing over the realized arrivals (near t = {0})")]
    NonMonotoneGrowth(f64),

    #[error("malformed polyline: {0}")]
    MalformedPath(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
