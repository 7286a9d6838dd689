//! Solvers for the Gaussian quadratic privacy-signaling game.
//!
//! A sender observes a jointly Gaussian source split into a private part `X`
//! and a relevant part `Y`. It transmits a message `Z`; a receiver forms
//! MMSE estimates `X̂`, `Ŷ` of both parts. The two sides optimize quadratic
//! stage costs that disagree only about the private part:
//!
//! ```text
//! sender cost    J^e = MSE_Y − δ·MSE_X     (δ > 0 weighs privacy)
//! receiver cost  J^d = MSE_Y + MSE_X
//! ```
//!
//! so the sender wants `Y` reconstructed accurately while keeping the
//! receiver's estimate of `X` as bad as possible.
//!
//! # What the crate computes
//!
//! * [`equilibrium`] — linear Nash and Stackelberg equilibria of the game,
//!   both in the general vector formulation (via a whitening transform and a
//!   signed spectral split of the weight matrix) and as a closed-form scalar
//!   solution with encoder slope `B/A`.
//! * [`bottleneck`] — the one-shot MMSE information-bottleneck variant in
//!   which only `X` is observed: full/partial/no-revelation regimes, a
//!   trace-constrained relaxation, and a mutual-information bottleneck
//!   solver of the Gaussian Chechik family for side-by-side comparison.
//! * [`channel`] — scalar equilibria through an average-power-limited AWGN
//!   channel and through an `M`-level quantizer (Lloyd–Max on the
//!   transformed coordinate).
//! * [`verify`] — numerical certification: best-response fixed-point checks,
//!   sampled deviation searches (linear and nonlinear), and analytic versus
//!   Monte-Carlo consistency reports.
//! * [`spectral`], [`mat`] — the dependency-free symmetric eigensolver
//!   (cyclic Jacobi), PD square roots and Cholesky factorization behind all
//!   of the above.
//!
//! # Quick start
//!
//! ```
//! use privsig::equilibrium::solve_scalar;
//!
//! // Unit variances, correlation 0.3, privacy weight δ = 1.
//! let sol = solve_scalar(1.0, 1.0, 0.3, 1.0).unwrap();
//! let slope = sol.b_over_a().unwrap();
//! assert!((slope + 6.513).abs() < 1e-2);
//! assert!(sol.payoff_dominant);
//! ```
//!
//! # Conventions
//!
//! * Covariances are ordered `(X, Y)`: the leading `n_x` coordinates are
//!   private, the trailing `n_y` relevant.
//! * `MSE` for vector quantities is the trace convention `E‖V − V̂‖²`.
//! * All randomness flows through [`rng`]: one counter-based generator,
//!   64-bit seeds, per-candidate derived streams; identical seeds reproduce
//!   identical results within a build.

pub mod bottleneck;
pub mod channel;
pub mod equilibrium;
pub mod mat;
pub mod model;
pub mod norm;
pub mod rng;
pub mod spectral;
pub mod verify;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An iterative routine failed to reach its residual target within its
    /// iteration cap — for the eigensolver this signals pathological input.
    #[error("{what} did not converge within {iterations} iterations (residual {residual:.3e})")]
    NonConvergence { what: &'static str, iterations: usize, residual: f64 },

    /// A positive-definite input was required; reports the offending
    /// eigenvalue (or Cholesky pivot).
    #[error("matrix is not positive definite (offending eigenvalue {eigenvalue:.6e})")]
    NotPositiveDefinite { eigenvalue: f64 },

    /// Incompatible matrix shapes at a public API boundary.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// The per-coordinate gain list has the wrong length.
    #[error("gain list has length {got}, expected {expected} (one per conveyable coordinate)")]
    InvalidAlphas { got: usize, expected: usize },

    /// Trace budget outside `[0, tr Σ_X]`.
    #[error("trace budget {alpha} outside the feasible range [0, {max}]")]
    AlphaOutOfRange { alpha: f64, max: f64 },

    /// A covariance needed by a mutual-information computation is not even
    /// positive semidefinite up to tolerance.
    #[error("degenerate covariance: {0}")]
    DegenerateCovariance(String),

    /// The sender's pointwise message cost is not strictly convex, so the
    /// best-response fixed point is undefined — a boundary case that is
    /// reported rather than certified or rejected.
    #[error("encoder stage cost is not strictly convex (c_y² − δ·c_x² = {0:.3e})")]
    IndefiniteEncoderCost(f64),

    /// Parameter validation failure (non-finite input, δ ≤ 0, and so on).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Structured non-fatal conditions attached to solver outputs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Warning {
    /// The private and relevant blocks are uncorrelated (zero cross
    /// covariance): the game decouples and the message carries only `Y`.
    DecoupledSource,
}

impl std::fmt::Display for Warning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Warning::DecoupledSource => write!(
                f,
                "private and relevant parts are uncorrelated; the message carries only Y \
                 and the privacy term is vacuous"
            ),
        }
    }
}
