//! Linear Nash and Stackelberg equilibria of the noiseless game.
//!
//! The equilibrium structure lives in the spectrum of the signed weight
//! matrix `W = Σ^{1/2} diag(−δ·I_{n_x}, I_{n_y}) Σ^{1/2} = QΛQᵀ`, which by
//! inertia has exactly `n_y` positive and `n_x` negative eigenvalues. In the
//! whitened coordinates `T = QᵀΣ^{−1/2}S` (identity covariance) the sender
//! cost separates as `J^e = Σ_i λ_i·E[(T_i − T̂_i)²]`: coordinates with
//! `λ_i > 0` are worth revealing perfectly, the rest are worth hiding.
//!
//! A linear Nash equilibrium transmits each positive-spectrum coordinate
//! scaled by an arbitrary nonzero gain `α_i` (or drops it, `α_i = 0`); the
//! receiver inverts the gains. All-nonzero gains give the payoff-dominant
//! equilibrium, which is also the Stackelberg solution — the sender gains
//! nothing from commitment here. Equilibria that drop a positive-spectrum
//! coordinate are still mutual best responses but cost the sender that
//! coordinate's eigenvalue.
//!
//! For scalar `X` and `Y` everything collapses to the closed-form encoder
//! slope computed by [`scalar_ratio`]; [`solve_scalar`] uses that form
//! directly and cross-checks it against the spectral route.

use crate::mat::Mat;
use crate::model::{
    evaluate_linear, game_matrix, ChannelSpec, EquilibriumReport, GameSpec, JointGaussian,
    LinearPolicyPair,
};
use crate::spectral::{self, eig_sym, EigSort, SpectralDecomposition};
use crate::{Error, Result, Warning};

/// Change of basis that diagonalizes the game: whitened coordinates
/// `T = t_map·S` have identity covariance and separate the sender cost
/// along the spectrum of the weight matrix.
#[derive(Clone, Debug)]
pub struct WhiteningTransform {
    /// Spectrum of the weight matrix, positive eigenvalues first.
    pub spectrum: SpectralDecomposition,
    /// `QᵀΣ^{−1/2}`, source to whitened coordinates.
    pub t_map: Mat,
    /// `Σ^{1/2}Q`, whitened coordinates back to the source; inverse of `t_map`.
    pub back_map: Mat,
    /// `QᵀΣQ`: source covariance expressed in the eigenbasis. Its trailing
    /// diagonal entries are the receiver's cost for untransmitted coordinates.
    pub k: Mat,
}

/// Diagonalize the weight matrix of `(source, delta)` and build the
/// whitening maps. Eigenvalues are classified by strict sign here (an exact
/// zero cannot occur for a positive-definite source and `δ > 0`, so one is
/// reported as a degenerate input).
pub fn whiten(source: &JointGaussian, delta: f64) -> Result<WhiteningTransform> {
    let w = game_matrix(source, delta)?;
    let spectrum = eig_sym(&w, EigSort::PositivesFirst, Some(0.0))?;
    if spectrum.n_pos != source.n_y() || spectrum.n_neg != source.n_x() {
        return Err(Error::DegenerateCovariance(format!(
            "weight matrix inertia ({} positive, {} negative, {} zero) does not split as \
             ({} positive, {} negative); the source covariance is numerically degenerate",
            spectrum.n_pos,
            spectrum.n_neg,
            spectrum.n_zero,
            source.n_y(),
            source.n_x()
        )));
    }
    let sqrt = spectral::sqrt_pd(source.sigma())?;
    let inv_sqrt = spectral::inv_sqrt_pd(source.sigma())?;
    let t_map = spectrum.q.t().mul(inv_sqrt.mat());
    let back_map = sqrt.mat().mul(&spectrum.q);
    let k = spectrum.q.t().mul(source.sigma().mat()).mul(&spectrum.q);
    Ok(WhiteningTransform { spectrum, t_map, back_map, k })
}

/// A linear Nash equilibrium together with everything needed to audit it.
#[derive(Clone, Debug)]
pub struct NashSolution {
    pub spec: GameSpec,
    pub transform: WhiteningTransform,
    /// Per-coordinate transmit gains for the `n_y` positive-spectrum
    /// coordinates; `0` means the coordinate is dropped.
    pub alphas: Vec<f64>,
    pub report: EquilibriumReport,
    /// True when every positive-spectrum coordinate is transmitted.
    pub payoff_dominant: bool,
    pub warnings: Vec<Warning>,
}

impl NashSolution {
    pub fn policy(&self) -> &LinearPolicyPair {
        &self.report.policy
    }

    /// Encoder slope `B/A` for scalar games with `Z = A·X + B·Y`.
    /// `None` for vector sources or when `A = 0` (decoupled source).
    pub fn b_over_a(&self) -> Option<f64> {
        let f = &self.report.policy.f;
        if f.rows() != 1 || f.cols() != 2 {
            return None;
        }
        let (a, b) = (f[(0, 0)], f[(0, 1)]);
        if a == 0.0 {
            None
        } else {
            Some(b / a)
        }
    }
}

/// Solve the noiseless game for the linear Nash equilibrium with the given
/// transmit gains (one per positive-spectrum coordinate; zero drops the
/// coordinate). Gains only rescale the message, so every nonzero choice
/// yields the same costs.
pub fn solve_nash(spec: &GameSpec, alphas: &[f64]) -> Result<NashSolution> {
    if spec.channel != ChannelSpec::Noiseless {
        return Err(Error::InvalidParameter(
            "the nash solver covers the noiseless channel; use the channel solvers otherwise"
                .into(),
        ));
    }
    let n_y = spec.source.n_y();
    if alphas.len() != n_y {
        return Err(Error::InvalidAlphas { got: alphas.len(), expected: n_y });
    }
    if alphas.iter().any(|a| !a.is_finite()) {
        return Err(Error::InvalidParameter(format!("transmit gains must be finite, got {alphas:?}")));
    }
    let transform = whiten(&spec.source, spec.delta)?;
    build_solution(spec, transform, alphas.to_vec(), None)
}

/// The Stackelberg solution: the sender commits, but commitment buys
/// nothing — the optimum is the payoff-dominant Nash equilibrium
/// (all gains nonzero; unit gains by convention).
pub fn solve_stackelberg(spec: &GameSpec) -> Result<NashSolution> {
    solve_nash(spec, &vec![1.0; spec.source.n_y()])
}

/// Encoder slope `B/A` of the scalar equilibrium, as an explicit radical:
///
/// ```text
/// B/A = −(δσ_X² + σ_Y²)/(2δρ) − √((δσ_X² + σ_Y²)² − 4δρ²)/(2δρ)
/// ```
///
/// It is the root of `δρ·r² + (δσ_X² + σ_Y²)·r + ρ = 0` lying opposite in
/// sign to `ρ`. The discriminant equals `(δσ_X² − σ_Y²)² + 4δ(σ_X²σ_Y² − ρ²)`
/// and is positive for any valid source. Requires `ρ ≠ 0`.
pub(crate) fn scalar_ratio(sx2: f64, sy2: f64, rho: f64, delta: f64) -> f64 {
    let num = delta * sx2 + sy2;
    let disc = num * num - 4.0 * delta * rho * rho;
    -num / (2.0 * delta * rho) - disc.sqrt() / (2.0 * delta * rho)
}

/// Closed-form solution of the scalar noiseless game. The encoder is
/// normalized to `Z = X + (B/A)·Y`; the decoders are the receiver's exact
/// best response. For `ρ = 0` the game decouples: the equilibrium reveals
/// `Y` and says nothing about `X`, and the solution carries
/// [`Warning::DecoupledSource`].
pub fn solve_scalar(sx2: f64, sy2: f64, rho: f64, delta: f64) -> Result<NashSolution> {
    let spec = GameSpec::scalar(sx2, sy2, rho, delta)?;
    let transform = whiten(&spec.source, delta)?;
    if rho == 0.0 {
        // Decoupled: the positive-spectrum coordinate is Y/σ_Y. Pick the
        // gain that makes the encoder exactly (0, 1), i.e. Z = Y.
        let alpha = 1.0 / transform.t_map[(0, 1)];
        return build_solution(&spec, transform, vec![alpha], None);
    }
    let ratio = scalar_ratio(sx2, sy2, rho, delta);
    // Cross-check the radical against the spectral route: the whitened
    // encoder direction must be parallel to (1, ratio). Compare as an angle
    // (normalized cross product) — a ratio-of-components comparison loses
    // its meaning when the direction is nearly vertical (extreme δ).
    let (t0, t1) = (transform.t_map[(0, 0)], transform.t_map[(0, 1)]);
    let cross = (t1 - t0 * ratio).abs();
    let scale = (1.0 + ratio * ratio).sqrt() * (t0 * t0 + t1 * t1).sqrt();
    assert!(
        cross <= 1e-9 * scale,
        "closed-form slope {ratio} disagrees with the spectral direction ({t0}, {t1})"
    );
    let g = sx2 + ratio * ratio * sy2 + 2.0 * ratio * rho;
    let c_x = (sx2 + ratio * rho) / g;
    let c_y = (rho + ratio * sy2) / g;
    let alpha = 1.0 / transform.t_map[(0, 0)];
    let policy = LinearPolicyPair {
        f: Mat::from_rows(&[vec![1.0, ratio]]),
        d_x: Mat::from_rows(&[vec![c_x]]),
        d_y: Mat::from_rows(&[vec![c_y]]),
        channel: ChannelSpec::Noiseless,
    };
    build_solution(&spec, transform, vec![alpha], Some(policy))
}

/// Assemble encoder/decoders from gains (or take a pre-built policy whose
/// encoder equals the gain-scaled whitened rows), evaluate, and flag
/// decoupled sources.
fn build_solution(
    spec: &GameSpec,
    transform: WhiteningTransform,
    alphas: Vec<f64>,
    policy: Option<LinearPolicyPair>,
) -> Result<NashSolution> {
    let n_x = spec.source.n_x();
    let n_y = spec.source.n_y();
    let dim = spec.source.dim();
    let policy = match policy {
        Some(p) => p,
        None => {
            let mut f = Mat::zeros(n_y, dim);
            let mut d = Mat::zeros(dim, n_y);
            for (i, &alpha) in alphas.iter().enumerate() {
                if alpha == 0.0 {
                    continue; // dropped coordinate: zero encoder row, zero decoder column
                }
                for j in 0..dim {
                    f[(i, j)] = alpha * transform.t_map[(i, j)];
                    d[(j, i)] = transform.back_map[(j, i)] / alpha;
                }
            }
            LinearPolicyPair {
                d_x: d.block(0, 0, n_x, n_y),
                d_y: d.block(n_x, 0, n_y, n_y),
                f,
                channel: ChannelSpec::Noiseless,
            }
        }
    };
    let report = evaluate_linear(spec, &policy)?;
    let payoff_dominant = alphas.iter().all(|&a| a != 0.0);
    let mut warnings = Vec::new();
    if spec.source.cross_block_is_zero() {
        warnings.push(Warning::DecoupledSource);
    }
    Ok(NashSolution {
        spec: spec.clone(),
        transform,
        alphas,
        report,
        payoff_dominant,
        warnings,
    })
}
