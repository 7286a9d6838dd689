//! Scalar equilibria over constrained channels.
//!
//! Both channels ride on the same geometry as the noiseless game: the
//! equilibrium encoder direction `(A, B)` is unchanged, and only *how* the
//! scalar `U = (AX + BY)/√g` (unit variance) crosses the channel differs.
//!
//! **Power-constrained Gaussian channel** ([`solve_awgn`]): transmit
//! `Z = √P·U`, receive `R = Z + W` with `W ~ N(0, σ_W²)`. The encoder is
//! scaled so the power constraint binds exactly; the decoders divide by
//! `P + σ_W²` instead of the message variance, and every mean-square error
//! interpolates to the noiseless value as `σ_W² → 0`.
//!
//! **Discrete channel** ([`solve_discrete`]): the sender may only emit one
//! of `M` symbols, so it quantizes `U` with the minimum-distortion
//! (Lloyd–Max) quantizer for the standard normal ([`lloyd_max_gaussian`])
//! and the receiver decodes the cell's conditional mean `û`, mapped back
//! through the regression coefficients of `X` and `Y` on `U`:
//!
//! ```text
//! MSE_X = σ_X² − c_X²·(1 − mse_U),   c = Cov(S, U) = Σ^{1/2}q₁
//! ```
//!
//! The quantizer solver follows Lloyd's fixed point (cell conditional
//! means, midpoint boundaries) but polishes with a safeguarded Newton
//! iteration on the same stationarity conditions — the plain fixed-point
//! sweep needs hundreds of thousands of passes at `M = 256` while the
//! polish lands in a handful, with identical limits (the optimum is unique
//! for a log-concave density).

use crate::equilibrium::{scalar_ratio, whiten};
use crate::mat::Mat;
use crate::model::{
    evaluate_linear, ChannelSpec, EquilibriumReport, GameSpec, JointGaussian, LinearPolicyPair,
};
use crate::norm;
use crate::{Error, Result, Warning};

/// Default convergence tolerance on the per-iteration movement of the
/// reconstruction levels.
pub const LLOYD_DEFAULT_TOL: f64 = 1e-12;
/// Default iteration budget for [`lloyd_max_gaussian`].
pub const LLOYD_DEFAULT_MAX_ITER: usize = 100_000;

/// Linear Nash equilibrium of the scalar game over the power-constrained
/// additive-Gaussian-noise channel.
#[derive(Clone, Debug)]
pub struct NoisyEquilibrium {
    pub spec: GameSpec,
    /// Encoder `Z = A·X + B·Y`, scaled so the power constraint binds.
    pub a: f64,
    pub b: f64,
    /// `A²σ_X² + B²σ_Y² + 2ABρ`; equals the power budget up to rounding.
    pub power_used: f64,
    /// Decoder gains on the received signal: `X̂ = d_x·R`, `Ŷ = d_y·R`.
    pub d_x: f64,
    pub d_y: f64,
    pub report: EquilibriumReport,
    pub warnings: Vec<Warning>,
}

impl NoisyEquilibrium {
    /// Encoder slope `B/A`; `None` when the source decouples (`A = 0`).
    pub fn b_over_a(&self) -> Option<f64> {
        if self.a == 0.0 {
            None
        } else {
            Some(self.b / self.a)
        }
    }
}

/// Solve the scalar game over the additive-Gaussian-noise channel with
/// average power budget `p` and noise variance `sigma_w2`. The encoder
/// direction is exactly the noiseless equilibrium's; only its scale (to
/// meet the power constraint with equality) and the decoder denominator
/// `P + σ_W²` change. For `ρ = 0` the game decouples and the equilibrium
/// transmits `Y` alone, flagged with [`Warning::DecoupledSource`].
pub fn solve_awgn(
    sx2: f64,
    sy2: f64,
    rho: f64,
    delta: f64,
    p: f64,
    sigma_w2: f64,
) -> Result<NoisyEquilibrium> {
    let source = JointGaussian::scalar(sx2, sy2, rho)?;
    let spec = GameSpec::new(source, delta, ChannelSpec::Awgn { noise_var: sigma_w2, power: p })?;
    let mut warnings = Vec::new();
    let (a, b) = if rho == 0.0 {
        warnings.push(Warning::DecoupledSource);
        (0.0, (p / sy2).sqrt())
    } else {
        let ratio = scalar_ratio(sx2, sy2, rho, delta);
        let g = sx2 + ratio * ratio * sy2 + 2.0 * ratio * rho;
        let t = (p / g).sqrt();
        (t, t * ratio)
    };
    let power_used = a * a * sx2 + b * b * sy2 + 2.0 * a * b * rho;
    let denom = p + sigma_w2;
    let d_x = (a * sx2 + b * rho) / denom;
    let d_y = (a * rho + b * sy2) / denom;
    let policy = LinearPolicyPair {
        f: Mat::from_rows(&[vec![a, b]]),
        d_x: Mat::from_rows(&[vec![d_x]]),
        d_y: Mat::from_rows(&[vec![d_y]]),
        channel: spec.channel.clone(),
    };
    let report = evaluate_linear(&spec, &policy)?;
    Ok(NoisyEquilibrium { spec, a, b, power_used, d_x, d_y, report, warnings })
}

/// Minimum-distortion scalar quantizer for the standard normal.
#[derive(Clone, Debug, PartialEq)]
pub struct Quantizer {
    levels: usize,
    boundaries: Vec<f64>,
    reconstructions: Vec<f64>,
    mse: f64,
    iterations: usize,
}

impl Quantizer {
    pub fn levels(&self) -> usize {
        self.levels
    }

    /// The `M − 1` interior cell boundaries, increasing. Cells are
    /// `(−∞, b₀], (b₀, b₁], …, (b_{M−2}, ∞)`.
    pub fn boundaries(&self) -> &[f64] {
        &self.boundaries
    }

    /// The `M` reconstruction levels, increasing; level `j` is the
    /// standard-normal conditional mean of cell `j`.
    pub fn reconstructions(&self) -> &[f64] {
        &self.reconstructions
    }

    /// Distortion `E[(U − Û)²]` for `U ~ N(0, 1)`.
    pub fn mse(&self) -> f64 {
        self.mse
    }

    /// Iterations spent reaching the fixed point.
    pub fn iterations(&self) -> usize {
        self.iterations
    }

    /// Symbol for a value: ascending cells map to symbols `0…M−1`
    /// (boundary ties go to the lower cell).
    pub fn index_of(&self, u: f64) -> usize {
        self.boundaries.partition_point(|&b| b < u)
    }

    /// Reconstruction level for a symbol.
    pub fn reconstruct(&self, symbol: usize) -> f64 {
        self.reconstructions[symbol]
    }
}

/// `x·φ(x)` with the correct zero limits at `±∞`.
fn x_phi(x: f64) -> f64 {
    if x.is_infinite() {
        0.0
    } else {
        x * norm::pdf(x)
    }
}

/// Standard-normal probability of `(a, b]`, differenced in whichever tail
/// keeps the subtraction well conditioned. Cells deep in the right tail
/// would otherwise cancel catastrophically (`Φ ≈ 1` on both ends), which
/// stalls the quantizer iteration below `M ≈ 10³` levels of resolution.
fn interval_mass(a: f64, b: f64) -> f64 {
    if a >= 0.0 {
        norm::cdf(-a) - norm::cdf(-b)
    } else {
        norm::cdf(b) - norm::cdf(a)
    }
}

/// `∫ₐᵇ (u − r)² φ(u) du` in closed form.
fn cell_distortion(a: f64, b: f64, r: f64) -> f64 {
    let mass = interval_mass(a, b);
    (1.0 + r * r) * mass - (x_phi(b) - x_phi(a)) - 2.0 * r * (norm::pdf(a) - norm::pdf(b))
}

/// Interior midpoint boundaries for the given levels, without the ±∞ ends.
fn midpoints(r: &[f64]) -> Vec<f64> {
    r.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
}

/// Conditional means and masses of every cell induced by the levels.
fn centroids(r: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let m = r.len();
    let mut c = Vec::with_capacity(m);
    let mut mass = Vec::with_capacity(m);
    let mut lo = f64::NEG_INFINITY;
    for j in 0..m {
        let hi = if j + 1 < m { 0.5 * (r[j] + r[j + 1]) } else { f64::INFINITY };
        let w = interval_mass(lo, hi);
        c.push((norm::pdf(lo) - norm::pdf(hi)) / w);
        mass.push(w);
        lo = hi;
    }
    (c, mass)
}

fn residual_norm(r: &[f64], c: &[f64]) -> f64 {
    r.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

/// One safeguarded Newton step on `F(r) = r − centroid(r)`: the Jacobian is
/// tridiagonal because each level only touches its two midpoint
/// boundaries. Returns `None` when no damped step both decreases `‖F‖`
/// and keeps the levels increasing — the caller then falls back to a plain
/// fixed-point sweep.
fn newton_step(r: &[f64], c: &[f64], mass: &[f64]) -> Option<Vec<f64>> {
    let m = r.len();
    // ∂centroid_j/∂(lower, upper boundary of cell j); zero at infinite ends.
    let mut dc_lo = vec![0.0; m];
    let mut dc_hi = vec![0.0; m];
    let mut lo = f64::NEG_INFINITY;
    for j in 0..m {
        let hi = if j + 1 < m { 0.5 * (r[j] + r[j + 1]) } else { f64::INFINITY };
        if lo.is_finite() {
            dc_lo[j] = norm::pdf(lo) * (c[j] - lo) / mass[j];
        }
        if hi.is_finite() {
            dc_hi[j] = norm::pdf(hi) * (hi - c[j]) / mass[j];
        }
        lo = hi;
    }
    let mut sub = vec![0.0; m];
    let mut diag = vec![0.0; m];
    let mut sup = vec![0.0; m];
    for j in 0..m {
        diag[j] = 1.0 - 0.5 * (dc_lo[j] + dc_hi[j]);
        if j > 0 {
            sub[j] = -0.5 * dc_lo[j];
        }
        if j + 1 < m {
            sup[j] = -0.5 * dc_hi[j];
        }
    }
    // Thomas solve of J·d = F.
    let mut f: Vec<f64> = r.iter().zip(c).map(|(a, b)| a - b).collect();
    let mut d = vec![0.0; m];
    let mut cp = vec![0.0; m];
    if diag[0].abs() < 1e-300 {
        return None;
    }
    cp[0] = sup[0] / diag[0];
    f[0] /= diag[0];
    for j in 1..m {
        let denom = diag[j] - sub[j] * cp[j - 1];
        if denom.abs() < 1e-300 {
            return None;
        }
        cp[j] = sup[j] / denom;
        f[j] = (f[j] - sub[j] * f[j - 1]) / denom;
    }
    d[m - 1] = f[m - 1];
    for j in (0..m - 1).rev() {
        d[j] = f[j] - cp[j] * d[j + 1];
    }

    let base = residual_norm(r, c);
    let mut step = 1.0;
    for _ in 0..8 {
        let cand: Vec<f64> = r.iter().zip(&d).map(|(x, dx)| x - step * dx).collect();
        let increasing = cand.windows(2).all(|w| w[0] < w[1]);
        if increasing {
            let (cc, _) = centroids(&cand);
            if residual_norm(&cand, &cc) < base {
                return Some(cand);
            }
        }
        step *= 0.5;
    }
    None
}

/// Compute the minimum-distortion `m`-level quantizer of the standard
/// normal: reconstruction levels are cell conditional means, boundaries
/// are midpoints of adjacent levels. Deterministic quantile
/// initialization (`Φ⁻¹((j+½)/m)`); iterates until the per-step level
/// movement drops to `tol`, mixing fixed-point sweeps with safeguarded
/// Newton steps (both target the same unique fixed point).
pub fn lloyd_max_gaussian(m: usize, tol: f64, max_iter: usize) -> Result<Quantizer> {
    if m == 0 {
        return Err(Error::InvalidParameter("quantizer needs at least one level".into()));
    }
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {tol}")));
    }
    if max_iter == 0 {
        return Err(Error::InvalidParameter("iteration budget must be positive".into()));
    }
    if m == 1 {
        return Ok(Quantizer {
            levels: 1,
            boundaries: Vec::new(),
            reconstructions: vec![0.0],
            mse: 1.0,
            iterations: 0,
        });
    }
    let mut r: Vec<f64> =
        (0..m).map(|j| norm::inv_cdf((j as f64 + 0.5) / m as f64)).collect();
    let mut iterations = 0;
    let movement = loop {
        let (c, mass) = centroids(&r);
        let next = newton_step(&r, &c, &mass).unwrap_or(c);
        let movement = r
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        r = next;
        iterations += 1;
        if movement <= tol {
            break movement;
        }
        if iterations >= max_iter {
            return Err(Error::NonConvergence {
                what: "lloyd-max quantizer",
                iterations,
                residual: movement,
            });
        }
    };
    debug_assert!(movement <= tol);

    let boundaries = midpoints(&r);
    let mut mse = 0.0;
    let mut lo = f64::NEG_INFINITY;
    for j in 0..m {
        let hi = if j + 1 < m { boundaries[j] } else { f64::INFINITY };
        mse += cell_distortion(lo, hi, r[j]);
        lo = hi;
    }
    Ok(Quantizer { levels: m, boundaries, reconstructions: r, mse, iterations })
}

/// Equilibrium of the scalar game when the sender may only emit one of
/// `M` discrete symbols.
#[derive(Clone, Debug)]
pub struct DiscreteEquilibrium {
    pub spec: GameSpec,
    pub quantizer: Quantizer,
    /// Regression coefficients of `X` and of `Y` on the unit-variance
    /// transmitted coordinate `U`.
    pub c_x: f64,
    pub c_y: f64,
    /// Per-symbol decoder outputs: `x̂` and `ŷ` for each symbol.
    pub recon_x: Vec<f64>,
    pub recon_y: Vec<f64>,
    /// The linear scaffold: the encoder row computes `U` from `(x, y)`
    /// (then quantized), and the decoders scale the reconstruction `û`.
    pub report: EquilibriumReport,
    pub warnings: Vec<Warning>,
}

impl DiscreteEquilibrium {
    pub fn policy(&self) -> &LinearPolicyPair {
        &self.report.policy
    }

    /// Symbol transmitted for a source realization.
    pub fn encode(&self, x: f64, y: f64) -> usize {
        let f = &self.report.policy.f;
        self.quantizer.index_of(f[(0, 0)] * x + f[(0, 1)] * y)
    }

    /// Receiver's estimate pair for a symbol.
    pub fn decode(&self, symbol: usize) -> (f64, f64) {
        (self.recon_x[symbol], self.recon_y[symbol])
    }
}

/// Solve the scalar game over an `m`-symbol noiseless discrete channel:
/// quantize the equilibrium coordinate `U` and decode each cell's
/// conditional mean, mapped into `(x̂, ŷ)` by the regression coefficients.
/// Sender-preferred among equilibria (it is also the commitment solution),
/// improving toward the noiseless equilibrium as `m` grows.
pub fn solve_discrete(
    sx2: f64,
    sy2: f64,
    rho: f64,
    delta: f64,
    m: usize,
) -> Result<DiscreteEquilibrium> {
    if m < 2 {
        return Err(Error::InvalidParameter(
            "a discrete-channel equilibrium needs at least two symbols".into(),
        ));
    }
    let source = JointGaussian::scalar(sx2, sy2, rho)?;
    let spec = GameSpec::new(source, delta, ChannelSpec::Discrete { levels: m })?;
    let transform = whiten(&spec.source, delta)?;
    let mut warnings = Vec::new();
    if spec.source.cross_block_is_zero() {
        warnings.push(Warning::DecoupledSource);
    }
    // Unit-variance transmitted coordinate and the regression of S on it.
    let u_row = vec![transform.t_map[(0, 0)], transform.t_map[(0, 1)]];
    let c_x = transform.back_map[(0, 0)];
    let c_y = transform.back_map[(1, 0)];

    let quantizer = lloyd_max_gaussian(m, LLOYD_DEFAULT_TOL, LLOYD_DEFAULT_MAX_ITER)?;
    let captured = 1.0 - quantizer.mse();
    let mse_x = sx2 - c_x * c_x * captured;
    let mse_y = sy2 - c_y * c_y * captured;
    let recon_x: Vec<f64> = quantizer.reconstructions().iter().map(|r| c_x * r).collect();
    let recon_y: Vec<f64> = quantizer.reconstructions().iter().map(|r| c_y * r).collect();

    let policy = LinearPolicyPair {
        f: Mat::from_rows(&[u_row]),
        d_x: Mat::from_rows(&[vec![c_x]]),
        d_y: Mat::from_rows(&[vec![c_y]]),
        channel: spec.channel.clone(),
    };
    let report = EquilibriumReport {
        mse_x,
        mse_y,
        j_e: mse_y - delta * mse_x,
        j_d: mse_y + mse_x,
        policy,
        spectrum: transform.spectrum.clone(),
    };
    Ok(DiscreteEquilibrium { spec, quantizer, c_x, c_y, recon_x, recon_y, report, warnings })
}
