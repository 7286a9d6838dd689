//! Game model: sources, channels, linear policies and their exact evaluation.
//!
//! The source is a jointly Gaussian vector `S = (X, Y)` with `X` private
//! (`n_x` coordinates) and `Y` relevant (`n_y` coordinates). A linear policy
//! pair is an encoder `Z = F·S` (plus channel noise where applicable) and a
//! pair of linear decoders `X̂ = D_X·R`, `Ŷ = D_Y·R` acting on the received
//! message `R`.
//!
//! [`evaluate_linear`] computes exact second-order quantities — for jointly
//! Gaussian variables the mean-square errors of linear estimates are fully
//! determined by covariances:
//!
//! ```text
//! Σ_Z  = F Σ Fᵀ (+ σ_W²·I on the noisy channel)
//! Σ_SZ = Σ Fᵀ
//! MSE_X = tr Σ_X − 2·tr(D_X Σ_ZX) + tr(D_X Σ_Z D_Xᵀ)      (same for Y)
//! J^e = MSE_Y − δ·MSE_X,   J^d = MSE_Y + MSE_X
//! ```
//!
//! [`mmse_decoders`] returns the receiver's best response `D = Σ_SZ Σ_Z⁺`,
//! using a spectral pseudo-inverse so rank-deficient message covariances
//! (babbling equilibria, duplicated encoder rows) are handled without
//! special cases. [`sample`]/[`empirical_report`] provide the Monte-Carlo
//! route for consistency checks: Cholesky-colored draws from the single
//! crate-wide seeded generator.

use crate::mat::Mat;
use crate::spectral::{
    self, cholesky_pd, eig_sym, EigSort, SpectralDecomposition, SymMatrix, PSEUDO_INVERSE_CUTOFF,
};
use crate::{rng, Error, Result};

/// Jointly Gaussian source, zero mean, covariance ordered `(X, Y)`.
#[derive(Clone, Debug)]
pub struct JointGaussian {
    n_x: usize,
    n_y: usize,
    sigma: SymMatrix,
}

impl JointGaussian {
    /// Validates the block split and positive definiteness.
    pub fn new(n_x: usize, n_y: usize, sigma: SymMatrix) -> Result<Self> {
        if n_x == 0 || n_y == 0 {
            return Err(Error::InvalidParameter(
                "both the private and the relevant block must be nonempty".into(),
            ));
        }
        if sigma.dim() != n_x + n_y {
            return Err(Error::DimensionMismatch(format!(
                "covariance is {}x{} but n_x + n_y = {}",
                sigma.dim(),
                sigma.dim(),
                n_x + n_y
            )));
        }
        // Positive definiteness; Cholesky doubles as the sampling factor later.
        cholesky_pd(&sigma)?;
        Ok(JointGaussian { n_x, n_y, sigma })
    }

    /// Scalar source: variances `sx2`, `sy2` and covariance `rho`
    /// (a covariance, not a normalized correlation coefficient).
    pub fn scalar(sx2: f64, sy2: f64, rho: f64) -> Result<Self> {
        for (name, v) in [("sx2", sx2), ("sy2", sy2), ("rho", rho)] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be finite, got {v}")));
            }
        }
        if sx2 <= 0.0 || sy2 <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "variances must be positive, got sx2 = {sx2}, sy2 = {sy2}"
            )));
        }
        let sigma = SymMatrix::from_rows(&[vec![sx2, rho], vec![rho, sy2]])?;
        JointGaussian::new(1, 1, sigma)
    }

    pub fn n_x(&self) -> usize {
        self.n_x
    }

    pub fn n_y(&self) -> usize {
        self.n_y
    }

    pub fn dim(&self) -> usize {
        self.n_x + self.n_y
    }

    pub fn sigma(&self) -> &SymMatrix {
        &self.sigma
    }

    /// Covariance of the private block, `n_x × n_x`.
    pub fn sigma_x(&self) -> Mat {
        self.sigma.block(0, 0, self.n_x, self.n_x)
    }

    /// Covariance of the relevant block, `n_y × n_y`.
    pub fn sigma_y(&self) -> Mat {
        self.sigma.block(self.n_x, self.n_x, self.n_y, self.n_y)
    }

    /// Cross covariance `Cov(X, Y)`, `n_x × n_y`.
    pub fn sigma_xy(&self) -> Mat {
        self.sigma.block(0, self.n_x, self.n_x, self.n_y)
    }

    /// Cross covariance `Cov(Y, X)`, `n_y × n_x`.
    pub fn sigma_yx(&self) -> Mat {
        self.sigma.block(self.n_x, 0, self.n_y, self.n_x)
    }

    /// True when `Cov(X, Y) = 0` exactly: the game decouples and solvers
    /// attach [`crate::Warning::DecoupledSource`].
    pub fn cross_block_is_zero(&self) -> bool {
        self.sigma_xy().max_abs() == 0.0
    }
}

/// Channel between encoder and decoder.
#[derive(Clone, Debug, PartialEq)]
pub enum ChannelSpec {
    /// Message received exactly.
    Noiseless,
    /// Scalar additive white Gaussian noise channel with an average power
    /// constraint `E[Z²] ≤ power` on the channel input.
    Awgn { noise_var: f64, power: f64 },
    /// Deterministic `levels`-cell quantizer on a scalar message.
    Discrete { levels: usize },
}

/// A complete game instance: source, privacy weight, channel.
#[derive(Clone, Debug)]
pub struct GameSpec {
    pub source: JointGaussian,
    pub delta: f64,
    pub channel: ChannelSpec,
}

impl GameSpec {
    pub fn new(source: JointGaussian, delta: f64, channel: ChannelSpec) -> Result<Self> {
        if !delta.is_finite() || delta <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "privacy weight delta must be positive and finite, got {delta}"
            )));
        }
        match channel {
            ChannelSpec::Noiseless => {}
            ChannelSpec::Awgn { noise_var, power } => {
                if !(noise_var.is_finite() && noise_var > 0.0 && power.is_finite() && power > 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "awgn channel needs positive finite noise_var and power, got {noise_var}, {power}"
                    )));
                }
                if source.dim() != 2 {
                    return Err(Error::InvalidParameter(
                        "the awgn channel equilibrium is defined for scalar sources only".into(),
                    ));
                }
            }
            ChannelSpec::Discrete { levels } => {
                if levels == 0 {
                    return Err(Error::InvalidParameter("quantizer needs at least one level".into()));
                }
                if source.dim() != 2 {
                    return Err(Error::InvalidParameter(
                        "the discrete channel equilibrium is defined for scalar sources only".into(),
                    ));
                }
            }
        }
        Ok(GameSpec { source, delta, channel })
    }

    /// Convenience constructor for the noiseless scalar game.
    pub fn scalar(sx2: f64, sy2: f64, rho: f64, delta: f64) -> Result<Self> {
        GameSpec::new(JointGaussian::scalar(sx2, sy2, rho)?, delta, ChannelSpec::Noiseless)
    }
}

/// Linear encoder and decoder pair. The message dimension is `f.rows()`;
/// zero-row encoders are legal and represent babbling (no information).
#[derive(Clone, Debug, PartialEq)]
pub struct LinearPolicyPair {
    pub f: Mat,
    pub d_x: Mat,
    pub d_y: Mat,
    pub channel: ChannelSpec,
}

impl LinearPolicyPair {
    pub fn message_dim(&self) -> usize {
        self.f.rows()
    }

    /// Shape and finiteness checks against a source.
    pub fn validate(&self, source: &JointGaussian) -> Result<()> {
        let m = self.message_dim();
        if self.f.cols() != source.dim() {
            return Err(Error::DimensionMismatch(format!(
                "encoder expects {} source coordinates, source has {}",
                self.f.cols(),
                source.dim()
            )));
        }
        if self.d_x.rows() != source.n_x() || self.d_x.cols() != m {
            return Err(Error::DimensionMismatch(format!(
                "X decoder is {}x{}, expected {}x{m}",
                self.d_x.rows(),
                self.d_x.cols(),
                source.n_x()
            )));
        }
        if self.d_y.rows() != source.n_y() || self.d_y.cols() != m {
            return Err(Error::DimensionMismatch(format!(
                "Y decoder is {}x{}, expected {}x{m}",
                self.d_y.rows(),
                self.d_y.cols(),
                source.n_y()
            )));
        }
        if !(self.f.all_finite() && self.d_x.all_finite() && self.d_y.all_finite()) {
            return Err(Error::InvalidParameter("policy matrices must be finite".into()));
        }
        if let ChannelSpec::Awgn { power, .. } = self.channel {
            // Tolerance is relative for large budgets so that exactly
            // scaled encoders never fail on rounding alone.
            let used = self.f.mul(source.sigma().mat()).mul(&self.f.t()).trace();
            if used > power + 1e-9 * power.max(1.0) {
                return Err(Error::InvalidParameter(format!(
                    "encoder uses average power {used}, exceeding the budget {power}"
                )));
            }
        }
        Ok(())
    }
}

/// Exact second-order performance of a policy, with the signed spectrum of
/// the game weight matrix attached for downstream reporting.
#[derive(Clone, Debug)]
pub struct EquilibriumReport {
    pub mse_x: f64,
    pub mse_y: f64,
    pub j_e: f64,
    pub j_d: f64,
    pub policy: LinearPolicyPair,
    pub spectrum: SpectralDecomposition,
}

/// The signed weight matrix `W = Σ^{1/2} · diag(−δ·I_{n_x}, I_{n_y}) · Σ^{1/2}`
/// whose spectrum drives the equilibrium structure: by inertia it carries
/// exactly `n_y` positive and `n_x` negative eigenvalues.
pub fn game_matrix(source: &JointGaussian, delta: f64) -> Result<SymMatrix> {
    let sqrt = spectral::sqrt_pd(source.sigma())?;
    let mut signs = vec![-delta; source.n_x()];
    signs.extend(std::iter::repeat(1.0).take(source.n_y()));
    let d = Mat::diag(&signs);
    SymMatrix::new(sqrt.mat().mul(&d).mul(sqrt.mat()))
}

fn clamp_rounding_negative(v: f64) -> f64 {
    if v < 0.0 && v > -1e-9 {
        0.0
    } else {
        v
    }
}

fn message_covariance(spec: &GameSpec, f: &Mat) -> Result<SymMatrix> {
    let m = f.rows();
    let mut sigma_z = f.mul(spec.source.sigma().mat()).mul(&f.t());
    if let ChannelSpec::Awgn { noise_var, .. } = spec.channel {
        for i in 0..m {
            sigma_z[(i, i)] += noise_var;
        }
    }
    SymMatrix::new(sigma_z)
}

/// Exact closed-form evaluation of a linear policy on a (linear-Gaussian)
/// channel. The quantized channel is nonlinear and has its own evaluation
/// path in the channel module.
pub fn evaluate_linear(spec: &GameSpec, policy: &LinearPolicyPair) -> Result<EquilibriumReport> {
    policy.validate(&spec.source)?;
    if matches!(spec.channel, ChannelSpec::Discrete { .. }) {
        return Err(Error::InvalidParameter(
            "discrete-channel policies are evaluated by the quantizer solver, not evaluate_linear"
                .into(),
        ));
    }
    if policy.channel != spec.channel {
        return Err(Error::InvalidParameter(
            "policy was built for a different channel than the game specifies".into(),
        ));
    }
    let n_x = spec.source.n_x();
    let n_y = spec.source.n_y();
    let m = policy.message_dim();

    let sigma_z = message_covariance(spec, &policy.f)?;
    let sigma_sz = spec.source.sigma().mat().mul(&policy.f.t());
    let sigma_xz = sigma_sz.block(0, 0, n_x, m);
    let sigma_yz = sigma_sz.block(n_x, 0, n_y, m);

    let mse_block = |d: &Mat, cross: &Mat, prior_tr: f64| -> f64 {
        let quad = d.mul(sigma_z.mat()).frob_dot(d);
        clamp_rounding_negative(prior_tr - 2.0 * d.frob_dot(cross) + quad)
    };
    let mse_x = mse_block(&policy.d_x, &sigma_xz, spec.source.sigma_x().trace());
    let mse_y = mse_block(&policy.d_y, &sigma_yz, spec.source.sigma_y().trace());

    let spectrum = eig_sym(&game_matrix(&spec.source, spec.delta)?, EigSort::PositivesFirst, None)?;
    Ok(EquilibriumReport {
        mse_x,
        mse_y,
        j_e: mse_y - spec.delta * mse_x,
        j_d: mse_y + mse_x,
        policy: policy.clone(),
        spectrum,
    })
}

/// Receiver best response to an encoder: `D = Σ_SZ Σ_Z⁺` split into the
/// `X` and `Y` blocks. The spectral pseudo-inverse (relative cutoff
/// [`PSEUDO_INVERSE_CUTOFF`]) covers singular message covariances.
pub fn mmse_decoders(spec: &GameSpec, f: &Mat) -> Result<(Mat, Mat)> {
    if f.cols() != spec.source.dim() {
        return Err(Error::DimensionMismatch(format!(
            "encoder expects {} source coordinates, source has {}",
            f.cols(),
            spec.source.dim()
        )));
    }
    let n_x = spec.source.n_x();
    let n_y = spec.source.n_y();
    let m = f.rows();
    if m == 0 {
        return Ok((Mat::zeros(n_x, 0), Mat::zeros(n_y, 0)));
    }
    let sigma_z = message_covariance(spec, f)?;
    let pinv = spectral::pseudo_inverse(&sigma_z, PSEUDO_INVERSE_CUTOFF)?;
    let d = spec.source.sigma().mat().mul(&f.t()).mul(&pinv);
    Ok((d.block(0, 0, n_x, m), d.block(n_x, 0, n_y, m)))
}

/// Monte-Carlo draws from a game's source (and channel noise where the
/// channel has any), reproducible from the seed.
#[derive(Clone, Debug)]
pub struct SampleBatch {
    pub spec: GameSpec,
    pub seed: u64,
    pub n: usize,
    s: Vec<f64>,
    w: Vec<f64>,
}

impl SampleBatch {
    /// The `i`-th source draw, length `n_x + n_y`.
    pub fn s_row(&self, i: usize) -> &[f64] {
        let d = self.spec.source.dim();
        &self.s[i * d..(i + 1) * d]
    }

    /// The `i`-th channel-noise draw (already scaled to `σ_W`); zero on the
    /// noiseless channel.
    pub fn noise(&self, i: usize) -> f64 {
        if self.w.is_empty() {
            0.0
        } else {
            self.w[i]
        }
    }

    pub fn draws(&self) -> &[f64] {
        &self.s
    }
}

/// Draw `n` source samples (and channel noise, for the AWGN channel) using
/// the crate RNG: source draws first, then noise, both from the same stream.
pub fn sample(spec: &GameSpec, seed: u64, n: usize) -> Result<SampleBatch> {
    if n == 0 {
        return Err(Error::InvalidParameter("sample count must be positive".into()));
    }
    let d = spec.source.dim();
    let chol = cholesky_pd(spec.source.sigma())?;
    let mut r = rng::stream(seed);
    let mut s = vec![0.0; n * d];
    let mut g = vec![0.0; d];
    for i in 0..n {
        rng::fill_standard_normal(&mut r, &mut g);
        let colored = chol.mul_vec(&g);
        s[i * d..(i + 1) * d].copy_from_slice(&colored);
    }
    let w = if let ChannelSpec::Awgn { noise_var, .. } = spec.channel {
        let sd = noise_var.sqrt();
        (0..n).map(|_| sd * rng::standard_normal(&mut r)).collect()
    } else {
        Vec::new()
    };
    Ok(SampleBatch { spec: spec.clone(), seed, n, s, w })
}

/// Empirical counterpart of [`evaluate_linear`] on a sampled batch.
pub fn empirical_report(batch: &SampleBatch, policy: &LinearPolicyPair) -> Result<EquilibriumReport> {
    let spec = &batch.spec;
    policy.validate(&spec.source)?;
    if matches!(spec.channel, ChannelSpec::Discrete { .. }) {
        return Err(Error::InvalidParameter(
            "discrete-channel policies are simulated by the quantizer solver".into(),
        ));
    }
    if policy.channel != spec.channel {
        return Err(Error::InvalidParameter(
            "policy was built for a different channel than the batch".into(),
        ));
    }
    let is_noisy = matches!(spec.channel, ChannelSpec::Awgn { .. });
    let m = policy.message_dim();
    if is_noisy && m > 1 {
        return Err(Error::InvalidParameter(
            "the awgn channel carries a scalar message".into(),
        ));
    }
    let n_x = spec.source.n_x();
    let (mut sum_x, mut sum_y) = (0.0, 0.0);
    for i in 0..batch.n {
        let s = batch.s_row(i);
        let mut z = policy.f.mul_vec(s);
        if is_noisy && m == 1 {
            z[0] += batch.noise(i);
        }
        let xh = policy.d_x.mul_vec(&z);
        let yh = policy.d_y.mul_vec(&z);
        sum_x += s[..n_x]
            .iter()
            .zip(&xh)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>();
        sum_y += s[n_x..]
            .iter()
            .zip(&yh)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>();
    }
    let mse_x = sum_x / batch.n as f64;
    let mse_y = sum_y / batch.n as f64;
    let spectrum = eig_sym(&game_matrix(&spec.source, spec.delta)?, EigSort::PositivesFirst, None)?;
    Ok(EquilibriumReport {
        mse_x,
        mse_y,
        j_e: mse_y - spec.delta * mse_x,
        j_d: mse_y + mse_x,
        policy: policy.clone(),
        spectrum,
    })
}
