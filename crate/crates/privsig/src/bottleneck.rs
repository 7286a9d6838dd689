//! Information-bottleneck solutions: what an encoder that sees only `X`
//! can and should reveal.
//!
//! Three related problems live here.
//!
//! **MMSE bottleneck** ([`solve_mmse_ib`]): minimize `MSE_Y − δ·MSE_X` over
//! encoders `Z = f(X)`. The answer is spectral again, this time for
//!
//! ```text
//! W_ib = Σ_X^{−1/2} Σ_XY Σ_YX Σ_X^{−1/2} − δ·Σ_X
//! ```
//!
//! whose nonnegative eigendirections are worth conveying exactly, giving
//! three regimes: reveal all of `X`, reveal a subspace, or babble.
//!
//! **Trace-constrained variant** ([`solve_constrained_ib`]): minimize
//! `tr(ΥΦ)` over posterior error covariances `Φ ⪰ 0` with `tr(Φ) = α`,
//! where `Υ = Σ_X^{−1} Σ_XY Σ_YX Σ_X^{−1}`. Pushing the whole budget onto a
//! minimal eigendirection of `Υ` gives the value `α·λ_min` — when that much
//! error mass *fits* there; the feasible set also demands `Φ ⪯ Σ_X`, which
//! caps a direction `q` at `1/(qᵀΣ_X^{−1}q)`. Past the cap the solver fills
//! eigendirections of `Υ` in ascending order and finally blends toward
//! `Σ_X`, reporting the achieved objective and a support flag.
//!
//! **Mutual-information bottleneck** ([`solve_chechik`]): the classical
//! Gaussian trade-off `min I(X;Z) − β·I(Y;Z)`, solved by rows that switch
//! on at critical values of `β` along the spectrum of `Σ_{X|Y}Σ_X^{−1}`.
//! [`gaussian_mutual_information`] computes `(I(X;Z), I(Y;Z))` for linear
//! encoders so the two formulations can be compared on the same axes.

use crate::mat::Mat;
use crate::model::{
    evaluate_linear, ChannelSpec, EquilibriumReport, GameSpec, JointGaussian, LinearPolicyPair,
};
use crate::spectral::{
    self, eig_sym, EigSort, SpectralDecomposition, SymMatrix, PSEUDO_INVERSE_CUTOFF,
};
use crate::{Error, Result};

/// How much of `X` the bottleneck encoder conveys.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IBRegime {
    /// Every eigenvalue is strictly positive: `X` is revealed completely.
    FullyInformative,
    /// A proper nonempty subspace is conveyed.
    Partial,
    /// No direction is worth conveying; the encoder sends nothing.
    NonInformative,
}

/// Solution of the MMSE bottleneck problem.
#[derive(Clone, Debug)]
pub struct IBSolution {
    /// The weight matrix `Σ_X^{−1/2}Σ_XYΣ_YXΣ_X^{−1/2} − δΣ_X`.
    pub w_ib: SymMatrix,
    /// Its spectrum, eigenvalues descending.
    pub spectrum: SpectralDecomposition,
    /// Number of conveyed directions: eigenvalues `≥ −zero_tol`.
    pub k: usize,
    pub regime: IBRegime,
    /// Performance against the full `(X, Y)` source; the policy's encoder
    /// has exactly `k` rows and reads the `X` block only.
    pub report: EquilibriumReport,
}

impl IBSolution {
    pub fn policy(&self) -> &LinearPolicyPair {
        &self.report.policy
    }
}

/// Solve the MMSE bottleneck: the encoder observes `X` alone and minimizes
/// `MSE_Y − δ·MSE_X` against an MMSE receiver. Conveys the nonnegative
/// eigendirections of the weight matrix (unit gains; gains are immaterial
/// exactly as in the full-observation game).
pub fn solve_mmse_ib(source: &JointGaussian, delta: f64) -> Result<IBSolution> {
    let spec = GameSpec::new(source.clone(), delta, ChannelSpec::Noiseless)?;
    let n_x = source.n_x();
    let n_y = source.n_y();
    let sigma_x = SymMatrix::new(source.sigma_x())?;
    let inv_sqrt_x = spectral::inv_sqrt_pd(&sigma_x)?;
    let sqrt_x = spectral::sqrt_pd(&sigma_x)?;

    let cross = source.sigma_xy().mul(&source.sigma_yx());
    let mut w = inv_sqrt_x.mat().mul(&cross).mul(inv_sqrt_x.mat());
    let scaled_x = sigma_x.mat().scale(delta);
    w = w.sub(&scaled_x);
    let w_ib = SymMatrix::new(w)?;
    let spectrum = eig_sym(&w_ib, EigSort::Descending, None)?;

    let k = spectrum.lambda.iter().filter(|&&l| l >= -spectrum.zero_tol).count();
    let regime = if k == 0 {
        IBRegime::NonInformative
    } else if k == n_x && spectrum.lambda[n_x - 1] > spectrum.zero_tol {
        IBRegime::FullyInformative
    } else {
        IBRegime::Partial
    };

    // Encoder rows q_iᵀ Σ_X^{−1/2} for the k retained directions, reading
    // only the X block of the source; decoders X̂ = Σ_X^{1/2}Q_k·z and
    // Ŷ = Σ_YX Σ_X^{−1/2}Q_k·z are the exact MMSE responses.
    let q_k = spectrum.q.block(0, 0, n_x, k);
    let enc_x = q_k.t().mul(inv_sqrt_x.mat());
    let mut f = Mat::zeros(k, source.dim());
    f.set_block(0, 0, &enc_x);
    let d_x = sqrt_x.mat().mul(&q_k);
    let d_y = source.sigma_yx().mul(inv_sqrt_x.mat()).mul(&q_k);
    debug_assert_eq!(d_y.rows(), n_y);

    let policy = LinearPolicyPair { f, d_x, d_y, channel: ChannelSpec::Noiseless };
    let report = evaluate_linear(&spec, &policy)?;
    Ok(IBSolution { w_ib, spectrum, k, regime, report })
}

/// A linear observation of `X` plus an independent Gaussian perturbation,
/// `Z = map·X + ξ` with `ξ ~ N(0, noise_cov)`. Describes how a target
/// posterior error covariance is realized; never sampled here.
#[derive(Clone, Debug)]
pub struct NoisyLinearEncoder {
    pub map: Mat,
    pub noise_cov: Mat,
}

/// Solution of the trace-constrained bottleneck problem.
#[derive(Clone, Debug)]
pub struct ConstrainedIBSolution {
    /// Posterior error covariance, PSD with `tr(Φ) = α` and `Φ ⪯ Σ_X`.
    pub phi: SymMatrix,
    pub alpha: f64,
    /// Smallest eigenvalue of `Υ`.
    pub lambda_min: f64,
    /// Achieved `tr(ΥΦ)`. Equals `α·λ_min` whenever
    /// `supported_on_min_eigenspace` holds; above the eigenspace's capacity
    /// it is merely the best this allocation reaches.
    pub objective: f64,
    /// Whether the whole budget fit inside the minimal eigenspace of `Υ`.
    pub supported_on_min_eigenspace: bool,
    /// An encoder realizing `phi` as its posterior error covariance.
    pub encoder: NoisyLinearEncoder,
}

/// Largest `c` with `Φ + c·vvᵀ ⪯ Σ_X`, given the remaining slack
/// `R = Σ_X − Φ`: zero if `v` leaves the range of `R`, else `1/(vᵀR⁺v)`.
fn direction_capacity(r: &SymMatrix, v: &[f64]) -> Result<f64> {
    let pinv = spectral::pseudo_inverse(r, PSEUDO_INVERSE_CUTOFF)?;
    let rv = pinv.mul_vec(v);
    let back = r.mat().mul_vec(&rv);
    let misfit: f64 = back
        .iter()
        .zip(v)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    if misfit > 1e-8 {
        return Ok(0.0); // v has a component outside range(R): nothing fits
    }
    let quad: f64 = v.iter().zip(&rv).map(|(a, b)| a * b).sum();
    if quad <= 0.0 {
        // R ≈ 0 along v (or v ≈ 0): treat as full slack already consumed.
        return Ok(0.0);
    }
    Ok(1.0 / quad)
}

/// Solve the trace-constrained bottleneck for error budget `alpha`:
/// minimize `tr(ΥΦ)` subject to `Φ ⪰ 0`, `Φ ⪯ Σ_X`, `tr(Φ) = alpha`.
///
/// The budget is poured into eigendirections of `Υ` in ascending
/// eigenvalue order (the minimal eigenspace first), each direction capped
/// by its feasibility capacity against the remaining slack; any remainder
/// is absorbed by blending toward `Σ_X`, which is always feasible. The
/// construction of the realizing encoder diagonalizes
/// `G = Σ_X^{−1/2}ΦΣ_X^{−1/2}`: each eigenpair `(g, v)` with `g < 1`
/// becomes a row `vᵀΣ_X^{−1/2}` observed with noise variance `g/(1−g)`,
/// and `g = 1` directions are simply not observed.
pub fn solve_constrained_ib(source: &JointGaussian, alpha: f64) -> Result<ConstrainedIBSolution> {
    let n_x = source.n_x();
    let sigma_x = SymMatrix::new(source.sigma_x())?;
    let trace_x = sigma_x.trace();
    if !alpha.is_finite() || alpha < 0.0 || alpha > trace_x {
        return Err(Error::AlphaOutOfRange { alpha, max: trace_x });
    }
    let inv_x = spectral::pseudo_inverse(&sigma_x, PSEUDO_INVERSE_CUTOFF)?;
    let upsilon = SymMatrix::new(
        inv_x
            .mul(&source.sigma_xy())
            .mul(&source.sigma_yx())
            .mul(&inv_x),
    )?;
    let dec = eig_sym(&upsilon, EigSort::Descending, None)?;
    // Ascending order: walk the descending decomposition from the back.
    let asc: Vec<usize> = (0..n_x).rev().collect();
    let lambda_min = dec.lambda[asc[0]];
    let tie_tol = dec.zero_tol.max(1e-14);

    let mut phi = Mat::zeros(n_x, n_x);
    let mut remaining = alpha;
    let mut supported = true;
    let alloc_eps = 1e-12 * alpha.max(trace_x);
    for &idx in &asc {
        if remaining <= alloc_eps {
            break;
        }
        let in_tie_set = dec.lambda[idx] <= lambda_min + tie_tol;
        let v = dec.q.col(idx);
        let r = SymMatrix::new(sigma_x.mat().sub(&phi))?;
        let cap = direction_capacity(&r, &v)?;
        let c = cap.min(remaining);
        if c <= alloc_eps {
            continue;
        }
        if !in_tie_set {
            supported = false;
        }
        for i in 0..n_x {
            for j in 0..n_x {
                phi[(i, j)] += c * v[i] * v[j];
            }
        }
        remaining -= c;
    }
    if remaining > alloc_eps {
        // No dyadic room left anywhere: blend toward Σ_X, which fixes the
        // trace exactly and stays inside the feasible set by convexity.
        supported = false;
        let tr_phi = phi.trace();
        let theta = (alpha - tr_phi) / (trace_x - tr_phi);
        phi = phi.scale(1.0 - theta).add(&sigma_x.mat().scale(theta));
    }
    let phi = SymMatrix::new(phi)?;
    let objective = upsilon.frob_dot(phi.mat());

    // Realizing encoder via G = Σ_X^{−1/2} Φ Σ_X^{−1/2} ∈ [0, I].
    let inv_sqrt_x = spectral::inv_sqrt_pd(&sigma_x)?;
    let g = SymMatrix::new(inv_sqrt_x.mat().mul(phi.mat()).mul(inv_sqrt_x.mat()))?;
    let g_dec = eig_sym(&g, EigSort::Descending, None)?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut noises: Vec<f64> = Vec::new();
    for i in 0..n_x {
        let gi = g_dec.lambda[i].clamp(0.0, 1.0);
        if gi >= 1.0 - 1e-11 {
            continue; // direction left unobserved: full posterior error there
        }
        let v = g_dec.q.col(i);
        let mut row = vec![0.0; n_x];
        for (j, rj) in row.iter_mut().enumerate() {
            for l in 0..n_x {
                *rj += v[l] * inv_sqrt_x[(l, j)];
            }
        }
        rows.push(row);
        noises.push(gi / (1.0 - gi));
    }
    let map = if rows.is_empty() { Mat::zeros(0, n_x) } else { Mat::from_rows(&rows) };
    let noise_cov = Mat::diag(&noises);
    Ok(ConstrainedIBSolution {
        phi,
        alpha,
        lambda_min,
        objective,
        supported_on_min_eigenspace: supported,
        encoder: NoisyLinearEncoder { map, noise_cov },
    })
}

/// Solution of the Gaussian mutual-information bottleneck.
#[derive(Clone, Debug)]
pub struct ChechikSolution {
    pub beta: f64,
    /// Encoder matrix `A(β)`: row `i` is `α_i·p_iᵀ` once `β` passes the
    /// `i`-th critical value, otherwise zero. Rows follow ascending `λ_i`.
    pub a_matrix: Mat,
    pub active_count: usize,
    pub alphas: Vec<f64>,
    /// Eigenvalues of `Σ_{X|Y}Σ_X^{−1}`, ascending, each in `(0, 1]`.
    pub lambdas: Vec<f64>,
    /// Critical trade-off values `β_i^c = 1/(1−λ_i)`; `+∞` where `λ_i = 1`.
    pub betas_critical: Vec<f64>,
    /// Unit-norm left eigenvectors `p_i` as rows, matching `lambdas`.
    pub left_eigenvectors: Mat,
    /// Covariance of the additive perturbation `ξ` in `Z = A(β)X + ξ`
    /// (identity by construction).
    pub noise_cov: Mat,
}

/// Solve the Gaussian mutual-information bottleneck `min I(X;Z) − β·I(Y;Z)`
/// over `Z = AX + ξ`, `ξ ~ N(0, I)`. Directions activate in ascending order
/// of `λ_i` (eigenvalues of `Σ_{X|Y}Σ_X^{−1}`) as `β` crosses `1/(1−λ_i)`,
/// with gains `α_i = √((β(1−λ_i) − 1)/(λ_i·p_iᵀΣ_Xp_i))`.
pub fn solve_chechik(source: &JointGaussian, beta: f64) -> Result<ChechikSolution> {
    if !beta.is_finite() || beta < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "trade-off parameter beta must be nonnegative and finite, got {beta}"
        )));
    }
    let n_x = source.n_x();
    let sigma_x = SymMatrix::new(source.sigma_x())?;
    let sigma_y = SymMatrix::new(source.sigma_y())?;
    let inv_y = spectral::pseudo_inverse(&sigma_y, PSEUDO_INVERSE_CUTOFF)?;
    let cond = source
        .sigma_x()
        .sub(&source.sigma_xy().mul(&inv_y).mul(&source.sigma_yx()));
    let inv_sqrt_x = spectral::inv_sqrt_pd(&sigma_x)?;
    let whitened = SymMatrix::new(inv_sqrt_x.mat().mul(&cond).mul(inv_sqrt_x.mat()))?;
    let dec = eig_sym(&whitened, EigSort::Descending, None)?;

    // Ascending λ: reverse the descending order. p_i = Σ_X^{−1/2} q̃_i,
    // normalized to unit length.
    let mut lambdas = Vec::with_capacity(n_x);
    let mut p_rows = Vec::with_capacity(n_x);
    for &idx in (0..n_x).rev().collect::<Vec<_>>().iter() {
        lambdas.push(dec.lambda[idx]);
        let q = dec.q.col(idx);
        let mut p = vec![0.0; n_x];
        for (j, pj) in p.iter_mut().enumerate() {
            for l in 0..n_x {
                *pj += inv_sqrt_x[(j, l)] * q[l];
            }
        }
        let norm = p.iter().map(|x| x * x).sum::<f64>().sqrt();
        for x in &mut p {
            *x /= norm;
        }
        p_rows.push(p);
    }
    let left_eigenvectors = Mat::from_rows(&p_rows);

    let mut a_matrix = Mat::zeros(n_x, n_x);
    let mut alphas = vec![0.0; n_x];
    let mut betas_critical = Vec::with_capacity(n_x);
    let mut active_count = 0;
    for i in 0..n_x {
        let lam = lambdas[i];
        let crit = if (1.0 - lam).abs() < 1e-14 { f64::INFINITY } else { 1.0 / (1.0 - lam) };
        betas_critical.push(crit);
        let radicand_num = beta * (1.0 - lam) - 1.0;
        if radicand_num <= 0.0 || !crit.is_finite() {
            continue; // below this row's critical trade-off: row stays zero
        }
        let p = left_eigenvectors.row(i);
        let quad: f64 = (0..n_x)
            .map(|a| {
                (0..n_x)
                    .map(|b| p[a] * sigma_x[(a, b)] * p[b])
                    .sum::<f64>()
            })
            .sum();
        let alpha = (radicand_num / (lam * quad)).sqrt();
        alphas[i] = alpha;
        active_count += 1;
        for j in 0..n_x {
            a_matrix[(i, j)] = alpha * p[j];
        }
    }
    Ok(ChechikSolution {
        beta,
        a_matrix,
        active_count,
        alphas,
        lambdas,
        betas_critical,
        left_eigenvectors,
        noise_cov: Mat::identity(n_x),
    })
}

/// Log-determinant of a PSD matrix restricted to the span of the columns
/// `basis` (orthonormal, m×r): `ln det(UᵀMU)`. Returns the eigenvalues too
/// so callers can reason about rank on that support.
fn projected_eigenvalues(m: &Mat, basis: &Mat) -> Result<Vec<f64>> {
    let proj = SymMatrix::new(basis.t().mul(m).mul(basis))?;
    let dec = eig_sym(&proj, EigSort::Descending, None)?;
    Ok(dec.lambda)
}

/// Mutual informations `(I(X;Z), I(Y;Z))` in nats for a linear observation
/// of the private block: `Z = f·X + ξ`, `ξ ~ N(0, noise_cov)` (no `ξ` when
/// `noise_cov` is `None`).
///
/// Degenerate cases follow the underlying information measures: a message
/// carrying any noiseless linear function of `X` has `I(X;Z) = +∞`, while
/// `I(Y;Z)` stays finite (the chain `Y — X — Z` always leaves residual
/// uncertainty about `Y`); a message with zero covariance carries `(0, 0)`.
/// All determinants are taken on the support of `Cov(Z)`, so rank-deficient
/// encoders need no special handling by the caller.
pub fn gaussian_mutual_information(
    source: &JointGaussian,
    f: &Mat,
    noise_cov: Option<&SymMatrix>,
) -> Result<(f64, f64)> {
    let n_x = source.n_x();
    if f.cols() != n_x {
        return Err(Error::DimensionMismatch(format!(
            "encoder reads the private block: expected {} columns, got {}",
            n_x,
            f.cols()
        )));
    }
    let m = f.rows();
    if let Some(n) = noise_cov {
        if n.dim() != m {
            return Err(Error::DimensionMismatch(format!(
                "noise covariance is {}x{} but the message has {m} coordinates",
                n.dim(),
                n.dim()
            )));
        }
    }
    if m == 0 {
        return Ok((0.0, 0.0));
    }
    let sigma_x = source.sigma_x();
    let mut sigma_z = f.mul(&sigma_x).mul(&f.t());
    if let Some(n) = noise_cov {
        sigma_z = sigma_z.add(n.mat());
    }
    let dec = eig_sym(&SymMatrix::new(sigma_z)?, EigSort::Descending, None)?;
    let rank = dec.lambda.iter().filter(|&&l| l > dec.zero_tol).count();
    if rank == 0 {
        return Ok((0.0, 0.0));
    }
    let basis = dec.q.block(0, 0, m, rank);
    let logdet_z: f64 = dec.lambda[..rank].iter().map(|l| l.ln()).sum();

    // I(X;Z) = ½[ln det Σ_Z − ln det Σ_{Z|X}] on the support; Σ_{Z|X} is
    // the noise alone. Rank-deficient noise on that support means some
    // direction of Z is a deterministic function of X.
    let i_xz = match noise_cov {
        None => f64::INFINITY,
        Some(n) => {
            let lam_n = projected_eigenvalues(n.mat(), &basis)?;
            let max_n = lam_n.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
            let tol_n = crate::spectral::DEFAULT_ZERO_TOL_FACTOR * max_n;
            if lam_n.iter().any(|&l| l <= tol_n) {
                f64::INFINITY
            } else {
                let logdet_n: f64 = lam_n.iter().map(|l| l.ln()).sum();
                0.5 * (logdet_z - logdet_n)
            }
        }
    };

    // Σ_{Z|Y} = f Σ_{X|Y} fᵀ + noise shares the support of Σ_Z because
    // Σ_{X|Y} is positive definite.
    let sigma_y = SymMatrix::new(source.sigma_y())?;
    let inv_y = spectral::pseudo_inverse(&sigma_y, PSEUDO_INVERSE_CUTOFF)?;
    let cond_x = sigma_x.sub(&source.sigma_xy().mul(&inv_y).mul(&source.sigma_yx()));
    let mut sigma_zy = f.mul(&cond_x).mul(&f.t());
    if let Some(n) = noise_cov {
        sigma_zy = sigma_zy.add(n.mat());
    }
    let lam_zy = projected_eigenvalues(&sigma_zy, &basis)?;
    if lam_zy.iter().any(|&l| l <= 0.0) {
        return Err(Error::DegenerateCovariance(
            "conditional message covariance lost rank on the message support".into(),
        ));
    }
    let logdet_zy: f64 = lam_zy.iter().map(|l| l.ln()).sum();
    let i_yz = (0.5 * (logdet_z - logdet_zy)).max(0.0);
    Ok((i_xz, i_yz))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::solve_stackelberg;
    use crate::rng;
    use rand::Rng;

    fn partial_source() -> JointGaussian {
        // X1 correlated with Y, X2 independent of everything.
        JointGaussian::new(
            2,
            1,
            SymMatrix::from_rows(&[
                vec![1.0, 0.0, 0.8],
                vec![0.0, 1.0, 0.0],
                vec![0.8, 0.0, 1.0],
            ])
            .unwrap(),
        )
        .unwrap()
    }

    fn capacity_corner_source() -> JointGaussian {
        // Υ is rank one with minimal eigenvector e₁, whose feasibility
        // capacity (1.5) is well short of trace(Σ_X) = 4.
        JointGaussian::new(
            2,
            1,
            SymMatrix::from_rows(&[
                vec![2.0, 1.0, 0.3],
                vec![1.0, 2.0, 0.6],
                vec![0.3, 0.6, 1.0],
            ])
            .unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn scalar_threshold_decides_informativeness() {
        let source = JointGaussian::scalar(1.0, 1.0, 0.5).unwrap();
        // Threshold at ρ²/σ_X⁴ = 0.25.
        let informative = solve_mmse_ib(&source, 0.2).unwrap();
        assert_eq!(informative.regime, IBRegime::FullyInformative);
        assert_eq!(informative.k, 1);
        assert!(informative.report.mse_x.abs() < 1e-12, "X fully revealed");
        assert!((informative.report.mse_y - 0.75).abs() < 1e-12, "Ŷ = ρX leaves 1 − ρ²");

        let silent = solve_mmse_ib(&source, 0.3).unwrap();
        assert_eq!(silent.regime, IBRegime::NonInformative);
        assert_eq!(silent.k, 0);
        assert_eq!(silent.policy().f.rows(), 0, "noninformative encoder has no rows");
        assert_eq!(silent.report.mse_x, 1.0, "X stays at its prior");
        assert_eq!(silent.report.mse_y, 1.0);
    }

    #[test]
    fn regime_boundary_ties_the_sender_cost() {
        // δ = ρ²/σ_X⁴ exactly: conveying and babbling cost the same.
        let source = JointGaussian::scalar(1.0, 1.0, 0.5).unwrap();
        let sol = solve_mmse_ib(&source, 0.25).unwrap();
        assert_eq!(sol.k, 1, "zero eigenvalue counts as conveyable");
        let babbling_je = 1.0 - 0.25 * 1.0; // σ_Y² − δσ_X²
        assert!(
            (sol.report.j_e - babbling_je).abs() < 1e-12,
            "tie at the boundary: {} vs {}",
            sol.report.j_e,
            babbling_je
        );
    }

    #[test]
    fn negative_definite_form_means_babbling() {
        // Σ_XY Σ_YX − δΣ_X² negative definite ⇔ noninformative.
        let source = partial_source();
        let sol = solve_mmse_ib(&source, 2.0).unwrap();
        assert_eq!(sol.regime, IBRegime::NonInformative);
        assert_eq!(sol.report.mse_x, 2.0, "MSE_X = trace(Σ_X)");
    }

    #[test]
    fn positive_definite_form_means_full_revelation() {
        // Two correlated (X_i, Y_i) pairs: the quadratic form is
        // diag(0.81, 0.49) − δ·I, positive definite for small δ.
        let source = JointGaussian::new(
            2,
            2,
            SymMatrix::from_rows(&[
                vec![1.0, 0.0, 0.9, 0.0],
                vec![0.0, 1.0, 0.0, 0.7],
                vec![0.9, 0.0, 1.0, 0.0],
                vec![0.0, 0.7, 0.0, 1.0],
            ])
            .unwrap(),
        )
        .unwrap();
        let sol = solve_mmse_ib(&source, 0.05).unwrap();
        assert_eq!(sol.regime, IBRegime::FullyInformative);
        assert_eq!(sol.k, 2);
        assert!(sol.report.mse_x.abs() < 1e-10, "MSE_X = {}", sol.report.mse_x);
    }

    #[test]
    fn partial_regime_keeps_one_direction() {
        let sol = solve_mmse_ib(&partial_source(), 0.3).unwrap();
        assert_eq!(sol.regime, IBRegime::Partial);
        assert_eq!(sol.k, 1);
        // X1 is revealed (it pays), X2 is not: MSE_X = 1, MSE_Y = 1 − 0.64.
        assert!((sol.report.mse_x - 1.0).abs() < 1e-10);
        assert!((sol.report.mse_y - 0.36).abs() < 1e-10);
    }

    #[test]
    fn sender_cost_tracks_the_conveyed_spectrum() {
        for (source, delta) in [
            (partial_source(), 0.3),
            (partial_source(), 0.05),
            (JointGaussian::scalar(2.0, 1.0, 0.9).unwrap(), 0.1),
        ] {
            let sol = solve_mmse_ib(&source, delta).unwrap();
            let conveyed: f64 = sol.spectrum.lambda[..sol.k].iter().sum();
            let expected =
                source.sigma_y().trace() - delta * source.sigma_x().trace() - conveyed;
            assert!(
                (sol.report.j_e - expected).abs() < 1e-10,
                "J^e = {} vs prior-minus-spectrum {}",
                sol.report.j_e,
                expected
            );
        }
    }

    #[test]
    fn decoders_satisfy_the_markov_relation() {
        // Ŷ must be the regression of X̂: D_Y = Σ_YX Σ_X^{−1} D_X.
        for delta in [0.05, 0.3] {
            let source = partial_source();
            let sol = solve_mmse_ib(&source, delta).unwrap();
            let inv_x =
                spectral::pseudo_inverse(&SymMatrix::new(source.sigma_x()).unwrap(), 1e-12)
                    .unwrap();
            let implied = source.sigma_yx().mul(&inv_x).mul(&sol.policy().d_x);
            let gap = implied.sub(&sol.policy().d_y).max_abs();
            assert!(gap < 1e-10, "markov gap {gap} at δ = {delta}");
        }
    }

    #[test]
    fn partial_observation_cannot_beat_full_observation() {
        for (source, delta) in [
            (partial_source(), 0.3),
            (partial_source(), 1.0),
            (capacity_corner_source(), 0.5),
        ] {
            let ib = solve_mmse_ib(&source, delta).unwrap();
            let spec = GameSpec::new(source, delta, ChannelSpec::Noiseless).unwrap();
            let game = solve_stackelberg(&spec).unwrap();
            assert!(
                ib.report.j_e >= game.report.j_e - 1e-9,
                "X-only encoding (J^e = {}) must not beat full observation (J^e = {})",
                ib.report.j_e,
                game.report.j_e
            );
        }
    }

    #[test]
    fn congruence_form_of_the_weight_matrix() {
        let source = partial_source();
        let delta = 0.4;
        let sol = solve_mmse_ib(&source, delta).unwrap();
        let sqrt_x = spectral::sqrt_pd(&SymMatrix::new(source.sigma_x()).unwrap()).unwrap();
        let lhs = sqrt_x.mat().mul(sol.w_ib.mat()).mul(sqrt_x.mat());
        let rhs = source
            .sigma_xy()
            .mul(&source.sigma_yx())
            .sub(&source.sigma_x().mul(&source.sigma_x()).scale(delta));
        assert!(lhs.sub(&rhs).max_abs() < 1e-10, "congruent form mismatch");
    }

    #[test]
    fn constrained_zero_budget_reveals_everything() {
        let sol = solve_constrained_ib(&partial_source(), 0.0).unwrap();
        assert_eq!(sol.objective, 0.0);
        assert!(sol.phi.max_abs() < 1e-12);
        assert!(sol.supported_on_min_eigenspace);
        assert_eq!(sol.encoder.map.rows(), 2, "noiseless full-rank observation");
        assert!(sol.encoder.noise_cov.max_abs() < 1e-12);
    }

    #[test]
    fn constrained_full_budget_reveals_nothing() {
        let source = JointGaussian::scalar(2.0, 1.0, 0.8).unwrap();
        let sol = solve_constrained_ib(&source, 2.0).unwrap();
        assert!((sol.phi[(0, 0)] - 2.0).abs() < 1e-12, "Φ = Σ_X");
        assert_eq!(sol.encoder.map.rows(), 0, "nothing is observed");
        // Scalar: the whole budget always fits the (only) eigendirection.
        assert!(sol.supported_on_min_eigenspace);
        assert!((sol.objective - sol.alpha * sol.lambda_min).abs() < 1e-12);
    }

    #[test]
    fn constrained_isotropic_case_prices_every_direction_equally() {
        // Σ_X = I and Σ_XY = ½I make Υ = ¼·I: any allocation costs α/4.
        let source = JointGaussian::new(
            2,
            2,
            SymMatrix::from_rows(&[
                vec![1.0, 0.0, 0.5, 0.0],
                vec![0.0, 1.0, 0.0, 0.5],
                vec![0.5, 0.0, 1.0, 0.0],
                vec![0.0, 0.5, 0.0, 1.0],
            ])
            .unwrap(),
        )
        .unwrap();
        for alpha in [0.3, 1.0, 1.5] {
            let sol = solve_constrained_ib(&source, alpha).unwrap();
            assert!(
                (sol.objective - 0.25 * alpha).abs() < 1e-10,
                "isotropic objective at α = {alpha}: {}",
                sol.objective
            );
            assert!(sol.supported_on_min_eigenspace, "the whole space is the tie set");
            assert!((sol.phi.trace() - alpha).abs() < 1e-9);
        }
    }

    #[test]
    fn constrained_budget_past_capacity_blends_and_flags() {
        let source = capacity_corner_source();
        // Minimal eigendirection e₁ absorbs at most 1/(e₁ᵀΣ_X^{−1}e₁) = 1.5.
        let within = solve_constrained_ib(&source, 1.2).unwrap();
        assert!(within.supported_on_min_eigenspace);
        assert!((within.objective - 1.2 * within.lambda_min).abs() < 1e-9);
        assert!(within.lambda_min.abs() < 1e-12, "rank-one Υ has λ_min = 0");

        let past = solve_constrained_ib(&source, 2.0).unwrap();
        assert!(!past.supported_on_min_eigenspace, "budget exceeds the eigenspace capacity");
        assert!((past.phi.trace() - 2.0).abs() < 1e-9, "trace pinned: {}", past.phi.trace());
        assert!(past.objective > past.alpha * past.lambda_min, "achieved objective is honest");
        // Feasibility on both sides: 0 ⪯ Φ ⪯ Σ_X.
        let phi_dec = eig_sym(&past.phi, EigSort::Descending, None).unwrap();
        assert!(phi_dec.lambda.iter().all(|&l| l > -1e-10), "Φ PSD");
        let slack =
            SymMatrix::new(source.sigma_x().sub(past.phi.mat())).unwrap();
        let slack_dec = eig_sym(&slack, EigSort::Descending, None).unwrap();
        assert!(slack_dec.lambda.iter().all(|&l| l > -1e-10), "Σ_X − Φ PSD");
    }

    #[test]
    fn constrained_orthogonality_condition_holds_when_supported() {
        let source = capacity_corner_source();
        let sol = solve_constrained_ib(&source, 1.0).unwrap();
        assert!(sol.supported_on_min_eigenspace);
        let inv_x = spectral::pseudo_inverse(
            &SymMatrix::new(source.sigma_x()).unwrap(),
            1e-12,
        )
        .unwrap();
        let upsilon = inv_x
            .mul(&source.sigma_xy())
            .mul(&source.sigma_yx())
            .mul(&inv_x);
        let shifted = upsilon.sub(&Mat::identity(2).scale(sol.lambda_min));
        let orth = shifted.frob_dot(sol.phi.mat());
        assert!(orth.abs() <= 1e-9, "trace orthogonality violated: {orth}");
    }

    #[test]
    fn constrained_random_search_cannot_beat_the_objective() {
        let source = JointGaussian::new(
            3,
            1,
            SymMatrix::from_rows(&[
                vec![1.4, 0.3, -0.2, 0.5],
                vec![0.3, 1.1, 0.4, -0.3],
                vec![-0.2, 0.4, 1.8, 0.2],
                vec![0.5, -0.3, 0.2, 1.0],
            ])
            .unwrap(),
        )
        .unwrap();
        let alpha = 0.6;
        let sol = solve_constrained_ib(&source, alpha).unwrap();
        assert!(sol.supported_on_min_eigenspace, "test premise: α within capacity");

        let sigma_x = source.sigma_x();
        let inv_x =
            spectral::pseudo_inverse(&SymMatrix::new(sigma_x.clone()).unwrap(), 1e-12).unwrap();
        let upsilon = inv_x
            .mul(&source.sigma_xy())
            .mul(&source.sigma_yx())
            .mul(&inv_x);
        let mut r = rng::stream(2024);
        let mut tried = 0;
        while tried < 400 {
            let a = Mat::from_fn(3, 3, |_, _| r.random_range(-1.0..1.0));
            let p = a.mul(&a.t());
            let scaled = p.scale(alpha / p.trace());
            // Keep only candidates inside the feasible set Φ ⪯ Σ_X.
            let slack = SymMatrix::new(sigma_x.sub(&scaled)).unwrap();
            let dec = eig_sym(&slack, EigSort::Descending, None).unwrap();
            if dec.lambda.iter().any(|&l| l < 0.0) {
                continue;
            }
            tried += 1;
            let value = upsilon.frob_dot(&scaled);
            assert!(
                value >= sol.objective - 1e-6,
                "sampled feasible Φ beats the solver: {value} < {}",
                sol.objective
            );
        }
    }

    #[test]
    fn constrained_encoder_realizes_phi() {
        for (source, alpha) in [
            (capacity_corner_source(), 1.0),
            (capacity_corner_source(), 2.0),
            (partial_source(), 0.7),
        ] {
            let sol = solve_constrained_ib(&source, alpha).unwrap();
            let m = &sol.encoder.map;
            if m.rows() == 0 {
                continue;
            }
            let sigma_x = source.sigma_x();
            let gram = m.mul(&sigma_x).mul(&m.t()).add(&sol.encoder.noise_cov);
            let inv = spectral::pseudo_inverse(&SymMatrix::new(gram).unwrap(), 1e-12).unwrap();
            let sm = sigma_x.mul(&m.t());
            let achieved = sigma_x.sub(&sm.mul(&inv).mul(&sm.t()));
            let gap = achieved.sub(sol.phi.mat()).max_abs();
            assert!(gap < 1e-8, "encoder misses Φ by {gap} at α = {alpha}");
        }
    }

    #[test]
    fn constrained_rejects_out_of_range_budgets() {
        let source = partial_source();
        assert!(matches!(
            solve_constrained_ib(&source, -0.1),
            Err(Error::AlphaOutOfRange { .. })
        ));
        assert!(matches!(
            solve_constrained_ib(&source, 2.1),
            Err(Error::AlphaOutOfRange { max, .. }) if (max - 2.0).abs() < 1e-12
        ));
    }

    #[test]
    fn chechik_scalar_matches_hand_computation() {
        // σ² = 1, ρ = 0.6: λ = 0.64, β_c = 1/0.36; at β = 2β_c the gain is
        // α₁ = √((2 − 1)/0.64) = 1.25.
        let source = JointGaussian::scalar(1.0, 1.0, 0.6).unwrap();
        let beta_c = 1.0 / 0.36;
        let sol = solve_chechik(&source, 2.0 * beta_c).unwrap();
        assert_eq!(sol.active_count, 1);
        assert!((sol.lambdas[0] - 0.64).abs() < 1e-12);
        assert!((sol.betas_critical[0] - beta_c).abs() < 1e-12);
        assert!((sol.alphas[0] - 1.25).abs() < 1e-12, "α₁ = {}", sol.alphas[0]);
        assert!((sol.a_matrix[(0, 0)].abs() - 1.25).abs() < 1e-12);
    }

    #[test]
    fn chechik_below_first_threshold_is_silent() {
        let source = JointGaussian::scalar(1.0, 1.0, 0.6).unwrap();
        let sol = solve_chechik(&source, 1.5).unwrap();
        assert_eq!(sol.active_count, 0);
        assert_eq!(sol.a_matrix.max_abs(), 0.0, "A(β) = 0 below the first critical β");
    }

    #[test]
    fn chechik_uninformative_direction_never_activates() {
        // n_x = 2 with scalar Y: one direction of X is conditionally
        // untouched by Y, so its λ = 1 and its critical β is infinite.
        let source = partial_source();
        let sol = solve_chechik(&source, 1e9).unwrap();
        assert_eq!(sol.active_count, 1, "only the correlated direction speaks");
        assert!((sol.lambdas[0] - 0.36).abs() < 1e-12);
        assert!((sol.lambdas[1] - 1.0).abs() < 1e-12);
        assert!(sol.betas_critical[1].is_infinite());
        assert_eq!(sol.a_matrix.row(1), &[0.0, 0.0]);
    }

    #[test]
    fn chechik_left_eigenvector_identity() {
        let source = capacity_corner_source();
        let sigma_x = source.sigma_x();
        let inv_y = 1.0; // σ_Y² = 1
        let cond = sigma_x.sub(
            &source
                .sigma_xy()
                .mul(&source.sigma_yx())
                .scale(inv_y),
        );
        let inv_x =
            spectral::pseudo_inverse(&SymMatrix::new(sigma_x).unwrap(), 1e-12).unwrap();
        let target = cond.mul(&inv_x);
        let sol = solve_chechik(&source, 3.0).unwrap();
        for i in 0..2 {
            let p = sol.left_eigenvectors.row(i);
            let lhs: Vec<f64> = (0..2)
                .map(|j| (0..2).map(|l| p[l] * target[(l, j)]).sum::<f64>())
                .collect();
            for j in 0..2 {
                assert!(
                    (lhs[j] - sol.lambdas[i] * p[j]).abs() < 1e-10,
                    "pᵀ·Σ_X|Y·Σ_X⁻¹ ≠ λpᵀ at row {i}"
                );
            }
        }
    }

    #[test]
    fn chechik_activation_is_monotone_in_beta() {
        let source = capacity_corner_source();
        let mut last = 0;
        for beta in [0.0, 1.0, 2.0, 4.0, 8.0, 64.0] {
            let sol = solve_chechik(&source, beta).unwrap();
            assert!(sol.active_count >= last, "rows only switch on as β grows");
            last = sol.active_count;
        }
        assert!(last >= 1);
    }

    #[test]
    fn mutual_information_closed_forms() {
        let source = JointGaussian::scalar(1.0, 1.0, 0.75).unwrap();
        // Pure noise: Z carries nothing.
        let f0 = Mat::zeros(1, 1);
        let noise = SymMatrix::diag(&[1.0]);
        let (ix, iy) = gaussian_mutual_information(&source, &f0, Some(&noise)).unwrap();
        assert_eq!((ix, iy), (0.0, 0.0));

        // Scalar additive-noise channel: I(X;Z) = ½ln(1 + σ_X²/σ²).
        let f = Mat::identity(1);
        let noise = SymMatrix::diag(&[0.5]);
        let (ix, iy) = gaussian_mutual_information(&source, &f, Some(&noise)).unwrap();
        assert!((ix - 0.5 * (1.0 + 1.0 / 0.5f64).ln()).abs() < 1e-12);
        let expected_iy = 0.5 * ((1.0 + 0.5) / (1.0 - 0.75 * 0.75 + 0.5) as f64).ln();
        assert!((iy - expected_iy).abs() < 1e-12);
        assert!(iy < ix);
    }

    #[test]
    fn noiseless_revelation_has_infinite_self_information() {
        let source = JointGaussian::scalar(1.0, 1.0, 0.75).unwrap();
        let (ix, iy) = gaussian_mutual_information(&source, &Mat::identity(1), None).unwrap();
        assert!(ix.is_infinite() && ix > 0.0);
        let expected = -0.5 * (1.0 - 0.75 * 0.75f64).ln();
        assert!((iy - expected).abs() < 1e-12, "I(Y;Z) stays finite: {iy}");
        assert!(iy <= ix, "data processing");
    }

    #[test]
    fn rank_deficient_messages_use_the_support() {
        let source = partial_source();
        // Two copies of the same row: rank-one Σ_Z.
        let f = Mat::from_rows(&[vec![1.0, 0.0], vec![1.0, 0.0]]);
        let noise = SymMatrix::new(Mat::from_rows(&[
            vec![0.2, 0.2],
            vec![0.2, 0.2],
        ]))
        .unwrap();
        let (ix, iy) = gaussian_mutual_information(&source, &f, Some(&noise)).unwrap();
        // Equivalent scalar channel: X₁ + N(0, 0.1)... the noise is 0.2 on
        // the duplicated coordinate, and duplication adds nothing.
        let f1 = Mat::from_rows(&[vec![1.0, 0.0]]);
        let n1 = SymMatrix::diag(&[0.2]);
        let (ix1, iy1) = gaussian_mutual_information(&source, &f1, Some(&n1)).unwrap();
        assert!((ix - ix1).abs() < 1e-10, "duplication is informationless: {ix} vs {ix1}");
        assert!((iy - iy1).abs() < 1e-10);
    }

    #[test]
    fn data_processing_holds_on_random_encoders() {
        let source = capacity_corner_source();
        let mut r = rng::stream(99);
        for _ in 0..50 {
            let f = Mat::from_fn(2, 2, |_, _| r.random_range(-2.0..2.0));
            let noise = SymMatrix::diag(&[r.random_range(0.01..1.0), r.random_range(0.01..1.0)]);
            let (ix, iy) = gaussian_mutual_information(&source, &f, Some(&noise)).unwrap();
            assert!(ix >= 0.0 && iy >= 0.0);
            assert!(iy <= ix + 1e-9, "data processing violated: I(Y;Z)={iy} > I(X;Z)={ix}");
        }
    }
}
