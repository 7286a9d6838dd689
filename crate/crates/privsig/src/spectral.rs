//! Symmetric spectral decomposition and factorizations.
//!
//! This module is deliberately dependency-free: every solver in the crate
//! reduces to the signed spectrum of a small symmetric matrix, and the whole
//! chain stays auditable when the eigensolver is ~100 lines of classic
//! numerics rather than an external black box.
//!
//! # Algorithm
//!
//! [`eig_sym`] runs cyclic Jacobi sweeps: each sweep visits every
//! off-diagonal pair `(p, q)` once and applies the Givens rotation that
//! zeroes `a_pq`, using the numerically stable half-angle formulation
//! (compute `t = tan θ` from the smaller root, then `c = 1/√(1+t²)`,
//! `s = t·c`). Each rotation moves `2·a_pq²` of squared mass onto the
//! diagonal, so the off-diagonal Frobenius norm decreases monotonically and
//! quadratically once sweeps stabilize. Iteration stops when that norm
//! reaches [`JACOBI_OFF_TOL`]; more than [`JACOBI_MAX_SWEEPS`] sweeps
//! signals pathological input (non-finite entries, overflow-scale data) and
//! surfaces as [`Error::NonConvergence`].
//!
//! # Conventions
//!
//! * Eigenvalues are sorted per [`EigSort`]: plain descending, or the
//!   strictly positive group first (descending within groups) — the order
//!   the game solvers need, where the first block of coordinates is the
//!   conveyable one.
//! * Each eigenvector column is sign-normalized so that its
//!   largest-magnitude entry is positive (first such entry on ties), making
//!   decompositions reproducible across runs and platforms.
//! * The inertia `(n_pos, n_neg, n_zero)` classifies eigenvalues against a
//!   zero tolerance that defaults to `1e-10 · max|λ|` — relative, so badly
//!   scaled covariances classify correctly.

use crate::mat::Mat;
use crate::{Error, Result};

/// Hard cap on Jacobi sweeps (a sweep rotates every off-diagonal pair once).
pub const JACOBI_MAX_SWEEPS: usize = 100;

/// Absolute off-diagonal Frobenius target for convergence.
pub const JACOBI_OFF_TOL: f64 = 1e-12;

/// Relative factor for the default eigenvalue zero-classification tolerance.
pub const DEFAULT_ZERO_TOL_FACTOR: f64 = 1e-10;

/// Relative eigenvalue cutoff used when pseudo-inverting a (possibly
/// singular) covariance: components below `cutoff · max|λ|` are dropped.
pub const PSEUDO_INVERSE_CUTOFF: f64 = 1e-12;

/// Relative eigenvalue floor below which a matrix is rejected as not
/// positive definite by [`sqrt_pd`] / [`inv_sqrt_pd`].
pub const PD_EIGENVALUE_FLOOR: f64 = 1e-12;

/// Square symmetric matrix; symmetrized on construction so that
/// `get(i, j) == get(j, i)` holds exactly thereafter.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix {
    m: Mat,
}

impl SymMatrix {
    /// Wrap a square matrix, averaging `(a_ij + a_ji)/2` to restore exact
    /// symmetry lost to floating-point products.
    pub fn new(m: Mat) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "symmetric matrix must be square, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        if !m.all_finite() {
            return Err(Error::InvalidParameter("matrix entries must be finite".into()));
        }
        Ok(SymMatrix { m: m.symmetrized() })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        SymMatrix::new(Mat::from_rows(rows))
    }

    pub fn diag(d: &[f64]) -> Self {
        SymMatrix { m: Mat::diag(d) }
    }

    pub fn identity(n: usize) -> Self {
        SymMatrix { m: Mat::identity(n) }
    }

    pub fn dim(&self) -> usize {
        self.m.rows()
    }

    pub fn mat(&self) -> &Mat {
        &self.m
    }

    pub fn into_mat(self) -> Mat {
        self.m
    }
}

impl std::ops::Deref for SymMatrix {
    type Target = Mat;
    fn deref(&self) -> &Mat {
        &self.m
    }
}

/// Eigenvalue ordering convention.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EigSort {
    /// Plain descending order.
    Descending,
    /// Eigenvalues strictly above the zero tolerance first; descending
    /// within both groups.
    PositivesFirst,
}

/// Result of [`eig_sym`]: `m = q · diag(lambda) · qᵀ`.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    /// Orthonormal eigenvector columns, sign-normalized.
    pub q: Mat,
    /// Eigenvalues, ordered per the requested [`EigSort`].
    pub lambda: Vec<f64>,
    /// Count of eigenvalues above `zero_tol`.
    pub n_pos: usize,
    /// Count of eigenvalues below `−zero_tol`.
    pub n_neg: usize,
    /// Count of eigenvalues within `±zero_tol`.
    pub n_zero: usize,
    /// The absolute zero tolerance the classification used.
    pub zero_tol: f64,
}

impl SpectralDecomposition {
    /// `q · diag(lambda) · qᵀ` — handy for reconstruction checks.
    pub fn reconstruct(&self) -> Mat {
        let d = Mat::diag(&self.lambda);
        self.q.mul(&d).mul(&self.q.t())
    }
}

fn off_diagonal_norm(a: &Mat) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)] * a[(i, j)];
            }
        }
    }
    s.sqrt()
}

/// Eigendecomposition of a symmetric matrix via cyclic Jacobi.
///
/// `zero_tol` is the absolute threshold for classifying eigenvalues as
/// zero; `None` selects the relative default `1e-10 · max|λ|`.
pub fn eig_sym(m: &SymMatrix, sort: EigSort, zero_tol: Option<f64>) -> Result<SpectralDecomposition> {
    if let Some(t) = zero_tol {
        if !(t >= 0.0) {
            return Err(Error::InvalidParameter(format!("zero_tol must be ≥ 0, got {t}")));
        }
    }
    let n = m.dim();
    let mut a = m.mat().clone();
    let mut v = Mat::identity(n);

    let mut converged = n < 2;
    for _sweep in 0..JACOBI_MAX_SWEEPS {
        if converged {
            break;
        }
        if off_diagonal_norm(&a) <= JACOBI_OFF_TOL {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let app = a[(p, p)];
                let aqq = a[(q, q)];
                let theta = (aqq - app) / (2.0 * apq);
                if !theta.is_finite() {
                    // No stable rotation exists at this scale (the angle
                    // computation overflowed); leave the entry to the
                    // residual check rather than silently dropping it.
                    continue;
                }
                // Smaller-magnitude tangent root; the closed form would
                // overflow for |θ| ≳ 1e154, where t ≈ 1/(2θ) anyway.
                let t = if theta.abs() < 1e100 {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                } else {
                    0.5 / theta
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                a[(p, p)] = app - t * apq;
                a[(q, q)] = aqq + t * apq;
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                for k in 0..n {
                    if k != p && k != q {
                        let akp = a[(k, p)];
                        let akq = a[(k, q)];
                        a[(k, p)] = c * akp - s * akq;
                        a[(p, k)] = a[(k, p)];
                        a[(k, q)] = s * akp + c * akq;
                        a[(q, k)] = a[(k, q)];
                    }
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    // Check finiteness before the residual: a spectrum that overflowed f64
    // poisons entries to inf/NaN, and NaN would slip through the residual
    // comparison below.
    if !a.all_finite() {
        return Err(Error::NonConvergence {
            what: "jacobi eigensolver",
            iterations: JACOBI_MAX_SWEEPS,
            residual: f64::INFINITY,
        });
    }
    if !converged {
        let residual = off_diagonal_norm(&a);
        if residual > JACOBI_OFF_TOL {
            return Err(Error::NonConvergence {
                what: "jacobi eigensolver",
                iterations: JACOBI_MAX_SWEEPS,
                residual,
            });
        }
    }

    let raw: Vec<f64> = (0..n).map(|i| a[(i, i)]).collect();
    let max_abs = raw.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let tol = zero_tol.unwrap_or(DEFAULT_ZERO_TOL_FACTOR * max_abs);

    // Order: group key first (positives-first mode), then descending value,
    // then original index so ties break deterministically.
    let group = |k: usize| -> u8 {
        match sort {
            EigSort::Descending => 0,
            EigSort::PositivesFirst => u8::from(raw[k] <= tol),
        }
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        group(i)
            .cmp(&group(j))
            .then(raw[j].partial_cmp(&raw[i]).expect("finite eigenvalues"))
            .then(i.cmp(&j))
    });

    let lambda: Vec<f64> = order.iter().map(|&i| raw[i]).collect();
    let mut q = Mat::from_fn(n, n, |i, j| v[(i, order[j])]);

    // Sign convention: make the largest-magnitude entry of each column
    // positive (first such entry on exact ties).
    for j in 0..n {
        let mut arg = 0;
        let mut best = -1.0;
        for i in 0..n {
            let mag = q[(i, j)].abs();
            if mag > best {
                best = mag;
                arg = i;
            }
        }
        if q[(arg, j)] < 0.0 {
            for i in 0..n {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }

    let n_pos = lambda.iter().filter(|&&l| l > tol).count();
    let n_neg = lambda.iter().filter(|&&l| l < -tol).count();
    Ok(SpectralDecomposition {
        q,
        lambda,
        n_pos,
        n_neg,
        n_zero: n - n_pos - n_neg,
        zero_tol: tol,
    })
}

fn spectral_map(m: &SymMatrix, f: impl Fn(f64) -> f64) -> Result<SymMatrix> {
    let dec = eig_sym(m, EigSort::Descending, None)?;
    let max_abs = dec.lambda.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let floor = PD_EIGENVALUE_FLOOR * max_abs;
    for &l in &dec.lambda {
        if !(l > floor) {
            return Err(Error::NotPositiveDefinite { eigenvalue: l });
        }
    }
    let mapped: Vec<f64> = dec.lambda.iter().map(|&l| f(l)).collect();
    let d = Mat::diag(&mapped);
    SymMatrix::new(dec.q.mul(&d).mul(&dec.q.t()))
}

/// Symmetric positive-definite square root `S` with `S·S = m`.
pub fn sqrt_pd(m: &SymMatrix) -> Result<SymMatrix> {
    spectral_map(m, f64::sqrt)
}

/// Symmetric inverse square root `S` with `S·m·S = I`.
pub fn inv_sqrt_pd(m: &SymMatrix) -> Result<SymMatrix> {
    spectral_map(m, |l| 1.0 / l.sqrt())
}

/// Moore–Penrose pseudo-inverse via the spectrum, dropping components with
/// `|λ| ≤ rel_cutoff · max|λ|`. Exact inverse for well-conditioned input.
pub fn pseudo_inverse(m: &SymMatrix, rel_cutoff: f64) -> Result<Mat> {
    let dec = eig_sym(m, EigSort::Descending, None)?;
    let max_abs = dec.lambda.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let cut = rel_cutoff * max_abs;
    let inv: Vec<f64> = dec
        .lambda
        .iter()
        .map(|&l| if l.abs() > cut { 1.0 / l } else { 0.0 })
        .collect();
    Ok(dec.q.mul(&Mat::diag(&inv)).mul(&dec.q.t()).symmetrized())
}

/// Lower-triangular Cholesky factor `L` with `L·Lᵀ = m`.
pub fn cholesky_pd(m: &SymMatrix) -> Result<Mat> {
    let n = m.dim();
    let mut l = Mat::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let mut s = m.mat()[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            if i == j {
                if !(s > 0.0) {
                    return Err(Error::NotPositiveDefinite { eigenvalue: s });
                }
                l[(i, j)] = s.sqrt();
            } else {
                l[(i, j)] = s / l[(j, j)];
            }
        }
    }
    Ok(l)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_entries_close(a: &Mat, b: &Mat, tol: f64, what: &str) {
        assert_eq!((a.rows(), a.cols()), (b.rows(), b.cols()), "{what}: shape mismatch");
        for i in 0..a.rows() {
            for j in 0..a.cols() {
                let d = (a[(i, j)] - b[(i, j)]).abs();
                assert!(d <= tol, "{what}: entry ({i},{j}) differs by {d:.3e} (tol {tol:.1e})");
            }
        }
    }

    #[test]
    fn identity_has_unit_spectrum() {
        let dec = eig_sym(&SymMatrix::identity(3), EigSort::Descending, None).unwrap();
        assert_eq!(dec.lambda, vec![1.0, 1.0, 1.0]);
        assert_eq!((dec.n_pos, dec.n_neg, dec.n_zero), (3, 0, 0));
        assert_entries_close(&dec.q, &Mat::identity(3), 1e-12, "identity eigenvectors");
    }

    #[test]
    fn positives_first_orders_signed_diagonal() {
        let dec = eig_sym(&SymMatrix::diag(&[-5.0, 2.0]), EigSort::PositivesFirst, None).unwrap();
        assert_eq!(dec.lambda, vec![2.0, -5.0], "positive eigenvalue must lead");
        assert_eq!((dec.n_pos, dec.n_neg, dec.n_zero), (1, 1, 0));
    }

    #[test]
    fn two_by_two_closed_form() {
        // [[2,1],[1,2]] has eigenpairs (3, (1,1)/√2) and (1, (1,−1)/√2).
        let m = SymMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let dec = eig_sym(&m, EigSort::Descending, None).unwrap();
        assert!((dec.lambda[0] - 3.0).abs() < 1e-12);
        assert!((dec.lambda[1] - 1.0).abs() < 1e-12);
        let r = 0.5f64.sqrt();
        // Sign convention: first max-magnitude entry positive.
        assert_entries_close(
            &dec.q,
            &Mat::from_rows(&[vec![r, r], vec![r, -r]]),
            1e-12,
            "2x2 eigenvectors",
        );
    }

    #[test]
    fn sign_convention_is_deterministic_on_antidiagonal() {
        // [[0,1],[1,0]]: eigenvectors ±(1,1)/√2 and ±(1,−1)/√2; the sign
        // rule must pick the representative with a positive leading entry.
        let m = SymMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let dec = eig_sym(&m, EigSort::Descending, None).unwrap();
        assert!(dec.q[(0, 0)] > 0.0 && dec.q[(1, 0)] > 0.0);
        assert!(dec.q[(0, 1)] > 0.0 && dec.q[(1, 1)] < 0.0);
    }

    #[test]
    fn zero_tolerance_is_relative_by_default() {
        // 1e6·diag(1, 1e-12, −1): the middle value is far below the relative
        // tolerance 1e-10·1e6 and must classify as zero.
        let m = SymMatrix::diag(&[1e6, 1e-6, -1e6]);
        let dec = eig_sym(&m, EigSort::PositivesFirst, None).unwrap();
        assert_eq!((dec.n_pos, dec.n_neg, dec.n_zero), (1, 1, 1));
        assert_eq!(dec.lambda, vec![1e6, 1e-6, -1e6], "zeros sort between the groups");
    }

    #[test]
    fn explicit_zero_tolerance_overrides_default() {
        let m = SymMatrix::diag(&[1.0, 1e-6, -1.0]);
        let strict = eig_sym(&m, EigSort::PositivesFirst, Some(0.0)).unwrap();
        assert_eq!((strict.n_pos, strict.n_neg, strict.n_zero), (2, 1, 0));
        let loose = eig_sym(&m, EigSort::PositivesFirst, Some(1e-3)).unwrap();
        assert_eq!((loose.n_pos, loose.n_neg, loose.n_zero), (1, 1, 1));
    }

    #[test]
    fn huge_but_representable_scale_still_converges() {
        // Rotations only mix entries, so 1e300-scale input is handled as
        // long as the spectrum itself stays representable.
        let m = SymMatrix::from_rows(&[
            vec![1e300, 8e299, -7e299],
            vec![8e299, -9e299, 6e299],
            vec![-7e299, 6e299, 2e299],
        ])
        .unwrap();
        let dec = eig_sym(&m, EigSort::Descending, None).unwrap();
        let err = dec.reconstruct().sub(m.mat()).max_abs();
        assert!(err < 1e-12 * 1e300, "relative reconstruction error too large: {err:e}");
    }

    #[test]
    fn overflowing_spectrum_reports_nonconvergence() {
        // Exact eigenvalues {0, 3.2e308}: the larger one is not an f64, so
        // the solver must fail loudly instead of returning inf/NaN output.
        let big = 1.6e308;
        let m = SymMatrix::from_rows(&[vec![big, big], vec![big, big]]).unwrap();
        match eig_sym(&m, EigSort::Descending, None) {
            Err(Error::NonConvergence { what, residual, .. }) => {
                assert_eq!(what, "jacobi eigensolver");
                assert!(!residual.is_finite());
            }
            other => panic!("expected NonConvergence for an overflowing spectrum, got {other:?}"),
        }
    }

    #[test]
    fn non_finite_entries_are_rejected_upfront() {
        let m = Mat::from_rows(&[vec![1.0, f64::NAN], vec![f64::NAN, 1.0]]);
        assert!(matches!(SymMatrix::new(m), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn sqrt_pd_matches_diagonal_closed_form() {
        let m = SymMatrix::diag(&[4.0, 9.0]);
        let s = sqrt_pd(&m).unwrap();
        assert_entries_close(s.mat(), &Mat::diag(&[2.0, 3.0]), 1e-12, "sqrt of diag");
        let isq = inv_sqrt_pd(&m).unwrap();
        assert_entries_close(isq.mat(), &Mat::diag(&[0.5, 1.0 / 3.0]), 1e-12, "inv sqrt of diag");
    }

    #[test]
    fn sqrt_pd_squares_back_on_dense_input() {
        let m = SymMatrix::from_rows(&[
            vec![2.0, 0.6, -0.3],
            vec![0.6, 1.5, 0.2],
            vec![-0.3, 0.2, 1.1],
        ])
        .unwrap();
        let s = sqrt_pd(&m).unwrap();
        assert_entries_close(&s.mat().mul(s.mat()), m.mat(), 1e-10, "S·S = M");
        let isq = inv_sqrt_pd(&m).unwrap();
        let should_be_identity = isq.mat().mul(m.mat()).mul(isq.mat());
        assert_entries_close(&should_be_identity, &Mat::identity(3), 1e-10, "S⁻·M·S⁻ = I");
    }

    #[test]
    fn indefinite_input_is_rejected_by_sqrt() {
        let m = SymMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        match sqrt_pd(&m) {
            Err(Error::NotPositiveDefinite { eigenvalue }) => {
                assert!((eigenvalue + 1.0).abs() < 1e-10, "offending eigenvalue is −1")
            }
            other => panic!("expected NotPositiveDefinite, got {other:?}"),
        }
    }

    #[test]
    fn cholesky_reproduces_classic_factor() {
        let m = SymMatrix::from_rows(&[
            vec![4.0, 12.0, -16.0],
            vec![12.0, 37.0, -43.0],
            vec![-16.0, -43.0, 98.0],
        ])
        .unwrap();
        let l = cholesky_pd(&m).unwrap();
        let want = Mat::from_rows(&[
            vec![2.0, 0.0, 0.0],
            vec![6.0, 1.0, 0.0],
            vec![-8.0, 5.0, 3.0],
        ]);
        assert_entries_close(&l, &want, 1e-12, "textbook Cholesky factor");
        assert!(cholesky_pd(&SymMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap()).is_err());
    }

    #[test]
    fn pseudo_inverse_inverts_on_the_support() {
        // Rank-1 matrix: pinv inverts the nonzero eigenvalue and annihilates
        // the null direction.
        let m = SymMatrix::from_rows(&[vec![2.0, 2.0], vec![2.0, 2.0]]).unwrap();
        let p = pseudo_inverse(&m, PSEUDO_INVERSE_CUTOFF).unwrap();
        let mpm = m.mat().mul(&p).mul(m.mat());
        assert_entries_close(&mpm, m.mat(), 1e-10, "M·M⁺·M = M");
        let pm = p.mul(m.mat());
        // M⁺M is the projector onto the support: here the rank-1 projector.
        assert!((pm.trace() - 1.0).abs() < 1e-10);
    }

    mod property_tests {
        use super::*;
        use proptest::prelude::*;

        fn sym_from_seed(dim: usize, vals: &[f64]) -> SymMatrix {
            let mut m = Mat::zeros(dim, dim);
            let mut k = 0;
            for i in 0..dim {
                for j in i..dim {
                    m[(i, j)] = vals[k];
                    m[(j, i)] = vals[k];
                    k += 1;
                }
            }
            SymMatrix::new(m).unwrap()
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(50))]

            #[test]
            fn reconstruction_and_orthonormality(
                dim in 1usize..6,
                vals in prop::collection::vec(-5.0f64..5.0, 21),
            ) {
                let m = sym_from_seed(dim, &vals);
                let dec = eig_sym(&m, EigSort::Descending, None).unwrap();

                let recon = dec.reconstruct();
                let scale = m.max_abs().max(1.0);
                for i in 0..dim {
                    for j in 0..dim {
                        let d = (recon[(i, j)] - m.mat()[(i, j)]).abs();
                        prop_assert!(d <= 1e-9 * scale, "reconstruction off by {d:.2e}");
                    }
                }

                let qtq = dec.q.t().mul(&dec.q);
                for i in 0..dim {
                    for j in 0..dim {
                        let want = if i == j { 1.0 } else { 0.0 };
                        prop_assert!((qtq[(i, j)] - want).abs() <= 1e-10, "QᵀQ not identity");
                    }
                }

                prop_assert_eq!(dec.n_pos + dec.n_neg + dec.n_zero, dim);

                // Descending order.
                for w in dec.lambda.windows(2) {
                    prop_assert!(w[0] >= w[1], "eigenvalues not descending");
                }
            }

            #[test]
            fn inertia_matches_construction(
                signs in prop::collection::vec(-1i8..=1, 1..6),
                angles in prop::collection::vec(0.0f64..std::f64::consts::PI, 10),
            ) {
                // Build QᵀDQ with known signature by rotating a signed diagonal
                // through a few explicit plane rotations; eigenvalues are
                // preserved exactly, so the inertia is known a priori.
                let dim = signs.len();
                let diag: Vec<f64> = signs.iter().map(|&s| s as f64 * 2.5).collect();
                let mut m = Mat::diag(&diag);
                let mut rot_idx = 0;
                for p in 0..dim {
                    for q in (p + 1)..dim {
                        let th = angles[rot_idx % angles.len()];
                        rot_idx += 1;
                        let (s, c) = th.sin_cos();
                        let mut g = Mat::identity(dim);
                        g[(p, p)] = c; g[(q, q)] = c; g[(p, q)] = s; g[(q, p)] = -s;
                        m = g.t().mul(&m).mul(&g);
                    }
                }
                let sym = SymMatrix::new(m).unwrap();
                let dec = eig_sym(&sym, EigSort::PositivesFirst, Some(1e-6)).unwrap();
                let want_pos = signs.iter().filter(|&&s| s > 0).count();
                let want_neg = signs.iter().filter(|&&s| s < 0).count();
                prop_assert_eq!(dec.n_pos, want_pos, "positive count mismatch");
                prop_assert_eq!(dec.n_neg, want_neg, "negative count mismatch");
                prop_assert_eq!(dec.n_zero, dim - want_pos - want_neg, "zero count mismatch");

                // Positives-first layout: positive block, then zeros, then negatives.
                for i in 0..dec.n_pos {
                    prop_assert!(dec.lambda[i] > 1e-6);
                }
                for i in dec.n_pos..dim {
                    prop_assert!(dec.lambda[i] <= 1e-6);
                }
            }

            #[test]
            fn cholesky_factors_gram_matrices(
                dim in 1usize..5,
                vals in prop::collection::vec(-2.0f64..2.0, 16),
            ) {
                // AᵀA + 0.1·I is safely PD.
                let a = Mat::from_fn(dim, dim, |i, j| vals[i * dim + j]);
                let g = a.t().mul(&a).add(&Mat::identity(dim).scale(0.1));
                let sym = SymMatrix::new(g.clone()).unwrap();
                let l = cholesky_pd(&sym).unwrap();
                let back = l.mul(&l.t());
                for i in 0..dim {
                    for j in 0..dim {
                        prop_assert!((back[(i, j)] - g[(i, j)]).abs() <= 1e-10);
                    }
                }
            }
        }
    }
}
