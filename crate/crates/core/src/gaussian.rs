//! Gaussian open-system engine.
//!
//! A model is a quadratic Hamiltonian H = (1/2) x^T G x over the quadrature
//! vector x = (X_1, P_1, ..., X_n, P_n) together with linear Lindblad
//! operators L_k = c_k^T x. Quadratures satisfy [X_j, P_j] = i, so the vacuum
//! variance is 1/2. The first and second moments then obey
//!
//! ```text
//! d<x>/dt = A <x>,     dV/dt = A V + V A^T + D,
//! A = sigma (G + Im(C^H C)),   D = sigma Re(C^H C) sigma^T,
//! ```
//!
//! where C stacks the row vectors c_k^T and sigma is the symplectic form.
//! The steady covariance solves the Lyapunov equation A V + V A^T + D = 0.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default relative tolerance (times ||A||) for the Hurwitz stability check.
pub const DEFAULT_STABILITY_TOL: f64 = 1e-12;

/// Absolute tolerance on the minimum eigenvalue of V + (i/2) sigma.
pub const PHYSICALITY_TOL: f64 = 1e-9;

/// Relative residual bound enforced by [`steady_state`].
pub const RESIDUAL_TOL: f64 = 1e-9;

/// The symplectic form for `n_modes` modes in (X, P) interleaved ordering.
pub fn symplectic_form(n_modes: usize) -> DMatrix<f64> {
    let n = 2 * n_modes;
    let mut s = DMatrix::zeros(n, n);
    for m in 0..n_modes {
        s[(2 * m, 2 * m + 1)] = 1.0;
        s[(2 * m + 1, 2 * m)] = -1.0;
    }
    s
}

/// One ladder contribution `lower * a_m + raise * a_m^dagger` to a linear
/// Lindblad operator.
#[derive(Debug, Clone, Copy)]
pub struct LadderTerm {
    pub mode: usize,
    pub lower: Complex64,
    pub raise: Complex64,
}

impl LadderTerm {
    pub fn lowering(mode: usize, amp: f64) -> Self {
        Self { mode, lower: Complex64::new(amp, 0.0), raise: Complex64::new(0.0, 0.0) }
    }

    pub fn raising(mode: usize, amp: f64) -> Self {
        Self { mode, lower: Complex64::new(0.0, 0.0), raise: Complex64::new(amp, 0.0) }
    }
}

/// Converts a sum of ladder terms into a quadrature coefficient vector,
/// using a = (X + iP) / sqrt(2).
pub fn mode_operator(n_modes: usize, terms: &[LadderTerm]) -> DVector<Complex64> {
    let inv_sqrt2 = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let i = Complex64::i();
    let mut c = DVector::from_element(2 * n_modes, Complex64::new(0.0, 0.0));
    for t in terms {
        assert!(t.mode < n_modes, "ladder term on mode {} of {}", t.mode, n_modes);
        c[2 * t.mode] += (t.lower + t.raise) * inv_sqrt2;
        c[2 * t.mode + 1] += i * (t.lower - t.raise) * inv_sqrt2;
    }
    c
}

/// Accumulates a quadratic Hamiltonian matrix G from ladder-operator terms.
#[derive(Debug, Clone)]
pub struct HamiltonianBuilder {
    g: DMatrix<f64>,
}

impl HamiltonianBuilder {
    pub fn new(n_modes: usize) -> Self {
        Self { g: DMatrix::zeros(2 * n_modes, 2 * n_modes) }
    }

    /// omega * a_m^dagger a_m (the constant -omega/2 is dropped).
    pub fn number(mut self, mode: usize, omega: f64) -> Self {
        self.g[(2 * mode, 2 * mode)] += omega;
        self.g[(2 * mode + 1, 2 * mode + 1)] += omega;
        self
    }

    /// t * a_i^dagger a_j + h.c. with i != j.
    pub fn beam_splitter(mut self, i: usize, j: usize, t: Complex64) -> Self {
        assert_ne!(i, j, "beam-splitter term needs distinct modes");
        let (xi, pi, xj, pj) = (2 * i, 2 * i + 1, 2 * j, 2 * j + 1);
        self.add_sym(xi, xj, t.re);
        self.add_sym(pi, pj, t.re);
        self.add_sym(pi, xj, t.im);
        self.add_sym(xi, pj, -t.im);
        self
    }

    /// s * a_i^dagger a_j^dagger + h.c. with i != j.
    pub fn two_mode_squeeze(mut self, i: usize, j: usize, s: Complex64) -> Self {
        assert_ne!(i, j, "two-mode squeeze term needs distinct modes");
        let (xi, pi, xj, pj) = (2 * i, 2 * i + 1, 2 * j, 2 * j + 1);
        self.add_sym(xi, xj, s.re);
        self.add_sym(pi, pj, -s.re);
        self.add_sym(xi, pj, s.im);
        self.add_sym(pi, xj, s.im);
        self
    }

    /// k * (a_i + a_i^dagger)(a_j + a_j^dagger) = 2k X_i X_j with i != j.
    pub fn position_coupling(mut self, i: usize, j: usize, k: f64) -> Self {
        assert_ne!(i, j, "position coupling needs distinct modes");
        self.add_sym(2 * i, 2 * j, 2.0 * k);
        self
    }

    pub fn build(self) -> DMatrix<f64> {
        self.g
    }

    fn add_sym(&mut self, a: usize, b: usize, val: f64) {
        self.g[(a, b)] += val;
        self.g[(b, a)] += val;
    }
}

/// Quadratic Hamiltonian plus a set of linear Lindblad operators.
#[derive(Debug, Clone)]
pub struct QuadraticModel {
    n_modes: usize,
    hamiltonian: DMatrix<f64>,
    lindblad_ops: Vec<DVector<Complex64>>,
}

impl QuadraticModel {
    /// Validates symmetry of G (1e-12 relative) and the length of every
    /// Lindblad coefficient vector.
    pub fn new(
        n_modes: usize,
        hamiltonian: DMatrix<f64>,
        lindblad_ops: Vec<DVector<Complex64>>,
    ) -> Result<Self> {
        let n = 2 * n_modes;
        if hamiltonian.nrows() != n || hamiltonian.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, got: hamiltonian.nrows() });
        }
        let asym = (&hamiltonian - hamiltonian.transpose()).norm();
        let scale = hamiltonian.norm().max(1.0);
        if asym > 1e-12 * scale {
            return Err(Error::Config(format!(
                "Hamiltonian matrix is not symmetric (asymmetry {asym:.3e})"
            )));
        }
        for c in &lindblad_ops {
            if c.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: c.len() });
            }
        }
        Ok(Self { n_modes, hamiltonian, lindblad_ops })
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn hamiltonian(&self) -> &DMatrix<f64> {
        &self.hamiltonian
    }

    pub fn lindblad_ops(&self) -> &[DVector<Complex64>] {
        &self.lindblad_ops
    }

    /// Appends another dissipation channel, e.g. thermal contact that a model
    /// builder deliberately leaves to its caller.
    pub fn push_lindblad(&mut self, c: DVector<Complex64>) -> Result<()> {
        if c.len() != 2 * self.n_modes {
            return Err(Error::DimensionMismatch { expected: 2 * self.n_modes, got: c.len() });
        }
        self.lindblad_ops.push(c);
        Ok(())
    }
}

/// Drift and diffusion matrices of the quadrature moment equations.
#[derive(Debug, Clone)]
pub struct DriftDiffusion {
    pub drift: DMatrix<f64>,
    pub diffusion: DMatrix<f64>,
}

/// Symmetric quadrature covariance matrix.
///
/// Physical states satisfy V + (i/2) sigma >= 0; use [`CovarianceMatrix::check_physical`]
/// to test that invariant. The constructor only enforces symmetry, because
/// the Lyapunov solver is equally valid for classical (sub-vacuum) systems.
#[derive(Debug, Clone)]
pub struct CovarianceMatrix {
    n_modes: usize,
    v: DMatrix<f64>,
}

impl CovarianceMatrix {
    pub fn new(n_modes: usize, v: DMatrix<f64>) -> Result<Self> {
        let n = 2 * n_modes;
        if v.nrows() != n || v.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, got: v.nrows() });
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::Config("covariance matrix has non-finite entries".into()));
        }
        let sym = (&v + v.transpose()) * 0.5;
        Ok(Self { n_modes, v: sym })
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.v
    }

    /// Minimum eigenvalue of the Hermitian matrix V + (i/2) sigma, computed
    /// through the real symmetric embedding [[V, -B], [B, V]] with B = sigma/2.
    pub fn min_uncertainty_eig(&self) -> f64 {
        let n = 2 * self.n_modes;
        let b = symplectic_form(self.n_modes) * 0.5;
        let mut m = DMatrix::zeros(2 * n, 2 * n);
        m.view_mut((0, 0), (n, n)).copy_from(&self.v);
        m.view_mut((n, n), (n, n)).copy_from(&self.v);
        m.view_mut((0, n), (n, n)).copy_from(&(-&b));
        m.view_mut((n, 0), (n, n)).copy_from(&b);
        let eigs = m.symmetric_eigenvalues();
        eigs.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Errors unless V + (i/2) sigma >= -tol.
    pub fn check_physical(&self, tol: f64) -> Result<()> {
        let min_eig = self.min_uncertainty_eig();
        if min_eig < -tol {
            return Err(Error::Unphysical { min_eig });
        }
        Ok(())
    }

    /// Marginal covariance of a subset of modes (block selection).
    pub fn reduce(&self, modes: &[usize]) -> CovarianceMatrix {
        let n = 2 * modes.len();
        let mut out = DMatrix::zeros(n, n);
        for (bi, &mi) in modes.iter().enumerate() {
            for (bj, &mj) in modes.iter().enumerate() {
                for a in 0..2 {
                    for b in 0..2 {
                        out[(2 * bi + a, 2 * bj + b)] = self.v[(2 * mi + a, 2 * mj + b)];
                    }
                }
            }
        }
        CovarianceMatrix { n_modes: modes.len(), v: out }
    }
}

/// Builds drift and diffusion matrices from a quadratic model.
pub fn assemble(model: &QuadraticModel) -> DriftDiffusion {
    let n = 2 * model.n_modes;
    let mut chc = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    for c in &model.lindblad_ops {
        // C^H C = sum_k conj(c_k) c_k^T
        for i in 0..n {
            for j in 0..n {
                chc[(i, j)] += c[i].conj() * c[j];
            }
        }
    }
    let re = chc.map(|z| z.re);
    let im = chc.map(|z| z.im);
    let sigma = symplectic_form(model.n_modes);
    let drift = &sigma * (&model.hamiltonian + im);
    let diffusion = &sigma * re * sigma.transpose();
    // Re(C^H C) is symmetric PSD by construction; symmetrize away rounding.
    let diffusion = (&diffusion + diffusion.transpose()) * 0.5;
    DriftDiffusion { drift, diffusion }
}

/// Largest real part among the drift eigenvalues.
pub fn max_eigenvalue_real_part(a: &DMatrix<f64>) -> f64 {
    a.clone()
        .complex_eigenvalues()
        .iter()
        .map(|l| l.re)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Solves A V + V A^T + D = 0 for the unique steady covariance.
///
/// The equation is vectorized into (I (x) A + A (x) I) vec(V) = -vec(D) and
/// solved densely with one step of iterative refinement; at most three modes
/// are ever assembled here, so the system is at most 36 x 36.
pub fn steady_state(dd: &DriftDiffusion) -> Result<CovarianceMatrix> {
    steady_state_with_tol(dd, DEFAULT_STABILITY_TOL)
}

/// [`steady_state`] with a configurable stability tolerance factor.
pub fn steady_state_with_tol(dd: &DriftDiffusion, stability_tol: f64) -> Result<CovarianceMatrix> {
    let a = &dd.drift;
    let d = &dd.diffusion;
    let n = a.nrows();
    let norm_a = a.norm();

    let max_re = max_eigenvalue_real_part(a);
    if max_re >= -stability_tol * norm_a.max(f64::MIN_POSITIVE) {
        return Err(Error::NotStable { max_re });
    }

    let eye = DMatrix::<f64>::identity(n, n);
    let m = eye.kronecker(a) + a.kronecker(&eye);
    let rhs = DVector::from_column_slice(d.as_slice()) * -1.0;

    let lu = m.clone().lu();
    let mut x = lu.solve(&rhs).ok_or(Error::NotStable { max_re })?;
    // One refinement pass keeps the residual near machine level even when the
    // drift mixes fast rotation with slow damping.
    for _ in 0..2 {
        let r = &m * &x - &rhs;
        if let Some(dx) = lu.solve(&r) {
            x -= dx;
        }
    }

    let v = DMatrix::from_column_slice(n, n, x.as_slice());
    let v = (&v + v.transpose()) * 0.5;

    let residual = (a * &v + &v * a.transpose() + d).norm();
    let bound = RESIDUAL_TOL * (norm_a * v.norm() + d.norm());
    if residual > bound {
        return Err(Error::ResidualTooLarge { residual, bound });
    }

    CovarianceMatrix::new(n / 2, v)
}

/// Symplectic eigenvalues of V: the moduli of the eigenvalues of i sigma V,
/// deduplicated from conjugate pairs and sorted ascending.
pub fn symplectic_eigenvalues(v: &CovarianceMatrix) -> Vec<f64> {
    let sigma = symplectic_form(v.n_modes);
    let m = &sigma * v.matrix();
    let mut mags: Vec<f64> = m.complex_eigenvalues().iter().map(|l| l.norm()).collect();
    mags.sort_by(|a, b| a.partial_cmp(b).unwrap());
    // Eigenvalues of sigma V come in +/- i nu pairs; average each pair.
    mags.chunks(2).map(|pair| 0.5 * (pair[0] + pair[1])).collect()
}

/// Logarithmic negativity of a two-mode covariance matrix.
///
/// Uses the closed form for 1x1 mode bipartitions: with
/// Sigma = det V_a + det V_b - 2 det V_ab, the smallest symplectic eigenvalue
/// of the partial transpose is
/// eta = 2^{-1/2} (Sigma - sqrt(Sigma^2 - 4 det V))^{1/2} and
/// E_N = max(0, -ln 2 eta). PPT is conclusive here, so E_N = 0 exactly for
/// separable states.
pub fn log_negativity(v: &CovarianceMatrix) -> Result<f64> {
    if v.n_modes != 2 {
        return Err(Error::DimensionMismatch { expected: 4, got: 2 * v.n_modes });
    }
    v.check_physical(PHYSICALITY_TOL)?;
    let m = v.matrix();
    let va = m.view((0, 0), (2, 2));
    let vb = m.view((2, 2), (2, 2));
    let vab = m.view((0, 2), (2, 2));
    let det_a = va[(0, 0)] * va[(1, 1)] - va[(0, 1)] * va[(1, 0)];
    let det_b = vb[(0, 0)] * vb[(1, 1)] - vb[(0, 1)] * vb[(1, 0)];
    let det_ab = vab[(0, 0)] * vab[(1, 1)] - vab[(0, 1)] * vab[(1, 0)];
    let det_v = m.clone_owned().determinant();

    let sigma_pt = det_a + det_b - 2.0 * det_ab;
    // Rounding can push the discriminant slightly negative near separable
    // boundaries; clamp it at zero.
    let disc = (sigma_pt * sigma_pt - 4.0 * det_v).max(0.0);
    let eta_sq = 0.5 * (sigma_pt - disc.sqrt());
    let eta = eta_sq.max(0.0).sqrt();
    Ok((-(2.0 * eta).ln()).max(0.0))
}
