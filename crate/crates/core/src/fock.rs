//! Brute-force validator: builds the full Liouvillian of a quadratic model
//! on a truncated Fock space, extracts the steady density matrix from its
//! null vector, and reports the quadrature covariance.
//!
//! This path shares no code with the Gaussian engine beyond the model
//! description itself, which is what makes the agreement between the two a
//! meaningful check. Truncation converges only for low occupation and
//! moderate squeezing, so the oracle runs at scaled-down parameters.

use faer::linalg::solvers::Solve;
use faer::sparse::linalg::solvers::{Lu, SymbolicLu};
use faer::sparse::{SparseColMat, Triplet};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gaussian::{CovarianceMatrix, QuadraticModel};

/// Truncation controls for the Fock-space solve.
#[derive(Debug, Clone, Copy)]
pub struct TruncationSpec {
    /// Fock levels kept per mode (N >= 3).
    pub levels_per_mode: usize,
    /// Maximum steady population allowed in the top level of either mode.
    pub leakage_tol: f64,
    /// Maximum covariance change allowed between N and N + 2.
    pub consistency_tol: f64,
}

impl TruncationSpec {
    pub fn new(levels_per_mode: usize) -> Self {
        assert!(levels_per_mode >= 3, "need at least three Fock levels");
        Self { levels_per_mode, leakage_tol: 1e-6, consistency_tol: 1e-4 }
    }
}

/// Steady state of one truncated solve, with its convergence diagnostics.
#[derive(Debug, Clone)]
pub struct FockSteadyState {
    /// Trace-normalized steady density matrix.
    pub rho: DMatrix<Complex64>,
    /// Quadrature covariance extracted from it.
    pub covariance: CovarianceMatrix,
    /// Steady population of the top Fock level of each mode.
    pub top_level_population: Vec<f64>,
    /// Largest first-moment magnitude |<x_i>|.
    pub max_first_moment: f64,
}

fn annihilation(levels: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(levels, levels, |r, c| {
        if c == r + 1 { Complex64::new((c as f64).sqrt(), 0.0) } else { Complex64::new(0.0, 0.0) }
    })
}

fn kron(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    a.kronecker(b)
}

/// Per-mode annihilation operators on the joint space.
fn mode_annihilators(n_modes: usize, levels: usize) -> Vec<DMatrix<Complex64>> {
    let a = annihilation(levels);
    let eye = DMatrix::<Complex64>::identity(levels, levels);
    match n_modes {
        1 => vec![a],
        2 => vec![kron(&a, &eye), kron(&eye, &a)],
        _ => unreachable!("caller restricts the mode count"),
    }
}

/// Quadrature operators X_m = (a + a^d)/sqrt(2), P_m = -i(a - a^d)/sqrt(2).
fn quadrature_operators(annihilators: &[DMatrix<Complex64>]) -> Vec<DMatrix<Complex64>> {
    let inv_sqrt2 = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let mut out = Vec::with_capacity(2 * annihilators.len());
    for a in annihilators {
        let ad = a.adjoint();
        out.push((a + &ad) * inv_sqrt2);
        out.push((a - &ad) * inv_sqrt2 * Complex64::new(0.0, -1.0));
    }
    out
}

/// A Lindblad coefficient vector as ladder amplitudes (u_m, v_m) with
/// L = sum_m u_m a_m + v_m a_m^dagger.
fn ladder_amplitudes(c: &DVector<Complex64>) -> Vec<(Complex64, Complex64)> {
    let inv_sqrt2 = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let i = Complex64::i();
    (0..c.len() / 2)
        .map(|m| {
            let cx = c[2 * m];
            let cp = c[2 * m + 1];
            ((cx - i * cp) * inv_sqrt2, (cx + i * cp) * inv_sqrt2)
        })
        .collect()
}

fn operator_matrices(
    model: &QuadraticModel,
    levels: usize,
) -> (DMatrix<Complex64>, Vec<DMatrix<Complex64>>, Vec<DMatrix<Complex64>>) {
    let n_modes = model.n_modes();
    let dim = levels.pow(n_modes as u32);
    let ann = mode_annihilators(n_modes, levels);
    let quads = quadrature_operators(&ann);

    // H = (1/2) x^T G x, symmetrized; the commutator constants cancel against
    // the symmetric G.
    let g = model.hamiltonian();
    let mut h = DMatrix::<Complex64>::zeros(dim, dim);
    for i in 0..2 * n_modes {
        for j in 0..2 * n_modes {
            let gij = g[(i, j)];
            if gij != 0.0 {
                let prod = &quads[i] * &quads[j] + &quads[j] * &quads[i];
                h += prod * Complex64::new(0.25 * gij, 0.0);
            }
        }
    }

    let jumps: Vec<DMatrix<Complex64>> = model
        .lindblad_ops()
        .iter()
        .map(|c| {
            let mut l = DMatrix::<Complex64>::zeros(dim, dim);
            for (m, (u, v)) in ladder_amplitudes(c).into_iter().enumerate() {
                if u.norm_sqr() > 0.0 {
                    l += &ann[m] * u;
                }
                if v.norm_sqr() > 0.0 {
                    l += ann[m].adjoint() * v;
                }
            }
            l
        })
        .collect();

    (h, jumps, quads)
}

fn push_kron_triplets(
    trips: &mut Vec<Triplet<usize, usize, Complex64>>,
    a: &DMatrix<Complex64>,
    b: &DMatrix<Complex64>,
    scale: Complex64,
) {
    let dim = a.nrows();
    let a_nz: Vec<(usize, usize, Complex64)> = (0..dim)
        .flat_map(|r| (0..dim).map(move |c| (r, c)))
        .filter_map(|(r, c)| {
            let v = a[(r, c)];
            (v.norm_sqr() > 0.0).then_some((r, c, v))
        })
        .collect();
    for (br, bc) in (0..dim).flat_map(|r| (0..dim).map(move |c| (r, c))) {
        let bv = b[(br, bc)];
        if bv.norm_sqr() == 0.0 {
            continue;
        }
        for &(ar, ac, av) in &a_nz {
            trips.push(Triplet::new(ar * dim + br, ac * dim + bc, scale * av * bv));
        }
    }
}

/// Sparse Liouvillian in column-major vectorization:
/// L = -i (I (x) H - H^T (x) I)
///   + sum_k [ conj(L_k) (x) L_k - 1/2 I (x) L_k^d L_k - 1/2 (L_k^d L_k)^T (x) I ].
fn liouvillian_triplets(
    h: &DMatrix<Complex64>,
    jumps: &[DMatrix<Complex64>],
) -> Vec<Triplet<usize, usize, Complex64>> {
    let dim = h.nrows();
    let eye = DMatrix::<Complex64>::identity(dim, dim);
    let mut trips = Vec::new();
    let i = Complex64::i();

    push_kron_triplets(&mut trips, &eye, h, -i);
    push_kron_triplets(&mut trips, &h.transpose(), &eye, i);
    for l in jumps {
        let ldl = l.adjoint() * l;
        let half = Complex64::new(-0.5, 0.0);
        push_kron_triplets(&mut trips, &l.map(|z| z.conj()), l, Complex64::new(1.0, 0.0));
        push_kron_triplets(&mut trips, &eye, &ldl, half);
        push_kron_triplets(&mut trips, &ldl.transpose(), &eye, half);
    }
    trips
}

fn expectation(op: &DMatrix<Complex64>, rho: &DMatrix<Complex64>) -> Complex64 {
    (op * rho).trace()
}

/// Total Fock level of each joint basis state, mod 2.
fn state_parity(n_modes: usize, levels: usize, dim: usize) -> Vec<u8> {
    (0..dim)
        .map(|idx| {
            let total = if n_modes == 1 { idx } else { idx / levels + idx % levels };
            (total % 2) as u8
        })
        .collect()
}

/// Solves one truncated steady state by shifted inverse iteration on the
/// sparse Liouvillian.
///
/// Every term of the Liouvillian changes the combined ket-plus-bra Fock
/// level by an even amount (the Hamiltonian is quadratic, the jump operators
/// are linear and act on both sides), so the superoperator splits into even
/// and odd parity sectors and the zero-mean steady state lives entirely in
/// the even one. The solve is restricted to that sector, halving the
/// factorization dimension.
pub fn steady_state_at(model: &QuadraticModel, levels: usize) -> Result<FockSteadyState> {
    if model.n_modes() > 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: model.n_modes() });
    }
    let n_modes = model.n_modes();
    let dim = levels.pow(n_modes as u32);
    let vec_dim = dim * dim;

    let (h, jumps, quads) = operator_matrices(model, levels);
    let trips = liouvillian_triplets(&h, &jumps);

    // Compact even-sector indexing: vec index v = c*dim + r is even iff the
    // ket and bra states have equal parity.
    let parity = state_parity(n_modes, levels, dim);
    let mut compact = vec![usize::MAX; vec_dim];
    let mut full_of = Vec::with_capacity(vec_dim / 2 + dim);
    for v in 0..vec_dim {
        if parity[v % dim] == parity[v / dim] {
            compact[v] = full_of.len();
            full_of.push(v);
        }
    }
    let even_dim = full_of.len();

    let scale = trips.iter().map(|t| t.val.norm()).fold(0.0, f64::max);
    let mut even_trips: Vec<Triplet<usize, usize, Complex64>> = trips
        .iter()
        .filter_map(|t| match (compact[t.row], compact[t.col]) {
            (usize::MAX, usize::MAX) => None,
            (r, c) => {
                // Structural for quadratic Hamiltonians with linear jumps.
                assert!(
                    r != usize::MAX && c != usize::MAX,
                    "Liouvillian mixes parity sectors"
                );
                Some(Triplet::new(r, c, t.val))
            }
        })
        .collect();

    // Shift slightly off the null eigenvalue so the LU factorization exists.
    let shift = Complex64::new(1e-9 * scale.max(f64::MIN_POSITIVE), 0.0);
    for d in 0..even_dim {
        even_trips.push(Triplet::new(d, d, -shift));
    }

    let lmat =
        SparseColMat::<usize, Complex64>::try_new_from_triplets(even_dim, even_dim, &even_trips)
            .map_err(|e| Error::NoUniqueSteadyState { detail: format!("assembly failed: {e:?}") })?;
    let symbolic = SymbolicLu::try_new(lmat.symbolic())
        .map_err(|e| Error::NoUniqueSteadyState { detail: format!("symbolic LU failed: {e:?}") })?;
    let lu = Lu::try_new_with_symbolic(symbolic, lmat.as_ref())
        .map_err(|e| Error::NoUniqueSteadyState { detail: format!("numeric LU failed: {e:?}") })?;

    let run_inverse_iteration = |start: &dyn Fn(usize) -> Complex64| -> DMatrix<Complex64> {
        let mut x = faer::Mat::<Complex64>::from_fn(even_dim, 1, |r, _| start(full_of[r]));
        for _ in 0..6 {
            lu.solve_in_place(x.as_mut());
            let norm = (0..even_dim).map(|r| x[(r, 0)].norm_sqr()).sum::<f64>().sqrt();
            for r in 0..even_dim {
                x[(r, 0)] /= Complex64::new(norm, 0.0);
            }
        }
        let mut rho = DMatrix::from_fn(dim, dim, |r, c| {
            let v = compact[c * dim + r];
            if v == usize::MAX { Complex64::new(0.0, 0.0) } else { x[(v, 0)] }
        });
        // The Liouvillian preserves hermiticity; remove rounding drift and
        // fix the trace gauge.
        rho = (rho.clone() + rho.adjoint()) * Complex64::new(0.5, 0.0);
        let tr = rho.trace();
        if tr.norm() < 1e-300 {
            return rho;
        }
        rho / tr
    };

    // Maximally mixed start; a second, biased start is used to detect a
    // degenerate null space.
    let rho = run_inverse_iteration(&|r| {
        if r % (dim + 1) == 0 { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) }
    });
    let rho_alt = run_inverse_iteration(&|r| {
        let (row, col) = (r % dim, r / dim);
        if row == col {
            Complex64::new(1.0 / (1.0 + row as f64), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let split = (&rho - &rho_alt).norm();
    if split > 1e-8 * rho.norm() {
        return Err(Error::NoUniqueSteadyState {
            detail: format!("two inverse-iteration starts disagree by {split:.3e}"),
        });
    }

    let max_first_moment =
        quads.iter().map(|x| expectation(x, &rho).norm()).fold(0.0, f64::max);

    let mut v = DMatrix::<f64>::zeros(2 * n_modes, 2 * n_modes);
    for i in 0..2 * n_modes {
        for j in i..2 * n_modes {
            let sym = (expectation(&(&quads[i] * &quads[j]), &rho)
                + expectation(&(&quads[j] * &quads[i]), &rho))
                * Complex64::new(0.5, 0.0);
            let first = expectation(&quads[i], &rho) * expectation(&quads[j], &rho);
            v[(i, j)] = (sym - first).re;
            v[(j, i)] = v[(i, j)];
        }
    }

    let top_level_population = (0..n_modes)
        .map(|m| {
            let number_top = levels - 1;
            (0..dim)
                .filter(|idx| {
                    let level = if n_modes == 1 {
                        *idx
                    } else if m == 0 {
                        idx / levels
                    } else {
                        idx % levels
                    };
                    level == number_top
                })
                .map(|idx| rho[(idx, idx)].re)
                .sum()
        })
        .collect();

    Ok(FockSteadyState {
        covariance: CovarianceMatrix::new(n_modes, v)?,
        rho,
        top_level_population,
        max_first_moment,
    })
}

/// Steady covariance with built-in convergence checks: solves at N and
/// N + 2 levels, requires the two covariances to agree within
/// `consistency_tol`, and requires the top-level leakage to stay below
/// `leakage_tol`. Reports the finer solve.
pub fn steady_covariance_fock(
    model: &QuadraticModel,
    trunc: &TruncationSpec,
) -> Result<CovarianceMatrix> {
    let coarse = steady_state_at(model, trunc.levels_per_mode)?;
    let fine = steady_state_at(model, trunc.levels_per_mode + 2)?;

    let leakage = fine
        .top_level_population
        .iter()
        .chain(coarse.top_level_population.iter())
        .fold(0.0f64, |acc, &p| acc.max(p.abs()));
    if leakage > trunc.leakage_tol {
        return Err(Error::TruncationNotConverged { leakage, tolerance: trunc.leakage_tol });
    }

    let diff = (coarse.covariance.matrix() - fine.covariance.matrix())
        .iter()
        .fold(0.0f64, |acc, x| acc.max(x.abs()));
    if diff > trunc.consistency_tol {
        return Err(Error::TruncationNotConverged { leakage: diff, tolerance: trunc.consistency_tol });
    }

    Ok(fine.covariance)
}

/// Minimum eigenvalue of a Hermitian matrix through its real symmetric
/// embedding; used to check positivity of the steady density matrix.
pub fn min_hermitian_eigenvalue(m: &DMatrix<Complex64>) -> f64 {
    let n = m.nrows();
    let mut emb = DMatrix::<f64>::zeros(2 * n, 2 * n);
    for r in 0..n {
        for c in 0..n {
            let z = m[(r, c)];
            emb[(r, c)] = z.re;
            emb[(n + r, n + c)] = z.re;
            emb[(r, n + c)] = -z.im;
            emb[(n + r, c)] = z.im;
        }
    }
    emb.symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min)
}
