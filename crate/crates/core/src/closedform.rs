//! Analytic oracles for the symmetric-rate effective two-mode model:
//! the ten steady second moments in closed form, the approximate
//! steady-state logarithmic negativity, and its quantum-classical gap.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gaussian::CovarianceMatrix;
use crate::params::DerivedParams;

/// Floor for the argument of the logarithm in [`approx_log_negativity`]; the
/// printed expansion can go negative outside its validity regime.
const LOG_ARG_FLOOR: f64 = 1e-300;

/// Rates of the effective two-mode model under the symmetric assumptions
/// gamma_a = gamma_b, nbar_a = nbar_b, kappa_G,a = kappa_G,b.
///
/// All rates are angular frequencies (rad/s); `nbar` and `squeeze` are
/// dimensionless.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetricRates {
    /// Mechanical dissipation gamma_m.
    pub gamma_m: f64,
    /// Collective optomechanical damping Gamma.
    pub big_gamma: f64,
    /// Thermal phonon occupation nbar.
    pub nbar: f64,
    /// Gravity-model dissipation kappa_G (zero for the quantum model).
    pub kappa_g: f64,
    /// Half-detuning Omega between the two oscillators.
    pub detuning: f64,
    /// Residual oscillator-oscillator coupling k_M.
    pub mode_coupling: f64,
    /// Bogoliubov squeeze parameter r.
    pub squeeze: f64,
}

impl SymmetricRates {
    /// Extracts symmetric rates from a derived parameter set. Errors if the
    /// damping rates differ: the closed forms only cover the symmetric case.
    pub fn from_derived(p: &DerivedParams) -> Result<Self> {
        let ga = p.config.mech_damping_a;
        let gb = p.config.mech_damping_b;
        if ga != gb {
            return Err(Error::AsymmetricRates { what: "mechanical damping rates", a: ga, b: gb });
        }
        Ok(Self {
            gamma_m: ga,
            big_gamma: p.om_damping,
            nbar: p.thermal_occupancy,
            kappa_g: p.grav_dissipation,
            detuning: p.half_detuning,
            mode_coupling: p.total_rate,
            squeeze: p.squeeze_param,
        })
    }
}

/// The ten steady second moments of the mechanical pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondMoments {
    pub aa: Complex64,
    pub bb: Complex64,
    pub adad: Complex64,
    pub bdbd: Complex64,
    pub abd: Complex64,
    pub adb: Complex64,
    pub ada: Complex64,
    pub ab: Complex64,
    pub bdb: Complex64,
    pub adbd: Complex64,
}

impl SecondMoments {
    pub fn as_array(&self) -> [Complex64; 10] {
        [
            self.aa, self.bb, self.adad, self.bdbd, self.abd, self.adb, self.ada, self.ab,
            self.bdb, self.adbd,
        ]
    }

    /// Largest deviation from the conjugate-pairing constraints.
    pub fn conjugation_deviation(&self) -> f64 {
        [
            (self.adad - self.aa.conj()).norm(),
            (self.bdbd - self.bb.conj()).norm(),
            (self.adb - self.abd.conj()).norm(),
            (self.adbd - self.ab.conj()).norm(),
            self.ada.im.abs(),
            self.bdb.im.abs(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Closed-form steady second moments of the symmetric effective model.
pub fn moments_closed_form(rates: &SymmetricRates) -> Result<SecondMoments> {
    let g = rates.gamma_m;
    let gg = rates.big_gamma;
    let nbar = rates.nbar;
    let kg = rates.kappa_g;
    let om = rates.detuning;
    let km = rates.mode_coupling;
    let r = rates.squeeze;

    if g == 0.0 && gg == 0.0 {
        return Err(Error::DegenerateDenominator);
    }

    let i = Complex64::i();
    let s2r = (2.0 * r).sinh();
    let sh2 = r.sinh().powi(2);

    // a = (gamma + Gamma)^2 + 4 (Omega^2 + k_M^2)
    let a = (g + gg).powi(2) + 4.0 * (om * om + km * km);
    // Shared denominators.
    let dm = Complex64::new(gg * gg - a, 4.0 * km * gg) * (2.0 * (g + gg));
    let dp = dm.conj();
    let d2 = g * (g + 2.0 * gg) * a + 4.0 * gg * gg * om * om;

    let gpg = Complex64::new(g + gg, 0.0);
    let noise = nbar * g + 2.0 * kg;
    let cross_noise = (nbar - sh2) * g + 2.0 * kg;

    let aa = (gpg - 2.0 * i * om) * (Complex64::new(g, -2.0 * km)) * gg * s2r / dm;
    let bb = (gpg + 2.0 * i * om) * (Complex64::new(g, -2.0 * km)) * gg * s2r / dm;
    let adad = (gpg + 2.0 * i * om) * (Complex64::new(g, 2.0 * km)) * gg * s2r / dp;
    let bdbd = (gpg - 2.0 * i * om) * (Complex64::new(g, 2.0 * km)) * gg * s2r / dp;

    let abd = -gg * ((gpg * (gpg - 2.0 * i * om)) + 4.0 * km * km) * cross_noise / d2;
    let adb = -gg * ((gpg * (gpg + 2.0 * i * om)) + 4.0 * km * km) * cross_noise / d2;

    let ada = Complex64::new(
        (noise * ((g + gg) * a - 4.0 * gg * om * km)
            + (g * a + 4.0 * om * (gg * om + km * g)) * gg * sh2)
            / d2,
        0.0,
    );
    let bdb = Complex64::new(
        (noise * ((g + gg) * a + 4.0 * gg * om * km)
            + (g * a + 4.0 * om * (gg * om - km * g)) * gg * sh2)
            / d2,
        0.0,
    );

    let ab = ((gpg * Complex64::new(g, -2.0 * km)) + 4.0 * om * om) * gg * s2r / dm;
    let adbd = ((gpg * Complex64::new(g, 2.0 * km)) + 4.0 * om * om) * gg * s2r / dp;

    Ok(SecondMoments { aa, bb, adad, bdbd, abd, adb, ada, ab, bdb, adbd })
}

/// Builds the 4x4 quadrature covariance from second moments, assuming zero
/// first moments and X = (a + a^dag)/sqrt(2), P = -i (a - a^dag)/sqrt(2).
pub fn moments_to_covariance(m: &SecondMoments) -> Result<CovarianceMatrix> {
    let dev = m.conjugation_deviation();
    let scale = m.as_array().iter().map(|z| z.norm()).fold(1.0, f64::max);
    if dev > 1e-10 * scale {
        return Err(Error::ConjugationViolation { deviation: dev });
    }

    let mut v = DMatrix::zeros(4, 4);
    v[(0, 0)] = m.aa.re + m.ada.re + 0.5;
    v[(1, 1)] = -m.aa.re + m.ada.re + 0.5;
    v[(0, 1)] = m.aa.im;
    v[(2, 2)] = m.bb.re + m.bdb.re + 0.5;
    v[(3, 3)] = -m.bb.re + m.bdb.re + 0.5;
    v[(2, 3)] = m.bb.im;

    v[(0, 2)] = m.ab.re + m.abd.re; // <X_a X_b>
    v[(1, 3)] = m.abd.re - m.ab.re; // <P_a P_b>
    v[(0, 3)] = m.ab.im - m.abd.im; // <X_a P_b>
    v[(1, 2)] = m.ab.im + m.abd.im; // <P_a X_b>

    for r in 0..4 {
        for c in (r + 1)..4 {
            v[(c, r)] = v[(r, c)];
        }
    }
    CovarianceMatrix::new(2, v)
}

/// Recovers the ten second moments from a two-mode covariance matrix
/// (the inverse of [`moments_to_covariance`]).
pub fn covariance_to_moments(v: &CovarianceMatrix) -> Result<SecondMoments> {
    if v.n_modes() != 2 {
        return Err(Error::DimensionMismatch { expected: 4, got: 2 * v.n_modes() });
    }
    let m = v.matrix();
    let aa = Complex64::new(0.5 * (m[(0, 0)] - m[(1, 1)]), m[(0, 1)]);
    let bb = Complex64::new(0.5 * (m[(2, 2)] - m[(3, 3)]), m[(2, 3)]);
    let ada = Complex64::new(0.5 * (m[(0, 0)] + m[(1, 1)] - 1.0), 0.0);
    let bdb = Complex64::new(0.5 * (m[(2, 2)] + m[(3, 3)] - 1.0), 0.0);
    let ab = Complex64::new(
        0.5 * (m[(0, 2)] - m[(1, 3)]),
        0.5 * (m[(0, 3)] + m[(1, 2)]),
    );
    let abd = Complex64::new(
        0.5 * (m[(0, 2)] + m[(1, 3)]),
        0.5 * (m[(1, 2)] - m[(0, 3)]),
    );
    Ok(SecondMoments {
        aa,
        bb,
        adad: aa.conj(),
        bdbd: bb.conj(),
        abd,
        adb: abd.conj(),
        ada,
        ab,
        bdb,
        adbd: ab.conj(),
    })
}

/// Approximate steady-state logarithmic negativity of the symmetric model,
/// expanded to second order in k_M / Omega.
///
/// Inside the logarithm, `xi = (2 nbar + 1) gamma_m + 4 kappa_G` and the
/// auxiliary combination `eta_aux = gamma_m^2 + 4 gamma_m Gamma + 2 Gamma^2`
/// (named to avoid colliding with the symplectic eigenvalue).
pub fn approx_log_negativity(rates: &SymmetricRates) -> Result<f64> {
    if rates.detuning == 0.0 {
        return Err(Error::ZeroDetuning);
    }
    let g = rates.gamma_m;
    let gg = rates.big_gamma;
    let xi = (2.0 * rates.nbar + 1.0) * g + 4.0 * rates.kappa_g;
    let r = rates.squeeze;
    let alpha_sq = (rates.mode_coupling / rates.detuning).powi(2);

    let leading = (xi + gg * (-2.0 * r).exp()) / (g + gg);

    let correction = if alpha_sq == 0.0 {
        0.0
    } else {
        let eta_aux = g * g + 4.0 * g * gg + 2.0 * gg * gg;
        let pre = gg / (4.0 * (g + gg).powi(3) * (xi + gg * (2.0 * r).cosh()));
        let bracket = gg * (4.0 * xi * xi + g * g + gg * gg)
            + (xi + g).powi(2) * (xi - gg) * r.tanh()
            - (xi - g).powi(2) * (xi + gg) / r.tanh()
            + 2.0 * xi
                * (eta_aux * (2.0 * r).sinh() - 2.0 * g * gg * (-2.0 * r).exp()
                    + 2.0 * gg * gg * (2.0 * r).cosh())
            + gg * (gg * gg * (4.0 * r).cosh() - eta_aux * (-4.0 * r).exp());
        pre * bracket * alpha_sq
    };

    let arg = (leading + correction).max(LOG_ARG_FLOOR);
    Ok((-arg.ln()).max(0.0))
}

/// Coefficient of (k_M/Omega)^2 inside the logarithm of
/// [`approx_log_negativity`], exposed for cross-checks against a finite
/// difference of the exact pipeline.
pub fn coupling_correction_coefficient(rates: &SymmetricRates) -> f64 {
    let g = rates.gamma_m;
    let gg = rates.big_gamma;
    let xi = (2.0 * rates.nbar + 1.0) * g + 4.0 * rates.kappa_g;
    let r = rates.squeeze;
    let eta_aux = g * g + 4.0 * g * gg + 2.0 * gg * gg;
    let pre = gg / (4.0 * (g + gg).powi(3) * (xi + gg * (2.0 * r).cosh()));
    let bracket = gg * (4.0 * xi * xi + g * g + gg * gg)
        + (xi + g).powi(2) * (xi - gg) * r.tanh()
        - (xi - g).powi(2) * (xi + gg) / r.tanh()
        + 2.0 * xi
            * (eta_aux * (2.0 * r).sinh() - 2.0 * g * gg * (-2.0 * r).exp()
                + 2.0 * gg * gg * (2.0 * r).cosh())
        + gg * (gg * gg * (4.0 * r).cosh() - eta_aux * (-4.0 * r).exp());
    pre * bracket
}

/// First-order quantum-classical entanglement gap,
/// 4 kappa_G / [(2 nbar + 1) gamma_m + Gamma e^{-2r}].
pub fn gap_approx(rates: &SymmetricRates) -> f64 {
    let denom =
        (2.0 * rates.nbar + 1.0) * rates.gamma_m + rates.big_gamma * (-2.0 * rates.squeeze).exp();
    4.0 * rates.kappa_g / denom
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn table_like() -> SymmetricRates {
        // Rounded rates of the reference operating point; exact derived
        // values are exercised in the params/models tests.
        SymmetricRates {
            gamma_m: 1.2566e-8,
            big_gamma: 0.7564,
            nbar: 4.167e6,
            kappa_g: 0.0,
            detuning: std::f64::consts::PI,
            mode_coupling: 4.419e-9,
            squeeze: 0.5493,
        }
    }

    #[test]
    fn bare_thermal_limit() {
        let rates = SymmetricRates {
            gamma_m: 0.02,
            big_gamma: 0.0,
            nbar: 3.7,
            kappa_g: 0.0,
            detuning: 1.0,
            mode_coupling: 0.0,
            squeeze: 0.3,
        };
        let m = moments_closed_form(&rates).unwrap();
        assert_relative_eq!(m.ada.re, 3.7, epsilon = 1e-12);
        assert_relative_eq!(m.bdb.re, 3.7, epsilon = 1e-12);
        for z in [m.aa, m.bb, m.ab, m.abd] {
            assert_abs_diff_eq!(z.norm(), 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn no_squeeze_drive_kills_anomalous_moments() {
        let rates = SymmetricRates {
            gamma_m: 0.01,
            big_gamma: 0.6,
            nbar: 2.0,
            kappa_g: 0.03,
            detuning: 2.0,
            mode_coupling: 0.2,
            squeeze: 0.0,
        };
        let m = moments_closed_form(&rates).unwrap();
        assert_abs_diff_eq!(m.ab.norm(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(m.aa.norm(), 0.0, epsilon = 1e-14);
        let g = rates.gamma_m;
        let gg = rates.big_gamma;
        let a = (g + gg).powi(2) + 4.0 * (rates.detuning.powi(2) + rates.mode_coupling.powi(2));
        let d2 = g * (g + 2.0 * gg) * a + 4.0 * gg * gg * rates.detuning.powi(2);
        let expect = (rates.nbar * g + 2.0 * rates.kappa_g)
            * ((g + gg) * a - 4.0 * gg * rates.detuning * rates.mode_coupling)
            / d2;
        assert_relative_eq!(m.ada.re, expect, epsilon = 1e-12);
    }

    #[test]
    fn degenerate_denominator_is_an_error() {
        let rates = SymmetricRates {
            gamma_m: 0.0,
            big_gamma: 0.0,
            nbar: 1.0,
            kappa_g: 0.0,
            detuning: 1.0,
            mode_coupling: 0.0,
            squeeze: 0.1,
        };
        assert!(matches!(moments_closed_form(&rates), Err(Error::DegenerateDenominator)));
    }

    #[test]
    fn conjugate_pairing_holds_everywhere() {
        for (km, kg) in [(0.0, 0.0), (0.3, 0.0), (0.11, 0.07), (1.4, 0.2)] {
            let rates = SymmetricRates {
                gamma_m: 3e-4,
                big_gamma: 0.9,
                nbar: 12.0,
                kappa_g: kg,
                detuning: 2.5,
                mode_coupling: km,
                squeeze: 0.45,
            };
            let m = moments_closed_form(&rates).unwrap();
            assert!(m.conjugation_deviation() < 1e-13 * 12.0);
        }
    }

    #[test]
    fn thermal_moments_map_to_thermal_covariance() {
        let zero = Complex64::new(0.0, 0.0);
        let m = SecondMoments {
            aa: zero,
            bb: zero,
            adad: zero,
            bdbd: zero,
            abd: zero,
            adb: zero,
            ada: Complex64::new(1.8, 0.0),
            ab: zero,
            bdb: Complex64::new(1.8, 0.0),
            adbd: zero,
        };
        let v = moments_to_covariance(&m).unwrap();
        assert_relative_eq!(v.matrix(), &(DMatrix::identity(4, 4) * 2.3), epsilon = 1e-14);
    }

    #[test]
    fn real_pair_correlation_maps_to_xx_pp_antisymmetry() {
        let zero = Complex64::new(0.0, 0.0);
        let s = 0.4;
        let m = SecondMoments {
            aa: zero,
            bb: zero,
            adad: zero,
            bdbd: zero,
            abd: zero,
            adb: zero,
            ada: Complex64::new(1.0, 0.0),
            ab: Complex64::new(s, 0.0),
            bdb: Complex64::new(1.0, 0.0),
            adbd: Complex64::new(s, 0.0),
        };
        let v = moments_to_covariance(&m).unwrap();
        assert_relative_eq!(v.matrix()[(0, 2)], s);
        assert_relative_eq!(v.matrix()[(1, 3)], -s);
        assert_abs_diff_eq!(v.matrix()[(0, 3)], 0.0);
    }

    #[test]
    fn conjugation_violation_is_detected() {
        let zero = Complex64::new(0.0, 0.0);
        let m = SecondMoments {
            aa: Complex64::new(0.5, 0.1),
            bb: zero,
            adad: Complex64::new(0.5, 0.1), // should be the conjugate
            bdbd: zero,
            abd: zero,
            adb: zero,
            ada: Complex64::new(1.0, 0.0),
            ab: zero,
            bdb: Complex64::new(1.0, 0.0),
            adbd: zero,
        };
        assert!(matches!(moments_to_covariance(&m), Err(Error::ConjugationViolation { .. })));
    }

    #[test]
    fn moment_covariance_round_trip() {
        let m = moments_closed_form(&table_like()).unwrap();
        let v = moments_to_covariance(&m).unwrap();
        let back = covariance_to_moments(&v).unwrap();
        for (x, y) in m.as_array().iter().zip(back.as_array().iter()) {
            assert_abs_diff_eq!((x - y).norm(), 0.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn closed_form_moments_match_lyapunov_at_reference_rates() {
        // Both the coupled reference point and its decoupled (k_M = 0)
        // variant, which exercises the purely thermal cross moments.
        let mut decoupled = table_like();
        decoupled.mode_coupling = 0.0;
        for rates in [table_like(), decoupled] {
            let m = moments_closed_form(&rates).unwrap();
            let model = crate::models::effective_two_mode_from_rates(&rates);
            let v = gaussian::steady_state(&gaussian::assemble(&model)).unwrap();
            let numeric = covariance_to_moments(&v).unwrap();
            let scale = m.as_array().iter().map(|z| z.norm()).fold(0.0, f64::max);
            for (x, y) in m.as_array().iter().zip(numeric.as_array().iter()) {
                assert!(
                    (x - y).norm() <= 1e-10 * (x.norm() + scale),
                    "moment mismatch: closed form {x}, solver {y}"
                );
            }
        }
    }

    #[test]
    fn reservoir_engineering_limit_of_the_approximation() {
        // kappa_G = 0, k_M = 0, Gamma >> (2 nbar + 1) gamma_m, large r:
        // E_N -> ln[(gamma + Gamma) / (Gamma e^{-2r})] ~ 2r.
        let rates = SymmetricRates {
            gamma_m: 1e-12,
            big_gamma: 1.0,
            nbar: 10.0,
            kappa_g: 0.0,
            detuning: 10.0,
            mode_coupling: 0.0,
            squeeze: 2.0,
        };
        let en = approx_log_negativity(&rates).unwrap();
        assert_relative_eq!(en, 2.0 * rates.squeeze, max_relative = 1e-6);
    }

    #[test]
    fn approximation_agrees_with_exact_pipeline_at_reference() {
        let rates = table_like();
        let en_approx = approx_log_negativity(&rates).unwrap();
        let model = crate::models::effective_two_mode_from_rates(&rates);
        let v = gaussian::steady_state(&gaussian::assemble(&model)).unwrap();
        let en_exact = gaussian::log_negativity(&v).unwrap();
        assert!(
            (en_approx - en_exact).abs() / en_exact < 0.02,
            "approx {en_approx} vs exact {en_exact}"
        );
    }

    #[test]
    fn zero_detuning_is_an_error() {
        let mut rates = table_like();
        rates.detuning = 0.0;
        assert!(matches!(approx_log_negativity(&rates), Err(Error::ZeroDetuning)));
    }

    /// Finite difference of the exact pipeline in (k_M/Omega)^2 against the
    /// printed correction coefficient. The exact pipeline is authoritative
    /// for this coefficient; the printed bracket must agree within 15%.
    #[test]
    fn coupling_correction_matches_exact_finite_difference() {
        let mut rates = table_like();
        let coeff = coupling_correction_coefficient(&rates);

        let exact_log_arg = |rates: &SymmetricRates| -> f64 {
            let model = crate::models::effective_two_mode_from_rates(rates);
            let v = gaussian::steady_state(&gaussian::assemble(&model)).unwrap();
            (-gaussian::log_negativity(&v).unwrap()).exp()
        };
        rates.mode_coupling = 0.0;
        let base = exact_log_arg(&rates);
        let alpha = 0.02;
        rates.mode_coupling = alpha * rates.detuning;
        let shifted = exact_log_arg(&rates);
        let fd = (shifted - base) / (alpha * alpha);

        assert!(
            (coeff - fd).abs() / fd.abs() < 0.15,
            "bracket coefficient {coeff} vs exact finite difference {fd}"
        );
    }

    /// As Omega/gamma_m grows the X-P cross covariance of each oscillator
    /// dies out; at the reference operating point pushed to
    /// Omega/gamma_m = 1e9 it must sit below 1e-6.
    #[test]
    fn cross_terms_vanish_at_large_detuning() {
        let mut rates = table_like();
        rates.gamma_m = rates.detuning / 1e9;
        let v = moments_to_covariance(&moments_closed_form(&rates).unwrap()).unwrap();
        assert!(v.matrix()[(0, 1)].abs() < 1e-6, "X_a P_a cross term {}", v.matrix()[(0, 1)]);
        assert!(v.matrix()[(2, 3)].abs() < 1e-6, "X_b P_b cross term {}", v.matrix()[(2, 3)]);
    }

    #[test]
    fn asymmetric_damping_is_rejected() {
        let mut cfg = crate::config::paper_defaults();
        cfg.mech_damping_b *= 2.0;
        let p = crate::params::derive(&cfg, &crate::params::GravityModel::Quantum).unwrap();
        assert!(matches!(
            SymmetricRates::from_derived(&p),
            Err(Error::AsymmetricRates { .. })
        ));
    }

    #[test]
    fn gap_formula_basics() {
        let mut rates = table_like();
        rates.kappa_g = 0.0;
        assert_eq!(gap_approx(&rates), 0.0);

        rates.kappa_g = 4.419e-9;
        let g1 = gap_approx(&rates);
        let mut halved = rates;
        halved.gamma_m *= 0.5;
        halved.big_gamma *= 0.5;
        assert_relative_eq!(gap_approx(&halved), 2.0 * g1, epsilon = 1e-12);
    }
}
