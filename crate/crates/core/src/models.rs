//! Builders that turn derived parameters into concrete quadratic models:
//! the bare measurement-feedback pair, the three-mode linearized system, and
//! the effective two-mode system obtained after adiabatic elimination of the
//! cavity.

use num_complex::Complex64;

use crate::closedform::SymmetricRates;
use crate::error::Result;
use crate::gaussian::{mode_operator, HamiltonianBuilder, LadderTerm, QuadraticModel};
use crate::params::{gravity_dissipation_rates, DerivedParams, GravityModel};

/// Which master equation a model realizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    /// Two bare oscillators with position-coupled gravity and, classically,
    /// measurement back-action plus feedback noise (lab frame).
    KtmBare,
    /// Mechanical pair plus cavity mode in the rotating frame.
    ThreeModeLinearized,
    /// Mechanical pair after adiabatic elimination of the cavity.
    EffectiveTwoMode,
}

fn thermal_pair(n_modes: usize, mode: usize, gamma: f64, nbar: f64) -> [nalgebra::DVector<Complex64>; 2] {
    [
        mode_operator(n_modes, &[LadderTerm::lowering(mode, (gamma * (nbar + 1.0)).sqrt())]),
        mode_operator(n_modes, &[LadderTerm::raising(mode, (gamma * nbar).sqrt())]),
    ]
}

/// The four split dissipators of the classical gravity channel,
/// sqrt(2 kappa_G,k) {a_k, a_k^dagger} on each mode.
fn classical_gravity_ops(
    n_modes: usize,
    modes: [usize; 2],
    kappa: [f64; 2],
    ops: &mut Vec<nalgebra::DVector<Complex64>>,
) {
    for (mode, k) in modes.into_iter().zip(kappa) {
        let amp = (2.0 * k).sqrt();
        ops.push(mode_operator(n_modes, &[LadderTerm::lowering(mode, amp)]));
        ops.push(mode_operator(n_modes, &[LadderTerm::raising(mode, amp)]));
    }
}

/// Effective two-mode model: H = Omega (a^d a - b^d b) + k_M (a^d b + a b^d),
/// per-mode thermal contact, the collective Bogoliubov dissipator
/// sqrt(Gamma) (beta_1 + beta_2), and the classical gravity channel when the
/// gravity model is not quantum.
///
/// The Bogoliubov channel is built in the gauge where the sideband
/// amplitudes are real and positive (a local phase rotation of the modes
/// that leaves the negativity untouched).
pub fn effective_two_mode(p: &DerivedParams, gravity: &GravityModel) -> Result<QuadraticModel> {
    let cfg = &p.config;
    let g = HamiltonianBuilder::new(2)
        .number(0, p.half_detuning)
        .number(1, -p.half_detuning)
        .beam_splitter(0, 1, Complex64::new(p.total_rate, 0.0))
        .build();

    let mut ops = Vec::with_capacity(9);
    ops.extend(thermal_pair(2, 0, cfg.mech_damping_a, p.thermal_occupancy));
    ops.extend(thermal_pair(2, 1, cfg.mech_damping_b, p.thermal_occupancy));

    let amp = p.om_damping.sqrt();
    let (ch, sh) = (p.squeeze_param.cosh(), p.squeeze_param.sinh());
    ops.push(mode_operator(
        2,
        &[
            LadderTerm::lowering(0, amp * ch),
            LadderTerm::raising(1, amp * sh),
            LadderTerm::lowering(1, amp * ch),
            LadderTerm::raising(0, amp * sh),
        ],
    ));

    if !matches!(gravity, GravityModel::Quantum) {
        let (ka, kb) = gravity_dissipation_rates(
            gravity,
            p.grav_gradient,
            cfg.sphere_mass,
            p.shifted_freq_a,
            p.shifted_freq_b,
        )?;
        classical_gravity_ops(2, [0, 1], [ka, kb], &mut ops);
    }

    QuadraticModel::new(2, g, ops)
}

/// Effective two-mode model straight from symmetric rates; the gravity
/// channel is included whenever `rates.kappa_g > 0`. This is the entry point
/// the analytic oracles are checked against.
pub fn effective_two_mode_from_rates(rates: &SymmetricRates) -> QuadraticModel {
    let g = HamiltonianBuilder::new(2)
        .number(0, rates.detuning)
        .number(1, -rates.detuning)
        .beam_splitter(0, 1, Complex64::new(rates.mode_coupling, 0.0))
        .build();

    let mut ops = Vec::with_capacity(9);
    ops.extend(thermal_pair(2, 0, rates.gamma_m, rates.nbar));
    ops.extend(thermal_pair(2, 1, rates.gamma_m, rates.nbar));

    let amp = rates.big_gamma.sqrt();
    let (ch, sh) = (rates.squeeze.cosh(), rates.squeeze.sinh());
    ops.push(mode_operator(
        2,
        &[
            LadderTerm::lowering(0, amp * ch),
            LadderTerm::raising(1, amp * sh),
            LadderTerm::lowering(1, amp * ch),
            LadderTerm::raising(0, amp * sh),
        ],
    ));

    if rates.kappa_g > 0.0 {
        classical_gravity_ops(2, [0, 1], [rates.kappa_g, rates.kappa_g], &mut ops);
    }

    QuadraticModel::new(2, g, ops).expect("builder output is well formed")
}

/// Three-mode rotating-frame model with the cavity mode kept explicit:
///
/// ```text
/// H = Omega (a^d a - b^d b) + k_M (a^d b + b^d a)
///     + g_a [(c-_bar a + c+_bar a^d) c0^d + h.c.]
///     + g_b [(c-_bar b + c+_bar b^d) c0^d + h.c.]
/// ```
///
/// with thermal contact on the mechanics, sqrt(kappa) c0 on the cavity, and
/// the classical gravity channel when applicable. Mode order: (a, b, c0).
pub fn three_mode_linearized(p: &DerivedParams, gravity: &GravityModel) -> Result<QuadraticModel> {
    let cfg = &p.config;
    let c_plus = p.sideband_amp_plus;
    let c_minus = p.sideband_amp_minus;
    let ga = cfg.single_photon_coupling_a;
    let gb = cfg.single_photon_coupling_b;

    let g = HamiltonianBuilder::new(3)
        .number(0, p.half_detuning)
        .number(1, -p.half_detuning)
        .beam_splitter(0, 1, Complex64::new(p.total_rate, 0.0))
        // g (c-_bar a) c0^d + h.c. is a beam splitter between the cavity and
        // each oscillator; g (c+_bar a^d) c0^d + h.c. is a two-mode squeeze.
        .beam_splitter(2, 0, c_minus * ga)
        .two_mode_squeeze(0, 2, c_plus * ga)
        .beam_splitter(2, 1, c_minus * gb)
        .two_mode_squeeze(1, 2, c_plus * gb)
        .build();

    let mut ops = Vec::with_capacity(10);
    ops.extend(thermal_pair(3, 0, cfg.mech_damping_a, p.thermal_occupancy));
    ops.extend(thermal_pair(3, 1, cfg.mech_damping_b, p.thermal_occupancy));
    ops.push(mode_operator(3, &[LadderTerm::lowering(2, cfg.cavity_decay.sqrt())]));

    if !matches!(gravity, GravityModel::Quantum) {
        let (ka, kb) = gravity_dissipation_rates(
            gravity,
            p.grav_gradient,
            cfg.sphere_mass,
            p.shifted_freq_a,
            p.shifted_freq_b,
        )?;
        classical_gravity_ops(3, [0, 1], [ka, kb], &mut ops);
    }

    QuadraticModel::new(3, g, ops)
}

/// Bare lab-frame pair,
/// H = omega'_a a^d a + omega'_b b^d b + k_G (a^d + a)(b^d + b).
/// No thermal contact is added here; callers append it when needed. With
/// `quantum = false` the continuous measurement and its feedback add
/// position dephasing on each mode, realized as quadrature operators
/// proportional to (a + a^dagger) whose rates sum to 2 kappa_G,k per mode.
pub fn ktm_bare(
    p: &DerivedParams,
    meas_rate_a: f64,
    meas_rate_b: f64,
    quantum: bool,
) -> Result<QuadraticModel> {
    let cfg = &p.config;
    let g = HamiltonianBuilder::new(2)
        .number(0, p.shifted_freq_a)
        .number(1, p.shifted_freq_b)
        .position_coupling(0, 1, p.grav_rate)
        .build();

    let mut ops = Vec::new();
    if !quantum {
        let gravity = GravityModel::ClassicalKtm { meas_rate_a, meas_rate_b };
        let (ka, kb) = gravity_dissipation_rates(
            &gravity,
            p.grav_gradient,
            cfg.sphere_mass,
            p.shifted_freq_a,
            p.shifted_freq_b,
        )?;
        // Split each mode's channel into its measurement back-action part
        // (rate 2 Gamma_k l_k^2 / hbar) and feedback-noise part
        // (rate K_G^2 l_k^2 / (2 hbar Gamma_j)); they sum to 2 kappa_G,k.
        for (mode, (kappa_total, meas_self, meas_other)) in [
            (0usize, (ka, meas_rate_a, meas_rate_b)),
            (1usize, (kb, meas_rate_a, meas_rate_b)),
        ] {
            let meas_fraction =
                meas_self / (meas_self + p.grav_gradient * p.grav_gradient / (4.0 * meas_other));
            let meas_rate = 2.0 * kappa_total * meas_fraction;
            let feedback_rate = 2.0 * kappa_total * (1.0 - meas_fraction);
            for rate in [meas_rate, feedback_rate] {
                let amp = rate.sqrt();
                ops.push(mode_operator(
                    2,
                    &[LadderTerm::lowering(mode, amp), LadderTerm::raising(mode, amp)],
                ));
            }
        }
    }

    QuadraticModel::new(2, g, ops)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closedform;
    use crate::config;
    use crate::gaussian::{self, assemble, log_negativity, steady_state};
    use crate::params::{derive, optimal_measurement_rate};
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use nalgebra::DMatrix;

    fn defaults_quantum() -> DerivedParams {
        derive(&config::paper_defaults(), &GravityModel::Quantum).unwrap()
    }

    #[test]
    fn decoupled_thermal_pair_is_separable() {
        let rates = SymmetricRates {
            gamma_m: 0.05,
            big_gamma: 0.0,
            nbar: 1.7,
            kappa_g: 0.0,
            detuning: 1.0,
            mode_coupling: 0.0,
            squeeze: 0.0,
        };
        let model = effective_two_mode_from_rates(&rates);
        let v = steady_state(&assemble(&model)).unwrap();
        let expect = DMatrix::<f64>::identity(4, 4) * 2.2;
        assert_relative_eq!(v.matrix(), &expect, max_relative = 1e-10);
        assert_eq!(log_negativity(&v).unwrap(), 0.0);
    }

    #[test]
    fn effective_model_matches_approximate_negativity_at_reference() {
        let p = defaults_quantum();
        let model = effective_two_mode(&p, &GravityModel::Quantum).unwrap();
        let v = steady_state(&assemble(&model)).unwrap();
        let exact = log_negativity(&v).unwrap();
        let mut rates = SymmetricRates::from_derived(&p).unwrap();
        rates.kappa_g = 0.0;
        let approx = closedform::approx_log_negativity(&rates).unwrap();
        assert!(
            (exact - approx).abs() / exact < 0.02,
            "exact {exact} vs approximate {approx}"
        );
    }

    #[test]
    fn classical_gravity_strictly_reduces_entanglement() {
        let cfg = config::paper_defaults();
        let p_q = derive(&cfg, &GravityModel::Quantum).unwrap();
        let p_c = derive(&cfg, &GravityModel::ClassicalOptimal).unwrap();

        let v_q = steady_state(&assemble(
            &effective_two_mode(&p_q, &GravityModel::Quantum).unwrap(),
        ))
        .unwrap();
        let v_c = steady_state(&assemble(
            &effective_two_mode(&p_c, &GravityModel::ClassicalOptimal).unwrap(),
        ))
        .unwrap();
        let en_q = log_negativity(&v_q).unwrap();
        let en_c = log_negativity(&v_c).unwrap();
        assert!(en_c < en_q);

        let rates = SymmetricRates::from_derived(&p_c).unwrap();
        let gap = en_q - en_c;
        let gap_formula = closedform::gap_approx(&rates);
        assert!(
            (gap - gap_formula).abs() / gap_formula < 0.05,
            "gap {gap} vs first-order formula {gap_formula}"
        );
    }

    #[test]
    fn cavity_decouples_at_zero_coupling() {
        let mut cfg = config::paper_defaults();
        cfg.single_photon_coupling_a = 0.0;
        cfg.single_photon_coupling_b = 0.0;
        let p = derive(&cfg, &GravityModel::Quantum).unwrap();
        let three = three_mode_linearized(&p, &GravityModel::Quantum).unwrap();
        let v3 = steady_state(&assemble(&three)).unwrap();
        let reduced = v3.reduce(&[0, 1]);

        let mut rates = SymmetricRates::from_derived(&p).unwrap();
        rates.big_gamma = 0.0;
        let two = effective_two_mode_from_rates(&rates);
        let v2 = steady_state(&assemble(&two)).unwrap();
        assert_relative_eq!(reduced.matrix(), v2.matrix(), max_relative = 1e-9);
    }

    #[test]
    fn adiabatic_elimination_agrees_at_reference_point() {
        let p = defaults_quantum();
        let two = effective_two_mode(&p, &GravityModel::Quantum).unwrap();
        let three = three_mode_linearized(&p, &GravityModel::Quantum).unwrap();
        let en2 = log_negativity(&steady_state(&assemble(&two)).unwrap()).unwrap();
        let en3 =
            log_negativity(&steady_state(&assemble(&three)).unwrap().reduce(&[0, 1])).unwrap();
        assert!((en3 - en2).abs() / en2 < 0.05, "two-mode {en2} vs three-mode {en3}");
    }

    /// Enlarging kappa at fixed script-G (pumps rescaled to keep the
    /// sideband amplitudes) shrinks the adiabatic-elimination error.
    #[test]
    fn adiabatic_error_decreases_with_cavity_decay() {
        let base = config::paper_defaults();
        let mut errors = Vec::new();
        for factor in [1.0, 3.16, 10.0] {
            let mut cfg = base.clone();
            cfg.cavity_decay = base.cavity_decay * factor;
            // Hold |c_bar| fixed: E scales with |(+-i omega_m - kappa/2)|.
            let p0 = derive(&base, &GravityModel::Quantum).unwrap();
            let scale = |kappa: f64| {
                (p0.center_freq * p0.center_freq + kappa * kappa / 4.0).sqrt()
            };
            let rescale = scale(cfg.cavity_decay) / scale(base.cavity_decay);
            cfg.pump_amp_plus = base.pump_amp_plus * rescale;
            cfg.pump_amp_minus = base.pump_amp_minus * rescale;

            let p = derive(&cfg, &GravityModel::Quantum).unwrap();
            assert_relative_eq!(p.eff_coupling, p0.eff_coupling, max_relative = 1e-12);

            let two = effective_two_mode(&p, &GravityModel::Quantum).unwrap();
            let three = three_mode_linearized(&p, &GravityModel::Quantum).unwrap();
            let en2 = log_negativity(&steady_state(&assemble(&two)).unwrap()).unwrap();
            let en3 = log_negativity(&steady_state(&assemble(&three)).unwrap().reduce(&[0, 1]))
                .unwrap();
            errors.push((en3 - en2).abs());
        }
        assert!(
            errors[0] > errors[1] && errors[1] > errors[2],
            "adiabatic errors not monotone: {errors:?}"
        );
    }

    #[test]
    fn operator_counts_follow_the_gravity_model() {
        let cfg = config::paper_defaults();
        let p_q = derive(&cfg, &GravityModel::Quantum).unwrap();
        let p_c = derive(&cfg, &GravityModel::ClassicalOptimal).unwrap();
        // Two-mode: four thermal operators plus the collective channel;
        // classical gravity adds four more.
        let two_q = effective_two_mode(&p_q, &GravityModel::Quantum).unwrap();
        let two_c = effective_two_mode(&p_c, &GravityModel::ClassicalOptimal).unwrap();
        assert_eq!(two_q.lindblad_ops().len(), 5);
        assert_eq!(two_c.lindblad_ops().len(), 9);
        // Three-mode: the collective channel is replaced by cavity decay.
        let three_q = three_mode_linearized(&p_q, &GravityModel::Quantum).unwrap();
        let three_c = three_mode_linearized(&p_c, &GravityModel::ClassicalOptimal).unwrap();
        assert_eq!(three_q.lindblad_ops().len(), 5);
        assert_eq!(three_c.lindblad_ops().len(), 9);
    }

    #[test]
    fn gravity_channel_is_the_only_difference_between_models() {
        let cfg = config::paper_defaults();
        let p = derive(&cfg, &GravityModel::ClassicalOptimal).unwrap();
        let quantum = effective_two_mode(&p, &GravityModel::Quantum).unwrap();
        let classical = effective_two_mode(&p, &GravityModel::ClassicalOptimal).unwrap();
        assert_eq!(quantum.hamiltonian(), classical.hamiltonian());
        assert_eq!(quantum.lindblad_ops().len() + 4, classical.lindblad_ops().len());
        for (a, b) in quantum.lindblad_ops().iter().zip(classical.lindblad_ops()) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn ktm_at_optimum_equals_classical_optimal_field_by_field() {
        let cfg = config::paper_defaults();
        let p = derive(&cfg, &GravityModel::ClassicalOptimal).unwrap();
        let gamma_opt = 0.5 * p.grav_gradient;
        let p_ktm = derive(
            &cfg,
            &GravityModel::ClassicalKtm { meas_rate_a: gamma_opt, meas_rate_b: gamma_opt },
        )
        .unwrap();
        let a = effective_two_mode(&p, &GravityModel::ClassicalOptimal).unwrap();
        let b = effective_two_mode(
            &p_ktm,
            &GravityModel::ClassicalKtm { meas_rate_a: gamma_opt, meas_rate_b: gamma_opt },
        )
        .unwrap();
        assert_eq!(a.hamiltonian(), b.hamiltonian());
        assert_eq!(a.lindblad_ops().len(), b.lindblad_ops().len());
        for (x, y) in a.lindblad_ops().iter().zip(b.lindblad_ops()) {
            assert_relative_eq!(
                (x - y).norm(),
                0.0,
                epsilon = 1e-15 * x.norm().max(1e-30)
            );
        }
    }

    #[test]
    fn bare_pair_without_measurement_is_a_closed_rotation() {
        let p = defaults_quantum();
        let model = ktm_bare(&p, 0.0, 0.0, true).unwrap();
        assert!(model.lindblad_ops().is_empty());
        let dd = assemble(&model);
        assert_abs_diff_eq!(dd.diffusion.norm(), 0.0, epsilon = 1e-14);
        let max_re = dd
            .drift
            .clone()
            .complex_eigenvalues()
            .iter()
            .map(|l| l.re.abs())
            .fold(0.0, f64::max);
        assert!(max_re < 1e-9 * dd.drift.norm(), "drift is not a pure rotation");
        assert!(matches!(
            steady_state(&dd),
            Err(crate::error::Error::NotStable { .. })
        ));
    }

    /// Total dephasing rate per mode, from the operator amplitudes:
    /// each op is sqrt(rate)(a + a^d) with squared norm 2 * rate.
    fn dephasing_rate(model: &QuadraticModel, mode: usize) -> f64 {
        model
            .lindblad_ops()
            .iter()
            .map(|c| {
                let x = c[2 * mode];
                let p = c[2 * mode + 1];
                0.5 * (x.norm_sqr() + p.norm_sqr())
            })
            .sum()
    }

    #[test]
    fn optimal_measurement_reaches_twice_the_dissipation_floor() {
        let p = defaults_quantum();
        let gamma_opt = 0.5 * p.grav_gradient;
        let model = ktm_bare(&p, gamma_opt, gamma_opt, false).unwrap();
        assert_eq!(model.lindblad_ops().len(), 4);
        let (_, floor_a) = optimal_measurement_rate(
            p.grav_gradient,
            p.config.sphere_mass,
            p.shifted_freq_a,
        );
        assert_relative_eq!(dephasing_rate(&model, 0), 2.0 * floor_a, max_relative = 1e-12);
        let (_, floor_b) = optimal_measurement_rate(
            p.grav_gradient,
            p.config.sphere_mass,
            p.shifted_freq_b,
        );
        assert_relative_eq!(dephasing_rate(&model, 1), 2.0 * floor_b, max_relative = 1e-12);
    }

    /// Off-optimum measurement rates always add more dephasing than the
    /// optimum, checked on a grid around Gamma = 5 K_G.
    #[test]
    fn off_optimum_measurement_adds_excess_noise() {
        let p = defaults_quantum();
        let gamma_opt = 0.5 * p.grav_gradient;
        let opt_model = ktm_bare(&p, gamma_opt, gamma_opt, false).unwrap();
        let opt_rate = dephasing_rate(&opt_model, 0);
        for factor in [0.3, 0.7, 1.0, 3.0, 10.0] {
            let gamma = 5.0 * p.grav_gradient * factor;
            let model = ktm_bare(&p, gamma, gamma, false).unwrap();
            let rate = dephasing_rate(&model, 0);
            assert!(
                rate > opt_rate * (1.0 + 1e-12),
                "rate {rate} at {factor} x (5 K_G) does not exceed optimum {opt_rate}"
            );
        }
    }

    #[test]
    fn caller_supplied_thermal_contact_can_be_appended() {
        let p = defaults_quantum();
        let mut model = ktm_bare(&p, 0.0, 0.0, true).unwrap();
        let gamma = 1e-3;
        model
            .push_lindblad(mode_operator(
                2,
                &[LadderTerm::lowering(0, (gamma * 1.5f64).sqrt())],
            ))
            .unwrap();
        assert_eq!(model.lindblad_ops().len(), 1);
        let bad = mode_operator(3, &[LadderTerm::lowering(2, 1.0)]);
        assert!(model.push_lindblad(bad).is_err());
    }

    #[test]
    fn gaussian_physicality_holds_for_assembled_models() {
        let p = defaults_quantum();
        for gravity in [GravityModel::Quantum, GravityModel::ClassicalOptimal] {
            let model = effective_two_mode(&p, &gravity).unwrap();
            let v = steady_state(&assemble(&model)).unwrap();
            v.check_physical(gaussian::PHYSICALITY_TOL).unwrap();
        }
    }
}
