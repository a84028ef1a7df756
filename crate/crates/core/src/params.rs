//! Physical and derived parameters.
//!
//! Every frequency-like quantity is stored internally as an angular rate in
//! rad/s. Config files carry explicit unit suffixes: `_hz` fields are
//! multiplied by 2*pi on ingest, `_rads` fields are taken verbatim (see
//! `configs/paper_defaults.toml` for the canonical schema). The pump
//! amplitudes are ingested in rad/s because only that reading makes the
//! reference sideband amplitudes and damping rates mutually consistent; the
//! README documents this convention.

use num_complex::Complex64;

use crate::constants::{BOLTZMANN, HBAR, NEWTON_G};
use crate::error::{Error, Result};

/// Raw experimental parameters. Rates in rad/s, SI units otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalConfig {
    /// Sphere mass M, kg.
    pub sphere_mass: f64,
    /// Sphere radius, m.
    pub sphere_radius: f64,
    /// Center-to-center equilibrium distance d, m.
    pub center_distance: f64,
    /// Mass density rho, kg/m^3.
    pub density: f64,
    /// Geometry form factor Lambda (pi/3 for near-contact spheres).
    pub form_factor: f64,
    /// Bare mechanical frequencies, rad/s.
    pub mech_freq_a: f64,
    pub mech_freq_b: f64,
    /// Mechanical damping rates gamma, rad/s.
    pub mech_damping_a: f64,
    pub mech_damping_b: f64,
    /// Cavity decay rate kappa, rad/s.
    pub cavity_decay: f64,
    /// Single-photon optomechanical couplings g, rad/s.
    pub single_photon_coupling_a: f64,
    pub single_photon_coupling_b: f64,
    /// Pump amplitude magnitudes |E+|, |E-|, rad/s.
    pub pump_amp_plus: f64,
    pub pump_amp_minus: f64,
    /// Explicit pump phases in radians; `None` picks the gauge in which the
    /// steady sideband amplitudes come out real and positive.
    pub pump_phase_plus: Option<f64>,
    pub pump_phase_minus: Option<f64>,
    /// Environment temperature T, K.
    pub temperature: f64,
    /// Non-gravitational cross gradient K_others, N/m.
    pub nongrav_gradient: f64,
}

impl PhysicalConfig {
    /// Checks the static invariants that do not depend on a gravity model.
    pub fn validate(&self) -> Result<()> {
        let positive: [(&str, f64); 6] = [
            ("sphere_mass", self.sphere_mass),
            ("sphere_radius", self.sphere_radius),
            ("center_distance", self.center_distance),
            ("density", self.density),
            ("temperature", self.temperature),
            ("cavity_decay", self.cavity_decay),
        ];
        for (name, v) in positive {
            if v.is_nan() || v <= 0.0 {
                return Err(Error::Config(format!("{name} must be strictly positive, got {v}")));
            }
        }
        // Touching spheres (d = 2r) are allowed: that is the near-contact
        // configuration the pi/3 form factor describes.
        if self.center_distance < 2.0 * self.sphere_radius {
            return Err(Error::Config(format!(
                "spheres overlap: center distance {} < diameter {}",
                self.center_distance,
                2.0 * self.sphere_radius
            )));
        }
        if self.mech_damping_a < 0.0 || self.mech_damping_b < 0.0 {
            return Err(Error::Config("mechanical damping rates must be nonnegative".into()));
        }
        if self.mech_freq_a <= 0.0 || self.mech_freq_b <= 0.0 {
            return Err(Error::Config("mechanical frequencies must be strictly positive".into()));
        }
        if self.pump_amp_plus < 0.0 || self.pump_amp_minus < 0.0 {
            return Err(Error::Config("pump amplitude magnitudes must be nonnegative".into()));
        }
        Ok(())
    }
}

/// Which gravity model supplies the extra dissipation channels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GravityModel {
    /// Coherent gravitational coupling only; no added dissipation.
    Quantum,
    /// Continuous measurement plus feedback with explicit per-mode
    /// measurement rates (N/m).
    ClassicalKtm { meas_rate_a: f64, meas_rate_b: f64 },
    /// Measurement-feedback model at its optimum, Gamma_a = Gamma_b = K_G/2.
    ClassicalOptimal,
}

/// Everything `derive` computes from a config and a gravity model.
#[derive(Debug, Clone)]
pub struct DerivedParams {
    /// The source configuration, kept so model builders only need one handle.
    pub config: PhysicalConfig,
    /// Gravity model this parameter set was derived under.
    pub gravity: GravityModel,
    /// Gravitational cross gradient K_G = 2 G M^2 / d^3, N/m.
    pub grav_gradient: f64,
    /// Total cross gradient K_M = K_G + K_others, N/m.
    pub total_gradient: f64,
    /// Gradient-corrected frequencies omega' = sqrt(omega^2 - K_M/M), rad/s.
    pub shifted_freq_a: f64,
    pub shifted_freq_b: f64,
    /// Central frequency omega_m = (omega'_a + omega'_b)/2, rad/s.
    pub center_freq: f64,
    /// Half-detuning Omega = (omega'_a - omega'_b)/2, rad/s.
    pub half_detuning: f64,
    /// Zero-point spreads sqrt(hbar / 2 M omega'), m.
    pub x_zpf_a: f64,
    pub x_zpf_b: f64,
    /// Gravitational coupling rate k_G, rad/s.
    pub grav_rate: f64,
    /// Total coupling rate k_M, rad/s.
    pub total_rate: f64,
    /// Thermal occupation at omega_m.
    pub thermal_occupancy: f64,
    /// Steady sideband amplitudes c_+- = i E_+- / (+-i omega_m - kappa/2).
    pub sideband_amp_plus: Complex64,
    pub sideband_amp_minus: Complex64,
    /// Many-photon coupling magnitudes G_+- = |(g_a + g_b) c_+- / 2|, rad/s.
    pub manyphoton_plus: f64,
    pub manyphoton_minus: f64,
    /// Bogoliubov squeeze parameter r = atanh(G_+/G_-).
    pub squeeze_param: f64,
    /// Effective coupling script-G = sqrt(G_-^2 - G_+^2), rad/s.
    pub eff_coupling: f64,
    /// Engineered-reservoir damping Gamma = 4 script-G^2 / kappa, rad/s.
    pub om_damping: f64,
    /// Per-mode gravity dissipation rates kappa_G (zero for quantum), rad/s.
    pub grav_dissipation_a: f64,
    pub grav_dissipation_b: f64,
    /// Symmetrized kappa_G (geometric mean of the per-mode rates), rad/s.
    pub grav_dissipation: f64,
}

/// Bose occupation 1/(exp(hbar omega / k_B T) - 1); exactly 0 at T = 0.
pub fn thermal_occupation(omega: f64, temperature: f64) -> f64 {
    assert!(omega > 0.0, "thermal occupation needs omega > 0");
    assert!(temperature >= 0.0, "negative temperature");
    if temperature == 0.0 {
        return 0.0;
    }
    let x = HBAR * omega / (BOLTZMANN * temperature);
    1.0 / x.exp_m1()
}

/// Cross gradient of the Newtonian potential between two spheres of mass
/// `mass` at center distance `distance`: 2 G M^2 / d^3, N/m.
pub fn gravitational_gradient(mass: f64, distance: f64) -> f64 {
    assert!(distance > 0.0, "gravitational gradient needs d > 0");
    2.0 * NEWTON_G * mass * mass / distance.powi(3)
}

/// Converts a force cross-gradient (N/m) between the oscillators into a
/// mode-coupling rate (rad/s): K / (M sqrt(omega_a omega_b)).
pub fn gradient_to_rate(gradient: f64, mass: f64, omega_a: f64, omega_b: f64) -> f64 {
    gradient / (mass * (omega_a * omega_b).sqrt())
}

/// Optimal measurement rate of the feedback model and the dissipation floor
/// it implies for a mode of the given mass and frequency.
///
/// Returns `(gamma_opt, kappa_g_min)` with gamma_opt = K_G/2 (N/m) and
/// kappa_g_min the per-mode dissipation rate at that optimum (rad/s).
pub fn optimal_measurement_rate(grav_gradient: f64, mass: f64, omega: f64) -> (f64, f64) {
    assert!(grav_gradient > 0.0, "optimal measurement rate needs K_G > 0");
    (0.5 * grav_gradient, gradient_to_rate(grav_gradient, mass, omega, omega))
}

/// Dissipation added by one measured-and-fed-back mode: the measurement
/// back-action grows with the rate while the feedback noise shrinks, giving
/// kappa_G = (Gamma_self + K_G^2 / (4 Gamma_other)) / (M omega').
pub fn ktm_dissipation_rate(
    meas_rate_self: f64,
    meas_rate_other: f64,
    grav_gradient: f64,
    mass: f64,
    omega: f64,
) -> Result<f64> {
    if meas_rate_self <= 0.0 || meas_rate_other <= 0.0 {
        return Err(Error::NonpositiveMeasurementRate {
            rate: meas_rate_self.min(meas_rate_other),
        });
    }
    let effective = meas_rate_self + grav_gradient * grav_gradient / (4.0 * meas_rate_other);
    Ok(gradient_to_rate(effective, mass, omega, omega))
}

/// Per-mode gravity dissipation rates (kappa_G,a, kappa_G,b) for a gravity
/// model, given the gravitational gradient and the corrected frequencies.
pub fn gravity_dissipation_rates(
    gravity: &GravityModel,
    grav_gradient: f64,
    mass: f64,
    omega_a: f64,
    omega_b: f64,
) -> Result<(f64, f64)> {
    match gravity {
        GravityModel::Quantum => Ok((0.0, 0.0)),
        GravityModel::ClassicalOptimal => Ok((
            gradient_to_rate(grav_gradient, mass, omega_a, omega_a),
            gradient_to_rate(grav_gradient, mass, omega_b, omega_b),
        )),
        GravityModel::ClassicalKtm { meas_rate_a, meas_rate_b } => Ok((
            ktm_dissipation_rate(*meas_rate_a, *meas_rate_b, grav_gradient, mass, omega_a)?,
            ktm_dissipation_rate(*meas_rate_b, *meas_rate_a, grav_gradient, mass, omega_b)?,
        )),
    }
}

/// Maximum mechanical damping compatible with gravitational entanglement in
/// a thermal environment, gamma_max = hbar G Lambda rho / (2 k_B T), and the
/// corresponding quality-factor threshold omega_m / gamma_max.
pub fn decoherence_threshold(
    density: f64,
    form_factor: f64,
    temperature: f64,
    omega_m: f64,
) -> (f64, f64) {
    assert!(density > 0.0 && form_factor > 0.0 && temperature > 0.0 && omega_m > 0.0);
    let gamma_max = HBAR * NEWTON_G * form_factor * density / (2.0 * BOLTZMANN * temperature);
    (gamma_max, omega_m / gamma_max)
}

fn shifted_frequency(omega: f64, total_gradient: f64, mass: f64) -> Result<f64> {
    let omega_sq = omega * omega - total_gradient / mass;
    if omega_sq <= 0.0 {
        return Err(Error::ImaginaryFrequency { omega_sq });
    }
    Ok(omega_sq.sqrt())
}

/// Computes every derived rate and coupling from a config under a gravity
/// model. Pure: equal inputs give bitwise-equal outputs.
pub fn derive(config: &PhysicalConfig, gravity: &GravityModel) -> Result<DerivedParams> {
    config.validate()?;
    if config.pump_amp_plus >= config.pump_amp_minus {
        return Err(Error::UnstablePump {
            plus: config.pump_amp_plus,
            minus: config.pump_amp_minus,
        });
    }

    let mass = config.sphere_mass;
    let grav_gradient = gravitational_gradient(mass, config.center_distance);
    let total_gradient = grav_gradient + config.nongrav_gradient;

    let shifted_a = shifted_frequency(config.mech_freq_a, total_gradient, mass)?;
    let shifted_b = shifted_frequency(config.mech_freq_b, total_gradient, mass)?;
    let center_freq = 0.5 * (shifted_a + shifted_b);
    let half_detuning = 0.5 * (shifted_a - shifted_b);

    let x_zpf_a = (HBAR / (2.0 * mass * shifted_a)).sqrt();
    let x_zpf_b = (HBAR / (2.0 * mass * shifted_b)).sqrt();

    let grav_rate = gradient_to_rate(grav_gradient, mass, shifted_a, shifted_b);
    let total_rate = gradient_to_rate(total_gradient, mass, shifted_a, shifted_b);

    let thermal_occupancy = thermal_occupation(center_freq, config.temperature);

    let kappa = config.cavity_decay;
    let i = Complex64::i();
    let denom_plus = Complex64::new(-kappa / 2.0, center_freq);
    let denom_minus = Complex64::new(-kappa / 2.0, -center_freq);
    // Default gauge: phases such that the sideband amplitudes are real and
    // positive.
    let pump_plus = match config.pump_phase_plus {
        Some(phi) => Complex64::from_polar(config.pump_amp_plus, phi),
        None => denom_plus / i * (config.pump_amp_plus / denom_plus.norm()),
    };
    let pump_minus = match config.pump_phase_minus {
        Some(phi) => Complex64::from_polar(config.pump_amp_minus, phi),
        None => denom_minus / i * (config.pump_amp_minus / denom_minus.norm()),
    };
    let sideband_amp_plus = i * pump_plus / denom_plus;
    let sideband_amp_minus = i * pump_minus / denom_minus;

    let g_sum = 0.5 * (config.single_photon_coupling_a + config.single_photon_coupling_b);
    let manyphoton_plus = (g_sum * sideband_amp_plus).norm();
    let manyphoton_minus = (g_sum * sideband_amp_minus).norm();

    // Zero coupling decouples the cavity entirely: no squeezing drive.
    let squeeze_param =
        if manyphoton_minus > 0.0 { (manyphoton_plus / manyphoton_minus).atanh() } else { 0.0 };
    let eff_coupling =
        (manyphoton_minus * manyphoton_minus - manyphoton_plus * manyphoton_plus).sqrt();
    let om_damping = 4.0 * eff_coupling * eff_coupling / kappa;

    let (grav_dissipation_a, grav_dissipation_b) =
        gravity_dissipation_rates(gravity, grav_gradient, mass, shifted_a, shifted_b)?;
    let grav_dissipation = (grav_dissipation_a * grav_dissipation_b).sqrt();

    Ok(DerivedParams {
        config: config.clone(),
        gravity: *gravity,
        grav_gradient,
        total_gradient,
        shifted_freq_a: shifted_a,
        shifted_freq_b: shifted_b,
        center_freq,
        half_detuning,
        x_zpf_a,
        x_zpf_b,
        grav_rate,
        total_rate,
        thermal_occupancy,
        sideband_amp_plus,
        sideband_amp_minus,
        manyphoton_plus,
        manyphoton_minus,
        squeeze_param,
        eff_coupling,
        om_damping,
        grav_dissipation_a,
        grav_dissipation_b,
        grav_dissipation,
    })
}

/// Rescales a config to mechanical quality factor `q_m`, holding the ratio
/// gamma_m / Gamma fixed: gamma_a = gamma_b = omega_m / q_m and the pump
/// amplitudes shrink by sqrt(gamma_new / gamma_base) (Gamma scales with the
/// pump power). Returns the input bit-identically when `q_m` is already the
/// config's quality factor.
pub fn scale_for_quality_factor(base: &PhysicalConfig, q_m: f64) -> Result<PhysicalConfig> {
    assert!(q_m > 0.0, "quality factor must be positive");
    base.validate()?;
    let mass = base.sphere_mass;
    let total_gradient =
        gravitational_gradient(mass, base.center_distance) + base.nongrav_gradient;
    let shifted_a = shifted_frequency(base.mech_freq_a, total_gradient, mass)?;
    let shifted_b = shifted_frequency(base.mech_freq_b, total_gradient, mass)?;
    let center_freq = 0.5 * (shifted_a + shifted_b);

    if base.mech_damping_a == base.mech_damping_b && q_m == center_freq / base.mech_damping_a {
        return Ok(base.clone());
    }

    let gamma_new = center_freq / q_m;
    let pump_scale = (gamma_new / base.mech_damping_a).sqrt();
    let mut scaled = base.clone();
    scaled.mech_damping_a = gamma_new;
    scaled.mech_damping_b = gamma_new;
    scaled.pump_amp_plus = base.pump_amp_plus * pump_scale;
    scaled.pump_amp_minus = base.pump_amp_minus * pump_scale;
    Ok(scaled)
}
