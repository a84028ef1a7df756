//! Config-file ingestion.
//!
//! The canonical schema is a flat key/value TOML file in which every
//! physical field carries an explicit unit suffix; see
//! `configs/paper_defaults.toml`. Fields suffixed `_hz` are multiplied by
//! 2*pi on ingest, `_rads` fields are angular rates taken verbatim.

use serde::Deserialize;
use std::path::Path;

use crate::constants::TWO_PI;
use crate::error::{Error, Result};
use crate::params::PhysicalConfig;

/// The bundled reference configuration, verbatim.
pub const PAPER_DEFAULTS_TOML: &str = include_str!("../../../configs/paper_defaults.toml");

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    sphere_mass_kg: f64,
    sphere_radius_m: f64,
    center_distance_m: f64,
    density_kg_m3: f64,
    form_factor: f64,
    mech_freq_a_hz: f64,
    mech_freq_b_hz: f64,
    mech_damping_a_hz: f64,
    mech_damping_b_hz: f64,
    cavity_decay_hz: f64,
    single_photon_coupling_a_hz: f64,
    single_photon_coupling_b_hz: f64,
    pump_amp_plus_rads: f64,
    pump_amp_minus_rads: f64,
    pump_phase_plus_rad: Option<f64>,
    pump_phase_minus_rad: Option<f64>,
    temperature_k: f64,
    nongrav_gradient_n_per_m: f64,
}

impl From<RawConfig> for PhysicalConfig {
    fn from(raw: RawConfig) -> Self {
        PhysicalConfig {
            sphere_mass: raw.sphere_mass_kg,
            sphere_radius: raw.sphere_radius_m,
            center_distance: raw.center_distance_m,
            density: raw.density_kg_m3,
            form_factor: raw.form_factor,
            mech_freq_a: TWO_PI * raw.mech_freq_a_hz,
            mech_freq_b: TWO_PI * raw.mech_freq_b_hz,
            mech_damping_a: TWO_PI * raw.mech_damping_a_hz,
            mech_damping_b: TWO_PI * raw.mech_damping_b_hz,
            cavity_decay: TWO_PI * raw.cavity_decay_hz,
            single_photon_coupling_a: TWO_PI * raw.single_photon_coupling_a_hz,
            single_photon_coupling_b: TWO_PI * raw.single_photon_coupling_b_hz,
            pump_amp_plus: raw.pump_amp_plus_rads,
            pump_amp_minus: raw.pump_amp_minus_rads,
            pump_phase_plus: raw.pump_phase_plus_rad,
            pump_phase_minus: raw.pump_phase_minus_rad,
            temperature: raw.temperature_k,
            nongrav_gradient: raw.nongrav_gradient_n_per_m,
        }
    }
}

/// Parses a config from TOML text and validates its static invariants.
pub fn from_toml_str(text: &str) -> Result<PhysicalConfig> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    let cfg = PhysicalConfig::from(raw);
    cfg.validate()?;
    Ok(cfg)
}

/// Reads and parses a config file.
pub fn from_path(path: impl AsRef<Path>) -> Result<PhysicalConfig> {
    let text = std::fs::read_to_string(path.as_ref())?;
    from_toml_str(&text)
}

/// The bundled reference configuration.
pub fn paper_defaults() -> PhysicalConfig {
    from_toml_str(PAPER_DEFAULTS_TOML).expect("bundled defaults must parse")
}
