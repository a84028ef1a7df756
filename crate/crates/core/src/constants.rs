//! Physical constants (CODATA 2018), frozen for reproducible output.

/// Reduced Planck constant, J s.
pub const HBAR: f64 = 1.054_571_817e-34;

/// Newtonian constant of gravitation, m^3 kg^-1 s^-2.
pub const NEWTON_G: f64 = 6.674_30e-11;

/// Boltzmann constant, J K^-1.
pub const BOLTZMANN: f64 = 1.380_649e-23;

/// 2*pi, for converting ordinary frequencies (Hz) to angular ones (rad/s).
pub const TWO_PI: f64 = 2.0 * std::f64::consts::PI;
