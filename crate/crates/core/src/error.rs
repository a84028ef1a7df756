//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// The force-gradient shift exceeds the bare restoring force, so the
    /// corrected oscillator frequency would be imaginary.
    #[error("imaginary corrected frequency: omega^2 = {omega_sq} rad^2/s^2 after gradient shift")]
    ImaginaryFrequency { omega_sq: f64 },

    /// Bogoliubov transformation requires |E-| > |E+|.
    #[error("unstable pump configuration: |E+| = {plus} must be strictly below |E-| = {minus}")]
    UnstablePump { plus: f64, minus: f64 },

    /// A Lindblad coefficient vector does not match the model dimension.
    #[error("dimension mismatch: expected length {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// The drift matrix is not Hurwitz, so no unique steady state exists.
    #[error("drift matrix is not Hurwitz: max eigenvalue real part {max_re}")]
    NotStable { max_re: f64 },

    /// The steady-state residual exceeded its tolerance.
    #[error("steady-state residual {residual} exceeds bound {bound}")]
    ResidualTooLarge { residual: f64, bound: f64 },

    /// A covariance matrix violates the uncertainty principle.
    #[error("unphysical covariance matrix: min eigenvalue of V + (i/2)*sigma is {min_eig}")]
    Unphysical { min_eig: f64 },

    /// The closed-form moment denominators vanish (gamma_m = Gamma = 0).
    #[error("degenerate moment denominator: gamma_m and Gamma are both zero")]
    DegenerateDenominator,

    /// Second moments that should be complex conjugates are not.
    #[error("conjugate pairing violated by {deviation}")]
    ConjugationViolation { deviation: f64 },

    /// The closed-form log-negativity divides by the half-detuning.
    #[error("zero half-detuning: the approximate log-negativity divides by Omega")]
    ZeroDetuning,

    /// Measurement-feedback rates must be strictly positive.
    #[error("nonpositive measurement rate: {rate} N/m")]
    NonpositiveMeasurementRate { rate: f64 },

    /// The truncated Fock solve leaked too much population into the top level.
    #[error("Fock truncation not converged: leakage {leakage} exceeds tolerance {tolerance}")]
    TruncationNotConverged { leakage: f64, tolerance: f64 },

    /// The Liouvillian null space is not one-dimensional.
    #[error("no unique steady state: {detail}")]
    NoUniqueSteadyState { detail: String },

    /// Rates must agree for the symmetric closed-form expressions.
    #[error("asymmetric rates: {what} differ beyond tolerance ({a} vs {b})")]
    AsymmetricRates { what: &'static str, a: f64, b: f64 },

    /// Config file could not be read or parsed.
    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
