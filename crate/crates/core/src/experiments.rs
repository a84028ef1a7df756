//! Sweep harness: entanglement gap versus mechanical quality factor,
//! non-gravitational-coupling robustness, and the decoherence-threshold
//! report, with CSV/JSON/SVG emitters.

use serde::Serialize;
use std::io::Write;

use crate::closedform::{self, SymmetricRates};
use crate::error::Result;
use crate::gaussian::{assemble, log_negativity, steady_state};
use crate::models::effective_two_mode;
use crate::params::{
    decoherence_threshold, derive, scale_for_quality_factor, DerivedParams, GravityModel,
    PhysicalConfig,
};

/// One point of a sweep. Numeric fields are absent when the point failed;
/// `status` then carries the reason and the sweep continues.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRecord {
    pub sweep_var: f64,
    pub en_quantum: Option<f64>,
    pub en_classical: Option<f64>,
    pub gap: Option<f64>,
    pub gap_approx: Option<f64>,
    pub ratio_r: Option<f64>,
    pub gamma_m: f64,
    #[serde(rename = "Gamma")]
    pub big_gamma: f64,
    pub status: String,
}

/// Logarithmically spaced grid, endpoints included, strictly increasing.
pub fn log_grid(min: f64, max: f64, points: usize) -> Vec<f64> {
    assert!(min > 0.0 && max > min && points >= 2);
    let step = (max / min).ln() / (points - 1) as f64;
    (0..points).map(|i| min * (step * i as f64).exp()).collect()
}

/// Default quality-factor grid: 60 points over [1e6, 1e20].
pub fn default_qm_grid() -> Vec<f64> {
    log_grid(1e6, 1e20, 60)
}

/// Default coupling-ratio grid: 50 points over [1e-1, 1e7].
pub fn default_ratio_grid() -> Vec<f64> {
    log_grid(1e-1, 1e7, 50)
}

fn steady_negativity(p: &DerivedParams, gravity: &GravityModel) -> Result<f64> {
    let model = effective_two_mode(p, gravity)?;
    log_negativity(&steady_state(&assemble(&model))?)
}

/// Entanglement gap versus mechanical quality factor.
///
/// Each point rescales the base config to `q_m` (pump amplitudes follow so
/// that gamma_m / Gamma stays fixed), solves the effective model under the
/// quantum and the optimal classical gravity model, and records both
/// negativities, their gap, and the first-order gap formula.
pub fn sweep_quality_factor(base: &PhysicalConfig, qm_grid: &[f64]) -> Vec<SweepRecord> {
    let mut grid: Vec<f64> = qm_grid.to_vec();
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());

    grid.into_iter()
        .map(|q_m| {
            let point = (|| -> Result<SweepRecord> {
                let cfg = scale_for_quality_factor(base, q_m)?;
                let p_q = derive(&cfg, &GravityModel::Quantum)?;
                let p_c = derive(&cfg, &GravityModel::ClassicalOptimal)?;
                let en_q = steady_negativity(&p_q, &GravityModel::Quantum)?;
                let en_c = steady_negativity(&p_c, &GravityModel::ClassicalOptimal)?;
                let gap_formula = SymmetricRates::from_derived(&p_c)
                    .map(|r| closedform::gap_approx(&r))
                    .ok();
                Ok(SweepRecord {
                    sweep_var: q_m,
                    en_quantum: Some(en_q),
                    en_classical: Some(en_c),
                    gap: Some(en_q - en_c),
                    gap_approx: gap_formula,
                    ratio_r: None,
                    gamma_m: cfg.mech_damping_a,
                    big_gamma: p_q.om_damping,
                    status: "ok".into(),
                })
            })();
            point.unwrap_or_else(|e| SweepRecord {
                sweep_var: q_m,
                en_quantum: None,
                en_classical: None,
                gap: None,
                gap_approx: None,
                ratio_r: None,
                gamma_m: f64::NAN,
                big_gamma: f64::NAN,
                status: e.to_string(),
            })
        })
        .collect()
}

/// Robustness against non-gravitational coupling: the ratio
/// R = (E_N - E_N|k_others=0) / (E_N,q - E_N,c) versus k_others / k_G.
///
/// Only the oscillator-oscillator coupling rate k_M = k_G (1 + ratio) is
/// varied; the gradient-shifted frequencies, zero-point spreads and thermal
/// occupation are held at their base values, whose drift over this sweep is
/// far below every other scale in the problem. The numerator uses the
/// quantum-gravity negativity unless `classical_numerator` is set; both are
/// recorded regardless.
pub fn sweep_nongrav_coupling(
    base: &PhysicalConfig,
    ratio_grid: &[f64],
    classical_numerator: bool,
) -> Result<Vec<SweepRecord>> {
    let mut grid: Vec<f64> = ratio_grid.to_vec();
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let mut zeroed = base.clone();
    zeroed.nongrav_gradient = 0.0;
    let base_q = derive(&zeroed, &GravityModel::Quantum)?;
    let base_c = derive(&zeroed, &GravityModel::ClassicalOptimal)?;

    let at_ratio = |p: &DerivedParams, ratio: f64| -> DerivedParams {
        let mut out = p.clone();
        out.total_gradient = p.grav_gradient * (1.0 + ratio);
        out.total_rate = p.grav_rate * (1.0 + ratio);
        out
    };

    let en_q0 = steady_negativity(&base_q, &GravityModel::Quantum)?;
    let en_c0 = steady_negativity(&base_c, &GravityModel::ClassicalOptimal)?;

    Ok(grid
        .into_iter()
        .map(|ratio| {
            let point = (|| -> Result<SweepRecord> {
                let p_q = at_ratio(&base_q, ratio);
                let p_c = at_ratio(&base_c, ratio);
                let en_q = steady_negativity(&p_q, &GravityModel::Quantum)?;
                let en_c = steady_negativity(&p_c, &GravityModel::ClassicalOptimal)?;
                let gap = en_q - en_c;
                let numerator =
                    if classical_numerator { en_c - en_c0 } else { en_q - en_q0 };
                let gap_formula = SymmetricRates::from_derived(&p_c)
                    .map(|r| closedform::gap_approx(&r))
                    .ok();
                Ok(SweepRecord {
                    sweep_var: ratio,
                    en_quantum: Some(en_q),
                    en_classical: Some(en_c),
                    gap: Some(gap),
                    gap_approx: gap_formula,
                    ratio_r: Some(numerator / gap),
                    gamma_m: base.mech_damping_a,
                    big_gamma: base_q.om_damping,
                    status: "ok".into(),
                })
            })();
            point.unwrap_or_else(|e| SweepRecord {
                sweep_var: ratio,
                en_quantum: None,
                en_classical: None,
                gap: None,
                gap_approx: None,
                ratio_r: None,
                gamma_m: base.mech_damping_a,
                big_gamma: base_q.om_damping,
                status: e.to_string(),
            })
        })
        .collect())
}

/// Decoherence-threshold summary for a config.
#[derive(Debug, Clone, Serialize)]
pub struct ThresholdReport {
    /// Largest damping rate compatible with gravitationally generated
    /// entanglement, rad/s.
    pub gamma_max: f64,
    /// Same, as an ordinary frequency in Hz.
    pub gamma_max_hz: f64,
    /// Quality factor at the threshold, omega_m / gamma_max; this is the
    /// vertical marker of the quality-factor sweep.
    pub q_threshold: f64,
    /// The config's own damping rate and quality factor.
    pub gamma_m: f64,
    pub q_m: f64,
    /// Whether the config satisfies gamma_m <= gamma_max.
    pub passes: bool,
}

/// Evaluates the universal decoherence constraint for a config.
pub fn threshold_report(base: &PhysicalConfig) -> Result<ThresholdReport> {
    let p = derive(base, &GravityModel::Quantum)?;
    let (gamma_max, q_threshold) = decoherence_threshold(
        base.density,
        base.form_factor,
        base.temperature,
        p.center_freq,
    );
    let gamma_m = base.mech_damping_a.max(base.mech_damping_b);
    Ok(ThresholdReport {
        gamma_max,
        gamma_max_hz: gamma_max / crate::constants::TWO_PI,
        q_threshold,
        gamma_m,
        q_m: p.center_freq / gamma_m,
        passes: gamma_m <= gamma_max,
    })
}

fn fmt_opt(x: Option<f64>) -> String {
    match x {
        Some(v) => format!("{v:.12e}"),
        None => String::new(),
    }
}

/// Fixed-column CSV: sweep_var, en_quantum, en_classical, gap, gap_approx,
/// ratio_r, gamma_m, Gamma, status.
pub fn write_csv<W: Write>(records: &[SweepRecord], mut w: W) -> std::io::Result<()> {
    writeln!(
        w,
        "sweep_var,en_quantum,en_classical,gap,gap_approx,ratio_r,gamma_m,Gamma,status"
    )?;
    for r in records {
        writeln!(
            w,
            "{:.12e},{},{},{},{},{},{:.12e},{:.12e},\"{}\"",
            r.sweep_var,
            fmt_opt(r.en_quantum),
            fmt_opt(r.en_classical),
            fmt_opt(r.gap),
            fmt_opt(r.gap_approx),
            fmt_opt(r.ratio_r),
            r.gamma_m,
            r.big_gamma,
            r.status.replace('"', "'"),
        )?;
    }
    Ok(())
}

/// JSON array with the same fields as the CSV.
pub fn write_json<W: Write>(records: &[SweepRecord], w: W) -> std::io::Result<()> {
    serde_json::to_writer_pretty(w, records).map_err(std::io::Error::other)
}

/// Minimal log-log SVG line chart of (x, y) points; nonpositive values are
/// skipped, decade gridlines are drawn on both axes.
pub fn write_svg_loglog<W: Write>(
    points: &[(f64, f64)],
    x_label: &str,
    y_label: &str,
    title: &str,
    mut w: W,
) -> std::io::Result<()> {
    let data: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0 && x.is_finite() && y.is_finite())
        .map(|(x, y)| (x.log10(), y.log10()))
        .collect();

    let (width, height) = (800.0, 560.0);
    let (ml, mr, mt, mb) = (70.0, 20.0, 40.0, 50.0);
    writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    )?;
    writeln!(w, r#"<rect width="{width}" height="{height}" fill="white"/>"#)?;
    writeln!(
        w,
        r#"<text x="{}" y="24" text-anchor="middle" font-family="sans-serif" font-size="16">{title}</text>"#,
        width / 2.0
    )?;

    if data.is_empty() {
        writeln!(
            w,
            r#"<text x="{}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="14">no positive data</text>"#,
            width / 2.0,
            height / 2.0
        )?;
        writeln!(w, "</svg>")?;
        return Ok(());
    }

    let xmin = data.iter().map(|p| p.0).fold(f64::INFINITY, f64::min).floor();
    let xmax = data.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max).ceil();
    let ymin = data.iter().map(|p| p.1).fold(f64::INFINITY, f64::min).floor();
    let ymax = data.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max).ceil();
    let (xmax, ymax) = (xmax.max(xmin + 1.0), ymax.max(ymin + 1.0));

    let sx = |x: f64| ml + (x - xmin) / (xmax - xmin) * (width - ml - mr);
    let sy = |y: f64| height - mb - (y - ymin) / (ymax - ymin) * (height - mt - mb);

    // Decade gridlines with exponent labels.
    let mut decade = xmin;
    while decade <= xmax + 1e-9 {
        let x = sx(decade);
        writeln!(
            w,
            r##"<line x1="{x:.1}" y1="{mt}" x2="{x:.1}" y2="{:.1}" stroke="#ddd"/>"##,
            height - mb
        )?;
        writeln!(
            w,
            r#"<text x="{x:.1}" y="{:.1}" text-anchor="middle" font-family="sans-serif" font-size="11">1e{decade:.0}</text>"#,
            height - mb + 16.0
        )?;
        decade += 1.0;
    }
    let mut decade = ymin;
    while decade <= ymax + 1e-9 {
        let y = sy(decade);
        writeln!(
            w,
            r##"<line x1="{ml}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="#ddd"/>"##,
            width - mr
        )?;
        writeln!(
            w,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end" font-family="sans-serif" font-size="11">1e{decade:.0}</text>"#,
            ml - 6.0,
            y + 4.0
        )?;
        decade += 1.0;
    }

    let path: Vec<String> =
        data.iter().map(|(x, y)| format!("{:.2},{:.2}", sx(*x), sy(*y))).collect();
    writeln!(
        w,
        r##"<polyline points="{}" fill="none" stroke="#1f77b4" stroke-width="1.8"/>"##,
        path.join(" ")
    )?;
    writeln!(
        w,
        r#"<text x="{}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="13">{x_label}</text>"#,
        ml + (width - ml - mr) / 2.0,
        height - 12.0
    )?;
    writeln!(
        w,
        r#"<text x="16" y="{}" text-anchor="middle" font-family="sans-serif" font-size="13" transform="rotate(-90 16 {})">{y_label}</text>"#,
        mt + (height - mt - mb) / 2.0,
        mt + (height - mt - mb) / 2.0
    )?;
    writeln!(w, "</svg>")?;
    Ok(())
}

/// Least-squares slope of ln y against ln x; `None` unless every point has
/// positive x and y.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 || points.iter().any(|(x, y)| *x <= 0.0 || *y <= 0.0) {
        return None;
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|(x, y)| (x.ln(), y.ln())).collect();
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}
