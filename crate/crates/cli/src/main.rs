//! Command-line interface: derived-parameter inspection, steady-state
//! solves, the two sweep harnesses, and the decoherence-threshold report.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use gravent_core::closedform::SymmetricRates;
use gravent_core::config;
use gravent_core::constants::TWO_PI;
use gravent_core::error::Error;
use gravent_core::experiments::{
    default_qm_grid, default_ratio_grid, log_grid, sweep_nongrav_coupling, sweep_quality_factor,
    threshold_report, write_csv, write_json, write_svg_loglog, SweepRecord,
};
use gravent_core::gaussian::{assemble, log_negativity, steady_state, CovarianceMatrix};
use gravent_core::models::{effective_two_mode, three_mode_linearized};
use gravent_core::params::{derive, DerivedParams, GravityModel, PhysicalConfig};

#[derive(Parser)]
#[command(
    name = "gravent",
    about = "Steady-state entanglement of a reservoir-engineered oscillator pair \
             under quantum and measurement-feedback gravity models",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print every derived rate and coupling for a config
    Derive {
        /// Path to a TOML config file
        config: PathBuf,
    },
    /// Solve one steady state and print the covariance matrix and E_N
    Steady {
        config: PathBuf,
        #[arg(long, value_enum, default_value_t = GravityArg::Quantum)]
        gravity: GravityArg,
        #[arg(long, value_enum, default_value_t = ModelArg::TwoMode)]
        model: ModelArg,
        /// Measurement rate on oscillator a (N/m); with --gravity classical
        #[arg(long)]
        meas_rate_a: Option<f64>,
        /// Measurement rate on oscillator b (N/m); with --gravity classical
        #[arg(long)]
        meas_rate_b: Option<f64>,
    },
    /// Entanglement gap versus mechanical quality factor
    SweepQm {
        config: PathBuf,
        #[command(flatten)]
        out: SweepOutput,
        /// Grid as min,max,points (log-spaced); default 1e6,1e20,60
        #[arg(long, value_parser = parse_grid)]
        grid: Option<(f64, f64, usize)>,
    },
    /// Entanglement shift from non-gravitational coupling, as the ratio R
    SweepCoupling {
        config: PathBuf,
        #[command(flatten)]
        out: SweepOutput,
        /// Grid of k_others/k_G as min,max,points (log-spaced); default 1e-1,1e7,50
        #[arg(long, value_parser = parse_grid)]
        grid: Option<(f64, f64, usize)>,
        /// Use the classical-model negativity in R's numerator
        #[arg(long)]
        classical_numerator: bool,
    },
    /// Report the thermal-decoherence damping limit for a config
    Threshold {
        config: PathBuf,
    },
}

#[derive(Args)]
struct SweepOutput {
    /// Output table path
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    /// Also write a log-log SVG chart of the swept quantity
    #[arg(long)]
    plot: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum GravityArg {
    /// Coherent gravity, no extra dissipation
    Quantum,
    /// Measurement-feedback gravity; explicit rates or the optimum
    Classical,
    /// Measurement-feedback gravity at its optimal rates
    KtmOpt,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    TwoMode,
    ThreeMode,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

fn parse_grid(s: &str) -> Result<(f64, f64, usize), String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err("expected min,max,points".into());
    }
    let min: f64 = parts[0].parse().map_err(|e| format!("bad min: {e}"))?;
    let max: f64 = parts[1].parse().map_err(|e| format!("bad max: {e}"))?;
    let points: usize = parts[2].parse().map_err(|e| format!("bad point count: {e}"))?;
    if !(min > 0.0 && max > min && points >= 2) {
        return Err("need 0 < min < max and at least 2 points".into());
    }
    Ok((min, max, points))
}

fn load_config(path: &PathBuf) -> Result<PhysicalConfig, ExitCode> {
    config::from_path(path).map_err(|e| {
        eprintln!("error: failed to load config {}: {e}", path.display());
        ExitCode::from(1)
    })
}

fn gravity_model(
    arg: GravityArg,
    meas_a: Option<f64>,
    meas_b: Option<f64>,
) -> Result<GravityModel, ExitCode> {
    match (arg, meas_a, meas_b) {
        (GravityArg::Quantum, None, None) => Ok(GravityModel::Quantum),
        (GravityArg::KtmOpt, None, None) => Ok(GravityModel::ClassicalOptimal),
        (GravityArg::Classical, Some(a), Some(b)) => {
            Ok(GravityModel::ClassicalKtm { meas_rate_a: a, meas_rate_b: b })
        }
        (GravityArg::Classical, None, None) => Ok(GravityModel::ClassicalOptimal),
        _ => {
            eprintln!(
                "error: --meas-rate-a/--meas-rate-b must be given together, and only with --gravity classical"
            );
            Err(ExitCode::from(1))
        }
    }
}

fn print_derived(p: &DerivedParams) {
    let hz = |x: f64| x / TWO_PI;
    println!("gravitational gradient K_G   = {:.6e} N/m", p.grav_gradient);
    println!("total gradient K_M           = {:.6e} N/m", p.total_gradient);
    println!("corrected frequency omega'_a = {:.9e} rad/s ({:.6} Hz)", p.shifted_freq_a, hz(p.shifted_freq_a));
    println!("corrected frequency omega'_b = {:.9e} rad/s ({:.6} Hz)", p.shifted_freq_b, hz(p.shifted_freq_b));
    println!("central frequency omega_m    = {:.9e} rad/s ({:.6} Hz)", p.center_freq, hz(p.center_freq));
    println!("half-detuning Omega          = {:.6e} rad/s ({:.6} Hz)", p.half_detuning, hz(p.half_detuning));
    println!("zero-point spread x_zpf,a    = {:.6e} m", p.x_zpf_a);
    println!("zero-point spread x_zpf,b    = {:.6e} m", p.x_zpf_b);
    println!("gravitational rate k_G       = {:.6e} rad/s ({:.6e} Hz)", p.grav_rate, hz(p.grav_rate));
    println!("total coupling rate k_M      = {:.6e} rad/s ({:.6e} Hz)", p.total_rate, hz(p.total_rate));
    println!("thermal occupation nbar      = {:.6e}", p.thermal_occupancy);
    println!("sideband amplitude c_+       = {:.6} {:+.6}i", p.sideband_amp_plus.re, p.sideband_amp_plus.im);
    println!("sideband amplitude c_-       = {:.6} {:+.6}i", p.sideband_amp_minus.re, p.sideband_amp_minus.im);
    println!("many-photon coupling G_+     = {:.6e} rad/s", p.manyphoton_plus);
    println!("many-photon coupling G_-     = {:.6e} rad/s", p.manyphoton_minus);
    println!("squeeze parameter r          = {:.6}", p.squeeze_param);
    println!("effective coupling           = {:.6e} rad/s", p.eff_coupling);
    println!("reservoir damping Gamma      = {:.6e} rad/s", p.om_damping);
    println!("gravity dissipation kappa_G  = {:.6e} rad/s (a: {:.6e}, b: {:.6e})", p.grav_dissipation, p.grav_dissipation_a, p.grav_dissipation_b);
    println!("quality factor Q_m           = {:.6e}", p.center_freq / p.config.mech_damping_a);
}

fn print_covariance(v: &CovarianceMatrix) {
    println!("covariance matrix (X_a, P_a, X_b, P_b ordering):");
    let m = v.matrix();
    for r in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|c| format!("{:+.9e}", m[(r, c)])).collect();
        println!("  [{}]", row.join(", "));
    }
}

fn run_steady(
    cfg: &PhysicalConfig,
    gravity: GravityModel,
    model: ModelArg,
) -> Result<(), Error> {
    let p = derive(cfg, &gravity)?;
    let mechanical = match model {
        ModelArg::TwoMode => {
            let m = effective_two_mode(&p, &gravity)?;
            steady_state(&assemble(&m))?
        }
        ModelArg::ThreeMode => {
            let m = three_mode_linearized(&p, &gravity)?;
            steady_state(&assemble(&m))?.reduce(&[0, 1])
        }
    };
    print_covariance(&mechanical);
    let en = log_negativity(&mechanical)?;
    println!("logarithmic negativity E_N = {en:.9}");
    match SymmetricRates::from_derived(&p) {
        Ok(rates) => println!(
            "first-order gap estimate (vs quantum) = {:.6e}",
            gravent_core::closedform::gap_approx(&rates)
        ),
        Err(_) => println!("(asymmetric damping: no closed-form gap estimate)"),
    }
    Ok(())
}

fn write_records(records: &[SweepRecord], out: &SweepOutput, y_of: fn(&SweepRecord) -> Option<f64>, x_label: &str, y_label: &str) -> std::io::Result<()> {
    let file = File::create(&out.out)?;
    let mut w = BufWriter::new(file);
    match out.format {
        FormatArg::Csv => write_csv(records, &mut w)?,
        FormatArg::Json => write_json(records, &mut w)?,
    }
    w.flush()?;
    println!("wrote {} rows to {}", records.len(), out.out.display());

    if let Some(plot) = &out.plot {
        let points: Vec<(f64, f64)> = records
            .iter()
            .filter_map(|r| y_of(r).map(|y| (r.sweep_var, y)))
            .collect();
        let file = File::create(plot)?;
        let mut w = BufWriter::new(file);
        write_svg_loglog(
            &points,
            x_label,
            y_label,
            &format!("{y_label} vs {x_label}"),
            &mut w,
        )?;
        w.flush()?;
        println!("wrote plot to {}", plot.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Derive { config } => {
            let cfg = match load_config(&config) {
                Ok(c) => c,
                Err(code) => return Ok(code),
            };
            let p = derive(&cfg, &GravityModel::ClassicalOptimal)?;
            print_derived(&p);
        }
        Command::Steady { config, gravity, model, meas_rate_a, meas_rate_b } => {
            let cfg = match load_config(&config) {
                Ok(c) => c,
                Err(code) => return Ok(code),
            };
            let gravity = match gravity_model(gravity, meas_rate_a, meas_rate_b) {
                Ok(g) => g,
                Err(code) => return Ok(code),
            };
            run_steady(&cfg, gravity, model)?;
        }
        Command::SweepQm { config, out, grid } => {
            let cfg = match load_config(&config) {
                Ok(c) => c,
                Err(code) => return Ok(code),
            };
            let grid = match grid {
                Some((min, max, n)) => log_grid(min, max, n),
                None => default_qm_grid(),
            };
            let records = sweep_quality_factor(&cfg, &grid);
            write_records(&records, &out, |r| r.gap, "Q_m", "entanglement gap")?;
        }
        Command::SweepCoupling { config, out, grid, classical_numerator } => {
            let cfg = match load_config(&config) {
                Ok(c) => c,
                Err(code) => return Ok(code),
            };
            let grid = match grid {
                Some((min, max, n)) => log_grid(min, max, n),
                None => default_ratio_grid(),
            };
            let records = sweep_nongrav_coupling(&cfg, &grid, classical_numerator)?;
            write_records(&records, &out, |r| r.ratio_r.map(f64::abs), "k_others / k_G", "|R|")?;
        }
        Command::Threshold { config } => {
            let cfg = match load_config(&config) {
                Ok(c) => c,
                Err(code) => return Ok(code),
            };
            let report = threshold_report(&cfg)?;
            println!("damping limit gamma_max      = {:.6e} rad/s ({:.6e} Hz)", report.gamma_max, report.gamma_max_hz);
            println!("quality-factor threshold Q   = {:.6e}", report.q_threshold);
            println!("config damping gamma_m       = {:.6e} rad/s", report.gamma_m);
            println!("config quality factor Q_m    = {:.6e}", report.q_m);
            println!(
                "constraint 2 gamma k_B T <= hbar G Lambda rho: {}",
                if report.passes { "satisfied" } else { "violated" }
            );
        }
    }
    Ok(ExitCode::SUCCESS)
}
