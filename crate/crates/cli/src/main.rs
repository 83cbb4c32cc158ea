use std::fs::File;
use std::io::{self, Write};
use std::ops::RangeInclusive;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;

use ncqm::algebra::{build_heisenberg_rep, commutator_residuals, sw_forward, CommutatorTargets};
use ncqm::fractional::{caputo_exp, caputo_exp_series, grunwald_letnikov_caputo, liouville_exp};
use ncqm::params::{effective_coefficients, nc_strengths};
use ncqm::ring::{eta_at_energy, flux_sweep, RingSpec};
use ncqm::specfun::SeriesControl;
use ncqm::spectra::{
    ec_quantization_residual, ec_solve_energy, sqf_free_spectrum, sqf_oscillator_spectrum,
    QuantumNumbers,
};
use ncqm::verify::run_verification;
use ncqm::wavefunctions::RadialSolution;
use ncqm::{Mechanism, ModelParams, NcqmError};

#[derive(Parser)]
#[command(name = "ncqm", version, about = "Energy-dependent noncommutative quantum mechanics")]
struct Cli {
    /// JSON parameter file; falls back to $NCQM_CONFIG, then built-in defaults.
    #[arg(long, global = true, env = "NCQM_CONFIG")]
    config: Option<PathBuf>,
    /// Write output here instead of stdout.
    #[arg(long, short, global = true)]
    out: Option<PathBuf>,
    #[command(flatten)]
    overrides: Overrides,
    #[command(subcommand)]
    command: Command,
}

/// Flags that override fields of the config file.
#[derive(Args, Default)]
struct Overrides {
    #[arg(long, global = true)]
    mechanism: Option<Mechanism>,
    #[arg(long, global = true)]
    eta0: Option<f64>,
    #[arg(long, global = true)]
    theta0: Option<f64>,
    #[arg(long, global = true)]
    alpha: Option<f64>,
    #[arg(long, global = true)]
    beta: Option<f64>,
    #[arg(long, global = true)]
    e_ref: Option<f64>,
    #[arg(long, global = true)]
    hbar: Option<f64>,
    #[arg(long, global = true)]
    mass: Option<f64>,
    #[arg(long, global = true)]
    charge: Option<f64>,
    #[arg(long, global = true)]
    spring_k: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Energy levels over ranges of quantum numbers (CSV).
    Spectrum {
        /// Radial quantum numbers, `a..b` inclusive or a single value.
        #[arg(long, default_value = "0..3", value_parser = parse_range)]
        n: RangeInclusive<u32>,
        /// Angular quantum numbers, `a..b` inclusive or a single value.
        #[arg(long, default_value = "0..3", value_parser = parse_range)]
        mphi: RangeInclusive<u32>,
        /// Fluctuation energy for SQF; defaults to e_ref.
        #[arg(long)]
        eps: Option<f64>,
        /// Root tolerance for EC.
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Samples of one radial solution (CSV).
    Wavefunction {
        #[arg(long, default_value_t = 0)]
        n: u32,
        #[arg(long, default_value_t = 0)]
        mphi: u32,
        /// Outer radius; defaults to six oscillator lengths.
        #[arg(long)]
        r_max: Option<f64>,
        #[arg(long, default_value_t = 200)]
        points: usize,
    },
    /// Commutator residuals of the mapped Fock representation (JSON).
    Commutators {
        /// Defaults to θ(e_ref).
        #[arg(long, allow_hyphen_values = true)]
        theta: Option<f64>,
        /// Defaults to η(e_ref).
        #[arg(long, allow_hyphen_values = true)]
        eta: Option<f64>,
        #[arg(long, default_value_t = 30)]
        n_trunc: usize,
    },
    /// Fractional derivatives of the exponential (CSV).
    Fractional {
        #[arg(long, default_value_t = 0.5)]
        order: f64,
        #[arg(long, default_value_t = 5.0)]
        x_max: f64,
        #[arg(long, default_value_t = 50)]
        points: usize,
        /// Step of the Grünwald–Letnikov sum.
        #[arg(long, default_value_t = 1e-3)]
        h: f64,
    },
    /// Ring levels and persistent currents over a flux sweep (CSV).
    Ring {
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        /// Ring α in (0, 1]; m* = mass/α.
        #[arg(long, default_value_t = 1.0)]
        ring_alpha: f64,
        /// Defaults to η(e_ref).
        #[arg(long, allow_hyphen_values = true)]
        eta: Option<f64>,
        #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
        phi_min: f64,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        phi_max: f64,
        #[arg(long, default_value_t = 41)]
        points: usize,
        #[arg(long, default_value = "-2..2", value_parser = parse_signed_range, allow_hyphen_values = true)]
        l: RangeInclusive<i64>,
    },
    /// Full cross-check suite (JSON); exit status 1 on any tolerance breach.
    Verify,
}

fn parse_range(s: &str) -> Result<RangeInclusive<u32>, String> {
    let (a, b) = s.split_once("..").unwrap_or((s, s));
    let a: u32 = a.trim().parse().map_err(|e| format!("bad range start in '{s}': {e}"))?;
    let b: u32 = b.trim().parse().map_err(|e| format!("bad range end in '{s}': {e}"))?;
    if a > b {
        return Err(format!("empty range '{s}'"));
    }
    Ok(a..=b)
}

fn parse_signed_range(s: &str) -> Result<RangeInclusive<i64>, String> {
    let (a, b) = s.split_once("..").unwrap_or((s, s));
    let a: i64 = a.trim().parse().map_err(|e| format!("bad range start in '{s}': {e}"))?;
    let b: i64 = b.trim().parse().map_err(|e| format!("bad range end in '{s}': {e}"))?;
    if a > b {
        return Err(format!("empty range '{s}'"));
    }
    Ok(a..=b)
}

/// Failure with its exit status.
struct Failure {
    code: u8,
    message: String,
}

impl From<NcqmError> for Failure {
    fn from(e: NcqmError) -> Self {
        let code = match e {
            NcqmError::Validation(_) | NcqmError::Usage(_) | NcqmError::Domain(_) => 2,
            _ => 1,
        };
        Self { code, message: e.to_string() }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Self { code: 1, message: e.to_string() }
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Self { code: 1, message: e.to_string() }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: 2, message: message.into() }
}

fn load_params(cli: &Cli) -> Result<ModelParams, Failure> {
    let mut p = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
            ModelParams::from_json(&text)?
        }
        None => ModelParams::default(),
    };
    let o = &cli.overrides;
    if let Some(v) = o.mechanism {
        p.mechanism = v;
    }
    let fields: [(Option<f64>, &mut f64); 9] = [
        (o.eta0, &mut p.eta0),
        (o.theta0, &mut p.theta0),
        (o.alpha, &mut p.alpha_exp),
        (o.beta, &mut p.beta_exp),
        (o.e_ref, &mut p.e_ref),
        (o.hbar, &mut p.constants.hbar),
        (o.mass, &mut p.constants.mass),
        (o.charge, &mut p.constants.charge),
        (o.spring_k, &mut p.constants.spring_k),
    ];
    for (flag, field) in fields {
        if let Some(v) = flag {
            *field = v;
        }
    }
    p.validate()?;
    Ok(p)
}

fn sink(out: &Option<PathBuf>) -> Result<Box<dyn Write>, Failure> {
    Ok(match out {
        Some(path) => Box::new(File::create(path)?),
        None => Box::new(io::stdout().lock()),
    })
}

fn write_csv<T: Serialize>(out: &Option<PathBuf>, rows: &[T]) -> Result<(), Failure> {
    let mut w = csv::Writer::from_writer(sink(out)?);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

fn write_json<T: Serialize>(out: &Option<PathBuf>, value: &T) -> Result<(), Failure> {
    let mut w = sink(out)?;
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure { code: 1, message: e.to_string() })?;
    writeln!(w, "{text}")?;
    Ok(())
}

#[derive(Serialize)]
struct SpectrumRow {
    mechanism: &'static str,
    n: u32,
    m_phi: u32,
    n_alpha: u32,
    n_beta: u32,
    energy: f64,
    method: &'static str,
    residual: f64,
}

fn spectrum_row(p: &ModelParams, qn: QuantumNumbers, eps: f64, tol: f64) -> Result<SpectrumRow, Failure> {
    let (energy, method, residual) = match p.mechanism {
        Mechanism::Sqf => {
            let e = if p.constants.spring_k > 0.0 {
                sqf_oscillator_spectrum(p, eps, &qn)?
            } else {
                sqf_free_spectrum(p, eps, &qn)?
            };
            (e, "closed_form", 0.0)
        }
        Mechanism::Ec => {
            let r = ec_solve_energy(&qn, p, (1e-8, 1e8), tol)?;
            (r.energy, r.method.as_str(), ec_quantization_residual(r.energy, &qn, p)?.abs())
        }
        Mechanism::EoI | Mechanism::EoII => {
            return Err(usage(
                "the energy-operator mechanisms constrain parameters instead of fixing a spectrum; use sqf or ec",
            ))
        }
    };
    Ok(SpectrumRow {
        mechanism: p.mechanism.as_str(),
        n: qn.n,
        m_phi: qn.m_phi,
        n_alpha: qn.n_alpha,
        n_beta: qn.n_beta,
        energy,
        method,
        residual,
    })
}

#[derive(Serialize)]
struct WaveRow {
    r: f64,
    xi: f64,
    #[serde(rename = "R_value")]
    r_value: f64,
    density: f64,
}

#[derive(Serialize)]
struct FractionalRow {
    x: f64,
    caputo_exp: f64,
    caputo_exp_series: f64,
    liouville_exp: f64,
    grunwald_letnikov_exp: f64,
}

fn run(cli: Cli) -> Result<(), Failure> {
    let p = load_params(&cli)?;
    let out = &cli.out;
    match cli.command {
        Command::Spectrum { n, mphi, eps, tol } => {
            let eps = eps.unwrap_or(p.e_ref);
            let grid: Vec<QuantumNumbers> =
                n.flat_map(|n| mphi.clone().map(move |m| QuantumNumbers::radial(n, m))).collect();
            let rows = grid
                .into_par_iter()
                .map(|qn| spectrum_row(&p, qn, eps, tol))
                .collect::<Result<Vec<_>, _>>()?;
            write_csv(out, &rows)
        }
        Command::Wavefunction { n, mphi, r_max, points } => {
            let qn = QuantumNumbers::radial(n, mphi);
            let solution = if p.mechanism == Mechanism::Ec {
                let energy = ec_solve_energy(&qn, &p, (1e-8, 1e8), 1e-13)?.energy;
                RadialSolution::from_energy(&qn, energy, &p, 1e-8)?
            } else {
                let co = effective_coefficients(&p, p.e_ref)?;
                if !(co.k_h > 0.0) {
                    return Err(usage("no confining term at e_ref; the radial solution is not normalizable"));
                }
                RadialSolution::laguerre(&qn, (co.m_star * co.k_h).sqrt() / p.constants.hbar)?
            };
            if points < 2 {
                return Err(usage("need at least two points"));
            }
            let r_max = r_max.unwrap_or(6.0 / solution.lambda_scale.sqrt());
            let rows = (0..points)
                .map(|i| {
                    let r = r_max * i as f64 / (points - 1) as f64;
                    let v = solution.eval(r)?;
                    Ok(WaveRow { r, xi: solution.xi(r), r_value: v, density: v * v })
                })
                .collect::<Result<Vec<_>, NcqmError>>()?;
            write_csv(out, &rows)
        }
        Command::Commutators { theta, eta, n_trunc } => {
            let (t0, e0) = nc_strengths(&p, p.e_ref)?;
            let (theta, eta) = (theta.unwrap_or(t0), eta.unwrap_or(e0));
            let c = &p.constants;
            let omega = if c.spring_k > 0.0 { c.omega() } else { 1.0 };
            let rep = build_heisenberg_rep(n_trunc, c, omega)?;
            let mapped = sw_forward(&rep, theta, eta);
            write_json(out, &commutator_residuals(&mapped, &CommutatorTargets::expected(&mapped)))
        }
        Command::Fractional { order, x_max, points, h } => {
            if points == 0 || !(x_max > 0.0) {
                return Err(usage("need points ≥ 1 and x_max > 0"));
            }
            let ctl = SeriesControl::default();
            let rows = (1..=points)
                .into_par_iter()
                .map(|i| {
                    let x = x_max * i as f64 / points as f64;
                    Ok(FractionalRow {
                        x,
                        caputo_exp: caputo_exp(order, x)?,
                        caputo_exp_series: caputo_exp_series(order, x, &ctl)?,
                        liouville_exp: liouville_exp(order, 1.0, x)?,
                        grunwald_letnikov_exp: grunwald_letnikov_caputo(f64::exp, order, x, h)?,
                    })
                })
                .collect::<Result<Vec<_>, NcqmError>>()?;
            write_csv(out, &rows)
        }
        Command::Ring { radius, ring_alpha, eta, phi_min, phi_max, points, l } => {
            let eta = match eta {
                Some(v) => v,
                None => eta_at_energy(&p, p.e_ref)?,
            };
            if points < 2 || !(phi_max > phi_min) {
                return Err(usage("need points ≥ 2 and phi_max > phi_min"));
            }
            let spec = RingSpec::with_bare_mass(radius, 0.0, ring_alpha, p.constants);
            let fluxes: Vec<f64> =
                (0..points).map(|i| phi_min + (phi_max - phi_min) * i as f64 / (points - 1) as f64).collect();
            let ls: Vec<i64> = l.collect();
            write_csv(out, &flux_sweep(&spec, eta, &fluxes, &ls)?)
        }
        Command::Verify => {
            let report = run_verification(&p)?;
            write_json(out, &report)?;
            if report.breached() {
                return Err(Failure { code: 1, message: format!("{} checks failed", report.failed) });
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("ncqm: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
