//! Cross-check suite: every closed form against an independent evaluation,
//! collected into one JSON-serializable report.

use serde::{Deserialize, Serialize};

use crate::algebra::{bogoliubov_frequency, build_heisenberg_rep, commutator_residuals, sw_forward, sw_inverse, CommutatorTargets};
use crate::error::Result;
use crate::fractional::{caputo_exp, caputo_exp_series, caputo_series_derivative, plane_wave_eigenvalue, PowerSeriesFn};
use crate::oracle::{
    fock_matrix_eigensolve, self_consistent_wrap, FrozenCoefficients, OracleComparison, OracleKind, SelfConsistentOptions,
};
use crate::params::{effective_coefficients, nc_strengths, EffectiveCoefficients, Mechanism, ModelParams};
use crate::quadrature::integrate_to_infinity;
use crate::ring::{alpha_from_strengths, persistent_current, ring_levels, RingSpec};
use crate::specfun::SeriesControl;
use crate::spectra::{
    commutative_spectrum, ec_free_energy_closed, ec_solve_energy, fixed_coefficient_spectrum, QuantumNumbers,
};
use crate::wavefunctions::{radial_laguerre, radial_ode_residual, RadialSolution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    /// A known disagreement between two models, reported rather than enforced.
    ExpectedDivergence,
    /// Not applicable to these parameters.
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckEntry {
    pub name: String,
    pub status: CheckStatus,
    pub measured: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl CheckEntry {
    fn measured(name: &str, measured: f64, tolerance: f64, detail: impl Into<String>) -> Self {
        let status = if measured <= tolerance { CheckStatus::Pass } else { CheckStatus::Fail };
        Self { name: name.into(), status, measured, tolerance, detail: detail.into() }
    }

    fn skipped(name: &str, detail: impl Into<String>) -> Self {
        Self { name: name.into(), status: CheckStatus::Skipped, measured: 0.0, tolerance: 0.0, detail: detail.into() }
    }

    fn failed(name: &str, detail: impl Into<String>) -> Self {
        Self { name: name.into(), status: CheckStatus::Fail, measured: f64::NAN, tolerance: 0.0, detail: detail.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub params: ModelParams,
    pub entries: Vec<CheckEntry>,
    pub comparisons: Vec<OracleComparison>,
    pub passed: usize,
    pub failed: usize,
    pub expected_divergence: usize,
    pub skipped: usize,
}

impl VerifyReport {
    pub fn breached(&self) -> bool {
        self.failed > 0
    }

    pub fn entry(&self, name: &str) -> Option<&CheckEntry> {
        self.entries.iter().find(|e| e.name == name)
    }
}

/// Levels checked against the oracles.
pub const LOW_LEVELS: [(u32, u32); 6] = [(0, 0), (0, 1), (1, 0), (0, 2), (1, 1), (0, 3)];

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn frozen(co: &EffectiveCoefficients) -> FrozenCoefficients {
    FrozenCoefficients { m_star: co.m_star, b_field: co.b_h, k_elastic: co.k_h }
}

fn check_algebra(p: &ModelParams, out: &mut Vec<CheckEntry>) -> Result<()> {
    let (theta, eta) = nc_strengths(p, p.e_ref)?;
    let c = &p.constants;
    let omega = if c.spring_k > 0.0 { c.omega() } else { 1.0 };
    let rep = build_heisenberg_rep(30, c, omega)?;
    let mapped = sw_forward(&rep, theta, eta);
    let residuals = commutator_residuals(&mapped, &CommutatorTargets::expected(&mapped));
    let worst = residuals
        .iter()
        .map(|r| r.max_residual / r.target.re.hypot(r.target.im).max(1.0))
        .fold(0.0, f64::max);
    out.push(CheckEntry::measured(
        "algebra.commutators",
        worst,
        1e-10,
        format!("theta = {theta}, eta = {eta}, n_trunc = 30"),
    ));
    match sw_inverse(&mapped, theta, eta, true) {
        Ok(back) => {
            let scale = [&rep.ops.x, &rep.ops.y, &rep.ops.px, &rep.ops.py]
                .iter()
                .map(|m| m.max_abs())
                .fold(0.0, f64::max);
            out.push(CheckEntry::measured(
                "algebra.round_trip",
                back.max_difference(&rep.ops) / scale,
                1e-12,
                "exact k(E), relative to the largest operator entry",
            ));
        }
        Err(e) => out.push(CheckEntry::failed("algebra.round_trip", e.to_string())),
    }
    Ok(())
}

fn check_spectrum(p: &ModelParams, out: &mut Vec<CheckEntry>, rows: &mut Vec<OracleComparison>) -> Result<()> {
    let c = &p.constants;
    let name = "spectrum.oracle_agreement";
    let free_continuum = c.spring_k == 0.0 && (p.eta0 == 0.0 || p.alpha_exp == 1.0);
    if p.mechanism == Mechanism::Ec {
        if free_continuum {
            out.push(CheckEntry::skipped(name, "free particle without a discrete self-consistent spectrum"));
            return Ok(());
        }
        let opts = SelfConsistentOptions::default();
        let radial = OracleKind::radial_default();
        let fock = OracleKind::fock_default();
        for (idx, &(n, m)) in LOW_LEVELS.iter().enumerate() {
            let qn = QuantumNumbers::radial(n, m);
            let closed = if c.spring_k == 0.0 {
                ec_free_energy_closed(&qn, p)?
            } else {
                ec_solve_energy(&qn, p, (1e-8, 1e8), 1e-12)?.energy
            };
            let a = self_consistent_wrap(&radial, p, &qn, &opts);
            let b = self_consistent_wrap(&fock, p, &qn, &opts);
            match (a, b) {
                (Ok(a), Ok(b)) => rows.push(OracleComparison::new(*p, idx, a.energy, b.energy, closed)),
                (Err(e), _) | (_, Err(e)) => {
                    out.push(CheckEntry::failed(name, format!("level ({n}, {m}): {e}")));
                    return Ok(());
                }
            }
        }
    } else {
        let co = effective_coefficients(p, p.e_ref)?;
        if !(co.k_h > 0.0) {
            out.push(CheckEntry::skipped(name, "no confining term at the reference energy"));
            return Ok(());
        }
        let fz = frozen(&co);
        let radial = OracleKind::radial_default();
        let fock = OracleKind::fock_default();
        for (idx, &(n, m)) in LOW_LEVELS.iter().enumerate() {
            let qn = QuantumNumbers::radial(n, m);
            let closed = fixed_coefficient_spectrum(&qn, &co, c);
            rows.push(OracleComparison::new(*p, idx, radial.level(&qn, &fz, c)?, fock.level(&qn, &fz, c)?, closed));
        }
    }
    let worst = rows.iter().map(|r| r.max_rel_diff).fold(0.0, f64::max);
    out.push(CheckEntry::measured(name, worst, 1e-6, format!("{} levels, radial FD and Fock matrix", rows.len())));
    Ok(())
}

fn check_bogoliubov(p: &ModelParams, out: &mut Vec<CheckEntry>) -> Result<()> {
    let name = "spectrum.bogoliubov_vs_matrix";
    let c = &p.constants;
    let co = effective_coefficients(p, p.e_ref)?;
    if !(co.k_h > 0.0) {
        out.push(CheckEntry::skipped(name, "no confining term at the reference energy"));
        return Ok(());
    }
    let omega = bogoliubov_frequency(co.omega_h, co.b_h);
    let mut single: Vec<f64> = (0..6u32)
        .flat_map(|shell| std::iter::repeat(c.hbar * omega * (shell + 1) as f64).take(shell as usize + 1))
        .collect();
    single.truncate(6);
    let matrix = fock_matrix_eigensolve(20, &frozen(&co), c, 6)?.energies();
    let gap = single.iter().zip(&matrix).map(|(a, b)| rel(*a, *b)).fold(0.0, f64::max);
    let detail = format!(
        "single frequency {omega} vs two-frequency matrix levels {matrix:?} (B_h = {})",
        co.b_h
    );
    if gap <= 1e-10 {
        out.push(CheckEntry::measured(name, gap, 1e-10, detail));
    } else {
        out.push(CheckEntry {
            name: name.into(),
            status: CheckStatus::ExpectedDivergence,
            measured: gap,
            tolerance: 1e-10,
            detail,
        });
    }
    Ok(())
}

fn check_commutative(p: &ModelParams, out: &mut Vec<CheckEntry>) -> Result<()> {
    let name = "spectrum.commutative_recovery";
    let c = &p.constants;
    if !(c.spring_k > 0.0) {
        out.push(CheckEntry::skipped(name, "free particle has no discrete commutative spectrum"));
        return Ok(());
    }
    let pc = p.commutative();
    let co = effective_coefficients(&pc, pc.e_ref)?;
    let mut worst: f64 = 0.0;
    for &(n, m) in &LOW_LEVELS {
        let qn = QuantumNumbers::radial(n, m);
        let exact = commutative_spectrum(&qn, c.omega(), c);
        worst = worst.max(rel(fixed_coefficient_spectrum(&qn, &co, c), exact));
        if pc.mechanism == Mechanism::Ec {
            worst = worst.max(rel(ec_solve_energy(&qn, &pc, (1e-8, 1e8), 1e-12)?.energy, exact));
        }
    }
    out.push(CheckEntry::measured(name, worst, 1e-9, "eta0 = theta0 = 0"));
    Ok(())
}

fn check_wavefunctions(out: &mut Vec<CheckEntry>) -> Result<()> {
    let quad = SeriesControl { max_terms: 4000, abs_tol: 1e-14, rel_tol: 1e-12 };
    let mut ode: f64 = 0.0;
    let mut norm: f64 = 0.0;
    for n in 0..=3 {
        for m in 0..=3 {
            let qn = QuantumNumbers::radial(n, m);
            let pts: Vec<f64> = (1..=20).map(|i| 0.2 * i as f64).collect();
            ode = ode.max(radial_ode_residual(
                |x| radial_laguerre(n, m, x),
                2.0 * qn.principal(),
                m,
                &pts,
                1e-2,
            ));
            let s = RadialSolution::laguerre(&qn, 1.3)?;
            let total = integrate_to_infinity(|r| s.eval(r).unwrap_or(f64::NAN).powi(2) * r, 0.0, &quad)?;
            norm = norm.max((total - 1.0).abs());
        }
    }
    out.push(CheckEntry::measured("wavefunctions.ode_residual", ode, 1e-8, "n, m_phi <= 3"));
    out.push(CheckEntry::measured("wavefunctions.normalization", norm, 1e-8, "n, m_phi <= 3"));
    Ok(())
}

fn check_fractional(p: &ModelParams, out: &mut Vec<CheckEntry>) -> Result<()> {
    let line = PowerSeriesFn { alpha_grid: 0.5, coeffs: vec![0.0, 0.0, 1.0], radius: f64::INFINITY };
    let mut half: f64 = 0.0;
    for x in [0.1, 0.5, 1.0, 2.0, 7.0] {
        let expected = 2.0 * (x / std::f64::consts::PI).sqrt();
        half = half.max(rel(caputo_series_derivative(&line, x)?, expected));
    }
    out.push(CheckEntry::measured("fractional.half_derivative", half, 1e-8, "D^(1/2) x = 2 sqrt(x/pi)"));

    let ctl = SeriesControl::default();
    let mut series: f64 = 0.0;
    for order in [0.3, 0.5, 0.9] {
        for i in 1..=10 {
            let x = i as f64;
            series = series.max(rel(caputo_exp(order, x)?, caputo_exp_series(order, x, &ctl)?));
        }
    }
    out.push(CheckEntry::measured("fractional.caputo_exp_series", series, 1e-10, "x <= 10"));

    let c = &p.constants;
    let e = p.e_ref;
    let one = plane_wave_eigenvalue(1.0, e, c)?.value;
    let two = plane_wave_eigenvalue(2.0, e, c)?.value;
    let scale = e / c.hbar;
    let gap = ((one.re).abs() + (one.im + scale).abs()) / scale
        + ((two.re + scale * scale).abs() + two.im.abs()) / (scale * scale);
    out.push(CheckEntry::measured("fractional.plane_wave", gap, 1e-14, "orders 1 and 2"));
    Ok(())
}

fn check_ring(p: &ModelParams, out: &mut Vec<CheckEntry>) -> Result<()> {
    let (theta, eta) = nc_strengths(p, p.e_ref)?;
    let alpha = alpha_from_strengths(theta, eta, p.constants.hbar).map(|r| r[0]).unwrap_or(1.0);
    let spec = RingSpec::with_bare_mass(1.0, 0.3 * std::f64::consts::TAU, alpha, p.constants);
    let e = |phi: f64| ring_levels(&RingSpec { flux_ext: phi, ..spec }, eta, 1);
    let analytic = persistent_current(&spec, eta, 1)?;
    let h = 1e-3 * spec.flux_quantum();
    let fd = -(e(spec.flux_ext + h)? - e(spec.flux_ext - h)?) / (2.0 * h);
    let scale = analytic.abs().max(spec.constants.hbar.powi(2) / (spec.m_star * spec.flux_quantum()));
    out.push(CheckEntry::measured(
        "ring.current_finite_difference",
        (fd - analytic).abs() / scale,
        1e-8,
        format!("eta = {eta}, ring alpha = {alpha}"),
    ));
    let shifted = RingSpec { flux_ext: spec.flux_ext + spec.flux_quantum(), ..spec };
    let period = (ring_levels(&shifted, eta, 0)? - ring_levels(&spec, eta, 1)?).abs() / ring_levels(&spec, eta, 1)?.abs().max(1e-300);
    out.push(CheckEntry::measured("ring.flux_periodicity", period, 1e-12, "phi -> phi + phi0, l -> l - 1"));
    Ok(())
}

/// Runs every check for `p`. Errors inside a check become failed entries.
pub fn run_verification(p: &ModelParams) -> Result<VerifyReport> {
    p.validate()?;
    let mut entries = Vec::new();
    let mut comparisons = Vec::new();
    let guard = |name: &str, r: Result<()>, entries: &mut Vec<CheckEntry>| {
        if let Err(e) = r {
            entries.push(CheckEntry::failed(name, e.to_string()));
        }
    };
    let r = check_algebra(p, &mut entries);
    guard("algebra", r, &mut entries);
    let r = check_spectrum(p, &mut entries, &mut comparisons);
    guard("spectrum.oracle_agreement", r, &mut entries);
    let r = check_bogoliubov(p, &mut entries);
    guard("spectrum.bogoliubov_vs_matrix", r, &mut entries);
    let r = check_commutative(p, &mut entries);
    guard("spectrum.commutative_recovery", r, &mut entries);
    let r = check_wavefunctions(&mut entries);
    guard("wavefunctions", r, &mut entries);
    let r = check_fractional(p, &mut entries);
    guard("fractional", r, &mut entries);
    let r = check_ring(p, &mut entries);
    guard("ring", r, &mut entries);

    let count = |s: CheckStatus| entries.iter().filter(|e| e.status == s).count();
    Ok(VerifyReport {
        params: *p,
        passed: count(CheckStatus::Pass),
        failed: count(CheckStatus::Fail),
        expected_divergence: count(CheckStatus::ExpectedDivergence),
        skipped: count(CheckStatus::Skipped),
        entries,
        comparisons,
    })
}
