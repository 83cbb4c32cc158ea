//! Independent eigensolvers for `H = p²/2m* − B L_z + K r²/2`.
//!
//! * [`radial_fd_eigensolve`]: cell-centred finite differences for the radial
//!   equation at fixed angular momentum, lowest eigenvalues by Sturm-sequence
//!   bisection, Richardson-extrapolated over `(N, 2N)`.
//! * [`fock_matrix_eigensolve`]: dense diagonalization of the Hamiltonian built
//!   from truncated-Fock `x`, `p` matrices.
//!
//! [`self_consistent_wrap`] closes either solver over the energy dependence of
//! the coefficients.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::build_heisenberg_rep;
use crate::error::{NcqmError, Result};
use crate::params::{effective_coefficients, ModelParams, PhysicalConstants};
use crate::spectra::{bisect, QuantumNumbers};

/// `e^{−ξ²/2}` at the outer boundary must fall below this.
pub const BOUNDARY_DECAY: f64 = 1e-8;
/// Default outer boundary in units of the oscillator length.
pub const DEFAULT_XI_MAX: f64 = 10.0;

/// Frozen Hamiltonian coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrozenCoefficients {
    pub m_star: f64,
    pub b_field: f64,
    pub k_elastic: f64,
}

impl FrozenCoefficients {
    fn validate(&self) -> Result<()> {
        if !(self.m_star > 0.0 && self.k_elastic > 0.0) || !self.b_field.is_finite() {
            return Err(NcqmError::Validation(format!(
                "oracles need m* > 0 and K > 0, got {self:?}"
            )));
        }
        Ok(())
    }

    /// `λ = √(m*K)/ħ` with `ξ² = λr²`.
    pub fn lambda(&self, c: &PhysicalConstants) -> f64 {
        (self.m_star * self.k_elastic).sqrt() / c.hbar
    }

    pub fn omega(&self) -> f64 {
        (self.k_elastic / self.m_star).sqrt()
    }

    /// `E = ħω(2n + |m| + 1) − ħBm`.
    pub fn analytic_level(&self, n: u32, m: i32, c: &PhysicalConstants) -> f64 {
        c.hbar * self.omega() * (2 * n as i64 + m.unsigned_abs() as i64 + 1) as f64 - c.hbar * self.b_field * m as f64
    }
}

/// Radial grid: outer radius and number of cells.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    pub r_max: f64,
    pub points: usize,
}

impl RadialGrid {
    /// Grid reaching `xi_max` oscillator lengths.
    pub fn for_coefficients(coeffs: &FrozenCoefficients, c: &PhysicalConstants, xi_max: f64, points: usize) -> Self {
        Self { r_max: xi_max / coeffs.lambda(c).sqrt(), points }
    }
}

/// Lowest `count` eigenvalues of a symmetric tridiagonal matrix by Sturm bisection.
fn tridiagonal_lowest(diag: &[f64], off: &[f64], count: usize) -> Vec<f64> {
    let n = diag.len();
    let below = |x: f64| -> usize {
        let mut negatives = 0;
        let mut d = 1.0;
        for i in 0..n {
            let coupling = if i == 0 { 0.0 } else { off[i - 1] * off[i - 1] / d };
            d = diag[i] - x - coupling;
            if d == 0.0 {
                d = -f64::EPSILON * (diag[i].abs() + x.abs()).max(f64::MIN_POSITIVE);
            }
            if d < 0.0 {
                negatives += 1;
            }
        }
        negatives
    };
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r = if i > 0 { off[i - 1].abs() } else { 0.0 } + if i + 1 < n { off[i].abs() } else { 0.0 };
        lo = lo.min(diag[i] - r);
        hi = hi.max(diag[i] + r);
    }
    (0..count.min(n))
        .map(|k| {
            let (mut a, mut b) = (lo, hi);
            loop {
                let mid = 0.5 * (a + b);
                if mid <= a || mid >= b {
                    break;
                }
                if below(mid) > k {
                    b = mid;
                } else {
                    a = mid;
                }
            }
            0.5 * (a + b)
        })
        .collect()
}

fn radial_fd_raw(coeffs: &FrozenCoefficients, m: i32, grid: &RadialGrid, count: usize, c: &PhysicalConstants) -> Vec<f64> {
    let n = grid.points;
    let h = grid.r_max / n as f64;
    let t = c.hbar * c.hbar / (2.0 * coeffs.m_star);
    let m2 = (m as f64) * (m as f64);
    let r = |i: usize| (i as f64 + 0.5) * h;
    let diag: Vec<f64> = (0..n)
        .map(|i| {
            let ri = r(i);
            let flux = ri - 0.5 * h + ri + 0.5 * h;
            t * flux / (h * h * ri) + t * m2 / (ri * ri) + 0.5 * coeffs.k_elastic * ri * ri
        })
        .collect();
    let off: Vec<f64> = (0..n - 1)
        .map(|i| -t * (r(i) + 0.5 * h) / (h * h * (r(i) * r(i + 1)).sqrt()))
        .collect();
    let shift = -c.hbar * coeffs.b_field * m as f64;
    tridiagonal_lowest(&diag, &off, count).into_iter().map(|e| e + shift).collect()
}

/// Lowest `count` levels at angular momentum `m` with frozen coefficients,
/// Richardson-extrapolated from `points` and `2·points` cells.
pub fn radial_fd_eigensolve(
    coeffs: &FrozenCoefficients,
    m: i32,
    grid: &RadialGrid,
    count: usize,
    c: &PhysicalConstants,
) -> Result<Vec<f64>> {
    coeffs.validate()?;
    if grid.points < 500 {
        return Err(NcqmError::Grid(format!("need at least 500 radial points, got {}", grid.points)));
    }
    let xi2 = coeffs.lambda(c) * grid.r_max * grid.r_max;
    let decay = (-0.5 * xi2).exp();
    if !(decay < BOUNDARY_DECAY) {
        return Err(NcqmError::Grid(format!(
            "boundary too close: e^(-xi^2/2) = {decay:e} at r_max = {}",
            grid.r_max
        )));
    }
    let coarse = radial_fd_raw(coeffs, m, grid, count, c);
    let fine = radial_fd_raw(coeffs, m, &RadialGrid { points: 2 * grid.points, ..*grid }, count, c);
    Ok(coarse.iter().zip(&fine).map(|(a, b)| (4.0 * b - a) / 3.0).collect())
}

/// Unextrapolated second-order levels, for convergence studies.
pub fn radial_fd_eigensolve_plain(
    coeffs: &FrozenCoefficients,
    m: i32,
    grid: &RadialGrid,
    count: usize,
    c: &PhysicalConstants,
) -> Result<Vec<f64>> {
    coeffs.validate()?;
    Ok(radial_fd_raw(coeffs, m, grid, count, c))
}

/// One matrix eigenvalue with its angular momentum label.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FockLevel {
    pub energy: f64,
    /// `⟨L_z⟩/ħ`, rounded.
    pub m: i32,
    /// Shift under `n_trunc → n_trunc + 5` stayed below `1e-8`.
    pub converged: bool,
}

/// Levels from the dense matrix oracle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FockSpectrum {
    pub n_trunc: usize,
    pub levels: Vec<FockLevel>,
    pub warnings: Vec<String>,
}

impl FockSpectrum {
    pub fn energies(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.energy).collect()
    }

    /// The `n`-th level (from zero) with label `m`.
    pub fn level(&self, n: u32, m: i32) -> Option<f64> {
        self.levels.iter().filter(|l| l.m == m).nth(n as usize).map(|l| l.energy)
    }
}

/// Eigenpairs of `H − εL_z` restricted to occupations `i + j ≤ n_trunc − 2`,
/// where the truncated ladder algebra is exact. Returns `(E, m)` pairs.
fn fock_levels(coeffs: &FrozenCoefficients, c: &PhysicalConstants, n_trunc: usize) -> Result<Vec<(f64, i32)>> {
    let omega = coeffs.omega();
    let rep_constants = PhysicalConstants { mass: coeffs.m_star, ..*c };
    let rep = build_heisenberg_rep(n_trunc, &rep_constants, omega)?;
    let o = &rep.ops;
    let kinetic = &(&(&o.px * &o.px) + &(&o.py * &o.py)) * (0.5 / coeffs.m_star);
    let potential = &(&(&o.x * &o.x) + &(&o.y * &o.y)) * (0.5 * coeffs.k_elastic);
    let lz = rep.angular_momentum();
    // A small extra field splits degenerate multiplets into L_z eigenstates.
    let eps = 1e-3 * omega / (n_trunc as f64);
    let h = &(&kinetic + &potential) - &(&lz * (coeffs.b_field + eps));
    let dense_h = h.to_dense();
    let dense_lz = lz.to_dense();
    // With the reference frequency at √(K/m*) the Hamiltonian conserves
    // i + j, so each shell is diagonalized on its own.
    let mut out = Vec::new();
    for shell in 0..n_trunc - 1 {
        let keep: Vec<usize> = (0..=shell).map(|i| i * n_trunc + (shell - i)).collect();
        let dim = keep.len();
        let sub = DMatrix::from_fn(dim, dim, |a, b| dense_h[(keep[a], keep[b])]);
        let lz_sub = DMatrix::from_fn(dim, dim, |a, b| dense_lz[(keep[a], keep[b])]);
        let eig = SymmetricEigen::new(sub);
        let lz_v = &lz_sub * &eig.eigenvectors;
        out.extend((0..dim).map(|k| {
            let lz_expect: Complex64 = eig.eigenvectors.column(k).dotc(&lz_v.column(k));
            let m = (lz_expect.re / c.hbar).round() as i32;
            (eig.eigenvalues[k] + eps * c.hbar * m as f64, m)
        }));
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(out)
}

/// Lowest `count` eigenvalues of the `n_trunc²`-state matrix, labelled by
/// angular momentum and checked against `n_trunc + 5`.
pub fn fock_matrix_eigensolve(
    n_trunc: usize,
    coeffs: &FrozenCoefficients,
    c: &PhysicalConstants,
    count: usize,
) -> Result<FockSpectrum> {
    coeffs.validate()?;
    if n_trunc < 20 {
        return Err(NcqmError::Validation(format!("matrix oracle needs n_trunc ≥ 20, got {n_trunc}")));
    }
    let base = fock_levels(coeffs, c, n_trunc)?;
    let bigger = fock_levels(coeffs, c, n_trunc + 5)?;
    if count > base.len() {
        return Err(NcqmError::Validation(format!("asked for {count} levels, truncation holds {}", base.len())));
    }
    let mut warnings = Vec::new();
    let levels = base
        .iter()
        .take(count)
        .enumerate()
        .map(|(k, &(energy, m))| {
            let shift = (bigger[k].0 - energy).abs();
            let converged = shift <= 1e-8 * energy.abs().max(1.0);
            if !converged {
                warnings.push(format!("level {k} moved by {shift:e} under n_trunc + 5"));
            }
            FockLevel { energy, m, converged }
        })
        .collect();
    Ok(FockSpectrum { n_trunc, levels, warnings })
}

/// Which eigensolver the self-consistent loop wraps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OracleKind {
    RadialFd { points: usize, xi_max: f64 },
    Fock { n_trunc: usize },
}

impl OracleKind {
    pub fn radial_default() -> Self {
        Self::RadialFd { points: 2000, xi_max: DEFAULT_XI_MAX }
    }

    pub fn fock_default() -> Self {
        Self::Fock { n_trunc: 20 }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::RadialFd { .. } => "radial_fd",
            Self::Fock { .. } => "fock_matrix",
        }
    }

    /// Level `(n, m_φ)` of the frozen Hamiltonian.
    pub fn level(&self, qn: &QuantumNumbers, coeffs: &FrozenCoefficients, c: &PhysicalConstants) -> Result<f64> {
        let m = qn.m_phi as i32;
        match *self {
            Self::RadialFd { points, xi_max } => {
                let grid = RadialGrid::for_coefficients(coeffs, c, xi_max, points);
                let levels = radial_fd_eigensolve(coeffs, m, &grid, qn.n as usize + 1, c)?;
                Ok(levels[qn.n as usize])
            }
            Self::Fock { n_trunc } => {
                let omega = coeffs.omega();
                let spectrum = fock_levels(coeffs, c, n_trunc)?;
                spectrum
                    .iter()
                    .filter(|l| l.1 == m)
                    .nth(qn.n as usize)
                    .map(|l| l.0)
                    .ok_or_else(|| NcqmError::Validation(format!(
                        "level ({}, {m}) not inside truncation {n_trunc} (ω = {omega})",
                        qn.n
                    )))
            }
        }
    }
}

/// Controls for [`self_consistent_wrap`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelfConsistentOptions {
    pub tol: f64,
    pub damping: f64,
    pub max_iter: usize,
    pub bracket: (f64, f64),
    /// Scan density for the bisection fallback.
    pub points_per_decade: usize,
}

impl Default for SelfConsistentOptions {
    fn default() -> Self {
        Self { tol: 1e-12, damping: 0.5, max_iter: 200, bracket: (1e-6, 1e6), points_per_decade: 10 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelfConsistentResult {
    pub energy: f64,
    pub iterations: usize,
    /// `fixed_point` or `bisection`.
    pub method: String,
    /// Fixed-point iterates.
    pub trace: Vec<f64>,
}

fn frozen_at(p: &ModelParams, energy: f64) -> Result<FrozenCoefficients> {
    let co = effective_coefficients(p, energy)?;
    Ok(FrozenCoefficients { m_star: co.m_star, b_field: co.b_h, k_elastic: co.k_h })
}

/// `E*` with `eigenvalue(coefficients(E*)) = E*`: damped fixed point first,
/// bracketed bisection on `E − eigenvalue(E)` if that does not settle.
pub fn self_consistent_wrap(
    solver: &OracleKind,
    p: &ModelParams,
    qn: &QuantumNumbers,
    opts: &SelfConsistentOptions,
) -> Result<SelfConsistentResult> {
    p.validate()?;
    let c = &p.constants;
    let eigen_at = |e: f64| -> Result<f64> { solver.level(qn, &frozen_at(p, e)?, c) };

    let start = if c.spring_k > 0.0 { c.hbar * c.omega() * qn.principal() } else { p.e_ref };
    let mut trace = vec![start];
    let mut e = start;
    let mut last_step = f64::INFINITY;
    for iter in 1..=opts.max_iter {
        let Ok(target) = eigen_at(e) else { break };
        let gap = target - e;
        if gap.abs() <= opts.tol * e.abs() {
            return Ok(SelfConsistentResult { energy: e, iterations: iter, method: "fixed_point".into(), trace });
        }
        if !(gap.abs() < 2.0 * last_step) || !target.is_finite() {
            break;
        }
        last_step = gap.abs();
        e += opts.damping * gap;
        // Drifting into the trivial root at E = 0.
        if !(e >= opts.bracket.0) {
            break;
        }
        trace.push(e);
    }

    let g = |x: f64| -> Result<f64> { Ok(x - eigen_at(x)?) };
    let (lo, hi) = opts.bracket;
    let steps = ((hi / lo).log10() * opts.points_per_decade as f64).ceil() as usize;
    let ratio = (hi / lo).powf(1.0 / steps as f64);
    let mut prev: Option<(f64, f64)> = None;
    for i in 0..=steps {
        let x = lo * ratio.powi(i as i32);
        let Ok(gx) = g(x) else {
            prev = None;
            continue;
        };
        if let Some((px, pg)) = prev {
            if pg.signum() != gx.signum() {
                let root = bisect(&g, px, x, pg)?;
                return Ok(SelfConsistentResult {
                    energy: root,
                    iterations: trace.len(),
                    method: "bisection".into(),
                    trace,
                });
            }
        }
        prev = Some((x, gx));
    }
    Err(NcqmError::Convergence {
        iterations: trace.len(),
        detail: format!("self-consistent energy not found; fixed-point trace {trace:?}"),
    })
}

/// One row of an oracle cross-check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleComparison {
    pub params: ModelParams,
    pub level_index: usize,
    pub oracle_a: f64,
    pub oracle_b: f64,
    pub closed_form: f64,
    pub max_rel_diff: f64,
}

impl OracleComparison {
    pub fn new(params: ModelParams, level_index: usize, oracle_a: f64, oracle_b: f64, closed_form: f64) -> Self {
        let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(f64::MIN_POSITIVE);
        let max_rel_diff = rel(oracle_a, closed_form).max(rel(oracle_b, closed_form)).max(rel(oracle_a, oracle_b));
        Self { params, level_index, oracle_a, oracle_b, closed_form, max_rel_diff }
    }
}
