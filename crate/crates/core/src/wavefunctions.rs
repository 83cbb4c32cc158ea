//! Radial wave functions, ground states and grid diagnostics (modified norm,
//! orthogonality kernel, probability current).
//!
//! With `ξ² = λ r²`, `λ = √(m*K_h)/ħ`, the stationary radial equation becomes
//!
//! ```text
//! ξ² R'' + ξ R' + (C ξ² − ξ⁴ − m_φ²) R = 0,   C = 2√m* (E + m_φħB_h) / (ħ√K_h).
//! ```
//!
//! Near the origin the quartic term is negligible and `R ≈ J_{m_φ}(√C ξ)`;
//! the regular global solution exists for `C = 2(2n + m_φ + 1)` and is a
//! Gaussian times a generalized Laguerre polynomial.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{NcqmError, Result};
use crate::params::{effective_coefficients, nc_strengths, Mechanism, ModelParams, PhysicalConstants};
use crate::specfun::{bessel_j, laguerre, ln_factorial};
use crate::spectra::{eo_alpha1_radial_params, QuantumNumbers};

/// Fraction of `C` below which `ξ²` counts as inside the Bessel window.
pub const DEFAULT_BESSEL_WINDOW: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Bessel,
    Laguerre,
}

/// `J_{m_φ}(√C ξ)`, the solution regular at the origin when `ξ² ≪ C`.
pub fn radial_bessel(m_phi: u32, c_big: f64, xi: f64) -> Result<f64> {
    if !(c_big > 0.0) {
        return Err(NcqmError::Domain(format!("C must be positive, got {c_big}")));
    }
    bessel_j(m_phi, c_big.sqrt() * xi)
}

/// Whether `ξ² ≤ window · C`.
pub fn in_bessel_window(c_big: f64, xi: f64, window: f64) -> bool {
    xi * xi <= window * c_big
}

/// `e^{−ξ²/2} ξ^{m_φ} L_n^{(m_φ)}(ξ²)`.
pub fn radial_laguerre(n: u32, m_phi: u32, xi: f64) -> f64 {
    let u = xi * xi;
    (-0.5 * u).exp() * xi.powi(m_phi as i32) * laguerre(n, m_phi as f64, u)
}

/// Amplitude `c = √(2λ n!/(n + m_φ)!)` with `∫₀^∞ [c R(ξ(r))]² r dr = 1`.
pub fn normalization_constant(n: u32, m_phi: u32, lambda_scale: f64) -> Result<f64> {
    Ok(amplitude_squared(n, m_phi, lambda_scale)?.sqrt())
}

/// `2λ n!/(n + m_φ)!`, the square of [`normalization_constant`].
pub fn amplitude_squared(n: u32, m_phi: u32, lambda_scale: f64) -> Result<f64> {
    if !(lambda_scale > 0.0) {
        return Err(NcqmError::Domain(format!("lambda must be positive, got {lambda_scale}")));
    }
    Ok(2.0 * lambda_scale * (ln_factorial(n) - ln_factorial(n + m_phi)).exp())
}

/// A radial solution with its scale and normalization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialSolution {
    pub regime: Regime,
    pub n: u32,
    pub m_phi: u32,
    /// `ξ² = lambda_scale · r²`.
    pub lambda_scale: f64,
    /// Amplitude; one in the (non-normalizable) Bessel regime.
    pub c_norm: f64,
    pub c_big: f64,
}

impl RadialSolution {
    /// Normalized Laguerre solution for a given scale.
    pub fn laguerre(qn: &QuantumNumbers, lambda_scale: f64) -> Result<Self> {
        Ok(Self {
            regime: Regime::Laguerre,
            n: qn.n,
            m_phi: qn.m_phi,
            lambda_scale,
            c_norm: normalization_constant(qn.n, qn.m_phi, lambda_scale)?,
            c_big: 2.0 * qn.principal(),
        })
    }

    fn classify(qn: &QuantumNumbers, lambda_scale: f64, c_big: f64, rel_tol: f64) -> Result<Self> {
        let quantized = 2.0 * qn.principal();
        if (c_big - quantized).abs() <= rel_tol * quantized {
            let mut s = Self::laguerre(qn, lambda_scale)?;
            s.c_big = c_big;
            Ok(s)
        } else {
            Ok(Self { regime: Regime::Bessel, n: qn.n, m_phi: qn.m_phi, lambda_scale, c_norm: 1.0, c_big })
        }
    }

    /// Solution of the particle-energy (or fixed-ε) equation at `energy`.
    /// Laguerre when `C` hits `2(2n + m_φ + 1)` within `rel_tol`, else Bessel.
    pub fn from_energy(qn: &QuantumNumbers, energy: f64, p: &ModelParams, rel_tol: f64) -> Result<Self> {
        let co = effective_coefficients(p, energy)?;
        if !(co.k_h > 0.0) {
            return Err(NcqmError::Domain(format!("K_h = {} must be positive", co.k_h)));
        }
        let h = p.constants.hbar;
        let lambda = (co.m_star * co.k_h).sqrt() / h;
        let c_big = 2.0 * co.m_star.sqrt() * (energy + qn.m_phi as f64 * h * co.b_h) / (h * co.k_h.sqrt());
        Self::classify(qn, lambda, c_big, rel_tol)
    }

    /// Energy-operator `α = 1` equation: `λ = √(mK_I) E/ħ²`, `C = σ`.
    pub fn eo_alpha1(qn: &QuantumNumbers, energy: f64, b_i: f64, k_i: f64, c: &PhysicalConstants, rel_tol: f64) -> Result<Self> {
        let r = eo_alpha1_radial_params(energy, qn, b_i, k_i, c)?;
        Self::classify(qn, r.xi_scale * r.xi_scale, r.sigma, rel_tol)
    }

    pub fn xi(&self, r: f64) -> f64 {
        self.lambda_scale.sqrt() * r
    }

    pub fn eval(&self, r: f64) -> Result<f64> {
        let xi = self.xi(r);
        match self.regime {
            Regime::Laguerre => Ok(self.c_norm * radial_laguerre(self.n, self.m_phi, xi)),
            Regime::Bessel => radial_bessel(self.m_phi, self.c_big, xi),
        }
    }
}

/// 8th-order central differences `(f'(x), f''(x))`.
pub fn central_derivatives<F: Fn(f64) -> f64>(f: &F, x: f64, h: f64) -> (f64, f64) {
    const D1: [f64; 4] = [4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0];
    const D2: [f64; 4] = [8.0 / 5.0, -1.0 / 5.0, 8.0 / 315.0, -1.0 / 560.0];
    let f0 = f(x);
    let mut d1 = 0.0;
    let mut d2 = -205.0 / 72.0 * f0;
    for k in 0..4 {
        let s = (k + 1) as f64 * h;
        let (fp, fm) = (f(x + s), f(x - s));
        d1 += D1[k] * (fp - fm);
        d2 += D2[k] * (fp + fm);
    }
    (d1 / h, d2 / (h * h))
}

/// Largest ODE residual on `xi_points`, divided by the largest sum of term
/// magnitudes `|ξ²R''| + |ξR'| + |(Cξ² − ξ⁴ − m²)R|`.
pub fn radial_ode_residual<F: Fn(f64) -> f64>(f: F, c_big: f64, m_phi: u32, xi_points: &[f64], h: f64) -> f64 {
    let m2 = (m_phi * m_phi) as f64;
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for &xi in xi_points {
        let (d1, d2) = central_derivatives(&f, xi, h);
        let x2 = xi * xi;
        let terms = [x2 * d2, xi * d1, (c_big * x2 - x2 * x2 - m2) * f(xi)];
        worst = worst.max(terms.iter().sum::<f64>().abs());
        scale = scale.max(terms.iter().map(|t| t.abs()).sum());
    }
    if scale == 0.0 {
        worst
    } else {
        worst / scale
    }
}

fn require_ec(p: &ModelParams, oscillator: bool) -> Result<()> {
    p.validate()?;
    if p.mechanism != Mechanism::Ec {
        return Err(NcqmError::Usage(format!("needs mechanism ec, got {}", p.mechanism)));
    }
    let k = p.constants.spring_k;
    if oscillator && !(k > 0.0) {
        return Err(NcqmError::Usage("needs spring_k > 0".into()));
    }
    if !oscillator && k != 0.0 {
        return Err(NcqmError::Usage("needs spring_k = 0".into()));
    }
    Ok(())
}

/// Free ground state `exp[−√(mk₀/8ħ²)(E/E₀)^α r²]`, `k₀ = η₀²/4mħ²` (unnormalized).
pub fn ground_state_free(r: f64, energy: f64, p: &ModelParams) -> Result<f64> {
    require_ec(p, false)?;
    let c = &p.constants;
    let k0 = p.eta0 * p.eta0 / (4.0 * c.mass * c.hbar * c.hbar);
    let (_, eta) = nc_strengths(p, energy)?;
    let ratio = if p.eta0 == 0.0 { 0.0 } else { eta / p.eta0 };
    Ok((-(c.mass * k0 / (8.0 * c.hbar * c.hbar)).sqrt() * ratio * r * r).exp())
}

/// `ω_eff = ω √{[1 + (η₀²/8m²ω²ħ²)x^{2α}] / [1 + (m²ω²θ₀²/4ħ²)x^{2β}]}`, `x = E/E₀`,
/// so that `mω_eff/ħ = √(m*K_h)/ħ`.
pub fn omega_eff(energy: f64, p: &ModelParams) -> Result<f64> {
    require_ec(p, true)?;
    let c = &p.constants;
    let w = c.omega();
    let (theta, eta) = nc_strengths(p, energy)?;
    let h2 = c.hbar * c.hbar;
    let num = 1.0 + eta * eta / (8.0 * c.mass * c.mass * w * w * h2);
    let den = 1.0 + c.mass * c.mass * w * w * theta * theta / (4.0 * h2);
    Ok(w * (num / den).sqrt())
}

/// Oscillator ground state `exp[−mω_eff r²/2ħ]` (unnormalized).
pub fn ground_state_oscillator(r: f64, energy: f64, p: &ModelParams) -> Result<f64> {
    let w = omega_eff(energy, p)?;
    let c = &p.constants;
    Ok((-c.mass * w * r * r / (2.0 * c.hbar)).exp())
}

/// Scale of spatial nonlocality, `θ(E)/2`.
pub fn nonlocality_bound(energy: f64, p: &ModelParams) -> Result<f64> {
    Ok(0.5 * nc_strengths(p, energy)?.0)
}

/// Uniform rectangular grid, row-major with `x` fastest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid2 {
    pub nx: usize,
    pub ny: usize,
    pub x_min: f64,
    pub y_min: f64,
    pub dx: f64,
    pub dy: f64,
}

impl Grid2 {
    /// `n × n` grid covering `[−extent, extent]²`.
    pub fn square(extent: f64, n: usize) -> Result<Self> {
        if n < 3 || !(extent > 0.0) {
            return Err(NcqmError::Grid(format!("need n ≥ 3 and extent > 0, got {n}, {extent}")));
        }
        let h = 2.0 * extent / (n - 1) as f64;
        Ok(Self { nx: n, ny: n, x_min: -extent, y_min: -extent, dx: h, dy: h })
    }

    pub fn validate(&self) -> Result<()> {
        if self.nx < 3 || self.ny < 3 || !(self.dx > 0.0) || !(self.dy > 0.0) {
            return Err(NcqmError::Grid(format!("invalid grid {self:?}")));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn point(&self, idx: usize) -> (f64, f64) {
        let (i, j) = (idx % self.nx, idx / self.nx);
        (self.x_min + i as f64 * self.dx, self.y_min + j as f64 * self.dy)
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        (0..self.len()).map(|k| self.point(k))
    }

    pub fn sample<F: Fn(f64, f64) -> Complex64>(&self, f: F) -> GridField {
        GridField { grid: *self, samples: self.points().map(|(x, y)| f(x, y)).collect() }
    }

    pub fn sample_real<F: Fn(f64, f64) -> f64>(&self, f: F) -> Vec<f64> {
        self.points().map(|(x, y)| f(x, y)).collect()
    }

    fn check(&self, len: usize, what: &str) -> Result<()> {
        self.validate()?;
        if len != self.len() {
            return Err(NcqmError::Validation(format!("{what} has {len} samples, grid has {}", self.len())));
        }
        Ok(())
    }
}

/// Complex samples on a [`Grid2`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridField {
    pub grid: Grid2,
    pub samples: Vec<Complex64>,
}

/// `N = Σ Ψ*(1 − ∂V/∂E)Ψ dA`. Fails where `∂V/∂E > 1`.
pub fn modified_norm(field: &GridField, dv_de: &[f64]) -> Result<f64> {
    field.grid.check(field.samples.len(), "field")?;
    field.grid.check(dv_de.len(), "dV/dE")?;
    if let Some((k, v)) = dv_de.iter().enumerate().find(|(_, v)| !(**v <= 1.0)) {
        let (x, y) = field.grid.point(k);
        return Err(NcqmError::Normalizability(format!("dV/dE = {v} > 1 at ({x}, {y})")));
    }
    let area = field.grid.dx * field.grid.dy;
    let n: f64 = field.samples.iter().zip(dv_de).map(|(psi, d)| psi.norm_sqr() * (1.0 - d)).sum();
    Ok(n * area)
}

/// `[V(E₂) − V(E₁)]/(E₂ − E₁)` pointwise.
pub fn orthogonality_kernel(v_e1: &[f64], v_e2: &[f64], e1: f64, e2: f64) -> Result<Vec<f64>> {
    if v_e1.len() != v_e2.len() {
        return Err(NcqmError::Validation("potential samples differ in length".into()));
    }
    if e1 == e2 {
        return Err(NcqmError::Degenerate("equal energies: use dV/dE and modified_norm".into()));
    }
    Ok(v_e1.iter().zip(v_e2).map(|(a, b)| (b - a) / (e2 - e1)).collect())
}

/// Prefactor convention for [`probability_current`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurrentConvention {
    /// `J = −(ħ²/2im)[Ψ*∇Φ − Φ∇Ψ*]`.
    AsWritten,
    /// `J = (ħ/2im)[Ψ*∇Φ − Φ∇Ψ*]`, which satisfies the continuity equation
    /// for `H = p²/2m + V`.
    Standard,
}

/// Vector samples on a [`Grid2`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorField {
    pub grid: Grid2,
    pub x: Vec<Complex64>,
    pub y: Vec<Complex64>,
}

/// Second-order differences along one axis; one-sided at the edges.
fn gradient_axis(values: &[Complex64], grid: &Grid2, along_x: bool) -> Vec<Complex64> {
    let (n, h, stride) = if along_x { (grid.nx, grid.dx, 1) } else { (grid.ny, grid.dy, grid.nx) };
    let mut out = vec![Complex64::new(0.0, 0.0); values.len()];
    for (k, o) in out.iter_mut().enumerate() {
        let pos = if along_x { k % grid.nx } else { k / grid.nx };
        let at = |d: isize| values[(k as isize + d * stride as isize) as usize];
        *o = if pos == 0 {
            (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h)
        } else if pos == n - 1 {
            (3.0 * at(0) - 4.0 * at(-1) + at(-2)) / (2.0 * h)
        } else {
            (at(1) - at(-1)) / (2.0 * h)
        };
    }
    out
}

/// Current between states `Ψ` and `Φ` by central differences.
pub fn probability_current(
    psi: &GridField,
    phi: &GridField,
    c: &PhysicalConstants,
    convention: CurrentConvention,
) -> Result<VectorField> {
    if psi.grid != phi.grid {
        return Err(NcqmError::Validation("Ψ and Φ live on different grids".into()));
    }
    let grid = psi.grid;
    grid.check(psi.samples.len(), "psi")?;
    grid.check(phi.samples.len(), "phi")?;
    let prefactor = match convention {
        CurrentConvention::AsWritten => -c.hbar * c.hbar / (2.0 * c.mass),
        CurrentConvention::Standard => c.hbar / (2.0 * c.mass),
    } / Complex64::i();
    let psi_conj: Vec<Complex64> = psi.samples.iter().map(|z| z.conj()).collect();
    let component = |along_x: bool| {
        let d_phi = gradient_axis(&phi.samples, &grid, along_x);
        let d_psi_conj = gradient_axis(&psi_conj, &grid, along_x);
        (0..grid.len())
            .map(|k| prefactor * (psi_conj[k] * d_phi[k] - phi.samples[k] * d_psi_conj[k]))
            .collect::<Vec<_>>()
    };
    Ok(VectorField { grid, x: component(true), y: component(false) })
}

/// `∇·J` with the same stencils as [`probability_current`].
pub fn divergence(field: &VectorField) -> Vec<Complex64> {
    let dx = gradient_axis(&field.x, &field.grid, true);
    let dy = gradient_axis(&field.y, &field.grid, false);
    dx.iter().zip(&dy).map(|(a, b)| a + b).collect()
}
