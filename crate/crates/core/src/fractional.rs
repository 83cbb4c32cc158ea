//! Fractional derivatives and integrals: Caputo (series form and on the
//! exponential), Liouville's exponential rule, Riemann–Liouville by
//! quadrature, Grünwald–Letnikov sums, and the plane-wave eigenvalue
//! `D_t^α e^{−iEt/ħ} = (−iE/ħ)^α e^{−iEt/ħ}` used by the energy-operator model.
//!
//! Complex powers use the principal branch, argument in `(−π, π]`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{NcqmError, Result};
use crate::params::{Mechanism, ModelParams, PhysicalConstants};
use crate::quadrature::integrate;
use crate::specfun::{gamma, ln_gamma, mittag_leffler, mittag_leffler_real, SeriesControl};

/// `f(x) = Σ a_k x^{kα}` on `[0, radius)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerSeriesFn {
    pub alpha_grid: f64,
    pub coeffs: Vec<f64>,
    pub radius: f64,
}

impl PowerSeriesFn {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha_grid > 0.0) || !(self.radius > 0.0) || self.coeffs.iter().any(|a| !a.is_finite()) {
            return Err(NcqmError::Validation(format!("invalid power series {self:?}")));
        }
        Ok(())
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, a)| a * x.powf(k as f64 * self.alpha_grid))
            .sum()
    }
}

/// Caputo derivative of order `α = f.alpha_grid`:
/// `Σ a_{k+1} Γ(1 + (k+1)α)/Γ(1 + kα) x^{kα}`.
pub fn caputo_series_derivative(f: &PowerSeriesFn, x: f64) -> Result<f64> {
    f.validate()?;
    if !(x >= 0.0 && x < f.radius) {
        return Err(NcqmError::Domain(format!("x = {x} outside [0, {})", f.radius)));
    }
    let a = f.alpha_grid;
    let mut sum = 0.0;
    for (k, coeff) in f.coeffs.iter().enumerate().skip(1) {
        if *coeff == 0.0 {
            continue;
        }
        let k = k as f64;
        let ratio = (ln_gamma(1.0 + k * a)? - ln_gamma(1.0 + (k - 1.0) * a)?).exp();
        sum += coeff * ratio * x.powf((k - 1.0) * a);
    }
    Ok(sum)
}

fn check_order_unit(order: f64) -> Result<()> {
    if !(order > 0.0 && order <= 1.0) {
        return Err(NcqmError::Domain(format!("order must lie in (0, 1], got {order}")));
    }
    Ok(())
}

/// Caputo derivative of `e^x`: `x^{1−α} E_{1,2−α}(x)`.
pub fn caputo_exp(order: f64, x: f64) -> Result<f64> {
    check_order_unit(order)?;
    if !(x >= 0.0) {
        return Err(NcqmError::Domain(format!("x must be non-negative, got {x}")));
    }
    if x == 0.0 {
        return Ok(if order == 1.0 { 1.0 } else { 0.0 });
    }
    Ok(x.powf(1.0 - order) * mittag_leffler_real(1.0, 2.0 - order, x, &SeriesControl::default())?)
}

/// Term-by-term Caputo derivative of `e^x`: `Σ_{n≥1} x^{n−α}/Γ(1 + n − α)`.
pub fn caputo_exp_series(order: f64, x: f64, ctl: &SeriesControl) -> Result<f64> {
    check_order_unit(order)?;
    if !(x >= 0.0) {
        return Err(NcqmError::Domain(format!("x must be non-negative, got {x}")));
    }
    if x == 0.0 {
        return Ok(if order == 1.0 { 1.0 } else { 0.0 });
    }
    let lx = x.ln();
    let mut sum = 0.0;
    for n in 1..=ctl.max_terms {
        let p = n as f64 - order;
        let term = (p * lx - ln_gamma(1.0 + p)?).exp();
        sum += term;
        if p > x && term <= ctl.abs_tol + ctl.rel_tol * sum {
            return Ok(sum);
        }
    }
    Err(NcqmError::Convergence {
        iterations: ctl.max_terms,
        detail: format!("Caputo exponential series at x = {x}"),
    })
}

/// Liouville's rule `D^α e^{kx} = k^α e^{kx}`, `k ≥ 0`.
pub fn liouville_exp(order: f64, k: f64, x: f64) -> Result<f64> {
    if !(k >= 0.0) {
        return Err(NcqmError::Domain(format!("Liouville rule needs k ≥ 0, got {k}")));
    }
    if !(order > 0.0) {
        return Err(NcqmError::Domain(format!("order must be positive, got {order}")));
    }
    Ok(k.powf(order) * (k * x).exp())
}

/// `δⁿ_h f(x)`, the central n-th difference.
fn central_difference<F: Fn(f64) -> Result<f64>>(f: &F, n: u32, x: f64, h: f64) -> Result<f64> {
    let mut sum = 0.0;
    let mut binom = 1.0;
    for j in 0..=n {
        if j > 0 {
            binom *= (n - j + 1) as f64 / j as f64;
        }
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * binom * f(x + (0.5 * n as f64 - j as f64) * h)?;
    }
    Ok(sum / h.powi(n as i32))
}

/// Riemann–Liouville operator of order `ν` with `n − 1 < ν < n`:
///
/// ```text
/// (1/Γ(n − ν)) dⁿ/dxⁿ ∫₀^x f(τ)(x − τ)^{n−ν−1} dτ.
/// ```
///
/// The endpoint singularity is removed with `s = (x − τ)^{n−ν}`; the outer
/// derivative uses Richardson-extrapolated central differences. As `ν → 0⁺`
/// this returns `f(x)`; as `ν → n⁻` it tends to `f⁽ⁿ⁾(x)`.
pub fn riemann_liouville_integral<F: Fn(f64) -> f64>(f: F, nu: f64, x: f64, quad: &SeriesControl) -> Result<f64> {
    if !(nu > 0.0) || nu == nu.floor() {
        return Err(NcqmError::Domain(format!("order must be positive and non-integer, got {nu}")));
    }
    if !(x > 0.0) {
        return Err(NcqmError::Domain(format!("x must be positive, got {x}")));
    }
    let n = nu.ceil() as u32;
    let p = n as f64 - nu;
    let inner = |y: f64| -> Result<f64> {
        if y <= 0.0 {
            return Ok(0.0);
        }
        let v = integrate(|s| f(y - s.powf(1.0 / p)), 0.0, y.powf(p), quad)?;
        Ok(v / p)
    };
    let h = 1e-3 * x / n as f64;
    let coarse = central_difference(&inner, n, x, h)?;
    let fine = central_difference(&inner, n, x, 0.5 * h)?;
    Ok((4.0 * fine - coarse) / 3.0 / gamma(p)?)
}

/// Grünwald–Letnikov sum `h^{−α} Σ_{j=0}^{⌊x/h⌋} w_j f(x − jh)` with
/// `w_j = (−1)^j C(α, j)` from `w_j = w_{j−1}(1 − (α + 1)/j)`.
pub fn grunwald_letnikov<F: Fn(f64) -> f64>(f: F, order: f64, x: f64, h: f64) -> Result<f64> {
    if !(h > 0.0) || !(order > 0.0) || !(x >= 0.0) {
        return Err(NcqmError::Validation(format!("need h > 0, order > 0, x ≥ 0; got {h}, {order}, {x}")));
    }
    let steps = (x / h + 1e-9).floor() as usize;
    let mut w = 1.0;
    let mut sum = f(x);
    for j in 1..=steps {
        w *= 1.0 - (order + 1.0) / j as f64;
        sum += w * f(x - j as f64 * h);
    }
    Ok(sum / h.powf(order))
}

/// Grünwald–Letnikov estimate of the Caputo derivative (`order < 1`):
/// the sum applied to `f − f(0)`, Richardson-extrapolated over `(h, h/2)`.
pub fn grunwald_letnikov_caputo<F: Fn(f64) -> f64>(f: F, order: f64, x: f64, h: f64) -> Result<f64> {
    let f0 = f(0.0);
    let g = |t: f64| f(t) - f0;
    let coarse = grunwald_letnikov(g, order, x, h)?;
    let fine = grunwald_letnikov(g, order, x, 0.5 * h)?;
    Ok(2.0 * fine - coarse)
}

/// `a_α` with `D_t^α e^{−iEt/ħ} = a_α e^{−iEt/ħ}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FractionalEigenvalue {
    pub order: f64,
    pub value: Complex64,
}

/// `z^a` on the principal branch; integer exponents use repeated
/// multiplication so that `(−i)² = −1` exactly.
pub fn principal_pow(z: Complex64, a: f64) -> Complex64 {
    if a == a.floor() && a.abs() <= 64.0 {
        let mut out = Complex64::new(1.0, 0.0);
        for _ in 0..a.abs() as u32 {
            out *= z;
        }
        return if a < 0.0 { out.inv() } else { out };
    }
    if z == Complex64::new(0.0, 0.0) {
        return z;
    }
    // A negative real axis reached with a signed zero must still give arg π.
    let arg = if z.arg() <= -std::f64::consts::PI { std::f64::consts::PI } else { z.arg() };
    Complex64::from_polar(z.norm().powf(a), a * arg)
}

/// `a_α = (−iE/ħ)^α`.
pub fn plane_wave_eigenvalue(order: f64, energy: f64, c: &PhysicalConstants) -> Result<FractionalEigenvalue> {
    if !(energy > 0.0) || !(order > 0.0) {
        return Err(NcqmError::Domain(format!("need E > 0 and order > 0, got {energy}, {order}")));
    }
    let z = Complex64::new(0.0, -energy / c.hbar);
    Ok(FractionalEigenvalue { order, value: principal_pow(z, order) })
}

/// How `a_{2α}` relates to `a_α²` under two readings of the power.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompositionReport {
    pub a_alpha_squared: Complex64,
    /// `exp(2α Log z)`.
    pub a_two_alpha: Complex64,
    /// `(z²)^α`, taking the principal branch after squaring.
    pub a_of_squared_base: Complex64,
    /// `|a_α² − exp(2α Log z)|`; zero on every branch.
    pub exp_log_gap: f64,
    /// `|a_α² − (z²)^α|`; nonzero unless `α` is an integer.
    pub squared_base_gap: f64,
}

pub fn composition_report(order: f64, energy: f64, c: &PhysicalConstants) -> Result<CompositionReport> {
    let a = plane_wave_eigenvalue(order, energy, c)?.value;
    let a2 = plane_wave_eigenvalue(2.0 * order, energy, c)?.value;
    let z = Complex64::new(0.0, -energy / c.hbar);
    let sq = principal_pow(z * z, order);
    Ok(CompositionReport {
        a_alpha_squared: a * a,
        a_two_alpha: a2,
        a_of_squared_base: sq,
        exp_log_gap: (a * a - a2).norm(),
        squared_base_gap: (a * a - sq).norm(),
    })
}

/// Caputo derivative of `e^{λt}`, `λ t^{1−α} E_{1,2−α}(λt)`, next to the
/// eigenvalue form `λ^α e^{λt}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CaputoPlaneWave {
    pub caputo: Complex64,
    pub eigen_form: Complex64,
    pub gap: f64,
}

pub fn caputo_plane_wave(order: f64, lambda: Complex64, t: f64) -> Result<CaputoPlaneWave> {
    check_order_unit(order)?;
    if !(t > 0.0) {
        return Err(NcqmError::Domain(format!("t must be positive, got {t}")));
    }
    let ml = mittag_leffler(1.0, 2.0 - order, lambda * t, &SeriesControl::default())?;
    let caputo = lambda * t.powf(1.0 - order) * ml;
    let eigen_form = principal_pow(lambda, order) * (lambda * t).exp();
    Ok(CaputoPlaneWave { caputo, eigen_form, gap: (caputo - eigen_form).norm() })
}

/// `(η-coefficient, θ-coefficient)` of the energy-operator cases:
/// Case I `η₀(iħ/ε₀)^α`, `θ₀(iħ/ε₀)^β`; Case II `η₀(−ħ²/2mε₀)^α`, `θ₀(−ħ²/2mε₀)^β`.
pub fn eo_coefficients(p: &ModelParams) -> Result<(Complex64, Complex64)> {
    p.validate()?;
    let c = &p.constants;
    let base = match p.mechanism {
        Mechanism::EoI => Complex64::new(0.0, c.hbar / p.e_ref),
        Mechanism::EoII => Complex64::new(-c.hbar * c.hbar / (2.0 * c.mass * p.e_ref), 0.0),
        other => {
            return Err(NcqmError::Usage(format!("energy-operator coefficients need eo_i or eo_ii, got {other}")))
        }
    };
    Ok((p.eta0 * principal_pow(base, p.alpha_exp), p.theta0 * principal_pow(base, p.beta_exp)))
}
