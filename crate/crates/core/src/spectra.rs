//! Energy levels for the three mechanisms.
//!
//! For the particle-energy mechanism the levels solve the transcendental
//! quantization condition
//!
//! ```text
//! (ħ/√m*) (2n + m_φ + 1) = [E + m_φ ħ B_h(E)] / √K_h(E)
//! ```
//!
//! which is handled by a geometric bracketing scan followed by bisection.

use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::error::{NcqmError, Result};
use crate::params::{effective_coefficients, EffectiveCoefficients, Mechanism, ModelParams, PhysicalConstants};
use crate::specfun::beta;

/// Radial/angular indices `(n, m_φ)` and quasiparticle occupancies `(n_α, n_β)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QuantumNumbers {
    pub n: u32,
    pub m_phi: u32,
    pub n_alpha: u32,
    pub n_beta: u32,
}

impl QuantumNumbers {
    /// Radial labels with the matching occupancies `n_α = n + m_φ`, `n_β = n`,
    /// so that `n_α + n_β + 1 = 2n + m_φ + 1`.
    pub fn radial(n: u32, m_phi: u32) -> Self {
        Self { n, m_phi, n_alpha: n + m_phi, n_beta: n }
    }

    /// Occupancy labels; the radial pair is `n = n_β`, `m_φ = n_α − n_β` when
    /// that is non-negative, else zero.
    pub fn occupancies(n_alpha: u32, n_beta: u32) -> Self {
        Self {
            n: n_beta.min(n_alpha),
            m_phi: n_alpha.saturating_sub(n_beta),
            n_alpha,
            n_beta,
        }
    }

    /// `2n + m_φ + 1`.
    pub fn principal(&self) -> f64 {
        (2 * self.n + self.m_phi + 1) as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumMethod {
    ClosedForm,
    RootFind,
    FirstOrder,
}

impl SpectrumMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::ClosedForm => "closed_form",
            Self::RootFind => "root_find",
            Self::FirstOrder => "first_order",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumResult {
    pub energy: f64,
    pub method: SpectrumMethod,
    /// Quantization-condition residual at `energy` (zero for closed forms).
    pub residual: f64,
    pub bracket: (f64, f64),
    /// Sign changes seen in the scan; above one means several branches.
    pub roots_found: usize,
}

fn require(p: &ModelParams, mechanism: Mechanism) -> Result<()> {
    p.validate()?;
    if p.mechanism != mechanism {
        return Err(NcqmError::Usage(format!(
            "operation needs mechanism {mechanism}, parameters have {}",
            p.mechanism
        )));
    }
    Ok(())
}

/// `Ω = ω_h + B_h` at fluctuation energy `eps`. Reduces to
/// `B_e(1 + 1/√2)` for the free particle.
pub fn sqf_frequency(p: &ModelParams, eps: f64) -> Result<f64> {
    require(p, Mechanism::Sqf)?;
    let c = effective_coefficients(p, eps)?;
    Ok(crate::algebra::bogoliubov_frequency(c.omega_h, c.b_h))
}

/// `E = ħΩ(n_α + n_β + 1)` for the free particle.
pub fn sqf_free_spectrum(p: &ModelParams, eps: f64, qn: &QuantumNumbers) -> Result<f64> {
    require(p, Mechanism::Sqf)?;
    if p.constants.spring_k != 0.0 {
        return Err(NcqmError::Usage("free-particle spectrum needs spring_k = 0".into()));
    }
    Ok(p.constants.hbar * sqf_frequency(p, eps)? * (qn.n_alpha + qn.n_beta + 1) as f64)
}

/// `E = ħΩ(n_α + n_β + 1)` with `Ω = √(K_h/m*) + B_h` for the oscillator.
pub fn sqf_oscillator_spectrum(p: &ModelParams, eps: f64, qn: &QuantumNumbers) -> Result<f64> {
    require(p, Mechanism::Sqf)?;
    if !(p.constants.spring_k > 0.0) {
        return Err(NcqmError::Usage("oscillator spectrum needs spring_k > 0".into()));
    }
    Ok(p.constants.hbar * sqf_frequency(p, eps)? * (qn.n_alpha + qn.n_beta + 1) as f64)
}

/// Spectrum of `p²/2m* − B L_z + K r²/2` for fixed coefficients:
/// `E = ħ√(K/m*)(2n + m_φ + 1) − m_φ ħ B`.
pub fn fixed_coefficient_spectrum(qn: &QuantumNumbers, coeffs: &EffectiveCoefficients, c: &PhysicalConstants) -> f64 {
    c.hbar * coeffs.omega_h * qn.principal() - qn.m_phi as f64 * c.hbar * coeffs.b_h
}

fn ec_residual_unchecked(energy: f64, qn: &QuantumNumbers, p: &ModelParams) -> Result<f64> {
    let co = effective_coefficients(p, energy)?;
    if !(co.k_h > 0.0) {
        return Err(NcqmError::Domain(format!("K_h(E) = {} must be positive", co.k_h)));
    }
    let hbar = p.constants.hbar;
    Ok(hbar / co.m_star.sqrt() * qn.principal() - (energy + qn.m_phi as f64 * hbar * co.b_h) / co.k_h.sqrt())
}

/// Residual of the quantization condition at `energy`.
pub fn ec_quantization_residual(energy: f64, qn: &QuantumNumbers, p: &ModelParams) -> Result<f64> {
    require(p, Mechanism::Ec)?;
    ec_residual_unchecked(energy, qn, p)
}

/// Sign changes of `f` on a geometric grid over `[lo, hi]`, each refined by
/// bisection to adjacent floating-point numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct RootScan {
    pub roots: Vec<f64>,
}

/// Scan `[lo, hi]` (both positive) with `points_per_decade` geometric steps,
/// skipping points where `f` fails, and bisect every sign change.
pub fn scan_roots<F: Fn(f64) -> Result<f64>>(f: F, lo: f64, hi: f64, points_per_decade: usize) -> Result<RootScan> {
    if !(lo > 0.0 && hi > lo && hi.is_finite()) || points_per_decade == 0 {
        return Err(NcqmError::Validation(format!(
            "scan needs 0 < lo < hi and a positive density, got ({lo}, {hi}), {points_per_decade}"
        )));
    }
    let steps = ((hi / lo).log10() * points_per_decade as f64).ceil().max(1.0) as usize;
    let ratio = (hi / lo).powf(1.0 / steps as f64);
    let mut roots = Vec::new();
    let mut prev: Option<(f64, f64)> = None;
    for i in 0..=steps {
        let x = if i == steps { hi } else { lo * ratio.powi(i as i32) };
        let Ok(fx) = f(x) else {
            prev = None;
            continue;
        };
        if fx == 0.0 {
            roots.push(x);
            prev = None;
            continue;
        }
        if let Some((px, pf)) = prev {
            if pf.signum() != fx.signum() {
                roots.push(bisect(&f, px, x, pf)?);
            }
        }
        prev = Some((x, fx));
    }
    Ok(RootScan { roots })
}

/// Bisection to floating-point adjacency; `f_lo = f(lo)` has the sign opposite to `f(hi)`.
pub fn bisect<F: Fn(f64) -> Result<f64>>(f: &F, mut lo: f64, mut hi: f64, mut f_lo: f64) -> Result<f64> {
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == f_lo.signum() {
            lo = mid;
            f_lo = fm;
        } else {
            hi = mid;
        }
    }
    // Pick whichever endpoint has the smaller residual.
    let f_hi = f(hi)?;
    Ok(if f_lo.abs() <= f_hi.abs() { lo } else { hi })
}

/// Solver settings for [`ec_solve_energy_with`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    pub bracket: (f64, f64),
    pub tol: f64,
    pub points_per_decade: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { bracket: (1e-8, 1e8), tol: 1e-9, points_per_decade: 200 }
    }
}

/// Smallest positive root of the quantization condition inside `bracket`.
pub fn ec_solve_energy(qn: &QuantumNumbers, p: &ModelParams, bracket: (f64, f64), tol: f64) -> Result<SpectrumResult> {
    ec_solve_energy_with(qn, p, &SolveOptions { bracket, tol, ..SolveOptions::default() })
}

pub fn ec_solve_energy_with(qn: &QuantumNumbers, p: &ModelParams, opts: &SolveOptions) -> Result<SpectrumResult> {
    require(p, Mechanism::Ec)?;
    let (lo, hi) = opts.bracket;
    let scan = scan_roots(|e| ec_residual_unchecked(e, qn, p), lo, hi, opts.points_per_decade)?;
    let Some(&energy) = scan.roots.first() else {
        return Err(NcqmError::Bracketing { low: lo, high: hi });
    };
    let residual = ec_residual_unchecked(energy, qn, p)?;
    if residual.abs() > opts.tol {
        return Err(NcqmError::Convergence {
            iterations: 0,
            detail: format!("root at E = {energy} leaves residual {residual:e} above {:e}", opts.tol),
        });
    }
    Ok(SpectrumResult {
        energy,
        method: SpectrumMethod::RootFind,
        residual,
        bracket: opts.bracket,
        roots_found: scan.roots.len(),
    })
}

/// `2n + (1 − √2)m_φ + 1`.
fn free_denominator(qn: &QuantumNumbers) -> f64 {
    (2 * qn.n + 1) as f64 + (1.0 - SQRT_2) * qn.m_phi as f64
}

/// `B₀ = η₀/2mħ`, `k₀ = η₀²/4mħ²` of the free-particle closed form.
pub fn free_reference_coefficients(p: &ModelParams) -> (f64, f64) {
    let c = &p.constants;
    (p.eta0 / (2.0 * c.mass * c.hbar), p.eta0 * p.eta0 / (4.0 * c.mass * c.hbar * c.hbar))
}

/// Closed-form free-particle level for `α ≠ 1`:
/// `E = (√(2m/ħ²k₀) E₀)^{1/(α−1)} E₀ / [2n + (1 − √2)m_φ + 1]^{1/(α−1)}`.
pub fn ec_free_energy_closed(qn: &QuantumNumbers, p: &ModelParams) -> Result<f64> {
    require(p, Mechanism::Ec)?;
    let c = &p.constants;
    if c.spring_k != 0.0 {
        return Err(NcqmError::Usage("free-particle closed form needs spring_k = 0".into()));
    }
    if p.alpha_exp == 1.0 {
        return Err(NcqmError::Unsupported(
            "alpha = 1 gives a continuous spectrum; use ec_free_alpha1_constraint".into(),
        ));
    }
    if p.eta0 == 0.0 {
        return Err(NcqmError::Degenerate("free-particle levels need eta0 > 0".into()));
    }
    let (_, k0) = free_reference_coefficients(p);
    let d = free_denominator(qn);
    if !(d > 0.0) {
        return Err(NcqmError::Domain(format!(
            "no bound level for (n, m_phi) = ({}, {}): 2n + (1-√2)m_phi + 1 = {d}",
            qn.n, qn.m_phi
        )));
    }
    let e0 = p.e_ref;
    let inv = 1.0 / (p.alpha_exp - 1.0);
    let lead = (2.0 * c.mass / (c.hbar * c.hbar * k0)).sqrt() * e0;
    Ok(lead.powf(inv) * e0 / d.powf(inv))
}

/// Outcome of the `α = 1` free-particle constraint
/// `E₀ = ħ√(k₀/2m)[2n + (1 − √2)m_φ + 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstraintCheck {
    pub required: f64,
    pub actual: f64,
    pub satisfied: bool,
}

pub fn ec_free_alpha1_constraint(qn: &QuantumNumbers, p: &ModelParams, rel_tol: f64) -> Result<ConstraintCheck> {
    require(p, Mechanism::Ec)?;
    let c = &p.constants;
    let (_, k0) = free_reference_coefficients(p);
    let required = c.hbar * (k0 / (2.0 * c.mass)).sqrt() * free_denominator(qn);
    Ok(ConstraintCheck {
        required,
        actual: p.e_ref,
        satisfied: (required - p.e_ref).abs() <= rel_tol * p.e_ref.abs(),
    })
}

/// First-order oscillator level for `α = β = 1`, returned as the ratio
/// `x = E/E₀`:
///
/// ```text
/// x ≈ E_com / [E₀ + (m_φω²/2)(η₀/k + mθ₀) − (m²ω²θ₀²/8ħ²) E_com]
/// ```
pub fn ec_oscillator_first_order(qn: &QuantumNumbers, p: &ModelParams) -> Result<f64> {
    require(p, Mechanism::Ec)?;
    if p.alpha_exp != 1.0 || p.beta_exp != 1.0 {
        return Err(NcqmError::Usage("first-order formula needs alpha = beta = 1".into()));
    }
    let c = &p.constants;
    if !(c.spring_k > 0.0) {
        return Err(NcqmError::Usage("first-order formula needs spring_k > 0".into()));
    }
    let w = c.omega();
    let m = c.mass;
    let e_com = commutative_spectrum(qn, w, c);
    let denom = p.e_ref + 0.5 * qn.m_phi as f64 * w * w * (p.eta0 / c.spring_k + m * p.theta0)
        - m * m * w * w * p.theta0 * p.theta0 / (8.0 * c.hbar * c.hbar) * e_com;
    if denom.abs() < 1e-300 || !(denom.abs() > 1e-12 * p.e_ref) {
        return Err(NcqmError::Degenerate(format!("first-order denominator vanishes ({denom})")));
    }
    Ok(e_com / denom)
}

/// `E = ħω(2n + m_φ + 1)`.
pub fn commutative_spectrum(qn: &QuantumNumbers, omega: f64, c: &PhysicalConstants) -> f64 {
    c.hbar * omega * qn.principal()
}

/// Exponents and constants of `H = D_α|p|^α + q^β|x|^β`-type fractional
/// oscillators (`α`, `β` here are unrelated to the strength exponents).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FractionalOscSpec {
    pub alpha_p: f64,
    pub beta_p: f64,
    pub d_alpha: f64,
    pub q: f64,
}

impl FractionalOscSpec {
    /// The ordinary oscillator: `α = β = 2`, `D = 1/2m`, `q = ω√(m/2)`.
    pub fn standard(c: &PhysicalConstants, omega: f64) -> Self {
        Self { alpha_p: 2.0, beta_p: 2.0, d_alpha: 0.5 / c.mass, q: omega * (0.5 * c.mass).sqrt() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha_p > 0.0 && self.beta_p > 0.0 && self.d_alpha > 0.0 && self.q > 0.0) {
            return Err(NcqmError::Validation(format!("fractional oscillator needs positive parameters, got {self:?}")));
        }
        Ok(())
    }

    /// `αβ/(α+β)`.
    pub fn exponent(&self) -> f64 {
        self.alpha_p * self.beta_p / (self.alpha_p + self.beta_p)
    }

    /// Bracketed prefactor `πħβD^{1/α}q^{2/β} / 2B(1/β, 1/α + 1)`.
    pub fn prefactor(&self, c: &PhysicalConstants) -> Result<f64> {
        self.validate()?;
        let b = beta(1.0 / self.beta_p, 1.0 / self.alpha_p + 1.0)?;
        Ok(PI * c.hbar * self.beta_p * self.d_alpha.powf(1.0 / self.alpha_p) * self.q.powf(2.0 / self.beta_p) / (2.0 * b))
    }
}

/// `E_n = [prefactor]^{αβ/(α+β)} (n + 1/2)^{αβ/(α+β)}`.
pub fn fractional_oscillator_levels(spec: &FractionalOscSpec, n: u32, c: &PhysicalConstants) -> Result<f64> {
    let s = spec.exponent();
    Ok(spec.prefactor(c)?.powf(s) * (n as f64 + 0.5).powf(s))
}

/// Scale and eigen-parameter of the `α = 1` energy-operator radial equation
/// `ξ²R'' + ξR' + (σξ² − ξ⁴ − m_φ²)R = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EoRadialParams {
    /// `ξ = xi_scale · r`, `xi_scale = (m K_I E²)^{1/4}/ħ`.
    pub xi_scale: f64,
    /// `σ = 2√m(1 + m_φB_I)/√K_I`.
    pub sigma: f64,
    /// `2(2n + m_φ + 1)`, the value `σ` must take for a Laguerre solution.
    pub required_sigma: f64,
}

impl EoRadialParams {
    /// Whether the parameters satisfy the Laguerre constraint.
    pub fn satisfied(&self, rel_tol: f64) -> bool {
        (self.sigma - self.required_sigma).abs() <= rel_tol * self.required_sigma
    }
}

pub fn eo_alpha1_radial_params(
    energy: f64,
    qn: &QuantumNumbers,
    b_i: f64,
    k_i: f64,
    c: &PhysicalConstants,
) -> Result<EoRadialParams> {
    if !(k_i > 0.0) || !(energy > 0.0) {
        return Err(NcqmError::Domain(format!("need K_I > 0 and E > 0, got K_I = {k_i}, E = {energy}")));
    }
    let m = c.mass;
    Ok(EoRadialParams {
        xi_scale: (m * k_i * energy * energy).powf(0.25) / c.hbar,
        sigma: 2.0 * m.sqrt() * (1.0 + qn.m_phi as f64 * b_i) / k_i.sqrt(),
        required_sigma: 2.0 * qn.principal(),
    })
}

/// Coefficients of `r²R'' + rR' + [a r² − b r⁴ − m_φ²]R = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialEquationCoefficients {
    pub r2: f64,
    pub r4: f64,
}

/// Particle-energy mechanism: `a = (2m*/ħ²)(E + m_φħB_h)`, `b = m*K_h/ħ²`.
pub fn ec_radial_coefficients(energy: f64, qn: &QuantumNumbers, p: &ModelParams) -> Result<RadialEquationCoefficients> {
    let co = effective_coefficients(p, energy)?;
    let h = p.constants.hbar;
    Ok(RadialEquationCoefficients {
        r2: 2.0 * co.m_star / (h * h) * (energy + qn.m_phi as f64 * h * co.b_h),
        r4: co.m_star * co.k_h / (h * h),
    })
}

/// Energy operator, `α = 1`: `a = (2m/ħ²)E(1 + m_φB_I)`, `b = mK_IE²/ħ⁴`.
pub fn eo_alpha1_radial_coefficients(
    energy: f64,
    qn: &QuantumNumbers,
    b_i: f64,
    k_i: f64,
    c: &PhysicalConstants,
) -> RadialEquationCoefficients {
    let h2 = c.hbar * c.hbar;
    RadialEquationCoefficients {
        r2: 2.0 * c.mass / h2 * energy * (1.0 + qn.m_phi as f64 * b_i),
        r4: c.mass * k_i * energy * energy / (h2 * h2),
    }
}

/// `(B_I, K_I) = (ħB₀/E₀, ħ²k₀/2E₀²)`: the energy-operator constants that make
/// the `α = 1` free equation coincide with the particle-energy one.
pub fn eo_from_ec_identification(p: &ModelParams) -> (f64, f64) {
    let (b0, k0) = free_reference_coefficients(p);
    let h = p.constants.hbar;
    (h * b0 / p.e_ref, h * h * k0 / (2.0 * p.e_ref * p.e_ref))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::coefficients_from_strengths;
    use crate::quadrature::integrate;
    use crate::specfun::SeriesControl;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn ec(eta0: f64, theta0: f64, alpha: f64, beta: f64, e_ref: f64, k: f64) -> ModelParams {
        ModelParams {
            eta0,
            theta0,
            alpha_exp: alpha,
            beta_exp: beta,
            e_ref,
            mechanism: Mechanism::Ec,
            constants: PhysicalConstants::oscillator(k),
            approximate_k: false,
        }
    }

    fn sqf(k: f64) -> ModelParams {
        ModelParams {
            eta0: 1.0,
            theta0: 1.0,
            alpha_exp: 1.0,
            beta_exp: 1.0,
            e_ref: 1.0,
            mechanism: Mechanism::Sqf,
            constants: PhysicalConstants::oscillator(k),
            approximate_k: false,
        }
    }

    #[test]
    fn quantum_number_mappings() {
        let q = QuantumNumbers::radial(2, 3);
        assert_eq!((q.n_alpha, q.n_beta), (5, 2));
        assert_eq!(q.principal(), 8.0);
        let o = QuantumNumbers::occupancies(5, 2);
        assert_eq!(o, q);
    }

    #[test]
    fn sqf_free_reference() {
        let p = sqf(0.0);
        let e = sqf_free_spectrum(&p, 1.0, &QuantumNumbers::occupancies(0, 0)).unwrap();
        assert_relative_eq!(e, 0.853_553_390_6, epsilon = 1e-10);
        assert_eq!(sqf_free_spectrum(&p, 0.0, &QuantumNumbers::occupancies(0, 0)).unwrap(), 0.0);
        let a = sqf_free_spectrum(&p, 0.7, &QuantumNumbers::occupancies(1, 0)).unwrap();
        let b = sqf_free_spectrum(&p, 0.7, &QuantumNumbers::occupancies(0, 1)).unwrap();
        assert_eq!(a, b);
        assert!(matches!(
            sqf_free_spectrum(&ec(1.0, 1.0, 1.0, 1.0, 1.0, 0.0), 1.0, &QuantumNumbers::radial(0, 0)),
            Err(NcqmError::Usage(_))
        ));
    }

    #[test]
    fn sqf_oscillator_reference() {
        // ħ = m = k = η₀ = θ₀ = 1, α = β = 1, ε = ε₀: 1/m* = 5/4, K_h = 9/8, B_h = 1.
        let p = sqf(1.0);
        let q = QuantumNumbers::occupancies(0, 0);
        let expected = (1.125f64 * 1.25).sqrt() + 1.0;
        assert_relative_eq!(sqf_oscillator_spectrum(&p, 1.0, &q).unwrap(), expected, max_relative = 1e-15);
        assert_relative_eq!(expected, 2.185_854_122, epsilon = 1e-9);
        // ε → 0 gives the bare oscillator.
        let e = sqf_oscillator_spectrum(&p, 0.0, &QuantumNumbers::occupancies(2, 1)).unwrap();
        assert_eq!(e, 4.0);
    }

    #[test]
    fn sqf_oscillator_degenerates_to_free() {
        let free = sqf(0.0);
        let q = QuantumNumbers::occupancies(1, 2);
        let e_free = sqf_free_spectrum(&free, 0.8, &q).unwrap();
        let tiny = sqf(1e-14);
        let e_osc = sqf_oscillator_spectrum(&tiny, 0.8, &q).unwrap();
        assert_relative_eq!(e_osc, e_free, max_relative = 1e-6);
    }

    #[test]
    fn residual_examples() {
        let p = ec(0.0, 0.0, 1.0, 1.0, 10.0, 1.0);
        for (n, m) in [(0, 0), (1, 2), (3, 1)] {
            let q = QuantumNumbers::radial(n, m);
            let e = commutative_spectrum(&q, 1.0, &p.constants);
            assert_eq!(ec_quantization_residual(e, &q, &p).unwrap(), 0.0);
        }
        let q = QuantumNumbers::radial(1, 1);
        assert_eq!(ec_quantization_residual(0.0, &q, &p).unwrap(), 4.0);
        let p = ec(0.1, 0.1, 1.0, 1.0, 10.0, 1.0);
        let r = ec_solve_energy(&q, &p, (1e-6, 1e3), 1e-9).unwrap();
        let below = ec_quantization_residual(r.energy * 0.99, &q, &p).unwrap();
        let above = ec_quantization_residual(r.energy * 1.01, &q, &p).unwrap();
        assert!(below * above < 0.0);
    }

    #[test]
    fn commutative_root_is_three() {
        let p = ec(0.0, 0.0, 1.0, 1.0, 10.0, 1.0);
        let r = ec_solve_energy(&QuantumNumbers::radial(1, 0), &p, (1e-8, 1e8), 1e-12).unwrap();
        assert_eq!(r.energy, 3.0);
        assert_eq!(r.method, SpectrumMethod::RootFind);
        assert_eq!(r.roots_found, 1);
    }

    #[test]
    fn bracketing_error_without_sign_change() {
        let p = ec(0.0, 0.0, 1.0, 1.0, 10.0, 1.0);
        assert!(matches!(
            ec_solve_energy(&QuantumNumbers::radial(0, 0), &p, (2.0, 5.0), 1e-9),
            Err(NcqmError::Bracketing { .. })
        ));
    }

    #[test]
    fn default_parameters_root_matches_dense_scan() {
        let p = ec(0.1, 0.1, 1.0, 1.0, 10.0, 1.0);
        let q = QuantumNumbers::radial(0, 0);
        let r = ec_solve_energy(&q, &p, (1e-8, 1e8), 1e-9).unwrap();
        // Uniform scan at step 1e-4 around the commutative value.
        let mut crossing = None;
        let mut prev = ec_quantization_residual(0.5, &q, &p).unwrap();
        for i in 1..=15_000 {
            let e = 0.5 + 1e-4 * i as f64;
            let cur = ec_quantization_residual(e, &q, &p).unwrap();
            if prev.signum() != cur.signum() {
                crossing = Some(e);
                break;
            }
            prev = cur;
        }
        let crossing = crossing.unwrap();
        assert!(r.energy <= crossing && r.energy >= crossing - 1e-4, "{} vs {crossing}", r.energy);
    }

    #[test]
    fn root_stable_under_bracket_perturbation() {
        let p = ec(0.1, 0.1, 1.0, 1.0, 10.0, 1.0);
        let q = QuantumNumbers::radial(1, 2);
        let base = ec_solve_energy(&q, &p, (1e-3, 1e3), 1e-9).unwrap().energy;
        for s in [0.9, 1.1] {
            let e = ec_solve_energy(&q, &p, (1e-3 * s, 1e3 * s), 1e-9).unwrap().energy;
            assert_relative_eq!(e, base, max_relative = 1e-14);
        }
    }

    #[test]
    fn free_closed_form_examples() {
        let p = ec(2.0, 0.0, 2.0, 2.0, 1.0, 0.0);
        let q = QuantumNumbers::radial(0, 0);
        let e = ec_free_energy_closed(&q, &p).unwrap();
        assert_relative_eq!(e, SQRT_2, max_relative = 1e-15);
        let r = ec_solve_energy(&q, &p, (1e-8, 1e8), 1e-12).unwrap();
        assert_relative_eq!(r.energy, e, max_relative = 1e-9);
        // Ground state: (2m/ħ²k₀)^{1/2(α−1)} E₀^{α/(α−1)}.
        let p = ec(0.7, 0.0, 3.0, 1.0, 2.5, 0.0);
        let (_, k0) = free_reference_coefficients(&p);
        let ground = (2.0 / k0).powf(0.25) * 2.5f64.powf(1.5);
        assert_relative_eq!(ec_free_energy_closed(&q, &p).unwrap(), ground, max_relative = 1e-14);
        assert!(matches!(
            ec_free_energy_closed(&q, &ec(1.0, 0.0, 1.0, 1.0, 1.0, 0.0)),
            Err(NcqmError::Unsupported(_))
        ));
        assert!(matches!(
            ec_free_energy_closed(&QuantumNumbers::radial(0, 3), &p),
            Err(NcqmError::Domain(_))
        ));
    }

    #[test]
    fn alpha_one_constraint() {
        let mut p = ec(1.0, 0.0, 1.0, 1.0, 1.0, 0.0);
        let q = QuantumNumbers::radial(1, 1);
        let check = ec_free_alpha1_constraint(&q, &p, 1e-12).unwrap();
        p.e_ref = check.required;
        assert!(ec_free_alpha1_constraint(&q, &p, 1e-12).unwrap().satisfied);
        // At that E₀ the residual vanishes at every energy.
        for e in [0.1, 1.0, 7.0] {
            assert!(ec_quantization_residual(e, &q, &p).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn first_order_limits() {
        let p = ec(0.0, 0.0, 1.0, 1.0, 10.0, 1.0);
        let q = QuantumNumbers::radial(1, 2);
        let x = ec_oscillator_first_order(&q, &p).unwrap();
        assert_eq!(x, commutative_spectrum(&q, 1.0, &p.constants) / 10.0);
        let q0 = QuantumNumbers::radial(2, 0);
        let a = ec_oscillator_first_order(&q0, &ec(0.3, 0.05, 1.0, 1.0, 10.0, 1.0)).unwrap();
        let b = ec_oscillator_first_order(&q0, &ec(0.9, 0.05, 1.0, 1.0, 10.0, 1.0)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn first_order_error_is_quadratic() {
        let q = QuantumNumbers::radial(1, 1);
        let err = |s: f64| {
            let p = ec(s, s, 1.0, 1.0, 10.0, 1.0);
            let root = ec_solve_energy(&q, &p, (1e-6, 1e4), 1e-10).unwrap().energy;
            (p.e_ref * ec_oscillator_first_order(&q, &p).unwrap() - root).abs()
        };
        let (e1, e2, e3) = (err(0.4), err(0.2), err(0.1));
        assert!(e1 / e2 > 3.0 && e1 / e2 < 5.0, "{}", e1 / e2);
        assert!(e2 / e3 > 3.5 && e2 / e3 < 4.5, "{}", e2 / e3);
    }

    #[test]
    fn fractional_oscillator_standard_case() {
        let c = PhysicalConstants::natural();
        let spec = FractionalOscSpec::standard(&c, 1.0);
        assert_eq!(spec.exponent(), 1.0);
        for n in 0..5 {
            assert_relative_eq!(fractional_oscillator_levels(&spec, n, &c).unwrap(), n as f64 + 0.5, max_relative = 1e-14);
        }
        // B(1/2, 3/2) = ∫ u^{-1/2}(1−u)^{1/2} du, with u = sin²t.
        let q = integrate(|t: f64| 2.0 * t.cos().powi(2), 0.0, PI / 2.0, &SeriesControl::default()).unwrap();
        assert_relative_eq!(beta(0.5, 1.5).unwrap(), q, max_relative = 1e-12);
    }

    #[test]
    fn eo_examples() {
        let c = PhysicalConstants::natural();
        let q = QuantumNumbers::radial(0, 0);
        let r = eo_alpha1_radial_params(2.0, &q, 0.0, 4.0, &c).unwrap();
        assert_eq!(r.sigma, 1.0);
        let r2 = eo_alpha1_radial_params(9.0, &q, 0.0, 4.0, &c).unwrap();
        assert_eq!(r.sigma, r2.sigma);
        assert!(eo_alpha1_radial_params(1.0, &q, 0.0, 0.0, &c).is_err());
        assert!(eo_alpha1_radial_params(0.0, &q, 0.0, 1.0, &c).is_err());
    }

    #[test]
    fn eo_matches_ec_at_alpha_one() {
        let p = ec(0.6, 0.0, 1.0, 1.0, 3.0, 0.0);
        let (b_i, k_i) = eo_from_ec_identification(&p);
        for (n, m) in [(0, 0), (1, 2), (2, 5)] {
            let q = QuantumNumbers::radial(n, m);
            for e in [0.2, 1.0, 4.5] {
                let a = ec_radial_coefficients(e, &q, &p).unwrap();
                let b = eo_alpha1_radial_coefficients(e, &q, b_i, k_i, &p.constants);
                assert_relative_eq!(a.r2, b.r2, max_relative = 1e-14);
                assert_relative_eq!(a.r4, b.r4, max_relative = 1e-14);
                let params = eo_alpha1_radial_params(e, &q, b_i, k_i, &p.constants).unwrap();
                assert_relative_eq!(params.xi_scale.powi(4), b.r4, max_relative = 1e-13);
            }
        }
    }

    #[test]
    fn fixed_coefficient_spectrum_is_rearranged_condition() {
        let c = PhysicalConstants::oscillator(1.3);
        let co = coefficients_from_strengths(0.2, 0.4, &c, false).unwrap();
        let q = QuantumNumbers::radial(1, 3);
        let e = fixed_coefficient_spectrum(&q, &co, &c);
        let lhs = c.hbar / co.m_star.sqrt() * q.principal();
        let rhs = (e + q.m_phi as f64 * c.hbar * co.b_h) / co.k_h.sqrt();
        assert_relative_eq!(lhs, rhs, max_relative = 1e-14);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn free_coefficient_identity(m in 0.1f64..10.0, hbar in 0.1f64..10.0, eta0 in 0.01f64..10.0) {
            let b0 = eta0 / (2.0 * m * hbar);
            let k0 = eta0 * eta0 / (4.0 * m * hbar * hbar);
            prop_assert!((b0 * (2.0 * m / k0).sqrt() - SQRT_2).abs() < 1e-13);
        }

        #[test]
        fn roots_satisfy_condition(eta0 in 0.0f64..0.5, theta0 in 0.0f64..0.5, n in 0u32..4, m in 0u32..4) {
            let p = ec(eta0, theta0, 1.0, 1.0, 10.0, 1.0);
            let q = QuantumNumbers::radial(n, m);
            let r = ec_solve_energy(&q, &p, (1e-8, 1e8), 1e-9).unwrap();
            prop_assert!(r.residual.abs() <= 1e-9);
        }

        #[test]
        fn fractional_levels_monotone(a in 0.3f64..3.0, b in 0.3f64..3.0, n in 0u32..20) {
            let spec = FractionalOscSpec { alpha_p: a, beta_p: b, d_alpha: 0.7, q: 1.3 };
            let c = PhysicalConstants::natural();
            let e0 = fractional_oscillator_levels(&spec, n, &c).unwrap();
            let e1 = fractional_oscillator_levels(&spec, n + 1, &c).unwrap();
            prop_assert!(e1 > e0);
            let ratio = ((n as f64 + 1.5) / (n as f64 + 0.5)).powf(spec.exponent());
            prop_assert!((e1 / e0 - ratio).abs() <= 1e-13 * ratio);
        }
    }
}
