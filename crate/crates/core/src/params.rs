//! Model parameters and the energy-dependent effective coefficients.
//!
//! All three mechanisms share the same power law
//! `θ(E) = θ₀ (E/E_ref)^β`, `η(E) = η₀ (E/E_ref)^α`; they differ only in
//! which energy is fed in. The coefficients of the unified Hamiltonian
//!
//! ```text
//! H = p²/2m* − B_h L_z + K_h r²/2
//! ```
//!
//! follow from these strengths and the bare spring constant `k`.

use serde::{Deserialize, Serialize};

use crate::error::{NcqmError, Result};

/// Physical constants. Natural units (`ħ = m = e = 1`) by default.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    #[serde(default = "one")]
    pub hbar: f64,
    #[serde(default = "one")]
    pub mass: f64,
    /// Only the ring model uses the charge.
    #[serde(default = "one")]
    pub charge: f64,
    /// Zero for the free particle.
    #[serde(default)]
    pub spring_k: f64,
}

fn one() -> f64 {
    1.0
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self {
            hbar: 1.0,
            mass: 1.0,
            charge: 1.0,
            spring_k: 0.0,
        }
    }
}

impl PhysicalConstants {
    pub fn natural() -> Self {
        Self::default()
    }

    pub fn oscillator(spring_k: f64) -> Self {
        Self {
            spring_k,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.hbar > 0.0 && self.hbar.is_finite()) {
            return Err(NcqmError::Validation(format!("hbar must be positive, got {}", self.hbar)));
        }
        if !(self.mass > 0.0 && self.mass.is_finite()) {
            return Err(NcqmError::Validation(format!("mass must be positive, got {}", self.mass)));
        }
        if !(self.spring_k >= 0.0 && self.spring_k.is_finite()) {
            return Err(NcqmError::Validation(format!(
                "spring_k must be non-negative, got {}",
                self.spring_k
            )));
        }
        if !self.charge.is_finite() {
            return Err(NcqmError::Validation("charge must be finite".into()));
        }
        Ok(())
    }

    /// Bare oscillator frequency `√(k/m)`.
    pub fn omega(&self) -> f64 {
        (self.spring_k / self.mass).sqrt()
    }
}

/// Which energy drives the noncommutative strengths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mechanism {
    /// Independent vacuum-fluctuation energy scale ε.
    Sqf,
    /// Coupling to the particle energy E.
    Ec,
    /// Energy mapped to `iħ ∂/∂t`.
    #[serde(rename = "eo_i")]
    EoI,
    /// Energy mapped to the free Hamiltonian `−ħ²Δ/2m`.
    #[serde(rename = "eo_ii")]
    EoII,
}

impl Mechanism {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mechanism::Sqf => "sqf",
            Mechanism::Ec => "ec",
            Mechanism::EoI => "eo_i",
            Mechanism::EoII => "eo_ii",
        }
    }
}

impl std::str::FromStr for Mechanism {
    type Err = NcqmError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sqf" => Ok(Mechanism::Sqf),
            "ec" => Ok(Mechanism::Ec),
            "eo_i" | "eo-i" => Ok(Mechanism::EoI),
            "eo_ii" | "eo-ii" => Ok(Mechanism::EoII),
            other => Err(NcqmError::Validation(format!("unknown mechanism '{other}'"))),
        }
    }
}

impl std::fmt::Display for Mechanism {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Full parameter set. Serializes to a flat JSON object with the keys
/// `eta0, theta0, alpha, beta, e_ref, mechanism, hbar, mass, charge, spring_k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub eta0: f64,
    pub theta0: f64,
    #[serde(rename = "alpha")]
    pub alpha_exp: f64,
    #[serde(rename = "beta")]
    pub beta_exp: f64,
    /// `E₀` for EC, `ε₀` for SQF and EO.
    pub e_ref: f64,
    pub mechanism: Mechanism,
    #[serde(flatten)]
    pub constants: PhysicalConstants,
    /// Replace the exact inverse-map factor `k(E)` by one.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub approximate_k: bool,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            eta0: 0.1,
            theta0: 0.1,
            alpha_exp: 1.0,
            beta_exp: 1.0,
            e_ref: 10.0,
            mechanism: Mechanism::Ec,
            constants: PhysicalConstants::oscillator(1.0),
            approximate_k: false,
        }
    }
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        self.constants.validate()?;
        if !(self.e_ref > 0.0 && self.e_ref.is_finite()) {
            return Err(NcqmError::Validation(format!("e_ref must be positive, got {}", self.e_ref)));
        }
        if !(self.eta0 >= 0.0 && self.eta0.is_finite()) {
            return Err(NcqmError::Validation(format!("eta0 must be non-negative, got {}", self.eta0)));
        }
        if !(self.theta0 >= 0.0 && self.theta0.is_finite()) {
            return Err(NcqmError::Validation(format!(
                "theta0 must be non-negative, got {}",
                self.theta0
            )));
        }
        if !self.alpha_exp.is_finite() || !self.beta_exp.is_finite() {
            return Err(NcqmError::Validation("exponents must be finite".into()));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let p: ModelParams =
            serde_json::from_str(text).map_err(|e| NcqmError::Validation(format!("bad config: {e}")))?;
        p.validate()?;
        Ok(p)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("ModelParams always serializes")
    }

    /// Commutative limit of these parameters (`η₀ = θ₀ = 0`).
    pub fn commutative(&self) -> Self {
        Self {
            eta0: 0.0,
            theta0: 0.0,
            ..*self
        }
    }
}

fn power_ratio(ratio: f64, exponent: f64, what: &str) -> Result<f64> {
    if ratio == 0.0 {
        if exponent < 0.0 {
            return Err(NcqmError::Singularity(format!(
                "{what}: zero energy with negative exponent {exponent}"
            )));
        }
        return Ok(if exponent == 0.0 { 1.0 } else { 0.0 });
    }
    Ok(ratio.powf(exponent))
}

/// `(θ(E), η(E))` for the power-law model.
pub fn nc_strengths(p: &ModelParams, energy: f64) -> Result<(f64, f64)> {
    if !(energy >= 0.0) {
        return Err(NcqmError::Domain(format!("energy must be non-negative, got {energy}")));
    }
    let ratio = energy / p.e_ref;
    let theta = p.theta0 * power_ratio(ratio, p.beta_exp, "theta")?;
    let eta = p.eta0 * power_ratio(ratio, p.alpha_exp, "eta")?;
    Ok((theta, eta))
}

/// `ζ = θη/4ħ²`.
pub fn zeta(theta: f64, eta: f64, c: &PhysicalConstants) -> f64 {
    theta * eta / (4.0 * c.hbar * c.hbar)
}

/// `ħ_eff = ħ(1 + θη/4ħ²)`.
pub fn effective_planck(theta: f64, eta: f64, c: &PhysicalConstants) -> f64 {
    c.hbar * (1.0 + zeta(theta, eta, c))
}

pub type Matrix4 = [[f64; 4]; 4];

fn check_antisymmetric(m: &Matrix4, name: &str) -> Result<()> {
    for i in 0..4 {
        for j in 0..4 {
            let s = m[i][j] + m[j][i];
            let scale = m[i][j].abs().max(m[j][i].abs()).max(1.0);
            if s.abs() > 1e-12 * scale {
                return Err(NcqmError::Validation(format!(
                    "{name} is not antisymmetric at ({i},{j})"
                )));
            }
        }
    }
    Ok(())
}

/// `Tr[θη]` with the plain matrix product.
pub fn trace_product(theta: &Matrix4, eta: &Matrix4) -> f64 {
    (0..4)
        .map(|i| (0..4).map(|k| theta[i][k] * eta[k][i]).sum::<f64>())
        .sum()
}

/// Trace form of the effective Planck constant, `ħ{1 + Tr[θη]/4ħ²}`.
///
/// For a single 2D block `Tr[θη] = −2θη`; the per-direction value that
/// matches [`effective_planck`] is the diagonal of
/// [`coordinate_momentum_coefficients`].
pub fn effective_planck_4d(theta: &Matrix4, eta: &Matrix4, c: &PhysicalConstants) -> Result<f64> {
    check_antisymmetric(theta, "theta")?;
    check_antisymmetric(eta, "eta")?;
    Ok(c.hbar * (1.0 + trace_product(theta, eta) / (4.0 * c.hbar * c.hbar)))
}

/// Coefficient matrix `ħ[δ^{μν} + θ^{μα}η^{να}/4ħ²]` of `[x̂^μ, p̂^ν] = i(·)`.
/// Off-diagonal entries are the products of θ and η components.
pub fn coordinate_momentum_coefficients(
    theta: &Matrix4,
    eta: &Matrix4,
    c: &PhysicalConstants,
) -> Result<Matrix4> {
    check_antisymmetric(theta, "theta")?;
    check_antisymmetric(eta, "eta")?;
    let mut out = [[0.0; 4]; 4];
    for (mu, row) in out.iter_mut().enumerate() {
        for (nu, v) in row.iter_mut().enumerate() {
            let contraction: f64 = (0..4).map(|a| theta[mu][a] * eta[nu][a]).sum();
            let delta = if mu == nu { 1.0 } else { 0.0 };
            *v = c.hbar * (delta + contraction / (4.0 * c.hbar * c.hbar));
        }
    }
    Ok(out)
}

/// Exact inverse-map factor `k(E) = 1/(1 − θη/4ħ²)`.
pub fn k_factor(theta: f64, eta: f64, c: &PhysicalConstants) -> Result<f64> {
    let denom = 1.0 - zeta(theta, eta, c);
    if denom.abs() < 1e-14 {
        return Err(NcqmError::Singularity(format!(
            "k(E) has a pole at θη = 4ħ² (θ={theta}, η={eta})"
        )));
    }
    Ok(1.0 / denom)
}

/// `k(E)` honoring the approximation flag.
pub fn k_factor_mode(theta: f64, eta: f64, c: &PhysicalConstants, approximate: bool) -> Result<f64> {
    if approximate {
        Ok(1.0)
    } else {
        k_factor(theta, eta, c)
    }
}

/// Rescaled strengths `(θ_eff, η_eff, ξ)` that keep the Planck constant fixed.
pub fn rescaled_strengths(theta: f64, eta: f64, c: &PhysicalConstants) -> Result<(f64, f64, f64)> {
    let s = 1.0 + zeta(theta, eta, c);
    if !(s > 0.0) {
        return Err(NcqmError::Domain(format!("1 + θη/4ħ² = {s} must be positive")));
    }
    Ok((theta / s, eta / s, s.powf(-0.5)))
}

/// Energy-dependent coefficients of `H = p²/2m* − B_h L_z + K_h r²/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectiveCoefficients {
    pub theta: f64,
    pub eta: f64,
    /// `B_e = η/2mħ`.
    pub b_e: f64,
    /// `k_e = η²/8mħ²`.
    pub k_e: f64,
    /// `B_h = B_e + kθ/2ħ`.
    pub b_h: f64,
    /// `K_h = k + k_e`.
    pub k_h: f64,
    /// `1/m* = 1/m + kθ²/4ħ²`.
    pub m_star: f64,
    pub hbar_eff: f64,
    pub theta_eff: f64,
    pub eta_eff: f64,
    pub xi_scale: f64,
    /// `None` at the pole of `k(E)`.
    pub k_of_e: Option<f64>,
    /// `√(k/m)`.
    pub omega: f64,
    /// `√(K_h/m*)`.
    pub omega_h: f64,
    /// `√(k_e/m)`.
    pub omega_eps: f64,
}

/// Coefficients from explicit strengths, bypassing the power law.
pub fn coefficients_from_strengths(
    theta: f64,
    eta: f64,
    c: &PhysicalConstants,
    approximate_k: bool,
) -> Result<EffectiveCoefficients> {
    c.validate()?;
    let (hbar, m, k) = (c.hbar, c.mass, c.spring_k);
    let b_e = eta / (2.0 * m * hbar);
    let k_e = eta * eta / (8.0 * m * hbar * hbar);
    let inv_m_star = 1.0 / m + k * theta * theta / (4.0 * hbar * hbar);
    let m_star = 1.0 / inv_m_star;
    let b_h = b_e + k * theta / (2.0 * hbar);
    let k_h = k + k_e;
    let (theta_eff, eta_eff, xi_scale) = rescaled_strengths(theta, eta, c)?;
    Ok(EffectiveCoefficients {
        theta,
        eta,
        b_e,
        k_e,
        b_h,
        k_h,
        m_star,
        hbar_eff: effective_planck(theta, eta, c),
        theta_eff,
        eta_eff,
        xi_scale,
        k_of_e: k_factor_mode(theta, eta, c, approximate_k).ok(),
        omega: c.omega(),
        omega_h: (k_h / m_star).sqrt(),
        omega_eps: (k_e / m).sqrt(),
    })
}

/// All effective coefficients at the given energy (`E` for EC, `ε` for SQF/EO).
pub fn effective_coefficients(p: &ModelParams, energy: f64) -> Result<EffectiveCoefficients> {
    let (theta, eta) = nc_strengths(p, energy)?;
    coefficients_from_strengths(theta, eta, &p.constants, p.approximate_k)
}
