//! One-dimensional mesoscopic ring threaded by an external flux `φ` plus the
//! effective flux `φ_nc` induced by momentum noncommutativity.
//!
//! ```text
//! E_l = (ħ²/2m*R²)[l + (φ − φ_nc)/φ₀]² − (3ħ²/8m*R²)(φ_nc/φ₀)²
//! I_l = −∂E_l/∂φ
//! ```
//!
//! `m*` here is the ring convention `m/α`, unrelated to the oscillator mass of
//! [`crate::params::EffectiveCoefficients`].

use serde::{Deserialize, Serialize};

use crate::error::{NcqmError, Result};
use crate::params::{nc_strengths, ModelParams, PhysicalConstants};

/// CODATA values, for callers working in SI units.
pub mod si {
    pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
    pub const PLANCK: f64 = 6.626_070_15e-34;
    pub const HBAR: f64 = PLANCK / (2.0 * std::f64::consts::PI);
    pub const ELECTRON_MASS: f64 = 9.109_383_7015e-31;

    pub fn electron() -> crate::params::PhysicalConstants {
        crate::params::PhysicalConstants { hbar: HBAR, mass: ELECTRON_MASS, charge: ELEMENTARY_CHARGE, spring_k: 0.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RingSpec {
    pub radius: f64,
    /// External flux `φ`.
    pub flux_ext: f64,
    /// `α` with `θη = 2ħ²α²(1 − α²)`.
    pub alpha_param: f64,
    pub m_star: f64,
    pub constants: PhysicalConstants,
}

impl RingSpec {
    /// Ring with `m* = m/α` from the bare mass in `constants`.
    pub fn with_bare_mass(radius: f64, flux_ext: f64, alpha_param: f64, constants: PhysicalConstants) -> Self {
        Self { radius, flux_ext, alpha_param, m_star: constants.mass / alpha_param, constants }
    }

    pub fn validate(&self) -> Result<()> {
        self.constants.validate()?;
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(NcqmError::Validation(format!("ring radius must be positive, got {}", self.radius)));
        }
        if !(self.alpha_param > 0.0 && self.alpha_param <= 1.0) {
            return Err(NcqmError::Validation(format!("ring alpha must lie in (0, 1], got {}", self.alpha_param)));
        }
        if !(self.m_star > 0.0 && self.m_star.is_finite()) {
            return Err(NcqmError::Validation(format!("m* must be positive, got {}", self.m_star)));
        }
        if self.constants.charge == 0.0 {
            return Err(NcqmError::Validation("ring model needs a nonzero charge".into()));
        }
        if !self.flux_ext.is_finite() {
            return Err(NcqmError::Validation("external flux must be finite".into()));
        }
        Ok(())
    }

    /// Flux quantum `φ₀ = h/e`.
    pub fn flux_quantum(&self) -> f64 {
        2.0 * std::f64::consts::PI * self.constants.hbar / self.constants.charge
    }

    /// `ħ²/m*R²`.
    fn scale(&self) -> f64 {
        self.constants.hbar * self.constants.hbar / (self.m_star * self.radius * self.radius)
    }
}

/// Effective field and fluxes for one `η`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RingFluxes {
    pub b_z: f64,
    pub phi_nc: f64,
    pub phi0: f64,
}

pub fn nc_flux(spec: &RingSpec, eta: f64) -> Result<RingFluxes> {
    spec.validate()?;
    let c = &spec.constants;
    let a2 = spec.alpha_param * spec.alpha_param;
    let b_z = eta / (c.charge * a2 * c.hbar);
    let phi_nc = 2.0 * std::f64::consts::PI * spec.radius * spec.radius * eta / (c.charge * c.hbar * a2);
    Ok(RingFluxes { b_z, phi_nc, phi0: spec.flux_quantum() })
}

/// `l + (φ − φ_nc)/φ₀`.
fn shifted_index(spec: &RingSpec, f: &RingFluxes, l: i64) -> f64 {
    l as f64 + (spec.flux_ext - f.phi_nc) / f.phi0
}

pub fn ring_levels(spec: &RingSpec, eta: f64, l: i64) -> Result<f64> {
    let f = nc_flux(spec, eta)?;
    let s = shifted_index(spec, &f, l);
    let ratio = f.phi_nc / f.phi0;
    Ok(0.5 * spec.scale() * s * s - 0.375 * spec.scale() * ratio * ratio)
}

pub fn persistent_current(spec: &RingSpec, eta: f64, l: i64) -> Result<f64> {
    let f = nc_flux(spec, eta)?;
    Ok(-spec.scale() / f.phi0 * shifted_index(spec, &f, l))
}

/// Ground branch: the `l` minimizing `E_l`, ties going to the larger `l`.
pub fn ground_index(spec: &RingSpec, eta: f64) -> Result<i64> {
    let f = nc_flux(spec, eta)?;
    let delta = (spec.flux_ext - f.phi_nc) / f.phi0;
    Ok((0.5 - delta).floor() as i64)
}

/// `(l, E_l, I_l)` on the ground branch.
pub fn ground_state(spec: &RingSpec, eta: f64) -> Result<(i64, f64, f64)> {
    let l = ground_index(spec, eta)?;
    Ok((l, ring_levels(spec, eta, l)?, persistent_current(spec, eta, l)?))
}

/// `η` evaluated at the electron energy through the model's power law.
pub fn eta_at_energy(p: &ModelParams, energy: f64) -> Result<f64> {
    Ok(nc_strengths(p, energy)?.1)
}

/// Both roots `α ∈ (0, 1]` of `θη = 2ħ²α²(1 − α²)`, largest first.
pub fn alpha_from_strengths(theta: f64, eta: f64, hbar: f64) -> Result<Vec<f64>> {
    let disc = 1.0 - 2.0 * theta * eta / (hbar * hbar);
    if disc < 0.0 {
        return Err(NcqmError::Domain(format!("θη = {} exceeds ħ²/2, no real ring alpha", theta * eta)));
    }
    let s = disc.sqrt();
    let mut roots: Vec<f64> = [0.5 * (1.0 + s), 0.5 * (1.0 - s)]
        .into_iter()
        .filter(|a2| *a2 > 0.0 && *a2 <= 1.0)
        .map(f64::sqrt)
        .collect();
    roots.dedup();
    if roots.is_empty() {
        return Err(NcqmError::Domain(format!("no ring alpha in (0, 1] for θη = {}", theta * eta)));
    }
    Ok(roots)
}

/// One row of a flux sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RingRow {
    pub phi_over_phi0: f64,
    pub l: i64,
    pub energy: f64,
    pub current: f64,
}

/// Levels and currents for each external flux (in units of `φ₀`) and each `l`.
pub fn flux_sweep(spec: &RingSpec, eta: f64, phi_over_phi0: &[f64], ls: &[i64]) -> Result<Vec<RingRow>> {
    let phi0 = spec.flux_quantum();
    let mut rows = Vec::with_capacity(phi_over_phi0.len() * ls.len());
    for &x in phi_over_phi0 {
        let at = RingSpec { flux_ext: x * phi0, ..*spec };
        for &l in ls {
            rows.push(RingRow {
                phi_over_phi0: x,
                l,
                energy: ring_levels(&at, eta, l)?,
                current: persistent_current(&at, eta, l)?,
            });
        }
    }
    Ok(rows)
}
