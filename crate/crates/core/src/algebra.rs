//! Truncated Fock representations of the two-mode Heisenberg algebra and the
//! linear maps onto the noncommutative algebra
//!
//! ```text
//! [x̂, ŷ] = iθ,  [p̂_x, p̂_y] = iη,  [x̂_i, p̂_i] = iħ_eff.
//! ```
//!
//! Operators are stored sparse: every matrix here is a polynomial of low
//! degree in the ladder operators, so products stay cheap even at
//! `n_trunc = 30` (dimension 900).
//!
//! Ladder truncation corrupts the top level of each mode. Residuals are
//! measured on the interior block, where both occupation numbers are below
//! `n_trunc − 2`.

use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{NcqmError, Result};
use crate::params::{effective_planck, k_factor, PhysicalConstants};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Row-compressed complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    dim: usize,
    rows: Vec<Vec<(usize, Complex64)>>,
}

fn compress(mut row: Vec<(usize, Complex64)>) -> Vec<(usize, Complex64)> {
    row.sort_by_key(|e| e.0);
    let mut out: Vec<(usize, Complex64)> = Vec::with_capacity(row.len());
    for (j, v) in row {
        match out.last_mut() {
            Some(last) if last.0 == j => last.1 += v,
            _ => out.push((j, v)),
        }
    }
    out.retain(|e| e.1 != ZERO);
    out
}

impl SparseMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, rows: vec![Vec::new(); dim] }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            rows: (0..dim).map(|i| vec![(i, Complex64::new(1.0, 0.0))]).collect(),
        }
    }

    pub fn from_triplets(dim: usize, entries: impl IntoIterator<Item = (usize, usize, Complex64)>) -> Self {
        let mut rows = vec![Vec::new(); dim];
        for (i, j, v) in entries {
            assert!(i < dim && j < dim, "entry ({i},{j}) outside dimension {dim}");
            rows[i].push((j, v));
        }
        Self { dim, rows: rows.into_iter().map(compress).collect() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.rows[i].iter().find(|e| e.0 == j).map_or(ZERO, |e| e.1)
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            dim: self.dim,
            rows: self
                .rows
                .iter()
                .map(|r| compress(r.iter().map(|&(j, v)| (j, v * c)).collect()))
                .collect(),
        }
    }

    pub fn adjoint(&self) -> Self {
        Self::from_triplets(
            self.dim,
            self.rows
                .iter()
                .enumerate()
                .flat_map(|(i, r)| r.iter().map(move |&(j, v)| (j, i, v.conj()))),
        )
    }

    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (i, r) in self.rows.iter().enumerate() {
            for &(j, v) in r {
                m[(i, j)] = v;
            }
        }
        m
    }

    /// `max |(self − c·I)_{ij}|` over `i, j` in `block`.
    pub fn max_deviation_on(&self, c: Complex64, block: &[usize]) -> f64 {
        let mut inside = vec![false; self.dim];
        for &i in block {
            inside[i] = true;
        }
        let mut worst: f64 = 0.0;
        for &i in block {
            let mut diag_seen = false;
            for &(j, v) in &self.rows[i] {
                if !inside[j] {
                    continue;
                }
                let dev = if j == i {
                    diag_seen = true;
                    v - c
                } else {
                    v
                };
                worst = worst.max(dev.norm());
            }
            if !diag_seen {
                worst = worst.max(c.norm());
            }
        }
        worst
    }

    /// Largest entry magnitude of the whole matrix.
    pub fn max_abs(&self) -> f64 {
        self.rows.iter().flatten().map(|e| e.1.norm()).fold(0.0, f64::max)
    }
}

impl Add for &SparseMatrix {
    type Output = SparseMatrix;
    fn add(self, rhs: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.dim, rhs.dim);
        SparseMatrix {
            dim: self.dim,
            rows: self
                .rows
                .iter()
                .zip(&rhs.rows)
                .map(|(a, b)| compress(a.iter().chain(b).copied().collect()))
                .collect(),
        }
    }
}

impl Sub for &SparseMatrix {
    type Output = SparseMatrix;
    fn sub(self, rhs: &SparseMatrix) -> SparseMatrix {
        self + &rhs.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Mul for &SparseMatrix {
    type Output = SparseMatrix;
    fn mul(self, rhs: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.dim, rhs.dim);
        SparseMatrix {
            dim: self.dim,
            rows: self
                .rows
                .iter()
                .map(|r| {
                    compress(
                        r.iter()
                            .flat_map(|&(k, a)| rhs.rows[k].iter().map(move |&(j, b)| (j, a * b)))
                            .collect(),
                    )
                })
                .collect(),
        }
    }
}

impl Mul<f64> for &SparseMatrix {
    type Output = SparseMatrix;
    fn mul(self, rhs: f64) -> SparseMatrix {
        self.scale(Complex64::from(rhs))
    }
}

/// `(x, y, p_x, p_y)` as matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSpaceOps {
    pub x: SparseMatrix,
    pub y: SparseMatrix,
    pub px: SparseMatrix,
    pub py: SparseMatrix,
}

impl PhaseSpaceOps {
    /// Largest entry-wise difference over all four operators.
    pub fn max_difference(&self, other: &Self) -> f64 {
        [
            (&self.x - &other.x).max_abs(),
            (&self.y - &other.y).max_abs(),
            (&self.px - &other.px).max_abs(),
            (&self.py - &other.py).max_abs(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Ladder and canonical operators on `n_trunc²` states, index `i·n_trunc + j`
/// for occupations `(i, j)` of modes `a` (x) and `b` (y).
#[derive(Debug, Clone)]
pub struct FockRep {
    pub n_trunc: usize,
    pub ref_frequency: f64,
    pub constants: PhysicalConstants,
    pub a: SparseMatrix,
    pub a_dag: SparseMatrix,
    pub b: SparseMatrix,
    pub b_dag: SparseMatrix,
    pub ops: PhaseSpaceOps,
    pub interior_dim: usize,
}

impl FockRep {
    pub fn dim(&self) -> usize {
        self.n_trunc * self.n_trunc
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.n_trunc + j
    }

    /// States with both occupations below `interior_dim`.
    pub fn interior(&self) -> Vec<usize> {
        interior_indices(self.n_trunc, self.interior_dim)
    }

    /// `L_z = x p_y − y p_x`.
    pub fn angular_momentum(&self) -> SparseMatrix {
        &(&self.ops.x * &self.ops.py) - &(&self.ops.y * &self.ops.px)
    }

    /// `a†a + b†b`.
    pub fn total_number(&self) -> SparseMatrix {
        &(&self.a_dag * &self.a) + &(&self.b_dag * &self.b)
    }
}

fn interior_indices(n_trunc: usize, interior_dim: usize) -> Vec<usize> {
    (0..interior_dim)
        .flat_map(|i| (0..interior_dim).map(move |j| i * n_trunc + j))
        .collect()
}

/// Standard ladder construction: `x = √(ħ/2mω)(a + a†)`, `p_x = i√(mωħ/2)(a† − a)`.
pub fn build_heisenberg_rep(n_trunc: usize, c: &PhysicalConstants, ref_frequency: f64) -> Result<FockRep> {
    if n_trunc < 4 {
        return Err(NcqmError::Validation(format!("n_trunc must be at least 4, got {n_trunc}")));
    }
    c.validate()?;
    if !(ref_frequency > 0.0 && ref_frequency.is_finite()) {
        return Err(NcqmError::Validation(format!(
            "reference frequency must be positive, got {ref_frequency}"
        )));
    }
    let n = n_trunc;
    let dim = n * n;
    let lower = |mode_a: bool| {
        SparseMatrix::from_triplets(
            dim,
            (0..n).flat_map(move |i| {
                (0..n).filter_map(move |j| {
                    let (occ, target) = if mode_a {
                        (i, (i.checked_sub(1)?) * n + j)
                    } else {
                        (j, i * n + j.checked_sub(1)?)
                    };
                    Some((target, i * n + j, Complex64::from((occ as f64).sqrt())))
                })
            }),
        )
    };
    let a = lower(true);
    let b = lower(false);
    let a_dag = a.adjoint();
    let b_dag = b.adjoint();
    let x_scale = (c.hbar / (2.0 * c.mass * ref_frequency)).sqrt();
    let p_scale = (c.mass * ref_frequency * c.hbar / 2.0).sqrt();
    let ops = PhaseSpaceOps {
        x: &(&a + &a_dag) * x_scale,
        y: &(&b + &b_dag) * x_scale,
        px: (&a_dag - &a).scale(I * p_scale),
        py: (&b_dag - &b).scale(I * p_scale),
    };
    Ok(FockRep {
        n_trunc,
        ref_frequency,
        constants: *c,
        a,
        a_dag,
        b,
        b_dag,
        ops,
        interior_dim: n_trunc - 2,
    })
}

/// Which linear map produced a [`MappedRep`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapVariant {
    /// Symmetric Seiberg–Witten map.
    SeibergWitten,
    /// Maps only `(x, p_y)`.
    Asym1,
    /// Maps only `(y, p_x)`.
    Asym2,
}

/// Noncommutative operators `(x̂, ŷ, p̂_x, p̂_y)` built from a [`FockRep`].
#[derive(Debug, Clone)]
pub struct MappedRep {
    pub ops: PhaseSpaceOps,
    pub theta: f64,
    pub eta: f64,
    pub variant: MapVariant,
    pub constants: PhysicalConstants,
    pub n_trunc: usize,
    pub interior_dim: usize,
}

impl MappedRep {
    /// `ħ_eff` carried by `[x̂_i, p̂_i]`: shifted for the symmetric map only.
    pub fn hbar_eff(&self) -> f64 {
        match self.variant {
            MapVariant::SeibergWitten => effective_planck(self.theta, self.eta, &self.constants),
            MapVariant::Asym1 | MapVariant::Asym2 => self.constants.hbar,
        }
    }

    pub fn interior(&self) -> Vec<usize> {
        interior_indices(self.n_trunc, self.interior_dim)
    }
}

/// `x̂ = x − (θ/2ħ)p_y`, `ŷ = y + (θ/2ħ)p_x`, `p̂_x = p_x + (η/2ħ)y`, `p̂_y = p_y − (η/2ħ)x`.
pub fn sw_forward(rep: &FockRep, theta: f64, eta: f64) -> MappedRep {
    let h2 = 2.0 * rep.constants.hbar;
    let o = &rep.ops;
    MappedRep {
        ops: PhaseSpaceOps {
            x: &o.x - &(&o.py * (theta / h2)),
            y: &o.y + &(&o.px * (theta / h2)),
            px: &o.px + &(&o.y * (eta / h2)),
            py: &o.py - &(&o.x * (eta / h2)),
        },
        theta,
        eta,
        variant: MapVariant::SeibergWitten,
        constants: rep.constants,
        n_trunc: rep.n_trunc,
        interior_dim: rep.interior_dim,
    }
}

/// Inverse of [`sw_forward`]: `x = k[x̂ + (θ/2ħ)p̂_y]`, `y = k[ŷ − (θ/2ħ)p̂_x]`,
/// `p_x = k[p̂_x − (η/2ħ)ŷ]`, `p_y = k[p̂_y + (η/2ħ)x̂]`.
///
/// With `exact_k = false` the factor `k(E)` is replaced by one, leaving an
/// error of relative size `θη/4ħ²`.
pub fn sw_inverse(mapped: &MappedRep, theta: f64, eta: f64, exact_k: bool) -> Result<PhaseSpaceOps> {
    let c = &mapped.constants;
    let k = k_factor(theta, eta, c)?;
    let k = if exact_k { k } else { 1.0 };
    let h2 = 2.0 * c.hbar;
    let o = &mapped.ops;
    Ok(PhaseSpaceOps {
        x: &(&o.x + &(&o.py * (theta / h2))) * k,
        y: &(&o.y - &(&o.px * (theta / h2))) * k,
        px: &(&o.px - &(&o.y * (eta / h2))) * k,
        py: &(&o.py + &(&o.x * (eta / h2))) * k,
    })
}

/// One-sided maps. `asym_1`: `x̂ = x − (θ/ħ)p_y`, `p̂_y = p_y − (η/ħ)x`;
/// `asym_2`: `ŷ = y + (θ/ħ)p_x`, `p̂_x = p_x + (η/ħ)y`.
pub fn alternative_maps(rep: &FockRep, theta: f64, eta: f64, variant: MapVariant) -> Result<MappedRep> {
    let h = rep.constants.hbar;
    let o = &rep.ops;
    let ops = match variant {
        MapVariant::Asym1 => PhaseSpaceOps {
            x: &o.x - &(&o.py * (theta / h)),
            y: o.y.clone(),
            px: o.px.clone(),
            py: &o.py - &(&o.x * (eta / h)),
        },
        MapVariant::Asym2 => PhaseSpaceOps {
            x: o.x.clone(),
            y: &o.y + &(&o.px * (theta / h)),
            px: &o.px + &(&o.y * (eta / h)),
            py: o.py.clone(),
        },
        MapVariant::SeibergWitten => {
            return Err(NcqmError::Usage("the symmetric map is sw_forward, not an alternative map".into()))
        }
    };
    Ok(MappedRep {
        ops,
        theta,
        eta,
        variant,
        constants: rep.constants,
        n_trunc: rep.n_trunc,
        interior_dim: rep.interior_dim,
    })
}

/// Targets of the deformed algebra.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CommutatorTargets {
    pub theta: f64,
    pub eta: f64,
    pub hbar_eff: f64,
    /// `[x̂, p̂_y]/i`. The θ and η cross terms cancel in two dimensions, so
    /// this is zero for all three maps.
    pub c_off: f64,
}

impl CommutatorTargets {
    /// The targets a correctly built `mapped` should hit.
    pub fn expected(mapped: &MappedRep) -> Self {
        Self {
            theta: mapped.theta,
            eta: mapped.eta,
            hbar_eff: mapped.hbar_eff(),
            c_off: 0.0,
        }
    }
}

/// JSON-friendly complex number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JsonComplex {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for JsonComplex {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommutatorResidual {
    pub commutator: String,
    pub target: JsonComplex,
    pub max_residual: f64,
}

/// Max-entry deviations of the five commutators from their targets on the
/// interior block.
pub fn commutator_residuals(mapped: &MappedRep, targets: &CommutatorTargets) -> Vec<CommutatorResidual> {
    let block = mapped.interior();
    let o = &mapped.ops;
    let cases = [
        ("[x,y]", &o.x, &o.y, targets.theta),
        ("[px,py]", &o.px, &o.py, targets.eta),
        ("[x,px]", &o.x, &o.px, targets.hbar_eff),
        ("[y,py]", &o.y, &o.py, targets.hbar_eff),
        ("[x,py]", &o.x, &o.py, targets.c_off),
    ];
    cases
        .into_iter()
        .map(|(name, a, b, t)| {
            let target = I * t;
            CommutatorResidual {
                commutator: name.to_string(),
                target: target.into(),
                max_residual: a.commutator(b).max_deviation_on(target, &block),
            }
        })
        .collect()
}

/// Single frequency `Ω = ω + B` of the quadratic Hamiltonian after the
/// Bogoliubov-style diagonalization.
pub fn bogoliubov_frequency(omega: f64, b_field: f64) -> f64 {
    omega + b_field
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{coefficients_from_strengths, zeta};
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rayon::prelude::*;

    fn rep(n: usize) -> FockRep {
        build_heisenberg_rep(n, &PhysicalConstants::natural(), 1.0).unwrap()
    }

    fn residual(report: &[CommutatorResidual], name: &str) -> f64 {
        report.iter().find(|r| r.commutator == name).unwrap().max_residual
    }

    #[test]
    fn rejects_small_truncation() {
        assert!(matches!(
            build_heisenberg_rep(3, &PhysicalConstants::natural(), 1.0),
            Err(NcqmError::Validation(_))
        ));
        assert!(build_heisenberg_rep(8, &PhysicalConstants::natural(), 0.0).is_err());
    }

    #[test]
    fn ladder_algebra_on_interior() {
        let r = rep(4);
        let one = Complex64::new(1.0, 0.0);
        assert!(r.a.commutator(&r.a_dag).max_deviation_on(one, &r.interior()) < 1e-15);
        assert!(r.a.commutator(&r.b_dag).max_abs() == 0.0);
        // The top level is where truncation shows.
        let top = r.index(3, 0);
        assert_relative_eq!(r.a.commutator(&r.a_dag).get(top, top).re, -3.0, epsilon = 1e-14);
    }

    #[test]
    fn canonical_commutators_at_thirty() {
        let r = rep(30);
        assert_eq!(r.ops.x.commutator(&r.ops.y).max_abs(), 0.0);
        let dev = r.ops.x.commutator(&r.ops.px).max_deviation_on(I, &r.interior());
        assert!(dev < 1e-12, "{dev}");
    }

    #[test]
    fn identity_map_residuals_vanish() {
        let r = rep(12);
        let m = sw_forward(&r, 0.0, 0.0);
        assert_eq!(m.ops, r.ops);
        for res in commutator_residuals(&m, &CommutatorTargets::expected(&m)) {
            assert!(res.max_residual < 1e-12, "{res:?}");
        }
    }

    #[test]
    fn sw_forward_hits_deformed_algebra() {
        let r = rep(30);
        let (theta, eta) = (0.3, 0.7);
        let m = sw_forward(&r, theta, eta);
        let report = commutator_residuals(&m, &CommutatorTargets::expected(&m));
        for res in &report {
            assert!(res.max_residual < 1e-10, "{res:?}");
        }
        assert!(residual(&report, "[x,y]") < 1e-12);
        let hbar_eff = effective_planck(theta, eta, &r.constants);
        assert_eq!(m.hbar_eff(), hbar_eff);
        assert_relative_eq!(hbar_eff, 1.0 + 0.21 / 4.0, max_relative = 1e-15);
    }

    #[test]
    fn wrong_target_is_detected() {
        let r = rep(10);
        let m = sw_forward(&r, 0.2, 0.1);
        let mut t = CommutatorTargets::expected(&m);
        t.theta += 1.0;
        let res = residual(&commutator_residuals(&m, &t), "[x,y]");
        assert_relative_eq!(res, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn round_trip_exact_and_approximate() {
        let r = rep(12);
        let (theta, eta) = (0.1, 0.05);
        let m = sw_forward(&r, theta, eta);
        let back = sw_inverse(&m, theta, eta, true).unwrap();
        assert!(back.max_difference(&r.ops) < 1e-12);

        // θη/4ħ² = 1e-4.
        let (theta, eta) = (0.02, 0.02);
        let z = zeta(theta, eta, &r.constants);
        assert_relative_eq!(z, 1e-4, max_relative = 1e-12);
        let m = sw_forward(&r, theta, eta);
        let back = sw_inverse(&m, theta, eta, false).unwrap();
        let rel = (&back.x - &r.ops.x).max_abs() / r.ops.x.max_abs();
        assert!(rel > z / 2.0 && rel < 2.0 * z, "{rel}");
    }

    #[test]
    fn inverse_pole_is_reported() {
        let r = rep(6);
        let m = sw_forward(&r, 2.0, 2.0);
        assert!(matches!(sw_inverse(&m, 2.0, 2.0, true), Err(NcqmError::Singularity(_))));
    }

    #[test]
    fn alternative_maps_keep_bare_planck() {
        let r = rep(20);
        for variant in [MapVariant::Asym1, MapVariant::Asym2] {
            let m = alternative_maps(&r, 0.3, 0.0, variant).unwrap();
            let report = commutator_residuals(&m, &CommutatorTargets::expected(&m));
            assert!(residual(&report, "[x,y]") < 1e-12);
            let dev = m.ops.x.commutator(&m.ops.px).max_deviation_on(I, &m.interior());
            assert!(dev < 1e-12);
            let id = alternative_maps(&r, 0.0, 0.0, variant).unwrap();
            assert_eq!(id.ops, r.ops);
        }
        assert!(alternative_maps(&r, 0.1, 0.1, MapVariant::SeibergWitten).is_err());
    }

    #[test]
    fn symmetric_and_asymmetric_differ_by_planck_shift() {
        let r = rep(16);
        let (theta, eta) = (0.4, 0.9);
        let sw = sw_forward(&r, theta, eta);
        let block = sw.interior();
        let shift = I * (theta * eta / 4.0);
        for variant in [MapVariant::Asym1, MapVariant::Asym2] {
            let alt = alternative_maps(&r, theta, eta, variant).unwrap();
            let diff_x = &sw.ops.x.commutator(&sw.ops.px) - &alt.ops.x.commutator(&alt.ops.px);
            let diff_y = &sw.ops.y.commutator(&sw.ops.py) - &alt.ops.y.commutator(&alt.ops.py);
            assert!(diff_x.max_deviation_on(shift, &block) < 1e-12);
            assert!(diff_y.max_deviation_on(shift, &block) < 1e-12);
            let report = commutator_residuals(&alt, &CommutatorTargets::expected(&alt));
            for res in report {
                assert!(res.max_residual < 1e-10, "{variant:?} {res:?}");
            }
        }
    }

    #[test]
    fn residual_report_json_shape() {
        let m = sw_forward(&rep(6), 0.1, 0.2);
        let json = serde_json::to_value(commutator_residuals(&m, &CommutatorTargets::expected(&m))).unwrap();
        let first = &json[0];
        assert_eq!(first["commutator"], "[x,y]");
        assert_relative_eq!(first["target"]["im"].as_f64().unwrap(), 0.1);
        assert!(first["max_residual"].is_number());
    }

    #[test]
    fn parallel_grid_is_deterministic() {
        let r = rep(10);
        let grid: Vec<(f64, f64)> = (0..12).map(|i| (0.05 * i as f64, 0.3 - 0.02 * i as f64)).collect();
        let run = |(t, e): &(f64, f64)| {
            let m = sw_forward(&r, *t, *e);
            commutator_residuals(&m, &CommutatorTargets::expected(&m))
        };
        let seq: Vec<_> = grid.iter().map(run).collect();
        let par: Vec<_> = grid.par_iter().map(run).collect();
        assert_eq!(seq, par);
    }

    #[test]
    fn bogoliubov_reference_value() {
        // ħ = m = 1, η₀ = 1 at ε = ε₀: ω_ε = √(k_ε/m), B = η/2mħ.
        let c = coefficients_from_strengths(0.0, 1.0, &PhysicalConstants::natural(), false).unwrap();
        let omega = bogoliubov_frequency(c.omega_eps, c.b_e);
        assert_relative_eq!(omega, 0.5 * (1.0 + 1.0 / 2f64.sqrt()), max_relative = 1e-15);
        assert_relative_eq!(omega, 0.853_553_390_6, epsilon = 1e-10);
        // Doubling η (α = 1, doubled energy ratio) doubles Ω.
        let c2 = coefficients_from_strengths(0.0, 2.0, &PhysicalConstants::natural(), false).unwrap();
        assert_relative_eq!(bogoliubov_frequency(c2.omega_eps, c2.b_e), 2.0 * omega, max_relative = 1e-15);
        assert_eq!(bogoliubov_frequency(1.3, 0.0), 1.3);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn residuals_small_for_any_strengths(theta in -2.0f64..2.0, eta in -2.0f64..2.0, n in 8usize..14) {
            let r = rep(n);
            let m = sw_forward(&r, theta, eta);
            let t = CommutatorTargets::expected(&m);
            for res in commutator_residuals(&m, &t) {
                let scale = res.target.im.abs().max(1.0);
                prop_assert!(res.max_residual <= 1e-10 * scale, "{:?}", res);
            }
            prop_assert!((m.hbar_eff() - effective_planck(theta, eta, &r.constants)).abs() <= 1e-12);
        }

        #[test]
        fn bogoliubov_is_linear(w1 in 0.0f64..5.0, w2 in 0.0f64..5.0, b1 in -3.0f64..3.0, b2 in -3.0f64..3.0, s in 0.0f64..4.0) {
            let lhs = bogoliubov_frequency(w1 + s * w2, b1 + s * b2);
            let rhs = bogoliubov_frequency(w1, b1) + s * bogoliubov_frequency(w2, b2);
            prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()));
        }
    }
}
