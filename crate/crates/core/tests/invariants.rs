use approx::assert_relative_eq;
use proptest::prelude::*;

use ncqm::oracle::{fock_matrix_eigensolve, radial_fd_eigensolve, FrozenCoefficients, RadialGrid, DEFAULT_XI_MAX};
use ncqm::params::{effective_coefficients, effective_planck, k_factor};
use ncqm::ring::{ground_state, nc_flux, RingSpec};
use ncqm::spectra::{ec_quantization_residual, ec_solve_energy, fixed_coefficient_spectrum};
use ncqm::verify::{run_verification, CheckStatus};
use ncqm::{Mechanism, ModelParams, PhysicalConstants, QuantumNumbers};

fn ec_oscillator(eta0: f64, theta0: f64, e_ref: f64, k: f64) -> ModelParams {
    ModelParams {
        eta0,
        theta0,
        alpha_exp: 1.0,
        beta_exp: 1.0,
        e_ref,
        mechanism: Mechanism::Ec,
        constants: PhysicalConstants::oscillator(k),
        approximate_k: false,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn matrix_oracle_matches_closed_form(m_star in 0.5f64..2.0, b in -0.4f64..0.4, k in 0.3f64..3.0) {
        let c = PhysicalConstants::natural();
        let co = FrozenCoefficients { m_star, b_field: b, k_elastic: k };
        let s = fock_matrix_eigensolve(20, &co, &c, 10).unwrap();
        for l in &s.levels {
            prop_assert!(l.converged);
            let n = ((l.energy + c.hbar * b * l.m as f64) / (c.hbar * co.omega()) - 1.0 - l.m.unsigned_abs() as f64) / 2.0;
            prop_assert!((n - n.round()).abs() < 1e-9, "level {l:?} not on the ladder");
        }
    }

    #[test]
    fn ec_roots_satisfy_condition(eta0 in 0.0f64..0.8, theta0 in 0.0f64..0.8, n in 0u32..4, m in 0u32..4) {
        let p = ec_oscillator(eta0, theta0, 5.0, 1.0);
        let qn = QuantumNumbers::radial(n, m);
        let r = ec_solve_energy(&qn, &p, (1e-8, 1e8), 1e-12).unwrap();
        prop_assert!(ec_quantization_residual(r.energy, &qn, &p).unwrap().abs() <= 1e-9);
        // The root is a fixed point of the frozen-coefficient spectrum.
        let co = effective_coefficients(&p, r.energy).unwrap();
        let frozen = fixed_coefficient_spectrum(&qn, &co, &p.constants);
        prop_assert!((frozen - r.energy).abs() <= 1e-9 * r.energy);
    }

    #[test]
    fn planck_and_k_are_reciprocal_up_to_hbar(theta in -1.0f64..1.0, eta in -1.0f64..1.0) {
        let c = PhysicalConstants::natural();
        let he = effective_planck(theta, eta, &c);
        let k = k_factor(theta, eta, &c).unwrap();
        // ħ_eff/ħ = 1 + ζ and 1/k = 1 − ζ.
        prop_assert!((he / c.hbar + 1.0 / k - 2.0).abs() < 1e-14);
    }

    #[test]
    fn ring_ground_current_is_odd_about_nc_flux(eta in 0.0f64..0.3, offset in 0.01f64..0.49) {
        let base = RingSpec::with_bare_mass(1.1, 0.0, 0.95, PhysicalConstants::natural());
        let f = nc_flux(&base, eta).unwrap();
        let at = |shift: f64| RingSpec { flux_ext: f.phi_nc + shift * f.phi0, ..base };
        let (_, e_plus, i_plus) = ground_state(&at(offset), eta).unwrap();
        let (_, e_minus, i_minus) = ground_state(&at(-offset), eta).unwrap();
        prop_assert!((i_plus + i_minus).abs() <= 1e-12 * i_plus.abs().max(1e-12));
        prop_assert!((e_plus - e_minus).abs() <= 1e-12 * e_plus.abs().max(1.0));
    }
}

#[test]
fn radial_and_matrix_oracles_agree_including_negative_m() {
    let c = PhysicalConstants::natural();
    let co = FrozenCoefficients { m_star: 1.3, b_field: 0.25, k_elastic: 0.8 };
    let grid = RadialGrid::for_coefficients(&co, &c, DEFAULT_XI_MAX, 1500);
    let matrix = fock_matrix_eigensolve(20, &co, &c, 12).unwrap();
    for m in -3..=3 {
        let radial = radial_fd_eigensolve(&co, m, &grid, 2, &c).unwrap();
        for (n, e) in radial.iter().enumerate() {
            assert_relative_eq!(*e, co.analytic_level(n as u32, m, &c), max_relative = 1e-7);
            if let Some(f) = matrix.level(n as u32, m) {
                assert_relative_eq!(*e, f, max_relative = 1e-7);
            }
        }
    }
}

#[test]
fn verify_report_for_each_mechanism() {
    for mechanism in [Mechanism::Sqf, Mechanism::Ec, Mechanism::EoI, Mechanism::EoII] {
        let p = ModelParams { mechanism, ..ModelParams::default() };
        let report = run_verification(&p).unwrap();
        assert!(!report.breached(), "{mechanism}: {:#?}", report.entries);
        assert_eq!(
            report.entry("spectrum.bogoliubov_vs_matrix").unwrap().status,
            CheckStatus::ExpectedDivergence
        );
    }
}
