//! Energy-dependent noncommutative quantum mechanics in two dimensions.
//!
//! The noncommutative strengths `θ` (coordinates) and `η` (momenta) follow a
//! power law in an energy scale. Three mechanisms decide which energy that is:
//! an external fluctuation scale ([`Mechanism::Sqf`]), the particle energy
//! itself ([`Mechanism::Ec`]), or an energy operator acting on the wave
//! function ([`Mechanism::EoI`], [`Mechanism::EoII`]).
//!
//! Module map:
//!
//! * [`params`]: model parameters and the energy-dependent effective coefficients.
//! * [`algebra`]: truncated Fock representations, Seiberg–Witten maps, commutator residuals.
//! * [`specfun`]: gamma, beta, Bessel, Laguerre and Mittag-Leffler functions.
//! * [`spectra`]: closed-form and root-found energy levels.
//! * [`wavefunctions`]: radial solutions, normalization, modified norm and current.
//! * [`fractional`]: Caputo, Liouville, Riemann–Liouville and Grünwald–Letnikov operators.
//! * [`oracle`]: independent radial finite-difference and Fock-matrix eigensolvers.
//! * [`ring`]: mesoscopic ring with a noncommutative effective flux.
//! * [`verify`]: the cross-check suite behind `ncqm verify`.

pub mod algebra;
pub mod error;
pub mod fractional;
pub mod oracle;
pub mod params;
pub mod quadrature;
pub mod ring;
pub mod specfun;
pub mod spectra;
pub mod verify;
pub mod wavefunctions;

pub use error::{NcqmError, Result};
pub use params::{EffectiveCoefficients, Mechanism, ModelParams, PhysicalConstants};
pub use spectra::QuantumNumbers;
