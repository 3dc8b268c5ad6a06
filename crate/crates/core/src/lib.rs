//! Low-energy scattering parameters (scattering length `a_l` and effective
//! range `r_l`) for central potentials.
//!
//! All quantities are in reduced units where `U(r) = 2 mu V(r) / hbar^2`.
//! Three independent routes are provided and are expected to agree:
//! closed forms for solvable potentials ([`analytic`]), zero-energy Numerov
//! integration with integral formulas ([`solver`]), and a low-k fit of the
//! phase shift ([`phaseshift`]).

pub mod analytic;
mod error;
pub mod phaseshift;
pub mod potentials;
pub mod quadrature;
pub mod resonance;
pub mod solver;
pub mod special;

pub use error::{Error, Result};
pub use potentials::PotentialSpec;
pub use solver::{Flags, ScatteringParameters};
pub use special::L_MAX;
