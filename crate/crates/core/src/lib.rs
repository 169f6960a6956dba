//! Decomposition of the one-particle quantum kinetic energy into a classical
//! part `T_C = ½∫ p |∇S|²` and a Weizsäcker part `T_W = ⅛∫ |∇p|²/p`.
//!
//! The decomposition follows from minimizing the kinetic energy of the
//! deformed momentum `P − iu` over real fields `u`; the minimizer is the
//! osmotic term `u_c = −½ ∇p/p` and the minimum is `T_C`. Atomic units
//! (ħ = m = 1) are used throughout.
//!
//! Modules:
//! - [`quadgrid`]: uniform Simpson grids and sixth-order differentiation.
//! - [`qstate`]: wavefunctions and their pointwise derived fields.
//! - [`functionals`]: kinetic integrands, Fisher information, the deformed
//!   kinetic energy and the full [`DecompositionReport`].
//! - [`hydrogenic`]: analytic hydrogen orbitals and radial distributions.
//! - [`dynamics`]: particle-in-a-box and free Gaussian evolution, plus a
//!   Crank–Nicolson propagator used as an independent check.

// `!(x > 0.0)` is used deliberately so that NaN takes the error branch
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod error;
pub mod functionals;
pub mod hydrogenic;
pub mod qstate;
pub mod quadgrid;

pub use dynamics::{GaussianPacket, PibSuperposition, System};
pub use error::{KineticError, Result};
pub use functionals::{decompose, DecompositionReport, OsmoticField};
pub use hydrogenic::{OrbitalSpec, RadialDistributions};
pub use qstate::Wavefunction;
pub use quadgrid::{ComplexField, Grid, Grid1D, Grid2D, RealField};

pub use num_complex::Complex64;
