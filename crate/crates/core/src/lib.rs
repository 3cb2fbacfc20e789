//! Linearized Euler–Boussinesq dynamics around stratified Couette flow in a
//! periodic channel, one horizontal Fourier mode at a time.
//!
//! The crate is organised bottom up:
//!
//! * [`specfun`]: Kummer and Whittaker functions with branch bookkeeping,
//!   the scaled solution pair of the Taylor–Goldstein equation and its phase.
//! * [`tg`]: homogeneous solutions, Wronskians, Green's functions and the
//!   regularised resolvent (generalized stream function and density).
//! * [`spectrum`]: discrete eigenvalues, eigenfunctions, the endpoint
//!   orthogonality condition and preparation of initial data.
//! * [`oracle`]: finite-difference discretisation used as independent ground
//!   truth (Poisson solve, dense eigensolve, RK4).
//! * [`evolution`]: time evolution through the limiting-absorption spectral
//!   integral, endpoint checks and decay fits.

pub mod data;
pub mod error;
pub mod evolution;
pub mod grid;
pub mod oracle;
pub mod profile;
pub mod quad;
pub mod specfun;
pub mod spectrum;
pub mod tg;
pub mod validation;

pub use data::InitialDataMode;
pub use error::{Error, Result};
pub use grid::{GridFunction, GridKind};
pub use num_complex::Complex64;
pub use profile::Profile;
pub use specfun::{Branch, BranchedArg, ComplexEval, PhysicalParams, Regime};
pub use tg::{GreensEval, SpectralPoint};

pub use evolution::{EvolutionSeries, Fit, Norms, Quantity};
pub use spectrum::{Eigenvalue, SpectrumReport};
pub use validation::{Suite, ValidationReport};
