//! Kummer and Whittaker functions, the regime pair of Taylor–Goldstein
//! solutions and the phase of `M_+`.

mod kummer;
mod pair;
mod phase;
mod whittaker;

pub use kummer::{kummer_m, Z_MAX};
pub use pair::{scaled_pair, PairEval, PhysicalParams, Regime, ScaledPair, QUARTER_TOL};
pub use phase::{gamma_abs_sq, phase_theta, PhaseFunction};
pub use whittaker::{
    whittaker_m, whittaker_w0, Branch, BranchedArg, ComplexEval, WhittakerM, WhittakerW0,
};
