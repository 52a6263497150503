//! Coordinate-descent synthesis of constant-modulus sequences with low
//! peak (PSL) and integrated (ISL) aperiodic autocorrelation sidelobes.
//!
//! The crate is organised bottom-up:
//!
//! - [`sequence`] / [`autocorr`]: phase codes, their autocorrelation and the
//!   PSL / ISL / Pareto-weighted metrics, plus the classical generators.
//! - [`quartic`]: real quartic root finding, strict positivity sets and the
//!   open-interval union used by the continuous feasibility test.
//! - [`context`]: the per-coordinate coefficients `a_dk`, `b_dk`, `c_dk`.
//! - [`continuous`]: bisection solver for one phase on the whole circle.
//! - [`discrete`]: exact DFT-based solver for one phase in an M-ary alphabet.
//! - [`lp`]: l_p-norm majorization used to build good starting codes.
//! - [`driver`]: the outer coordinate-descent loop, MBI refinement,
//!   multi-start orchestration and Pareto sweeps.

pub mod autocorr;
pub mod context;
pub mod continuous;
pub mod discrete;
pub mod driver;
pub mod error;
pub mod lp;
pub mod quartic;
pub mod sequence;
mod state;

pub use autocorr::{autocorrelation, isl, objective_f_theta, psl, AutocorrVector, ParetoWeight};
pub use error::{Error, Result};
pub use sequence::{Alphabet, Generator, PhaseSequence};
