//! Special functions used by the RF-FSO secrecy analysis.
//!
//! Everything here is pure and allocation-light so that callers can evaluate
//! from many threads at once:
//!
//! - [`ln_gamma`], [`ln_gamma_signed`] and the complex [`ln_gamma_complex`]
//! - [`lower_incomplete_gamma`] and the regularized pair [`gamma_p`] / [`gamma_q`]
//! - [`bessel_i`], the modified Bessel function of the first kind
//! - [`meijer_g`], a Mellin-Barnes contour evaluator for real positive arguments,
//!   plus the leading residue expansion [`meijer_g_residue_tail`]
//! - [`fixtures`], committed high-precision reference values
//! - [`quad`], the adaptive Gauss-Kronrod integrator the other pieces share

mod bessel;
mod error;
pub mod fixtures;
mod gamma;
mod meijer;
pub mod quad;

pub use bessel::bessel_i;
pub use error::{Result, SpecFunError};
pub use gamma::{gamma_p, gamma_q, ln_factorial, ln_gamma, ln_gamma_complex, ln_gamma_signed, lower_incomplete_gamma};
pub use meijer::{meijer_g, meijer_g_detailed, meijer_g_residue_tail, MeijerGSpec, MeijerValue, ResidueTail};
