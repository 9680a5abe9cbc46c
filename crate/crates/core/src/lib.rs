//! Secrecy analysis of a mixed RF-FSO relay link with outdated CSI and
//! transmit antenna selection.

pub mod analytics;
mod error;
pub mod fso;
pub mod montecarlo;
pub mod rf;
pub mod scenario;
pub mod validation;

pub use error::{Result, RffsoError};
