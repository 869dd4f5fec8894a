//! Phase-estimation bounds for multi-headed cat-state resources.
//!
//! Two independent routes compute the quantum Fisher information (QFI) of
//! each resource family:
//!
//! * [`closed_form`] evaluates the analytic expressions as scalar functions;
//! * [`fock`], [`channels`] and [`qfi`] build the states in a truncated
//!   two-mode Fock space, push them through beam splitters, phase averaging
//!   and photon loss, and compute the QFI from the resulting spectra.
//!
//! [`bench`] ties both routes together into figure sweeps, equal-energy
//! comparisons and a consistency verifier.

pub mod bench;
pub mod channels;
pub mod closed_form;
mod density;
pub mod error;
pub mod fock;
pub mod qfi;

pub use error::{Error, Result};
pub use num_complex::Complex64;
