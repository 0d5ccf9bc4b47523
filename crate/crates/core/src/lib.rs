//! Entanglement-induced transparency for continuous-variable and qubit states.
//!
//! Two independent engines describe the same optics: [`gaussian`] evolves covariance
//! matrices under the symplectic beam-splitter pair, [`fock`] evolves truncated Fock
//! amplitudes sector by sector. [`protocols`] runs scenarios on both, and [`qubit`]
//! covers the discrete Pauli-rotation analogue.

pub mod cli;
pub mod error;
pub mod fock;
pub mod gaussian;
pub mod protocols;
pub mod qubit;
pub mod svg;

pub use error::{Error, Result};
