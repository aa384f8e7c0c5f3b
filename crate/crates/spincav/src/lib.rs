//! Simulation of the dispersive readout of molecular spin systems coupled to
//! a superconducting cavity.
//!
//! The crate builds spin Hamiltonians for four model kinds (uniaxial S = 1,
//! giant spin with Stevens anisotropy, two-ion dimer, electron-nucleus
//! system), rotates the cavity coupling into the eigenbasis, and evaluates
//! the state-dependent cavity transmission obtained from the input-output
//! formalism.  A Schrieffer-Wolff layer exposes the second-order effective
//! Hamiltonian and back-action (QND) diagnostics, and a truncated-Fock exact
//! diagonalization module serves as the independent oracle for all of it.
//!
//! Units: energies and frequencies as `E/h` in GHz, magnetic fields in
//! tesla, temperatures in kelvin (see [`constants`]).

pub mod constants;
pub mod dispersive;
pub mod eigen;
pub mod error;
pub mod export;
pub mod inout;
pub mod matrix;
pub mod model;
pub mod oracle;
pub mod scenario;
pub mod selfcheck;

pub use error::{Error, Result};
pub use matrix::OperatorMatrix;
