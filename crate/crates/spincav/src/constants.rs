//! Physical conversion constants in the linear-frequency unit system.
//!
//! All energies and frequencies in this crate are stored as `E/h` in GHz.
//! Magnetic fields are in tesla and temperatures in kelvin, so the three
//! constants below are the only unit conversions that ever appear.
//! Values are CODATA-2018 derived (`mu_B/h`, `mu_N/h`, `k_B/h`).

/// Bohr magneton over Planck constant, GHz/T.
pub const MU_B_GHZ_PER_T: f64 = 13.996245;

/// Nuclear magneton over Planck constant, GHz/T.
pub const MU_N_GHZ_PER_T: f64 = 7.6225932e-3;

/// Boltzmann constant over Planck constant, GHz/K.
pub const K_B_GHZ_PER_K: f64 = 20.836619;
