//! Spin-system models: operators, Hamiltonians and cavity-coupling operators.
//!
//! Every model is built in a fixed product basis so that Hamiltonian,
//! coupling operator and any diagnostic operator share one basis:
//!
//! * single spins: descending projection `M = +s ... -s`;
//! * dimer: `ion 1 (x) ion 2`;
//! * electronuclear: `electron (x) nucleus`.

pub mod dimer;
pub mod electronuclear;
pub mod giant;
pub mod spin;
pub mod stevens;

pub use dimer::{dimer_coupling, dimer_hamiltonian, DimerConfig};
pub use electronuclear::{electronuclear_coupling, electronuclear_hamiltonian, ElectroNuclearConfig};
pub use giant::{
    giant_spin_coupling, giant_spin_hamiltonian, toy_coupling, toy_hamiltonian, GiantSpinConfig,
    ToyConfig,
};
pub use spin::{spin_matrices, spin_matrices_checked, Spin, SpinOps};
pub use stevens::stevens_operator;

use crate::error::{Error, Result};
use crate::matrix::OperatorMatrix;

/// Static magnetic field, tesla.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldVector {
    pub bx: f64,
    pub by: f64,
    pub bz: f64,
}

impl FieldVector {
    pub fn new(bx: f64, by: f64, bz: f64) -> Self {
        Self { bx, by, bz }
    }

    pub fn zero() -> Self {
        Self::new(0.0, 0.0, 0.0)
    }

    pub fn along_z(bz: f64) -> Self {
        Self::new(0.0, 0.0, bz)
    }

    /// `direction * scale`; the direction is used as given (not normalized).
    pub fn scaled(direction: [f64; 3], scale: f64) -> Self {
        Self::new(direction[0] * scale, direction[1] * scale, direction[2] * scale)
    }

    pub fn validate(&self) -> Result<()> {
        if ![self.bx, self.by, self.bz].iter().all(|v| v.is_finite()) {
            return Err(Error::invalid("field components must be finite"));
        }
        Ok(())
    }
}

/// Cavity zero-point coupling in energy units: `lam = mu_B B_rms` (GHz per
/// unit g-factor).  Electronuclear models additionally carry the nuclear
/// triple `mu_N B_rms`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingVector {
    pub electronic: [f64; 3],
    pub nuclear: Option<[f64; 3]>,
}

impl CouplingVector {
    pub fn electronic(lx: f64, ly: f64, lz: f64) -> Self {
        Self { electronic: [lx, ly, lz], nuclear: None }
    }

    pub fn with_nuclear(mut self, nuclear: [f64; 3]) -> Self {
        self.nuclear = Some(nuclear);
        self
    }

    pub fn zero() -> Self {
        Self::electronic(0.0, 0.0, 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        if self.electronic.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("coupling components must be finite"));
        }
        if let Some(nuc) = self.nuclear {
            if nuc.iter().any(|v| !v.is_finite()) {
                return Err(Error::invalid("nuclear coupling components must be finite"));
            }
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.electronic.iter().all(|v| *v == 0.0)
            && self.nuclear.is_none_or(|n| n.iter().all(|v| *v == 0.0))
    }
}

/// One of the four supported spin-system kinds.
#[derive(Debug, Clone)]
pub enum ModelConfig {
    Toy(ToyConfig),
    GiantSpin(GiantSpinConfig),
    Dimer(DimerConfig),
    ElectroNuclear(ElectroNuclearConfig),
}

impl ModelConfig {
    pub fn dim(&self) -> usize {
        match self {
            ModelConfig::Toy(c) => c.spin().dim(),
            ModelConfig::GiantSpin(c) => c.s.dim(),
            ModelConfig::Dimer(c) => c.dim(),
            ModelConfig::ElectroNuclear(c) => c.dim(),
        }
    }

    pub fn hamiltonian(&self, b: &FieldVector) -> Result<OperatorMatrix> {
        match self {
            ModelConfig::Toy(c) => toy_hamiltonian(c, b),
            ModelConfig::GiantSpin(c) => giant_spin_hamiltonian(c, b),
            ModelConfig::Dimer(c) => dimer_hamiltonian(c, b),
            ModelConfig::ElectroNuclear(c) => electronuclear_hamiltonian(c, b),
        }
    }

    /// The Hermitian operator `V` multiplying `(a^dag + a)` in the interaction.
    pub fn coupling_operator(&self, lam: &CouplingVector) -> Result<OperatorMatrix> {
        match self {
            ModelConfig::Toy(c) => toy_coupling(c, lam),
            ModelConfig::GiantSpin(c) => giant_spin_coupling(c, lam),
            ModelConfig::Dimer(c) => dimer_coupling(c, lam),
            ModelConfig::ElectroNuclear(c) => electronuclear_coupling(c, lam),
        }
    }

    /// Diagonal of the electronic g-tensor when the model has one.
    pub fn g_diag(&self) -> Option<[f64; 3]> {
        match self {
            ModelConfig::Toy(c) => Some(c.g_diag),
            ModelConfig::GiantSpin(c) => c.g_diag(),
            _ => None,
        }
    }
}

/// Paper-anchored model presets used by the bundled scenarios and tests.
pub mod presets {
    use super::*;
    use crate::constants::K_B_GHZ_PER_K;
    use std::collections::BTreeMap;

    /// NV-like S = 1 center: `D = 2.87` GHz, isotropic `g = 2`.
    pub fn nv_toy() -> ToyConfig {
        ToyConfig { d_ghz: 2.87, g_diag: [2.0, 2.0, 2.0] }
    }

    /// S = 7/2 single-ion magnet: `D/3 O_2^0 + E O_2^2 - mu_B g B.S` with
    /// `D = 1.281` GHz, `E = 0.294` GHz, `g = 2`.
    pub fn gdw30() -> GiantSpinConfig {
        let d = 1.281;
        let e = 0.294;
        let mut stevens = BTreeMap::new();
        stevens.insert((2, 0), d / 3.0);
        stevens.insert((2, 2), e);
        GiantSpinConfig::with_diag_g(Spin::from_twice(7), stevens, [2.0, 2.0, 2.0], -1.0)
    }

    /// Weakly exchange-coupled effective spin-1/2 dimer (Er-Ce), ion 2's
    /// axis tilted 70 degrees in the x-z plane, `J12/kB = -0.015` K.
    pub fn ceer() -> DimerConfig {
        DimerConfig {
            s1: Spin::from_twice(1),
            s2: Spin::from_twice(1),
            g1_diag: [1.8, 3.7, 10.0],
            g2_diag: [1.0, 1.75, 2.67],
            theta: 70.0_f64.to_radians(),
            j12_ghz: -0.015 * K_B_GHZ_PER_K,
            gj1: 6.0 / 5.0,
            gj2: 6.0 / 7.0,
        }
    }

    /// Electronuclear S = 1/2, I = 5/2 molecule with strong axial hyperfine
    /// coupling and a nuclear quadrupolar term.
    pub fn yb_trensal() -> ElectroNuclearConfig {
        ElectroNuclearConfig {
            s: Spin::from_twice(1),
            i: Spin::from_twice(5),
            g_perp: 2.935,
            g_par: 4.225,
            g_i: -0.02592,
            a_par_ghz: -0.897,
            a_perp_ghz: -0.615,
            p_ghz: -0.066,
        }
    }
}
