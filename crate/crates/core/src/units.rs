//! Physical constants (CODATA 2018) and the single SI/eV <-> natural-unit layer.
//!
//! Internally everything is expressed in natural Heaviside-Lorentz units with
//! ħ = c = ε₀ = 1 and energies in eV. Lengths and times are carried as eV⁻¹.

use serde::Serialize;

/// Electron rest energy, eV.
pub const ELECTRON_MASS_EV: f64 = 0.510_998_950_00e6;
/// Fine-structure constant.
pub const FINE_STRUCTURE: f64 = 7.297_352_569_3e-3;
/// Elementary charge, C (exact).
pub const ELEMENTARY_CHARGE_C: f64 = 1.602_176_634e-19;
/// Electron mass, kg.
pub const ELECTRON_MASS_KG: f64 = 9.109_383_701_5e-31;
/// Speed of light, m/s (exact).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// ħc, eV·m.
pub const HBAR_C_EV_M: f64 = 197.326_980_4e-9;
/// ħ, eV·s.
pub const HBAR_EV_S: f64 = 6.582_119_569e-16;

/// Coupling e = sqrt(4πα) in Heaviside-Lorentz natural units.
pub fn coupling() -> f64 {
    (4.0 * std::f64::consts::PI * FINE_STRUCTURE).sqrt()
}

/// Inverse length in m⁻¹ to energy in eV.
pub fn per_metre_to_ev(k: f64) -> f64 {
    k * HBAR_C_EV_M
}

/// Length in metres to eV⁻¹.
pub fn metres_to_inv_ev(l: f64) -> f64 {
    l / HBAR_C_EV_M
}

/// Photon energy (eV) to vacuum wavelength (m).
pub fn ev_to_wavelength(e: f64) -> f64 {
    2.0 * std::f64::consts::PI * HBAR_C_EV_M / e
}

/// Constants actually used for a run, recorded in output manifests.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct UnitConstants {
    pub codata: &'static str,
    pub electron_mass_ev: f64,
    pub fine_structure: f64,
    pub elementary_charge_c: f64,
    pub electron_mass_kg: f64,
    pub speed_of_light_m_s: f64,
    pub hbar_c_ev_m: f64,
    pub hbar_ev_s: f64,
}

impl Default for UnitConstants {
    fn default() -> Self {
        UnitConstants {
            codata: "CODATA 2018",
            electron_mass_ev: ELECTRON_MASS_EV,
            fine_structure: FINE_STRUCTURE,
            elementary_charge_c: ELEMENTARY_CHARGE_C,
            electron_mass_kg: ELECTRON_MASS_KG,
            speed_of_light_m_s: SPEED_OF_LIGHT,
            hbar_c_ev_m: HBAR_C_EV_M,
            hbar_ev_s: HBAR_EV_S,
        }
    }
}
