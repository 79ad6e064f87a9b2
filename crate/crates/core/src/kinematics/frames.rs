//! Lab ↔ electron-frame (EF) maps. The EF moves with velocity β along +x³.

use super::{DerivedBeamQuantities, FourVector};

/// Which frame an angle or energy is expressed in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Frame {
    Lab,
    Electron,
}

impl Frame {
    pub fn as_str(self) -> &'static str {
        match self {
            Frame::Lab => "lab",
            Frame::Electron => "electron",
        }
    }
}

// Boost along x³ using the beam's γ directly; recomputing γ from β would
// lose about eight digits at γ ~ 10⁴.
fn boost_z(v: FourVector, gamma: f64, beta: f64) -> FourVector {
    let gb = gamma * beta;
    FourVector::new(
        gamma * v[0] - gb * v[3],
        v[1],
        v[2],
        gamma * v[3] - gb * v[0],
    )
}

pub fn lab_to_electron_frame(v: FourVector, dbq: &DerivedBeamQuantities) -> FourVector {
    boost_z(v, dbq.gamma, dbq.beta)
}

pub fn electron_to_lab_frame(v: FourVector, dbq: &DerivedBeamQuantities) -> FourVector {
    boost_z(v, dbq.gamma, -dbq.beta)
}

// 1 − β, without cancellation.
fn one_minus_beta(dbq: &DerivedBeamQuantities) -> f64 {
    1.0 / (dbq.gamma * dbq.gamma * (1.0 + dbq.beta))
}

/// Lab zenith angle of a photon emitted at EF zenith `z_ef`:
/// γ·tan Z = sin Z′/(β + cos Z′).
pub fn zenith_angle_lab(z_ef: f64, dbq: &DerivedBeamQuantities) -> f64 {
    let s = z_ef.sin();
    // β + cos Z′ = (1 + cos Z′) − (1 − β)
    let den = 2.0 * (0.5 * z_ef).cos().powi(2) - one_minus_beta(dbq);
    s.atan2(dbq.gamma * den)
}

/// Inverse of [`zenith_angle_lab`].
pub fn zenith_angle_ef(z_lab: f64, dbq: &DerivedBeamQuantities) -> f64 {
    let s = z_lab.sin();
    // cos Z − β = (1 − β) − (1 − cos Z)
    let den = one_minus_beta(dbq) - 2.0 * (0.5 * z_lab).sin().powi(2);
    s.atan2(dbq.gamma * den)
}

/// Lab zenith angle for a given `γ·tan Z`.
pub fn zenith_from_gamma_tan(gamma_tan: f64, dbq: &DerivedBeamQuantities) -> f64 {
    (gamma_tan / dbq.gamma).atan()
}

pub fn gamma_tan(z_lab: f64, dbq: &DerivedBeamQuantities) -> f64 {
    dbq.gamma * z_lab.tan()
}

/// Doppler factor ω_lab/ω_EF for a photon with lab zenith `z_lab`:
/// 1/(γ(1 − β cos Z)).
pub fn doppler_factor_lab(z_lab: f64, dbq: &DerivedBeamQuantities) -> f64 {
    let one_minus = one_minus_beta(dbq) + 2.0 * dbq.beta * (0.5 * z_lab).sin().powi(2);
    1.0 / (dbq.gamma * one_minus)
}

/// Doppler factor ω_lab/ω_EF for a photon with EF zenith `z_ef`: γ(1 + β cos Z′).
pub fn doppler_factor_ef(z_ef: f64, dbq: &DerivedBeamQuantities) -> f64 {
    dbq.gamma * (1.0 + dbq.beta * z_ef.cos())
}

pub fn photon_energy_to_lab(omega_ef: f64, z_ef: f64, dbq: &DerivedBeamQuantities) -> f64 {
    omega_ef * doppler_factor_ef(z_ef, dbq)
}

pub fn photon_energy_to_ef(omega_lab: f64, z_lab: f64, dbq: &DerivedBeamQuantities) -> f64 {
    omega_lab / doppler_factor_lab(z_lab, dbq)
}
