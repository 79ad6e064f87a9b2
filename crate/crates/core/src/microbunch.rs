//! Coherent enhancement from a microbunched beam.
//!
//! Adjacent microbunches are displaced by Δl along x³ in the electron frame;
//! photons emitted by them differ in phase by Δφ = Δl·Δk with Δk the
//! momentum transfer k₁ + k₂ − k. Within one coherent section the amplitude
//! picks up H = Σ_j N_j e^{ijΔφ}, and the pulse rate is enhanced by
//! F_MB = |H|²·N_i with N_i coherent sections.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::emission_rate::RateSample;
use crate::error::{Error, Result};
use crate::kinematics::{DerivedBeamQuantities, Frame};

/// Electron populations of the microbunches in one coherent section.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MicrobunchProfile {
    /// N_j, one entry per coherent microbunch (N_c = length).
    pub populations: Vec<u64>,
    /// Total electrons in the pulse, N_e.
    pub total_electrons: u64,
}

impl MicrobunchProfile {
    /// `coherent` bunches of `per_bunch` electrons each.
    pub fn uniform(coherent: usize, per_bunch: u64, total_electrons: u64) -> Result<Self> {
        let p = MicrobunchProfile {
            populations: vec![per_bunch; coherent],
            total_electrons,
        };
        p.validate()?;
        Ok(p)
    }

    /// N_c = 22 bunches of 10⁶ electrons out of 1.12×10⁹.
    pub fn lcls() -> Self {
        MicrobunchProfile {
            populations: vec![1_000_000; 22],
            total_electrons: 1_120_000_000,
        }
    }

    /// Single-electron "bunches" across the whole pulse: no coherence.
    pub fn synchrotron(total_electrons: u64) -> Self {
        MicrobunchProfile {
            populations: vec![1],
            total_electrons,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.populations.is_empty() || self.populations.contains(&0) {
            return Err(Error::Config("microbunch populations must be positive".into()));
        }
        if self.section_count() < 1 {
            return Err(Error::Config(format!(
                "N_e = {} is smaller than one coherent section ({} electrons)",
                self.total_electrons,
                self.section_population()
            )));
        }
        Ok(())
    }

    pub fn coherent_bunches(&self) -> usize {
        self.populations.len()
    }

    /// Σ N_j.
    pub fn section_population(&self) -> u64 {
        self.populations.iter().sum()
    }

    /// N_i = ⌊N_e / Σ N_j⌋; the remainder electrons are dropped.
    pub fn section_count(&self) -> u64 {
        self.total_electrons / self.section_population()
    }
}

/// Heuristic N_c: microbunches per cooperation length λ/(4π√3 ρ), floored.
/// ρ = 2×10⁻³ gives 22.
pub fn coherent_bunches_from_pierce(pierce_parameter: f64) -> Result<usize> {
    if !(pierce_parameter > 0.0) {
        return Err(Error::Config(format!("Pierce parameter {pierce_parameter} must be positive")));
    }
    let n = (1.0 / (4.0 * std::f64::consts::PI * 3f64.sqrt() * pierce_parameter)).floor();
    Ok((n as usize).max(1))
}

/// Δl = (λ_u/γ)(1 + K²)/(2 + K²), metres in the electron frame.
pub fn bunch_displacement(dbq: &DerivedBeamQuantities) -> f64 {
    let k2 = dbq.undulator_parameter.powi(2);
    dbq.undulator_period_length / dbq.gamma * (1.0 + k2) / (2.0 + k2)
}

/// Closed-form Δφ for n = 1 at electron-frame zeniths and photon-1 energy
/// `k1_energy` (eV).
pub fn phase_difference(z1: f64, z2: f64, k1_energy: f64, dbq: &DerivedBeamQuantities) -> f64 {
    let k2 = dbq.undulator_parameter.powi(2);
    let (c1, c2) = (z1.cos(), z2.cos());
    let t = k1_energy / dbq.wave_energy();
    2.0 * std::f64::consts::PI * (1.0 + k2) * (1.0 + c2 - (c2 - c1) * t)
        / (2.0 + k2 * (1.0 + c2))
}

/// Photon-2 energy for n = 1 from q_i·(k − k₁ − k₂) = 0, i.e. energy-momentum
/// conservation with the electron recoil neglected:
/// k₁⁰ w(Z₁′) + k₂⁰ w(Z₂′) = 2k⁰, w(Z) = 2 + K²(1 + cos Z).
pub fn recoilless_photon2_energy(z1: f64, z2: f64, k1_energy: f64, dbq: &DerivedBeamQuantities) -> f64 {
    let k2 = dbq.undulator_parameter.powi(2);
    let w = |z: f64| 2.0 + k2 * (1.0 + z.cos());
    (2.0 * dbq.wave_energy() - k1_energy * w(z1)) / w(z2)
}

/// Δφ = Δl·Δk with Δk = k₁ + k₂ − k projected on x³ and k₂ from
/// [`recoilless_photon2_energy`].
pub fn phase_from_momentum_transfer(
    z1: f64,
    z2: f64,
    k1_energy: f64,
    dbq: &DerivedBeamQuantities,
) -> f64 {
    let k2 = recoilless_photon2_energy(z1, z2, k1_energy, dbq);
    // k points along −x³, so −k contributes +k⁰.
    let dk = k1_energy * z1.cos() + k2 * z2.cos() + dbq.wave_energy();
    crate::units::metres_to_inv_ev(bunch_displacement(dbq)) * dk
}

/// H = Σ_{j=1}^{N_c} N_j e^{ijΔφ}.
pub fn enhancement_h(profile: &MicrobunchProfile, delta_phi: f64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (j, &n) in profile.populations.iter().enumerate() {
        acc += Complex64::from_polar(n as f64, (j + 1) as f64 * delta_phi);
    }
    acc
}

/// |H|²·N_i at a given phase difference.
pub fn f_mb_at_phase(profile: &MicrobunchProfile, delta_phi: f64) -> f64 {
    enhancement_h(profile, delta_phi).norm_sqr() * profile.section_count() as f64
}

/// F_MB(Z₁′, Z₂′, k₁⁰).
pub fn f_mb(
    profile: &MicrobunchProfile,
    z1: f64,
    z2: f64,
    k1_energy: f64,
    dbq: &DerivedBeamQuantities,
) -> f64 {
    f_mb_at_phase(profile, phase_difference(z1, z2, k1_energy, dbq))
}

/// A single-electron sample scaled to the whole pulse.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CollectiveSample {
    /// Enhanced sample; per-channel helicity data are left untouched.
    pub sample: RateSample,
    pub enhancement: f64,
    pub delta_phi: f64,
}

/// (dẆ)_C = dẆ·F_MB for a sample tagged in the electron frame.
pub fn collective_rate(
    sample: &RateSample,
    profile: &MicrobunchProfile,
    dbq: &DerivedBeamQuantities,
) -> Result<CollectiveSample> {
    if sample.angles.frame != Frame::Electron {
        return Err(Error::Contract(
            "collective_rate needs electron-frame angles".into(),
        ));
    }
    profile.validate()?;
    let delta_phi = phase_difference(sample.angles.z1, sample.angles.z2, sample.k1_energy, dbq);
    let enhancement = f_mb_at_phase(profile, delta_phi);
    let mut out = sample.clone();
    out.rate *= enhancement;
    for c in &mut out.channels {
        c.rate *= enhancement;
    }
    Ok(CollectiveSample { sample: out, enhancement, delta_phi })
}

/// Single-electron, synchrotron and FEL pulse rates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PulseRates {
    pub single_electron: f64,
    pub synchrotron: f64,
    pub fel: f64,
    /// R_FEL / R_Sync.
    pub enhancement_ratio: f64,
    pub f_mb: f64,
}

/// R_Sync = N_e·R_SE and R_FEL = F_MB·R_SE at phase difference `delta_phi`.
pub fn pulse_rates(r_se: f64, profile: &MicrobunchProfile, delta_phi: f64) -> PulseRates {
    let f = f_mb_at_phase(profile, delta_phi);
    let sync = profile.total_electrons as f64 * r_se;
    let fel = f * r_se;
    PulseRates {
        single_electron: r_se,
        synchrotron: sync,
        fel,
        enhancement_ratio: fel / sync,
        f_mb: f,
    }
}
