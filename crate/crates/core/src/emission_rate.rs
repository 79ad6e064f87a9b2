//! Differential and detector-integrated two-photon emission rates.
//!
//! The differential rate in the electron frame is
//!
//! ```text
//! dẆ/dk₁⁰dΩ₁dΩ₂ = e⁴/(2π)⁵ · m²/(2q_i⁰) · Σ_n k₁⁰(k₂⁰)² Θ M / (2|(q_i + nk − k₁)·k₂|)
//! ```
//!
//! with M = ½ Σ_{r_i,r_f,λ₁,λ₂} |A|²/(2m)², the spin-averaged squared amplitude
//! in the ū u = 1 normalisation. Detector quantities are specified in the
//! lab; for a photon of lab energy ω and direction Ω with Doppler factor
//! D = ω/ω′, dω′ = dω/D and dΩ′ = D² dΩ, so the lab density carries the
//! Jacobian F_L·F_S = D₁·D₂².

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::entanglement::{unnormalized_density, CMat4, TwoPhotonDensityMatrix, Basis};
use crate::error::{Error, Result};
use crate::kinematics::{
    doppler_factor_ef, doppler_factor_lab, photon1_energy_for, zenith_angle_ef,
    zenith_angle_lab, zenith_from_gamma_tan, DerivedBeamQuantities, Direction, Frame,
    PairKinematics,
};
use crate::quadrature::{CompensatedSum, GaussLegendre};
use crate::units;
use crate::volkov::{
    AmplitudeEngine, Angles, FloquetSettings, HelicityAmplitudeBlock, PairSpec,
};

/// Photon directions with an explicit frame tag.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AngularConfig {
    pub z1: f64,
    pub a1: f64,
    pub z2: f64,
    pub a2: f64,
    pub frame: Frame,
}

impl AngularConfig {
    pub fn new(z1: f64, a1: f64, z2: f64, a2: f64, frame: Frame) -> Self {
        AngularConfig { z1, a1, z2, a2, frame }
    }

    pub fn validate(&self) -> Result<()> {
        let pi = std::f64::consts::PI;
        for z in [self.z1, self.z2] {
            if !(0.0..=pi).contains(&z) {
                return Err(Error::Domain(format!("zenith {z} outside [0, π]")));
            }
        }
        for a in [self.a1, self.a2] {
            if !a.is_finite() {
                return Err(Error::Domain(format!("azimuth {a} is not finite")));
            }
        }
        Ok(())
    }

    /// The same directions in the electron frame (azimuths are unchanged).
    pub fn to_electron_frame(&self, dbq: &DerivedBeamQuantities) -> AngularConfig {
        match self.frame {
            Frame::Electron => *self,
            Frame::Lab => AngularConfig {
                z1: zenith_angle_ef(self.z1, dbq),
                z2: zenith_angle_ef(self.z2, dbq),
                frame: Frame::Electron,
                ..*self
            },
        }
    }

    pub fn to_lab_frame(&self, dbq: &DerivedBeamQuantities) -> AngularConfig {
        match self.frame {
            Frame::Lab => *self,
            Frame::Electron => AngularConfig {
                z1: zenith_angle_lab(self.z1, dbq),
                z2: zenith_angle_lab(self.z2, dbq),
                frame: Frame::Lab,
                ..*self
            },
        }
    }

    pub fn angles(&self) -> (Angles, Angles) {
        (Angles::new(self.z1, self.a1), Angles::new(self.z2, self.a2))
    }
}

/// One n-channel contribution at a kinematic point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChannelRate {
    pub n: i32,
    /// False when Θ vanishes (no physical photon 2); the rate is then zero.
    pub open: bool,
    /// Electron-frame energy of photon 2, eV (0 when closed).
    pub k2_energy: f64,
    pub rate: f64,
    /// ½ Σ_spins |A(λ₁, λ₂)|²/(2m)², index 0 = +, 1 = −.
    pub helicity_squares: [[f64; 2]; 2],
}

/// Differential rate dẆ/dk₁⁰dΩ₁dΩ₂ (electron frame, natural units) at one point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RateSample {
    /// Electron-frame energy of photon 1, eV.
    pub k1_energy: f64,
    /// Electron-frame directions.
    pub angles: AngularConfig,
    pub rate: f64,
    pub channels: Vec<ChannelRate>,
}

impl RateSample {
    pub fn is_open(&self) -> bool {
        self.channels.iter().any(|c| c.open)
    }
}

/// A channel evaluation with its amplitude block.
#[derive(Clone, Debug)]
pub struct ChannelPoint {
    pub kinematics: PairKinematics,
    pub block: HelicityAmplitudeBlock,
    pub rate: ChannelRate,
}

/// Circular aperture in the lab: centre direction and angular radius.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Aperture {
    pub zenith: f64,
    pub azimuth: f64,
    pub radius: f64,
}

impl Aperture {
    /// Aperture centred at lab γ·tan Z = `gamma_tan` with a radius given in
    /// the same γ·tan Z units.
    pub fn from_gamma_tan(
        gamma_tan: f64,
        azimuth: f64,
        radius_gamma_tan: f64,
        dbq: &DerivedBeamQuantities,
    ) -> Self {
        Aperture {
            zenith: zenith_from_gamma_tan(gamma_tan, dbq),
            azimuth,
            radius: radius_gamma_tan / dbq.gamma,
        }
    }

    /// Solid angle of the cap, 2π(1 − cos r).
    pub fn solid_angle(&self) -> f64 {
        4.0 * std::f64::consts::PI * (0.5 * self.radius).sin().powi(2)
    }

    /// Product rule over the cap: Gauss–Legendre in the polar offset and a
    /// periodic trapezoid in its azimuth. Returns (lab angles, weight).
    pub fn nodes(&self, radial: usize, around: usize) -> Vec<(Angles, f64)> {
        let centre = Direction::from_angles(self.zenith, self.azimuth);
        let (t, p) = if self.zenith == 0.0 {
            ([1.0, 0.0, 0.0], [0.0, 1.0, 0.0])
        } else {
            (centre.theta_hat(), centre.phi_hat())
        };
        let gl = GaussLegendre::new(radial);
        let dpsi = 2.0 * std::f64::consts::PI / around as f64;
        let mut out = Vec::with_capacity(radial * around);
        for (rho, w) in gl.on_interval(0.0, self.radius) {
            let (sr, cr) = rho.sin_cos();
            for j in 0..around {
                let (sp, cp) = (j as f64 * dpsi).sin_cos();
                let v: [f64; 3] =
                    std::array::from_fn(|i| cr * centre.0[i] + sr * (cp * t[i] + sp * p[i]));
                let d = Direction::normalized(v);
                out.push((Angles::new(d.zenith(), d.azimuth()), w * sr * dpsi));
            }
        }
        out
    }

    fn validate(&self) -> Result<()> {
        if !(self.radius > 0.0) || !(0.0..=std::f64::consts::PI).contains(&self.zenith) {
            return Err(Error::Config(format!("invalid aperture {self:?}")));
        }
        Ok(())
    }
}

/// Lab energy windows, aperture shared by both photons, and n channels.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectorWindow {
    /// Photon 1 lab energy window [lo, hi], eV.
    pub photon1: [f64; 2],
    /// Photon 2 lab energy window [lo, hi], eV.
    pub photon2: [f64; 2],
    pub aperture: Aperture,
    #[serde(default = "default_channels")]
    pub channels: Vec<i32>,
}

fn default_channels() -> Vec<i32> {
    vec![1]
}

impl DetectorWindow {
    pub fn validate(&self) -> Result<()> {
        for w in [self.photon1, self.photon2] {
            if !(w[0] >= 0.0 && w[1] >= w[0] && w[1].is_finite()) {
                return Err(Error::Config(format!("invalid energy window {w:?}")));
            }
        }
        if self.channels.is_empty() || self.channels.iter().any(|&n| n < 1) {
            return Err(Error::Config("channel list must contain n >= 1".into()));
        }
        self.aperture.validate()
    }
}

/// Quadrature control for detector integrals.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureSettings {
    /// Relative change between successive refinements accepted as converged.
    pub tolerance: f64,
    /// Gauss–Legendre points in the energy and aperture-radius directions
    /// at the first level; the aperture azimuth uses twice as many.
    pub initial_order: usize,
    /// Number of order doublings before giving up.
    pub max_refinements: usize,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        QuadratureSettings {
            tolerance: 1e-3,
            initial_order: 1,
            max_refinements: 3,
        }
    }
}

/// Result of a detector integral.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DetectorRate {
    /// Pair probability per electron per pulse.
    pub probability: f64,
    /// Relative change at the last refinement.
    pub achieved: f64,
    pub order: usize,
    pub evaluations: usize,
}

/// e⁴/(2π)⁵.
fn coupling_prefactor() -> f64 {
    let e = units::coupling();
    e.powi(4) / (2.0 * std::f64::consts::PI).powi(5)
}

/// Single-electron emission model: beam, amplitude engine and rate formulae.
#[derive(Clone, Debug)]
pub struct EmissionModel {
    pub beam: DerivedBeamQuantities,
    pub engine: AmplitudeEngine,
}

impl EmissionModel {
    pub fn new(beam: &DerivedBeamQuantities, settings: FloquetSettings) -> Result<Self> {
        Ok(EmissionModel {
            beam: beam.clone(),
            engine: AmplitudeEngine::new(beam, settings)?,
        })
    }

    /// Electron-frame interaction time, eV⁻¹ (undulator transit).
    pub fn interaction_time(&self) -> f64 {
        self.beam.interaction_time()
    }

    /// One channel at electron-frame kinematics. `Ok(None)` when the channel
    /// is closed.
    pub fn channel(&self, n: i32, k1_energy: f64, a1: Angles, a2: Angles) -> Result<Option<ChannelPoint>> {
        let spec = PairSpec { n, k1_energy, angles1: a1, angles2: a2 };
        let (kin, block) = match self.engine.helicity_block(&spec) {
            Ok(x) => x,
            Err(Error::ChannelClosed(_)) => return Ok(None),
            Err(e) => return Err(e),
        };
        let m = self.beam.electron_mass;
        let norm = 0.5 / (4.0 * m * m);
        let mut helicity_squares = [[0.0; 2]; 2];
        for spins in block.amplitudes.iter().flatten() {
            for h1 in 0..2 {
                for h2 in 0..2 {
                    helicity_squares[h1][h2] += norm * spins[h1][h2].norm_sqr();
                }
            }
        }
        let m_bar: f64 = helicity_squares.iter().flatten().sum();
        let q_i = kin.q_initial;
        let k1 = kin.k1[0];
        let k2 = kin.k2[0];
        let flux = (kin.recoil_total().dot(kin.k2)).abs();
        let rate = coupling_prefactor() * m * m / (2.0 * q_i[0]) * k1 * k2 * k2 * m_bar
            / (2.0 * flux);
        Ok(Some(ChannelPoint {
            kinematics: kin,
            block,
            rate: ChannelRate { n, open: true, k2_energy: k2, rate, helicity_squares },
        }))
    }

    /// dẆ/dk₁⁰dΩ₁dΩ₂ summed over `channels` at electron-frame energy
    /// `k1_energy`; lab-tagged angles are mapped to the electron frame.
    pub fn differential_rate(
        &self,
        channels: &[i32],
        k1_energy: f64,
        angles: &AngularConfig,
    ) -> Result<RateSample> {
        angles.validate()?;
        let ef = angles.to_electron_frame(&self.beam);
        let (a1, a2) = ef.angles();
        let mut parts = Vec::with_capacity(channels.len());
        for &n in channels {
            parts.push(match self.channel(n, k1_energy, a1, a2)? {
                Some(p) => p.rate,
                None => ChannelRate {
                    n,
                    open: false,
                    k2_energy: 0.0,
                    rate: 0.0,
                    helicity_squares: [[0.0; 2]; 2],
                },
            });
        }
        let rate = parts.iter().map(|c| c.rate).collect::<CompensatedSum>().value();
        Ok(RateSample { k1_energy, angles: ef, rate, channels: parts })
    }

    /// Electron-frame photon-1 energy for a lab energy along lab zenith `z_lab`.
    pub fn k1_from_lab(&self, omega_lab: f64, z_lab: f64) -> f64 {
        omega_lab / doppler_factor_lab(z_lab, &self.beam)
    }

    /// Pair probability density per lab (dω₁ dΩ₁ dΩ₂) at lab kinematics:
    /// U = T · D₁ · D₂² · dẆ/dk₁⁰dΩ₁dΩ₂|_EF. Returns the density and the
    /// lab energy of photon 2 (`None` when closed).
    pub fn u_pair(&self, n: i32, omega1_lab: f64, a1_lab: Angles, a2_lab: Angles) -> Result<(f64, Option<f64>)> {
        let d1 = doppler_factor_lab(a1_lab.zenith, &self.beam);
        let d2 = doppler_factor_lab(a2_lab.zenith, &self.beam);
        let z1 = zenith_angle_ef(a1_lab.zenith, &self.beam);
        let z2 = zenith_angle_ef(a2_lab.zenith, &self.beam);
        let point = self.channel(
            n,
            omega1_lab / d1,
            Angles::new(z1, a1_lab.azimuth),
            Angles::new(z2, a2_lab.azimuth),
        )?;
        Ok(match point {
            Some(p) => (
                self.interaction_time() * d1 * d2 * d2 * p.rate.rate,
                Some(p.rate.k2_energy * doppler_factor_ef(z2, &self.beam)),
            ),
            None => (0.0, None),
        })
    }

    /// Lab ω₁ interval inside `photon1` for which photon 2 along `a2_lab`
    /// lands in `photon2`. Empty intervals come back as `None`.
    pub fn photon1_interval(
        &self,
        n: i32,
        window: &DetectorWindow,
        a1_lab: Angles,
        a2_lab: Angles,
    ) -> Option<(f64, f64)> {
        let dbq = &self.beam;
        let d1 = doppler_factor_lab(a1_lab.zenith, dbq);
        let d2 = doppler_factor_lab(a2_lab.zenith, dbq);
        let dir1 = Angles::new(zenith_angle_ef(a1_lab.zenith, dbq), a1_lab.azimuth).direction();
        let dir2 = Angles::new(zenith_angle_ef(a2_lab.zenith, dbq), a2_lab.azimuth).direction();
        let ends = window.photon2.map(|w2| d1 * photon1_energy_for(n, dir1, dir2, w2 / d2, dbq));
        let lo = ends[0].min(ends[1]).max(window.photon1[0]);
        let hi = ends[0].max(ends[1]).min(window.photon1[1]);
        (hi > lo && lo >= 0.0).then_some((lo, hi))
    }

    /// Detector integral at a fixed quadrature order.
    pub fn detector_rate_at(&self, window: &DetectorWindow, order: usize) -> Result<(f64, usize)> {
        window.validate()?;
        let caps = window.aperture.nodes(order, 2 * order);
        let gl = GaussLegendre::new(order);
        let pairs: Vec<(usize, usize)> = (0..caps.len())
            .flat_map(|i| (0..caps.len()).map(move |j| (i, j)))
            .collect();
        let cells: Vec<Result<(f64, usize)>> = pairs
            .par_iter()
            .map(|&(i, j)| {
                let (a1, w1) = caps[i];
                let (a2, w2) = caps[j];
                let mut acc = CompensatedSum::new();
                let mut evals = 0;
                for &n in &window.channels {
                    let Some((lo, hi)) = self.photon1_interval(n, window, a1, a2) else {
                        continue;
                    };
                    for (omega, we) in gl.on_interval(lo, hi) {
                        let (u, _) = self.u_pair(n, omega, a1, a2)?;
                        evals += 1;
                        acc.add(we * u);
                    }
                }
                Ok((w1 * w2 * acc.value(), evals))
            })
            .collect();
        let mut total = CompensatedSum::new();
        let mut evals = 0;
        for c in cells {
            let (v, e) = c?;
            total.add(v);
            evals += e;
        }
        Ok((total.value(), evals))
    }

    /// R_SE: pair probability per electron through the detector, with the
    /// quadrature order doubled until successive results agree.
    pub fn pair_rate_through_detector(
        &self,
        window: &DetectorWindow,
        quad: &QuadratureSettings,
    ) -> Result<DetectorRate> {
        let mut order = quad.initial_order.max(1);
        let (mut prev, mut evaluations) = self.detector_rate_at(window, order)?;
        let mut achieved = f64::INFINITY;
        for _ in 0..quad.max_refinements {
            order *= 2;
            let (next, e) = self.detector_rate_at(window, order)?;
            evaluations += e;
            achieved = if next == 0.0 { (next - prev).abs() } else { ((next - prev) / next).abs() };
            prev = next;
            if achieved < quad.tolerance {
                return Ok(DetectorRate { probability: prev, achieved, order, evaluations });
            }
        }
        Err(Error::Convergence {
            what: format!("detector quadrature at order {order}"),
            achieved,
            requested: quad.tolerance,
        })
    }

    /// Rate-weighted density matrix of pairs at lab energy `omega1_lab` with
    /// both photons inside the aperture.
    pub fn aperture_density_matrix(
        &self,
        n: i32,
        omega1_lab: f64,
        aperture: &Aperture,
        order: usize,
    ) -> Result<(TwoPhotonDensityMatrix, f64)> {
        aperture.validate()?;
        let caps = aperture.nodes(order, 2 * order);
        let pairs: Vec<(usize, usize)> = (0..caps.len())
            .flat_map(|i| (0..caps.len()).map(move |j| (i, j)))
            .collect();
        let cells: Vec<Result<Option<(CMat4, f64)>>> = pairs
            .par_iter()
            .map(|&(i, j)| {
                let (a1, w1) = caps[i];
                let (a2, w2) = caps[j];
                self.weighted_density(n, omega1_lab, a1, a2, w1 * w2)
            })
            .collect();
        let mut sum = CMat4::zeros();
        let mut weight = CompensatedSum::new();
        for c in cells {
            if let Some((m, w)) = c? {
                sum += m;
                weight.add(w);
            }
        }
        let rho = TwoPhotonDensityMatrix::from_unnormalized(sum, Basis::Helicity)?;
        Ok((rho, weight.value()))
    }

    /// Normalised ρ at one lab point scaled by its quadrature weight times
    /// the lab rate density.
    fn weighted_density(
        &self,
        n: i32,
        omega1_lab: f64,
        a1: Angles,
        a2: Angles,
        weight: f64,
    ) -> Result<Option<(CMat4, f64)>> {
        let d1 = doppler_factor_lab(a1.zenith, &self.beam);
        let d2 = doppler_factor_lab(a2.zenith, &self.beam);
        let z1 = zenith_angle_ef(a1.zenith, &self.beam);
        let z2 = zenith_angle_ef(a2.zenith, &self.beam);
        let Some(p) = self.channel(
            n,
            omega1_lab / d1,
            Angles::new(z1, a1.azimuth),
            Angles::new(z2, a2.azimuth),
        )?
        else {
            return Ok(None);
        };
        let u = self.interaction_time() * d1 * d2 * d2 * p.rate.rate * weight;
        let raw = unnormalized_density(&p.block);
        let tr = raw.trace().re;
        if !(tr > 0.0) {
            return Ok(None);
        }
        Ok(Some((raw * crate::volkov::C64::new(u / tr, 0.0), u)))
    }
}
