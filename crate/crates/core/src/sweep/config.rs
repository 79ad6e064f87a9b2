//! JSON run configuration.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::emission_rate::{Aperture, DetectorWindow, QuadratureSettings};
use crate::error::{Error, Result};
use crate::kinematics::{
    derive_beam_quantities, zenith_from_gamma_tan, DerivedBeamQuantities, FelParameters, Frame,
};
use crate::microbunch::MicrobunchProfile;
use crate::scaling_analysis::ScalingProbe;
use crate::volkov::FloquetSettings;

/// Complete configuration; every section has a default reproducing the
/// reference LCLS setup.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub beam: FelParameters,
    pub floquet: FloquetSettings,
    pub quadrature: QuadratureSettings,
    /// Net absorbed quanta n summed in rates.
    pub channels: Vec<i32>,
    pub sweep: Option<SweepSpec>,
    pub detector: DetectorConfig,
    pub aperture: ApertureConfig,
    pub microbunch: MicrobunchProfile,
    pub scaling: ScalingConfig,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            beam: FelParameters::lcls(),
            floquet: FloquetSettings::default(),
            quadrature: QuadratureSettings::default(),
            channels: vec![1],
            sweep: None,
            detector: DetectorConfig::default(),
            aperture: ApertureConfig::default(),
            microbunch: MicrobunchProfile::lcls(),
            scaling: ScalingConfig::default(),
        }
    }
}

impl Config {
    /// Parse JSON; errors carry `path:line:column`.
    pub fn from_json(text: &str, origin: &str) -> Result<Self> {
        let cfg: Config = serde_json::from_str(text).map_err(|e| {
            Error::Config(format!("{origin}:{}:{}: {e}", e.line(), e.column()))
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text, &path.display().to_string())
    }

    pub fn validate(&self) -> Result<()> {
        self.beam.validate()?;
        self.floquet.validate()?;
        if !(self.quadrature.tolerance > 0.0) || self.quadrature.initial_order == 0 {
            return Err(Error::Config("quadrature tolerance and order must be positive".into()));
        }
        if self.channels.is_empty() || self.channels.iter().any(|&n| n < 1) {
            return Err(Error::Config("channels must list n >= 1".into()));
        }
        if let Some(s) = &self.sweep {
            s.validate()?;
        }
        self.aperture.validate()?;
        self.detector.validate()?;
        self.microbunch.validate()?;
        self.scaling.validate()?;
        Ok(())
    }

    pub fn beam_quantities(&self) -> Result<DerivedBeamQuantities> {
        derive_beam_quantities(&self.beam)
    }

    /// Canonical JSON (all defaults filled), the input of the config hash.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises")
    }
}

/// Circular aperture specified in lab γ·tan Z units.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ApertureConfig {
    /// Centre, γ·tan Z.
    pub gamma_tan: f64,
    /// Centre azimuth, rad.
    pub azimuth: f64,
    /// Angular radius in γ·tan Z units.
    pub radius_gamma_tan: f64,
    /// Photon-1 lab energy as a fraction of ω_fd for density matrices.
    pub energy_fraction: f64,
    /// Gauss–Legendre order across the radius (azimuth uses twice as many).
    pub order: usize,
}

impl Default for ApertureConfig {
    fn default() -> Self {
        ApertureConfig {
            gamma_tan: 0.6,
            azimuth: 0.0,
            radius_gamma_tan: 0.01,
            energy_fraction: 1.0 / 3.0,
            order: 3,
        }
    }
}

impl ApertureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma_tan >= 0.0) || !(self.radius_gamma_tan > 0.0) || self.order == 0 {
            return Err(Error::Config(format!("invalid aperture {self:?}")));
        }
        if !(self.energy_fraction > 0.0) {
            return Err(Error::Config("aperture energy_fraction must be positive".into()));
        }
        Ok(())
    }

    pub fn aperture(&self, dbq: &DerivedBeamQuantities) -> Aperture {
        Aperture::from_gamma_tan(self.gamma_tan, self.azimuth, self.radius_gamma_tan, dbq)
    }
}

/// Lab energy windows as offsets from ω_fd/3 and 2ω_fd/3, with the aperture
/// taken from [`ApertureConfig`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DetectorConfig {
    /// Photon-1 window as fractions of ω_fd plus eV offsets: [f·ω_fd + lo, f·ω_fd + hi].
    pub photon1_fraction: f64,
    pub photon1_offsets: [f64; 2],
    pub photon2_fraction: f64,
    pub photon2_offsets: [f64; 2],
    /// Phase used for F_MB in the pulse rates.
    pub microbunch_phase: PhaseChoice,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        DetectorConfig {
            photon1_fraction: 1.0 / 3.0,
            photon1_offsets: [-10.0, 0.0],
            photon2_fraction: 2.0 / 3.0,
            photon2_offsets: [-10.0, 0.0],
            microbunch_phase: PhaseChoice::FullCoherence,
        }
    }
}

/// Which Δφ sets F_MB for the pulse-rate chain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PhaseChoice {
    /// Δφ = 2π (on-axis phase matching).
    FullCoherence,
    /// Δφ at the aperture centre and the window centre energy.
    ApertureCentre,
}

impl DetectorConfig {
    pub fn validate(&self) -> Result<()> {
        for o in [self.photon1_offsets, self.photon2_offsets] {
            if !(o[1] >= o[0]) {
                return Err(Error::Config(format!("window offsets {o:?} not ordered")));
            }
        }
        Ok(())
    }

    pub fn window(
        &self,
        aperture: &ApertureConfig,
        channels: &[i32],
        dbq: &DerivedBeamQuantities,
    ) -> DetectorWindow {
        let w = dbq.fundamental_angular_frequency;
        let c1 = self.photon1_fraction * w;
        let c2 = self.photon2_fraction * w;
        DetectorWindow {
            photon1: [c1 + self.photon1_offsets[0], c1 + self.photon1_offsets[1]],
            photon2: [c2 + self.photon2_offsets[0], c2 + self.photon2_offsets[1]],
            aperture: aperture.aperture(dbq),
            channels: channels.to_vec(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScalingConfig {
    pub probes: Vec<ScalingProbe>,
    /// B₀λ_u range as multiples of the configured beam's product.
    pub range: [f64; 2],
    pub points: usize,
    /// Vary λ_u at fixed B₀ instead of B₀ at fixed λ_u.
    pub vary_period: bool,
}

impl Default for ScalingConfig {
    fn default() -> Self {
        ScalingConfig {
            probes: [0.51, 0.60, 0.68]
                .iter()
                .map(|&g| ScalingProbe::new(g, 1.0 / 3.0))
                .collect(),
            range: [0.7, 1.4],
            points: 12,
            vary_period: false,
        }
    }
}

impl ScalingConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.range[0] > 0.0 && self.range[1] >= 2.0 * self.range[0] * (1.0 - 1e-12)) {
            return Err(Error::Config(format!(
                "scaling range {:?} must be positive and span a factor 2",
                self.range
            )));
        }
        if self.points < 5 {
            return Err(Error::Config("scaling needs at least 5 points".into()));
        }
        Ok(())
    }
}

/// Name of a sweep axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AxisName {
    #[serde(rename = "Z1")]
    Z1,
    #[serde(rename = "Z2")]
    Z2,
    #[serde(rename = "A2-A1")]
    AzimuthDifference,
    #[serde(rename = "k1_energy")]
    K1Energy,
    #[serde(rename = "B0_lambda_u")]
    B0LambdaU,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub name: AxisName,
    pub range: [f64; 2],
    pub points: usize,
    #[serde(default = "linear")]
    pub spacing: Spacing,
}

fn linear() -> Spacing {
    Spacing::Linear
}

impl Axis {
    pub fn values(&self) -> Vec<f64> {
        let [a, b] = self.range;
        if self.points == 1 {
            return vec![a];
        }
        let last = (self.points - 1) as f64;
        (0..self.points)
            .map(|i| {
                let t = i as f64 / last;
                match self.spacing {
                    Spacing::Linear => a + (b - a) * t,
                    Spacing::Log => (a.ln() + (b.ln() - a.ln()) * t).exp(),
                }
            })
            .collect()
    }
}

/// How zenith values in a sweep are given.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AngleUnit {
    Radian,
    /// γ·tan Z in the lab (lab frame only).
    GammaTan,
}

/// Values for the axes that are not swept.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FixedValues {
    pub z1: f64,
    pub z2: f64,
    pub a1: f64,
    pub a2_minus_a1: f64,
    /// Photon-1 energy in the sweep frame, eV.
    pub k1_energy: Option<f64>,
    /// Photon-1 energy as a fraction of ω_fd (lab) or of the wave energy
    /// (electron frame); used when `k1_energy` is absent.
    pub k1_fraction: f64,
    /// T·m; absent means the configured beam.
    pub b0_lambda_u: Option<f64>,
}

impl Default for FixedValues {
    fn default() -> Self {
        FixedValues {
            z1: 0.6,
            z2: 0.6,
            a1: 0.0,
            a2_minus_a1: 0.0,
            k1_energy: None,
            k1_fraction: 1.0 / 3.0,
            b0_lambda_u: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputKind {
    Rate,
    Concurrence,
    DensityMatrix,
    FMb,
    CollectiveRate,
}

/// A grid sweep over up to five axes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub axes: Vec<Axis>,
    #[serde(default)]
    pub fixed: FixedValues,
    #[serde(default)]
    pub outputs: Vec<OutputKind>,
    pub frame: Frame,
    #[serde(default = "radian")]
    pub angle_unit: AngleUnit,
    /// Add a column normalised by the global maximum rate.
    #[serde(default)]
    pub normalize: bool,
    /// Photon-1 directions to annotate the map with (sweep-frame zenith, azimuth).
    #[serde(default)]
    pub markers: Vec<[f64; 2]>,
}

fn radian() -> AngleUnit {
    AngleUnit::Radian
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        let mut seen = std::collections::HashSet::new();
        for a in &self.axes {
            if !seen.insert(a.name) {
                return Err(Error::Config(format!("axis {:?} listed twice", a.name)));
            }
            if a.points == 0 || !a.range.iter().all(|v| v.is_finite()) {
                return Err(Error::Config(format!("axis {:?} needs points >= 1 and a finite range", a.name)));
            }
            let positive = matches!(a.name, AxisName::K1Energy | AxisName::B0LambdaU)
                || a.spacing == Spacing::Log;
            if positive && !(a.range[0] > 0.0 && a.range[1] > 0.0) {
                return Err(Error::Config(format!("axis {:?} range must be positive", a.name)));
            }
            if matches!(a.name, AxisName::Z1 | AxisName::Z2)
                && self.angle_unit == AngleUnit::Radian
                && !a.range.iter().all(|z| (0.0..=std::f64::consts::PI).contains(z))
            {
                return Err(Error::Config(format!("zenith axis {:?} outside [0, π]", a.name)));
            }
        }
        if self.angle_unit == AngleUnit::GammaTan && self.frame != Frame::Lab {
            return Err(Error::Config("angle_unit gamma-tan needs the lab frame".into()));
        }
        if !(self.fixed.k1_fraction > 0.0) || self.fixed.k1_energy.is_some_and(|e| !(e > 0.0)) {
            return Err(Error::Config("photon-1 energy must be positive".into()));
        }
        Ok(())
    }

    /// Zenith in radians from a sweep value.
    pub fn zenith(&self, value: f64, dbq: &DerivedBeamQuantities) -> f64 {
        match self.angle_unit {
            AngleUnit::Radian => value,
            AngleUnit::GammaTan => zenith_from_gamma_tan(value, dbq),
        }
    }

    pub fn has(&self, kind: OutputKind) -> bool {
        self.outputs.contains(&kind)
    }

    /// Number of grid points.
    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.points).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
