//! Grid expansion and per-point evaluation.

use rayon::prelude::*;
use serde::Serialize;

use super::config::{AxisName, Config, FixedValues, OutputKind, SweepSpec};
use crate::emission_rate::{ChannelPoint, EmissionModel};
use crate::entanglement::{
    density_matrix, unnormalized_density, Basis, CMat4, EntanglementReport,
    TwoPhotonDensityMatrix,
};
use crate::error::{Error, Result};
use crate::kinematics::{
    derive_beam_quantities, doppler_factor_lab, gamma_tan, photon_energy_to_ef,
    photon_energy_to_lab, zenith_angle_ef, zenith_angle_lab, DerivedBeamQuantities, Frame,
};
use crate::microbunch::{f_mb_at_phase, phase_difference, MicrobunchProfile};
use crate::quadrature::CompensatedSum;
use crate::volkov::{Angles, C64};

/// Anything that yields channel amplitudes at electron-frame kinematics.
/// [`EmissionModel`] is the physical source; tests substitute synthetic
/// blocks through this trait.
pub trait AmplitudeSource: Sync {
    fn beam(&self) -> &DerivedBeamQuantities;
    fn interaction_time(&self) -> f64 {
        self.beam().interaction_time()
    }
    fn channel(&self, n: i32, k1_energy: f64, a1: Angles, a2: Angles) -> Result<Option<ChannelPoint>>;
}

impl AmplitudeSource for EmissionModel {
    fn beam(&self) -> &DerivedBeamQuantities {
        &self.beam
    }

    fn channel(&self, n: i32, k1_energy: f64, a1: Angles, a2: Angles) -> Result<Option<ChannelPoint>> {
        EmissionModel::channel(self, n, k1_energy, a1, a2)
    }
}

/// Sweep-frame coordinates of one grid point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GridCoords {
    pub index: usize,
    /// Index into the list of B₀λ_u values (one model each).
    pub beam_index: usize,
    pub b0_lambda_u: f64,
    /// Zeniths in the sweep's angle unit.
    pub z1: f64,
    pub z2: f64,
    pub a1: f64,
    pub a2: f64,
    /// Photon-1 energy in the sweep frame; `None` means the configured fraction.
    pub k1_energy: Option<f64>,
}

/// Everything written for one grid point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PointRecord {
    pub coords: GridCoords,
    pub z1_lab: f64,
    pub z2_lab: f64,
    pub z1_ef: f64,
    pub z2_ef: f64,
    pub gamma_tan_z1: f64,
    pub gamma_tan_z2: f64,
    pub k1_energy_ef: f64,
    /// Photon 2 of the first open channel, electron frame (0 when closed).
    pub k2_energy_ef: f64,
    pub omega1_lab: f64,
    pub omega2_lab: f64,
    pub open: bool,
    /// dẆ/dk₁⁰dΩ₁dΩ₂ in the electron frame.
    pub rate: f64,
    /// T·D₁·D₂²·rate: pair probability per lab dω₁dΩ₁dΩ₂.
    pub u_pair: f64,
    pub rate_normalized: Option<f64>,
    /// Helicity-basis ρ and its measures; `None` where the rate vanishes.
    pub entanglement: Option<PointEntanglement>,
    pub delta_phi: Option<f64>,
    pub f_mb: Option<f64>,
    pub collective_rate: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PointEntanglement {
    pub report: EntanglementReport,
    #[serde(skip)]
    pub rho: CMat4,
}

/// B₀λ_u values of the sweep (a single entry when not swept).
pub fn beam_products(spec: &SweepSpec) -> Vec<Option<f64>> {
    match spec.axes.iter().find(|a| a.name == AxisName::B0LambdaU) {
        Some(a) => a.values().into_iter().map(Some).collect(),
        None => vec![spec.fixed.b0_lambda_u],
    }
}

/// Derived beam for an optional B₀λ_u override (field varied at fixed λ_u).
pub fn beam_for_product(config: &Config, product: Option<f64>) -> Result<DerivedBeamQuantities> {
    match product {
        Some(p) => derive_beam_quantities(&config.beam.with_field_period_product(p, false)),
        None => config.beam_quantities(),
    }
}

/// Row-major expansion: the first listed axis varies slowest.
pub fn expand(spec: &SweepSpec, config: &Config) -> Vec<GridCoords> {
    let products = beam_products(spec);
    let default_product = config.beam.undulator_peak_field * config.beam.undulator_period_length;
    let values: Vec<Vec<f64>> = spec.axes.iter().map(|a| a.values()).collect();
    let total: usize = values.iter().map(|v| v.len()).product();
    let f: &FixedValues = &spec.fixed;
    let mut out = Vec::with_capacity(total);
    for index in 0..total {
        let mut rem = index;
        let mut picks = vec![0usize; values.len()];
        for (i, v) in values.iter().enumerate().rev() {
            picks[i] = rem % v.len();
            rem /= v.len();
        }
        let mut c = GridCoords {
            index,
            beam_index: 0,
            b0_lambda_u: products[0].unwrap_or(default_product),
            z1: f.z1,
            z2: f.z2,
            a1: f.a1,
            a2: f.a1 + f.a2_minus_a1,
            k1_energy: f.k1_energy,
        };
        let mut diff = f.a2_minus_a1;
        for (i, a) in spec.axes.iter().enumerate() {
            let v = values[i][picks[i]];
            match a.name {
                AxisName::Z1 => c.z1 = v,
                AxisName::Z2 => c.z2 = v,
                AxisName::AzimuthDifference => diff = v,
                AxisName::K1Energy => c.k1_energy = Some(v),
                AxisName::B0LambdaU => {
                    c.beam_index = picks[i];
                    c.b0_lambda_u = v;
                }
            }
        }
        c.a2 = c.a1 + diff;
        out.push(c);
    }
    out
}

/// Evaluates one point. `profile` is needed for the microbunch outputs.
pub fn evaluate_point<S: AmplitudeSource + ?Sized>(
    source: &S,
    spec: &SweepSpec,
    channels: &[i32],
    profile: &MicrobunchProfile,
    c: &GridCoords,
) -> Result<PointRecord> {
    let dbq = source.beam();
    let zs1 = spec.zenith(c.z1, dbq);
    let zs2 = spec.zenith(c.z2, dbq);
    let (z1_lab, z2_lab, z1_ef, z2_ef) = match spec.frame {
        Frame::Lab => (zs1, zs2, zenith_angle_ef(zs1, dbq), zenith_angle_ef(zs2, dbq)),
        Frame::Electron => (zenith_angle_lab(zs1, dbq), zenith_angle_lab(zs2, dbq), zs1, zs2),
    };
    for z in [zs1, zs2] {
        if !(0.0..=std::f64::consts::PI).contains(&z) {
            return Err(Error::Domain(format!("zenith {z} outside [0, π]")));
        }
    }
    let (k1_ef, omega1_lab) = match spec.frame {
        Frame::Lab => {
            let w = c
                .k1_energy
                .unwrap_or(spec.fixed.k1_fraction * dbq.fundamental_angular_frequency);
            (photon_energy_to_ef(w, z1_lab, dbq), w)
        }
        Frame::Electron => {
            let k = c.k1_energy.unwrap_or(spec.fixed.k1_fraction * dbq.wave_energy());
            (k, photon_energy_to_lab(k, z1_ef, dbq))
        }
    };
    let a1 = Angles::new(z1_ef, c.a1);
    let a2 = Angles::new(z2_ef, c.a2);

    let mut points: Vec<ChannelPoint> = Vec::with_capacity(channels.len());
    let mut rates = Vec::with_capacity(channels.len());
    for &n in channels {
        match source.channel(n, k1_ef, a1, a2)? {
            Some(p) => {
                rates.push(p.rate.rate);
                points.push(p);
            }
            None => rates.push(0.0),
        }
    }
    let rate = rates.iter().copied().collect::<CompensatedSum>().value();
    let open = !points.is_empty();
    let k2_ef = points.first().map_or(0.0, |p| p.rate.k2_energy);
    let omega2_lab = if open { photon_energy_to_lab(k2_ef, z2_ef, dbq) } else { 0.0 };
    let d1 = doppler_factor_lab(z1_lab, dbq);
    let d2 = doppler_factor_lab(z2_lab, dbq);
    let u_pair = source.interaction_time() * d1 * d2 * d2 * rate;

    let entanglement = if spec.has(OutputKind::Concurrence) || spec.has(OutputKind::DensityMatrix) {
        point_entanglement(&points)?
    } else {
        None
    };
    let wants_mb = spec.has(OutputKind::FMb) || spec.has(OutputKind::CollectiveRate);
    let (delta_phi, f_mb, collective) = if wants_mb {
        let dphi = phase_difference(z1_ef, z2_ef, k1_ef, dbq);
        let f = f_mb_at_phase(profile, dphi);
        (Some(dphi), Some(f), spec.has(OutputKind::CollectiveRate).then_some(rate * f))
    } else {
        (None, None, None)
    };

    Ok(PointRecord {
        coords: *c,
        z1_lab,
        z2_lab,
        z1_ef,
        z2_ef,
        gamma_tan_z1: gamma_tan(z1_lab, dbq),
        gamma_tan_z2: gamma_tan(z2_lab, dbq),
        k1_energy_ef: k1_ef,
        k2_energy_ef: k2_ef,
        omega1_lab,
        omega2_lab,
        open,
        rate,
        u_pair,
        rate_normalized: None,
        entanglement,
        delta_phi,
        f_mb: spec.has(OutputKind::FMb).then_some(f_mb).flatten(),
        collective_rate: collective,
    })
}

/// ρ of the open channels, each weighted by its rate. With one channel this
/// is exactly [`density_matrix`] of its block.
fn point_entanglement(points: &[ChannelPoint]) -> Result<Option<PointEntanglement>> {
    let total: f64 = points.iter().map(|p| p.rate.rate).sum();
    if !(total > 0.0) {
        return Ok(None);
    }
    let rho = if let [p] = points {
        density_matrix(&p.block)
    } else {
        let mut sum = CMat4::zeros();
        for p in points {
            let raw = unnormalized_density(&p.block);
            let tr = raw.trace().re;
            if tr > 0.0 {
                sum += raw * C64::new(p.rate.rate / tr, 0.0);
            }
        }
        TwoPhotonDensityMatrix::from_unnormalized(sum, Basis::Helicity)
    };
    match rho {
        Ok(r) => Ok(Some(PointEntanglement { report: r.report(), rho: r.matrix })),
        Err(Error::UndefinedState(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Evaluates the whole grid. Cells are distributed over the current rayon
/// pool and merged by grid index. `make` builds a source for a given beam.
pub fn run_grid<S, F>(spec: &SweepSpec, config: &Config, make: F) -> Result<Vec<PointRecord>>
where
    S: AmplitudeSource,
    F: Fn(&DerivedBeamQuantities) -> Result<S>,
{
    spec.validate()?;
    let sources = beam_products(spec)
        .into_iter()
        .map(|p| beam_for_product(config, p).and_then(|d| make(&d)))
        .collect::<Result<Vec<_>>>()?;
    let coords = expand(spec, config);
    let mut records = coords
        .par_iter()
        .map(|c| evaluate_point(&sources[c.beam_index], spec, &config.channels, &config.microbunch, c))
        .collect::<Result<Vec<_>>>()?;
    if spec.normalize {
        let max = records.iter().map(|r| r.rate).fold(0.0, f64::max);
        for r in &mut records {
            r.rate_normalized = Some(if max > 0.0 { r.rate / max } else { 0.0 });
        }
    }
    Ok(records)
}

/// [`run_grid`] with the physical amplitude engine.
pub fn run_physical_grid(spec: &SweepSpec, config: &Config) -> Result<Vec<PointRecord>> {
    run_grid(spec, config, |d| EmissionModel::new(d, config.floquet))
}
