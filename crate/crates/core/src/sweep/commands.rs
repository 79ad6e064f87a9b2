//! One function per CLI verb. Each writes its CSV/JSON outputs into the
//! output directory and returns the JSON summary it wrote.

use std::path::Path;

use serde::Serialize;

use super::config::{Config, OutputKind, PhaseChoice, SweepSpec};
use super::grid::{run_grid, AmplitudeSource, PointRecord};
use super::manifest::{fmt_f64, unix_now, OutputDir, RunManifest, Timing};
use crate::emission_rate::{DetectorRate, DetectorWindow, EmissionModel};
use crate::entanglement::{
    to_linear_basis, Basis, CMat4, DensityMatrixJson, EntanglementReport, TwoPhotonDensityMatrix,
};
use crate::error::{Error, Result};
use crate::kinematics::{gamma_tan, zenith_angle_ef, DerivedBeamQuantities};
use crate::microbunch::{phase_difference, pulse_rates, MicrobunchProfile, PulseRates};
use crate::scaling_analysis::{log_spaced, scan_u_pair, ScalingProbe, ScalingSeries};
use crate::volkov::{Angles, C64};

/// A CLI verb with its command-specific arguments.
#[derive(Clone, Debug, PartialEq)]
pub enum Command {
    RateMap,
    ConcurrenceMap,
    MicrobunchMap,
    DensityMatrix {
        /// Overrides the configured aperture centre, γ·tan Z.
        gamma_tan: Option<f64>,
        /// Overrides the configured aperture radius, γ·tan Z units.
        radius: Option<f64>,
    },
    PairRates,
    Scaling {
        /// Overrides the configured probes (γ·tan Z values).
        probes: Option<Vec<f64>>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::RateMap => "rate-map",
            Command::ConcurrenceMap => "concurrence-map",
            Command::MicrobunchMap => "microbunch-map",
            Command::DensityMatrix { .. } => "density-matrix",
            Command::PairRates => "pair-rates",
            Command::Scaling { .. } => "scaling",
        }
    }
}

/// Runs `command` on a pool of `workers` threads and writes a timing file
/// beside the outputs.
pub fn execute(command: &Command, config: &Config, out: &Path, workers: usize) -> Result<serde_json::Value> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Config(format!("cannot start {workers} workers: {e}")))?;
    let dir = OutputDir::create(out)?;
    let started = unix_now();
    let summary = pool.install(|| dispatch(command, config, &dir))?;
    let manifest = RunManifest::new(command.name(), config);
    dir.write_json(
        &manifest.timing_file,
        &Timing {
            config_hash: manifest.config_hash.clone(),
            workers: workers.max(1),
            started_unix_s: started,
            finished_unix_s: unix_now(),
        },
    )?;
    Ok(summary)
}

fn dispatch(command: &Command, config: &Config, dir: &OutputDir) -> Result<serde_json::Value> {
    let physical = |d: &DerivedBeamQuantities| EmissionModel::new(d, config.floquet);
    let v = match command {
        Command::RateMap => to_value(map_command(command, config, dir, &[OutputKind::Rate], physical)?),
        Command::ConcurrenceMap => {
            to_value(map_command(command, config, dir, &[OutputKind::Concurrence], physical)?)
        }
        Command::MicrobunchMap => to_value(map_command(
            command,
            config,
            dir,
            &[OutputKind::FMb, OutputKind::CollectiveRate],
            physical,
        )?),
        Command::DensityMatrix { gamma_tan, radius } => {
            to_value(density_matrix_command(config, dir, *gamma_tan, *radius)?)
        }
        Command::PairRates => to_value(pair_rates_command(config, dir)?),
        Command::Scaling { probes } => {
            let probes = match probes {
                Some(g) => g
                    .iter()
                    .map(|&g| ScalingProbe::new(g, config.scaling.probes.first().map_or(1.0 / 3.0, |p| p.energy_fraction)))
                    .collect(),
                None => config.scaling.probes.clone(),
            };
            to_value(scaling_command(config, dir, &probes, |p, x| {
                scan_u_pair(&config.beam, p, x, config.scaling.vary_period, &config.floquet)
            })?)
        }
    };
    Ok(v)
}

fn to_value<T: Serialize>(s: T) -> serde_json::Value {
    serde_json::to_value(s).expect("summary serialises")
}

/// Grid location and value of the largest entry of a column.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Extremum {
    pub index: usize,
    pub value: f64,
    pub z1: f64,
    pub z2: f64,
    pub a2_minus_a1: f64,
    pub gamma_tan_z1: f64,
    pub gamma_tan_z2: f64,
}

/// Photon-1 direction annotation with its lab γ·tan Z.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Marker {
    pub zenith: f64,
    pub azimuth: f64,
    pub gamma_tan: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MapSummary {
    pub manifest: RunManifest,
    pub sweep: SweepSpec,
    pub csv: String,
    pub points: usize,
    pub open_points: usize,
    /// Points where the rate vanishes and C is undefined.
    pub undefined_concurrence: usize,
    pub max_rate: Option<Extremum>,
    pub max_concurrence: Option<Extremum>,
    pub markers: Vec<Marker>,
}

/// rate-map, concurrence-map and microbunch-map: `required` outputs are
/// added to the configured ones.
pub fn map_command<S, F>(
    command: &Command,
    config: &Config,
    dir: &OutputDir,
    required: &[OutputKind],
    make: F,
) -> Result<MapSummary>
where
    S: AmplitudeSource,
    F: Fn(&DerivedBeamQuantities) -> Result<S>,
{
    let mut spec = config
        .sweep
        .clone()
        .ok_or_else(|| Error::Config(format!("{} needs a \"sweep\" section", command.name())))?;
    for &k in required {
        if !spec.outputs.contains(&k) {
            spec.outputs.push(k);
        }
    }
    let records = run_grid(&spec, config, make)?;
    let manifest = RunManifest::new(command.name(), config);
    let csv_name = format!("{}.csv", command.name());
    dir.write_text(&csv_name, &map_csv(&manifest, &spec, &records)?)?;

    let beam = config.beam_quantities()?;
    let extremum = |idx: usize, value: f64| {
        let r = &records[idx];
        Extremum {
            index: idx,
            value,
            z1: r.coords.z1,
            z2: r.coords.z2,
            a2_minus_a1: r.coords.a2 - r.coords.a1,
            gamma_tan_z1: r.gamma_tan_z1,
            gamma_tan_z2: r.gamma_tan_z2,
        }
    };
    let argmax = |f: &dyn Fn(&PointRecord) -> Option<f64>| {
        records
            .iter()
            .enumerate()
            .filter_map(|(i, r)| f(r).map(|v| (i, v)))
            .fold(None, |best: Option<(usize, f64)>, (i, v)| match best {
                Some((_, b)) if b >= v => best,
                _ => Some((i, v)),
            })
            .map(|(i, v)| extremum(i, v))
    };
    let with_c = spec.has(OutputKind::Concurrence) || spec.has(OutputKind::DensityMatrix);
    let summary = MapSummary {
        sweep: spec.clone(),
        csv: csv_name.clone(),
        points: records.len(),
        open_points: records.iter().filter(|r| r.open).count(),
        undefined_concurrence: if with_c {
            records.iter().filter(|r| r.entanglement.is_none()).count()
        } else {
            0
        },
        max_rate: argmax(&|r| (r.rate > 0.0).then_some(r.rate)),
        max_concurrence: argmax(&|r| r.entanglement.as_ref().map(|e| e.report.concurrence)),
        markers: spec
            .markers
            .iter()
            .map(|&[z, a]| {
                let zl = match spec.frame {
                    crate::kinematics::Frame::Lab => spec.zenith(z, &beam),
                    crate::kinematics::Frame::Electron => {
                        crate::kinematics::zenith_angle_lab(z, &beam)
                    }
                };
                Marker { zenith: z, azimuth: a, gamma_tan: gamma_tan(zl, &beam) }
            })
            .collect(),
        manifest,
    };
    dir.write_json(&format!("{}.json", command.name()), &summary)?;
    Ok(summary)
}

/// Column names for a map with the given outputs, in output order.
pub fn map_columns(spec: &SweepSpec) -> Vec<String> {
    let mut cols: Vec<String> = [
        "index", "b0_lambda_u", "z1", "a1", "z2", "a2", "z1_lab", "z2_lab", "z1_ef", "z2_ef",
        "gamma_tan_z1", "gamma_tan_z2", "k1_energy_ef", "k2_energy_ef", "omega1_lab",
        "omega2_lab", "open", "rate", "u_pair",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    if spec.normalize {
        cols.push("rate_normalized".into());
    }
    if spec.has(OutputKind::Concurrence) || spec.has(OutputKind::DensityMatrix) {
        for c in ["entanglement_defined", "concurrence", "negativity", "entanglement_of_formation"] {
            cols.push(c.into());
        }
    }
    if spec.has(OutputKind::DensityMatrix) {
        for part in ["re", "im"] {
            for i in 0..4 {
                for j in 0..4 {
                    cols.push(format!("rho_{part}_{i}{j}"));
                }
            }
        }
    }
    if spec.has(OutputKind::FMb) || spec.has(OutputKind::CollectiveRate) {
        cols.push("delta_phi".into());
    }
    if spec.has(OutputKind::FMb) {
        cols.push("f_mb".into());
    }
    if spec.has(OutputKind::CollectiveRate) {
        cols.push("collective_rate".into());
    }
    cols
}

/// One CSV row matching [`map_columns`].
pub fn map_row(spec: &SweepSpec, r: &PointRecord) -> Vec<String> {
    let c = &r.coords;
    let mut row = vec![c.index.to_string()];
    for v in [
        c.b0_lambda_u, c.z1, c.a1, c.z2, c.a2, r.z1_lab, r.z2_lab, r.z1_ef, r.z2_ef,
        r.gamma_tan_z1, r.gamma_tan_z2, r.k1_energy_ef, r.k2_energy_ef, r.omega1_lab,
        r.omega2_lab,
    ] {
        row.push(fmt_f64(v));
    }
    row.push(r.open.to_string());
    row.push(fmt_f64(r.rate));
    row.push(fmt_f64(r.u_pair));
    if spec.normalize {
        row.push(r.rate_normalized.map(fmt_f64).unwrap_or_default());
    }
    let with_c = spec.has(OutputKind::Concurrence) || spec.has(OutputKind::DensityMatrix);
    if with_c {
        match &r.entanglement {
            Some(e) => {
                row.push("true".into());
                row.push(fmt_f64(e.report.concurrence));
                row.push(fmt_f64(e.report.negativity));
                row.push(fmt_f64(e.report.entanglement_of_formation));
            }
            None => {
                row.push("false".into());
                row.extend(std::iter::repeat_n(String::new(), 3));
            }
        }
    }
    if spec.has(OutputKind::DensityMatrix) {
        match &r.entanglement {
            Some(e) => {
                for part in [|z: C64| z.re, |z: C64| z.im] {
                    for i in 0..4 {
                        for j in 0..4 {
                            row.push(fmt_f64(part(e.rho[(i, j)])));
                        }
                    }
                }
            }
            None => row.extend(std::iter::repeat_n(String::new(), 32)),
        }
    }
    if spec.has(OutputKind::FMb) || spec.has(OutputKind::CollectiveRate) {
        row.push(r.delta_phi.map(fmt_f64).unwrap_or_default());
    }
    if spec.has(OutputKind::FMb) {
        row.push(r.f_mb.map(fmt_f64).unwrap_or_default());
    }
    if spec.has(OutputKind::CollectiveRate) {
        row.push(r.collective_rate.map(fmt_f64).unwrap_or_default());
    }
    row
}

fn map_csv(manifest: &RunManifest, spec: &SweepSpec, records: &[PointRecord]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(map_columns(spec))?;
    for r in records {
        w.write_record(map_row(spec, r))?;
    }
    let body = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(manifest.csv_header_comment() + &String::from_utf8_lossy(&body))
}

/// ρ in one basis with its measures.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BasisView {
    pub rho: DensityMatrixJson,
    pub report: EntanglementReport,
    pub max_imaginary: f64,
}

impl BasisView {
    fn of(rho: &TwoPhotonDensityMatrix) -> Self {
        BasisView {
            rho: DensityMatrixJson::from(rho),
            report: rho.report(),
            max_imaginary: rho.max_imaginary(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityMatrixSummary {
    pub manifest: RunManifest,
    pub gamma_tan: f64,
    pub azimuth: f64,
    pub radius_gamma_tan: f64,
    pub omega1_lab: f64,
    /// Σ weights × U_pair over the aperture (pair probability per lab dω₁).
    pub aperture_weight: f64,
    pub helicity: BasisView,
    pub linear: BasisView,
    /// ρ at the aperture centre (both photons along the centre direction).
    pub centre: BasisView,
}

/// Aperture-averaged ρ with both photons in the same aperture.
pub fn aperture_average(
    model: &EmissionModel,
    channels: &[i32],
    omega1_lab: f64,
    aperture: &crate::emission_rate::Aperture,
    order: usize,
) -> Result<(TwoPhotonDensityMatrix, f64)> {
    let mut sum = CMat4::zeros();
    let mut weight = 0.0;
    for &n in channels {
        match model.aperture_density_matrix(n, omega1_lab, aperture, order) {
            Ok((rho, w)) => {
                sum += rho.matrix * C64::new(w, 0.0);
                weight += w;
            }
            Err(Error::UndefinedState(_)) => {}
            Err(e) => return Err(e),
        }
    }
    if !(weight > 0.0) {
        return Err(Error::UndefinedState(format!(
            "no pairs reach the aperture at ω₁ = {omega1_lab} eV"
        )));
    }
    Ok((TwoPhotonDensityMatrix::from_unnormalized(sum, Basis::Helicity)?, weight))
}

/// ρ at a single lab direction shared by both photons.
pub fn centre_density(
    model: &EmissionModel,
    channels: &[i32],
    omega1_lab: f64,
    centre: Angles,
) -> Result<TwoPhotonDensityMatrix> {
    let beam = &model.beam;
    let z = zenith_angle_ef(centre.zenith, beam);
    let a = Angles::new(z, centre.azimuth);
    let k1 = model.k1_from_lab(omega1_lab, centre.zenith);
    let mut sum = CMat4::zeros();
    for &n in channels {
        if let Some(p) = model.channel(n, k1, a, a)? {
            let raw = crate::entanglement::unnormalized_density(&p.block);
            let tr = raw.trace().re;
            if tr > 0.0 {
                sum += raw * C64::new(p.rate.rate / tr, 0.0);
            }
        }
    }
    TwoPhotonDensityMatrix::from_unnormalized(sum, Basis::Helicity)
}

pub fn density_matrix_command(
    config: &Config,
    dir: &OutputDir,
    gamma_tan_override: Option<f64>,
    radius_override: Option<f64>,
) -> Result<DensityMatrixSummary> {
    let mut ap = config.aperture;
    if let Some(g) = gamma_tan_override {
        ap.gamma_tan = g;
    }
    if let Some(r) = radius_override {
        ap.radius_gamma_tan = r;
    }
    ap.validate()?;
    let beam = config.beam_quantities()?;
    let model = EmissionModel::new(&beam, config.floquet)?;
    let aperture = ap.aperture(&beam);
    let omega1 = ap.energy_fraction * beam.fundamental_angular_frequency;
    let (rho, weight) = aperture_average(&model, &config.channels, omega1, &aperture, ap.order)?;
    let centre = centre_density(
        &model,
        &config.channels,
        omega1,
        Angles::new(aperture.zenith, aperture.azimuth),
    )?;
    let summary = DensityMatrixSummary {
        manifest: RunManifest::new("density-matrix", config),
        gamma_tan: ap.gamma_tan,
        azimuth: ap.azimuth,
        radius_gamma_tan: ap.radius_gamma_tan,
        omega1_lab: omega1,
        aperture_weight: weight,
        helicity: BasisView::of(&rho),
        linear: BasisView::of(&to_linear_basis(&rho)?),
        centre: BasisView::of(&centre),
    };
    dir.write_json("density-matrix.json", &summary)?;
    Ok(summary)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairRatesSummary {
    pub manifest: RunManifest,
    pub window: DetectorWindow,
    pub detector: DetectorRate,
    pub profile: MicrobunchProfile,
    pub phase_choice: PhaseChoice,
    /// Δφ at the aperture centre and the photon-1 window centre.
    pub delta_phi_aperture_centre: f64,
    pub delta_phi_used: f64,
    pub rates: PulseRates,
}

pub fn pair_rates_command(config: &Config, dir: &OutputDir) -> Result<PairRatesSummary> {
    let beam = config.beam_quantities()?;
    let model = EmissionModel::new(&beam, config.floquet)?;
    let window = config.detector.window(&config.aperture, &config.channels, &beam);
    window.validate()?;
    let detector = model.pair_rate_through_detector(&window, &config.quadrature)?;
    let z = zenith_angle_ef(window.aperture.zenith, &beam);
    let omega1 = 0.5 * (window.photon1[0] + window.photon1[1]);
    let k1 = model.k1_from_lab(omega1, window.aperture.zenith);
    let centre_phase = phase_difference(z, z, k1, &beam);
    let used = match config.detector.microbunch_phase {
        PhaseChoice::FullCoherence => 2.0 * std::f64::consts::PI,
        PhaseChoice::ApertureCentre => centre_phase,
    };
    let summary = PairRatesSummary {
        manifest: RunManifest::new("pair-rates", config),
        rates: pulse_rates(detector.probability, &config.microbunch, used),
        window,
        detector,
        profile: config.microbunch.clone(),
        phase_choice: config.detector.microbunch_phase,
        delta_phi_aperture_centre: centre_phase,
        delta_phi_used: used,
    };
    dir.write_json("pair-rates.json", &summary)?;
    Ok(summary)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalingSummary {
    pub manifest: RunManifest,
    pub csv: String,
    pub range_b0_lambda_u: [f64; 2],
    pub series: Vec<ScalingSeries>,
}

/// Scans each probe over the configured B₀λ_u range with `scan` and fits Q.
pub fn scaling_command<F>(
    config: &Config,
    dir: &OutputDir,
    probes: &[ScalingProbe],
    scan: F,
) -> Result<ScalingSummary>
where
    F: Fn(&ScalingProbe, &[f64]) -> Result<ScalingSeries>,
{
    if probes.is_empty() {
        return Err(Error::Config("scaling needs at least one probe".into()));
    }
    let nominal = config.beam.undulator_peak_field * config.beam.undulator_period_length;
    let s = &config.scaling;
    let lo = s.range[0] * nominal;
    let hi = s.range[1] * nominal;
    let x = log_spaced(lo, hi, s.points);
    let series = probes.iter().map(|p| scan(p, &x)).collect::<Result<Vec<_>>>()?;
    let manifest = RunManifest::new("scaling", config);
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "probe_gamma_tan", "energy_fraction", "b0_lambda_u", "undulator_parameter", "omega1_lab",
        "omega2_lab", "u_pair", "q",
    ])?;
    for se in &series {
        for p in &se.points {
            let mut row = vec![fmt_f64(se.probe.gamma_tan), fmt_f64(se.probe.energy_fraction)];
            for v in [p.b0_lambda, p.undulator_parameter, p.omega1, p.omega2, p.u_pair, p.q] {
                row.push(fmt_f64(v));
            }
            w.write_record(row)?;
        }
    }
    let body = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    dir.write_text(
        "scaling.csv",
        &(manifest.csv_header_comment() + &String::from_utf8_lossy(&body)),
    )?;
    let summary = ScalingSummary {
        manifest,
        csv: "scaling.csv".into(),
        range_b0_lambda_u: [lo, hi],
        series,
    };
    dir.write_json("scaling.json", &summary)?;
    Ok(summary)
}
