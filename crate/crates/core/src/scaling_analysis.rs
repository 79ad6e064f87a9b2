//! Dependence of the pair probability on the undulator product B₀λ_u.
//!
//! U_pair is evaluated with the full amplitude at a lab-frame probe whose
//! photon-1 energy tracks ω_fd. The reduced quantity
//!
//! ```text
//! Q = (U_pair/T) · λ_u² (1 + K²)² (1 + K²/2) [1 + K²(1 + cos Z₂′)/2]
//! ```
//!
//! strips the explicit K and λ_u factors of the lab rate density U_pair/T,
//! so that Q depends on B₀ and λ_u only through K. Its local power law in
//! B₀λ_u is fitted in log-log space.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::emission_rate::EmissionModel;
use crate::error::{Error, Result};
use crate::kinematics::{
    derive_beam_quantities, zenith_angle_ef, zenith_from_gamma_tan, FelParameters,
};
use crate::volkov::{Angles, FloquetSettings};

/// Lab-frame probe: both photons at γ·tan Z, photon 1 at a fixed fraction
/// of the fundamental.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalingProbe {
    pub gamma_tan: f64,
    /// ω₁/ω_fd.
    pub energy_fraction: f64,
    /// Lab azimuth of both photons.
    #[serde(default)]
    pub azimuth: f64,
}

impl ScalingProbe {
    pub fn new(gamma_tan: f64, energy_fraction: f64) -> Self {
        ScalingProbe { gamma_tan, energy_fraction, azimuth: 0.0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScalingPoint {
    /// B₀λ_u, T·m.
    pub b0_lambda: f64,
    pub undulator_parameter: f64,
    pub omega1: f64,
    pub omega2: f64,
    pub u_pair: f64,
    pub q: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalingSeries {
    pub probe: ScalingProbe,
    /// True when λ_u was varied at fixed B₀.
    pub vary_period: bool,
    pub points: Vec<ScalingPoint>,
    pub fit: Option<PowerLawFit>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PowerLawFit {
    pub exponent: f64,
    /// ln of the prefactor.
    pub intercept: f64,
    /// RMS of the log-space misfit.
    pub residual: f64,
}

impl ScalingSeries {
    pub fn validate(&self) -> Result<()> {
        if self.points.len() < 5 {
            return Err(Error::Domain(format!("{} points; at least 5 needed", self.points.len())));
        }
        let (lo, hi) = self.points.iter().fold((f64::INFINITY, 0.0f64), |(l, h), p| {
            (l.min(p.b0_lambda), h.max(p.b0_lambda))
        });
        if hi < 2.0 * lo * (1.0 - 1e-12) {
            return Err(Error::Domain(format!("B0·λu spans only {lo}..{hi}")));
        }
        if self.points.iter().any(|p| !(p.u_pair > 0.0)) {
            return Err(Error::Domain("non-positive U_pair in series".into()));
        }
        Ok(())
    }

    /// Fit Q against B₀λ_u.
    pub fn fit_q(&self) -> Result<PowerLawFit> {
        let x: Vec<f64> = self.points.iter().map(|p| p.b0_lambda).collect();
        let y: Vec<f64> = self.points.iter().map(|p| p.q).collect();
        fit_power_law(&x, &y)
    }
}

/// `count` values spaced evenly in log between `lo` and `hi` inclusive.
pub fn log_spaced(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
        .collect()
}

/// One U_pair evaluation at B₀λ_u = `product`.
pub fn u_pair_point(
    base: &FelParameters,
    probe: &ScalingProbe,
    product: f64,
    vary_period: bool,
    settings: &FloquetSettings,
) -> Result<ScalingPoint> {
    let params = base.with_field_period_product(product, vary_period);
    let dbq = derive_beam_quantities(&params)?;
    let model = EmissionModel::new(&dbq, *settings)?;
    let z = zenith_from_gamma_tan(probe.gamma_tan, &dbq);
    let a = Angles::new(z, probe.azimuth);
    let omega1 = probe.energy_fraction * dbq.fundamental_angular_frequency;
    let (u, omega2) = model.u_pair(1, omega1, a, a)?;
    let omega2 = omega2.ok_or_else(|| {
        Error::ChannelClosed(format!("no photon 2 at B0·λu = {product} for probe {probe:?}"))
    })?;
    let k2 = dbq.undulator_parameter.powi(2);
    let cos_z2 = zenith_angle_ef(z, &dbq).cos();
    let lambda_u = dbq.undulator_period_length;
    let q = u / dbq.interaction_time() * lambda_u * lambda_u
        * (1.0 + k2).powi(2)
        * (1.0 + 0.5 * k2)
        * (1.0 + 0.5 * k2 * (1.0 + cos_z2));
    Ok(ScalingPoint {
        b0_lambda: product,
        undulator_parameter: dbq.undulator_parameter,
        omega1,
        omega2,
        u_pair: u,
        q,
    })
}

/// U_pair and Q over `products`, holding γ, the lab γ·tan Z and ω₁/ω_fd fixed.
/// Points are evaluated in parallel and returned in input order.
pub fn scan_u_pair(
    base: &FelParameters,
    probe: &ScalingProbe,
    products: &[f64],
    vary_period: bool,
    settings: &FloquetSettings,
) -> Result<ScalingSeries> {
    if products.iter().any(|&p| !(p > 0.0)) {
        return Err(Error::Domain("B0·λu values must be positive".into()));
    }
    let points = products
        .par_iter()
        .map(|&p| u_pair_point(base, probe, p, vary_period, settings))
        .collect::<Result<Vec<_>>>()?;
    let mut series = ScalingSeries { probe: *probe, vary_period, points, fit: None };
    series.validate()?;
    series.fit = Some(series.fit_q()?);
    Ok(series)
}

/// Least-squares slope of ln y against ln x.
pub fn fit_power_law(x: &[f64], y: &[f64]) -> Result<PowerLawFit> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::Domain("power-law fit needs two or more paired values".into()));
    }
    if x.iter().chain(y).any(|&v| !(v > 0.0)) {
        return Err(Error::Domain("power-law fit needs positive values".into()));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Domain("power-law fit needs distinct x values".into()));
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let exponent = sxy / sxx;
    let intercept = my - exponent * mx;
    let residual = (lx
        .iter()
        .zip(&ly)
        .map(|(a, b)| (b - intercept - exponent * a).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(PowerLawFit { exponent, intercept, residual })
}
