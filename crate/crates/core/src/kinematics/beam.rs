//! FEL parameters and the beam quantities derived from them.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::FourVector;
use crate::error::{Error, Result};
use crate::units::{self, ELECTRON_MASS_EV};

/// Machine parameters as ingested from a config file. SI units except
/// `electron_energy`, which is in eV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FelParameters {
    pub electron_energy: f64,
    pub charge_per_pulse: f64,
    pub peak_current: f64,
    pub repetition_rate: f64,
    pub undulator_peak_field: f64,
    pub undulator_period_length: f64,
    pub undulator_period_number: u32,
    pub pierce_parameter: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fundamental_wavelength: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub saturation_peak_power: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub emission_pulse_fwhm: Option<f64>,
}

impl FelParameters {
    /// LCLS soft X-ray settings used throughout the examples and the book.
    pub fn lcls() -> Self {
        FelParameters {
            electron_energy: 5.0e9,
            charge_per_pulse: 180e-12,
            peak_current: 3.4e3,
            repetition_rate: 120.0,
            undulator_peak_field: 1.32,
            undulator_period_length: 30e-3,
            undulator_period_number: 1392,
            pierce_parameter: 2e-3,
            fundamental_wavelength: Some(2.30e-9),
            saturation_peak_power: Some(10e9),
            emission_pulse_fwhm: Some(230e-15),
        }
    }

    /// Copy with the field rescaled so that `B0·λu` equals `product` (T·m).
    pub fn with_field_period_product(&self, product: f64, vary_period: bool) -> Self {
        let mut out = self.clone();
        if vary_period {
            out.undulator_period_length = product / self.undulator_peak_field;
        } else {
            out.undulator_peak_field = product / self.undulator_period_length;
        }
        out.fundamental_wavelength = None;
        out
    }

    pub fn validate(&self) -> Result<()> {
        let checks = [
            ("electron_energy", self.electron_energy),
            ("charge_per_pulse", self.charge_per_pulse),
            ("peak_current", self.peak_current),
            ("repetition_rate", self.repetition_rate),
            ("undulator_peak_field", self.undulator_peak_field),
            ("undulator_period_length", self.undulator_period_length),
            ("pierce_parameter", self.pierce_parameter),
        ];
        for (name, v) in checks {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!(
                    "{name} must be strictly positive, got {v}"
                )));
            }
        }
        if self.undulator_period_number == 0 {
            return Err(Error::Config("undulator_period_number must be >= 1".into()));
        }
        if self.electron_energy <= ELECTRON_MASS_EV {
            return Err(Error::Config(format!(
                "electron_energy {} eV does not exceed the rest energy",
                self.electron_energy
            )));
        }
        for (name, v) in [
            ("fundamental_wavelength", self.fundamental_wavelength),
            ("saturation_peak_power", self.saturation_peak_power),
            ("emission_pulse_fwhm", self.emission_pulse_fwhm),
        ] {
            if let Some(v) = v {
                if !(v.is_finite() && v > 0.0) {
                    return Err(Error::Config(format!(
                        "{name} must be strictly positive, got {v}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Everything the simulation needs from [`FelParameters`], in natural units.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DerivedBeamQuantities {
    pub gamma: f64,
    pub beta: f64,
    /// K = eB₀/(m k_u).
    pub undulator_parameter: f64,
    /// Undulator wavenumber k_u = 2π/λ_u, eV.
    pub undulator_wavenumber: f64,
    /// a = B₀/k_u, eV.
    pub potential_amplitude: f64,
    /// e·a = K·m, eV. The only combination that enters the Volkov dressing.
    pub field_strength: f64,
    /// Exact quasi-EM wave vector γk_u(β, 0, 0, −1) in the electron frame.
    pub quasi_wave_vector: FourVector,
    /// Lightlike idealisation γk_u(1, 0, 0, −1) used for the Volkov phase.
    pub volkov_wave_vector: FourVector,
    pub electron_mass: f64,
    /// m* = sqrt(m² + e²a²), eV.
    pub effective_mass: f64,
    /// ω_fd = 2γ²k_u/(1+K²), eV.
    pub fundamental_angular_frequency: f64,
    /// λ₁ = 2π/ω_fd, m.
    pub fundamental_wavelength: f64,
    pub electrons_per_pulse: u64,
    pub undulator_period_length: f64,
    pub undulator_period_number: u32,
}

/// Derives γ, β, K, a, k, m*, ω_fd and N_e from machine parameters.
pub fn derive_beam_quantities(params: &FelParameters) -> Result<DerivedBeamQuantities> {
    params.validate()?;
    let m = ELECTRON_MASS_EV;
    let gamma = params.electron_energy / m;
    let beta = ((gamma - 1.0) * (gamma + 1.0)).sqrt() / gamma;
    let lambda_u = params.undulator_period_length;
    let k_u_si = 2.0 * PI / lambda_u;
    let k_u = units::per_metre_to_ev(k_u_si);
    let undulator_parameter = units::ELEMENTARY_CHARGE_C * params.undulator_peak_field
        / (units::ELECTRON_MASS_KG * units::SPEED_OF_LIGHT * k_u_si);
    let field_strength = undulator_parameter * m;
    let potential_amplitude = field_strength / units::coupling();
    let k_mag = gamma * k_u;
    let quasi_wave_vector = FourVector::new(k_mag * beta, 0.0, 0.0, -k_mag);
    let volkov_wave_vector = FourVector::new(k_mag, 0.0, 0.0, -k_mag);
    let k2 = undulator_parameter * undulator_parameter;
    let effective_mass = m * (1.0 + k2).sqrt();
    let omega_fd = 2.0 * gamma * gamma * k_u / (1.0 + k2);
    let fundamental_wavelength = units::ev_to_wavelength(omega_fd);
    if let Some(lambda_1) = params.fundamental_wavelength {
        let dev = (lambda_1 - fundamental_wavelength).abs() / fundamental_wavelength;
        if dev > 0.01 {
            return Err(Error::Config(format!(
                "fundamental_wavelength {lambda_1:e} m disagrees with derived {fundamental_wavelength:e} m by {:.2}%",
                dev * 100.0
            )));
        }
    }
    let electrons_per_pulse = (params.charge_per_pulse / units::ELEMENTARY_CHARGE_C).round() as u64;
    Ok(DerivedBeamQuantities {
        gamma,
        beta,
        undulator_parameter,
        undulator_wavenumber: k_u,
        potential_amplitude,
        field_strength,
        quasi_wave_vector,
        volkov_wave_vector,
        electron_mass: m,
        effective_mass,
        fundamental_angular_frequency: omega_fd,
        fundamental_wavelength,
        electrons_per_pulse,
        undulator_period_length: lambda_u,
        undulator_period_number: params.undulator_period_number,
    })
}

impl DerivedBeamQuantities {
    /// Lightlike wave energy κ = γk_u in the electron frame, eV.
    pub fn wave_energy(&self) -> f64 {
        self.volkov_wave_vector[0]
    }

    /// Quasi-EM four-potential a(0, cos k·x, sin k·x, 0) in the electron frame.
    pub fn quasi_em_wave(&self, x: FourVector) -> FourVector {
        let (s, c) = self.quasi_wave_vector.dot(x).sin_cos();
        let a = self.potential_amplitude;
        FourVector::new(0.0, a * c, a * s, 0.0)
    }

    /// Representative electron at rest in the electron frame.
    pub fn initial_momentum(&self) -> FourVector {
        FourVector::new(self.electron_mass, 0.0, 0.0, 0.0)
    }

    /// Quasi-momentum of the initial electron.
    pub fn initial_quasi_momentum(&self) -> FourVector {
        quasi_momentum(self.initial_momentum(), self).expect("rest electron is never degenerate")
    }

    /// Electron-frame transit time of the undulator, T = N_u λ_u/(γβ), eV⁻¹.
    pub fn interaction_time(&self) -> f64 {
        let l = self.undulator_period_number as f64 * self.undulator_period_length;
        units::metres_to_inv_ev(l) / (self.gamma * self.beta)
    }

    /// Diagnostic: |k·k|/(k⁰)² of the exact quasi-wave vector.
    pub fn wave_offshellness(&self) -> f64 {
        let k = self.quasi_wave_vector;
        k.norm_sqr().abs() / (k[0] * k[0])
    }
}

/// Quasi-momentum q = p + e²a²/(2k·p)·k of a free momentum `p` in the wave.
pub fn quasi_momentum(p: FourVector, dbq: &DerivedBeamQuantities) -> Result<FourVector> {
    let k = dbq.volkov_wave_vector;
    let kp = k.dot(p);
    if kp == 0.0 || !kp.is_finite() {
        return Err(Error::DegenerateKinematics(format!(
            "k·p = {kp} for p = {:?}",
            p.0
        )));
    }
    let ea = dbq.field_strength;
    Ok(p + k * (ea * ea / (2.0 * kp)))
}

/// Inverse of [`quasi_momentum`]: the free momentum belonging to a quasi-momentum.
pub fn free_momentum(q: FourVector, dbq: &DerivedBeamQuantities) -> Result<FourVector> {
    let k = dbq.volkov_wave_vector;
    let kq = k.dot(q);
    if kq == 0.0 || !kq.is_finite() {
        return Err(Error::DegenerateKinematics(format!("k·q = {kq}")));
    }
    let ea = dbq.field_strength;
    Ok(q - k * (ea * ea / (2.0 * kq)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lcls() -> DerivedBeamQuantities {
        derive_beam_quantities(&FelParameters::lcls()).unwrap()
    }

    #[test]
    fn table_one_undulator_parameter() {
        let d = lcls();
        assert!(
            (d.undulator_parameter - 3.70).abs() < 0.01,
            "K = {}",
            d.undulator_parameter
        );
        // engineering formula K = 0.09337 B0[T] λu[mm]
        let eng = 0.093_37 * 1.32 * 30.0;
        assert!((d.undulator_parameter - eng).abs() / eng < 1e-3);
    }

    #[test]
    fn table_one_gamma_and_electron_count() {
        let d = lcls();
        assert!((d.gamma - 9784.7).abs() < 0.1, "gamma = {}", d.gamma);
        assert!((d.electrons_per_pulse as f64 - 1.12e9).abs() / 1.12e9 < 0.005);
    }

    #[test]
    fn table_one_fundamental() {
        let d = lcls();
        assert!((d.fundamental_wavelength - 2.30e-9).abs() / 2.30e-9 < 0.01);
        assert!((d.fundamental_angular_frequency - 539.0).abs() < 1.5);
    }

    #[test]
    fn inconsistent_fundamental_rejected() {
        let mut p = FelParameters::lcls();
        p.fundamental_wavelength = Some(2.5e-9);
        let err = derive_beam_quantities(&p).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("2.5e-9"), "{msg}");
        assert!(msg.contains("disagrees with derived"));
    }

    #[test]
    fn nonpositive_magnitude_rejected() {
        let mut p = FelParameters::lcls();
        p.peak_current = 0.0;
        assert!(matches!(derive_beam_quantities(&p), Err(Error::Config(_))));
    }

    #[test]
    fn vanishing_field_limit() {
        let mut p = FelParameters::lcls();
        p.undulator_peak_field = 1e-30;
        p.fundamental_wavelength = None;
        let d = derive_beam_quantities(&p).unwrap();
        assert!(d.undulator_parameter < 1e-28);
        assert!((d.effective_mass - d.electron_mass).abs() < 1e-9);
        let free = 2.0 * d.gamma * d.gamma * d.undulator_wavenumber;
        assert!((d.fundamental_angular_frequency - free).abs() / free < 1e-15);
    }

    #[test]
    fn effective_mass_identity() {
        let d = lcls();
        let m = d.electron_mass;
        let lhs = d.effective_mass * d.effective_mass;
        let rhs = m * m + d.field_strength * d.field_strength;
        assert!((lhs - rhs).abs() / rhs < 1e-15);
    }

    #[test]
    fn exact_wave_vector_is_spacelike_but_nearly_null() {
        let d = lcls();
        let k = d.quasi_wave_vector;
        let ku = d.undulator_wavenumber;
        let expected = d.gamma * d.gamma * ku * ku * (d.beta * d.beta - 1.0);
        assert!(k.norm_sqr() < 0.0);
        assert!((k.norm_sqr() - expected).abs() / expected.abs() < 1e-6);
        let off = 1.0 / (d.gamma * d.beta).powi(2);
        assert!((d.wave_offshellness() - off).abs() / off < 1e-6);
    }

    #[test]
    fn quasi_em_wave_values() {
        let d = lcls();
        let a = d.potential_amplitude;
        let w = d.quasi_em_wave(FourVector::ZERO);
        assert_eq!(w, FourVector::new(0.0, a, 0.0, 0.0));
        // k·x = π/2 with x purely temporal
        let t = std::f64::consts::FRAC_PI_2 / d.quasi_wave_vector[0];
        let w = d.quasi_em_wave(FourVector::new(t, 0.0, 0.0, 0.0));
        assert!(w[1].abs() < 1e-12 * a && (w[2] - a).abs() < 1e-12 * a);
        let x = FourVector::new(0.3, 1.2, -0.4, 7.0);
        let w = d.quasi_em_wave(x);
        assert!((w.norm_sqr() + a * a).abs() < 1e-12 * a * a);
        assert_eq!(d.quasi_wave_vector.dot(w), 0.0);
    }

    #[test]
    fn rest_electron_quasi_momentum() {
        let d = lcls();
        let q = d.initial_quasi_momentum();
        let ms = d.effective_mass;
        assert!((q.norm_sqr() - ms * ms).abs() / (ms * ms) < 1e-12);
        let k = d.volkov_wave_vector;
        let p = d.initial_momentum();
        let shift = d.field_strength.powi(2) / (2.0 * k.dot(p));
        assert!((q[0] - (d.electron_mass + shift * k[0])).abs() < 1e-9);
    }

    #[test]
    fn degenerate_quasi_momentum() {
        let d = lcls();
        let p = FourVector::new(1.0, 0.0, 0.0, -1.0);
        assert!(matches!(
            quasi_momentum(p, &d),
            Err(Error::DegenerateKinematics(_))
        ));
    }

    #[test]
    fn free_momentum_inverts_quasi_momentum() {
        let d = lcls();
        let p = FourVector::new(600e3, 1e5, -2e5, 3e5);
        let q = quasi_momentum(p, &d).unwrap();
        let back = free_momentum(q, &d).unwrap();
        for i in 0..4 {
            assert!((back[i] - p[i]).abs() < 1e-9 * p.max_abs());
        }
    }

    #[test]
    fn json_rejects_unknown_keys() {
        let mut v = serde_json::to_value(FelParameters::lcls()).unwrap();
        v["bogus"] = serde_json::json!(1.0);
        assert!(serde_json::from_value::<FelParameters>(v).is_err());
    }
}
