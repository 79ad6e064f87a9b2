//! Volkov states in the circularly polarised quasi-EM wave and their Floquet
//! (Jacobi–Anger) expansion.
//!
//! For a free momentum p the Volkov solution is
//!
//! ```text
//! Ψ_p(x) = D_p(φ) u_p exp{−i[p·x + ∫₀^φ (e p·A/(k·p) − e²A²/(2k·p)) dφ']},
//! D_p(φ) = 1 + e k̸A̸(φ)/(2k·p),       φ = k·x,
//! ```
//!
//! and with A = a(0, cos φ, sin φ, 0) the periodic part of the phase is
//! α sin(φ − φ₀) + c₀ with α = ea|p⊥|/(k·p). Expanding in harmonics,
//! Ψ_p(x) = Σ_ñ F_ñ e^{−i(q + ñk)·x} u_p, where
//!
//! ```text
//! F_ñ = e^{ic₀} [ J_{−ñ}(α) e^{iñφ₀}
//!                 − ea/(4k·p) k̸ ( (γ¹ − iγ²) J_{−ñ−1}(α) e^{i(ñ+1)φ₀}
//!                                + (γ¹ + iγ²) J_{−ñ+1}(α) e^{i(ñ−1)φ₀} ) ].
//! ```

use num_complex::Complex;

use super::dirac::{DiracAlgebra, Mat4, MatG, Spinor, C64};
use crate::error::{Error, Result};
use crate::kinematics::{DerivedBeamQuantities, FourVector};
use crate::precision::{lit, unit_pair, Real};
use crate::special::BesselTable;

/// The background plane wave as seen by the Volkov solutions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Background {
    /// Lightlike wave vector k.
    pub wave: FourVector,
    /// e·a in eV.
    pub field_strength: f64,
    pub electron_mass: f64,
}

impl Background {
    pub fn from_beam(dbq: &DerivedBeamQuantities) -> Self {
        Background {
            wave: dbq.volkov_wave_vector,
            field_strength: dbq.field_strength,
            electron_mass: dbq.electron_mass,
        }
    }

    pub fn effective_mass_sqr(&self) -> f64 {
        let m = self.electron_mass;
        m * m + self.field_strength * self.field_strength
    }

    pub fn quasi_momentum(&self, p: FourVector) -> Result<FourVector> {
        let kp = self.wave.dot(p);
        if kp == 0.0 || !kp.is_finite() {
            return Err(Error::DegenerateKinematics(format!("k·p = {kp}")));
        }
        let ea = self.field_strength;
        Ok(p + self.wave * (ea * ea / (2.0 * kp)))
    }

    pub fn free_momentum(&self, q: FourVector) -> Result<FourVector> {
        let kq = self.wave.dot(q);
        if kq == 0.0 || !kq.is_finite() {
            return Err(Error::DegenerateKinematics(format!("k·q = {kq}")));
        }
        let ea = self.field_strength;
        Ok(q - self.wave * (ea * ea / (2.0 * kq)))
    }
}

/// Floquet coefficients F_ñ for ñ ∈ [−n_max, n_max].
#[derive(Clone, Debug)]
pub struct FloquetSeries<T: Real = f64> {
    pub n_max: i32,
    coeffs: Vec<MatG<T>>,
}

impl<T: Real> FloquetSeries<T> {
    /// Wraps `2·n_max + 1` coefficients ordered from −n_max to n_max.
    pub fn from_coefficients(n_max: i32, coeffs: Vec<MatG<T>>) -> Self {
        assert_eq!(coeffs.len(), (2 * n_max + 1) as usize);
        FloquetSeries { n_max, coeffs }
    }

    pub fn get(&self, n: i32) -> Option<&MatG<T>> {
        if n.abs() > self.n_max {
            None
        } else {
            Some(&self.coeffs[(n + self.n_max) as usize])
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (i32, &MatG<T>)> {
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(i, m)| (i as i32 - self.n_max, m))
    }
}

pub(crate) fn mdot<T: Real>(a: &[T; 4], b: &[T; 4]) -> T {
    a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3]
}

/// Backend-generic data of one Volkov line: everything the Floquet
/// coefficients depend on.
#[derive(Clone, Debug)]
pub(crate) struct VolkovLine<T: Real> {
    pub k_dot_p: T,
    pub alpha: T,
    /// e^{iφ₀} = (p¹ + ip²)/|p⊥|.
    pub azimuth_phase: Complex<T>,
    pub c0: T,
    pub field_strength: T,
    // k̸(γ¹ ∓ iγ²)
    pub k_raise: MatG<T>,
    pub k_lower: MatG<T>,
}

impl<T: Real> VolkovLine<T> {
    pub fn new(p: &[T; 4], k: &[T; 4], ea: T, algebra: &DiracAlgebra<T>) -> Result<Self> {
        let kp = mdot(k, p);
        if kp == T::zero() || !kp.is_finite() {
            return Err(Error::DegenerateKinematics(format!(
                "k·p = {:e}: momentum lies on the wave's light cone",
                kp.to_f64()
            )));
        }
        let rho = (p[1] * p[1] + p[2] * p[2]).sqrt();
        let azimuth_phase = if rho > T::zero() {
            Complex::new(p[1].quo(rho), p[2].quo(rho))
        } else {
            Complex::new(T::one(), T::zero())
        };
        let ks = algebra.slash_components(k);
        let i = Complex::new(T::zero(), T::one());
        let g1 = algebra.gamma[1];
        let g2 = algebra.gamma[2];
        Ok(VolkovLine {
            k_dot_p: kp,
            alpha: (ea * rho).quo(kp),
            azimuth_phase,
            c0: (ea * p[2]).quo(kp),
            field_strength: ea,
            k_raise: ks * (g1 - g2 * i),
            k_lower: ks * (g1 + g2 * i),
        })
    }

    /// Closed-form Floquet coefficients F_ñ, |ñ| ≤ n_max.
    pub fn coefficients(&self, n_max: i32) -> Vec<MatG<T>> {
        let bessel = BesselTable::new(n_max + 1, self.alpha);
        let (s0, c0) = unit_pair(self.c0.sin_cos());
        let pref = Complex::new(c0, s0);
        let dress = Complex::new(
            -self.field_strength.quo(lit::<T>(4.0) * self.k_dot_p),
            T::zero(),
        );
        // e^{ijφ₀} for j ∈ [−n_max − 1, n_max + 1]
        let span = (n_max + 1) as usize;
        let mut powers = vec![Complex::new(T::one(), T::zero()); 2 * span + 1];
        for j in 1..=span {
            let up = powers[span + j - 1] * self.azimuth_phase;
            powers[span + j] = up;
            powers[span - j] = up.conj();
        }
        let phase = |j: i32| powers[(j + n_max + 1) as usize];
        let re = |x: T| Complex::new(x, T::zero());
        (-n_max..=n_max)
            .map(|n| {
                let c_id = phase(n) * re(bessel.get(-n));
                let c_up = phase(n + 1) * re(bessel.get(-n - 1));
                let c_dn = phase(n - 1) * re(bessel.get(-n + 1));
                let mut m = self.k_raise * (dress * c_up) + self.k_lower * (dress * c_dn);
                for d in 0..4 {
                    m[(d, d)] += c_id;
                }
                m * pref
            })
            .collect()
    }
}

/// A Volkov state labelled by its free momentum.
#[derive(Clone, Debug)]
pub struct VolkovState {
    pub p: FourVector,
    pub q: FourVector,
    pub k_dot_p: f64,
    /// Jacobi–Anger argument α = ea|p⊥|/(k·p).
    pub alpha: f64,
    pub phi0: f64,
    pub c0: f64,
    line: VolkovLine<f64>,
}

impl VolkovState {
    pub fn new(p: FourVector, bg: &Background, algebra: &DiracAlgebra) -> Result<Self> {
        let line = VolkovLine::new(&p.0, &bg.wave.0, bg.field_strength, algebra)?;
        let q = bg.quasi_momentum(p)?;
        Ok(VolkovState {
            p,
            q,
            k_dot_p: line.k_dot_p,
            alpha: line.alpha,
            phi0: p[2].atan2(p[1]),
            c0: line.c0,
            line,
        })
    }

    /// Closed-form Floquet coefficients F_ñ, |ñ| ≤ n_max.
    pub fn floquet_coefficients(&self, n_max: i32) -> FloquetSeries {
        FloquetSeries::from_coefficients(n_max, self.line.coefficients(n_max))
    }

    /// Dressing matrix D_p(φ) = 1 + e k̸A̸(φ)/(2k·p).
    pub fn dressing(&self, phase: f64) -> Mat4 {
        // k̸(γ¹cos φ + γ²sin φ) = [k̸(γ¹ − iγ²)e^{iφ} + k̸(γ¹ + iγ²)e^{−iφ}]/2
        let e_plus = C64::from_polar(0.5, phase);
        let e_minus = C64::from_polar(0.5, -phase);
        let d = self.line.k_raise * e_plus + self.line.k_lower * e_minus;
        Mat4::identity() - d * C64::new(self.line.field_strength / (2.0 * self.k_dot_p), 0.0)
    }

    /// Closed-form Volkov wave function at `x` (analytic phase integral).
    pub fn wavefunction(&self, x: FourVector, k: FourVector, u: &Spinor) -> Spinor {
        let phase = k.dot(x);
        let ea = self.line.field_strength;
        let kp = self.k_dot_p;
        let f = -(ea / kp) * (self.p[1] * phase.sin() - self.p[2] * phase.cos() + self.p[2]);
        let total = self.q.dot(x) + f;
        self.dressing(phase) * u * C64::from_polar(1.0, -total)
    }
}

/// Reconstructs Ψ_p(x) from a truncated Floquet series.
pub fn floquet_wavefunction(
    series: &FloquetSeries,
    q: FourVector,
    k: FourVector,
    x: FourVector,
    u: &Spinor,
) -> Spinor {
    let mut out = Spinor::zeros();
    for (n, f) in series.iter() {
        let ph = (q + k * n as f64).dot(x);
        out += f * u * C64::from_polar(1.0, -ph);
    }
    out
}
