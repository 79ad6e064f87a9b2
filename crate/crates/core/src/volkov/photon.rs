//! Emitted photon modes in the helicity basis.

use std::f64::consts::FRAC_1_SQRT_2;

use serde::{Deserialize, Serialize};

use super::dirac::{ComplexFourVector, C64, METRIC};
use crate::kinematics::{Direction, FourVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Helicity {
    Plus,
    Minus,
}

impl Helicity {
    pub const BOTH: [Helicity; 2] = [Helicity::Plus, Helicity::Minus];

    pub fn sign(self) -> f64 {
        match self {
            Helicity::Plus => 1.0,
            Helicity::Minus => -1.0,
        }
    }

    /// Index in the product basis ordering |+⟩, |−⟩.
    pub fn index(self) -> usize {
        match self {
            Helicity::Plus => 0,
            Helicity::Minus => 1,
        }
    }
}

/// Zenith (from the x³ axis) and azimuth of a propagation direction.
///
/// Kept separately from [`Direction`] so that the transverse frame θ̂, φ̂ is
/// defined even on the axis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Angles {
    pub zenith: f64,
    pub azimuth: f64,
}

impl Angles {
    pub fn new(zenith: f64, azimuth: f64) -> Self {
        Angles { zenith, azimuth }
    }

    pub fn direction(self) -> Direction {
        Direction::from_angles(self.zenith, self.azimuth)
    }

    pub fn rotated(self, delta: f64) -> Self {
        Angles::new(self.zenith, self.azimuth + delta)
    }
}

/// Helicity polarisation vector ε(λ) = (0, (θ̂ + iλφ̂)/√2).
pub fn polarization_vector(angles: Angles, helicity: Helicity) -> ComplexFourVector {
    let (sz, cz) = angles.zenith.sin_cos();
    let (sa, ca) = angles.azimuth.sin_cos();
    let theta = [cz * ca, cz * sa, -sz];
    let phi = [-sa, ca, 0.0];
    let l = helicity.sign();
    let mut eps = [C64::new(0.0, 0.0); 4];
    for i in 0..3 {
        eps[i + 1] = C64::new(theta[i], l * phi[i]) * FRAC_1_SQRT_2;
    }
    eps
}

/// Bilinear Minkowski product of complex four-vectors (no conjugation).
pub fn cdot(a: &ComplexFourVector, b: &ComplexFourVector) -> C64 {
    (0..4).map(|mu| a[mu] * b[mu] * METRIC[mu]).sum()
}

pub fn conj(a: &ComplexFourVector) -> ComplexFourVector {
    a.map(|c| c.conj())
}

pub fn complexify(v: FourVector) -> ComplexFourVector {
    v.0.map(|c| C64::new(c, 0.0))
}

/// A photon with definite momentum and helicity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhotonMode {
    pub momentum: FourVector,
    pub angles: Angles,
    pub helicity: Helicity,
    pub polarization: ComplexFourVector,
}

impl PhotonMode {
    pub fn new(energy: f64, angles: Angles, helicity: Helicity) -> Self {
        PhotonMode {
            momentum: FourVector::lightlike(energy, angles.direction()),
            angles,
            helicity,
            polarization: polarization_vector(angles, helicity),
        }
    }

    /// The vector contracted with γ at an emission vertex, ε*.
    pub fn vertex_vector(&self) -> ComplexFourVector {
        conj(&self.polarization)
    }
}
