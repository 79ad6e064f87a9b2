//! Contravariant four-vectors with metric signature (+, −, −, −).

use std::ops::{Add, AddAssign, Index, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

/// A real contravariant four-vector `(c0, c1, c2, c3)` in natural units.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct FourVector(pub [f64; 4]);

impl FourVector {
    pub const ZERO: FourVector = FourVector([0.0; 4]);

    pub const fn new(c0: f64, c1: f64, c2: f64, c3: f64) -> Self {
        FourVector([c0, c1, c2, c3])
    }

    /// Null vector with energy `energy` travelling along the unit vector `dir`.
    pub fn lightlike(energy: f64, dir: Direction) -> Self {
        let d = dir.0;
        FourVector([energy, energy * d[0], energy * d[1], energy * d[2]])
    }

    /// Minkowski product `self·other`.
    #[inline]
    pub fn dot(self, other: FourVector) -> f64 {
        let a = self.0;
        let b = other.0;
        a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3]
    }

    #[inline]
    pub fn norm_sqr(self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn spatial(self) -> [f64; 3] {
        [self.0[1], self.0[2], self.0[3]]
    }

    /// Euclidean length of the spatial part.
    pub fn spatial_norm(self) -> f64 {
        let s = self.spatial();
        (s[0] * s[0] + s[1] * s[1] + s[2] * s[2]).sqrt()
    }

    /// Largest absolute component; a scale for relative tolerances.
    pub fn max_abs(self) -> f64 {
        self.0.iter().fold(0.0_f64, |m, c| m.max(c.abs()))
    }

    /// Lorentz boost into a frame moving with velocity `beta` (units of c)
    /// relative to the current one.
    pub fn boost(self, beta: [f64; 3]) -> FourVector {
        let b2 = beta[0] * beta[0] + beta[1] * beta[1] + beta[2] * beta[2];
        if b2 == 0.0 {
            return self;
        }
        assert!(b2 < 1.0, "boost velocity must be subluminal");
        let gamma = 1.0 / (1.0 - b2).sqrt();
        let s = self.spatial();
        let bs = beta[0] * s[0] + beta[1] * s[1] + beta[2] * s[2];
        let t = self.0[0];
        let t_new = gamma * (t - bs);
        let coef = (gamma - 1.0) * bs / b2 - gamma * t;
        FourVector([
            t_new,
            s[0] + coef * beta[0],
            s[1] + coef * beta[1],
            s[2] + coef * beta[2],
        ])
    }
}

impl Index<usize> for FourVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl Add for FourVector {
    type Output = FourVector;
    fn add(self, o: FourVector) -> FourVector {
        FourVector(std::array::from_fn(|i| self.0[i] + o.0[i]))
    }
}

impl AddAssign for FourVector {
    fn add_assign(&mut self, o: FourVector) {
        for i in 0..4 {
            self.0[i] += o.0[i];
        }
    }
}

impl Sub for FourVector {
    type Output = FourVector;
    fn sub(self, o: FourVector) -> FourVector {
        FourVector(std::array::from_fn(|i| self.0[i] - o.0[i]))
    }
}

impl Neg for FourVector {
    type Output = FourVector;
    fn neg(self) -> FourVector {
        FourVector(self.0.map(|c| -c))
    }
}

impl Mul<f64> for FourVector {
    type Output = FourVector;
    fn mul(self, s: f64) -> FourVector {
        FourVector(self.0.map(|c| c * s))
    }
}

impl Mul<FourVector> for f64 {
    type Output = FourVector;
    fn mul(self, v: FourVector) -> FourVector {
        v * self
    }
}

/// Unit three-vector, parameterised by zenith angle `Z` from the x³ axis and
/// azimuth `A` in the transverse plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Direction(pub [f64; 3]);

impl Direction {
    pub fn from_angles(zenith: f64, azimuth: f64) -> Self {
        let (sz, cz) = zenith.sin_cos();
        let (sa, ca) = azimuth.sin_cos();
        Direction([sz * ca, sz * sa, cz])
    }

    /// Normalises an arbitrary non-zero three-vector.
    pub fn normalized(v: [f64; 3]) -> Self {
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        Direction([v[0] / n, v[1] / n, v[2] / n])
    }

    pub fn zenith(self) -> f64 {
        let d = self.0;
        (d[0].hypot(d[1])).atan2(d[2])
    }

    /// Azimuth in [0, 2π).
    pub fn azimuth(self) -> f64 {
        let a = self.0[1].atan2(self.0[0]);
        if a < 0.0 {
            a + 2.0 * std::f64::consts::PI
        } else {
            a
        }
    }

    /// The null four-vector `(1, n̂)`.
    pub fn null_vector(self) -> FourVector {
        FourVector::lightlike(1.0, self)
    }

    /// Rotation about the x³ axis by `delta`.
    pub fn rotated_about_axis(self, delta: f64) -> Self {
        let (s, c) = delta.sin_cos();
        let d = self.0;
        Direction([c * d[0] - s * d[1], s * d[0] + c * d[1], d[2]])
    }

    /// Polar unit vector `θ̂` (increasing zenith).
    pub fn theta_hat(self) -> [f64; 3] {
        let (sz, cz) = self.zenith().sin_cos();
        let (sa, ca) = self.azimuth().sin_cos();
        [cz * ca, cz * sa, -sz]
    }

    /// Azimuthal unit vector `φ̂`.
    pub fn phi_hat(self) -> [f64; 3] {
        let (sa, ca) = self.azimuth().sin_cos();
        [-sa, ca, 0.0]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dot_uses_mostly_minus_metric() {
        let a = FourVector::new(2.0, 1.0, 0.0, 0.0);
        assert_eq!(a.norm_sqr(), 3.0);
        let l = FourVector::lightlike(3.0, Direction::from_angles(0.4, 1.1));
        assert!(l.norm_sqr().abs() < 1e-14);
    }

    #[test]
    fn boost_and_inverse_restore_vector() {
        let v = FourVector::new(5.0, 1.0, -2.0, 3.0);
        let b = [0.1, -0.3, 0.6];
        let back = v.boost(b).boost([-b[0], -b[1], -b[2]]);
        for i in 0..4 {
            assert!((back[i] - v[i]).abs() < 1e-13);
        }
    }

    #[test]
    fn boost_preserves_invariant() {
        let v = FourVector::new(5.0, 1.0, -2.0, 3.0);
        let w = v.boost([0.0, 0.0, 0.99]);
        assert!((w.norm_sqr() - v.norm_sqr()).abs() < 1e-10);
    }

    #[test]
    fn direction_angles_round_trip() {
        let d = Direction::from_angles(0.7, 5.5);
        assert!((d.zenith() - 0.7).abs() < 1e-14);
        assert!((d.azimuth() - 5.5).abs() < 1e-14);
    }

    #[test]
    fn theta_phi_hat_orthonormal_to_direction() {
        let d = Direction::from_angles(1.2, 0.3);
        let t = d.theta_hat();
        let p = d.phi_hat();
        let dot = |a: [f64; 3], b: [f64; 3]| a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
        assert!(dot(t, d.0).abs() < 1e-15);
        assert!(dot(p, d.0).abs() < 1e-15);
        assert!(dot(t, p).abs() < 1e-15);
        assert!((dot(t, t) - 1.0).abs() < 1e-15);
    }
}
