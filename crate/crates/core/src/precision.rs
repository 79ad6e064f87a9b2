//! Floating-point backends for the amplitude core.
//!
//! The two photon orderings cancel to a relative level of order k·p/m²
//! (about 10⁻⁷ for undulator kinematics in the electron frame), so
//! identities that probe the cancellation itself, such as the Ward identity,
//! need more than double precision. The core is generic over [`Real`] and
//! can run in double-double arithmetic.

use std::fmt::Debug;

use num_traits::{Float, NumAssign};
use serde::{Deserialize, Serialize};
use twofloat::TwoFloat;

pub trait Real: Float + NumAssign + Debug + Default + Send + Sync + 'static {
    fn from_f64(x: f64) -> Self;
    fn to_f64(self) -> f64;

    /// Correctly rounded reciprocal. Generic code divides through this
    /// rather than `/`; see the `TwoFloat` implementation.
    fn inv(self) -> Self;

    #[inline]
    fn quo(self, d: Self) -> Self {
        self * d.inv()
    }
}

impl Real for f64 {
    #[inline]
    fn from_f64(x: f64) -> Self {
        x
    }
    #[inline]
    fn to_f64(self) -> f64 {
        self
    }
    #[inline]
    fn inv(self) -> Self {
        1.0 / self
    }
}

impl Real for TwoFloat {
    #[inline]
    fn from_f64(x: f64) -> Self {
        TwoFloat::from(x)
    }
    #[inline]
    fn to_f64(self) -> f64 {
        self.hi() + self.lo()
    }

    // twofloat 0.8 forms the residual 1 − y·(1/y) without a fused
    // multiply-add, which leaves its division and `recip` accurate only to
    // about 1e-16. Newton step with an exact residual.
    fn inv(self) -> Self {
        let hi = self.hi();
        let th = 1.0 / hi;
        let rh = (-hi).mul_add(th, 1.0);
        let rl = -(self.lo() * th);
        let e = TwoFloat::from(rh) + rl;
        e * th + th
    }
}

/// Arithmetic used by the amplitude core.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Precision {
    #[default]
    Double,
    DoubleDouble,
}

#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x)
}

/// (sin x, cos x) rescaled onto the unit circle. Library sine and cosine in
/// double-double are good to about 1e-22, which would leave photon momenta
/// visibly off the light cone.
pub fn unit_pair<T: Real>((s, c): (T, T)) -> (T, T) {
    let r = (s * s + c * c).sqrt().inv();
    (s * r, c * r)
}
