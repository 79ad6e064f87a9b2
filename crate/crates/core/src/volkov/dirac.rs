//! Explicit 4×4 Dirac matrices (Dirac representation) and free spinors.
//!
//! Everything is generic over the [`Real`] backend; the `f64` instantiation
//! carries the convenience methods taking [`FourVector`].

use nalgebra::{Matrix4, Vector4};
use num_complex::{Complex, Complex64};

use crate::kinematics::FourVector;
use crate::precision::{lit, Real};

pub type C64 = Complex64;
pub type Mat4 = Matrix4<C64>;
pub type Spinor = Vector4<C64>;
pub type MatG<T> = Matrix4<Complex<T>>;
pub type SpinorG<T> = Vector4<Complex<T>>;

/// Complex four-vector (polarisation vectors).
pub type ComplexFourVector = [C64; 4];

/// Metric diagonal (+, −, −, −).
pub const METRIC: [f64; 4] = [1.0, -1.0, -1.0, -1.0];

fn c<T: Real>(re: f64, im: f64) -> Complex<T> {
    Complex::new(lit(re), lit(im))
}

/// Conjugate transpose.
pub fn dagger<T: Real>(m: &MatG<T>) -> MatG<T> {
    m.transpose().map(|x| x.conj())
}

/// The four gamma matrices and the identity.
#[derive(Clone, Debug)]
pub struct DiracAlgebra<T: Real = f64> {
    pub gamma: [MatG<T>; 4],
    pub identity: MatG<T>,
}

impl<T: Real> Default for DiracAlgebra<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Real> DiracAlgebra<T> {
    pub fn new() -> Self {
        let zero = c::<T>(0.0, 0.0);
        let one = c::<T>(1.0, 0.0);
        let i = c::<T>(0.0, 1.0);
        let g0 = MatG::<T>::from_diagonal(&Vector4::new(one, one, -one, -one));
        // γ^i = [[0, σ_i], [−σ_i, 0]]
        let sigma: [[[Complex<T>; 2]; 2]; 3] = [
            [[zero, one], [one, zero]],
            [[zero, -i], [i, zero]],
            [[one, zero], [zero, -one]],
        ];
        let spatial = sigma.map(|s| {
            let mut g = MatG::<T>::zeros();
            for r in 0..2 {
                for cc in 0..2 {
                    g[(r, cc + 2)] = s[r][cc];
                    g[(r + 2, cc)] = -s[r][cc];
                }
            }
            g
        });
        DiracAlgebra {
            gamma: [g0, spatial[0], spatial[1], spatial[2]],
            identity: MatG::<T>::identity(),
        }
    }

    /// v̸ = γ^μ v_μ for a real four-vector given by components.
    pub fn slash_components(&self, v: &[T; 4]) -> MatG<T> {
        let mut out = MatG::<T>::zeros();
        for mu in 0..4 {
            let coef = Complex::new(lit::<T>(METRIC[mu]) * v[mu], T::zero());
            out += self.gamma[mu] * coef;
        }
        out
    }

    /// v̸ = γ^μ v_μ for a complex four-vector.
    pub fn slash_complex(&self, v: &[Complex<T>; 4]) -> MatG<T> {
        let mut out = MatG::<T>::zeros();
        for mu in 0..4 {
            out += self.gamma[mu] * (v[mu] * lit::<T>(METRIC[mu]));
        }
        out
    }

    /// Dirac adjoint of a matrix, γ⁰ M† γ⁰.
    pub fn bar(&self, m: &MatG<T>) -> MatG<T> {
        self.gamma[0] * dagger(m) * self.gamma[0]
    }

    /// Positive-energy spinor with ū u = 2m for on-shell momentum `p`
    /// (energy recomputed from the spatial part) and spin `r` ∈ {0, 1}
    /// along x³ in the rest frame.
    pub fn spinor_components(&self, p: &[T; 4], mass: T, r: usize) -> SpinorG<T> {
        let zero = c::<T>(0.0, 0.0);
        let one = c::<T>(1.0, 0.0);
        let i = c::<T>(0.0, 1.0);
        let e = (mass * mass + p[1] * p[1] + p[2] * p[2] + p[3] * p[3]).sqrt();
        let n = (e + mass).sqrt();
        let n_inv = n.inv();
        let chi = if r == 0 { [one, zero] } else { [zero, one] };
        // σ·p χ
        let px = Complex::new(p[1], T::zero());
        let py = Complex::new(p[2], T::zero());
        let pz = Complex::new(p[3], T::zero());
        let lower = [
            pz * chi[0] + (px - i * py) * chi[1],
            (px + i * py) * chi[0] - pz * chi[1],
        ];
        SpinorG::<T>::new(chi[0] * n, chi[1] * n, lower[0] * n_inv, lower[1] * n_inv)
    }

    /// Row spinor ū = u† γ⁰, stored as a column.
    pub fn adjoint_spinor(&self, u: &SpinorG<T>) -> SpinorG<T> {
        SpinorG::<T>::new(u[0].conj(), u[1].conj(), -u[2].conj(), -u[3].conj())
    }
}

impl DiracAlgebra<f64> {
    /// v̸ = γ^μ v_μ.
    pub fn slash(&self, v: FourVector) -> Mat4 {
        self.slash_components(&v.0)
    }

    /// See [`DiracAlgebra::spinor_components`].
    pub fn spinor(&self, p: FourVector, mass: f64, r: usize) -> Spinor {
        self.spinor_components(&p.0, mass, r)
    }

    /// Largest entrywise deviation of {γ^μ, γ^ν} from 2g^{μν}·I.
    pub fn anticommutator_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for mu in 0..4 {
            for nu in 0..4 {
                let ac = self.gamma[mu] * self.gamma[nu] + self.gamma[nu] * self.gamma[mu];
                let g = if mu == nu { 2.0 * METRIC[mu] } else { 0.0 };
                let target = self.identity * C64::new(g, 0.0);
                worst = worst.max((ac - target).iter().map(|x| x.norm()).fold(0.0, f64::max));
            }
        }
        worst
    }
}

/// ū M u for a column `u` and the adjoint row stored as returned by
/// [`DiracAlgebra::adjoint_spinor`].
pub fn sandwich<T: Real>(ubar: &SpinorG<T>, m: &MatG<T>, u: &SpinorG<T>) -> Complex<T> {
    let mu = m * u;
    let mut acc = Complex::new(T::zero(), T::zero());
    for k in 0..4 {
        acc = acc + ubar[k] * mu[k];
    }
    acc
}

/// Frobenius norm of a complex matrix.
pub fn frobenius<T: Real>(m: &MatG<T>) -> T {
    let mut acc = T::zero();
    for x in m.iter() {
        acc += x.norm_sqr();
    }
    acc.sqrt()
}
