//! Momentum-space Volkov propagator between the two emission vertices.
//!
//! In the Floquet picture the propagator iG_V contributes, for each internal
//! harmonic n₁, the factor i(p̸ + m)/(p² − m² + iε) dressed by the Volkov
//! matrices of the intermediate momentum. Since q² − m*² = p² − m² for a
//! quasi-momentum q and its free momentum p, the denominator is written in
//! terms of quasi-momenta. The Feynman +iε prescription is implied; points
//! close enough to the pole to need it are rejected by the resonance guard.

use super::dirac::{DiracAlgebra, Mat4, C64};
use super::state::Background;
use crate::error::{Error, Result};
use crate::kinematics::FourVector;

/// q_mid² − m*² for q_mid = q_i + s·k − k_emit, using q_i² = m*² and
/// k² = k_emit² = 0 so that no O(m²) cancellation occurs.
pub fn offshellness_after_emission(
    q_initial: FourVector,
    s: i32,
    wave: FourVector,
    k_emit: FourVector,
) -> f64 {
    let sf = s as f64;
    2.0 * sf * q_initial.dot(wave) - 2.0 * q_initial.dot(k_emit) - 2.0 * sf * wave.dot(k_emit)
}

/// q_mid² − m*² by direct evaluation.
pub fn offshellness_direct(q_mid: FourVector, bg: &Background) -> f64 {
    q_mid.norm_sqr() - bg.effective_mass_sqr()
}

/// Resonance guard: |q_mid² − m*²| must exceed `relative × scale`.
#[derive(Clone, Copy, Debug)]
pub struct ResonanceGuard {
    pub relative: f64,
    pub scale: f64,
}

impl ResonanceGuard {
    pub fn threshold(&self) -> f64 {
        self.relative * self.scale
    }

    pub fn check(&self, n1: i32, offshell: f64) -> Result<()> {
        if offshell.abs() < self.threshold() {
            Err(Error::Resonance {
                n1,
                offshell,
                guard: self.threshold(),
            })
        } else {
            Ok(())
        }
    }
}

/// (p̸_mid + m)/(q_mid² − m*²), where p_mid is the free momentum of `q_mid`.
///
/// `offshell` must be q_mid² − m*², preferably from
/// [`offshellness_after_emission`].
pub fn volkov_propagator_contribution(
    q_mid: FourVector,
    offshell: f64,
    bg: &Background,
    algebra: &DiracAlgebra,
) -> Result<Mat4> {
    if offshell == 0.0 || !offshell.is_finite() {
        return Err(Error::Resonance {
            n1: 0,
            offshell,
            guard: 0.0,
        });
    }
    let p_mid = bg.free_momentum(q_mid)?;
    let mut num = algebra.slash(p_mid);
    for d in 0..4 {
        num[(d, d)] += C64::new(bg.electron_mass, 0.0);
    }
    Ok(num * C64::new(1.0 / offshell, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::volkov::dirac::frobenius;

    fn bg(ea: f64) -> Background {
        Background {
            wave: FourVector::new(0.5, 0.0, 0.0, -0.5),
            field_strength: ea,
            electron_mass: 1.0,
        }
    }

    #[test]
    fn free_field_limit() {
        let d = DiracAlgebra::new();
        let b = bg(0.0);
        let q = FourVector::new(1.3, 0.2, -0.1, 0.4);
        let off = offshellness_direct(q, &b);
        let g = volkov_propagator_contribution(q, off, &b, &d).unwrap();
        let mut want = d.slash(q);
        for i in 0..4 {
            want[(i, i)] += C64::new(1.0, 0.0);
        }
        want *= C64::new(1.0 / (q.norm_sqr() - 1.0), 0.0);
        assert!(frobenius(&(g - want)) < 1e-14);
    }

    #[test]
    fn scales_inversely_with_offshellness() {
        let d = DiracAlgebra::new();
        let b = bg(0.7);
        let q = FourVector::new(1.3, 0.2, -0.1, 0.4);
        let g1 = volkov_propagator_contribution(q, 0.2, &b, &d).unwrap();
        let g2 = volkov_propagator_contribution(q, 0.4, &b, &d).unwrap();
        assert!((frobenius(&g1) / frobenius(&g2) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn precise_offshellness_matches_direct() {
        let b = bg(0.7);
        let ms2 = b.effective_mass_sqr();
        let q_i = FourVector::new(ms2.sqrt(), 0.0, 0.0, 0.0);
        let q_i = b.quasi_momentum(b.free_momentum(q_i).unwrap()).unwrap();
        let k1 = FourVector::new(0.1, 0.06, 0.0, 0.08);
        for s in -3..=3 {
            let q_mid = q_i + b.wave * s as f64 - k1;
            let a = offshellness_after_emission(q_i, s, b.wave, k1);
            let direct = offshellness_direct(q_mid, &b);
            assert!((a - direct).abs() < 1e-12, "s={s}: {a} vs {direct}");
        }
    }

    #[test]
    fn guard_rejects_near_pole() {
        let g = ResonanceGuard {
            relative: 1e-6,
            scale: 2.0,
        };
        assert!(g.check(1, 1e-7).is_err());
        assert!(g.check(1, 1e-5).is_ok());
        match g.check(3, -1e-9) {
            Err(Error::Resonance { n1, .. }) => assert_eq!(n1, 3),
            other => panic!("{other:?}"),
        }
    }
}
