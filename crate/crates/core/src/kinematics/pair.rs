//! Energy-momentum constraint for two-photon emission with `n` net wave quanta
//! absorbed: q_f + k₁ + k₂ = q_i + n·k.

use serde::Serialize;

use super::{DerivedBeamQuantities, Direction, FourVector};
use crate::error::{Error, Result};

/// A solved point of the DE(n) constraint in the electron frame.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PairKinematics {
    pub n: i32,
    pub wave: FourVector,
    pub q_initial: FourVector,
    pub k1: FourVector,
    pub k2: FourVector,
    pub q_final: FourVector,
    pub effective_mass: f64,
}

impl PairKinematics {
    /// P = q_i + n·k − k₁.
    pub fn recoil_total(&self) -> FourVector {
        self.q_initial + self.wave * self.n as f64 - self.k1
    }

    /// (k₁ + k₂ − q_i − n·k)² − m*², evaluated by direct substitution.
    pub fn mass_shell_residual(&self) -> f64 {
        let p = self.recoil_total() - self.k2;
        p.norm_sqr() - self.effective_mass * self.effective_mass
    }

    /// (q_i + nk − k₁)·k₂ − (q_i·nk − q_i·k₁ − nk·k₁), and the scale of its terms.
    pub fn linear_residual(&self) -> (f64, f64) {
        let nk = self.wave * self.n as f64;
        let lhs = self.recoil_total().dot(self.k2);
        let a = self.q_initial.dot(nk);
        let b = self.q_initial.dot(self.k1);
        let c = nk.dot(self.k1);
        (lhs - (a - b - c), a.abs().max(b.abs()).max(c.abs()))
    }

    /// Same kinematics with the photon labels exchanged.
    pub fn swapped(&self) -> PairKinematics {
        PairKinematics {
            k1: self.k2,
            k2: self.k1,
            ..*self
        }
    }
}

/// Solves for the lightlike k₂ along `dir2` given `n` and a lightlike `k1`.
///
/// Because k₂² = 0 the constraint (q_i + nk − k₁ − k₂)² = m*² is linear in k₂⁰,
/// so there is at most one root:
/// k₂⁰ = [2n q_i·k − 2q_i·k₁ − 2n k·k₁] / [2 (q_i + nk − k₁)·(1, d̂₂)].
pub fn solve_pair_kinematics(
    n: i32,
    k1: FourVector,
    dir2: Direction,
    dbq: &DerivedBeamQuantities,
) -> Result<PairKinematics> {
    let q_i = dbq.initial_quasi_momentum();
    solve_with_initial(n, q_i, k1, dir2, dbq)
}

/// As [`solve_pair_kinematics`] with an explicit initial quasi-momentum.
pub fn solve_with_initial(
    n: i32,
    q_i: FourVector,
    k1: FourVector,
    dir2: Direction,
    dbq: &DerivedBeamQuantities,
) -> Result<PairKinematics> {
    if n < 1 {
        return Err(Error::Domain(format!(
            "net absorbed quanta n = {n} must be >= 1"
        )));
    }
    let k = dbq.volkov_wave_vector;
    let e1 = k1[0];
    if !(e1 > 0.0) {
        return Err(Error::Domain(format!(
            "photon energy k1⁰ = {e1} must be positive"
        )));
    }
    if k1.norm_sqr().abs() > 1e-10 * e1 * e1 {
        return Err(Error::Domain("k1 is not lightlike".into()));
    }
    let nf = n as f64;
    let total = q_i + k * nf;
    if e1 >= total[0] {
        return Err(Error::ChannelClosed(format!(
            "k1⁰ = {e1} exceeds available energy {}",
            total[0]
        )));
    }
    let excess = 2.0 * nf * q_i.dot(k) - 2.0 * q_i.dot(k1) - 2.0 * nf * k.dot(k1);
    let p = total - k1;
    let den = 2.0 * p.dot(dir2.null_vector());
    if !(excess > 0.0) || !(den > 0.0) {
        return Err(Error::ChannelClosed(format!(
            "no positive-energy photon 2 along {:?} for n = {n}, k1⁰ = {e1:e} eV",
            dir2.0
        )));
    }
    let e2 = excess / den;
    let k2 = FourVector::lightlike(e2, dir2);
    let q_f = p - k2;
    if !(q_f[0] > 0.0) {
        return Err(Error::ChannelClosed(
            "final electron energy not positive".into(),
        ));
    }
    Ok(PairKinematics {
        n,
        wave: k,
        q_initial: q_i,
        k1,
        k2,
        q_final: q_f,
        effective_mass: dbq.effective_mass,
    })
}

/// k₁⁰ for which photon 2 along `dir2` has energy `e2` (inverse of the solve).
/// The map k₁⁰ ↦ k₂⁰ is a Möbius map, so the inverse is closed form.
pub fn photon1_energy_for(
    n: i32,
    dir1: Direction,
    dir2: Direction,
    e2: f64,
    dbq: &DerivedBeamQuantities,
) -> f64 {
    let k = dbq.volkov_wave_vector;
    let q_i = dbq.initial_quasi_momentum();
    let nf = n as f64;
    let d1 = dir1.null_vector();
    let d2 = dir2.null_vector();
    // k₂⁰(t) = (a0 − t a1)/(b0 − t b1)
    let a0 = 2.0 * nf * q_i.dot(k);
    let a1 = 2.0 * q_i.dot(d1) + 2.0 * nf * k.dot(d1);
    let b0 = 2.0 * (q_i + k * nf).dot(d2);
    let b1 = 2.0 * d1.dot(d2);
    (a0 - e2 * b0) / (a1 - e2 * b1)
}
