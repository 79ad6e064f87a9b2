//! Second-order strong-field double Compton amplitude in the Floquet basis.
//!
//! With Ψ = Σ F_ñ e^{−i(q+ñk)·x} u for every Volkov line, each vertex
//! integral becomes a momentum-conserving delta and a harmonic convolution
//!
//! ```text
//! V_s(a ← b; ε) = Σ_ñ F̄ᵃ_{ñ−s} ε̸* Fᵇ_ñ,      q_a = q_b + s·k − k_emit,
//! ```
//!
//! so that for n net absorbed quanta
//!
//! ```text
//! A = −i Σ_{s₁} ū_f V_{n−s₁}(f ← mid; ε_b) (p̸_mid + m)/(q_mid² − m*²) V_{s₁}(mid ← i; ε_a) u_i
//! ```
//!
//! summed over both orders (a, b) = (1, 2) and (2, 1) in which the photons
//! leave the electron line.

use num_complex::Complex;
use serde::{Deserialize, Serialize};
use twofloat::TwoFloat;

use super::dirac::{frobenius, sandwich, ComplexFourVector, DiracAlgebra, MatG, C64};
use super::photon::{Angles, Helicity};
use super::propagator::ResonanceGuard;
use super::state::{mdot, Background, VolkovLine};
use crate::error::{Error, Result};
use crate::kinematics::{DerivedBeamQuantities, FourVector, PairKinematics};
use crate::precision::{lit, unit_pair, Precision, Real};

/// Harmonic truncation control.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FloquetSettings {
    /// First truncation |ñ| ≤ N tried.
    pub initial_truncation: i32,
    /// Largest truncation before giving up.
    pub max_truncation: i32,
    /// Relative change between N and 2N accepted as converged.
    pub tolerance: f64,
    /// Propagator guard relative to 2|q_i·k|.
    pub resonance_guard: f64,
    pub precision: Precision,
}

impl Default for FloquetSettings {
    fn default() -> Self {
        FloquetSettings {
            initial_truncation: 8,
            max_truncation: 64,
            tolerance: 1e-8,
            resonance_guard: 1e-6,
            precision: Precision::Double,
        }
    }
}

impl FloquetSettings {
    pub fn validate(&self) -> Result<()> {
        if self.initial_truncation < 1 || self.max_truncation < self.initial_truncation {
            return Err(Error::Config(format!(
                "Floquet truncation range [{}, {}] is invalid",
                self.initial_truncation, self.max_truncation
            )));
        }
        if !(self.tolerance > 0.0) || !(self.resonance_guard >= 0.0) {
            return Err(Error::Config(
                "Floquet tolerance and guard must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// One emission channel: `n` net absorbed quanta, photon 1 with energy
/// `k1_energy` along `angles1`, photon 2 along `angles2` with the energy
/// fixed by the mass shell.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairSpec {
    pub n: i32,
    pub k1_energy: f64,
    pub angles1: Angles,
    pub angles2: Angles,
}

/// The vector contracted with γ at an emission vertex.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum VertexVector {
    /// ε*(λ) in the transverse frame of the photon's angles.
    Emitted(Helicity),
    /// The photon's own momentum, for gauge checks.
    Momentum,
    Fixed(ComplexFourVector),
}

/// Amplitudes for every combination of initial spin, final spin and photon
/// helicities at one kinematic point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HelicityAmplitudeBlock {
    pub n: i32,
    pub k1: FourVector,
    pub k2: FourVector,
    pub angles1: Angles,
    pub angles2: Angles,
    /// Harmonic truncation that met the tolerance.
    pub truncation: i32,
    /// Relative change at the last doubling.
    pub truncation_change: f64,
    /// `amplitudes[r_i][r_f][h₁][h₂]`, helicity index 0 = +, 1 = −.
    pub amplitudes: [[[[C64; 2]; 2]; 2]; 2],
}

impl HelicityAmplitudeBlock {
    pub fn get(&self, ri: usize, rf: usize, h1: Helicity, h2: Helicity) -> C64 {
        self.amplitudes[ri][rf][h1.index()][h2.index()]
    }

    /// Σ over spins and helicities of |A|².
    pub fn summed_square(&self) -> f64 {
        self.amplitudes
            .iter()
            .flatten()
            .flatten()
            .flatten()
            .map(|a| a.norm_sqr())
            .sum()
    }

    /// The 2×2 helicity matrix for fixed electron spins, S[h₁][h₂].
    pub fn spin_slice(&self, ri: usize, rf: usize) -> [[C64; 2]; 2] {
        self.amplitudes[ri][rf]
    }
}

/// Amplitudes for lists of vertex vectors: `values[a][b][r_i][r_f]` pairs
/// `v1[a]` at photon 1 with `v2[b]` at photon 2.
#[derive(Clone, Debug)]
pub struct AmplitudeSet {
    pub kinematics: PairKinematics,
    pub values: Vec<Vec<[[C64; 2]; 2]>>,
    pub truncation: i32,
    pub truncation_change: f64,
}

/// Evaluates the double Compton amplitude in a fixed background.
#[derive(Clone, Debug)]
pub struct AmplitudeEngine {
    pub background: Background,
    pub q_initial: FourVector,
    pub settings: FloquetSettings,
}

impl AmplitudeEngine {
    /// Engine for the electron-frame kinematics of a beam, initial electron at rest.
    pub fn new(dbq: &DerivedBeamQuantities, settings: FloquetSettings) -> Result<Self> {
        Self::with_background(
            Background::from_beam(dbq),
            dbq.initial_quasi_momentum(),
            settings,
        )
    }

    /// Engine for an arbitrary background and initial quasi-momentum. Only
    /// the spatial part of `q_initial` is used; the energy is put on the
    /// m*² shell.
    pub fn with_background(
        background: Background,
        q_initial: FourVector,
        settings: FloquetSettings,
    ) -> Result<Self> {
        settings.validate()?;
        let w = background.wave;
        if w.norm_sqr() != 0.0 || !(w[0] > 0.0) {
            return Err(Error::Domain(
                "background wave vector must be lightlike".into(),
            ));
        }
        let ms2 = background.effective_mass_sqr();
        let s = q_initial.spatial();
        let e = (ms2 + s[0] * s[0] + s[1] * s[1] + s[2] * s[2]).sqrt();
        Ok(AmplitudeEngine {
            background,
            q_initial: FourVector::new(e, s[0], s[1], s[2]),
            settings,
        })
    }

    fn guard(&self) -> ResonanceGuard {
        ResonanceGuard {
            relative: self.settings.resonance_guard,
            scale: 2.0 * self.q_initial.dot(self.background.wave).abs(),
        }
    }

    /// Kinematics of a channel, solved in the engine's precision.
    pub fn kinematics(&self, spec: &PairSpec) -> Result<PairKinematics> {
        match self.settings.precision {
            Precision::Double => Core::<f64>::new(self).solve(spec).map(|k| k.to_f64(self)),
            Precision::DoubleDouble => Core::<TwoFloat>::new(self)
                .solve(spec)
                .map(|k| k.to_f64(self)),
        }
    }

    /// Amplitudes ū_f M u_i for all spins and the given vertex vectors, with
    /// the harmonic truncation doubled until converged.
    pub fn amplitudes(
        &self,
        spec: &PairSpec,
        v1: &[VertexVector],
        v2: &[VertexVector],
    ) -> Result<AmplitudeSet> {
        match self.settings.precision {
            Precision::Double => Core::<f64>::new(self).amplitudes(self, spec, v1, v2),
            Precision::DoubleDouble => Core::<TwoFloat>::new(self).amplitudes(self, spec, v1, v2),
        }
    }

    /// All helicity amplitudes of a channel.
    pub fn helicity_block(
        &self,
        spec: &PairSpec,
    ) -> Result<(PairKinematics, HelicityAmplitudeBlock)> {
        let vv = Helicity::BOTH.map(VertexVector::Emitted);
        let set = self.amplitudes(spec, &vv, &vv)?;
        let mut amplitudes = [[[[C64::new(0.0, 0.0); 2]; 2]; 2]; 2];
        for (h1, row) in set.values.iter().enumerate() {
            for (h2, spins) in row.iter().enumerate() {
                for (ri, per_rf) in spins.iter().enumerate() {
                    for (rf, a) in per_rf.iter().enumerate() {
                        amplitudes[ri][rf][h1][h2] = *a;
                    }
                }
            }
        }
        let kin = set.kinematics;
        let block = HelicityAmplitudeBlock {
            n: spec.n,
            k1: kin.k1,
            k2: kin.k2,
            angles1: spec.angles1,
            angles2: spec.angles2,
            truncation: set.truncation,
            truncation_change: set.truncation_change,
            amplitudes,
        };
        Ok((kin, block))
    }

    /// First-order emission of one photon along `angles` with `n` absorbed
    /// quanta: ū_f V_n(f ← i; ε(λ)) u_i for both helicities.
    pub fn single_emission(&self, n: i32, angles: Angles) -> Result<SingleEmission> {
        Core::<f64>::new(self).single_emission(n, angles)
    }
}

/// One-photon emission amplitudes, `amplitudes[r_i][r_f][h]` (0 = +, 1 = −).
#[derive(Clone, Debug, PartialEq)]
pub struct SingleEmission {
    pub n: i32,
    pub photon: FourVector,
    pub q_final: FourVector,
    pub truncation: i32,
    pub amplitudes: [[[C64; 2]; 2]; 2],
}

type V4<T> = [T; 4];

fn axpy<T: Real>(a: &V4<T>, s: T, b: &V4<T>) -> V4<T> {
    std::array::from_fn(|i| a[i] + s * b[i])
}

fn lift<T: Real>(v: FourVector) -> V4<T> {
    v.0.map(lit)
}

fn lower<T: Real>(v: &V4<T>) -> FourVector {
    FourVector(v.map(Real::to_f64))
}

struct Kin<T: Real> {
    n: i32,
    k1: V4<T>,
    k2: V4<T>,
    q_f: V4<T>,
    frames: [Frame<T>; 2],
}

impl<T: Real> Kin<T> {
    fn to_f64(&self, eng: &AmplitudeEngine) -> PairKinematics {
        PairKinematics {
            n: self.n,
            wave: eng.background.wave,
            q_initial: eng.q_initial,
            k1: lower(&self.k1),
            k2: lower(&self.k2),
            q_final: lower(&self.q_f),
            effective_mass: eng.background.effective_mass_sqr().sqrt(),
        }
    }
}

/// Propagation direction and transverse frame θ̂, φ̂.
#[derive(Clone, Copy)]
struct Frame<T: Real> {
    dir: [T; 3],
    theta: [T; 3],
    phi: [T; 3],
}

impl<T: Real> Frame<T> {
    fn new(a: Angles) -> Self {
        let (sz, cz) = unit_pair(lit::<T>(a.zenith).sin_cos());
        let (sa, ca) = unit_pair(lit::<T>(a.azimuth).sin_cos());
        Frame {
            dir: [sz * ca, sz * sa, cz],
            theta: [cz * ca, cz * sa, -sz],
            phi: [-sa, ca, T::zero()],
        }
    }

    fn null(&self, energy: T) -> V4<T> {
        [
            energy,
            energy * self.dir[0],
            energy * self.dir[1],
            energy * self.dir[2],
        ]
    }

    fn vertex_vector(&self, v: &VertexVector, k: &V4<T>) -> [Complex<T>; 4] {
        let zero = Complex::new(T::zero(), T::zero());
        match v {
            VertexVector::Emitted(h) => {
                let r = lit::<T>(2.0).sqrt().inv();
                let l = lit::<T>(h.sign());
                let mut e = [zero; 4];
                for i in 0..3 {
                    e[i + 1] = Complex::new(self.theta[i] * r, -l * self.phi[i] * r);
                }
                e
            }
            VertexVector::Momentum => k.map(|c| Complex::new(c, T::zero())),
            VertexVector::Fixed(c) => c.map(|z| Complex::new(lit(z.re), lit(z.im))),
        }
    }
}

/// A Volkov line's Floquet coefficients with a sparsity mask.
struct Line<T: Real> {
    n_max: i32,
    coeffs: Vec<MatG<T>>,
    nonzero: Vec<bool>,
}

impl<T: Real> Line<T> {
    fn new(coeffs: Vec<MatG<T>>) -> Self {
        let n_max = (coeffs.len() as i32 - 1) / 2;
        let nonzero = coeffs.iter().map(|m| frobenius(m) > T::zero()).collect();
        Line {
            n_max,
            coeffs,
            nonzero,
        }
    }

    fn barred(&self, algebra: &DiracAlgebra<T>) -> Self {
        Line {
            n_max: self.n_max,
            coeffs: self.coeffs.iter().map(|m| algebra.bar(m)).collect(),
            nonzero: self.nonzero.clone(),
        }
    }

    fn at(&self, n: i32) -> Option<&MatG<T>> {
        let i = (n + self.n_max) as usize;
        (n.abs() <= self.n_max && self.nonzero[i]).then(|| &self.coeffs[i])
    }
}

/// Σ_ñ Ā_{ñ−s} E B_ñ.
fn vertex<T: Real>(bar_a: &Line<T>, e: &MatG<T>, b: &Line<T>, s: i32) -> Option<MatG<T>> {
    let mut acc: Option<MatG<T>> = None;
    for nb in -b.n_max..=b.n_max {
        let (Some(fb), Some(fa)) = (b.at(nb), bar_a.at(nb - s)) else {
            continue;
        };
        let term = fa * e * fb;
        acc = Some(match acc {
            Some(a) => a + term,
            None => term,
        });
    }
    acc
}

type Grid<T> = Vec<Vec<MatG<T>>>;

/// The engine's data in one arithmetic backend.
struct Core<T: Real> {
    alg: DiracAlgebra<T>,
    wave: V4<T>,
    mass: T,
    ea: T,
    q_i: V4<T>,
    guard: ResonanceGuard,
    settings: FloquetSettings,
}

impl<T: Real> Core<T> {
    fn new(eng: &AmplitudeEngine) -> Self {
        let bg = &eng.background;
        let mass: T = lit(bg.electron_mass);
        let ea: T = lit(bg.field_strength);
        let mut q_i = lift::<T>(eng.q_initial);
        q_i[0] =
            (mass * mass + ea * ea + q_i[1] * q_i[1] + q_i[2] * q_i[2] + q_i[3] * q_i[3]).sqrt();
        Core {
            alg: DiracAlgebra::new(),
            wave: lift(bg.wave),
            mass,
            ea,
            q_i,
            guard: eng.guard(),
            settings: eng.settings,
        }
    }

    fn free_momentum(&self, q: &V4<T>) -> Result<V4<T>> {
        let kq = mdot(&self.wave, q);
        if kq == T::zero() || !kq.is_finite() {
            return Err(Error::DegenerateKinematics(format!(
                "k·q = {:e}",
                kq.to_f64()
            )));
        }
        Ok(axpy(
            q,
            -(self.ea * self.ea).quo(lit::<T>(2.0) * kq),
            &self.wave,
        ))
    }

    fn line(&self, q: &V4<T>, trunc: i32) -> Result<Line<T>> {
        let p = self.free_momentum(q)?;
        let v = VolkovLine::new(&p, &self.wave, self.ea, &self.alg)?;
        Ok(Line::new(v.coefficients(trunc)))
    }

    /// k₂⁰ = [n q_i·k − q_i·k₁ − n k·k₁] / [(q_i + nk − k₁)·(1, d̂₂)], the
    /// unique root of the linear mass-shell condition.
    fn solve(&self, spec: &PairSpec) -> Result<Kin<T>> {
        let n = spec.n;
        if n < 1 {
            return Err(Error::Domain(format!(
                "net absorbed quanta n = {n} must be >= 1"
            )));
        }
        let e1 = spec.k1_energy;
        if !(e1 > 0.0) || !e1.is_finite() {
            return Err(Error::Domain(format!(
                "photon energy k1⁰ = {e1} must be positive"
            )));
        }
        let nf: T = lit(n as f64);
        let frames = [Frame::new(spec.angles1), Frame::new(spec.angles2)];
        let k1 = frames[0].null(lit(e1));
        let total = axpy(&self.q_i, nf, &self.wave);
        if k1[0] >= total[0] {
            return Err(Error::ChannelClosed(format!(
                "k1⁰ = {e1} exceeds available energy {}",
                total[0].to_f64()
            )));
        }
        let excess =
            nf * mdot(&self.q_i, &self.wave) - mdot(&self.q_i, &k1) - nf * mdot(&self.wave, &k1);
        let p = axpy(&total, -T::one(), &k1);
        let den = mdot(&p, &frames[1].null(T::one()));
        if !(excess > T::zero()) || !(den > T::zero()) {
            return Err(Error::ChannelClosed(format!(
                "no positive-energy photon 2 along {:?} for n = {n}, k1⁰ = {e1:e} eV",
                spec.angles2
            )));
        }
        let k2 = frames[1].null(excess.quo(den));
        let q_f = axpy(&p, -T::one(), &k2);
        if !(q_f[0] > T::zero()) {
            return Err(Error::ChannelClosed(
                "final electron energy not positive".into(),
            ));
        }
        Ok(Kin {
            n,
            k1,
            k2,
            q_f,
            frames,
        })
    }

    /// One photon ordering at fixed truncation; result indexed `[first][second]`.
    #[allow(clippy::too_many_arguments)]
    fn ordering(
        &self,
        n: i32,
        trunc: i32,
        k_first: &V4<T>,
        first: &[MatG<T>],
        second: &[MatG<T>],
        initial: &Line<T>,
        final_bar: &Line<T>,
    ) -> Result<Grid<T>> {
        let two: T = lit(2.0);
        let qk = mdot(&self.q_i, &self.wave);
        let qk1 = mdot(&self.q_i, k_first);
        let kk1 = mdot(&self.wave, k_first);
        let mut out = vec![vec![MatG::<T>::zeros(); second.len()]; first.len()];
        for s1 in -2 * trunc..=2 * trunc {
            let s2 = n - s1;
            if s2.abs() > 2 * trunc {
                continue;
            }
            let sf: T = lit(s1 as f64);
            let q_mid = axpy(&axpy(&self.q_i, sf, &self.wave), -T::one(), k_first);
            // q_mid² − m*² without the O(m²) cancellation
            let off = two * sf * qk - two * qk1 - two * sf * kk1;
            let mid = self.line(&q_mid, trunc)?;
            let mid_bar = mid.barred(&self.alg);
            let v1: Vec<_> = first
                .iter()
                .map(|e| vertex(&mid_bar, e, initial, s1))
                .collect();
            if v1.iter().all(Option::is_none) {
                continue;
            }
            let v2: Vec<_> = second
                .iter()
                .map(|e| vertex(final_bar, e, &mid, s2))
                .collect();
            if v2.iter().all(Option::is_none) {
                continue;
            }
            self.guard.check(s1, off.to_f64())?;
            if off == T::zero() || !off.is_finite() {
                return Err(Error::Resonance {
                    n1: s1,
                    offshell: off.to_f64(),
                    guard: 0.0,
                });
            }
            let p_mid = self.free_momentum(&q_mid)?;
            let mut prop = self.alg.slash_components(&p_mid);
            for d in 0..4 {
                prop[(d, d)] += Complex::new(self.mass, T::zero());
            }
            let prop = prop * Complex::new(off.inv(), T::zero());
            for (a, m1) in v1.iter().enumerate() {
                let Some(m1) = m1 else { continue };
                let right = prop * m1;
                for (b, m2) in v2.iter().enumerate() {
                    if let Some(m2) = m2 {
                        out[a][b] += m2 * right;
                    }
                }
            }
        }
        Ok(out)
    }

    fn matrices_at(
        &self,
        kin: &Kin<T>,
        s1: &[MatG<T>],
        s2: &[MatG<T>],
        trunc: i32,
    ) -> Result<Grid<T>> {
        let initial = self.line(&self.q_i, trunc)?;
        let final_bar = self.line(&kin.q_f, trunc)?.barred(&self.alg);
        let a = self.ordering(kin.n, trunc, &kin.k1, s1, s2, &initial, &final_bar)?;
        let b = self.ordering(kin.n, trunc, &kin.k2, s2, s1, &initial, &final_bar)?;
        let minus_i = Complex::new(T::zero(), -T::one());
        Ok((0..s1.len())
            .map(|i| {
                (0..s2.len())
                    .map(|j| (a[i][j] + b[j][i]) * minus_i)
                    .collect()
            })
            .collect())
    }

    fn amplitudes(
        &self,
        eng: &AmplitudeEngine,
        spec: &PairSpec,
        v1: &[VertexVector],
        v2: &[VertexVector],
    ) -> Result<AmplitudeSet> {
        let kin = self.solve(spec)?;
        let slashed = |vs: &[VertexVector], f: &Frame<T>, k: &V4<T>| -> Vec<MatG<T>> {
            vs.iter()
                .map(|v| self.alg.slash_complex(&f.vertex_vector(v, k)))
                .collect()
        };
        let s1 = slashed(v1, &kin.frames[0], &kin.k1);
        let s2 = slashed(v2, &kin.frames[1], &kin.k2);
        let norm = |g: &Grid<T>| -> T {
            let mut acc = T::zero();
            for m in g.iter().flatten() {
                acc += frobenius(m).powi(2);
            }
            acc.sqrt()
        };

        let st = &self.settings;
        let mut trunc = st.initial_truncation;
        let mut prev = self.matrices_at(&kin, &s1, &s2, trunc)?;
        let mut change = f64::INFINITY;
        while trunc < st.max_truncation {
            let next_trunc = (2 * trunc).min(st.max_truncation);
            let next = self.matrices_at(&kin, &s1, &s2, next_trunc)?;
            let mut diff = T::zero();
            for (a, b) in prev.iter().flatten().zip(next.iter().flatten()) {
                diff += frobenius(&(a - b)).powi(2);
            }
            let scale = norm(&next);
            change = if scale == T::zero() {
                0.0
            } else {
                diff.sqrt().quo(scale).to_f64()
            };
            trunc = next_trunc;
            prev = next;
            if change < st.tolerance {
                return Ok(self.sandwiched(eng, &kin, &prev, trunc, change));
            }
        }
        Err(Error::Convergence {
            what: format!("Floquet harmonic sum at |ñ| ≤ {trunc}"),
            achieved: change,
            requested: st.tolerance,
        })
    }

    fn single_emission(&self, n: i32, angles: Angles) -> Result<SingleEmission> {
        if n < 1 {
            return Err(Error::Domain(format!("absorbed quanta n = {n} must be >= 1")));
        }
        let nf: T = lit(n as f64);
        let frame = Frame::new(angles);
        let total = axpy(&self.q_i, nf, &self.wave);
        let energy = (nf * mdot(&self.q_i, &self.wave)).quo(mdot(&total, &frame.null(T::one())));
        let k = frame.null(energy);
        let q_f = axpy(&total, -T::one(), &k);
        let eps: Vec<MatG<T>> = Helicity::BOTH
            .iter()
            .map(|h| self.alg.slash_complex(&frame.vertex_vector(&VertexVector::Emitted(*h), &k)))
            .collect();
        let at = |trunc: i32| -> Result<Vec<MatG<T>>> {
            let initial = self.line(&self.q_i, trunc)?;
            let final_bar = self.line(&q_f, trunc)?.barred(&self.alg);
            Ok(eps
                .iter()
                .map(|e| vertex(&final_bar, e, &initial, n).unwrap_or_else(MatG::<T>::zeros))
                .collect())
        };
        let st = &self.settings;
        let mut trunc = st.initial_truncation;
        let mut prev = at(trunc)?;
        let mut change = f64::INFINITY;
        while trunc < st.max_truncation {
            trunc = (2 * trunc).min(st.max_truncation);
            let next = at(trunc)?;
            let (mut diff, mut scale) = (T::zero(), T::zero());
            for (a, b) in prev.iter().zip(&next) {
                diff += frobenius(&(a - b)).powi(2);
                scale += frobenius(b).powi(2);
            }
            change = if scale == T::zero() { 0.0 } else { diff.quo(scale).sqrt().to_f64() };
            prev = next;
            if change < st.tolerance {
                let p_i = self.free_momentum(&self.q_i)?;
                let p_f = self.free_momentum(&q_f)?;
                let ui = [0, 1].map(|r| self.alg.spinor_components(&p_i, self.mass, r));
                let uf = [0, 1].map(|r| {
                    self.alg.adjoint_spinor(&self.alg.spinor_components(&p_f, self.mass, r))
                });
                let amplitudes = [0, 1].map(|ri| {
                    [0, 1].map(|rf| {
                        [0, 1].map(|h| {
                            let a = sandwich(&uf[rf], &prev[h], &ui[ri]);
                            C64::new(a.re.to_f64(), a.im.to_f64())
                        })
                    })
                });
                return Ok(SingleEmission {
                    n,
                    photon: lower(&k),
                    q_final: lower(&q_f),
                    truncation: trunc,
                    amplitudes,
                });
            }
        }
        Err(Error::Convergence {
            what: format!("one-photon harmonic sum at |ñ| ≤ {trunc}"),
            achieved: change,
            requested: st.tolerance,
        })
    }

    fn sandwiched(
        &self,
        eng: &AmplitudeEngine,
        kin: &Kin<T>,
        grid: &Grid<T>,
        truncation: i32,
        truncation_change: f64,
    ) -> AmplitudeSet {
        let p_i = self
            .free_momentum(&self.q_i)
            .expect("checked by line construction");
        let p_f = self
            .free_momentum(&kin.q_f)
            .expect("checked by line construction");
        let ui = [0, 1].map(|r| self.alg.spinor_components(&p_i, self.mass, r));
        let uf = [0, 1].map(|r| {
            self.alg
                .adjoint_spinor(&self.alg.spinor_components(&p_f, self.mass, r))
        });
        let values = grid
            .iter()
            .map(|row| {
                row.iter()
                    .map(|m| {
                        [0, 1].map(|ri| {
                            [0, 1].map(|rf| {
                                let a = sandwich(&uf[rf], m, &ui[ri]);
                                C64::new(a.re.to_f64(), a.im.to_f64())
                            })
                        })
                    })
                    .collect()
            })
            .collect();
        AmplitudeSet {
            kinematics: kin.to_f64(eng),
            values,
            truncation,
            truncation_change,
        }
    }
}
