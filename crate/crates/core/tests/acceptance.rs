//! Acceptance suite: one PASS/FAIL line per criterion, tolerances pinned below.

mod common;

use std::f64::consts::PI;
use std::process::Command as Process;
use std::time::{Duration, Instant};

use common::perturbative as pt;
use felpair::emission_rate::{Aperture, EmissionModel, QuadratureSettings};
use felpair::entanglement::{density_matrix, kron, Basis, CMat4, TwoPhotonDensityMatrix};
use felpair::kinematics::{
    derive_beam_quantities, quasi_momentum, solve_pair_kinematics, zenith_from_gamma_tan,
    DerivedBeamQuantities, Direction, FelParameters, FourVector,
};
use felpair::microbunch::{f_mb_at_phase, phase_difference, pulse_rates, MicrobunchProfile};
use felpair::precision::Precision;
use felpair::scaling_analysis::{log_spaced, scan_u_pair, ScalingProbe};
use felpair::sweep::commands::aperture_average;
use felpair::sweep::Config;
use felpair::units::{ELECTRON_MASS_EV, FINE_STRUCTURE, HBAR_EV_S, SPEED_OF_LIGHT};
use felpair::volkov::dirac::sandwich;
use felpair::volkov::photon::{cdot, complexify, conj};
use felpair::volkov::{
    AmplitudeEngine, AmplitudeSet, Angles, DiracAlgebra, FloquetSettings, Helicity,
    HelicityAmplitudeBlock, PairSpec, PhotonMode, VertexVector, C64,
};
use nalgebra::Matrix2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// Pinned tolerances.
const ALGEBRA_TOL: f64 = 1e-14;
const BOOST_TOL: f64 = 1e-12;
const MASS_SHELL_TOL: f64 = 1e-10;
const CONSTRAINT_TOL: f64 = 1e-12;
const WARD_TOL: f64 = 1e-10;
const BOSE_TOL: f64 = 1e-10;
const TRUNCATION_TOL: f64 = 1e-8;
const WEAK_FIELD_TOL: f64 = 0.05;
const ENTANGLEMENT_TOL: f64 = 1e-12;
const CONCURRENCE_BAND: f64 = 0.05;
const IMAGINARY_TOL: f64 = 1e-10;
const AZIMUTH_TOL: f64 = 1e-10;
const PHASE_TOL: f64 = 1e-12;
const F_MB_REFERENCE: f64 = 2.46e16;
/// The reference F_MB is quoted to three digits; N_i = ⌊N_e/ΣN_j⌋ = 50
/// gives 2.42×10¹⁶, so "≈" is pinned at 2%.
const F_MB_REL_TOL: f64 = 0.02;
const R_SE_REFERENCE: f64 = 6e-21;
const R_SE_FACTOR: f64 = 3.0;
const NORMALISATION_SPREAD: f64 = 0.10;
const EXPONENT_BAND: f64 = 0.15;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn run(id: u32, name: &str, budget: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let t = Instant::now();
    let o = f();
    let el = t.elapsed();
    let within = el <= budget;
    let pass = o.pass && within;
    println!(
        "[{}] criterion {id:>2}: {name} | {}{} | {:.1} s of {} s",
        if pass { "PASS" } else { "FAIL" },
        o.detail,
        if within { "" } else { " | over time budget" },
        el.as_secs_f64(),
        budget.as_secs()
    );
    pass
}

fn lcls() -> DerivedBeamQuantities {
    derive_beam_quantities(&FelParameters::lcls()).unwrap()
}

fn beam_with_k(k: f64) -> DerivedBeamQuantities {
    let mut p = FelParameters::lcls();
    let d0 = derive_beam_quantities(&p).unwrap();
    p.undulator_peak_field *= k / d0.undulator_parameter;
    p.fundamental_wavelength = None;
    derive_beam_quantities(&p).unwrap()
}

fn dd_engine() -> AmplitudeEngine {
    let s = FloquetSettings { precision: Precision::DoubleDouble, ..Default::default() };
    AmplitudeEngine::new(&lcls(), s).unwrap()
}

fn amplitude_probes() -> Vec<PairSpec> {
    let kappa = lcls().wave_energy();
    [
        (2.9, 0.0, 2.7, 0.0, 0.3),
        (2.6, 1.0, 2.95, 3.0, 0.2),
        (2.8, 0.5, 2.8, 0.5, 0.33),
        (1.08, 0.0, 1.08, 0.0, 0.0125),
    ]
    .iter()
    .map(|&(z1, a1, z2, a2, f)| PairSpec {
        n: 1,
        k1_energy: f * kappa,
        angles1: Angles::new(z1, a1),
        angles2: Angles::new(z2, a2),
    })
    .collect()
}

fn max_abs(set: &AmplitudeSet) -> f64 {
    set.values.iter().flatten().flatten().flatten().map(|a| a.norm()).fold(0.0, f64::max)
}

fn flat(b: &HelicityAmplitudeBlock) -> Vec<C64> {
    b.amplitudes.iter().flatten().flatten().flatten().copied().collect()
}

fn criterion_1() -> Outcome {
    let d = DiracAlgebra::new();
    let clifford = d.anticommutator_defect();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut spinor: f64 = 0.0;
    for _ in 0..200 {
        let s = [0; 3].map(|_| rng.random_range(-2.0..2.0f64));
        let p = FourVector::new((1.0 + s.iter().map(|x| x * x).sum::<f64>()).sqrt(), s[0], s[1], s[2]);
        let u = [d.spinor(p, 1.0, 0), d.spinor(p, 1.0, 1)];
        for r in 0..2 {
            for q in 0..2 {
                let n = sandwich(&d.adjoint_spinor(&u[r]), &d.identity, &u[q]);
                let want = if r == q { 2.0 } else { 0.0 };
                spinor = spinor.max((n - C64::new(want, 0.0)).norm() / 2.0);
            }
        }
    }
    let mut transverse: f64 = 0.0;
    for _ in 0..200 {
        let a = Angles::new(rng.random_range(0.0..PI), rng.random_range(0.0..2.0 * PI));
        for h in Helicity::BOTH {
            let m = PhotonMode::new(1.0, a, h);
            transverse = transverse.max(cdot(&m.polarization, &complexify(m.momentum)).norm());
            let n = cdot(&m.polarization, &conj(&m.polarization));
            transverse = transverse.max((n + C64::new(1.0, 0.0)).norm());
        }
    }
    let worst = clifford.max(spinor).max(transverse);
    outcome(
        worst < ALGEBRA_TOL,
        format!("Clifford {clifford:.1e}, spinor norm {spinor:.1e}, ε·k and ε·ε*+1 {transverse:.1e} (tol {ALGEBRA_TOL:.0e})"),
    )
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut boost: f64 = 0.0;
    for _ in 0..10_000 {
        let v = FourVector::new(
            rng.random_range(-5.0..5.0),
            rng.random_range(-5.0..5.0),
            rng.random_range(-5.0..5.0),
            rng.random_range(-5.0..5.0),
        );
        let dir = Direction::from_angles(rng.random_range(0.0..PI), rng.random_range(0.0..2.0 * PI));
        let b = dir.0.map(|x| x * rng.random_range(0.0..0.999));
        let back = v.boost(b).boost(b.map(|x| -x));
        for i in 0..4 {
            boost = boost.max((back[i] - v[i]).abs() / v.max_abs().max(1.0));
        }
    }
    let d = lcls();
    let m = d.electron_mass;
    let ms2 = d.effective_mass * d.effective_mass;
    let mut shell: f64 = 0.0;
    let mut de: f64 = 0.0;
    for _ in 0..1000 {
        let s = [0; 3].map(|_| rng.random_range(-1.0e5..1.0e5f64));
        let p = FourVector::new((m * m + s.iter().map(|x| x * x).sum::<f64>()).sqrt(), s[0], s[1], s[2]);
        let q = quasi_momentum(p, &d).unwrap();
        shell = shell.max((q.norm_sqr() - ms2).abs() / ms2);
        let n = rng.random_range(1..4);
        let k1 = FourVector::lightlike(
            rng.random_range(0.001..0.3) * d.wave_energy(),
            Direction::from_angles(rng.random_range(0.0..PI), rng.random_range(0.0..2.0 * PI)),
        );
        let dir2 = Direction::from_angles(rng.random_range(0.0..PI), rng.random_range(0.0..2.0 * PI));
        if let Ok(pk) = solve_pair_kinematics(n, k1, dir2, &d) {
            let q0 = pk.q_initial[0];
            let (r, scale) = pk.linear_residual();
            de = de.max(pk.mass_shell_residual().abs() / (q0 * q0)).max(r.abs() / scale);
        }
    }
    outcome(
        boost < BOOST_TOL && shell < MASS_SHELL_TOL && de < CONSTRAINT_TOL,
        format!("boost round trip {boost:.1e} (tol {BOOST_TOL:.0e}), m*² {shell:.1e} (tol {MASS_SHELL_TOL:.0e}), DE(n) {de:.1e} (tol {CONSTRAINT_TOL:.0e})"),
    )
}

fn criterion_3() -> Outcome {
    let eng = dd_engine();
    let hel = Helicity::BOTH.map(VertexVector::Emitted);
    let mut ward: f64 = 0.0;
    let mut bose: f64 = 0.0;
    let mut trunc: f64 = 0.0;
    for spec in amplitude_probes() {
        let phys = max_abs(&eng.amplitudes(&spec, &hel, &hel).unwrap());
        let kin = eng.kinematics(&spec).unwrap();
        let w1 = max_abs(&eng.amplitudes(&spec, &[VertexVector::Momentum], &hel).unwrap());
        let w2 = max_abs(&eng.amplitudes(&spec, &hel, &[VertexVector::Momentum]).unwrap());
        ward = ward.max(w1 / (phys * kin.k1[0])).max(w2 / (phys * kin.k2[0]));

        let (kin, a) = eng.helicity_block(&spec).unwrap();
        let swapped = PairSpec {
            n: spec.n,
            k1_energy: kin.k2[0],
            angles1: spec.angles2,
            angles2: spec.angles1,
        };
        let (_, b) = eng.helicity_block(&swapped).unwrap();
        let scale = flat(&a).iter().map(|x| x.norm()).fold(0.0, f64::max);
        for ri in 0..2 {
            for rf in 0..2 {
                for h1 in 0..2 {
                    for h2 in 0..2 {
                        let d = a.amplitudes[ri][rf][h1][h2] - b.amplitudes[ri][rf][h2][h1];
                        bose = bose.max(d.norm() / scale);
                    }
                }
            }
        }

        let wide = FloquetSettings {
            precision: Precision::DoubleDouble,
            initial_truncation: a.truncation,
            max_truncation: 2 * a.truncation,
            ..Default::default()
        };
        let (_, c) = AmplitudeEngine::new(&lcls(), wide).unwrap().helicity_block(&spec).unwrap();
        let (mut diff, mut norm) = (0.0, 0.0);
        for (x, y) in flat(&a).iter().zip(flat(&c)) {
            diff += (x - y).norm_sqr();
            norm += y.norm_sqr();
        }
        trunc = trunc.max((diff / norm).sqrt()).max(a.truncation_change);
    }
    outcome(
        ward < WARD_TOL && bose < BOSE_TOL && trunc < TRUNCATION_TOL,
        format!("double-double: Ward {ward:.1e} (tol {WARD_TOL:.0e}), Bose {bose:.1e} (tol {BOSE_TOL:.0e}), N→2N {trunc:.1e} (tol {TRUNCATION_TOL:.0e})"),
    )
}

fn criterion_4() -> Outcome {
    let d = beam_with_k(1e-3);
    let eng = AmplitudeEngine::new(&d, FloquetSettings::default()).unwrap();
    let kappa = d.wave_energy();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let a1 = Angles::new(rng.random_range(0.2..3.0), rng.random_range(0.0..2.0 * PI));
        let a2 = Angles::new(rng.random_range(0.2..3.0), rng.random_range(0.0..2.0 * PI));
        let w1 = kappa * rng.random_range(0.05..0.45);
        let spec = PairSpec { n: 1, k1_energy: w1, angles1: a1, angles2: a2 };
        let (_, b) = eng.helicity_block(&spec).unwrap();
        let orc = pt::oracle_channels(
            d.electron_mass,
            kappa,
            d.field_strength,
            w1,
            (a1.zenith, a1.azimuth),
            (a2.zenith, a2.azimuth),
        );
        let total: f64 = orc.iter().flatten().sum();
        worst = worst.max((b.summed_square() / total - 1.0).abs());
    }
    outcome(worst < WEAK_FIELD_TOL, format!("K = 1e-3, 20 points, worst |Σ|A|²/oracle − 1| = {worst:.2e} (tol {WEAK_FIELD_TOL})"))
}

fn random_state(rng: &mut ChaCha8Rng) -> TwoPhotonDensityMatrix {
    let mut m = CMat4::zeros();
    for _ in 0..rng.random_range(1..4) {
        let psi: [C64; 4] =
            std::array::from_fn(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        let w = rng.random_range(0.0..1.0);
        for a in 0..4 {
            for b in 0..4 {
                m[(a, b)] += psi[a] * psi[b].conj() * w;
            }
        }
    }
    TwoPhotonDensityMatrix::from_unnormalized(m, Basis::Helicity).unwrap()
}

fn random_unitary(rng: &mut ChaCha8Rng) -> Matrix2<C64> {
    let [al, be, ga] = [0; 3].map(|_| rng.random_range(0.0..2.0 * PI));
    let th = rng.random_range(0.0..PI / 2.0);
    let p = C64::from_polar(1.0, al);
    Matrix2::new(
        p * C64::from_polar(th.cos(), be),
        p * C64::from_polar(th.sin(), ga),
        -p * C64::from_polar(th.sin(), -ga),
        p * C64::from_polar(th.cos(), -be),
    )
}

fn criterion_5() -> Outcome {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let z = C64::new(0.0, 0.0);
    let bell = TwoPhotonDensityMatrix::pure([C64::new(s, 0.0), z, z, C64::new(s, 0.0)], Basis::Helicity)
        .unwrap()
        .report();
    let product = TwoPhotonDensityMatrix::pure([z, C64::new(1.0, 0.0), z, z], Basis::Helicity)
        .unwrap()
        .report();
    let mut closed = (bell.concurrence - 1.0).abs().max((bell.negativity - 0.5).abs());
    closed = closed.max((bell.entanglement_of_formation - 1.0).abs());
    closed = closed.max(product.concurrence).max(product.negativity).max(product.entanglement_of_formation);
    for i in 0..=20 {
        let p = i as f64 / 20.0;
        let mut m = CMat4::identity() * C64::new(0.25 * (1.0 - p), 0.0);
        for a in [0, 3] {
            for b in [0, 3] {
                m[(a, b)] += C64::new(0.5 * p, 0.0);
            }
        }
        let r = TwoPhotonDensityMatrix::new(m, Basis::Helicity).unwrap().report();
        let c = (1.5 * p - 0.5).max(0.0);
        closed = closed.max((r.concurrence - c).abs()).max((r.negativity - 0.5 * c).abs());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let mut lu: f64 = 0.0;
    for _ in 0..100 {
        let rho = random_state(&mut rng);
        let u = kron(&random_unitary(&mut rng), &random_unitary(&mut rng));
        let rot = TwoPhotonDensityMatrix::from_unnormalized(u * rho.matrix * u.adjoint(), Basis::Helicity).unwrap();
        lu = lu.max((rho.report().concurrence - rot.report().concurrence).abs());
    }
    let mut inconsistent = 0;
    for _ in 0..100 {
        let r = random_state(&mut rng).report();
        let ppt_agrees = (r.concurrence > 1e-9) == (r.negativity > 1e-9);
        let bound = 2.0 * r.negativity <= r.concurrence + ENTANGLEMENT_TOL;
        let eof = felpair::entanglement::eof_from_concurrence(r.concurrence);
        if !(ppt_agrees && bound && (r.entanglement_of_formation - eof).abs() < ENTANGLEMENT_TOL) {
            inconsistent += 1;
        }
    }
    outcome(
        closed < ENTANGLEMENT_TOL && lu < ENTANGLEMENT_TOL && inconsistent == 0,
        format!("Bell/product/Werner {closed:.1e}, local unitaries {lu:.1e} (tol {ENTANGLEMENT_TOL:.0e}), N/EoF inconsistent states {inconsistent}/100"),
    )
}

fn criterion_6() -> Outcome {
    let cfg = Config::default();
    let d = lcls();
    let m = EmissionModel::new(&d, cfg.floquet).unwrap();
    let omega1 = d.fundamental_angular_frequency / 3.0;
    let mut pass = true;
    let mut parts = Vec::new();
    for (g, want) in [(0.51, 0.90), (0.60, 0.99), (0.68, 0.89)] {
        let ap = Aperture::from_gamma_tan(g, 0.0, cfg.aperture.radius_gamma_tan, &d);
        match aperture_average(&m, &cfg.channels, omega1, &ap, cfg.aperture.order) {
            Ok((rho, _)) => {
                let c = rho.report().concurrence;
                let im = rho.max_imaginary();
                pass &= (c - want).abs() <= CONCURRENCE_BAND && im < IMAGINARY_TOL;
                parts.push(format!("γtanZ {g}: C = {c:.3} (want {want} ± {CONCURRENCE_BAND}), max|Im ρ| {im:.1e}"));
            }
            Err(e) => {
                pass = false;
                parts.push(format!("γtanZ {g}: {e}"));
            }
        }
    }
    outcome(pass, parts.join("; "))
}

fn criterion_7() -> Outcome {
    let s = FloquetSettings { precision: Precision::DoubleDouble, ..Default::default() };
    let d = lcls();
    let m = EmissionModel::new(&d, s).unwrap();
    let kappa = d.wave_energy();
    let mut rate_dev: f64 = 0.0;
    let mut c_dev: f64 = 0.0;
    for &(z1, z2, diff, f) in &[(2.8, 2.6, 1.3, 0.1), (1.08, 1.08, 0.0, 0.0125), (2.0, 2.9, 4.0, 0.2)] {
        let mut reference: Option<(f64, f64)> = None;
        for a1 in [0.0, 0.7, 2.3, 4.1] {
            let p = m
                .channel(1, f * kappa, Angles::new(z1, a1), Angles::new(z2, a1 + diff))
                .unwrap()
                .unwrap();
            let c = density_matrix(&p.block).unwrap().report().concurrence;
            match reference {
                None => reference = Some((p.rate.rate, c)),
                Some((r0, c0)) => {
                    rate_dev = rate_dev.max((p.rate.rate / r0 - 1.0).abs());
                    c_dev = c_dev.max((c - c0).abs());
                }
            }
        }
    }
    outcome(
        rate_dev < AZIMUTH_TOL && c_dev < AZIMUTH_TOL,
        format!("double-double, common azimuth shifts: rate {rate_dev:.1e} relative, C {c_dev:.1e} (tol {AZIMUTH_TOL:.0e})"),
    )
}

fn criterion_8(r_se: Option<f64>) -> Outcome {
    let d = lcls();
    let phase = [0.0, 0.1, 0.5, 0.9]
        .iter()
        .map(|f| (phase_difference(0.0, 0.0, f * d.wave_energy(), &d) - 2.0 * PI).abs())
        .fold(0.0, f64::max);
    let p = MicrobunchProfile::lcls();
    let f = f_mb_at_phase(&p, 2.0 * PI);
    let mut pass = phase < PHASE_TOL && (f / F_MB_REFERENCE - 1.0).abs() < F_MB_REL_TOL;
    let mut detail = format!(
        "|Δφ(0,0,·) − 2π| {phase:.1e} (tol {PHASE_TOL:.0e}), F_MB = {f:.4e} with N_i = {} (ref {F_MB_REFERENCE:.2e} ± {}%)",
        p.section_count(),
        F_MB_REL_TOL * 100.0
    );
    for (label, r) in [("reference", Some(R_SE_REFERENCE)), ("computed", r_se)] {
        let Some(r) = r else { continue };
        let rates = pulse_rates(r, &p, 2.0 * PI);
        let exact = rates.synchrotron == p.total_electrons as f64 * r;
        let ratio_ok = (7e6..=7e7).contains(&rates.enhancement_ratio);
        pass &= exact && ratio_ok;
        detail += &format!(
            "; {label} R_SE {r:.2e}: R_FEL/R_Sync = {:.3e}, R_Sync = N_e·R_SE exact: {exact}",
            rates.enhancement_ratio
        );
    }
    outcome(pass, detail)
}

/// Independent lab-frame pair density for K ≪ 1: leading-order amplitude,
/// explicit phase space, Lorentz boost of the photon momenta with a
/// numerical solid-angle Jacobian, and the transit time from SI inputs.
fn oracle_u_pair(
    params: &FelParameters,
    omega1_lab: f64,
    lab1: (f64, f64),
    lab2: (f64, f64),
) -> f64 {
    let m = ELECTRON_MASS_EV;
    let gamma = params.electron_energy / m;
    let one_minus_beta = 1.0 / (gamma * gamma * (1.0 + (1.0 - 1.0 / (gamma * gamma)).sqrt()));
    let beta = 1.0 - one_minus_beta;
    let hbar_c = HBAR_EV_S * SPEED_OF_LIGHT;
    let k_u = 2.0 * PI / params.undulator_period_length;
    let kappa = gamma * k_u * hbar_c;
    let k_param = 1.602176634e-19 * params.undulator_peak_field
        / (9.1093837015e-31 * SPEED_OF_LIGHT * k_u);
    let ea = m * k_param;
    let transit = params.undulator_period_number as f64 * params.undulator_period_length
        / (gamma * beta * SPEED_OF_LIGHT)
        / HBAR_EV_S;
    // lab → EF: ω' = γω(1 − β cos θ), tan θ' = sin θ / (γ(cos θ − β))
    let to_ef = |theta: f64| {
        let one_minus_cos = 2.0 * (0.5 * theta).sin().powi(2);
        let doppler = gamma * (one_minus_beta + beta * one_minus_cos);
        let cos_minus_beta = one_minus_beta - one_minus_cos;
        (doppler, theta.sin().atan2(gamma * cos_minus_beta))
    };
    let jacobian = |theta: f64| {
        let h = 1e-6 * theta;
        let (_, tp) = to_ef(theta + h);
        let (_, tm) = to_ef(theta - h);
        let (_, t0) = to_ef(theta);
        t0.sin() * (tp - tm) / (2.0 * h) / theta.sin()
    };
    let (r1, t1) = to_ef(lab1.0);
    let (_, t2) = to_ef(lab2.0);
    let w1 = omega1_lab * r1;
    let n = |t: f64, a: f64| [1.0, t.sin() * a.cos(), t.sin() * a.sin(), t.cos()];
    let dot = |a: [f64; 4], b: [f64; 4]| a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3];
    let p_i = [m, 0.0, 0.0, 0.0];
    let k = [kappa, 0.0, 0.0, -kappa];
    let k1 = n(t1, lab1.1).map(|x| x * w1);
    let big_p = [0, 1, 2, 3].map(|i| p_i[i] + k[i] - k1[i]);
    let n2 = n(t2, lab2.1);
    let w2 = (dot(p_i, k) - dot(p_i, k1) - dot(k, k1)) / dot(big_p, n2);
    let k2 = n2.map(|x| x * w2);
    let amp: f64 = pt::oracle_channels(m, kappa, ea, w1, (t1, lab1.1), (t2, lab2.1))
        .iter()
        .flatten()
        .sum();
    let e2 = 4.0 * PI * FINE_STRUCTURE;
    let rate_ef = e2 * e2 * 0.5 * amp * w1 * w2 * w2
        / ((2.0 * PI).powi(5) * 16.0 * m * dot(big_p, k2).abs());
    // dω′ = dω·(ω′/ω), dΩ′ = J dΩ
    transit * rate_ef * r1 * jacobian(lab1.0) * jacobian(lab2.0)
}

fn criterion_9(structure_ok: bool) -> (Outcome, Option<f64>) {
    let cfg = Config::default();
    let d = lcls();
    let m = EmissionModel::new(&d, cfg.floquet).unwrap();
    let window = cfg.detector.window(&cfg.aperture, &cfg.channels, &d);
    let quad = QuadratureSettings { tolerance: 1e-3, initial_order: 1, max_refinements: 3 };
    let r_se = match m.pair_rate_through_detector(&window, &quad) {
        Ok(r) => r.probability,
        Err(e) => return (outcome(false, format!("detector integral failed: {e}")), None),
    };
    let ratio = r_se / R_SE_REFERENCE;
    if (1.0 / R_SE_FACTOR..=R_SE_FACTOR).contains(&ratio) {
        return (
            outcome(true, format!("R_SE = {r_se:.3e}, {ratio:.2}× the reference {R_SE_REFERENCE:.0e}")),
            Some(r_se),
        );
    }
    // Outside the band: the normalisation must be a single constant.
    let mut params = FelParameters::lcls();
    params.undulator_peak_field *= 1e-3 / d.undulator_parameter;
    params.fundamental_wavelength = None;
    let weak = derive_beam_quantities(&params).unwrap();
    let model = EmissionModel::new(&weak, FloquetSettings::default()).unwrap();
    let probes = [
        (0.6, 0.6, 0.0, 1.0 / 3.0),
        (0.51, 0.51, 0.0, 1.0 / 3.0),
        (0.68, 0.68, 0.0, 1.0 / 3.0),
        (0.3, 0.8, 0.5, 0.25),
        (0.8, 0.3, 1.5, 0.2),
        (0.2, 0.9, 3.0, 0.3),
        (1.0, 0.5, 2.0, 0.4),
        (0.45, 0.45, PI, 0.35),
        (0.9, 0.9, 0.7, 0.15),
        (0.1, 0.6, 4.5, 0.3),
        (0.6, 0.2, 5.5, 0.45),
        (0.35, 0.65, 1.0, 0.1),
    ];
    let mut ratios = Vec::new();
    for &(g1, g2, da, f) in &probes {
        let z1 = zenith_from_gamma_tan(g1, &weak);
        let z2 = zenith_from_gamma_tan(g2, &weak);
        let w = f * weak.fundamental_angular_frequency;
        let Ok((u, Some(_))) = model.u_pair(1, w, Angles::new(z1, 0.3), Angles::new(z2, 0.3 + da)) else {
            continue;
        };
        let o = oracle_u_pair(&params, w, (z1, 0.3), (z2, 0.3 + da));
        ratios.push(u / o);
    }
    let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().copied().fold(0.0, f64::max);
    let spread = hi / lo - 1.0;
    let constant_ok = ratios.len() >= 10 && spread < NORMALISATION_SPREAD;
    (
        outcome(
            constant_ok && structure_ok,
            format!(
                "R_SE = {r_se:.3e} is outside {R_SE_FACTOR}× of {R_SE_REFERENCE:.0e}; reported as a single normalisation constant {:.3e}; \
                 library/independent-oracle rate ratio over {} probes in [{lo:.4}, {hi:.4}] (spread {:.1e}, tol {NORMALISATION_SPREAD}); criteria 3-5 pass: {structure_ok}",
                R_SE_REFERENCE / r_se,
                ratios.len(),
                spread
            ),
        ),
        Some(r_se),
    )
}

fn criterion_10() -> Outcome {
    let cfg = Config::default();
    let nominal = cfg.beam.undulator_peak_field * cfg.beam.undulator_period_length;
    let x = log_spaced(0.7 * nominal, 1.4 * nominal, 12);
    let mut pass = true;
    let mut parts = Vec::new();
    for (g, want) in [(0.51, 1.90), (0.60, 2.00), (0.68, 2.10)] {
        match scan_u_pair(&cfg.beam, &ScalingProbe::new(g, 1.0 / 3.0), &x, false, &cfg.floquet) {
            Ok(s) => {
                let e = s.fit.unwrap().exponent;
                pass &= (e - want).abs() <= EXPONENT_BAND;
                parts.push(format!("γtanZ {g}: {e:.3} (want {want} ± {EXPONENT_BAND})"));
            }
            Err(err) => {
                pass = false;
                parts.push(format!("γtanZ {g}: {err}"));
            }
        }
    }
    outcome(pass, format!("12 points over B₀λ_u ∈ [0.7, 1.4]× nominal; {}", parts.join(", ")))
}

fn criterion_11() -> Outcome {
    let tmp = std::env::temp_dir().join(format!("felpair-acceptance-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&tmp);
    std::fs::create_dir_all(&tmp).unwrap();
    let cfg = tmp.join("config.json");
    std::fs::write(
        &cfg,
        r#"{
  "sweep": {
    "frame": "lab",
    "angle_unit": "gamma-tan",
    "axes": [
      { "name": "Z2", "range": [0.3, 0.9], "points": 3 },
      { "name": "A2-A1", "range": [0.0, 3.0], "points": 2 },
      { "name": "B0_lambda_u", "range": [0.035, 0.045], "points": 2, "spacing": "log" }
    ],
    "fixed": { "z1": 0.6 },
    "outputs": ["rate", "concurrence", "density_matrix", "f_mb", "collective_rate"],
    "normalize": true
  },
  "scaling": { "probes": [{ "gamma_tan": 0.6, "energy_fraction": 0.3333333333333333 }], "points": 6 }
}"#,
    )
    .unwrap();
    let verbs = ["rate-map", "concurrence-map", "microbunch-map", "density-matrix", "pair-rates", "scaling"];
    let mut failures = Vec::new();
    let mut compared = 0;
    for verb in verbs {
        let mut outs = Vec::new();
        for workers in ["1", "8"] {
            let dir = tmp.join(format!("{verb}-{workers}"));
            let status = Process::new(env!("CARGO_BIN_EXE_felpair"))
                .args(["--config", cfg.to_str().unwrap(), "--out", dir.to_str().unwrap(), "--workers", workers, verb])
                .output()
                .unwrap()
                .status;
            if !status.success() {
                failures.push(format!("{verb} exited {status}"));
            }
            let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(&dir)
                .map(|r| {
                    r.filter_map(|e| e.ok().map(|e| e.path()))
                        .filter(|p| !p.to_string_lossy().ends_with(".timing.json"))
                        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
                        .collect()
                })
                .unwrap_or_default();
            files.sort();
            outs.push(files);
        }
        if outs[0].is_empty() || outs[0] != outs[1] {
            failures.push(format!("{verb} differs"));
        }
        compared += outs[0].len();
    }
    let _ = std::fs::remove_dir_all(&tmp);
    outcome(
        failures.is_empty(),
        if failures.is_empty() {
            format!("all six verbs, {compared} output files byte-identical at 1 and 8 workers")
        } else {
            failures.join(", ")
        },
    )
}

fn main() {
    let min = |m: u64| Duration::from_secs(60 * m);
    let mut results = Vec::new();
    results.push(run(1, "Dirac algebra self-tests", Duration::from_secs(1), criterion_1));
    results.push(run(2, "kinematics properties", Duration::from_secs(10), criterion_2));
    let c3 = run(3, "amplitude structure", min(2), criterion_3);
    let c4 = run(4, "weak-field oracle", min(5), criterion_4);
    let c5 = run(5, "entanglement measures", Duration::from_secs(30), criterion_5);
    results.extend([c3, c4, c5]);
    results.push(run(6, "aperture-averaged concurrence", min(10), criterion_6));
    results.push(run(7, "azimuthal reduction", min(2), criterion_7));
    let mut r_se = None;
    results.push(run(9, "single-electron pair rate", min(20), || {
        let (o, r) = criterion_9(c3 && c4 && c5);
        r_se = r;
        o
    }));
    results.push(run(8, "microbunch chain", Duration::from_secs(1), || criterion_8(r_se)));
    results.push(run(10, "scaling exponents", min(30), criterion_10));
    results.push(run(11, "determinism across worker counts", min(10), criterion_11));
    let passed = results.iter().filter(|&&p| p).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}
