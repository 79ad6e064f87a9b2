//! Structural identities of the double Compton amplitude.

use felpair::kinematics::{derive_beam_quantities, DerivedBeamQuantities, FelParameters};
use felpair::precision::Precision;
use felpair::volkov::{
    AmplitudeEngine, AmplitudeSet, Angles, Background, FloquetSettings, Helicity, PairSpec,
    VertexVector,
};

fn lcls() -> DerivedBeamQuantities {
    derive_beam_quantities(&FelParameters::lcls()).unwrap()
}

fn engine(precision: Precision) -> AmplitudeEngine {
    let settings = FloquetSettings { precision, ..Default::default() };
    AmplitudeEngine::new(&lcls(), settings).unwrap()
}

fn probes() -> Vec<PairSpec> {
    let kappa = lcls().volkov_wave_vector[0];
    [(2.9, 0.0, 2.7, 0.0, 0.3), (2.6, 1.0, 2.95, 3.0, 0.2), (2.8, 0.5, 2.8, 0.5, 0.33)]
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

#[test]
fn ward_identity_on_both_legs_in_double_double() {
    let eng = engine(Precision::DoubleDouble);
    let hel = Helicity::BOTH.map(VertexVector::Emitted);
    for spec in probes() {
        let phys = max_abs(&eng.amplitudes(&spec, &hel, &hel).unwrap());
        let kin = eng.kinematics(&spec).unwrap();
        let w1 = max_abs(&eng.amplitudes(&spec, &[VertexVector::Momentum], &hel).unwrap());
        let w2 = max_abs(&eng.amplitudes(&spec, &hel, &[VertexVector::Momentum]).unwrap());
        assert!(w1 / (phys * kin.k1[0]) < 1e-10, "{spec:?}: {:e}", w1 / (phys * kin.k1[0]));
        assert!(w2 / (phys * kin.k2[0]) < 1e-10, "{spec:?}: {:e}", w2 / (phys * kin.k2[0]));
    }
}

#[test]
fn ward_residual_in_double_reflects_ordering_cancellation() {
    // the two orderings cancel to k·p/m² ~ 1e-7, so f64 leaves ~1e-8
    let eng = engine(Precision::Double);
    let hel = Helicity::BOTH.map(VertexVector::Emitted);
    let spec = probes()[0];
    let phys = max_abs(&eng.amplitudes(&spec, &hel, &hel).unwrap());
    let w1 = max_abs(&eng.amplitudes(&spec, &[VertexVector::Momentum], &hel).unwrap());
    let r = w1 / (phys * spec.k1_energy);
    assert!(r < 1e-6 && r > 1e-14, "{r:e}");
}

fn bose_defect(precision: Precision) -> f64 {
    let eng = engine(precision);
    let mut worst: f64 = 0.0;
    for spec in probes() {
        let (kin, a) = eng.helicity_block(&spec).unwrap();
        let swapped = PairSpec {
            n: spec.n,
            k1_energy: kin.k2[0],
            angles1: spec.angles2,
            angles2: spec.angles1,
        };
        let (_, b) = eng.helicity_block(&swapped).unwrap();
        let scale = a.amplitudes.iter().flatten().flatten().flatten().map(|x| x.norm()).fold(0.0, f64::max);
        for ri in 0..2 {
            for rf in 0..2 {
                for h1 in 0..2 {
                    for h2 in 0..2 {
                        let d = a.amplitudes[ri][rf][h1][h2] - b.amplitudes[ri][rf][h2][h1];
                        worst = worst.max(d.norm() / scale);
                    }
                }
            }
        }
    }
    worst
}

#[test]
fn bose_exchange_symmetry() {
    let d = bose_defect(Precision::Double);
    let dd = bose_defect(Precision::DoubleDouble);
    println!("bose defect: double {d:e}, double-double {dd:e}");
    assert!(dd < 1e-10);
}

#[test]
fn truncation_doubling_is_converged() {
    // in double precision last-bit differences between truncations are
    // amplified to ~1e-8 by the ordering cancellation; double-double
    // isolates the truncation error itself
    let dd = FloquetSettings { precision: Precision::DoubleDouble, ..Default::default() };
    for spec in probes() {
        let base = AmplitudeEngine::new(&lcls(), dd).unwrap();
        let (_, a) = base.helicity_block(&spec).unwrap();
        assert!(a.truncation_change < 1e-8);
        let settings = FloquetSettings {
            initial_truncation: a.truncation,
            max_truncation: 2 * a.truncation,
            ..dd
        };
        let wide = AmplitudeEngine::new(&lcls(), settings).unwrap();
        let (_, b) = wide.helicity_block(&spec).unwrap();
        assert_eq!(b.truncation, 2 * a.truncation);
        let mut diff = 0.0;
        let mut norm = 0.0;
        let flat = |x: &[[[[felpair::volkov::C64; 2]; 2]; 2]; 2]| {
            x.iter().flatten().flatten().flatten().copied().collect::<Vec<_>>()
        };
        for (x, y) in flat(&a.amplitudes).iter().zip(flat(&b.amplitudes)) {
            diff += (x - y).norm_sqr();
            norm += y.norm_sqr();
        }
        assert!((diff / norm).sqrt() < 1e-8, "{:e}", (diff / norm).sqrt());
    }
}

#[test]
fn no_background_means_no_absorption() {
    let d = lcls();
    let bg = Background { field_strength: 0.0, ..Background::from_beam(&d) };
    let q = felpair::kinematics::FourVector::new(d.electron_mass, 0.0, 0.0, 0.0);
    let eng = AmplitudeEngine::with_background(bg, q, FloquetSettings::default()).unwrap();
    let spec = PairSpec {
        n: 1,
        k1_energy: 0.3 * d.volkov_wave_vector[0],
        angles1: Angles::new(2.0, 0.0),
        angles2: Angles::new(2.5, 1.0),
    };
    let (_, b) = eng.helicity_block(&spec).unwrap();
    assert_eq!(b.summed_square(), 0.0);
}
