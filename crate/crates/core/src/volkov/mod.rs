//! Strong-field QED in the quasi-EM wave: Dirac algebra, photon modes,
//! Volkov states, the Volkov propagator and the double Compton amplitude.

pub mod amplitude;
pub mod dirac;
pub mod photon;
pub mod propagator;
pub mod state;

pub use amplitude::{
    AmplitudeEngine, AmplitudeSet, FloquetSettings, HelicityAmplitudeBlock, PairSpec,
    SingleEmission, VertexVector,
};
pub use dirac::{ComplexFourVector, DiracAlgebra, Mat4, Spinor, C64};
pub use photon::{polarization_vector, Angles, Helicity, PhotonMode};
pub use propagator::{volkov_propagator_contribution, ResonanceGuard};
pub use state::{Background, FloquetSeries, VolkovState};
