//! Natural-unit kinematics: four-vectors, FEL beam parameters, lab ↔ electron
//! frame maps and the two-photon emission constraint.

mod beam;
mod four_vector;
mod frames;
mod pair;

pub use beam::{
    derive_beam_quantities, free_momentum, quasi_momentum, DerivedBeamQuantities, FelParameters,
};
pub use four_vector::{Direction, FourVector};
pub use frames::{
    doppler_factor_ef, doppler_factor_lab, electron_to_lab_frame, gamma_tan, lab_to_electron_frame,
    photon_energy_to_ef, photon_energy_to_lab, zenith_angle_ef, zenith_angle_lab,
    zenith_from_gamma_tan, Frame,
};
pub use pair::{photon1_energy_for, solve_pair_kinematics, solve_with_initial, PairKinematics};
