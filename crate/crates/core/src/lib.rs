// `!(x > 0.0)` is used throughout to reject NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod emission_rate;
pub mod entanglement;
pub mod error;
pub mod kinematics;
pub mod microbunch;
pub mod precision;
pub mod quadrature;
pub mod scaling_analysis;
pub mod special;
pub mod sweep;
pub mod units;
pub mod volkov;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/kinematics.md")]
    mod kinematics {}
    #[doc = include_str!("../../../book/src/amplitudes.md")]
    mod amplitudes {}
    #[doc = include_str!("../../../book/src/rates.md")]
    mod rates {}
    #[doc = include_str!("../../../book/src/entanglement.md")]
    mod entanglement {}
    #[doc = include_str!("../../../book/src/microbunch.md")]
    mod microbunch {}
    #[doc = include_str!("../../../book/src/scaling.md")]
    mod scaling {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
