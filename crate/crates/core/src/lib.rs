//! One- and two-photon scattering off arrays of two-level emitters coupled to
//! a unidirectional (chiral) waveguide.
//!
//! Everything is dimensionless: frequencies in units of the coupling `κ`,
//! coordinates in units of `1/κ`.

// `!(x > 0.0)` guards are meant to reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
mod cluster;
pub mod disorder;
pub mod error;
pub mod model;
pub mod oracle;
pub mod quad;
pub mod single_photon;
pub mod specfun;
pub mod two_photon;
pub mod validation;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use model::{
    is_degenerate, min_pairwise_gap, EmitterArray, GaussianPacket1, GaussianPacket2, Grid, SampledWave, UnitScale,
};
