//! Littlewood-Paley, difference and maximal-function quasinorms of sampled
//! functions on a periodic box, together with the experiments that check
//! their scaling and equivalence properties.

pub mod band;
pub mod corpus;
pub mod difference;
pub mod error;
pub mod field;
pub mod io;
pub mod maximal;
pub mod numeric;
pub mod quadrature;
pub mod quasinorm;
pub mod verify;

pub use band::{band_project, build_band_system, decompose, reconstruct, BandDecomposition, DyadicBandSystem};
pub use error::{LpError, Result};
pub use field::{dft_forward, dft_inverse, dyadic_dilate, lp_norm, translate, GridSpec, SampledField, SpectralField};
