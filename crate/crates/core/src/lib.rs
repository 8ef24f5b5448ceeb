//! The bounded radial solution ℱ_c(m; ρ) of the coupled Born-Oppenheimer
//! system at an isotropic conical intersection, built from ₀F₃ series, and
//! the anomalous Zeeman quantities derived from it.

pub mod asymptotics;
pub mod checks;
pub mod cli;
pub mod conic;
pub mod error;
pub mod ode_oracle;
pub mod output;
pub mod quadrature;
pub mod special_fn;
pub mod zeeman;

pub use conic::{AzimuthalNumber, ConicConfig, ConicFunction, Spinor2};
pub use error::{Error, Result};
