//! Contour-integral solutions of two families of linear ODEs with
//! polynomial coefficients, their Maclaurin coefficients and numerical
//! checks of their growth and decay.

pub mod cli;
pub mod contours;
pub mod error;
pub mod phi;
pub mod psi;
pub mod quadrature;
pub mod series;
pub mod verify;

pub use error::{Error, Result};
pub use quadrature::{EvalResult, QuadratureSpec};
