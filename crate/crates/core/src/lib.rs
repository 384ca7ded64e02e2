//! Free spectrahedra, their polar duals, completely positive interpolation,
//! tracial hulls and certificates of positivity, decided with a dense SDP
//! solver.

pub mod algebra;
pub mod catalog;
pub mod cp;
pub mod error;
pub mod free;
pub mod io;
pub mod possatz;
pub mod sdp;
pub mod tracial;

pub use error::{Error, Result};
