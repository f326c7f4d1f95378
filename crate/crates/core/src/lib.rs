//! Relativistic (Klein-Gordon) Coulomb problem in D dimensions: the
//! partial-wave Green's function by several independent routes, its bound
//! state poles and residues, the scattering-regime discontinuity, and the
//! special-function machinery underneath.

pub mod error;
pub mod green;
pub mod model;
pub mod quad;
pub mod specfun;
pub mod verify;
pub mod wavefun;

pub use error::{Error, ErrorClass, Result};
