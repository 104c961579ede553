//! Density-matrix simulation of cloning-based, basis-independent quantum gates
//! acting on pseudo-pure (initially mixed) qubit states.

pub mod analysis;
pub mod circuitlang;
pub mod cloning;
pub mod error;
pub mod gates;
pub mod qmath;
pub mod states;
pub mod ugates;

pub use error::{Error, Result};
