//! Numerical library for the planar generalized photogravitational
//! Chermnykh problem: a restricted three-body model with a radiating bigger
//! primary, an oblate smaller primary and a flattened belt, analyzed in the
//! rotating frame with perturbed mean motion.
//!
//! The crate covers model construction, equilibrium location, linear
//! stability of the triangular points, symplectic reduction of the quadratic
//! Hamiltonian to action-angle form, zero-velocity-curve extraction, and
//! adaptive nonlinear orbit integration.

pub mod equilibria;
pub mod error;
pub mod integrate;
pub mod linearize;
pub mod model;
pub mod normalform;
pub mod zvc;

pub use error::{Error, Result};
pub use model::{BeltProfile, PhaseState, RadiationSource, SystemParams};
