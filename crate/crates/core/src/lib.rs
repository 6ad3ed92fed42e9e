//! The two-centre problem in canonical K-coordinates: coordinate maps, the
//! Euler integral, the averaged potential, planar phase portraits and the
//! three-body flow.
//!
//! Units are left to the caller. The gravitational constant is absorbed into
//! the centre masses.

pub mod dynamics;
pub mod error;
pub mod hamiltonians;
pub mod kepler;
pub mod kmap;
pub mod portrait;
pub mod scalar;
pub mod secular;
pub mod verify;

pub use error::{Error, Result};
pub use kepler::{elements_from_actions, solve_kepler, MassParams, OrbitalElements};
pub use kmap::{
    cartesian_to_k, k_to_cartesian, k_to_cartesian_planar, CartesianState, KCoords, PlanarKCoords,
};
