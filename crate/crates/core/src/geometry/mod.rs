//! Domains, grid functions and Schwarz symmetrization.

pub mod arcs;
pub mod domain;
pub mod grid;
pub mod rearrange;
pub mod sets;

pub use domain::{unit_ball_volume, unit_sphere_area, Domain, Primitive};
pub use grid::{GridFunction, Lattice, PointFn};
pub use rearrange::schwarz_rearrange;
pub use sets::{inscribed_ball, symmetric_difference_measure, symmetrized_set, InscribedBall, SymmetrizedSet};
