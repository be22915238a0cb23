//! Closed-form geometry of umbilical hypersurfaces in constant-curvature
//! space forms, second-order forward-mode differentiation, and the
//! verification / solver pipeline built on top of them.
//!
//! The crate splits into a scalar-generic closed-form layer (`geometry`,
//! `jet`, `fields`, `ops`, `aux`) and an f64 numerical lane (`quad`, `cap`,
//! `mesh`, `bvp`, `verify`, `report`).

pub mod aux;
pub mod bvp;
pub mod cap;
pub mod error;
pub mod fields;
pub mod geometry;
pub mod horolens;
pub mod jet;
pub mod mesh;
pub mod ops;
pub mod quad;
pub mod report;
pub mod sample;
pub mod scalar;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::Real;

/// Double-precision aliases for the scalar-generic core types.
pub type Jet64 = jet::Jet2<f64>;
pub type VecJet64 = jet::VecJet<f64>;
pub type ScalarField64 = fields::ScalarField<f64>;
pub type VectorField64 = fields::VectorField<f64>;
pub type Case64 = fields::UmbilicalCase<f64>;
pub type Surface64 = cap::ChartSurface<f64>;
pub type Aux64 = aux::AuxFunction<f64>;
