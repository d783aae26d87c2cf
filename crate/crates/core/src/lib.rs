//! Numerical laboratory for periodic-orbit rigidity of Anosov flows, built on
//! suspensions of hyperbolic toral automorphisms.
//!
//! The core is generic over the working scalar ([`Scalar`], implemented for
//! `f32` and `f64`); periodic points are exact rationals and the delicate
//! sums run in double-double. Aliases for `f64` are provided at the root.

pub mod asymptotics;
pub mod cocycles;
pub mod equilibrium;
pub mod error;
pub mod field;
pub mod flow;
pub mod normal_form;
pub mod numerics;
pub mod scalar;
pub mod toral;
pub mod verify;

pub use error::{Error, Result};
pub use field::{FiberWeight, ScalarField};
pub use flow::SuspensionFlow;
pub use scalar::Scalar;
pub use toral::{HomoclinicPoint, MapOrbit, RationalPoint, ShadowingPoint, ToralAutomorphism};

pub type Automorphism64 = ToralAutomorphism<f64>;
pub type Automorphism32 = ToralAutomorphism<f32>;
pub type Field64 = ScalarField<f64>;
pub type Field32 = ScalarField<f32>;
pub type Weight64 = FiberWeight<f64>;
pub type Weight32 = FiberWeight<f32>;
pub type Flow64 = SuspensionFlow<f64>;
pub type Flow32 = SuspensionFlow<f32>;
