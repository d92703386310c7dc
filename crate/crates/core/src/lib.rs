//! Desk-scale comparison geometry on non-negatively curved model spaces.
//!
//! The crate is organised around the objects a soul construction touches:
//!
//! - [`model_trig`]: law-of-cosines trigonometry in the model planes of curvature 0 and 1.
//! - [`convex_domain`]: planar convex bodies as halfplane intersections, their inner
//!   parallel bodies, maximum sets, the iterated soul and the angular excess function.
//! - [`cone`]: flat cones of total angle at most `2π`, with exact geodesics by unfolding.
//! - [`grad_flow`]: gradients of distance-to-boundary and the unit-speed level semi-flow.
//! - [`comparison`]: numerical verifiers for trapezoid comparison, the spherical model
//!   estimate, chord exit behaviour and flat normal angles.
//! - [`riccati`]: scalar and matrix Riccati evolution of second fundamental forms.

pub mod comparison;
pub mod cone;
pub mod convex_domain;
pub mod error;
pub mod grad_flow;
pub mod model_trig;
pub mod riccati;

mod geom;

pub use error::{GeomError, Result};
pub use geom::{angle_between, Point, Vector};
