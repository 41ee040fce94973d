//! Distortion-detecting invariants for homeomorphisms that preserve an
//! integral degree-one cohomology class.
//!
//! Homeomorphisms of the circle, the closed annulus, the 2-torus and the
//! torus `S¹ × (ℝ ∪ {∞})` are represented by equivariant lifts to the cyclic
//! cover attached to the class. From a lift and the cover potential `F` the
//! crate computes
//!
//! * the coboundary function `K(g) = F∘g̃ − F` and the seminorm `‖g‖`
//!   ([`cocycle`]),
//! * the group two-cocycle `G_x(g, h) = K(g)(hx) − K(g)(x)` ([`cocycle`]),
//! * local rotation numbers with boundedness diagnostics ([`rotation`]),
//! * two-point quasimorphisms, their defects and homogenisations
//!   ([`quasi`]),
//! * Nielsen (non)equivalence of invariant measures ([`measure`]),
//! * word norms and translation-length sandwiches over exact generating sets
//!   ([`wordgeom`]),
//!
//! and assembles "undistorted" [`Certificate`]s with translation-length lower
//! bounds.

pub mod certificate;
pub mod cocycle;
pub mod error;
pub mod exact;
pub mod homeo;
pub mod measure;
pub mod quasi;
pub mod rotation;
pub mod sampling;
pub mod space;
pub mod wordgeom;

pub use certificate::{Certificate, EvidenceValue, Mechanism, Verdict};
pub use error::{Error, Result};
pub use exact::Surd;
pub use homeo::{Canonical, Flavor, Homeo, PlCircleMap, Step};
pub use space::{CoverPoint, Path, PathIntegralCocycle, Point, Potential, Space, SpaceKind};

/// Absolute tolerance for deciding that a real number is an integer.
pub const INTEGER_TOLERANCE: f64 = 1e-9;
