//! Rotation angle of a disc rolling without slipping on the rim of a fixed
//! disc, split into a dynamical and a geometric phase.
//!
//! The geometric phase is computed along independent routes and
//! cross-checked:
//!
//! * line integral of -cos(beta) dtheta over the cycle (`phase`);
//! * the same integral along pole-clamped curves, extrapolated to the
//!   vanishing cut-off (`regularize`);
//! * enclosed area minus 2*pi times the pole count of the Gauss curve
//!   (`topology`);
//! * fiber coordinate of the horizontal lift to S^3 under the canonical
//!   U(1) connection, whose endpoint phase is the holonomy (`hopf`, `lift`);
//! * compass-angle turning number plus total geodesic curvature
//!   (`curvature`).
//!
//! `report` orchestrates all routes over one motion and emits text / CSV /
//! SVG artifacts; the `hopf-phase` binary wraps it in a CLI.

pub mod curvature;
pub mod error;
pub mod geometry;
pub mod hopf;
pub mod lift;
pub mod motion;
pub mod phase;
pub mod projective;
pub mod quad;
pub mod regularize;
pub mod report;
pub mod topology;

pub use error::{Error, Result};
