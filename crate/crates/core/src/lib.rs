//! Distances between finite pointed measured metric spaces.
//!
//! The crate computes, exactly on finite inputs:
//!
//! - Hausdorff and total-variation distances on a common ground space,
//! - the Prokhorov distance through its approximate-coupling characterization,
//! - the compact Gromov-Hausdorff-Prokhorov distance through correspondences
//!   and discrepancy-optimal transport plans,
//! - the localized Gromov-Hausdorff-Prokhorov distance for boundedly-compact
//!   style inputs (ball localization with subspace perturbations), and
//! - the Benjamini-Schramm distance between rooted graphs.
//!
//! Every distance comes with a certificate: the correspondence, transport
//! plan, subspace or violating set that proves the reported value. Brute-force
//! reference implementations live in [`oracles`] and share no search logic
//! with the optimized paths.
//!
//! All numeric code is generic over [`scalar::Scalar`], with two shipped
//! backends: `f64` (tolerance 1e-9) and exact [`Rational`] arithmetic.
//!
//! ```
//! use ghp_metrics::cghp::{cghp_distance, Mode};
//! use ghp_metrics::scalar::Scalar;
//! use ghp_metrics::RatSpace;
//!
//! // {0, 3} on the line against a single point, zero measures: the far
//! // point must relate to the only point available, so the distance is
//! // half the forced distortion.
//! let x = RatSpace::line(&[0, 3], 0, &[0, 0]);
//! let y = RatSpace::line(&[0], 0, &[0]);
//! let cert = cghp_distance(&x, &y, Mode::Exact).unwrap();
//! assert_eq!(cert.value, Scalar::from_ratio(3, 2));
//! assert!(cert.correspondence.contains(1, 0));
//! ```

#![forbid(unsafe_code)]

pub mod cghp;
pub mod error;
pub mod flat;
pub mod ghp;
pub mod graphs;
pub mod lp;
pub mod oracles;
pub mod scalar;
pub mod spaces;

pub use error::{Error, ValidationError};
pub use scalar::{Rational, Scalar};

/// Exact-rational finite pointed measured metric space.
pub type RatSpace = spaces::FiniteSpace<Rational>;
/// Floating-point finite pointed measured metric space.
pub type FloatSpace = spaces::FiniteSpace<f64>;
/// Exact-rational ground space (metric only, no root or mass).
pub type RatGround = flat::GroundSpace<Rational>;
/// Floating-point ground space.
pub type FloatGround = flat::GroundSpace<f64>;
