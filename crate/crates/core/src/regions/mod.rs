//! Attainable regions of the measures of concordance for copulas of given
//! asymmetry.
//!
//! If `μ∞(C) = m`, some point `(a, b)` with `a ≤ b` has asymmetry `m` (after
//! transposing `C` if needed), so `C` sits between the local bounds with
//! `c = m` at `(a, b)`. By the symmetries of `Q` the extreme measure values
//! over those bounds are found on the triangle `Δ_m`, which this module
//! scans, and which yields the closed-form boundaries `g(m) ≤ κ ≤ h(m)`.

pub mod curves;
pub mod extremal;
pub mod kappa;
pub mod sweep;
pub mod triangle;

pub use curves::{max_asymmetry_given, range_of, RangeCurve};
pub use extremal::{extremal_scan, reflection_identity, ScanResult};
pub use kappa::{kappa_on_lower, kappa_on_upper};
pub use sweep::{attainability_sweep, SweepResult};
pub use triangle::{Location, TriangleDomain, Vertex};
