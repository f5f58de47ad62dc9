//! Alpha magnitude of point clouds in the line and the plane.
//!
//! The pipeline builds an alpha complex from a Delaunay triangulation,
//! reduces it to a barcode over Z/2, and evaluates the persistent magnitude
//! `Σ_k (-1)^k Σ (e^{-at} - e^{-bt})` at any scale `t`. Around it sit the
//! classical magnitude of small metric spaces, brute-force Čech and
//! Vietoris–Rips builders for cross-checks, closed-form oracles, seeded
//! samplers and a log-log dimension estimator.

// `!(x > 0.0)` is deliberate throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod complex;
pub mod error;
pub mod estimator;
pub mod exec;
pub mod io;
pub mod magnitude;
pub mod metric;
pub mod oracles;
pub mod persistence;
pub mod pmag;
pub mod samplers;

pub use error::{Error, Result};
pub use exec::Execution;
pub use metric::{DistanceMatrix, PointCloud};
pub use persistence::{compute_persistence, Barcode, Interval};
pub use pmag::{alpha_magnitude, persistent_magnitude};
