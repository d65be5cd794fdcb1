//! Causality detection between chaotic time series via convergent cross
//! mapping (CCM), with a segment-CCM variant that recovers bidirectional
//! causality hidden by two-fold rotational symmetry of the underlying
//! attractor.
//!
//! The pipeline: simulate or load scalar series ([`dynsys`]), reconstruct
//! shadow manifolds by delay embedding ([`embedding`]), cross-map between
//! manifolds and test convergence of forecast skill with library length
//! ([`crossmap`]). For systems whose attractor has a half-turn symmetry the
//! symmetric manifold is two-to-one and plain CCM misses one direction;
//! [`symmetry`] segments it with two-means clustering and runs CCM per
//! segment. [`diagnostics`] provides the pre-flight checks (recurrence,
//! observability), and [`bench`] reproduces the reference score tables.
//!
//! Numerical kernels are generic over the scalar type through [`Real`]
//! (`f32` or `f64`); concrete `f64` aliases are exported at the crate root.

pub mod bench;
pub mod crossmap;
pub mod diagnostics;
pub mod dynsys;
pub mod embedding;
pub mod error;
pub mod io;
pub mod poly;
pub mod real;
pub mod rng;
pub mod symmetry;

pub use error::{Error, Result};
pub use real::Real;

/// Concrete scalar aliases for the common double-precision pipeline.
pub type Trajectory64 = dynsys::Trajectory<f64>;
pub type TimeSeries64 = dynsys::TimeSeries<f64>;
pub type SystemSpec64 = dynsys::SystemSpec<f64>;
pub type ShadowManifold64 = embedding::ShadowManifold<f64>;
