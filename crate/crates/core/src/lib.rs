//! Spectral numerics for uniform Sobolev and resolvent estimates of non-elliptic
//! second-order constant-coefficient operators `Q(D) + z`.
//!
//! The crate samples fields on periodic boxes and realizes the Fourier multipliers,
//! dyadic decompositions, restriction–extension operators and counterexample
//! families of the theory. The experiments regress the scaling laws those objects
//! must obey.

pub mod dyadic_decomp;
pub mod error;
pub mod extremizers;
pub mod exponent_region;
pub mod field;
pub mod harness;
pub mod multipliers;
pub mod normest;
pub mod quadform;
pub mod quadrature;
pub mod regression;
pub mod surface_ops;

pub use error::{Error, Result};
pub use exponent_region::{ExponentPair, RegionVerdict, Status};
pub use field::{Axis, Grid, SampledField, Space};
pub use num_complex::Complex64;
pub use quadform::{GraphChart, QuadraticForm};
