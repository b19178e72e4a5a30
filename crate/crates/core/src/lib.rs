//! Invariant harmonic functions on the complex unit ball.
//!
//! This crate holds the numerical core: geometry of the ball `B^n ⊂ C^n`
//! (Möbius involutions, Bergman metric, hyperbolic distance), integration
//! over the unit sphere `S^{2n-1}`, the Poisson–Szegő kernel and its
//! Wirtinger gradient, and the machinery around the sharp gradient estimate
//!
//! ```text
//! ‖∇h(z)‖ ≤ 2Γ(n+1) / (√π Γ(n+½)) · 1/(1−‖z‖²)      for |h| ≤ 1.
//! ```
//!
//! It is `no_std` and only needs `alloc`. File formats, the command line
//! front end and the verification suites live in the `ballharm` crate.
//!
//! ```
//! use ballharm_core::sharpness::sharp_constant;
//! let c1 = sharp_constant(1).unwrap();
//! assert!((c1 - 4.0 / core::f64::consts::PI).abs() < 1e-14);
//! ```
#![no_std]

extern crate alloc;

pub mod ball;
pub mod bounds;
pub mod burgeth;
pub mod directions;
mod error;
pub mod poisson;
pub mod quad1d;
pub mod quadrature;
pub mod report;
pub mod sharpness;
pub mod special;
pub mod sum;

pub use ball::{CPoint, HermitianMatrix};
pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use poisson::{BoundaryFunction, HarmonicField};
pub use quadrature::{QuadratureRule, RuleKind};
pub use report::{Tolerances, VerificationReport};
