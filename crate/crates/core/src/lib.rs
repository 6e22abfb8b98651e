// Tensor kernels are written in index notation on purpose; iterator-style
// rewrites of d^4/d^5 contractions read worse and optimize the same.
#![allow(clippy::needless_range_loop)]
#![allow(clippy::too_many_arguments)]
#![allow(clippy::type_complexity)]

//! Numerical conformal tractor calculus over coordinate metrics.
//!
//! The crate provides exact-jet coordinate geometry, the full curvature stack
//! through the Cotton tensor, the rank-(d+2) standard tractor bundle in a
//! fixed metric gauge, ODE parallel transport with holonomy-algebra
//! estimation, linear-algebraic analysis of the resulting spans (invariant
//! subspaces, form stabilizers, Berger test), and a zoo of built-in wave-type
//! and ambient metric families with structural recognizers.

pub mod berger;
pub mod curvature;
pub mod curve;
pub mod error;
pub mod expr;
pub mod geometry;
pub mod jet;
pub mod kform;
pub mod lie;
pub mod models;
pub mod ode;
pub mod recognize;
pub mod tractor;
pub mod transport;
pub mod waves;
pub mod zoo;

pub use error::{Error, Result};
