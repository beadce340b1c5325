//! # lsdiv
//!
//! f-divergences between location-scale families.
//!
//! A location-scale family is the orbit of a standard density `p` under the
//! affine maps `x ↦ Px + l` with `P` symmetric positive-definite. Because
//! every f-divergence is invariant under a common group action, a divergence
//! between two members of such families only depends on the canonical element
//! `g₁⁻¹·g₂`. This crate builds on that reduction:
//!
//! - [`group`]: the location-scale group and its block-matrix representation.
//! - [`density`]: the family zoo (normal, Cauchy, Weibull, MVN, elliptical, ...).
//! - [`generator`]: convex generators `f` naming the f-divergences.
//! - [`divergence`]: closed forms, canonical reduction, entropies, f-mutual information.
//! - [`quadrature`]: adaptive Gauss–Kronrod integration on infinite domains.
//! - [`mc`]: importance-sampling and Bregman (non-negative) Monte Carlo estimators.
//! - [`projection`]: information projections onto location-scale families.
//! - [`fisher`]: Fisher information constants and hyperbolic Fisher-Rao distances.
//! - [`registry`]: string specs such as `weibull(k=2,s=3)` used by the CLI.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod density;
pub mod divergence;
pub mod error;
pub mod fisher;
pub mod generator;
pub mod group;
pub mod linalg;
pub mod mc;
pub mod optimize;
pub mod projection;
pub mod quadrature;
pub mod registry;
pub mod rng;
pub mod selftest;
pub mod special;

pub use density::{LocationScaleDensity, LogNormal, ProfileFunction, StandardDensity, Support};
pub use divergence::{DivergenceValue, Method};
pub use error::{Error, Result};
pub use generator::FGenerator;
pub use group::{GroupElement, GroupMatrix};
pub use linalg::{Matrix, SpdMatrix};
