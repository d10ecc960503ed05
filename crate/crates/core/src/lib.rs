//! Conic particle methods for mixed Nash equilibria of continuous
//! two-player zero-sum games.
//!
//! A mixed strategy is represented by a weighted particle ensemble
//! `μ = Σ a_i δ_{x_i}`. Weights move multiplicatively (entropic mirror
//! steps) and positions move additively (gradient steps followed by a
//! retraction onto the strategy domain). The solver implements the whole
//! family of inner-loop variants:
//!
//! | inner steps | method |
//! |-------------|--------|
//! | `L = 1`     | conic particle mirror descent-ascent (CP-MDA) |
//! | `L = 2`     | conic particle mirror prox (CP-MP) |
//! | to tolerance | approximate conic particle proximal point (CP-PP) |
//!
//! Iterates are certified with the Nikaido-Isoda error and a Lyapunov
//! potential computed from aggregated particle moments around a reference
//! equilibrium.
//!
//! ## Modules
//!
//! - [`geometry`]: strategy domains (tori, spheres, balls, finite sets).
//! - [`games`]: payoff oracles with analytic gradients.
//! - [`particles`]: ensembles on the simplex and weight-space primitives.
//! - [`solver`]: outer/inner update loops and the trajectory driver.
//! - [`diagnostics`]: NI error, Lyapunov potential, clustering, MP/PP comparison.
//! - [`checkpoint`]: versioned text format for states and reference equilibria.
//! - [`config`] and [`runner`]: experiment configuration and the pipelines
//!   behind the `conic-saddle` binary.

pub mod checkpoint;
pub mod config;
pub mod diagnostics;
pub mod error;
pub mod games;
pub mod geometry;
pub mod particles;
pub mod rng;
pub mod runner;
pub mod solver;

pub use error::{Error, Result};
pub use games::{PayoffOracle, Site, SmoothnessBounds};
pub use geometry::DomainSpec;
pub use particles::{Ensemble, SaddleState};
pub use solver::{AnchorMode, InnerSteps, SolverConfig};
