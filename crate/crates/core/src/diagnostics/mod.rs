//! Certification of iterates.
//!
//! - first variations and the Nikaido-Isoda (NI) error, estimated on a grid
//!   (tori) or by multistart best-response search (any domain);
//! - the Lyapunov potential built from aggregated particle moments around a
//!   reference equilibrium;
//! - reference estimation by clustering a converged ensemble;
//! - the distance between a mirror-prox step and a proximal-point step.

mod cluster;
mod compare;
mod lyapunov;
mod ni;

pub use cluster::{default_merge_radius, estimate_reference_by_clustering, ClusterParams};
pub use compare::{compare_mp_pp, MpPpComparison};
pub use lyapunov::{
    aggregated_moments, default_lyapunov_params, lyapunov, AggregatedMoments, CurvatureTerm, LyapunovMode,
    LyapunovParams, LyapunovReport, Partition, ReferenceMne,
};
pub use ni::{
    best_response_max, best_response_min, first_variation_x, first_variation_y, ni_error_grid, ni_error_multistart,
    GridNi, MultistartConfig,
};
