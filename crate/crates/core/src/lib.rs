//! Identified sets for moment models under data combination, computed through
//! optimal transport.
//!
//! Two datasets that share covariates identify the conditional laws
//! `μ_{1|x}` and `μ_{0|x}` but not their coupling. For moment functions that
//! are affine in the parameter, the identified set is convex and its support
//! function in a direction is (minus) an integrated optimal transport cost,
//! so set computation reduces to many small transport problems:
//!
//! - [`quantile`] evaluates the univariate ones in closed form by monotone
//!   rearrangement;
//! - [`dream`] solves the 2×J *partial* transport problems arising from
//!   true-positive-rate disparity exactly, via dual rank equilibration;
//! - [`oracle`] carries independent linear-programming references that the
//!   fast paths are verified against;
//! - [`models`] wires the machinery into the linear projection model, the
//!   two fairness disparity measures, and supermodular expectation bounds;
//! - [`setapprox`] turns support-function evaluations into halfspace
//!   filters, accepted point clouds, and set diagnostics.

pub mod dream;
pub mod error;
pub mod linalg;
pub mod measures;
pub mod models;
pub mod oracle;
pub mod quantile;
pub mod setapprox;

pub use dream::{canonical_order, narrow_bracket, solve_dream, DreamSolution, PartialOtInstance};
pub use error::{Error, Result};
pub use linalg::Matrix;
pub use measures::{
    discretize_gaussian, ConditionalLawTable, DiscreteDist, GaussianSpec, LawRow,
};
pub use oracle::{
    brute_force_ot, brute_force_partial_ot, kallus_dd_lp, kallus_dd_lp_batch, lp_vertices,
    solve_lp_exact, KallusCell, LpProblem, LpSolution,
};
pub use quantile::{
    antitone_integral, comonotone_integral, frechet_bounds, to_step_quantile, StepQuantile,
};
pub use setapprox::{
    filter_candidates, restricted_directions, sample_sphere, Diagnostics, Halfspace,
    IdentifiedSetApprox,
};
