//! The worked models: linear projection, demographic disparity,
//! true-positive-rate disparity, and supermodular expectation bounds.

pub mod dd;
pub mod linear;
pub mod supermodular;
pub mod tprd;

pub use dd::{dd_interval, dd_support, DdModel, DdRow, DisparityMatrix};
pub use linear::{
    lp_halfspace, lp_support, LinearProjectionModel, LpModelRow, QuantileEval, ScalarLaw,
    VectorLaw,
};
pub use supermodular::supermodular_interval;
pub use tprd::{
    tprd_interval, tprd_map, tprd_theta_bounds, tprd_theta_support, TprdModel, TprdRow,
};
