//! Command surface for identified-set computation: model ingestion,
//! support-function queries, set approximation, the built-in simulation
//! studies, the partial-transport solver endpoint, and the oracle
//! verification suites.

pub mod commands;
pub mod config;
pub mod modelspec;
pub mod output;
pub mod sims;
pub mod verify;

pub use commands::CommandError;
pub use config::RunConfig;
