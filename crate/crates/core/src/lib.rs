//! Statistical power and sample-size workbench for independent and paired t
//! tests, one-way ANOVA and one-way repeated-measures ANOVA.
//!
//! The pipeline runs from published summary statistics to effect sizes
//! ([`effect_size`]), post-hoc power and minimum sample size ([`power`]), and
//! table-level regeneration ([`audit`]). All distribution functions are
//! implemented in [`distributions`] without external numerical libraries.

pub mod audit;
pub mod distributions;
pub mod effect_size;
pub mod error;
pub mod exec;
pub mod power;
pub mod report;

pub use error::{Error, Result};
pub use exec::Execution;

/// Engine version embedded in every service response.
pub const ENGINE_VERSION: &str = concat!("powerkit ", env!("CARGO_PKG_VERSION"));
