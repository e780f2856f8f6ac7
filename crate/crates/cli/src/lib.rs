//! Command-line and HTTP front ends over the `powerkit` engine.

pub mod api;
pub mod service;
