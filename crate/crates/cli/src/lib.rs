//! Verification front end for polynomial Poisson and Nambu models: a small
//! model description language, check orchestration and report emission.

pub mod app;
pub mod checks;
pub mod dsl;
pub mod mapfile;
