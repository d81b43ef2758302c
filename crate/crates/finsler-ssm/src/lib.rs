//! Sampling, verification reports, tensor dumps and geodesic traces on top
//! of [`finsler_ssm_core`].

pub mod config;
pub mod output;
pub mod sampler;
pub mod verify;

pub use finsler_ssm_core as core;
