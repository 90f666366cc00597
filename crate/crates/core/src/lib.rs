//! Irregular Gabor systems generated by a single Cauchy kernel
//! `φ_{λ,μ}(t) = e^{-2πiμt} / (t - λ - iw)`.

pub mod error;
pub mod expquad;

pub use error::{Error, Result};
pub mod lattice;
pub mod spectrum;
pub mod cauchy_analysis;
pub mod triangular_system;
pub mod trial;
pub mod paley_wiener;
pub mod framebounds;
pub mod pipeline;
pub mod cli;
