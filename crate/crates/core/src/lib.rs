//! Statistical characterization of daily log-fluctuations of a security:
//! q-Gaussian fits of the density, the stable attractor of aggregated
//! fluctuations, autocorrelation and leverage structure, and persistence by
//! detrended fluctuation analysis.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod corr;
pub mod dist;
pub mod error;
pub mod fit;
pub mod ingest;
pub mod io;
pub mod lsq;
pub mod quad;
pub mod scaling;
pub mod stats;

pub use error::{Error, Result};
