//! Representation-efficiency toolkit.
//!
//! * [`spectral`]: symmetric eigendecomposition, whitening, covariance.
//! * [`fim`]: Gaussian-model Fisher information, the covariance-to-FIM
//!   spectral map, effective dimension and efficiency `η`.
//! * [`barlow`]: Barlow Twins cross-correlation, loss, gradients and a toy
//!   linear-encoder trainer.
//! * [`lab`]: seeded Monte Carlo and end-to-end validators.
//! * [`io`], [`report`], [`commands`]: embedding files, report documents
//!   and the command implementations behind the `repeff` binary.

pub mod barlow;
pub mod commands;
pub mod error;
pub mod fim;
pub mod io;
pub mod lab;
pub mod report;
pub mod rng;
pub mod spectral;

pub use error::{Error, Result};
