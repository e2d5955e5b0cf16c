//! Kernel density estimation for densities supported on the positive
//! half-line, built on Mellin transforms and Meijer-type kernels.
//!
//! The crate provides:
//! - [`specfun`]: complex log-gamma, log-beta, the F density;
//! - [`meijer`]: the four-parameter kernel family, its Mellin transform,
//!   moments, and a catalog of classical distributions;
//! - [`mellin`]: empirical and analytic transforms along vertical lines;
//! - [`selector`]: the Mellin-domain plug-in smoothing-parameter rule;
//! - [`estimator`]: the refined estimator plus baseline estimators;
//! - [`simlab`]: a reproducible Monte Carlo MISE benchmark harness;
//! - [`quad`]: double-exponential quadrature for tests and oracles.

pub mod error;
pub mod estimator;
pub mod meijer;
pub mod mellin;
pub mod quad;
pub mod selector;
pub mod simlab;
pub mod specfun;

pub use error::{Error, Result};
pub use estimator::{DensityGrid, MMEstimator};
pub use meijer::{HolomorphyStrip, KernelShape, MeijerKernel};
pub use mellin::{MellinLine, Sample};
pub use selector::{PluginSelection, SelectorConfig};
pub use simlab::{BenchResult, EstimatorConfig, TestDensity};
