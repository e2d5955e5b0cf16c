//! The Mellin-Meijer kernel density estimator (basic and refined forms) and
//! the baseline asymmetric-kernel estimators used for benchmarking.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::meijer::{self, KernelShape, MeijerKernel};
use crate::mellin::Sample;
use crate::specfun;

/// Evaluation grid plus density values; the exchange format between the
/// estimators, the benchmark harness, and the CLI.
#[derive(Debug, Clone)]
pub struct DensityGrid {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
}

impl DensityGrid {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::Domain(format!(
                "grid length mismatch: {} xs vs {} ys",
                xs.len(),
                ys.len()
            )));
        }
        if xs.is_empty() || !(xs[0] > 0.0) {
            return Err(Error::Domain("grid must start at a positive x".into()));
        }
        for w in xs.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::Domain("grid xs must be strictly increasing".into()));
            }
        }
        // Unbounded-at-zero densities may blow up at the first grid point;
        // everywhere else values must be finite and nonnegative.
        for (i, &y) in ys.iter().enumerate() {
            let ok = y >= 0.0 && (y.is_finite() || i == 0);
            if !ok {
                return Err(Error::Domain(format!("invalid density value {y} at index {i}")));
            }
        }
        Ok(Self { xs, ys })
    }
}

/// Which closed form the per-observation kernels take.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Family {
    Gamma,
    InvGamma,
    General,
}

/// Per-observation constants of the hot evaluation loop, all derived from
/// the kernel parameters once at fit time.
#[derive(Debug, Clone, Copy)]
struct PerObs {
    log_x: f64,
    log_nu: f64,
    /// Exponent of (x/ν) in the density (the head exponent).
    slope: f64,
    /// Constant term of the log-density.
    log_c: f64,
    /// Gamma/InvGamma: α. General: a + b.
    m1: f64,
    /// General only: a/b.
    m2: f64,
}

/// Fitted refined estimator: one Meijer kernel per observation, with the
/// spread γ_k = η/√(η² + X_k) shrinking for large observations.
#[derive(Debug, Clone)]
pub struct MMEstimator {
    sample: Sample,
    shape: KernelShape,
    eta: f64,
    kernels: Vec<MeijerKernel>,
    family: Family,
    inv_xi: f64,
    obs: Vec<PerObs>,
    warnings: Vec<String>,
}

fn per_obs_constants(k: &MeijerKernel, log_x: f64, family: Family) -> Result<PerObs> {
    let xi = k.shape.xi;
    let (slope, log_c, m1, m2) = match family {
        Family::Gamma => {
            let alpha = xi * xi / (k.gamma * k.gamma);
            (
                alpha / xi - 1.0,
                -(k.nu * xi).ln() + alpha * alpha.ln() - specfun::log_gamma_real(alpha)?,
                alpha,
                0.0,
            )
        }
        Family::InvGamma => {
            let alpha = xi * xi / (k.gamma * k.gamma);
            (
                -alpha / xi - 1.0,
                -(k.nu * xi).ln() + alpha * alpha.ln() - specfun::log_gamma_real(alpha)?,
                alpha,
                0.0,
            )
        }
        Family::General => {
            let c = k.shape.theta.cos();
            let s = k.shape.theta.sin();
            let a = xi * xi / (k.gamma * k.gamma * c * c);
            let b = xi * xi / (k.gamma * k.gamma * s * s);
            (
                a / xi - 1.0,
                -(k.nu * xi).ln() + a * (a / b).ln() - specfun::log_beta(a, b)?,
                a + b,
                a / b,
            )
        }
    };
    Ok(PerObs { log_x, log_nu: k.nu.ln(), slope, log_c, m1, m2 })
}

/// Build the refined estimator from a sample, a kernel shape, and a
/// smoothing parameter.
pub fn fit(sample: Sample, shape: KernelShape, eta: f64) -> Result<MMEstimator> {
    if !(eta > 0.0) || !eta.is_finite() {
        return Err(Error::InvalidParameter(format!("eta must be positive, got {eta}")));
    }
    let family = if shape.is_gamma_limit() {
        Family::Gamma
    } else if shape.is_inv_gamma_limit() {
        Family::InvGamma
    } else {
        Family::General
    };
    let mut kernels = Vec::with_capacity(sample.n());
    let mut obs = Vec::with_capacity(sample.n());
    for (&x, &lx) in sample.values().iter().zip(sample.logs()) {
        let k = meijer::per_obs_params(eta, x, shape)?;
        obs.push(per_obs_constants(&k, lx, family)?);
        kernels.push(k);
    }
    // Advisory only: the estimator is always well defined, but if the shape
    // fails these sufficient conditions its asymptotic guarantees can lapse
    // for densities with a very fat tail (first) or head (second).
    let mut warnings = Vec::new();
    let c2 = shape.theta.cos().powi(2);
    let s2 = shape.theta.sin().powi(2);
    if c2 > 0.0 && shape.xi / c2 <= 0.25 {
        warnings.push(format!(
            "shape (xi = {}, theta = {}) has xi/cos^2(theta) <= 1/4; tail \
             reconstruction may be limited for fat-tailed targets",
            shape.xi, shape.theta
        ));
    }
    if s2 > 0.0 && shape.xi / s2 <= 1.0 {
        warnings.push(format!(
            "shape (xi = {}, theta = {}) has xi/sin^2(theta) <= 1; head \
             reconstruction may be limited for fat-headed targets",
            shape.xi, shape.theta
        ));
    }
    Ok(MMEstimator {
        inv_xi: 1.0 / shape.xi,
        sample,
        shape,
        eta,
        kernels,
        family,
        obs,
        warnings,
    })
}

impl MMEstimator {
    pub fn sample(&self) -> &Sample {
        &self.sample
    }

    pub fn shape(&self) -> KernelShape {
        self.shape
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn kernels(&self) -> &[MeijerKernel] {
        &self.kernels
    }

    /// Advisory notes collected at fit time (never fatal).
    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// Density estimate at x ≥ 0: n⁻¹ Σ (1/X_k) L^{(k)}(x/X_k).
    pub fn evaluate(&self, x: f64) -> Result<f64> {
        if x < 0.0 {
            return Err(Error::Domain(format!("evaluate requires x >= 0, got {x}")));
        }
        if !x.is_finite() {
            return Err(Error::Domain("evaluate requires finite x".into()));
        }
        if x == 0.0 {
            return Ok(self.at_zero());
        }
        let lx = x.ln();
        // Kahan summation keeps the result independent of observation order
        // to well below 1e-12.
        let mut sum = 0.0f64;
        let mut carry = 0.0f64;
        for o in &self.obs {
            let lr = lx - o.log_x - o.log_nu;
            let log_l = match self.family {
                Family::Gamma => o.log_c + o.slope * lr - o.m1 * (lr * self.inv_xi).exp(),
                Family::InvGamma => o.log_c + o.slope * lr - o.m1 * (-lr * self.inv_xi).exp(),
                Family::General => {
                    o.log_c + o.slope * lr - o.m1 * (o.m2 * (lr * self.inv_xi).exp()).ln_1p()
                }
            };
            let term = (log_l - o.log_x).exp();
            let y = term - carry;
            let t = sum + y;
            carry = (t - sum) - y;
            sum = t;
        }
        Ok(sum / self.sample.n() as f64)
    }

    /// Limit at the origin dictated by the kernel head exponents.
    fn at_zero(&self) -> f64 {
        if self.family == Family::InvGamma {
            return 0.0;
        }
        let mut sum = 0.0;
        for o in &self.obs {
            if o.slope < -1e-12 {
                return f64::INFINITY;
            }
            if o.slope <= 1e-12 {
                sum += (o.log_c - o.log_x).exp();
            }
        }
        sum / self.sample.n() as f64
    }

    /// Estimate on a whole grid, parallelized over grid points.
    pub fn evaluate_grid(&self, xs: &[f64]) -> Result<Vec<f64>> {
        xs.par_iter().map(|&x| self.evaluate(x)).collect()
    }
}

/// The basic estimator: the SAME kernel for every observation,
/// n⁻¹ Σ (1/X_k) L(x/X_k).
pub fn evaluate_basic(s: &Sample, k: &MeijerKernel, x: f64) -> Result<f64> {
    if x < 0.0 {
        return Err(Error::Domain(format!("evaluate_basic requires x >= 0, got {x}")));
    }
    let mut sum = 0.0;
    for &v in s.values() {
        let l = meijer::kernel_density(k, x / v)?;
        if l.is_infinite() {
            return Ok(f64::INFINITY);
        }
        sum += l / v;
    }
    Ok(sum / s.n() as f64)
}

/// Log-Normal kernel estimator: a Gaussian kernel on log-data, divided by x.
pub fn lognormal_kde(s: &Sample, h: f64, x: f64) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::InvalidParameter(format!("bandwidth must be positive, got {h}")));
    }
    if !(x > 0.0) {
        return Err(Error::Domain(format!("lognormal_kde requires x > 0, got {x}")));
    }
    let lx = x.ln();
    let norm = 1.0 / (x * h * (2.0 * std::f64::consts::PI).sqrt());
    let mut sum = 0.0;
    for &lk in s.logs() {
        let d = (lx - lk) / h;
        sum += (-0.5 * d * d).exp();
    }
    Ok(norm * sum / s.n() as f64)
}

/// Gamma kernel estimator: averages Gamma(ρ(x), scale b) densities evaluated
/// at the observations. The original form uses shape ρ = x/b + 1; the
/// modified form patches the shape near the boundary (x < 2b) to keep the
/// estimate bounded at zero.
pub fn chen_gamma_kde(s: &Sample, b: f64, x: f64, modified: bool) -> Result<f64> {
    if !(b > 0.0) {
        return Err(Error::InvalidParameter(format!("bandwidth must be positive, got {b}")));
    }
    if x < 0.0 {
        return Err(Error::Domain(format!("chen_gamma_kde requires x >= 0, got {x}")));
    }
    let rho = if modified {
        if x >= 2.0 * b {
            x / b
        } else {
            0.25 * (x / b) * (x / b) + 1.0
        }
    } else {
        x / b + 1.0
    };
    let log_norm = -rho * b.ln() - specfun::log_gamma_real(rho)?;
    let mut sum = 0.0;
    for (&v, &lv) in s.values().iter().zip(s.logs()) {
        sum += (log_norm + (rho - 1.0) * lv - v / b).exp();
    }
    Ok(sum / s.n() as f64)
}
