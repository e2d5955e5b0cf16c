//! Meijer kernel densities: evaluation, Mellin transforms, moments, the
//! per-observation parameter rule, and the named-distribution catalog.
//!
//! A kernel is parameterised by (ν, γ, ξ, θ). Its Mellin transform is a
//! rescaled ratio of two Gamma factors; the kernel itself is the density of
//! ν X^ξ where X is Fisher-Snedecor distributed. At θ = 0 the family
//! degenerates to a power transform of a Gamma(α, α) variable and at
//! θ = π/2 to the matching Inverse Gamma transform, with α = ξ²/γ².

use num_complex::Complex64;
use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::specfun::{self, FParams};

/// Threshold below which θ (or π/2 − θ) is treated as the exact limit case.
const THETA_EPS: f64 = 1e-12;

/// The (ξ, θ) pair fixing the kernel family: ξ is the power parameter,
/// θ balances head against tail fatness.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelShape {
    pub xi: f64,
    pub theta: f64,
}

impl KernelShape {
    pub fn new(xi: f64, theta: f64) -> Result<Self> {
        if !(xi > 0.0) || !xi.is_finite() {
            return Err(Error::InvalidParameter(format!("xi must be positive, got {xi}")));
        }
        if !(0.0..=FRAC_PI_2).contains(&theta) {
            return Err(Error::InvalidParameter(format!(
                "theta must lie in [0, pi/2], got {theta}"
            )));
        }
        Ok(Self { xi, theta })
    }

    /// True when the kernel degenerates to the Gamma power transform.
    pub fn is_gamma_limit(&self) -> bool {
        self.theta < THETA_EPS
    }

    /// True when the kernel degenerates to the Inverse Gamma power transform.
    pub fn is_inv_gamma_limit(&self) -> bool {
        FRAC_PI_2 - self.theta < THETA_EPS
    }
}

/// One Meijer kernel: scale ν, spread γ, and the family shape.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeijerKernel {
    pub nu: f64,
    pub gamma: f64,
    pub shape: KernelShape,
}

/// Open vertical strip where a Mellin transform is holomorphic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HolomorphyStrip {
    pub lower: f64,
    pub upper: f64,
}

impl HolomorphyStrip {
    pub fn contains(&self, re: f64) -> bool {
        self.lower < re && re < self.upper
    }
}

impl MeijerKernel {
    pub fn new(nu: f64, gamma: f64, shape: KernelShape) -> Result<Self> {
        if !(nu > 0.0) || !nu.is_finite() {
            return Err(Error::InvalidParameter(format!("nu must be positive, got {nu}")));
        }
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "gamma must be positive, got {gamma}"
            )));
        }
        Ok(Self { nu, gamma, shape })
    }

    /// Shape parameter ξ²/(γ² cos²θ) controlling the head (∞ at θ = π/2).
    fn a_head(&self) -> f64 {
        let c = self.shape.theta.cos();
        self.shape.xi * self.shape.xi / (self.gamma * self.gamma * c * c)
    }

    /// Shape parameter ξ²/(γ² sin²θ) controlling the tail (∞ at θ = 0).
    fn b_tail(&self) -> f64 {
        let s = self.shape.theta.sin();
        self.shape.xi * self.shape.xi / (self.gamma * self.gamma * s * s)
    }

    /// Gamma/Inverse-Gamma limit shape α = ξ²/γ².
    fn alpha(&self) -> f64 {
        self.shape.xi * self.shape.xi / (self.gamma * self.gamma)
    }
}

/// Strip of holomorphy of the kernel's Mellin transform.
pub fn kernel_strip(k: &MeijerKernel) -> HolomorphyStrip {
    let xi = k.shape.xi;
    let lower = if k.shape.is_inv_gamma_limit() {
        f64::NEG_INFINITY
    } else {
        let c = k.shape.theta.cos();
        1.0 - xi / (k.gamma * k.gamma * c * c)
    };
    let upper = if k.shape.is_gamma_limit() {
        f64::INFINITY
    } else {
        let s = k.shape.theta.sin();
        1.0 + xi / (k.gamma * k.gamma * s * s)
    };
    HolomorphyStrip { lower, upper }
}

/// Mellin transform of the kernel at z, in log space through log-gamma.
///
/// Exactly 1 at z = 1 by construction (the transform of any density is).
pub fn kernel_mellin(k: &MeijerKernel, z: Complex64) -> Result<Complex64> {
    if z.re == 1.0 && z.im == 0.0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let strip = kernel_strip(k);
    if !strip.contains(z.re) {
        return Err(Error::OutsideStrip {
            re: z.re,
            lower: strip.lower,
            upper: strip.upper,
        });
    }
    let xi = k.shape.xi;
    let zm1 = z - 1.0;
    let log_m = if k.shape.is_gamma_limit() {
        let alpha = k.alpha();
        zm1 * k.nu.ln() - xi * zm1 * alpha.ln()
            + specfun::log_gamma(Complex64::new(alpha, 0.0) + xi * zm1)?
            - specfun::log_gamma_real(alpha)?
    } else if k.shape.is_inv_gamma_limit() {
        let alpha = k.alpha();
        zm1 * k.nu.ln() + xi * zm1 * alpha.ln()
            + specfun::log_gamma(Complex64::new(alpha, 0.0) - xi * zm1)?
            - specfun::log_gamma_real(alpha)?
    } else {
        let a = k.a_head();
        let b = k.b_tail();
        let log_inv_tan2 = -2.0 * k.shape.theta.tan().ln();
        zm1 * (k.nu.ln() + xi * log_inv_tan2)
            + specfun::log_gamma(Complex64::new(a, 0.0) + xi * zm1)?
            - specfun::log_gamma_real(a)?
            + specfun::log_gamma(Complex64::new(b, 0.0) - xi * zm1)?
            - specfun::log_gamma_real(b)?
    };
    Ok(log_m.exp())
}

/// Log-density of the kernel at x > 0.
pub fn log_kernel_density(k: &MeijerKernel, x: f64) -> Result<f64> {
    let xi = k.shape.xi;
    let lr = (x / k.nu).ln();
    let u = (lr / xi).exp();
    let prefix = -(k.nu * xi).ln() + (1.0 / xi - 1.0) * lr;
    let log_inner = if k.shape.is_gamma_limit() {
        let alpha = k.alpha();
        alpha * alpha.ln() - specfun::log_gamma_real(alpha)? + (alpha - 1.0) * u.ln() - alpha * u
    } else if k.shape.is_inv_gamma_limit() {
        let alpha = k.alpha();
        alpha * alpha.ln() - specfun::log_gamma_real(alpha)? - (alpha + 1.0) * u.ln() - alpha / u
    } else {
        let p = FParams::new(2.0 * k.a_head(), 2.0 * k.b_tail())?;
        specfun::log_f_density(u, p)?
    };
    Ok(prefix + log_inner)
}

/// Density of the kernel at x ≥ 0, as exp(log-density).
///
/// At x = 0 the value is 0, +∞ or the finite limit according to the sign of
/// the head exponent ξ/(γ² cos²θ) − 1 of the density.
pub fn kernel_density(k: &MeijerKernel, x: f64) -> Result<f64> {
    if x < 0.0 {
        return Err(Error::Domain(format!("kernel_density requires x >= 0, got {x}")));
    }
    if x == 0.0 {
        return kernel_density_at_zero(k);
    }
    Ok(log_kernel_density(k, x)?.exp())
}

fn kernel_density_at_zero(k: &MeijerKernel) -> Result<f64> {
    if k.shape.is_inv_gamma_limit() {
        // Essential zero at the origin (e^{-alpha/u} factor).
        return Ok(0.0);
    }
    let xi = k.shape.xi;
    let a = if k.shape.is_gamma_limit() { k.alpha() } else { k.a_head() };
    let exponent = a / xi - 1.0;
    if exponent > 1e-12 {
        Ok(0.0)
    } else if exponent < -1e-12 {
        Ok(f64::INFINITY)
    } else {
        // Head exponent zero: finite positive limit of the leading term.
        let log_head = if k.shape.is_gamma_limit() {
            a * a.ln() - specfun::log_gamma_real(a)?
        } else {
            let b = k.b_tail();
            a * (a / b).ln() - specfun::log_beta(a, b)?
        };
        Ok((-(k.nu * xi).ln() + log_head).exp())
    }
}

/// Coefficient of variation of the kernel, independent of ν.
///
/// Requires ξ > 2γ² sin²θ so that the second moment exists.
pub fn kernel_cv(k: &MeijerKernel) -> Result<f64> {
    let xi = k.shape.xi;
    let s = k.shape.theta.sin();
    if xi <= 2.0 * k.gamma * k.gamma * s * s {
        return Err(Error::MomentDoesNotExist(format!(
            "kernel CV needs xi > 2 gamma^2 sin^2 theta (xi = {xi}, gamma = {})",
            k.gamma
        )));
    }
    // Each factor pair is evaluated as a central second difference of
    // log-gamma, which stays accurate when the shape parameters are huge.
    let diff2 = specfun::log_gamma_central_diff2;
    let log_ratio = if k.shape.is_gamma_limit() {
        diff2(k.alpha(), xi)?
    } else if k.shape.is_inv_gamma_limit() {
        diff2(k.alpha() - 2.0 * xi, xi)?
    } else {
        diff2(k.a_head(), xi)? + diff2(k.b_tail() - 2.0 * xi, xi)?
    };
    Ok(log_ratio.exp_m1().sqrt())
}

/// Mellin transform of the squared kernel (test oracle; interior θ only).
pub fn kernel_mellin_sq(k: &MeijerKernel, z: Complex64) -> Result<Complex64> {
    if k.shape.is_gamma_limit() || k.shape.is_inv_gamma_limit() {
        return Err(Error::InvalidParameter(
            "kernel_mellin_sq is defined for theta strictly inside (0, pi/2)".into(),
        ));
    }
    let xi = k.shape.xi;
    let a = k.a_head();
    let b = k.b_tail();
    let c = k.shape.theta.cos();
    let s = k.shape.theta.sin();
    let lower = 2.0 - 2.0 * xi / (k.gamma * k.gamma * c * c);
    let upper = 2.0 + 2.0 * xi / (k.gamma * k.gamma * s * s);
    if !(lower < z.re && z.re < upper) {
        return Err(Error::OutsideStrip { re: z.re, lower, upper });
    }
    let zm2 = z - 2.0;
    let log_inv_tan2 = -2.0 * k.shape.theta.tan().ln();
    let log_m = -xi.ln() + zm2 * (k.nu.ln() + xi * log_inv_tan2)
        + specfun::log_beta(2.0 * a, 2.0 * b)?
        - 2.0 * specfun::log_beta(a, b)?
        + specfun::log_gamma(Complex64::new(2.0 * a, 0.0) + xi * zm2)?
        - specfun::log_gamma_real(2.0 * a)?
        + specfun::log_gamma(Complex64::new(2.0 * b, 0.0) - xi * zm2)?
        - specfun::log_gamma_real(2.0 * b)?;
    Ok(log_m.exp())
}

/// Per-observation kernel of the refined estimator: the spread shrinks with
/// the observation (γ = η/√(η² + x_k)) and the scale is nudged so the kernel
/// centres on the observation to second order.
pub fn per_obs_params(eta: f64, x_k: f64, shape: KernelShape) -> Result<MeijerKernel> {
    if !(eta > 0.0) {
        return Err(Error::InvalidParameter(format!("eta must be positive, got {eta}")));
    }
    if !(x_k > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "observation must be positive, got {x_k}"
        )));
    }
    let gamma = eta / (eta * eta + x_k).sqrt();
    let nu = 1.0 + 0.5 * gamma * gamma * (1.0 + (2.0 * shape.theta).cos() / shape.xi);
    MeijerKernel::new(nu, gamma, shape)
}

/// Kernel parameters (ν, γ, ξ, θ) of a named classical distribution.
///
/// Names (with parameter order): `betaprime` (α, β); `burr` (c, k);
/// `chi` (k); `chisq` (k); `dagum` (a, b, p); `erlang` (μ, k integer);
/// `f` (d1, d2); `frechet` (α, s); `gamma` (α shape, β rate);
/// `gpd` (σ, ζ); `invgamma` (α, β); `levy` (c); `loglogistic` (α, β);
/// `maxwell` (σ); `nakagami` (m, Ω); `rayleigh` (σ);
/// `singhmaddala` (a, b, q); `stacy` (a, d, p); `weibull` (μ scale, η shape).
pub fn catalog_params(name: &str, params: &[f64]) -> Result<MeijerKernel> {
    fn need(params: &[f64], n: usize, name: &str) -> Result<()> {
        if params.len() != n {
            return Err(Error::InvalidParameter(format!(
                "{name} takes {n} parameter(s), got {}",
                params.len()
            )));
        }
        for &p in params {
            if !(p > 0.0) || !p.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "{name} parameters must be positive, got {p}"
                )));
            }
        }
        Ok(())
    }
    let atan_sqrt = |x: f64| x.sqrt().atan();
    let (nu, gamma, xi, theta) = match name {
        "betaprime" => {
            need(params, 2, name)?;
            let (al, be) = (params[0], params[1]);
            (al / be, (1.0 / al + 1.0 / be).sqrt(), 1.0, atan_sqrt(al / be))
        }
        "burr" => {
            need(params, 2, name)?;
            let (c, kk) = (params[0], params[1]);
            (kk.powf(-1.0 / c), (1.0 + 1.0 / kk).sqrt() / c, 1.0 / c, atan_sqrt(1.0 / kk))
        }
        "chi" => {
            need(params, 1, name)?;
            let kk = params[0];
            (kk.sqrt(), 1.0 / (2.0 * kk).sqrt(), 0.5, 0.0)
        }
        "chisq" => {
            need(params, 1, name)?;
            let kk = params[0];
            (kk, (2.0 / kk).sqrt(), 1.0, 0.0)
        }
        "dagum" => {
            need(params, 3, name)?;
            let (a, b, p) = (params[0], params[1], params[2]);
            (b * p.powf(1.0 / a), (1.0 + 1.0 / p).sqrt() / a, 1.0 / a, atan_sqrt(p))
        }
        "erlang" => {
            need(params, 2, name)?;
            let (mu, kk) = (params[0], params[1]);
            if (kk - kk.round()).abs() > 1e-9 || kk < 1.0 {
                return Err(Error::InvalidParameter(format!(
                    "erlang order must be a positive integer, got {kk}"
                )));
            }
            (mu * kk, (1.0 / kk).sqrt(), 1.0, 0.0)
        }
        "f" => {
            need(params, 2, name)?;
            let (d1, d2) = (params[0], params[1]);
            (1.0, (2.0 / d1 + 2.0 / d2).sqrt(), 1.0, atan_sqrt(d1 / d2))
        }
        "frechet" => {
            need(params, 2, name)?;
            let (al, s) = (params[0], params[1]);
            (s, 1.0 / al, 1.0 / al, FRAC_PI_2)
        }
        "gamma" => {
            need(params, 2, name)?;
            let (al, be) = (params[0], params[1]);
            (al / be, (1.0 / al).sqrt(), 1.0, 0.0)
        }
        "gpd" => {
            need(params, 2, name)?;
            let (sig, zeta) = (params[0], params[1]);
            (sig, (zeta + 1.0).sqrt(), 1.0, atan_sqrt(zeta))
        }
        "invgamma" => {
            need(params, 2, name)?;
            let (al, be) = (params[0], params[1]);
            (be / al, (1.0 / al).sqrt(), 1.0, FRAC_PI_2)
        }
        "levy" => {
            need(params, 1, name)?;
            (params[0], 2.0f64.sqrt(), 1.0, FRAC_PI_2)
        }
        "loglogistic" => {
            need(params, 2, name)?;
            let (al, be) = (params[0], params[1]);
            (al, 2.0f64.sqrt() / be, 1.0 / be, std::f64::consts::FRAC_PI_4)
        }
        "maxwell" => {
            need(params, 1, name)?;
            let sig = params[0];
            (3.0f64.sqrt() * sig, 1.0 / 6.0f64.sqrt(), 0.5, 0.0)
        }
        "nakagami" => {
            need(params, 2, name)?;
            let (m, om) = (params[0], params[1]);
            (om.sqrt(), 1.0 / (2.0 * m.sqrt()), 0.5, 0.0)
        }
        "rayleigh" => {
            need(params, 1, name)?;
            (2.0f64.sqrt() * params[0], 0.5, 0.5, 0.0)
        }
        "singhmaddala" => {
            need(params, 3, name)?;
            let (a, b, q) = (params[0], params[1], params[2]);
            (b / q.powf(1.0 / a), (1.0 + 1.0 / q).sqrt() / a, 1.0 / a, atan_sqrt(1.0 / q))
        }
        "stacy" => {
            need(params, 3, name)?;
            let (a, d, p) = (params[0], params[1], params[2]);
            (a * (d / p).powf(1.0 / p), 1.0 / (p * d).sqrt(), 1.0 / p, 0.0)
        }
        "weibull" => {
            need(params, 2, name)?;
            let (mu, et) = (params[0], params[1]);
            (mu, 1.0 / et, 1.0 / et, 0.0)
        }
        other => return Err(Error::UnknownDistribution(other.to_string())),
    };
    MeijerKernel::new(nu, gamma, KernelShape::new(xi, theta)?)
}

/// All names accepted by [`catalog_params`], in catalog order.
pub const CATALOG_NAMES: [&str; 19] = [
    "betaprime",
    "burr",
    "chi",
    "chisq",
    "dagum",
    "erlang",
    "f",
    "frechet",
    "gamma",
    "gpd",
    "invgamma",
    "levy",
    "loglogistic",
    "maxwell",
    "nakagami",
    "rayleigh",
    "singhmaddala",
    "stacy",
    "weibull",
];
