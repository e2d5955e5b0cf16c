//! Plug-in smoothing-parameter selection in the Mellin domain.
//!
//! The selector estimates the integrated-squared-curvature functional that
//! appears in the asymptotically optimal bandwidth through the empirical
//! Mellin transform, truncated at the first local minimum of its modulus,
//! and turns it into a data-driven smoothing parameter η.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::meijer::{catalog_params, kernel_density, kernel_strip};
use crate::mellin::Sample;
use crate::quad::integrate_half_line;

/// Tuning knobs for the plug-in selector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelectorConfig {
    /// Weight exponent c of the scan line Re(z) = c.
    pub c: f64,
    /// Resolution of the frequency scan for the truncation point.
    pub omega_step: f64,
    /// Ceiling of the frequency scan (also the fallback truncation point).
    pub omega_max: f64,
    /// Hard lower bound on the returned smoothing parameter.
    pub eta_floor: f64,
}

impl Default for SelectorConfig {
    fn default() -> Self {
        Self { c: 1.5, omega_step: 0.005, omega_max: 500.0, eta_floor: 1e-6 }
    }
}

impl SelectorConfig {
    fn validate(&self) -> Result<()> {
        if !(self.c > 0.0) || !self.c.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "selector weight exponent c must be positive, got {}",
                self.c
            )));
        }
        if !(self.omega_step > 0.0) || !self.omega_step.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "omega_step must be positive, got {}",
                self.omega_step
            )));
        }
        if !(self.omega_max > self.omega_step) {
            return Err(Error::InvalidParameter(format!(
                "omega_max must exceed omega_step, got {}",
                self.omega_max
            )));
        }
        if !(self.eta_floor > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "eta_floor must be positive, got {}",
                self.eta_floor
            )));
        }
        Ok(())
    }
}

/// Sample logs in a canonical (sorted) order, so every sum below is
/// independent of the order the observations arrived in.
fn canonical_logs(s: &Sample) -> Vec<f64> {
    let mut logs = s.logs().to_vec();
    logs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    logs
}

/// Truncation point: the first strict local minimum of the modulus of the
/// empirical Mellin transform along the line that enters the curvature
/// functional, `Re = c - 1`. Falls back to `omega_max` when the scan finds
/// no local minimum.
pub fn find_t0(s: &Sample, cfg: &SelectorConfig) -> Result<f64> {
    cfg.validate()?;
    let logs = canonical_logs(s);
    let weights: Vec<f64> = logs.iter().map(|l| ((cfg.c - 2.0) * l).exp()).collect();
    // Squared modulus of n^{-1} Σ_k X_k^{(c-2) + iω}; the 1/n factor is a
    // common positive constant and does not move the minimum.
    let modulus_sq = |omega: f64| -> f64 {
        let mut re = 0.0;
        let mut im = 0.0;
        for (l, w) in logs.iter().zip(&weights) {
            let (sin, cos) = (omega * l).sin_cos();
            re += w * cos;
            im += w * sin;
        }
        re * re + im * im
    };
    let steps = (cfg.omega_max / cfg.omega_step).floor() as usize;
    // Strictly below both neighbors, with a tiny relative margin so that
    // rounding noise on a flat modulus does not read as a minimum.
    let below = |a: f64, b: f64| a < b * (1.0 - 1e-9);
    let mut prev = modulus_sq(0.0);
    let mut cur = modulus_sq(cfg.omega_step);
    for i in 1..steps {
        let next = modulus_sq((i + 1) as f64 * cfg.omega_step);
        if below(cur, prev) && below(cur, next) {
            return Ok(i as f64 * cfg.omega_step);
        }
        prev = cur;
        cur = next;
    }
    Ok(cfg.omega_max)
}

/// ∫_{-T}^{T} (ω⁴ + C ω² + A²) cos(aω) dω in closed form, where
/// A = c(c-1) and C = (2c-1)² - 2A. A Maclaurin expansion in a covers the
/// small-|a|T region where the closed form divides by high powers of a;
/// its leading term is the exact a = 0 polynomial limit.
fn window_integral(t: f64, a: f64, a_coef: f64, c_coef: f64) -> f64 {
    let at = a * t;
    if at.abs() < 0.5 {
        // 2 Σ_j (-1)^j a^{2j}/(2j)! [T^{2j+5}/(2j+5) + C T^{2j+3}/(2j+3) + A² T^{2j+1}/(2j+1)]
        let a2 = a * a;
        let t2 = t * t;
        let mut coef = 1.0; // (-1)^j a^{2j} / (2j)!
        let mut tp = t; // T^{2j+1}
        let mut sum = 0.0;
        for j in 0..=11 {
            let t1 = tp;
            let t3 = t1 * t2;
            let t5 = t3 * t2;
            sum += coef
                * (t5 / (2 * j + 5) as f64
                    + c_coef * t3 / (2 * j + 3) as f64
                    + a_coef * a_coef * t1 / (2 * j + 1) as f64);
            coef *= -a2 / ((2 * j + 1) as f64 * (2 * j + 2) as f64);
            tp = t1 * t2;
        }
        2.0 * sum
    } else {
        let (s, co) = at.sin_cos();
        let quartic = t.powi(4) * s / a + 4.0 * t.powi(3) * co / (a * a)
            - 12.0 * t * t * s / a.powi(3)
            - 24.0 * t * co / a.powi(4)
            + 24.0 * s / a.powi(5);
        let quadratic = t * t * s / a + 2.0 * t * co / (a * a) - 2.0 * s / a.powi(3);
        2.0 * (quartic + c_coef * quadratic + a_coef * a_coef * s / a)
    }
}

/// Empirical curvature functional: the truncated Mellin-domain integral of
/// the squared second-derivative transform, evaluated through the
/// closed-form frequency integral pair by pair.
pub fn i_hat(s: &Sample, c: f64, t: f64) -> Result<f64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!(
            "truncation point must be positive, got {t}"
        )));
    }
    let a_coef = c * (c - 1.0);
    let c_coef = (2.0 * c - 1.0) * (2.0 * c - 1.0) - 2.0 * a_coef;
    let logs = canonical_logs(s);
    let n = logs.len();
    let weights: Vec<f64> = logs.iter().map(|l| ((c - 2.0) * l).exp()).collect();
    // Row sums are computed independently (in parallel), each with
    // compensated summation, then combined in index order so the total does
    // not depend on the worker count.
    let rows: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|k| {
            let mut acc = weights[k] * weights[k] * window_integral(t, 0.0, a_coef, c_coef);
            let mut comp = 0.0;
            for kp in (k + 1)..n {
                let term = 2.0
                    * weights[k]
                    * weights[kp]
                    * window_integral(t, logs[k] - logs[kp], a_coef, c_coef);
                let y = term - comp;
                let s2 = acc + y;
                comp = (s2 - acc) - y;
                acc = s2;
            }
            acc
        })
        .collect();
    let mut total = 0.0;
    let mut comp = 0.0;
    for r in rows {
        let y = r - comp;
        let s2 = total + y;
        comp = (s2 - total) - y;
        total = s2;
    }
    Ok(total / (2.0 * std::f64::consts::PI * (n as f64) * (n as f64)))
}

/// Outcome of a plug-in selection, including the truncation point that was
/// used (reported by the CLI alongside the fitted density).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PluginSelection {
    pub eta: f64,
    pub t0: f64,
    pub i_hat: f64,
}

fn eta_rule(moment_mean: f64, curvature: f64, n: usize) -> f64 {
    let ratio = moment_mean / (2.0 * std::f64::consts::PI.sqrt()) / curvature;
    ratio.powf(0.2) * (n as f64).powf(-0.2)
}

/// Plug-in smoothing parameter with the truncation point it used.
pub fn plugin_eta_detail(s: &Sample, cfg: &SelectorConfig) -> Result<PluginSelection> {
    cfg.validate()?;
    let logs = canonical_logs(s);
    let spread = logs[logs.len() - 1] - logs[0];
    if spread < 1e-12 {
        return Err(Error::DegenerateCurvature);
    }
    let t0 = find_t0(s, cfg)?;
    let curvature = i_hat(s, cfg.c, t0)?;
    if curvature <= 1e-12 {
        return Err(Error::DegenerateCurvature);
    }
    let p = 2.0 * cfg.c - 1.5;
    let mut moment = 0.0;
    let mut comp = 0.0;
    for l in &logs {
        let y = (p * l).exp() - comp;
        let s2 = moment + y;
        comp = (s2 - moment) - y;
        moment = s2;
    }
    let moment_mean = moment / s.n() as f64;
    let eta = eta_rule(moment_mean, curvature, s.n()).max(cfg.eta_floor);
    Ok(PluginSelection { eta, t0, i_hat: curvature })
}

/// Plug-in smoothing parameter (the selection rule's headline output).
pub fn plugin_eta(s: &Sample, cfg: &SelectorConfig) -> Result<f64> {
    plugin_eta_detail(s, cfg).map(|sel| sel.eta)
}

/// Density together with the exponents governing its behaviour at the
/// endpoints: f(x) ~ x^head near 0 and f(x) ~ x^{-tail} at infinity
/// (infinite values mean faster-than-polynomial decay).
struct OracleDensity {
    pdf: Box<dyn Fn(f64) -> f64 + Sync>,
    head: f64,
    tail: f64,
    /// Spacing of the correction powers above the head exponent.
    head_step: f64,
}

fn oracle_density(name: &str, params: &[f64]) -> Result<OracleDensity> {
    match name {
        "lognormal" => {
            if params.len() != 2 {
                return Err(Error::InvalidParameter(
                    "lognormal takes two parameters (mu, sigma)".into(),
                ));
            }
            let (mu, sigma) = (params[0], params[1]);
            if !(sigma > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "lognormal sigma must be positive, got {sigma}"
                )));
            }
            let norm = 1.0 / (sigma * (2.0 * std::f64::consts::PI).sqrt());
            let pdf = move |x: f64| {
                if x <= 0.0 {
                    return 0.0;
                }
                let t = (x.ln() - mu) / sigma;
                norm / x * (-0.5 * t * t).exp()
            };
            Ok(OracleDensity {
                pdf: Box::new(pdf),
                head: f64::INFINITY,
                tail: f64::INFINITY,
                head_step: 1.0,
            })
        }
        "exp" => {
            if params.len() != 1 {
                return Err(Error::InvalidParameter("exp takes one rate parameter".into()));
            }
            oracle_density("gamma", &[1.0, params[0]])
        }
        _ => {
            let k = catalog_params(name, params)?;
            let strip = kernel_strip(&k);
            let head = if strip.lower.is_finite() { -strip.lower } else { f64::INFINITY };
            let tail = strip.upper;
            let xi = k.shape.xi;
            let pdf = move |x: f64| kernel_density(&k, x).unwrap_or(0.0);
            Ok(OracleDensity { pdf: Box::new(pdf), head, tail, head_step: 1.0 / xi })
        }
    }
}

/// Head exponent of f'' at 0: the smallest power p + j·step whose second
/// derivative survives (powers 0 and 1 are annihilated by d²/dx²).
fn second_derivative_head(head: f64, step: f64) -> f64 {
    if head.is_infinite() {
        return f64::INFINITY;
    }
    let mut e = head;
    for _ in 0..8 {
        if (e - 0.0).abs() > 1e-9 && (e - 1.0).abs() > 1e-9 {
            return e - 2.0;
        }
        e += step;
    }
    e - 2.0
}

/// Asymptotically optimal smoothing parameter for a known density,
/// computed by quadrature (a benchmarking aid and test oracle).
pub fn oracle_eta(name: &str, params: &[f64], n: usize, c: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter("sample size must be positive".into()));
    }
    let d = oracle_density(name, params)?;
    const MARGIN: f64 = 1e-9;

    // Numerator ∫ x^{2c-3/2} f(x) dx: converges iff the exponent stays
    // above -1 at the origin and below -1 in the tail.
    if d.head.is_finite() && 2.0 * c - 1.5 + d.head <= -1.0 + MARGIN {
        return Err(Error::DivergentIntegral(format!(
            "moment integral of order {} diverges at 0 for {name}",
            2.0 * c - 1.5
        )));
    }
    if d.tail.is_finite() && 2.0 * c - 1.5 - d.tail >= -1.0 - MARGIN {
        return Err(Error::DivergentIntegral(format!(
            "moment integral of order {} diverges in the tail for {name}",
            2.0 * c - 1.5
        )));
    }
    // Denominator ∫ x^{2c+1} f''(x)² dx with f'' ~ x^r at 0 and
    // f'' ~ x^{-tail-2} in the tail.
    let r = second_derivative_head(d.head, d.head_step);
    if r.is_finite() && 2.0 * c + 1.0 + 2.0 * r <= -1.0 + MARGIN {
        return Err(Error::DivergentIntegral(format!(
            "curvature integral diverges at 0 for {name}"
        )));
    }
    if d.tail.is_finite() && 2.0 * c + 1.0 - 2.0 * (d.tail + 2.0) >= -1.0 - MARGIN {
        return Err(Error::DivergentIntegral(format!(
            "curvature integral diverges in the tail for {name}"
        )));
    }

    let pdf = &d.pdf;
    let numerator = integrate_half_line(|x| x.powf(2.0 * c - 1.5) * pdf(x), 1e-10)
        / (2.0 * std::f64::consts::PI.sqrt());
    // Second derivative by a five-point stencil with relative spacing: the
    // truncation error is O(h⁴) and the spacing keeps x - 2h positive.
    let second = |x: f64| -> f64 {
        let h = 2e-3 * x;
        (-pdf(x - 2.0 * h) + 16.0 * pdf(x - h) - 30.0 * pdf(x) + 16.0 * pdf(x + h)
            - pdf(x + 2.0 * h))
            / (12.0 * h * h)
    };
    let denominator = integrate_half_line(
        |x| {
            let f2 = second(x);
            x.powf(2.0 * c + 1.0) * f2 * f2
        },
        1e-10,
    );
    if !(numerator > 0.0) || !numerator.is_finite() || !(denominator > 0.0)
        || !denominator.is_finite()
    {
        return Err(Error::DivergentIntegral(format!(
            "quadrature for {name} did not yield finite positive integrals"
        )));
    }
    Ok((numerator / denominator).powf(0.2) * (n as f64).powf(-0.2))
}
