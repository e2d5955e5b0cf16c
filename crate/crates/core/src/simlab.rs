//! Monte Carlo MISE benchmarking harness.
//!
//! Provides the ten positive-support test densities (pdf, exact sampler,
//! quantile), a reproducible replicated MISE approximation on the standard
//! evaluation grid, and a factorial benchmark runner with relative-MISE
//! reporting.

use std::sync::OnceLock;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp as ExpSampler, Gamma as GammaSampler, LogNormal as LogNormalSampler, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF, Gamma as GammaDist, Normal};

use crate::error::{Error, Result};
use crate::estimator::{chen_gamma_kde, fit, lognormal_kde};
use crate::meijer::KernelShape;
use crate::mellin::Sample;
use crate::quad::integrate_half_line;
use crate::selector::{plugin_eta, SelectorConfig};

/// One benchmark truth: density, exact sampler, and quantile function.
pub struct TestDensity {
    pub id: u8,
    pub name: &'static str,
    pdf: Box<dyn Fn(f64) -> f64 + Sync + Send>,
    sampler: Box<dyn Fn(&mut ChaCha8Rng) -> f64 + Sync + Send>,
    quantile: Box<dyn Fn(f64) -> f64 + Sync + Send>,
}

impl TestDensity {
    pub fn pdf(&self, x: f64) -> f64 {
        (self.pdf)(x)
    }

    pub fn sample(&self, rng: &mut ChaCha8Rng) -> f64 {
        (self.sampler)(rng)
    }

    pub fn quantile(&self, p: f64) -> f64 {
        (self.quantile)(p)
    }
}

fn lognormal_pdf(mu: f64, sigma: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let t = (x.ln() - mu) / sigma;
    (-0.5 * t * t).exp() / (x * sigma * (2.0 * std::f64::consts::PI).sqrt())
}

fn gamma_pdf(shape: f64, rate: f64, x: f64) -> f64 {
    if x < 0.0 {
        return 0.0;
    }
    if x == 0.0 {
        return if shape > 1.0 {
            0.0
        } else if shape < 1.0 {
            f64::INFINITY
        } else {
            rate
        };
    }
    let lg = crate::specfun::log_gamma_real(shape).expect("positive shape");
    (shape * rate.ln() + (shape - 1.0) * x.ln() - rate * x - lg).exp()
}

fn gamma_cdf(shape: f64, rate: f64, x: f64) -> f64 {
    GammaDist::new(shape, rate).expect("valid gamma").cdf(x)
}

fn lognormal_cdf(mu: f64, sigma: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    Normal::new(0.0, 1.0).unwrap().cdf((x.ln() - mu) / sigma)
}

/// Quantile by bisection on a CDF: doubles the bracket upward, then bisects
/// until the interval is below 1e-10 (relative to its location).
fn bisect_quantile(cdf: impl Fn(f64) -> f64, p: f64) -> f64 {
    let mut hi = 1.0;
    while cdf(hi) < p {
        hi *= 2.0;
        if hi > 1e300 {
            return hi;
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if cdf(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-10 * hi.max(1.0) {
            break;
        }
    }
    0.5 * (lo + hi)
}

fn build_registry() -> Vec<TestDensity> {
    let normal = Normal::new(0.0, 1.0).unwrap();
    let densities: Vec<TestDensity> = vec![
        TestDensity {
            id: 1,
            name: "logN(0,1)",
            pdf: Box::new(|x| lognormal_pdf(0.0, 1.0, x)),
            sampler: Box::new(|rng| LogNormalSampler::new(0.0, 1.0).unwrap().sample(rng)),
            quantile: Box::new(move |p| normal.inverse_cdf(p).exp()),
        },
        TestDensity {
            id: 2,
            name: "chi2(1)",
            pdf: Box::new(|x| gamma_pdf(0.5, 0.5, x)),
            sampler: Box::new(|rng| {
                let z: f64 = rng.sample(StandardNormal);
                z * z
            }),
            quantile: Box::new(|p| ChiSquared::new(1.0).unwrap().inverse_cdf(p)),
        },
        TestDensity {
            id: 3,
            name: "Nakagami(1,2)",
            // 2 m^m / (Γ(m) Ω^m) x^{2m-1} exp(-m x²/Ω) with m = 1, Ω = 2
            pdf: Box::new(|x| if x <= 0.0 { 0.0 } else { x * (-0.5 * x * x).exp() }),
            sampler: Box::new(|rng| {
                let g: f64 = GammaSampler::new(1.0, 2.0).unwrap().sample(rng);
                g.sqrt()
            }),
            quantile: Box::new(|p| GammaDist::new(1.0, 0.5).unwrap().inverse_cdf(p).sqrt()),
        },
        TestDensity {
            id: 4,
            name: "Gamma(2,1/2)",
            pdf: Box::new(|x| gamma_pdf(2.0, 0.5, x)),
            sampler: Box::new(|rng| GammaSampler::new(2.0, 2.0).unwrap().sample(rng)),
            quantile: Box::new(|p| GammaDist::new(2.0, 0.5).unwrap().inverse_cdf(p)),
        },
        TestDensity {
            id: 5,
            name: "Gamma(0.7,1/2)",
            pdf: Box::new(|x| gamma_pdf(0.7, 0.5, x)),
            sampler: Box::new(|rng| GammaSampler::new(0.7, 2.0).unwrap().sample(rng)),
            quantile: Box::new(|p| GammaDist::new(0.7, 0.5).unwrap().inverse_cdf(p)),
        },
        TestDensity {
            id: 6,
            name: "Exp(1)",
            pdf: Box::new(|x| gamma_pdf(1.0, 1.0, x)),
            sampler: Box::new(|rng| ExpSampler::new(1.0).unwrap().sample(rng)),
            quantile: Box::new(|p| -(1.0 - p).ln()),
        },
        TestDensity {
            id: 7,
            name: "GPD(2/3,2/3)",
            // (1/σ)(1 + ζx/σ)^{-1/ζ-1} with σ = ζ = 2/3
            pdf: Box::new(|x| {
                if x < 0.0 {
                    return 0.0;
                }
                let (sig, zeta) = (2.0 / 3.0, 2.0 / 3.0);
                (1.0 + zeta * x / sig).powf(-1.0 / zeta - 1.0) / sig
            }),
            sampler: Box::new(|rng| {
                let (sig, zeta) = (2.0 / 3.0, 2.0 / 3.0);
                let u: f64 = rng.gen();
                sig * ((1.0 - u).powf(-zeta) - 1.0) / zeta
            }),
            quantile: Box::new(|p| {
                let (sig, zeta) = (2.0 / 3.0, 2.0 / 3.0);
                sig * ((1.0 - p).powf(-zeta) - 1.0) / zeta
            }),
        },
        TestDensity {
            id: 8,
            name: "invWeibull(1,2)",
            // scale μ = 1, shape η = 2: (η/μ)(x/μ)^{-1-η} exp(-(x/μ)^{-η})
            pdf: Box::new(|x| {
                if x <= 0.0 {
                    return 0.0;
                }
                2.0 * x.powf(-3.0) * (-x.powf(-2.0)).exp()
            }),
            sampler: Box::new(|rng| {
                let u: f64 = rng.gen();
                (-u.ln()).powf(-0.5)
            }),
            quantile: Box::new(|p| (-p.ln()).powf(-0.5)),
        },
        TestDensity {
            id: 9,
            name: "2/3 Gamma(0.7,1/2) + 1/3 Gamma(20,5)",
            pdf: Box::new(|x| {
                2.0 / 3.0 * gamma_pdf(0.7, 0.5, x) + 1.0 / 3.0 * gamma_pdf(20.0, 5.0, x)
            }),
            sampler: Box::new(|rng| {
                if rng.gen::<f64>() < 2.0 / 3.0 {
                    GammaSampler::new(0.7, 2.0).unwrap().sample(rng)
                } else {
                    GammaSampler::new(20.0, 0.2).unwrap().sample(rng)
                }
            }),
            quantile: Box::new(|p| {
                bisect_quantile(
                    |x| 2.0 / 3.0 * gamma_cdf(0.7, 0.5, x) + 1.0 / 3.0 * gamma_cdf(20.0, 5.0, x),
                    p,
                )
            }),
        },
        TestDensity {
            id: 10,
            name: "2/3 logN(0,1) + 1/3 logN(1.5,0.1)",
            pdf: Box::new(|x| {
                2.0 / 3.0 * lognormal_pdf(0.0, 1.0, x) + 1.0 / 3.0 * lognormal_pdf(1.5, 0.1, x)
            }),
            sampler: Box::new(|rng| {
                if rng.gen::<f64>() < 2.0 / 3.0 {
                    LogNormalSampler::new(0.0, 1.0).unwrap().sample(rng)
                } else {
                    LogNormalSampler::new(1.5, 0.1).unwrap().sample(rng)
                }
            }),
            quantile: Box::new(|p| {
                bisect_quantile(
                    |x| {
                        2.0 / 3.0 * lognormal_cdf(0.0, 1.0, x)
                            + 1.0 / 3.0 * lognormal_cdf(1.5, 0.1, x)
                    },
                    p,
                )
            }),
        },
    ];
    for d in &densities {
        let mass = integrate_half_line(|x| d.pdf(x), 1e-10);
        assert!(
            (mass - 1.0).abs() < 1e-8,
            "density {} does not integrate to 1: {mass}",
            d.id
        );
    }
    densities
}

/// The ten benchmark densities, validated (unit mass) on first access.
pub fn density_registry() -> &'static [TestDensity] {
    static REGISTRY: OnceLock<Vec<TestDensity>> = OnceLock::new();
    REGISTRY.get_or_init(build_registry)
}

/// Look up a benchmark density by its 1-based id.
pub fn density_by_id(id: u8) -> Result<&'static TestDensity> {
    density_registry()
        .iter()
        .find(|d| d.id == id)
        .ok_or_else(|| Error::UnknownDistribution(format!("benchmark density id {id}")))
}

/// Smoothing-parameter policy for the Mellin–Meijer estimator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bandwidth {
    /// Plug-in selection with weight exponent c.
    Plugin { c: f64 },
    /// Fixed smoothing parameter.
    Fixed { eta: f64 },
}

/// One estimator under benchmark, parsed from its table label.
#[derive(Debug, Clone, PartialEq)]
pub enum EstimatorKind {
    MellinMeijer { shape: KernelShape, bandwidth: Bandwidth },
    ChenGamma { modified: bool, b: Option<f64> },
    LogNormalKernel { h: Option<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorConfig {
    pub label: String,
    pub kind: EstimatorKind,
}

/// Angle arguments accept radians or the shorthand tokens `0`, `pi/4`, `pi/2`.
pub fn parse_theta(token: &str) -> Result<f64> {
    match token.trim() {
        "0" => Ok(0.0),
        "pi/4" => Ok(std::f64::consts::FRAC_PI_4),
        "pi/2" => Ok(std::f64::consts::FRAC_PI_2),
        other => other.parse::<f64>().map_err(|_| {
            Error::InvalidParameter(format!(
                "theta must be a number in radians or one of 0, pi/4, pi/2; got {other:?}"
            ))
        }),
    }
}

fn parse_f64(token: &str, what: &str) -> Result<f64> {
    token.parse::<f64>().map_err(|_| {
        Error::InvalidParameter(format!("{what} must be a number, got {token:?}"))
    })
}

impl EstimatorConfig {
    /// Parse a benchmark label:
    /// `mm:<xi>:<theta>[:c<val>|:eta<val>]`, `mgamma[:b<val>]`,
    /// `gamma[:b<val>]`, `lognormal[:h<val>]`.
    pub fn parse(label: &str) -> Result<Self> {
        let parts: Vec<&str> = label.split(':').collect();
        let kind = match parts[0] {
            "mm" => {
                if parts.len() < 3 || parts.len() > 4 {
                    return Err(Error::InvalidParameter(format!(
                        "mm label must be mm:<xi>:<theta>[:c<val>|:eta<val>], got {label:?}"
                    )));
                }
                let xi = parse_f64(parts[1], "xi")?;
                let theta = parse_theta(parts[2])?;
                let shape = KernelShape::new(xi, theta)?;
                let bandwidth = match parts.get(3) {
                    None => Bandwidth::Plugin { c: 1.5 },
                    Some(opt) if opt.starts_with("eta") => {
                        Bandwidth::Fixed { eta: parse_f64(&opt[3..], "eta")? }
                    }
                    Some(opt) if opt.starts_with('c') => {
                        Bandwidth::Plugin { c: parse_f64(&opt[1..], "c")? }
                    }
                    Some(opt) => {
                        return Err(Error::InvalidParameter(format!(
                            "unknown mm bandwidth option {opt:?} in {label:?}"
                        )))
                    }
                };
                EstimatorKind::MellinMeijer { shape, bandwidth }
            }
            "mgamma" | "gamma" => {
                let modified = parts[0] == "mgamma";
                let b = match parts.get(1) {
                    None => None,
                    Some(opt) if opt.starts_with('b') => Some(parse_f64(&opt[1..], "b")?),
                    Some(opt) => {
                        return Err(Error::InvalidParameter(format!(
                            "unknown {} option {opt:?} in {label:?}",
                            parts[0]
                        )))
                    }
                };
                if parts.len() > 2 {
                    return Err(Error::InvalidParameter(format!(
                        "too many options in {label:?}"
                    )));
                }
                EstimatorKind::ChenGamma { modified, b }
            }
            "lognormal" => {
                let h = match parts.get(1) {
                    None => None,
                    Some(opt) if opt.starts_with('h') => Some(parse_f64(&opt[1..], "h")?),
                    Some(opt) => {
                        return Err(Error::InvalidParameter(format!(
                            "unknown lognormal option {opt:?} in {label:?}"
                        )))
                    }
                };
                if parts.len() > 2 {
                    return Err(Error::InvalidParameter(format!(
                        "too many options in {label:?}"
                    )));
                }
                EstimatorKind::LogNormalKernel { h }
            }
            other => {
                return Err(Error::InvalidParameter(format!(
                    "unknown estimator label {other:?} (expected mm, mgamma, gamma, or lognormal)"
                )))
            }
        };
        Ok(Self { label: label.to_string(), kind })
    }
}

/// Reference-rule bandwidth for the Chen Gamma kernel estimators: minimize
/// the asymptotic MISE b²/4 ∫x²f''² + (2√π n)⁻¹ b^{-1/2} ∫f/√x with a
/// log-normal reference density fitted to the log-moments of the sample.
fn gamma_reference_bandwidth(s: &Sample) -> f64 {
    let n = s.n() as f64;
    let logs = s.logs();
    let mu = logs.iter().sum::<f64>() / n;
    let var = logs.iter().map(|l| (l - mu) * (l - mu)).sum::<f64>() / (n - 1.0).max(1.0);
    let sigma = var.sqrt().max(1e-3);
    // E X^{-1/2} for logN(μ, σ²)
    let v = (-0.5 * mu + 0.125 * sigma * sigma).exp();
    // ∫ x² f''(x)² dx with the log-normal f'' = f · (g'' + g'²), g = log f
    let r = integrate_half_line(
        |x| {
            let f = lognormal_pdf(mu, sigma, x);
            if f == 0.0 {
                return 0.0;
            }
            let t = (x.ln() - mu) / (sigma * sigma);
            let gp = -(1.0 / x) - t / x;
            let gpp = 1.0 / (x * x) - (1.0 - (x.ln() - mu)) / (sigma * sigma * x * x);
            let f2 = f * (gpp + gp * gp);
            x * x * f2 * f2
        },
        1e-8,
    );
    (v / (2.0 * std::f64::consts::PI.sqrt() * r)).powf(0.4) * n.powf(-0.4)
}

/// Normal-reference bandwidth on the log scale for the log-Normal kernel.
fn lognormal_reference_bandwidth(s: &Sample) -> f64 {
    let n = s.n() as f64;
    let logs = s.logs();
    let mu = logs.iter().sum::<f64>() / n;
    let var = logs.iter().map(|l| (l - mu) * (l - mu)).sum::<f64>() / (n - 1.0).max(1.0);
    (1.06 * var.sqrt().max(1e-3) * n.powf(-0.2)).max(1e-6)
}

/// Mean squared error over the evaluation grid (the uniform-grid ISE).
fn grid_ise(fhat: &[f64], truth: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (a, b) in fhat.iter().zip(truth) {
        let d = a - b;
        acc += d * d;
    }
    acc / fhat.len() as f64
}

fn replicate_ise(
    est: &EstimatorConfig,
    sample: Sample,
    xs: &[f64],
    truth: &[f64],
) -> Result<f64> {
    let fhat: Vec<f64> = match &est.kind {
        EstimatorKind::MellinMeijer { shape, bandwidth } => {
            let eta = match bandwidth {
                Bandwidth::Fixed { eta } => *eta,
                Bandwidth::Plugin { c } => {
                    let cfg = SelectorConfig { c: *c, ..SelectorConfig::default() };
                    plugin_eta(&sample, &cfg)?
                }
            };
            let fitted = fit(sample, *shape, eta)?;
            fitted.evaluate_grid(xs)?
        }
        EstimatorKind::ChenGamma { modified, b } => {
            let b = b.unwrap_or_else(|| gamma_reference_bandwidth(&sample));
            xs.iter()
                .map(|&x| chen_gamma_kde(&sample, b, x, *modified))
                .collect::<Result<Vec<f64>>>()?
        }
        EstimatorKind::LogNormalKernel { h } => {
            let h = h.unwrap_or_else(|| lognormal_reference_bandwidth(&sample));
            xs.iter()
                .map(|&x| lognormal_kde(&sample, h, x))
                .collect::<Result<Vec<f64>>>()?
        }
    };
    Ok(grid_ise(&fhat, truth))
}

/// Result of one benchmark cell: the averaged MISE and its per-replicate
/// integrated squared errors.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchResult {
    pub density_id: u8,
    pub estimator_label: String,
    pub n: usize,
    pub m: usize,
    pub mise: f64,
    pub per_replicate_ise: Vec<f64>,
    pub seed: u64,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent stream seed for one replicate. Depends on the density but
/// not the estimator, so competing estimators see identical samples.
fn stream_seed(seed: u64, density_id: u8, replicate: u64) -> u64 {
    splitmix64(splitmix64(seed ^ splitmix64(density_id as u64)) ^ replicate)
}

/// Replicated MISE of one estimator on one benchmark density.
///
/// Replicates run in parallel, each on its own seed-derived RNG stream;
/// aggregation is in replicate order, so results are reproducible for a
/// given seed regardless of the worker count.
pub fn mise(
    density_id: u8,
    est: &EstimatorConfig,
    n: usize,
    m: usize,
    seed: u64,
) -> Result<BenchResult> {
    if n < 10 {
        return Err(Error::InvalidParameter(format!(
            "benchmark sample size must be at least 10, got {n}"
        )));
    }
    if m < 1 {
        return Err(Error::InvalidParameter("replicate count must be positive".into()));
    }
    let d = density_by_id(density_id)?;
    let q = d.quantile(0.9999);
    let count = 1000usize;
    let xs: Vec<f64> = (1..=count).map(|i| i as f64 * q / count as f64).collect();
    let truth: Vec<f64> = xs.iter().map(|&x| d.pdf(x)).collect();
    let outcomes: Vec<Result<f64>> = (0..m)
        .into_par_iter()
        .map(|rep| {
            let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(seed, density_id, rep as u64));
            let data: Vec<f64> = (0..n).map(|_| d.sample(&mut rng)).collect();
            replicate_ise(est, Sample::new(data)?, &xs, &truth)
        })
        .collect();
    let mut ises = Vec::with_capacity(m);
    let mut failures = 0usize;
    for o in outcomes {
        match o {
            Ok(ise) => ises.push(ise),
            Err(_) => failures += 1,
        }
    }
    if failures * 20 > m {
        return Err(Error::InvalidSample(format!(
            "{failures} of {m} replicates failed for density {density_id}, estimator {}",
            est.label
        )));
    }
    let mise = ises.iter().sum::<f64>() / ises.len() as f64;
    Ok(BenchResult {
        density_id,
        estimator_label: est.label.clone(),
        n,
        m,
        mise,
        per_replicate_ise: ises,
        seed,
    })
}

/// Full factorial benchmark over densities × estimators.
pub fn bench_table(
    ests: &[EstimatorConfig],
    densities: &[u8],
    n: usize,
    m: usize,
    seed: u64,
) -> Result<Vec<BenchResult>> {
    if ests.is_empty() || densities.is_empty() {
        return Err(Error::InvalidParameter(
            "benchmark needs at least one density and one estimator".into(),
        ));
    }
    let mut out = Vec::with_capacity(ests.len() * densities.len());
    for &d in densities {
        for e in ests {
            out.push(mise(d, e, n, m, seed)?);
        }
    }
    Ok(out)
}

/// MISE of every row divided by the baseline estimator's MISE on the same
/// density (the usual relative-table convention; baseline over itself is
/// exactly 1).
pub fn relative_mise(table: &[BenchResult], baseline_label: &str) -> Result<Vec<f64>> {
    table
        .iter()
        .map(|row| {
            let base = table
                .iter()
                .find(|r| {
                    r.density_id == row.density_id
                        && r.n == row.n
                        && r.estimator_label == baseline_label
                })
                .ok_or_else(|| {
                    Error::InvalidParameter(format!(
                        "baseline estimator {baseline_label:?} missing for density {}",
                        row.density_id
                    ))
                })?;
            if std::ptr::eq(row, base) {
                return Ok(1.0);
            }
            Ok(row.mise / base.mise)
        })
        .collect()
}
