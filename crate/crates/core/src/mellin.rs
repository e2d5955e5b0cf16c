//! Empirical and analytic Mellin transforms along vertical lines, plus a
//! Parseval-based test utility.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::estimator::DensityGrid;
use crate::meijer::{catalog_params, kernel_mellin};

/// A validated sample of strictly positive observations.
///
/// Logs are cached at construction: the selector evaluates the empirical
/// transform at thousands of line points and each evaluation needs every
/// log X_k.
#[derive(Debug, Clone)]
pub struct Sample {
    values: Vec<f64>,
    logs: Vec<f64>,
}

impl Sample {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidSample("sample is empty".into()));
        }
        for (i, &v) in values.iter().enumerate() {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidSample(format!(
                    "observation {} is {v}; all values must be positive and finite",
                    i + 1
                )));
            }
        }
        let logs = values.iter().map(|v| v.ln()).collect();
        Ok(Self { values, logs })
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn logs(&self) -> &[f64] {
        &self.logs
    }
}

/// A transform sampled along the vertical line Re(z) = c.
#[derive(Debug, Clone)]
pub struct MellinLine {
    pub c: f64,
    pub omegas: Vec<f64>,
    pub values: Vec<Complex64>,
}

/// Empirical Mellin transform n⁻¹ Σ X_k^{z−1} of the sample measure.
pub fn empirical_mellin(s: &Sample, z: Complex64) -> Complex64 {
    let zm1 = z - 1.0;
    let mut acc = Complex64::new(0.0, 0.0);
    for &lx in s.logs() {
        acc += (zm1 * lx).exp();
    }
    acc / s.n() as f64
}

/// Empirical transform sampled at c + iω for ω = 0, step, ..., omega_max.
pub fn mellin_line(s: &Sample, c: f64, omega_max: f64, step: f64) -> Result<MellinLine> {
    if !(omega_max > 0.0) || !(step > 0.0) {
        return Err(Error::Domain(format!(
            "mellin_line needs positive omega_max and step, got ({omega_max}, {step})"
        )));
    }
    let count = (omega_max / step).floor() as usize + 1;
    let omegas: Vec<f64> = (0..count).map(|i| i as f64 * step).collect();
    let values: Vec<Complex64> = omegas
        .par_iter()
        .map(|&w| empirical_mellin(s, Complex64::new(c, w)))
        .collect();
    Ok(MellinLine { c, omegas, values })
}

/// Exact Mellin transform of a named distribution at z.
///
/// Accepts every catalog name plus `lognormal` (μ, σ) via its entire-plane
/// closed form and `exp` (λ) as a Gamma(1, λ) shorthand.
pub fn analytic_mellin(name: &str, params: &[f64], z: Complex64) -> Result<Complex64> {
    match name {
        "lognormal" => {
            if params.len() != 2 || !(params[1] > 0.0) {
                return Err(Error::InvalidParameter(
                    "lognormal takes (mu, sigma) with sigma > 0".into(),
                ));
            }
            let (mu, sigma) = (params[0], params[1]);
            let zm1 = z - 1.0;
            Ok((mu * zm1 + 0.5 * sigma * sigma * zm1 * zm1).exp())
        }
        "exp" => {
            if params.len() != 1 {
                return Err(Error::InvalidParameter("exp takes one rate parameter".into()));
            }
            let k = catalog_params("gamma", &[1.0, params[0]])?;
            kernel_mellin(&k, z)
        }
        _ => {
            let k = catalog_params(name, params)?;
            kernel_mellin(&k, z)
        }
    }
}

/// Discrepancy between the two sides of the Mellin-Parseval identity
/// ∫ x^{2c−1} f²(x) dx = (1/2π) ∫ |M(f; c+iω)|² dω,
/// both approximated by trapezoid sums on the supplied grids. The ω-integral
/// runs over the whole line; by conjugate symmetry it is twice the sum over
/// the nonnegative ω's stored in the line.
pub fn parseval_check(f_grid: &DensityGrid, line: &MellinLine) -> f64 {
    let c = line.c;
    let mut left = 0.0;
    for i in 1..f_grid.xs.len() {
        let g = |j: usize| f_grid.xs[j].powf(2.0 * c - 1.0) * f_grid.ys[j] * f_grid.ys[j];
        left += 0.5 * (g(i - 1) + g(i)) * (f_grid.xs[i] - f_grid.xs[i - 1]);
    }
    let mut right = 0.0;
    for i in 1..line.omegas.len() {
        let g = |j: usize| line.values[j].norm_sqr();
        right += 0.5 * (g(i - 1) + g(i)) * (line.omegas[i] - line.omegas[i - 1]);
    }
    right /= std::f64::consts::PI; // (1/2π) × (2 × positive half)
    (left - right).abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_distr::Distribution;

    fn sample(vals: &[f64]) -> Sample {
        Sample::new(vals.to_vec()).unwrap()
    }

    #[test]
    fn sample_validation() {
        assert!(Sample::new(vec![]).is_err());
        assert!(Sample::new(vec![1.0, -2.0]).is_err());
        assert!(Sample::new(vec![1.0, 0.0]).is_err());
        assert!(Sample::new(vec![1.0, f64::NAN]).is_err());
        assert_eq!(sample(&[3.0, 1.0]).n(), 2);
    }

    #[test]
    fn empirical_trivials() {
        let s = sample(&[0.3, 2.0, 11.0]);
        let m = empirical_mellin(&s, Complex64::new(1.0, 0.0));
        assert!((m - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        let ones = sample(&[1.0, 1.0, 1.0]);
        let m = empirical_mellin(&ones, Complex64::new(0.3, 7.0));
        assert!((m - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        let s = sample(&[1.0, 2.0, 4.0]);
        let m = empirical_mellin(&s, Complex64::new(2.0, 0.0));
        assert!((m.re - 7.0 / 3.0).abs() < 1e-14 && m.im.abs() < 1e-15);
    }

    #[test]
    fn conjugate_symmetry_and_scaling() {
        let s = sample(&[0.5, 1.3, 2.7, 9.0, 0.02]);
        let z = Complex64::new(1.4, 3.3);
        let a = empirical_mellin(&s, z);
        let b = empirical_mellin(&s, z.conj());
        assert!((a - b.conj()).norm() < 1e-12);
        for &scale in &[0.1, 3.0] {
            let scaled = sample(&s.values().iter().map(|v| scale * v).collect::<Vec<_>>());
            let lhs = empirical_mellin(&scaled, z);
            let rhs = Complex64::new(scale, 0.0).powc(z - 1.0) * empirical_mellin(&s, z);
            assert!((lhs - rhs).norm() < 1e-10 * rhs.norm());
        }
    }

    #[test]
    fn line_shape() {
        let s = sample(&[1.0, 2.0, 4.0]);
        let line = mellin_line(&s, 2.0, 1.0, 0.25).unwrap();
        assert_eq!(line.omegas.len(), 5);
        assert_eq!(line.omegas[0], 0.0);
        assert!((line.values[0].re - 7.0 / 3.0).abs() < 1e-14);
        // |M| even in omega by conjugate symmetry
        let m = empirical_mellin(&s, Complex64::new(2.0, -0.5));
        assert!((line.values[2].norm() - m.norm()).abs() < 1e-13);
        assert!(mellin_line(&s, 2.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn analytic_values() {
        // Gamma(2, 0.5) at z = 3: E X^2 = alpha (alpha+1)/beta^2 = 24
        let m = analytic_mellin("gamma", &[2.0, 0.5], Complex64::new(3.0, 0.0)).unwrap();
        assert!((m.re - 24.0).abs() < 1e-10 && m.im.abs() < 1e-12);
        // Exp(1) at z = 2.5: Γ(2.5)
        let m = analytic_mellin("exp", &[1.0], Complex64::new(2.5, 0.0)).unwrap();
        assert!((m.re - 1.3293403881791370).abs() < 1e-12);
        // log-Normal(0,1) at z = 1
        let m = analytic_mellin("lognormal", &[0.0, 1.0], Complex64::new(1.0, 0.0)).unwrap();
        assert!((m - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!(analytic_mellin("nosuch", &[1.0], Complex64::new(1.0, 0.0)).is_err());
        // strip violation surfaces
        assert!(analytic_mellin("gamma", &[1.0, 1.0], Complex64::new(-0.5, 0.0)).is_err());
    }

    #[test]
    fn empirical_tracks_analytic_on_lognormal() {
        // modulus decays from |M(f; 1/2)| toward noise of order n^{-1/2}
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        let norm = rand_distr::Normal::new(0.0, 1.0).unwrap();
        let vals: Vec<f64> = (0..500).map(|_| f64::exp(norm.sample(&mut rng))).collect();
        let s = Sample::new(vals).unwrap();
        let line = mellin_line(&s, 0.5, 30.0, 0.05).unwrap();
        let at0 = line.values[0].norm();
        let truth0 = analytic_mellin("lognormal", &[0.0, 1.0], Complex64::new(0.5, 0.0))
            .unwrap()
            .norm();
        assert!((at0 - truth0).abs() < 0.2 * truth0, "at0 {at0} vs {truth0}");
        // far out on the line the analytic transform is essentially zero and
        // the empirical modulus hovers at sampling-noise scale
        let tail_max = line.values[400..].iter().map(|v| v.norm()).fold(0.0, f64::max);
        assert!(tail_max < 6.0 / (500f64).sqrt(), "tail max {tail_max}");
    }

    #[test]
    fn consistency_rate() {
        // |empirical - analytic| at z = 1.5 decays like n^{-1/2} for
        // Gamma(2,1) data: check the log-log slope over n = 1e2, 1e3, 1e4.
        let z = Complex64::new(1.5, 0.0);
        let truth = analytic_mellin("gamma", &[2.0, 1.0], z).unwrap();
        let gamma = rand_distr::Gamma::new(2.0, 1.0).unwrap();
        let mut mean_err = Vec::new();
        for (i, &n) in [100usize, 1000, 10000].iter().enumerate() {
            let mut acc = 0.0;
            for rep in 0..200u64 {
                let mut rng =
                    rand_chacha::ChaCha8Rng::seed_from_u64(1000 * (i as u64 + 1) + rep);
                let vals: Vec<f64> = (0..n).map(|_| gamma.sample(&mut rng)).collect();
                let s = Sample::new(vals).unwrap();
                acc += (empirical_mellin(&s, z) - truth).norm();
            }
            mean_err.push((acc / 200.0).ln());
        }
        let slope = (mean_err[2] - mean_err[0]) / ((10000f64).ln() - (100f64).ln());
        assert!(
            (slope + 0.5).abs() < 0.15,
            "log-log slope {slope}, expected about -0.5"
        );
    }

    #[test]
    fn parseval_examples() {
        // Exp(1), c = 1: ∫ x e^{-2x} dx = 1/4 against (1/2π)∫|Γ(1+iω)|² dω
        let xs: Vec<f64> = (1..=4000).map(|i| i as f64 * 0.005).collect();
        let ys: Vec<f64> = xs.iter().map(|&x| (-x).exp()).collect();
        let grid = DensityGrid::new(xs, ys).unwrap();
        let omegas: Vec<f64> = (0..=3000).map(|i| i as f64 * 0.01).collect();
        let values: Vec<Complex64> = omegas
            .iter()
            .map(|&w| analytic_mellin("exp", &[1.0], Complex64::new(1.0, w)).unwrap())
            .collect();
        let line = MellinLine { c: 1.0, omegas: omegas.clone(), values };
        assert!(parseval_check(&grid, &line) < 1e-3);

        // Gamma(2,1), c = 1
        let xs: Vec<f64> = (1..=6000).map(|i| i as f64 * 0.005).collect();
        let ys: Vec<f64> = xs.iter().map(|&x| x * (-x).exp()).collect();
        let grid = DensityGrid::new(xs, ys).unwrap();
        let values: Vec<Complex64> = omegas
            .iter()
            .map(|&w| analytic_mellin("gamma", &[2.0, 1.0], Complex64::new(1.0, w)).unwrap())
            .collect();
        let line = MellinLine { c: 1.0, omegas, values };
        assert!(parseval_check(&grid, &line) < 1e-3);

        // degenerate all-zero grid: left side vanishes
        let xs: Vec<f64> = (1..=10).map(|i| i as f64).collect();
        let grid = DensityGrid::new(xs, vec![0.0; 10]).unwrap();
        let empty = MellinLine {
            c: 1.0,
            omegas: vec![0.0],
            values: vec![Complex64::new(0.0, 0.0)],
        };
        assert_eq!(parseval_check(&grid, &empty), 0.0);
    }
}
