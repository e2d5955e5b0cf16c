//! Double-exponential quadrature used by tests and oracles.
//!
//! Integrals over (0, inf) are mapped to the whole real line via x = e^t and
//! then handled by the sinh-sinh rule t = sinh((pi/2) sinh u). The node
//! spacing is halved until two successive trapezoid estimates agree to the
//! requested absolute tolerance. This is deliberately simple: it only runs
//! inside tests and the oracle-bandwidth helper, never in the estimator.

use num_complex::Complex64;
use std::f64::consts::FRAC_PI_2;

/// Largest |u| ever visited; beyond this the weights overflow f64 anyway.
const U_CUTOFF: f64 = 5.0;

/// Trapezoid sum of g over the real line at spacing h, under the sinh-sinh map.
fn sinh_sinh_pass(g: &impl Fn(f64) -> Complex64, h: f64) -> Complex64 {
    let node = |u: f64| -> Complex64 {
        let s = FRAC_PI_2 * u.sinh();
        let t = s.sinh();
        let w = FRAC_PI_2 * u.cosh() * s.cosh();
        if !w.is_finite() {
            return Complex64::new(0.0, 0.0);
        }
        let v = g(t) * w;
        if v.re.is_finite() && v.im.is_finite() {
            v
        } else {
            Complex64::new(0.0, 0.0)
        }
    };
    let mut sum = node(0.0);
    for sign in [1.0f64, -1.0] {
        let mut dead = 0;
        let mut k = 1usize;
        loop {
            let u = sign * h * k as f64;
            if u.abs() > U_CUTOFF {
                break;
            }
            let v = node(u);
            sum += v;
            if v.norm() <= 1e-300 + 1e-17 * sum.norm() {
                dead += 1;
                if dead >= 20 {
                    break;
                }
            } else {
                dead = 0;
            }
            k += 1;
        }
    }
    sum * h
}

/// Integral of g over (-inf, inf) for integrands decaying at both ends.
pub fn integrate_real_line_complex(g: impl Fn(f64) -> Complex64, tol: f64) -> Complex64 {
    let mut h = 0.5;
    let mut prev = sinh_sinh_pass(&g, h);
    for _ in 0..8 {
        h *= 0.5;
        let cur = sinh_sinh_pass(&g, h);
        if (cur - prev).norm() <= tol.max(1e-15 * cur.norm()) {
            return cur;
        }
        prev = cur;
    }
    prev
}

/// Integral of f over (0, inf).
pub fn integrate_half_line_complex(f: impl Fn(f64) -> Complex64, tol: f64) -> Complex64 {
    integrate_real_line_complex(
        |t| {
            let x = t.exp();
            if x == 0.0 || !x.is_finite() {
                Complex64::new(0.0, 0.0)
            } else {
                f(x) * x
            }
        },
        tol,
    )
}

/// Real-valued integral of f over (0, inf).
pub fn integrate_half_line(f: impl Fn(f64) -> f64, tol: f64) -> f64 {
    integrate_half_line_complex(|x| Complex64::new(f(x), 0.0), tol).re
}

/// Real-valued integral over the whole real line.
pub fn integrate_real_line(g: impl Fn(f64) -> f64, tol: f64) -> f64 {
    integrate_real_line_complex(|t| Complex64::new(g(t), 0.0), tol).re
}
