use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Error, Result};

const MAX_ITER: usize = 500;
const RESIDUAL_TOL: f64 = 1e-9;

/// Horner evaluation of `sum_j coeffs[j] z^j`.
pub fn eval_poly(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

fn eval_with_derivative(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// `sum_j |c_j| |z|^j`, the natural scale for a residual at `z`.
fn magnitude_scale(coeffs: &[Complex64], z: Complex64) -> f64 {
    let r = z.norm();
    coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.norm())
}

/// All roots, with multiplicity, by Aberth–Ehrlich simultaneous iteration.
///
/// Coefficients are in ascending order; trailing zeros are trimmed first.
/// Each returned root satisfies `|p(z)| <= 1e-9 * sum_j |c_j| |z|^j`.
pub fn poly_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let end = coeffs.iter().rposition(|c| c.norm() != 0.0).map_or(0, |i| i + 1);
    let c = &coeffs[..end];
    if c.len() < 2 {
        return Err(Error::ConstantPolynomial);
    }
    // Roots at the origin split off exactly.
    let zeros = c.iter().position(|z| z.norm() != 0.0).unwrap_or(0);
    let c = &c[zeros..];
    let mut roots = vec![Complex64::new(0.0, 0.0); zeros];
    let deg = c.len() - 1;
    if deg == 0 {
        return Ok(roots);
    }
    if deg == 1 {
        roots.push(-c[0] / c[1]);
        return Ok(roots);
    }

    let lead = c[deg];
    let ratios: Vec<f64> = c[..deg].iter().map(|z| (z / lead).norm()).collect();
    let upper = 1.0 + ratios.iter().cloned().fold(0.0, f64::max);
    let lower = {
        let m = c[1..].iter().map(|z| (z / c[0]).norm()).fold(0.0, f64::max);
        1.0 / (1.0 + m)
    };
    let radius = (c[0] / lead).norm().powf(1.0 / deg as f64).clamp(lower, upper);

    let mut z: Vec<Complex64> = (0..deg)
        .map(|k| Complex64::from_polar(radius, TAU * k as f64 / deg as f64 + 0.4))
        .collect();

    let mut done = vec![false; deg];
    for _ in 0..MAX_ITER {
        let mut all_done = true;
        for k in 0..deg {
            if done[k] {
                continue;
            }
            let (p, dp) = eval_with_derivative(c, z[k]);
            if p.norm() <= 4.0 * f64::EPSILON * magnitude_scale(c, z[k]) {
                done[k] = true;
                continue;
            }
            all_done = false;
            let ratio = p / dp;
            let repulsion: Complex64 = (0..deg).filter(|&j| j != k).map(|j| (z[k] - z[j]).inv()).sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if !step.re.is_finite() || !step.im.is_finite() {
                // Coincident iterates: nudge apart.
                let bump = Complex64::from_polar(1e-8 * (1.0 + z[k].norm()), 0.7 * k as f64);
                z[k] += bump;
                continue;
            }
            z[k] -= step;
            if step.norm() <= f64::EPSILON * z[k].norm().max(f64::MIN_POSITIVE) {
                done[k] = true;
            }
        }
        if all_done {
            break;
        }
    }

    let worst = z
        .iter()
        .map(|&r| eval_poly(c, r).norm() / magnitude_scale(c, r))
        .fold(0.0, f64::max);
    if !(worst <= RESIDUAL_TOL) {
        return Err(Error::NoConvergence {
            what: "Aberth-Ehrlich root finder",
            residual: worst,
        });
    }
    roots.extend(z);
    Ok(roots)
}
