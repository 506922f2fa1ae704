use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::MultiAffine2Poly;

const GRID: usize = 4096;
const GOLDEN_WIDTH: f64 = 1e-12;

/// Real trigonometric polynomial `u0 + u1 z + conj(u1 z)` on the circle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrigDeg1 {
    pub u0: f64,
    pub u1: Complex64,
}

impl TrigDeg1 {
    pub fn eval(&self, theta: f64) -> f64 {
        self.u0 + 2.0 * (self.u1 * Complex64::from_polar(1.0, theta)).re
    }

    /// Minimizer on the circle, as a unit complex number.
    pub fn argmin(&self) -> Complex64 {
        let r = self.u1.norm();
        if r == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            -self.u1.conj() / r
        }
    }
}

/// Closed-form minimum `u0 - 2|u1|` over the circle.
pub fn torus_min_deg1(t: &TrigDeg1) -> f64 {
    t.u0 - 2.0 * t.u1.norm()
}

/// Minimum of a 1-periodic profile over `[0, 2 pi)`: a uniform grid of 4096
/// angles, then golden-section refinement around the best grid point.
/// Returns `(minimum, angle)`.
pub fn torus_min_profile(f: impl Fn(f64) -> f64) -> (f64, f64) {
    let step = TAU / GRID as f64;
    let (mut best_i, mut best) = (0, f64::INFINITY);
    for i in 0..GRID {
        let v = f(i as f64 * step);
        if v < best {
            best = v;
            best_i = i;
        }
    }
    let center = best_i as f64 * step;
    let (mut lo, mut hi) = (center - step, center + step);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > GOLDEN_WIDTH {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    let (xr, fr) = if f1 < f2 { (x1, f1) } else { (x2, f2) };
    if fr < best {
        (fr, xr.rem_euclid(TAU))
    } else {
        (best, center)
    }
}

/// Hermitian trigonometric polynomial of degree one in each of two
/// variables: `t(z_1, z_2) = sum_{m, n in {-1, 0, 1}} t_{m,n} z_1^m z_2^n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrigPoly11 {
    /// `coeffs[m + 1][n + 1] = t_{m,n}`.
    pub coeffs: [[Complex64; 3]; 3],
}

impl TrigPoly11 {
    #[inline]
    pub fn get(&self, m: i32, n: i32) -> Complex64 {
        self.coeffs[(m + 1) as usize][(n + 1) as usize]
    }

    pub fn constant(c: f64) -> Self {
        let mut coeffs = [[Complex64::new(0.0, 0.0); 3]; 3];
        coeffs[1][1] = Complex64::new(c, 0.0);
        Self { coeffs }
    }

    /// `|a|^2 - |b|^2` restricted to the torus.
    pub fn from_ab(a: &MultiAffine2Poly, b: &MultiAffine2Poly) -> Self {
        let mut coeffs = [[Complex64::new(0.0, 0.0); 3]; 3];
        for al in 0..4usize {
            for be in 0..4usize {
                let m = (al & 1) as i32 - (be & 1) as i32;
                let n = (al >> 1 & 1) as i32 - (be >> 1 & 1) as i32;
                coeffs[(m + 1) as usize][(n + 1) as usize] +=
                    a.coeffs[al] * a.coeffs[be].conj() - b.coeffs[al] * b.coeffs[be].conj();
            }
        }
        Self { coeffs }
    }

    /// `t_{-m,-n} = conj(t_{m,n})` within `tol`.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        (-1..=1).all(|m| (-1..=1).all(|n| (self.get(-m, -n) - self.get(m, n).conj()).norm() <= tol))
    }

    pub fn add_constant(&self, eps: f64) -> Self {
        let mut out = *self;
        out.coeffs[1][1] += eps;
        out
    }

    /// Value at a torus point (negative powers taken as conjugates).
    pub fn eval_torus(&self, z1: Complex64, z2: Complex64) -> f64 {
        let p1 = [z1.conj(), Complex64::new(1.0, 0.0), z1];
        let p2 = [z2.conj(), Complex64::new(1.0, 0.0), z2];
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, row) in self.coeffs.iter().enumerate() {
            for (j, t) in row.iter().enumerate() {
                acc += t * p1[i] * p2[j];
            }
        }
        acc.re
    }

    /// `t_0(z_1) = sum_m t_{m,0} z_1^m` on the circle.
    pub fn t0(&self, z1: Complex64) -> f64 {
        (self.get(-1, 0) * z1.conj() + self.get(0, 0) + self.get(1, 0) * z1).re
    }

    /// `t_1(z_1) = sum_m t_{m,1} z_1^m` on the circle.
    pub fn t1(&self, z1: Complex64) -> Complex64 {
        self.get(-1, 1) * z1.conj() + self.get(0, 1) + self.get(1, 1) * z1
    }

    /// Minimum over the torus of `t`, as `(min, z_1, z_2)`, from the profile
    /// `t_0(z_1) - 2 |t_1(z_1)|` obtained by minimizing over `z_2`.
    pub fn min_on_torus(&self) -> (f64, Complex64, Complex64) {
        let (min, theta) = torus_min_profile(|th| {
            let z1 = Complex64::from_polar(1.0, th);
            self.t0(z1) - 2.0 * self.t1(z1).norm()
        });
        let z1 = Complex64::from_polar(1.0, theta);
        let t1 = self.t1(z1);
        let z2 = if t1.norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            -t1.conj() / t1.norm()
        };
        (min, z1, z2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn closed_form_minimum() {
        assert_eq!(torus_min_deg1(&TrigDeg1 { u0: 1.0, u1: c(0.0) }), 1.0);
        assert_eq!(torus_min_deg1(&TrigDeg1 { u0: 1.0, u1: c(0.5) }), 0.0);
        let t = TrigDeg1 {
            u0: 2.0,
            u1: Complex64::new(0.3, -0.4),
        };
        let (m, th) = torus_min_profile(|th| t.eval(th));
        assert!((m - torus_min_deg1(&t)).abs() < 1e-12);
        assert!((Complex64::from_polar(1.0, th) - t.argmin()).norm() < 1e-6);
    }

    #[test]
    fn boundary_three_variable_profile() {
        // |a|^2 - |b|^2 for p = 1 - (z1 + z2 + z3) / 3 vanishes at (1, 1).
        let a = MultiAffine2Poly {
            coeffs: [c(1.0), c(-1.0 / 3.0), c(-1.0 / 3.0), c(0.0)],
        };
        let b = MultiAffine2Poly {
            coeffs: [c(-1.0 / 3.0), c(0.0), c(0.0), c(0.0)],
        };
        let t = TrigPoly11::from_ab(&a, &b);
        assert!(t.is_hermitian(0.0));
        let (m, z1, z2) = t.min_on_torus();
        assert!(m.abs() < 1e-9, "min {m}");
        assert!((z1 - c(1.0)).norm() < 1e-4 && (z2 - c(1.0)).norm() < 1e-4);
        assert!(t.eval_torus(c(1.0), c(1.0)).abs() < 1e-15);
    }
}
