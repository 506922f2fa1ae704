//! The rational inner matrix
//!
//! ```text
//! V = 1/a [ b~   E~^t                                ]
//!         [ E    (E E~^t - a (a~ + b) I) / (a + b~)  ]
//! ```
//!
//! with reflections at multidegree (1, 1). `V` is unitary on the torus.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::EFactor;
use crate::error::{Error, Result};
use crate::numerics::CMatrix;
use crate::poly::MultiAffine2Poly;

/// Values below this, relative to the coefficient scale, count as zeros.
const POLE_TOL: f64 = 1e-12;

/// Bidegree-(2, 2) coefficient table, `[i][j]` multiplying `z1^i z2^j`.
pub type Coeffs22 = [[Complex64; 3]; 3];

/// Evaluator for `V(z1, z2)`.
#[derive(Clone, Debug)]
pub struct InnerMatrix {
    a: MultiAffine2Poly,
    b: MultiAffine2Poly,
    a_r: MultiAffine2Poly,
    b_r: MultiAffine2Poly,
    e: [MultiAffine2Poly; 2],
    e_r: [MultiAffine2Poly; 2],
    scale: f64,
}

/// Builds the evaluator for `V` from `p = a + b z3` and the factor `E`.
pub fn build_v(a: &MultiAffine2Poly, b: &MultiAffine2Poly, e: &EFactor) -> InnerMatrix {
    let comps = e.components();
    let scale = a
        .coeffs
        .iter()
        .chain(&b.coeffs)
        .map(|z| z.norm())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    InnerMatrix {
        a: *a,
        b: *b,
        a_r: a.reflect(),
        b_r: b.reflect(),
        e_r: [comps[0].reflect(), comps[1].reflect()],
        e: comps,
        scale,
    }
}

impl InnerMatrix {
    /// `V(z1, z2)`; `Pole` at zeros of `a` or `a + b~`.
    pub fn eval(&self, z1: Complex64, z2: Complex64) -> Result<CMatrix> {
        let a = self.a.eval(z1, z2);
        let b = self.b.eval(z1, z2);
        let a_r = self.a_r.eval(z1, z2);
        let b_r = self.b_r.eval(z1, z2);
        if a.norm() <= POLE_TOL * self.scale {
            return Err(Error::Pole("a"));
        }
        let den = a + b_r;
        if den.norm() <= POLE_TOL * self.scale {
            return Err(Error::Pole("a + b~"));
        }
        let e = [self.e[0].eval(z1, z2), self.e[1].eval(z1, z2)];
        let e_r = [self.e_r[0].eval(z1, z2), self.e_r[1].eval(z1, z2)];
        let mut v = CMatrix::zeros(3, 3);
        v[(0, 0)] = b_r;
        for i in 0..2 {
            v[(0, i + 1)] = e_r[i];
            v[(i + 1, 0)] = e[i];
            for j in 0..2 {
                let diag = if i == j {
                    a * (a_r + b)
                } else {
                    Complex64::new(0.0, 0.0)
                };
                v[(i + 1, j + 1)] = (e[i] * e_r[j] - diag) / den;
            }
        }
        Ok(v.scale(a.inv()))
    }

    /// Largest `||V^* V - I||_F` over `samples` seeded torus points, skipping poles.
    pub fn unitarity_defect(&self, samples: usize, seed: u64) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst: f64 = 0.0;
        for _ in 0..samples {
            let z1 = Complex64::from_polar(1.0, TAU * rng.gen::<f64>());
            let z2 = Complex64::from_polar(1.0, TAU * rng.gen::<f64>());
            if let Ok(v) = self.eval(z1, z2) {
                let g = v.gram().sub(&CMatrix::identity(3)).expect("3x3");
                worst = worst.max(g.frobenius_norm());
            }
        }
        worst
    }
}

/// Coefficients of the product of two multi-affine polynomials.
pub fn product(p: &MultiAffine2Poly, q: &MultiAffine2Poly) -> Coeffs22 {
    let mut out = [[Complex64::new(0.0, 0.0); 3]; 3];
    for s in 0..4 {
        for t in 0..4 {
            out[(s & 1) + (t & 1)][(s >> 1) + (t >> 1)] += p.coeffs[s] * q.coeffs[t];
        }
    }
    out
}

/// Largest coefficient of `E~^t E - (a a~ - b b~)`.
pub fn identity_defect(a: &MultiAffine2Poly, b: &MultiAffine2Poly, e: &EFactor) -> f64 {
    let comps = e.components();
    let mut diff = product(a, &a.reflect());
    let bb = product(b, &b.reflect());
    for (i, row) in diff.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v -= bb[i][j];
        }
    }
    for c in &comps {
        let ee = product(&c.reflect(), c);
        for (i, row) in diff.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v -= ee[i][j];
            }
        }
    }
    diff.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
}
