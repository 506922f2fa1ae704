//! Seeded random polynomial generators used by tests, the acceptance suite
//! and batch runs.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;

use super::DEFAULT_EPS_STAB;
use super::{stability_3var, MultiAffine3Poly, StabilityStatus, SymMultiAffinePoly, UniPoly};

/// Seed used whenever a caller does not supply one.
pub const DEFAULT_SEED: u64 = 0x5eed_a61e;

/// Radius of the coefficient disk around the polynomial `1`.
pub const PERTURBATION_RADIUS: f64 = 0.25;

/// Uniform sample from the disk `|z| <= radius`.
pub fn uniform_disk<R: Rng + ?Sized>(rng: &mut R, radius: f64) -> Complex64 {
    let r = radius * rng.gen::<f64>().sqrt();
    Complex64::from_polar(r, TAU * rng.gen::<f64>())
}

/// Point of `C^n` on the torus for even `k`, uniform in the closed polydisk
/// for odd `k`.
pub fn mixed_point<R: Rng + ?Sized>(rng: &mut R, n: usize, k: usize) -> Vec<Complex64> {
    (0..n)
        .map(|_| {
            if k % 2 == 0 {
                Complex64::from_polar(1.0, TAU * rng.gen::<f64>())
            } else {
                uniform_disk(rng, 1.0)
            }
        })
        .collect()
}

/// `1 + w` with each of the eight coefficients of `w` uniform in a disk.
pub fn perturbed_3var<R: Rng + ?Sized>(rng: &mut R, radius: f64) -> MultiAffine3Poly {
    let mut coeffs = [Complex64::new(0.0, 0.0); 8];
    for c in &mut coeffs {
        *c = uniform_disk(rng, radius);
    }
    coeffs[0] += 1.0;
    MultiAffine3Poly { coeffs }
}

/// Rejection sampler for strictly stable three-variable multi-affine
/// polynomials near `1`.
pub fn random_stable_3var<R: Rng + ?Sized>(rng: &mut R) -> MultiAffine3Poly {
    loop {
        let p = perturbed_3var(rng, PERTURBATION_RADIUS);
        if stability_3var(&p, DEFAULT_EPS_STAB).status == StabilityStatus::StrictlyStable {
            return p;
        }
    }
}

/// Symmetrization of a random degree-`d` polynomial with `q(0) = 1` whose
/// roots have modulus in `(1.05, 3)`; strictly stable by construction.
pub fn random_stable_sym<R: Rng + ?Sized>(rng: &mut R, d: usize) -> SymMultiAffinePoly {
    let q = random_stable_uni(rng, d);
    SymMultiAffinePoly::new(q.coeffs().to_vec()).expect("valid weights")
}

pub fn random_stable_uni<R: Rng + ?Sized>(rng: &mut R, d: usize) -> UniPoly {
    let roots: Vec<Complex64> = (0..d)
        .map(|_| Complex64::from_polar(rng.gen_range(1.05..3.0), TAU * rng.gen::<f64>()))
        .collect();
    UniPoly::from_roots(&roots)
}

/// Symmetric polynomial with `p_0 = 1` and the other weights uniform in the
/// disk of the given radius. Not necessarily stable.
pub fn random_weights<R: Rng + ?Sized>(rng: &mut R, d: usize, radius: f64) -> SymMultiAffinePoly {
    let mut w: Vec<Complex64> = (0..=d).map(|_| uniform_disk(rng, radius)).collect();
    w[0] = Complex64::new(1.0, 0.0);
    SymMultiAffinePoly::new(w).expect("valid weights")
}
