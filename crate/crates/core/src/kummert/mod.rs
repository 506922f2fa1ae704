//! Three-variable multi-affine decomposition
//!
//! ```text
//! |p|^2 - |p~|^2 = (1 - |z1|^2) SOS_1 + (1 - |z2|^2) SOS_2 + (1 - |z3|^2) |E(z1, z2)|^2
//! ```
//!
//! for stable `p = a(z1, z2) + b(z1, z2) z3`. `E` is a `C^2`-valued factor of
//! `|a|^2 - |b|^2` on the torus; `SOS_1`, `SOS_2` are Gram forms over
//! `(1, z2, z3, z2 z3)` and `(1, z1, z3, z1 z3)` found by PSD feasibility.

mod feasibility;
mod fejer_riesz;
mod inner;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{hermitian_eigenvalues, psd_factor, relative_residual, CMatrix, HermitianMatrix};
use crate::poly::sample::{mixed_point, DEFAULT_SEED};
use crate::poly::{stability_3var, MultiAffine2Poly, MultiAffine3Poly, StabilityReport, DEFAULT_EPS_STAB};

pub use crate::poly::TrigPoly11;
pub use feasibility::{
    form_coefficients, solve_sos12, target_coefficients, FeasibilityMethod, FeasibilityOptions, Sos12, BASIS_1, BASIS_2,
};
pub use fejer_riesz::{
    coefficient_matrices, factor_residual, fejer_riesz_2x2, riccati_residual, solve_riccati, FejerRiesz,
    FejerRieszOptions, RiccatiMethod,
};
pub use inner::{build_v, identity_defect, product, Coeffs22, InnerMatrix};

use fejer_riesz::Mat2;

/// Threshold for the numerical rank checks, relative to `max(1, lambda_max)`.
pub const RANK_THRESHOLD: f64 = 1e-7;

/// `(a, b)` with `p = a(z1, z2) + b(z1, z2) z3`.
pub fn split_ab(p: &MultiAffine3Poly) -> (MultiAffine2Poly, MultiAffine2Poly) {
    p.split()
}

/// `|a|^2 - |b|^2` on the torus as a trigonometric polynomial.
pub fn t_from_ab(a: &MultiAffine2Poly, b: &MultiAffine2Poly) -> TrigPoly11 {
    TrigPoly11::from_ab(a, b)
}

/// `E(z1, z2) = (A0 + A1 z1) (1, z2)^t`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EFactor {
    #[serde(rename = "A0")]
    pub a0: Mat2,
    #[serde(rename = "A1")]
    pub a1: Mat2,
}

impl EFactor {
    /// Vector coefficient of each monomial, by bitmask (bit 0: `z1`, bit 1: `z2`).
    pub fn coefficients(&self) -> [[Complex64; 2]; 4] {
        let col = |m: &Mat2, j: usize| [m[0][j], m[1][j]];
        [col(&self.a0, 0), col(&self.a1, 0), col(&self.a0, 1), col(&self.a1, 1)]
    }

    /// The two scalar components as polynomials.
    pub fn components(&self) -> [MultiAffine2Poly; 2] {
        let c = self.coefficients();
        [0, 1].map(|i| MultiAffine2Poly {
            coeffs: [c[0][i], c[1][i], c[2][i], c[3][i]],
        })
    }

    pub fn eval(&self, z1: Complex64, z2: Complex64) -> [Complex64; 2] {
        self.components().map(|c| c.eval(z1, z2))
    }

    /// `<E_alpha, E_beta>` over the four monomials.
    pub fn gram(&self) -> [[Complex64; 4]; 4] {
        let c = self.coefficients();
        let mut g = [[Complex64::new(0.0, 0.0); 4]; 4];
        for (al, row) in g.iter_mut().enumerate() {
            for (be, v) in row.iter_mut().enumerate() {
                *v = c[al][0] * c[be][0].conj() + c[al][1] * c[be][1].conj();
            }
        }
        g
    }
}

/// Decomposition data: `SOS_3 = |E|^2`, `SOS_j = v_j^* G_j v_j = |H_j v_j|^2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KummertCertificate {
    #[serde(rename = "E")]
    pub e: EFactor,
    #[serde(rename = "G1")]
    pub g1: HermitianMatrix,
    #[serde(rename = "G2")]
    pub g2: HermitianMatrix,
    /// Rows of `H1`, each a polynomial over `(1, z2, z3, z2 z3)`.
    #[serde(rename = "H1")]
    pub h1: Vec<Vec<Complex64>>,
    /// Rows of `H2`, each a polynomial over `(1, z1, z3, z1 z3)`.
    #[serde(rename = "H2")]
    pub h2: Vec<Vec<Complex64>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KummertOptions {
    pub eps_stab: f64,
    pub fejer_riesz: FejerRieszOptions,
    pub feasibility: FeasibilityOptions,
    /// Torus samples for the unitarity check of `V`.
    pub unitarity_samples: usize,
    pub seed: u64,
}

impl Default for KummertOptions {
    fn default() -> Self {
        Self {
            eps_stab: DEFAULT_EPS_STAB,
            fejer_riesz: FejerRieszOptions::default(),
            feasibility: FeasibilityOptions::default(),
            unitarity_samples: 100,
            seed: DEFAULT_SEED,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ranks {
    pub e: usize,
    pub g1: usize,
    pub g2: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KummertReport {
    pub certificate: KummertCertificate,
    pub stability: StabilityReport,
    /// Constant added to `|a|^2 - |b|^2` before factoring; zero if none.
    pub regularization: f64,
    pub riccati_iterations: usize,
    /// `sup ||A^* A - T||` over 512 circle points.
    pub fejer_riesz_residual: f64,
    /// `max ||V^* V - I||` over the torus samples.
    pub unitarity_defect: f64,
    /// Largest coefficient of `E~^t E - (a a~ - b b~)`.
    pub identity_defect: f64,
    pub feasibility_residual: f64,
    pub feasibility_iterations: usize,
    pub feasibility_method: FeasibilityMethod,
    pub ranks: Ranks,
}

/// Eigenvalues above `threshold * max(1, lambda_max)`.
pub fn numerical_rank(m: &HermitianMatrix, threshold: f64) -> Result<usize> {
    let ev = hermitian_eigenvalues(m)?;
    let top = ev.last().copied().unwrap_or(0.0).max(1.0);
    Ok(ev.iter().filter(|&&v| v > threshold * top).count())
}

fn gram_factor(g: &HermitianMatrix) -> Result<Vec<Vec<Complex64>>> {
    Ok(psd_factor(g, 1e-12)?.y.to_rows())
}

/// Builds and checks the full decomposition of a stable `p`.
pub fn kummert_certificate(p: &MultiAffine3Poly, opts: &KummertOptions) -> Result<KummertReport> {
    let stability = stability_3var(p, opts.eps_stab);
    if !stability.status.is_acceptable() {
        return Err(Error::Unstable {
            margin: stability.margin,
        });
    }
    let (a, b) = split_ab(p);
    let t = t_from_ab(&a, &b);
    let fr = fejer_riesz_2x2(&t, &opts.fejer_riesz)?;
    let v = build_v(&a, &b, &fr.e);
    let sos = solve_sos12(p, &fr.e, &opts.feasibility)?;
    let e_gram = HermitianMatrix::symmetrized(CMatrix::from_rows(&fr.e.gram().map(|r| r.to_vec()))?);
    let ranks = Ranks {
        e: numerical_rank(&e_gram, RANK_THRESHOLD)?,
        g1: numerical_rank(&sos.g1, RANK_THRESHOLD)?,
        g2: numerical_rank(&sos.g2, RANK_THRESHOLD)?,
    };
    let certificate = KummertCertificate {
        h1: gram_factor(&sos.g1)?,
        h2: gram_factor(&sos.g2)?,
        e: fr.e.clone(),
        g1: sos.g1,
        g2: sos.g2,
    };
    Ok(KummertReport {
        fejer_riesz_residual: factor_residual(&t.add_constant(fr.regularization), &fr.e, 512),
        unitarity_defect: v.unitarity_defect(opts.unitarity_samples, opts.seed),
        identity_defect: identity_defect(&a, &b, &fr.e),
        certificate,
        stability,
        regularization: fr.regularization,
        riccati_iterations: fr.iterations,
        feasibility_residual: sos.residual,
        feasibility_iterations: sos.iterations,
        feasibility_method: sos.method,
        ranks,
    })
}

fn monomials(x: Complex64, z3: Complex64) -> [Complex64; 4] {
    [Complex64::new(1.0, 0.0), x, z3, x * z3]
}

fn gram_gap(rows: &[Vec<Complex64>], g: &HermitianMatrix) -> Result<f64> {
    let n = g.n();
    if rows.iter().any(|r| r.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: rows.iter().map(Vec::len).find(|&l| l != n).unwrap_or(n),
        });
    }
    let hh = CMatrix::from_fn(n, n, |j, k| rows.iter().map(|r| r[j].conj() * r[k]).sum());
    Ok(hh.sub(g.as_matrix())?.frobenius_norm() / g.frobenius_norm().max(1.0))
}

/// Largest relative residual of the decomposition over `samples` seeded
/// points (alternating torus and polydisk), also covering the mismatch
/// between each `H_j^* H_j` and `G_j`.
pub fn verify_kummert(p: &MultiAffine3Poly, cert: &KummertCertificate, samples: usize, seed: u64) -> Result<f64> {
    for g in [&cert.g1, &cert.g2] {
        if g.n() != 4 {
            return Err(Error::DimensionMismatch {
                expected: 4,
                got: g.n(),
            });
        }
    }
    let mut worst = gram_gap(&cert.h1, &cert.g1)?.max(gram_gap(&cert.h2, &cert.g2)?);
    let pr = p.reflect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for k in 0..samples {
        let z = mixed_point(&mut rng, 3, k);
        let zz = [z[0], z[1], z[2]];
        let lhs = p.eval(zz).norm_sqr() - pr.eval(zz).norm_sqr();
        let e = cert.e.eval(z[0], z[1]);
        let rhs = (1.0 - z[0].norm_sqr()) * cert.g1.quadratic_form(&monomials(z[1], z[2]))
            + (1.0 - z[1].norm_sqr()) * cert.g2.quadratic_form(&monomials(z[0], z[2]))
            + (1.0 - z[2].norm_sqr()) * (e[0].norm_sqr() + e[1].norm_sqr());
        worst = worst.max(relative_residual(lhs, rhs));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests;
