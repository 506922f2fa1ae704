//! Agler-denominator test for symmetric multi-affine polynomials.
//!
//! For `p(z) = sum_alpha binom(d, |alpha|)^{-1} p_{|alpha|} z^alpha` the
//! canonical symmetric certificate `B(z) = sum_{alpha subset [d-1]} B_alpha z^alpha`
//! has inner products `<B_alpha, B_beta> = B^i_{j,k}` depending only on
//! `j = |alpha|`, `k = |beta|`, `i = |alpha ∩ beta|`. Matching coefficients of
//!
//! ```text
//! |p|^2 - |p~|^2 = sum_j (1 - |z_j|^2) |B(z without z_j)|^2
//! ```
//!
//! gives, for every admissible `i`,
//!
//! ```text
//! (d - j - k + i) B^i_{j,k} - i B^{i-1}_{j-1,k-1} = L(j, k),
//! L(j, k) = (p_j conj(p_k) - conj(p_{d-j}) p_{d-k}) / (binom(d, j) binom(d, k)),
//! ```
//!
//! which is solved upward in `i`. `p` is an Agler denominator exactly when the
//! `2^(d-1)`-square matrix `B^{|α∩β|}_{|α|,|β|}` is positive semidefinite.

mod certificate;
mod certify;
mod degree4;
mod radius;

use num_complex::Complex64;

use crate::cd::CDGram;
use crate::error::{Error, Result};
use crate::numerics::{binomial, CMatrix, HermitianMatrix};
use crate::poly::SymMultiAffinePoly;

pub use certificate::{extract_certificate, verify_certificate, SosCertificate};
pub use certify::{certify, certify_with_matrix, AglerConfig, CertReport, CertStatus};
pub use degree4::{degree4_blocks, degree4_closed_form, Degree4Blocks, Degree4Check, SECTION_ORDER};
pub use radius::{agler_radius, RadiusOptions, RadiusReport, ScanPoint};

/// Solved values `B^i_{j,k}`; anything outside the admissible range reads 0.
#[derive(Clone, Debug, PartialEq)]
pub struct BTensor {
    d: usize,
    values: Vec<Complex64>,
}

impl BTensor {
    fn zeros(d: usize) -> Self {
        Self {
            d,
            values: vec![Complex64::new(0.0, 0.0); d * d * d],
        }
    }

    #[inline]
    pub fn d(&self) -> usize {
        self.d
    }

    /// Whether `(i, j, k)` is admissible:
    /// `0 <= j, k < d` and `max(0, j + k - d + 1) <= i <= min(j, k)`.
    pub fn in_range(&self, i: isize, j: isize, k: isize) -> bool {
        let d = self.d as isize;
        j >= 0 && k >= 0 && j < d && k < d && i >= 0.max(j + k - d + 1) && i <= j.min(k)
    }

    /// `B^i_{j,k}`.
    pub fn get(&self, i: isize, j: isize, k: isize) -> Complex64 {
        if self.in_range(i, j, k) {
            self.values[self.offset(i as usize, j as usize, k as usize)]
        } else {
            Complex64::new(0.0, 0.0)
        }
    }

    #[inline]
    fn offset(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.d + j) * self.d + k
    }

    /// Admissible `(i, j, k)` triples.
    pub fn indices(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        let d = self.d;
        (0..d).flat_map(move |j| {
            (0..d).flat_map(move |k| {
                let lo = (j + k + 1).saturating_sub(d);
                (lo..=j.min(k)).map(move |i| (i, j, k))
            })
        })
    }
}

fn solve_with(d: usize, lhs: impl Fn(usize, usize) -> Complex64) -> Result<BTensor> {
    if d < 2 {
        return Err(Error::InvalidInput(format!(
            "the B tensor needs at least two variables, got {d}"
        )));
    }
    let mut t = BTensor::zeros(d);
    for j in 0..d {
        for k in 0..d {
            let l = lhs(j, k);
            let lo = (j + k + 1).saturating_sub(d);
            for i in lo..=j.min(k) {
                let prev = if i == 0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    t.get(i as isize - 1, j as isize - 1, k as isize - 1)
                };
                // i >= j + k - d + 1 keeps the divisor at least 1.
                let div = (d + i - j - k) as f64;
                let off = t.offset(i, j, k);
                t.values[off] = (l + prev * i as f64) / div;
            }
        }
    }
    Ok(t)
}

/// `L(j, k)` from the weights of `p`.
pub fn coefficient_lhs(p: &SymMultiAffinePoly, j: usize, k: usize) -> Complex64 {
    let d = p.d();
    let w = p.weights();
    (w[j] * w[k].conj() - w[d - j].conj() * w[d - k]) / (binomial(d, j) as f64 * binomial(d, k) as f64)
}

/// Solves the coefficient recursion from the weights of `p`.
pub fn solve_b_tensor(p: &SymMultiAffinePoly) -> Result<BTensor> {
    solve_with(p.d(), |j, k| coefficient_lhs(p, j, k))
}

/// Same recursion, with `L(j, k)` taken from the Christoffel–Darboux Gram
/// matrix of the diagonal restriction: `G[j][k] - G[j-1][k-1]`.
pub fn solve_b_tensor_from_gram(g: &CDGram, d: usize) -> Result<BTensor> {
    if g.d != d {
        return Err(Error::DimensionMismatch { expected: d, got: g.d });
    }
    solve_with(d, |j, k| {
        let prev = if j > 0 && k > 0 {
            g.g[(j - 1, k - 1)]
        } else {
            Complex64::new(0.0, 0.0)
        };
        (g.g[(j, k)] - prev) / (binomial(d, j) as f64 * binomial(d, k) as f64)
    })
}

/// The subset-indexed matrix `M[alpha][beta] = B^{|α∩β|}_{|α|,|β|}` for
/// `alpha, beta subset [d-1]`, bitmasks in ascending order.
#[derive(Clone, Debug, PartialEq)]
pub struct AglerMatrix {
    pub d: usize,
    pub m: HermitianMatrix,
}

pub fn build_agler_matrix(t: &BTensor, degree_cap: usize) -> Result<AglerMatrix> {
    let d = t.d();
    if d > degree_cap {
        return Err(Error::DegreeCap { d, cap: degree_cap });
    }
    let n = 1usize << (d - 1);
    let m = CMatrix::from_fn(n, n, |a, b| {
        t.get(
            (a & b).count_ones() as isize,
            a.count_ones() as isize,
            b.count_ones() as isize,
        )
    });
    Ok(AglerMatrix {
        d,
        m: HermitianMatrix::symmetrized(m),
    })
}

impl AglerMatrix {
    /// `sum_{alpha, beta} M[alpha][beta] w^alpha conj(w)^beta` for `w` in `C^{d-1}`.
    pub fn form(&self, w: &[Complex64]) -> Result<f64> {
        if w.len() + 1 != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d - 1,
                got: w.len(),
            });
        }
        let mono = subset_monomials(w);
        // Entry (alpha, beta) multiplies w^alpha conj(w^beta).
        let conj: Vec<Complex64> = mono.iter().map(|z| z.conj()).collect();
        Ok(self.m.quadratic_form(&conj))
    }
}

/// `w^alpha` for every bitmask `alpha` over the coordinates of `w`.
pub fn subset_monomials(w: &[Complex64]) -> Vec<Complex64> {
    let n = 1usize << w.len();
    let mut mono = vec![Complex64::new(0.0, 0.0); n];
    mono[0] = Complex64::new(1.0, 0.0);
    for mask in 1..n {
        let low = mask.trailing_zeros() as usize;
        mono[mask] = mono[mask & (mask - 1)] * w[low];
    }
    mono
}
