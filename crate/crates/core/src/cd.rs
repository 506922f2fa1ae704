//! One-variable Christoffel–Darboux data.
//!
//! For `q` of declared degree `d` with reflection `q~(z) = z^d conj(q(1/conj z))`,
//! `|q|^2 - |q~|^2 = (1 - |z|^2) |A(z)|^2` where `A(z) = sum_j A_j z^j`, and
//! the Gram matrix `G[j][k] = <A_j, A_k>` is determined by the coefficients.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::numerics::{psd_factor, CMatrix, HermitianMatrix};
use crate::poly::UniPoly;

/// `G[j][k] = <A_j, A_k>` for `0 <= j, k < d`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CDGram {
    pub d: usize,
    pub g: HermitianMatrix,
}

/// Vector coefficients `A_0..A_{d-1}`, each of length `rank`.
#[derive(Clone, Debug, PartialEq)]
pub struct CDFactor {
    pub columns: Vec<Vec<Complex64>>,
}

/// Telescoped coefficient matching:
/// `G[j][k] = sum_{m <= min(j,k)} q_{j-m} conj(q_{k-m}) - conj(q_{d-j+m}) q_{d-k+m}`.
pub fn cd_gram(q: &UniPoly, d: usize) -> Result<CDGram> {
    let c = q.padded(d)?;
    let g = CMatrix::from_fn(d, d, |j, k| {
        (0..=j.min(k))
            .map(|m| c[j - m] * c[k - m].conj() - c[d - j + m].conj() * c[d - k + m])
            .sum()
    });
    Ok(CDGram {
        d,
        g: HermitianMatrix::symmetrized(g),
    })
}

/// Factors the Gram matrix; a `NotPsd` error means `q` is not stable at
/// degree `d`.
pub fn cd_factor(g: &CDGram, tol: f64) -> Result<CDFactor> {
    let f = psd_factor(&g.g, tol)?;
    // <A_j, A_k> = A_k^* A_j, so A_j is the conjugate of column j of Y.
    let columns = (0..g.d)
        .map(|j| f.y.column(j).into_iter().map(|z| z.conj()).collect())
        .collect();
    Ok(CDFactor { columns })
}

impl CDFactor {
    pub fn rank(&self) -> usize {
        self.columns.first().map_or(0, Vec::len)
    }

    /// `A(z) = sum_j A_j z^j`.
    pub fn eval(&self, z: Complex64) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.rank()];
        let mut zj = Complex64::new(1.0, 0.0);
        for col in &self.columns {
            for (o, a) in out.iter_mut().zip(col) {
                *o += a * zj;
            }
            zj *= z;
        }
        out
    }

    /// `<A_j, A_k>` table.
    pub fn gram(&self) -> CMatrix {
        let d = self.columns.len();
        CMatrix::from_fn(d, d, |j, k| {
            self.columns[j]
                .iter()
                .zip(&self.columns[k])
                .map(|(a, b)| a * b.conj())
                .sum()
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::hermitian_eigenvalues;
    use crate::poly::sample;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn degree_one_examples() {
        // |1 - z/2|^2 - |z - 1/2|^2 = (3/4)(1 - |z|^2)
        let g = cd_gram(&UniPoly::from_real(&[1.0, -0.5]).unwrap(), 1).unwrap();
        assert!((g.g[(0, 0)] - c(0.75)).norm() < 1e-15);
        let g = cd_gram(&UniPoly::from_real(&[1.0]).unwrap(), 1).unwrap();
        assert_eq!(g.g[(0, 0)], c(1.0));
        let g = cd_gram(&UniPoly::from_real(&[1.0, -1.0]).unwrap(), 1).unwrap();
        assert_eq!(g.g[(0, 0)], c(0.0));
    }

    #[test]
    fn factor_examples() {
        let g = CDGram {
            d: 1,
            g: HermitianMatrix::from_real_diag(&[0.75]),
        };
        let f = cd_factor(&g, 1e-9).unwrap();
        assert_eq!(f.rank(), 1);
        assert!((f.columns[0][0].norm() - 3f64.sqrt() / 2.0).abs() < 1e-15);

        let g = CDGram {
            d: 2,
            g: HermitianMatrix::identity(2),
        };
        let f = cd_factor(&g, 1e-9).unwrap();
        assert!(f.gram().sub(&CMatrix::identity(2)).unwrap().max_abs() < 1e-15);

        let g = CDGram {
            d: 1,
            g: HermitianMatrix::from_real_diag(&[0.0]),
        };
        assert_eq!(cd_factor(&g, 1e-9).unwrap().rank(), 0);
    }

    #[test]
    fn unstable_input_is_not_psd() {
        let g = cd_gram(&UniPoly::from_real(&[1.0, -2.0]).unwrap(), 1).unwrap();
        assert!(cd_factor(&g, 1e-9).is_err());
    }

    #[test]
    fn positive_definite_for_strictly_stable() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for i in 0..200 {
            let d = 1 + i % 12;
            let q = sample::random_stable_uni(&mut rng, d);
            let g = cd_gram(&q, d).unwrap();
            let min = hermitian_eigenvalues(&g.g).unwrap()[0];
            assert!(min > 0.0, "degree {d}: {min}");
        }
    }

    #[test]
    fn reflection_symmetry_and_cd_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for d in 1..=12 {
            let q = sample::random_stable_uni(&mut rng, d);
            let g = cd_gram(&q, d).unwrap();
            for j in 0..d {
                for k in 0..d {
                    let diff = (g.g[(j, k)] - g.g[(d - 1 - k, d - 1 - j)]).norm();
                    assert!(diff <= 1e-12 * g.g[(j, k)].norm().max(1.0));
                }
            }
            let f = cd_factor(&g, 1e-12).unwrap();
            let qc = q.padded(d).unwrap();
            let rev: Vec<Complex64> = qc.iter().rev().map(|z| z.conj()).collect();
            let rev = UniPoly::new(rev).unwrap();
            for _ in 0..100 {
                let z = sample::uniform_disk(&mut rng, 1.5);
                let lhs = q.eval(z).norm_sqr() - rev.eval(z).norm_sqr();
                let a: f64 = f.eval(z).iter().map(|x| x.norm_sqr()).sum();
                let rhs = (1.0 - z.norm_sqr()) * a;
                let scale = qc.iter().map(|x| x.norm()).sum::<f64>().powi(2) * z.norm().max(1.0).powi(2 * d as i32);
                assert!((lhs - rhs).abs() <= 1e-10 * scale, "d={d}: {lhs} vs {rhs}");
            }
        }
    }
}
