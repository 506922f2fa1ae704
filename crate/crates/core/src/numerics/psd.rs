use num_complex::Complex64;

use super::{hermitian_eigen, CMatrix, HermitianMatrix};
use crate::error::{Error, Result};

/// `M ~= Y^* Y` with `Y` of shape `rank x n`.
#[derive(Clone, Debug)]
pub struct PsdFactor {
    pub y: CMatrix,
    pub rank: usize,
    pub min_eigenvalue: f64,
    /// Spectral norm of the input.
    pub spectral_norm: f64,
}

/// Factor a positive semidefinite matrix through its eigendecomposition.
///
/// With `s = max(1, ||M||_2)`: eigenvalues below `-tol * s` are rejected,
/// eigenvalues in `[-tol * s, tol * s]` are clipped to zero and the rest are
/// kept, one row of `Y` each.
pub fn psd_factor(m: &HermitianMatrix, tol: f64) -> Result<PsdFactor> {
    let n = m.n();
    let eig = hermitian_eigen(m)?;
    let spectral_norm = eig.values.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    let band = tol * spectral_norm.max(1.0);
    let min_eigenvalue = eig.values.first().copied().unwrap_or(0.0);
    if min_eigenvalue < -band {
        return Err(Error::NotPsd { min_eigenvalue });
    }
    let kept: Vec<usize> = (0..n).filter(|&k| eig.values[k] > band).collect();
    // Largest eigenvalues first.
    let y = CMatrix::from_fn(kept.len(), n, |r, c| {
        let k = kept[kept.len() - 1 - r];
        eig.vectors[(c, k)].conj() * eig.values[k].sqrt()
    });
    Ok(PsdFactor {
        rank: kept.len(),
        y,
        min_eigenvalue,
        spectral_norm,
    })
}

/// Nearest positive semidefinite matrix in the Frobenius norm.
pub fn psd_project(m: &HermitianMatrix) -> Result<HermitianMatrix> {
    let eig = hermitian_eigen(m)?;
    if eig.values.first().map_or(true, |&v| v >= 0.0) {
        return Ok(m.clone());
    }
    Ok(HermitianMatrix::symmetrized(eig.reconstruct_with(|x| x.max(0.0))))
}

impl PsdFactor {
    /// `Y^* Y`.
    pub fn gram(&self) -> CMatrix {
        self.y.gram()
    }

    /// Column `j` of `Y`.
    pub fn column(&self, j: usize) -> Vec<Complex64> {
        self.y.column(j)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::hermitian_eigenvalues;
    use proptest::prelude::*;

    #[test]
    fn identity_factor() {
        let f = psd_factor(&HermitianMatrix::identity(2), 1e-9).unwrap();
        assert_eq!(f.rank, 2);
        let g = f.gram();
        assert!(g.sub(&CMatrix::identity(2)).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn rank_one_factor() {
        let f = psd_factor(&HermitianMatrix::from_real_diag(&[0.0, 4.0]), 1e-9).unwrap();
        assert_eq!(f.rank, 1);
        assert_eq!(f.y.rows(), 1);
        assert!(f.y[(0, 0)].norm() < 1e-15);
        assert!((f.y[(0, 1)].norm() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn indefinite_is_rejected() {
        match psd_factor(&HermitianMatrix::from_real_diag(&[-1.0, 1.0]), 1e-9) {
            Err(Error::NotPsd { min_eigenvalue }) => assert_eq!(min_eigenvalue, -1.0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn projection_examples() {
        let p = psd_project(&HermitianMatrix::from_real_diag(&[-1.0, 2.0])).unwrap();
        assert_eq!(p, HermitianMatrix::from_real_diag(&[0.0, 2.0]));
        let p = psd_project(&HermitianMatrix::from_real_diag(&[-3.0])).unwrap();
        assert_eq!(p, HermitianMatrix::from_real_diag(&[0.0]));
    }

    fn matrix_strategy(max_n: usize) -> impl Strategy<Value = CMatrix> {
        (1..=max_n, 1..=max_n).prop_flat_map(|(r, n)| {
            prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), r * n).prop_map(move |v| {
                CMatrix::from_row_major(r, n, v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect()).unwrap()
            })
        })
    }

    fn square_strategy(max_n: usize) -> impl Strategy<Value = CMatrix> {
        (1..=max_n).prop_flat_map(|n| {
            prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n * n).prop_map(move |v| {
                CMatrix::from_row_major(n, n, v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect()).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn factor_reproduces_gram(x in matrix_strategy(12)) {
            let m = HermitianMatrix::symmetrized(x.gram());
            let tol = 1e-9;
            let f = psd_factor(&m, tol).unwrap();
            let err = f.gram().sub(m.as_matrix()).unwrap().frobenius_norm();
            prop_assert!(err <= 10.0 * tol * m.frobenius_norm().max(1.0));
            prop_assert!(f.rank <= x.rows().min(x.cols()));
        }

        #[test]
        fn projection_is_psd_and_fixes_psd(x in square_strategy(10)) {
            let h = HermitianMatrix::symmetrized(x.add(&x.adjoint()).unwrap());
            let p = psd_project(&h).unwrap();
            let min = hermitian_eigenvalues(&p).unwrap()[0];
            prop_assert!(min >= -1e-12 * h.frobenius_norm().max(1.0));
            let q = psd_project(&p).unwrap();
            prop_assert!(q.as_matrix().sub(p.as_matrix()).unwrap().frobenius_norm() <= 1e-12 * p.frobenius_norm().max(1.0));
        }
    }
}
