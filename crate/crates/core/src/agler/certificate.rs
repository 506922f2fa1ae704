use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{subset_monomials, AglerMatrix};
use crate::error::{Error, Result};
use crate::numerics::{psd_factor, relative_residual, CMatrix};
use crate::poly::{reflect, sample::mixed_point, SymMultiAffinePoly};

/// Vector coefficients `B_alpha` of `B(w) = sum_alpha B_alpha w^alpha`,
/// keyed by the bitmask of `alpha subset [d-1]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SosCertificate {
    pub d: usize,
    pub rank: usize,
    pub vectors: BTreeMap<usize, Vec<Complex64>>,
}

/// Factors the subset matrix as a Gram matrix, `M[alpha][beta] = <B_alpha, B_beta>`.
pub fn extract_certificate(m: &AglerMatrix, tol: f64) -> Result<SosCertificate> {
    let f = psd_factor(&m.m, tol)?;
    // <B_a, B_b> = B_b^* B_a, so B_a is the conjugate of column a of Y.
    let vectors = (0..m.m.n())
        .map(|a| (a, f.y.column(a).into_iter().map(|z| z.conj()).collect()))
        .collect();
    Ok(SosCertificate {
        d: m.d,
        rank: f.rank,
        vectors,
    })
}

impl SosCertificate {
    fn check_shape(&self) -> Result<()> {
        let n = 1usize << self.d.saturating_sub(1);
        if let Some((&a, _)) = self.vectors.iter().find(|(&a, _)| a >= n) {
            return Err(Error::InvalidInput(format!(
                "subset bitmask {a} out of range for d = {}",
                self.d
            )));
        }
        if let Some(v) = self.vectors.values().find(|v| v.len() != self.rank) {
            return Err(Error::DimensionMismatch {
                expected: self.rank,
                got: v.len(),
            });
        }
        Ok(())
    }

    /// `B(w)` for `w` in `C^{d-1}`.
    pub fn eval(&self, w: &[Complex64]) -> Result<Vec<Complex64>> {
        if w.len() + 1 != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d.saturating_sub(1),
                got: w.len(),
            });
        }
        let mono = subset_monomials(w);
        let mut out = vec![Complex64::new(0.0, 0.0); self.rank];
        for (&a, v) in &self.vectors {
            let m = mono[a];
            for (o, b) in out.iter_mut().zip(v) {
                *o += b * m;
            }
        }
        Ok(out)
    }

    /// `<B_alpha, B_beta>` over all subsets.
    pub fn gram(&self) -> CMatrix {
        let n = 1usize << self.d.saturating_sub(1);
        let zero = vec![Complex64::new(0.0, 0.0); self.rank];
        let get = |a: usize| self.vectors.get(&a).unwrap_or(&zero);
        CMatrix::from_fn(n, n, |a, b| get(a).iter().zip(get(b)).map(|(x, y)| x * y.conj()).sum())
    }
}

/// Largest relative residual of
/// `|p|^2 - |p~|^2 = sum_j (1 - |z_j|^2) |B(z without z_j)|^2`
/// over `samples` seeded points, alternating torus and polydisk.
pub fn verify_certificate(p: &SymMultiAffinePoly, cert: &SosCertificate, samples: usize, seed: u64) -> Result<f64> {
    let d = p.d();
    if cert.d != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: cert.d,
        });
    }
    cert.check_shape()?;
    let pt = reflect(p);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    let mut hat = Vec::with_capacity(d.saturating_sub(1));
    for k in 0..samples {
        let z = mixed_point(&mut rng, d, k);
        let lhs = p.eval(&z)?.norm_sqr() - pt.eval(&z)?.norm_sqr();
        let mut rhs = 0.0;
        for j in 0..d {
            let weight = 1.0 - z[j].norm_sqr();
            if weight == 0.0 {
                continue;
            }
            hat.clear();
            hat.extend(z.iter().enumerate().filter(|&(i, _)| i != j).map(|(_, &v)| v));
            rhs += weight * cert.eval(&hat)?.iter().map(|b| b.norm_sqr()).sum::<f64>();
        }
        worst = worst.max(relative_residual(lhs, rhs));
    }
    Ok(worst)
}
