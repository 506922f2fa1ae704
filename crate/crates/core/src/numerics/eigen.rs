use num_complex::Complex64;

use super::{CMatrix, HermitianMatrix, ZERO};
use crate::error::{Error, Result};

/// Largest dimension routed to the cyclic Jacobi solver by [`hermitian_eigen`].
pub const JACOBI_MAX_DIM: usize = 32;

const JACOBI_MAX_SWEEPS: usize = 100;
const JACOBI_OFF_TOL: f64 = 1e-13;

/// Eigendecomposition `M = Q diag(values) Q^*` with ascending eigenvalues.
#[derive(Clone, Debug)]
pub struct Eigen {
    pub values: Vec<f64>,
    /// Column `k` is the unit eigenvector for `values[k]`.
    pub vectors: CMatrix,
}

impl Eigen {
    /// `max_k ||M v_k - lambda_k v_k||`.
    pub fn max_residual(&self, m: &HermitianMatrix) -> f64 {
        let n = m.n();
        let mut worst: f64 = 0.0;
        for k in 0..n {
            let v = self.vectors.column(k);
            let mv = m.as_matrix().matvec(&v).expect("square");
            let r = mv
                .iter()
                .zip(&v)
                .map(|(a, b)| (a - b * self.values[k]).norm_sqr())
                .sum::<f64>()
                .sqrt();
            worst = worst.max(r);
        }
        worst
    }

    /// `Q diag(f(lambda)) Q^*`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.values.len();
        let q = &self.vectors;
        let mut scaled = q.clone();
        for k in 0..n {
            let s = f(self.values[k]);
            for i in 0..n {
                scaled[(i, k)] *= s;
            }
        }
        scaled.matmul(&q.adjoint()).expect("square")
    }
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Small matrices go through cyclic Jacobi; larger ones through Householder
/// tridiagonalization followed by implicit QL.
pub fn hermitian_eigen(m: &HermitianMatrix) -> Result<Eigen> {
    if m.n() <= JACOBI_MAX_DIM {
        jacobi_eigen(m)
    } else {
        tridiagonal_eigen(m)
    }
}

/// Ascending eigenvalues only. Skips eigenvector accumulation.
pub fn hermitian_eigenvalues(m: &HermitianMatrix) -> Result<Vec<f64>> {
    if m.n() <= JACOBI_MAX_DIM {
        return jacobi_eigen(m).map(|e| e.values);
    }
    let (d, e, _) = tridiagonalize(m);
    let mut d = d;
    let mut e: Vec<f64> = e;
    tql2(&mut d, &mut e, None)?;
    d.sort_by(f64::total_cmp);
    Ok(d)
}

fn off_norm(a: &CMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Cyclic Jacobi eigensolver for Hermitian matrices.
pub fn jacobi_eigen(m: &HermitianMatrix) -> Result<Eigen> {
    let n = m.n();
    let mut a = m.as_matrix().clone();
    let mut v = CMatrix::identity(n);
    let thresh = JACOBI_OFF_TOL * a.frobenius_norm();

    let mut converged = false;
    for _ in 0..JACOBI_MAX_SWEEPS {
        if off_norm(&a) <= thresh {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r == 0.0 {
                    continue;
                }
                let ph = apq / r;
                let phc = ph.conj();
                let theta = (a[(q, q)].re - a[(p, p)].re) / (2.0 * r);
                let t = if theta == 0.0 {
                    1.0
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // J = [[c, s], [-s conj(ph), c conj(ph)]] on the (p, q) plane.
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * c - akq * (phc * s);
                    a[(k, q)] = akp * s + akq * (phc * c);
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = apk * c - aqk * (ph * s);
                    a[(q, k)] = apk * s + aqk * (ph * c);
                }
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * c - vkq * (phc * s);
                    v[(k, q)] = vkp * s + vkq * (phc * c);
                }
            }
        }
    }
    if !converged && off_norm(&a) > thresh {
        return Err(Error::NoConvergence {
            what: "Jacobi eigensolver",
            residual: off_norm(&a),
        });
    }
    let values: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    Ok(sorted(values, &v))
}

fn sorted(values: Vec<f64>, vectors: &CMatrix) -> Eigen {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    Eigen {
        values: order.iter().map(|&i| values[i]).collect(),
        vectors: CMatrix::from_fn(n, n, |r, c| vectors[(r, order[c])]),
    }
}

/// Householder reduction `M = Q T Q^*` with `T` Hermitian tridiagonal, then a
/// diagonal phase change making `T` real. Returns the real diagonal, the
/// (nonnegative) subdiagonal and the data needed to rebuild `Q D`.
struct Reduction {
    reflectors: Vec<Option<Vec<Complex64>>>,
    phases: Vec<Complex64>,
}

fn tridiagonalize(m: &HermitianMatrix) -> (Vec<f64>, Vec<f64>, Reduction) {
    let n = m.n();
    let mut a = m.as_matrix().clone();
    let mut reflectors = Vec::with_capacity(n.saturating_sub(2));
    let mut sub = vec![ZERO; n];

    for k in 0..n.saturating_sub(2) {
        let len = n - k - 1;
        let x: Vec<Complex64> = (0..len).map(|i| a[(k + 1 + i, k)]).collect();
        let tail: f64 = x[1..].iter().map(|z| z.norm_sqr()).sum();
        if tail == 0.0 {
            sub[k] = x[0];
            reflectors.push(None);
            continue;
        }
        let norm = (x[0].norm_sqr() + tail).sqrt();
        let phase = if x[0].norm() > 0.0 {
            x[0] / x[0].norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        let alpha = -phase * norm;
        let mut v = x;
        v[0] -= alpha;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in &mut v {
            *z /= vnorm;
        }

        // Trailing block S = a[k+1.., k+1..]; S <- H S H with H = I - 2 v v^*.
        let off = k + 1;
        let mut p = vec![ZERO; len];
        for (i, pi) in p.iter_mut().enumerate() {
            let row = &a.row(off + i)[off..];
            *pi = row.iter().zip(&v).map(|(s, vj)| s * vj).sum();
        }
        let kappa: Complex64 = v.iter().zip(&p).map(|(vi, pi)| vi.conj() * pi).sum();
        let w: Vec<Complex64> = p.iter().zip(&v).map(|(pi, vi)| pi - vi * kappa.re).collect();
        let vc: Vec<Complex64> = v.iter().map(|z| z.conj()).collect();
        let wc: Vec<Complex64> = w.iter().map(|z| z.conj()).collect();
        for i in 0..len {
            let vi2 = v[i] * 2.0;
            let wi2 = w[i] * 2.0;
            let row = &mut a.row_mut(off + i)[off..];
            for ((s, &wcj), &vcj) in row.iter_mut().zip(&wc).zip(&vc) {
                *s -= vi2 * wcj + wi2 * vcj;
            }
        }
        // Column k below the diagonal becomes alpha e_1.
        a[(k + 1, k)] = alpha;
        a[(k, k + 1)] = alpha.conj();
        for i in k + 2..n {
            a[(i, k)] = ZERO;
            a[(k, i)] = ZERO;
        }
        sub[k] = alpha;
        reflectors.push(Some(v));
    }
    if n >= 2 {
        sub[n - 2] = a[(n - 1, n - 2)];
    }

    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    let mut phases = vec![Complex64::new(1.0, 0.0); n];
    let mut e = vec![0.0; n];
    for k in 0..n.saturating_sub(1) {
        let r = sub[k].norm();
        e[k] = r;
        phases[k + 1] = if r > 0.0 { phases[k] * (sub[k] / r) } else { phases[k] };
    }
    (diag, e, Reduction { reflectors, phases })
}

/// Implicit QL on a real symmetric tridiagonal matrix (diagonal `d`,
/// subdiagonal `e[i] = T[i+1][i]`). When `zt` is given, its rows are rotated
/// along so that row `j` ends as the eigenvector of `d[j]`.
fn tql2(d: &mut [f64], e: &mut [f64], mut zt: Option<&mut CMatrixReal>) -> Result<()> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    e[n - 1] = 0.0;
    let eps = f64::EPSILON;
    let max_iter = 60;
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > max_iter {
                    return Err(Error::NoConvergence {
                        what: "tridiagonal QL",
                        residual: e[l].abs(),
                    });
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().take(n).skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if let Some(z) = zt.as_deref_mut() {
                        z.rotate(i, s, c);
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

/// Row-major real matrix whose rows are eigenvector candidates.
struct CMatrixReal {
    n: usize,
    data: Vec<f64>,
}

impl CMatrixReal {
    fn identity(n: usize) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        Self { n, data }
    }

    #[inline]
    fn rotate(&mut self, i: usize, s: f64, c: f64) {
        let n = self.n;
        let (lo, hi) = self.data.split_at_mut((i + 1) * n);
        let ri = &mut lo[i * n..];
        let rj = &mut hi[..n];
        for (a, b) in ri.iter_mut().zip(rj.iter_mut()) {
            let h = *b;
            *b = s * *a + c * h;
            *a = c * *a - s * h;
        }
    }
}

/// Householder tridiagonalization plus implicit QL, with eigenvectors.
pub fn tridiagonal_eigen(m: &HermitianMatrix) -> Result<Eigen> {
    let n = m.n();
    let (mut d, mut e, red) = tridiagonalize(m);
    let mut zt = CMatrixReal::identity(n);
    tql2(&mut d, &mut e, Some(&mut zt))?;

    // W = D Z, then W <- H_k W for k descending gives Q D Z.
    let mut w = CMatrix::from_fn(n, n, |r, j| red.phases[r] * zt.data[j * n + r]);
    for (k, refl) in red.reflectors.iter().enumerate().rev() {
        let Some(v) = refl else { continue };
        let off = k + 1;
        let mut u = vec![ZERO; n];
        for (i, vi) in v.iter().enumerate() {
            let vc = vi.conj();
            for (uc, wc) in u.iter_mut().zip(w.row(off + i)) {
                *uc += vc * wc;
            }
        }
        for (i, vi) in v.iter().enumerate() {
            let vi2 = vi * 2.0;
            for (wc, uc) in w.row_mut(off + i).iter_mut().zip(&u) {
                *wc -= vi2 * uc;
            }
        }
    }
    Ok(sorted(d, &w))
}
