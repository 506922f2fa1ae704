//! PSD feasibility for the first two squares.
//!
//! Unknowns are Hermitian 4x4 Gram matrices `G1` over `(1, z2, z3, z2 z3)` and
//! `G2` over `(1, z1, z3, z1 z3)`, each written in an orthonormal basis of
//! Hermitian matrices as a point of `R^16`. Coefficient matching of
//!
//! ```text
//! |p|^2 - |p~|^2 - (1 - |z3|^2)|E|^2 = (1 - |z1|^2) v1^* G1 v1 + (1 - |z2|^2) v2^* G2 v2
//! ```
//!
//! over all `z^alpha conj(z)^beta` is a real linear system `A x = b` with
//! 128 rows and 32 columns whose solution set is a 4-dimensional affine
//! family. Dykstra's method alternates the exact affine projection with the
//! PSD cone projection; when it stalls on a thin feasible set, a log-det
//! barrier on the affine family pushes both blocks into the cone.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::EFactor;
use crate::error::{Error, Result};
use crate::numerics::{hermitian_eigen, hermitian_eigenvalues, psd_project, CMatrix, HermitianMatrix};
use crate::poly::MultiAffine3Poly;

/// Monomial bitmasks of `(1, z2, z3, z2 z3)`.
pub const BASIS_1: [usize; 4] = [0b000, 0b010, 0b100, 0b110];
/// Monomial bitmasks of `(1, z1, z3, z1 z3)`.
pub const BASIS_2: [usize; 4] = [0b000, 0b001, 0b100, 0b101];

const DIM: usize = 16;
const ROWS: usize = 128;
/// Newton steps per barrier level.
const INNER_STEPS: usize = 50;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeasibilityMethod {
    Dykstra,
    CentralPath,
    /// Dykstra, then the central path if Dykstra stalls.
    #[default]
    Auto,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityOptions {
    pub method: FeasibilityMethod,
    /// Dykstra: constraint residual, scaled by `max(1, ||b||)`.
    /// Central path: final duality gap, relative to `||b||`.
    pub tol: f64,
    /// Dykstra iterations.
    pub max_iter: usize,
    /// Central path: accepted constraint residual after PSD cleanup, relative to `||b||`.
    pub residual_tol: f64,
    /// Central path: total Newton steps.
    pub max_newton: usize,
}

impl Default for FeasibilityOptions {
    fn default() -> Self {
        Self {
            method: FeasibilityMethod::Auto,
            tol: 1e-10,
            max_iter: 100_000,
            residual_tol: 1e-8,
            max_newton: 2_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Sos12 {
    pub g1: HermitianMatrix,
    pub g2: HermitianMatrix,
    pub residual: f64,
    pub iterations: usize,
    /// Method that produced the result (never `Auto`).
    pub method: FeasibilityMethod,
}

/// Coefficient of `z^alpha conj(z)^beta` in `|p|^2 - |p~|^2 - (1 - |z3|^2)|E|^2`.
pub fn target_coefficients(p: &MultiAffine3Poly, e: &EFactor) -> [[Complex64; 8]; 8] {
    let pr = p.reflect();
    let mut c = [[Complex64::new(0.0, 0.0); 8]; 8];
    for (al, row) in c.iter_mut().enumerate() {
        for (be, v) in row.iter_mut().enumerate() {
            *v = p.coeffs[al] * p.coeffs[be].conj() - pr.coeffs[al] * pr.coeffs[be].conj();
        }
    }
    let ec = e.coefficients();
    for al in 0..4 {
        for be in 0..4 {
            let g = ec[al][0] * ec[be][0].conj() + ec[al][1] * ec[be][1].conj();
            c[al][be] -= g;
            c[al | 4][be | 4] += g;
        }
    }
    c
}

/// Hermitian matrix with coordinates `v` in the orthonormal basis:
/// four diagonal units, then for each pair `j < k` the symmetric and
/// antisymmetric off-diagonal units scaled by `1/sqrt 2`.
pub(crate) fn to_matrix(v: &[f64]) -> CMatrix {
    let mut g = CMatrix::zeros(4, 4);
    for j in 0..4 {
        g[(j, j)] = Complex64::new(v[j], 0.0);
    }
    let mut idx = 4;
    for j in 0..4 {
        for k in j + 1..4 {
            let z = Complex64::new(v[idx], v[idx + 1]) * FRAC_1_SQRT_2;
            g[(j, k)] = z;
            g[(k, j)] = z.conj();
            idx += 2;
        }
    }
    g
}

pub(crate) fn to_vector(g: &CMatrix, out: &mut [f64]) {
    for j in 0..4 {
        out[j] = g[(j, j)].re;
    }
    let mut idx = 4;
    for j in 0..4 {
        for k in j + 1..4 {
            let z = g[(j, k)] * std::f64::consts::SQRT_2;
            out[idx] = z.re;
            out[idx + 1] = z.im;
            idx += 2;
        }
    }
}

/// Adds `(1 - |z_var|^2) v^* G v` into a coefficient table.
fn add_form(out: &mut [[Complex64; 8]; 8], g: &CMatrix, basis: &[usize; 4], var: usize) {
    for j in 0..4 {
        for k in 0..4 {
            out[basis[k]][basis[j]] += g[(j, k)];
            out[basis[k] | var][basis[j] | var] -= g[(j, k)];
        }
    }
}

/// Coefficient table of the right-hand side for Gram matrices `g1`, `g2`.
pub fn form_coefficients(g1: &CMatrix, g2: &CMatrix) -> [[Complex64; 8]; 8] {
    let mut out = [[Complex64::new(0.0, 0.0); 8]; 8];
    add_form(&mut out, g1, &BASIS_1, 0b001);
    add_form(&mut out, g2, &BASIS_2, 0b010);
    out
}

fn flatten(c: &[[Complex64; 8]; 8]) -> Vec<f64> {
    let mut out = vec![0.0; ROWS];
    for (i, z) in c.iter().flatten().enumerate() {
        out[i] = z.re;
        out[i + 64] = z.im;
    }
    out
}

/// Column-major `ROWS x 2 DIM` constraint matrix.
fn constraint_matrix() -> Vec<Vec<f64>> {
    let zero = CMatrix::zeros(4, 4);
    (0..2 * DIM)
        .map(|col| {
            let mut v = [0.0; DIM];
            v[col % DIM] = 1.0;
            let m = to_matrix(&v);
            let c = if col < DIM {
                form_coefficients(&m, &zero)
            } else {
                form_coefficients(&zero, &m)
            };
            flatten(&c)
        })
        .collect()
}

/// Least-norm solution `x0` and nullspace projector `N` of `A x = b`.
struct AffineSet {
    x0: Vec<f64>,
    null: Vec<Vec<f64>>,
}

fn affine_set(cols: &[Vec<f64>], b: &[f64]) -> Result<AffineSet> {
    let n = cols.len();
    let dot = |u: &[f64], v: &[f64]| u.iter().zip(v).map(|(x, y)| x * y).sum::<f64>();
    let ata = CMatrix::from_fn(n, n, |i, j| Complex64::new(dot(&cols[i], &cols[j]), 0.0));
    let eig = hermitian_eigen(&HermitianMatrix::symmetrized(ata))?;
    let lmax = eig.values.last().copied().unwrap_or(0.0);
    let atb: Vec<f64> = cols.iter().map(|c| dot(c, b)).collect();
    let mut x0 = vec![0.0; n];
    let mut null = vec![vec![0.0; n]; n];
    for i in 0..n {
        null[i][i] = 1.0;
    }
    for (k, &lam) in eig.values.iter().enumerate() {
        if lam <= 1e-9 * lmax {
            continue;
        }
        // Spectral functions of the real symmetric A^T A are real, so only
        // real parts of the complex outer products survive the sum.
        let v = eig.vectors.column(k);
        let coef: Complex64 = v.iter().zip(&atb).map(|(z, &t)| z.conj() * t).sum::<Complex64>() / lam;
        for i in 0..n {
            x0[i] += (coef * v[i]).re;
            for j in 0..n {
                null[i][j] -= (v[i] * v[j].conj()).re;
            }
        }
    }
    Ok(AffineSet { x0, null })
}

fn residual(cols: &[Vec<f64>], x: &[f64], b: &[f64]) -> f64 {
    let mut r: Vec<f64> = b.iter().map(|v| -v).collect();
    for (c, &xi) in cols.iter().zip(x) {
        if xi != 0.0 {
            for (ri, ci) in r.iter_mut().zip(c) {
                *ri += ci * xi;
            }
        }
    }
    r.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn project_block(v: &mut [f64]) -> Result<()> {
    let p = psd_project(&HermitianMatrix::symmetrized(to_matrix(v)))?;
    to_vector(p.as_matrix(), v);
    Ok(())
}

/// Lower Cholesky factor of a Hermitian matrix, `None` unless positive definite.
fn cholesky(m: &CMatrix) -> Option<CMatrix> {
    let n = m.rows();
    let mut l = CMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = m[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if !(d > 0.0) {
            return None;
        }
        let d = d.sqrt();
        l[(j, j)] = Complex64::new(d, 0.0);
        for i in j + 1..n {
            let mut s = m[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / d;
        }
    }
    Some(l)
}

/// `(log det M, M^-1)` from the Cholesky factor `L`.
fn logdet_inverse(l: &CMatrix) -> (f64, CMatrix) {
    let n = l.rows();
    let logdet = 2.0 * (0..n).map(|i| l[(i, i)].re.ln()).sum::<f64>();
    let mut inv = CMatrix::zeros(n, n);
    for col in 0..n {
        // L y = e_col, then L^* x = y.
        let mut y = vec![Complex64::new(0.0, 0.0); n];
        for i in 0..n {
            let mut s = if i == col {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            };
            for k in 0..i {
                s -= l[(i, k)] * y[k];
            }
            y[i] = s / l[(i, i)];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in i + 1..n {
                s -= l[(k, i)].conj() * inv[(k, col)];
            }
            inv[(i, col)] = s / l[(i, i)];
        }
    }
    (logdet, inv)
}

/// `Re tr(P Q)` for square matrices.
fn trace_product(p: &CMatrix, q: &CMatrix) -> f64 {
    let n = p.rows();
    let mut acc = 0.0;
    for i in 0..n {
        for k in 0..n {
            acc += (p[(i, k)] * q[(k, i)]).re;
        }
    }
    acc
}

/// Solves the small dense system `h x = g` by Gaussian elimination with partial pivoting.
fn solve_dense(mut h: Vec<Vec<f64>>, mut g: Vec<f64>) -> Option<Vec<f64>> {
    let n = g.len();
    for c in 0..n {
        let piv = (c..n).max_by(|&i, &j| h[i][c].abs().total_cmp(&h[j][c].abs()))?;
        if !(h[piv][c].abs() > 0.0) {
            return None;
        }
        h.swap(c, piv);
        g.swap(c, piv);
        for r in c + 1..n {
            let f = h[r][c] / h[c][c];
            for k in c..n {
                h[r][k] -= f * h[c][k];
            }
            g[r] -= f * g[c];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|k| h[r][k] * x[k]).sum();
        x[r] = (g[r] - s) / h[r][r];
    }
    Some(x)
}

/// Orthonormal basis of the range of the nullspace projector.
fn null_basis(null: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = null.len();
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for j in 0..n {
        let mut v: Vec<f64> = (0..n).map(|i| null[i][j]).collect();
        for _ in 0..2 {
            for u in &basis {
                let d: f64 = u.iter().zip(&v).map(|(a, b)| a * b).sum();
                v.iter_mut().zip(u).for_each(|(x, y)| *x -= d * y);
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-6 {
            v.iter_mut().for_each(|x| *x /= norm);
            basis.push(v);
        }
    }
    basis
}

/// The affine family `x0 + sum_i w_i n_i` split into its two Gram blocks.
struct Pencil {
    x0: Vec<f64>,
    dirs: Vec<Vec<f64>>,
    base: [CMatrix; 2],
    slopes: Vec<[CMatrix; 2]>,
}

fn blocks(x: &[f64]) -> [CMatrix; 2] {
    [to_matrix(&x[..DIM]), to_matrix(&x[DIM..])]
}

impl Pencil {
    fn new(set: AffineSet) -> Self {
        let dirs = null_basis(&set.null);
        Self {
            base: blocks(&set.x0),
            slopes: dirs.iter().map(|d| blocks(d)).collect(),
            x0: set.x0,
            dirs,
        }
    }

    fn point(&self, w: &[f64]) -> Vec<f64> {
        let mut x = self.x0.clone();
        for (d, &wi) in self.dirs.iter().zip(w) {
            x.iter_mut().zip(d).for_each(|(xi, di)| *xi += wi * di);
        }
        x
    }

    /// `G_k(w) - t I` for both blocks.
    fn shifted(&self, u: &[f64]) -> [CMatrix; 2] {
        let (w, t) = u.split_at(u.len() - 1);
        let mut out = self.base.clone();
        for (k, m) in out.iter_mut().enumerate() {
            for (s, &wi) in self.slopes.iter().zip(w) {
                *m = m.add(&s[k].scale(Complex64::new(wi, 0.0))).expect("4x4");
            }
            for i in 0..4 {
                m[(i, i)] -= t[0];
            }
        }
        out
    }

    /// Barrier value `-s t - sum_k log det S_k`, or `None` outside the domain.
    fn barrier(&self, u: &[f64], s: f64) -> Option<f64> {
        let mut v = -s * u[u.len() - 1];
        for m in self.shifted(u) {
            v -= logdet_inverse(&cholesky(&m)?).0;
        }
        Some(v)
    }
}

/// Follows the central path of `max t` subject to `G_k - t I >= 0` over the
/// affine solution set, with barrier weights on a fixed grid relative to
/// `||b||`. Stops at the first central point with `t > 0`, or at duality gap
/// `tol * ||b||`, so the result is unique and scales with the data.
fn central_path(cols: &[Vec<f64>], b: &[f64], set: AffineSet, opts: &FeasibilityOptions) -> Result<Sos12> {
    let scale = b.iter().map(|v| v * v).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
    let pencil = Pencil::new(set);
    let nw = pencil.dirs.len();
    // Barrier parameter: total dimension of the two cones.
    let nu = 8.0;

    let mut u = vec![0.0; nw + 1];
    let start = pencil
        .base
        .iter()
        .map(|m| hermitian_eigenvalues(&HermitianMatrix::symmetrized(m.clone())))
        .collect::<Result<Vec<_>>>()?;
    u[nw] = start.iter().map(|ev| ev[0]).fold(f64::INFINITY, f64::min) - scale;

    let mut s = nu / scale;
    let mut steps = 0;
    loop {
        // Damped Newton on the barrier for the current s.
        for _ in 0..INNER_STEPS {
            if steps >= opts.max_newton {
                return Err(Error::NoConvergence {
                    what: "central path",
                    residual: nu / s,
                });
            }
            steps += 1;
            let mut grad = vec![0.0; nw + 1];
            grad[nw] = -s;
            let mut hess = vec![vec![0.0; nw + 1]; nw + 1];
            for (k, m) in pencil.shifted(&u).iter().enumerate() {
                let l = cholesky(m).ok_or(Error::NotPsd { min_eigenvalue: u[nw] })?;
                let inv = logdet_inverse(&l).1;
                let mut dirs: Vec<CMatrix> = pencil.slopes.iter().map(|sl| sl[k].clone()).collect();
                dirs.push(CMatrix::identity(4).scale(Complex64::new(-1.0, 0.0)));
                let prod: Vec<CMatrix> = dirs.iter().map(|d| inv.matmul(d).expect("4x4")).collect();
                for i in 0..=nw {
                    grad[i] -= (0..4).map(|j| prod[i][(j, j)].re).sum::<f64>();
                    for j in 0..=i {
                        let h = trace_product(&prod[i], &prod[j]);
                        hess[i][j] += h;
                        if i != j {
                            hess[j][i] += h;
                        }
                    }
                }
            }
            let neg: Vec<f64> = grad.iter().map(|g| -g).collect();
            let step = solve_dense(hess, neg).ok_or(Error::NoConvergence {
                what: "central path",
                residual: nu / s,
            })?;
            let decrement: f64 = -grad.iter().zip(&step).map(|(g, d)| g * d).sum::<f64>();
            if decrement <= 1e-18 {
                break;
            }
            let f0 = pencil.barrier(&u, s).expect("iterate stays interior");
            let mut alpha = 1.0;
            loop {
                let trial: Vec<f64> = u.iter().zip(&step).map(|(x, d)| x + alpha * d).collect();
                if let Some(f) = pencil.barrier(&trial, s) {
                    if f <= f0 - 0.25 * alpha * decrement {
                        u = trial;
                        break;
                    }
                }
                alpha *= 0.5;
                if alpha < 1e-12 {
                    break;
                }
            }
            if decrement <= 1e-10 || alpha < 1e-12 {
                break;
            }
            if u[nw].abs() > 1e8 * scale {
                return Err(Error::InvalidInput("unbounded Gram matrices".into()));
            }
        }
        if u[nw] > 0.0 || nu / s <= opts.tol * scale {
            break;
        }
        s *= 10.0;
    }

    let mut x = pencil.point(&u[..nw]);
    if u[nw] < 0.0 {
        project_block(&mut x[..DIM])?;
        project_block(&mut x[DIM..])?;
    }
    let r = residual(cols, &x, b);
    if r > opts.residual_tol * scale {
        return Err(Error::NoConvergence {
            what: "Gram feasibility",
            residual: r,
        });
    }
    Ok(Sos12 {
        g1: HermitianMatrix::symmetrized(to_matrix(&x[..DIM])),
        g2: HermitianMatrix::symmetrized(to_matrix(&x[DIM..])),
        residual: r,
        iterations: steps,
        method: FeasibilityMethod::CentralPath,
    })
}

/// Alternating projections with Dykstra correction, started from zero.
fn dykstra(cols: &[Vec<f64>], b: &[f64], set: &AffineSet, opts: &FeasibilityOptions) -> Result<Sos12> {
    let bnorm = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    let tol = opts.tol * bnorm.max(1.0);
    let n = 2 * DIM;
    let mut x = vec![0.0; n];
    let mut y = vec![0.0; n];
    let mut z = vec![0.0; n];
    let mut best = f64::INFINITY;
    for it in 0..opts.max_iter {
        // The affine step needs no correction term.
        for i in 0..n {
            let mut acc = set.x0[i];
            for j in 0..n {
                acc += set.null[i][j] * (x[j] - set.x0[j]);
            }
            z[i] = acc + y[i];
        }
        x.copy_from_slice(&z);
        project_block(&mut x[..DIM])?;
        project_block(&mut x[DIM..])?;
        for i in 0..n {
            y[i] = z[i] - x[i];
        }
        let r = residual(cols, &x, b);
        best = best.min(r);
        if r <= tol {
            return Ok(Sos12 {
                g1: HermitianMatrix::symmetrized(to_matrix(&x[..DIM])),
                g2: HermitianMatrix::symmetrized(to_matrix(&x[DIM..])),
                residual: r,
                iterations: it + 1,
                method: FeasibilityMethod::Dykstra,
            });
        }
    }
    Err(Error::NoConvergence {
        what: "Dykstra projection",
        residual: best,
    })
}

/// Finds PSD `G1`, `G2` completing the decomposition for the given `E`.
pub fn solve_sos12(p: &MultiAffine3Poly, e: &EFactor, opts: &FeasibilityOptions) -> Result<Sos12> {
    let cols = constraint_matrix();
    let b = flatten(&target_coefficients(p, e));
    let set = affine_set(&cols, &b)?;
    match opts.method {
        FeasibilityMethod::Dykstra => dykstra(&cols, &b, &set, opts),
        FeasibilityMethod::CentralPath => central_path(&cols, &b, set, opts),
        FeasibilityMethod::Auto => match dykstra(&cols, &b, &set, opts) {
            Err(Error::NoConvergence { .. }) => central_path(&cols, &b, set, opts),
            other => other,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coordinates_round_trip() {
        let v: Vec<f64> = (0..DIM).map(|i| (i as f64 * 0.37).sin()).collect();
        let m = to_matrix(&v);
        assert!(HermitianMatrix::new(m.clone()).is_ok());
        let mut back = [0.0; DIM];
        to_vector(&m, &mut back);
        for (a, b) in v.iter().zip(&back) {
            assert!((a - b).abs() < 1e-15);
        }
        // Orthonormal: the Frobenius norm matches the coordinate norm.
        let n2: f64 = v.iter().map(|x| x * x).sum();
        assert!((m.frobenius_norm().powi(2) - n2).abs() < 1e-14);
    }

    #[test]
    fn constraint_rank() {
        let cols = constraint_matrix();
        let set = affine_set(&cols, &vec![0.0; ROWS]).unwrap();
        let nullity: f64 = (0..2 * DIM).map(|i| set.null[i][i]).sum();
        assert!((nullity - 4.0).abs() < 1e-9, "nullity {nullity}");
    }
}
