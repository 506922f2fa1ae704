//! Matrix Fejér–Riesz factorization of `T(z) = C0 + C1 z + C1^* conj(z)`
//! through the Riccati equation `X = C0 - C1^* X^{-1} C1`.
//!
//! With `X = R^* R`, `R` upper triangular, the factor `A(z) = R + R^{-*} C1 z`
//! satisfies `A(z)^* A(z) = T(z)` on the circle.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::EFactor;
use crate::error::{Error, Result};
use crate::poly::TrigPoly11;

pub(crate) type Mat2 = [[Complex64; 2]; 2];

const Z: Complex64 = Complex64::new(0.0, 0.0);

pub(crate) fn mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[Z; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub(crate) fn adj(a: &Mat2) -> Mat2 {
    [[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]]
}

fn lin(a: &Mat2, b: &Mat2, s: f64) -> Mat2 {
    let mut out = *a;
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] += b[i][j] * s;
        }
    }
    out
}

pub(crate) fn norm(a: &Mat2) -> f64 {
    a.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn inv(a: &Mat2) -> Option<Mat2> {
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    let scale = norm(a).powi(2);
    if !(det.norm() > 1e-300 && det.norm() > 1e-15 * scale) {
        return None;
    }
    Some([[a[1][1] / det, -a[0][1] / det], [-a[1][0] / det, a[0][0] / det]])
}

fn hermitian_part(a: &Mat2) -> Mat2 {
    let off = (a[0][1] + a[1][0].conj()) * 0.5;
    [
        [Complex64::new(a[0][0].re, 0.0), off],
        [off.conj(), Complex64::new(a[1][1].re, 0.0)],
    ]
}

/// Smallest eigenvalue of a Hermitian 2x2 matrix.
fn min_eigenvalue(a: &Mat2) -> f64 {
    let (p, q) = (a[0][0].re, a[1][1].re);
    0.5 * (p + q) - (0.25 * (p - q).powi(2) + a[0][1].norm_sqr()).sqrt()
}

/// Upper-triangular `R` with `R^* R = X`; `None` unless `X` is positive definite.
fn cholesky_upper(x: &Mat2) -> Option<Mat2> {
    let r00 = x[0][0].re;
    if !(r00 > 0.0) {
        return None;
    }
    let r00 = r00.sqrt();
    let r01 = x[0][1] / r00;
    let s = x[1][1].re - r01.norm_sqr();
    if !(s > 0.0) {
        return None;
    }
    Some([[Complex64::new(r00, 0.0), r01], [Z, Complex64::new(s.sqrt(), 0.0)]])
}

/// Solve `R^* Y = B` for upper-triangular `R`.
fn solve_adjoint_upper(r: &Mat2, b: &Mat2) -> Mat2 {
    // R^* is lower triangular.
    let l00 = r[0][0].conj();
    let l10 = r[0][1].conj();
    let l11 = r[1][1].conj();
    let mut y = [[Z; 2]; 2];
    for j in 0..2 {
        y[0][j] = b[0][j] / l00;
        y[1][j] = (b[1][j] - l10 * y[0][j]) / l11;
    }
    y
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RiccatiMethod {
    /// Quadratically convergent doubling iteration.
    CyclicReduction,
    /// `X <- C0 - C1^* X^{-1} C1` from `X = C0`.
    FixedPoint,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FejerRieszOptions {
    /// Accepted negativity of `min (t0 - 2|t1|)` before `NotPositive`.
    pub tol: f64,
    pub method: RiccatiMethod,
    pub max_iter: usize,
    /// Stop once an update moves `X` by less than this, relative to `||C0||`.
    pub step_tol: f64,
    /// Constant added to `t` when the unregularized solve fails.
    pub regularization: f64,
}

impl Default for FejerRieszOptions {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            method: RiccatiMethod::CyclicReduction,
            max_iter: 100_000,
            step_tol: 1e-13,
            regularization: 1e-10,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FejerRiesz {
    pub e: EFactor,
    /// Riccati solution `X = A0^* A0`.
    pub x: Mat2,
    pub iterations: usize,
    /// Constant added to `t`, zero when none was needed.
    pub regularization: f64,
    /// Margin `min (t0 - 2|t1|)` of the input.
    pub margin: f64,
}

/// `(C0, C1)` with `T(z1) = C0 + C1 z1 + C1^* conj(z1)` the 2x2 matrix whose
/// quadratic form at `(1, z2)` is `t(z1, z2)`.
pub fn coefficient_matrices(t: &TrigPoly11) -> (Mat2, Mat2) {
    let c0 = [
        [t.get(0, 0) * 0.5, t.get(0, 1)],
        [t.get(0, 1).conj(), t.get(0, 0) * 0.5],
    ];
    let c1 = [
        [t.get(1, 0) * 0.5, t.get(1, 1)],
        [t.get(-1, 1).conj(), t.get(1, 0) * 0.5],
    ];
    (c0, c1)
}

fn check_iterate(x: &Mat2, scale: f64, what: &'static str) -> Result<Mat2> {
    let x = hermitian_part(x);
    let lam = min_eigenvalue(&x);
    if !lam.is_finite() || lam < -1e-12 * scale {
        return Err(Error::NoConvergence { what, residual: lam });
    }
    Ok(x)
}

/// Cyclic reduction: `X_{k+1} = X_k - A_k^* Q_k^{-1} A_k`,
/// `Q_{k+1} = Q_k - A_k Q_k^{-1} A_k^* - A_k^* Q_k^{-1} A_k`,
/// `A_{k+1} = A_k Q_k^{-1} A_k`, from `X_0 = Q_0 = C0`, `A_0 = C1`.
fn cyclic_reduction(c0: &Mat2, c1: &Mat2, opts: &FejerRieszOptions) -> Result<(Mat2, usize)> {
    const WHAT: &str = "cyclic reduction";
    let scale = norm(c0).max(f64::MIN_POSITIVE);
    let (mut x, mut q, mut a) = (*c0, *c0, *c1);
    for k in 0..opts.max_iter {
        let qi = inv(&q).ok_or(Error::NoConvergence {
            what: WHAT,
            residual: f64::INFINITY,
        })?;
        let ah = adj(&a);
        let ahqa = mul(&ah, &mul(&qi, &a));
        let x_next = check_iterate(&lin(&x, &ahqa, -1.0), scale, WHAT)?;
        let step = norm(&lin(&x_next, &x, -1.0));
        q = hermitian_part(&lin(&lin(&q, &mul(&a, &mul(&qi, &ah)), -1.0), &ahqa, -1.0));
        a = mul(&a, &mul(&qi, &a));
        x = x_next;
        if step <= opts.step_tol * scale || norm(&a) <= 1e-300 {
            return Ok((x, k + 1));
        }
    }
    Err(Error::NoConvergence {
        what: WHAT,
        residual: riccati_residual(&x, c0, c1),
    })
}

fn fixed_point(c0: &Mat2, c1: &Mat2, opts: &FejerRieszOptions) -> Result<(Mat2, usize)> {
    const WHAT: &str = "Riccati fixed point";
    let scale = norm(c0).max(f64::MIN_POSITIVE);
    let mut x = *c0;
    for k in 0..opts.max_iter {
        let xi = inv(&x).ok_or(Error::NoConvergence {
            what: WHAT,
            residual: f64::INFINITY,
        })?;
        let next = check_iterate(&lin(c0, &mul(&adj(c1), &mul(&xi, c1)), -1.0), scale, WHAT)?;
        let step = norm(&lin(&next, &x, -1.0));
        x = next;
        if step <= opts.step_tol * scale {
            return Ok((x, k + 1));
        }
    }
    Err(Error::NoConvergence {
        what: WHAT,
        residual: riccati_residual(&x, c0, c1),
    })
}

/// `||X + C1^* X^{-1} C1 - C0||_F`.
pub fn riccati_residual(x: &Mat2, c0: &Mat2, c1: &Mat2) -> f64 {
    match inv(x) {
        Some(xi) => norm(&lin(&lin(x, &mul(&adj(c1), &mul(&xi, c1)), 1.0), c0, -1.0)),
        None => f64::INFINITY,
    }
}

/// Solves the Riccati equation with the chosen method.
pub fn solve_riccati(c0: &Mat2, c1: &Mat2, opts: &FejerRieszOptions) -> Result<(Mat2, usize)> {
    match opts.method {
        RiccatiMethod::CyclicReduction => cyclic_reduction(c0, c1, opts),
        RiccatiMethod::FixedPoint => fixed_point(c0, c1, opts),
    }
}

fn factor_once(t: &TrigPoly11, opts: &FejerRieszOptions) -> Result<(EFactor, Mat2, usize)> {
    let (c0, c1) = coefficient_matrices(t);
    let (x, iterations) = solve_riccati(&c0, &c1, opts)?;
    let r = cholesky_upper(&x).ok_or(Error::NoConvergence {
        what: "Riccati solution factorization",
        residual: min_eigenvalue(&x),
    })?;
    let a1 = solve_adjoint_upper(&r, &c1);
    Ok((EFactor { a0: r, a1 }, x, iterations))
}

/// `E(z1, z2) = (A0 + A1 z1) (1, z2)^t` with `|E|^2 = t` on the torus.
///
/// Requires `min (t0 - 2|t1|) >= -tol`. If the solve fails (typically a
/// boundary-degenerate `t`), retries once on `t + regularization`.
pub fn fejer_riesz_2x2(t: &TrigPoly11, opts: &FejerRieszOptions) -> Result<FejerRiesz> {
    if !t.is_hermitian(1e-12 * t.coeffs.iter().flatten().map(|z| z.norm()).fold(1.0, f64::max)) {
        return Err(Error::InvalidInput("trigonometric polynomial is not Hermitian".into()));
    }
    let (margin, _, _) = t.min_on_torus();
    if margin < -opts.tol {
        return Err(Error::NotPositive { margin });
    }
    let (e, x, iterations, regularization) = match factor_once(t, opts) {
        Ok((e, x, it)) => (e, x, it, 0.0),
        Err(_) => {
            let eps = opts.regularization;
            let (e, x, it) = factor_once(&t.add_constant(eps), opts)?;
            (e, x, it, eps)
        }
    };
    Ok(FejerRiesz {
        e,
        x,
        iterations,
        regularization,
        margin,
    })
}

/// `sup ||A(z)^* A(z) - T(z)||_F` over `samples` equispaced circle points.
pub fn factor_residual(t: &TrigPoly11, e: &EFactor, samples: usize) -> f64 {
    let (c0, c1) = coefficient_matrices(t);
    let c1h = adj(&c1);
    (0..samples)
        .map(|k| {
            let z = Complex64::from_polar(1.0, TAU * k as f64 / samples as f64);
            let a = lin(&e.a0, &e.a1.map(|row| row.map(|v| v * z)), 1.0);
            let mut tz = c0;
            for i in 0..2 {
                for j in 0..2 {
                    tz[i][j] += c1[i][j] * z + c1h[i][j] * z.conj();
                }
            }
            norm(&lin(&mul(&adj(&a), &a), &tz, -1.0))
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kummert::t_from_ab;
    use crate::poly::sample::random_stable_3var;
    use crate::poly::MultiAffine3Poly;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn t_of(p: &MultiAffine3Poly) -> TrigPoly11 {
        let (a, b) = p.split();
        t_from_ab(&a, &b)
    }

    #[test]
    fn constant_one() {
        let f = fejer_riesz_2x2(&TrigPoly11::constant(1.0), &FejerRieszOptions::default()).unwrap();
        assert_eq!(f.regularization, 0.0);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((f.e.a0[0][0] - h).norm() < 1e-15 && (f.e.a0[1][1] - h).norm() < 1e-15);
        assert!(norm(&f.e.a1) == 0.0);
        let trace: f64 = f.e.gram().iter().enumerate().map(|(i, r)| r[i].re).sum();
        assert!((trace - 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_is_regularized() {
        let f = fejer_riesz_2x2(&TrigPoly11::constant(0.0), &FejerRieszOptions::default()).unwrap();
        assert_eq!(f.regularization, 1e-10);
        for k in 0..64 {
            let z1 = Complex64::from_polar(1.0, 0.1 * k as f64);
            let z2 = Complex64::from_polar(1.0, 0.37 * k as f64);
            let e = f.e.eval(z1, z2);
            assert!(e[0].norm_sqr() + e[1].norm_sqr() <= 1e-9);
        }
    }

    #[test]
    fn negative_input_is_rejected() {
        let t = TrigPoly11::constant(-1.0);
        assert!(matches!(
            fejer_riesz_2x2(&t, &FejerRieszOptions::default()),
            Err(Error::NotPositive { .. })
        ));
    }

    #[test]
    fn boundary_example_residual() {
        let third = -1.0 / 3.0;
        let p = MultiAffine3Poly::from_real([1.0, third, third, 0.0, third, 0.0, 0.0, 0.0]);
        let t = t_of(&p);
        let f = fejer_riesz_2x2(&t, &FejerRieszOptions::default()).unwrap();
        assert!(factor_residual(&t, &f.e, 200) <= 1e-9);
    }

    #[test]
    fn methods_agree_and_iterates_stay_psd() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..40 {
            let t = t_of(&random_stable_3var(&mut rng));
            let cr = fejer_riesz_2x2(&t, &FejerRieszOptions::default()).unwrap();
            let fp_opts = FejerRieszOptions {
                method: RiccatiMethod::FixedPoint,
                ..FejerRieszOptions::default()
            };
            let fp = fejer_riesz_2x2(&t, &fp_opts).unwrap();
            assert_eq!(cr.regularization, 0.0);
            assert!(norm(&lin(&cr.x, &fp.x, -1.0)) <= 1e-10 * norm(&cr.x));
            assert!(cr.iterations < fp.iterations);
            assert!(factor_residual(&t, &cr.e, 512) <= 1e-9);
            let (c0, c1) = coefficient_matrices(&t);
            assert!(riccati_residual(&cr.x, &c0, &c1) <= 1e-12);
        }
    }

    #[test]
    fn triangular_helpers() {
        let x = [
            [Complex64::new(2.0, 0.0), Complex64::new(0.5, -0.25)],
            [Complex64::new(0.5, 0.25), Complex64::new(1.0, 0.0)],
        ];
        let r = cholesky_upper(&x).unwrap();
        assert!(norm(&lin(&mul(&adj(&r), &r), &x, -1.0)) < 1e-15);
        let b = [
            [Complex64::new(1.0, 2.0), Z],
            [Complex64::new(0.0, -1.0), Complex64::new(3.0, 0.0)],
        ];
        let y = solve_adjoint_upper(&r, &b);
        assert!(norm(&lin(&mul(&adj(&r), &y), &b, -1.0)) < 1e-14);
        assert!(cholesky_upper(&[[Z, Z], [Z, Z]]).is_none());
    }
}
