//! Polynomial representations.
//!
//! Multi-affine polynomials are indexed by subsets of their variables,
//! encoded as bitmasks: bit `k` set means `z_{k+1}` divides the monomial.

pub mod sample;
mod stability;
mod trig;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{binomial, eval_poly};

pub use stability::{
    stability_3var, stability_radius, stability_sym, stability_univariate, StabilityReport, StabilityStatus,
    DEFAULT_EPS_STAB,
};
pub use trig::{torus_min_deg1, torus_min_profile, TrigDeg1, TrigPoly11};

/// Default cap on the number of variables of a symmetric polynomial.
pub const DEFAULT_DEGREE_CAP: usize = 12;
/// Hard cap; binomials and `2^(d-1)` matrices stay tractable up to here.
pub const MAX_DEGREE_CAP: usize = 14;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

fn check_finite(values: &[Complex64]) -> Result<()> {
    if values.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidInput("non-finite coefficient".into()))
    }
}

/// Univariate polynomial `sum_j coeffs[j] z^j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "UniPolyJson")]
pub struct UniPoly {
    coeffs: Vec<Complex64>,
}

#[derive(Deserialize)]
struct UniPolyJson {
    coeffs: Vec<Complex64>,
}

impl TryFrom<UniPolyJson> for UniPoly {
    type Error = Error;

    fn try_from(raw: UniPolyJson) -> Result<Self> {
        UniPoly::new(raw.coeffs)
    }
}

impl UniPoly {
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidInput("polynomial needs at least one coefficient".into()));
        }
        check_finite(&coeffs)?;
        Ok(Self { coeffs })
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    /// Expands `lead * prod_k (1 - z / root_k)`.
    pub fn from_roots(roots: &[Complex64]) -> Self {
        let mut out = vec![Complex64::new(1.0, 0.0)];
        for &r in roots {
            let inv = r.inv();
            let mut next = vec![ZERO; out.len() + 1];
            for (i, &a) in out.iter().enumerate() {
                next[i] += a;
                next[i + 1] -= a * inv;
            }
            out = next;
        }
        Self { coeffs: out }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Degree after trimming trailing zeros; the zero polynomial has degree 0.
    pub fn degree(&self) -> usize {
        self.coeffs.iter().rposition(|c| *c != ZERO).unwrap_or(0)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        eval_poly(&self.coeffs, z)
    }

    /// Coefficients padded (or trimmed of zeros) to exactly `d + 1` entries.
    pub fn padded(&self, d: usize) -> Result<Vec<Complex64>> {
        let deg = self.degree();
        if deg > d {
            return Err(Error::DegreeExceeds { degree: deg, d });
        }
        let mut out = vec![ZERO; d + 1];
        out[..=deg].copy_from_slice(&self.coeffs[..=deg]);
        Ok(out)
    }
}

/// Symmetric multi-affine polynomial
/// `p(z) = sum_{alpha subset [d]} binom(d, |alpha|)^{-1} p_{|alpha|} z^alpha`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SymJson")]
pub struct SymMultiAffinePoly {
    d: usize,
    weights: Vec<Complex64>,
}

#[derive(Deserialize)]
struct SymJson {
    d: usize,
    weights: Vec<Complex64>,
}

impl TryFrom<SymJson> for SymMultiAffinePoly {
    type Error = Error;

    fn try_from(raw: SymJson) -> Result<Self> {
        if raw.weights.len() != raw.d + 1 {
            return Err(Error::DimensionMismatch {
                expected: raw.d + 1,
                got: raw.weights.len(),
            });
        }
        SymMultiAffinePoly::new(raw.weights)
    }
}

impl SymMultiAffinePoly {
    /// Builds from the `d + 1` weights `p_0..p_d`.
    pub fn new(weights: Vec<Complex64>) -> Result<Self> {
        if weights.len() < 2 {
            return Err(Error::InvalidInput(
                "symmetric polynomial needs at least one variable".into(),
            ));
        }
        if weights.len() - 1 > MAX_DEGREE_CAP {
            return Err(Error::DegreeCap {
                d: weights.len() - 1,
                cap: MAX_DEGREE_CAP,
            });
        }
        check_finite(&weights)?;
        Ok(Self {
            d: weights.len() - 1,
            weights,
        })
    }

    pub fn from_real(weights: &[f64]) -> Result<Self> {
        Self::new(weights.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    /// The constant polynomial `1` viewed in `d` variables.
    pub fn one(d: usize) -> Result<Self> {
        let mut w = vec![ZERO; d + 1];
        w[0] = Complex64::new(1.0, 0.0);
        Self::new(w)
    }

    #[inline]
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn weights(&self) -> &[Complex64] {
        &self.weights
    }

    /// Coefficient of a single monomial `z^alpha` with `|alpha| = k`.
    pub fn monomial_coeff(&self, k: usize) -> Complex64 {
        self.weights[k] / binomial(self.d, k) as f64
    }

    /// `p(z, ..., z)`.
    pub fn diagonal(&self) -> UniPoly {
        UniPoly {
            coeffs: self.weights.clone(),
        }
    }

    /// `p(r z)`: weight `j` scales by `r^j`.
    pub fn scaled(&self, r: f64) -> Self {
        let mut rj = 1.0;
        let weights = self
            .weights
            .iter()
            .map(|&w| {
                let out = w * rj;
                rj *= r;
                out
            })
            .collect();
        Self { d: self.d, weights }
    }

    pub fn eval(&self, z: &[Complex64]) -> Result<Complex64> {
        eval_sym(self, z)
    }
}

/// Unique symmetric multi-affine polynomial in `d` variables agreeing with
/// `q` on the diagonal.
pub fn symmetrize(q: &UniPoly, d: usize) -> Result<SymMultiAffinePoly> {
    SymMultiAffinePoly::new(q.padded(d)?)
}

/// `z_1 ... z_d conj(p(1 / conj(z)))`: weights reversed and conjugated.
pub fn reflect(p: &SymMultiAffinePoly) -> SymMultiAffinePoly {
    SymMultiAffinePoly {
        d: p.d,
        weights: p.weights.iter().rev().map(|w| w.conj()).collect(),
    }
}

/// Evaluates `p` at `z` by enumerating every subset of `[d]`.
pub fn eval_sym(p: &SymMultiAffinePoly, z: &[Complex64]) -> Result<Complex64> {
    if z.len() != p.d {
        return Err(Error::DimensionMismatch {
            expected: p.d,
            got: z.len(),
        });
    }
    let coeff: Vec<Complex64> = (0..=p.d).map(|k| p.monomial_coeff(k)).collect();
    let n = 1usize << p.d;
    let mut mono = vec![ZERO; n];
    mono[0] = Complex64::new(1.0, 0.0);
    let mut acc = coeff[0];
    for mask in 1..n {
        let low = mask.trailing_zeros() as usize;
        mono[mask] = mono[mask & (mask - 1)] * z[low];
        acc += coeff[mask.count_ones() as usize] * mono[mask];
    }
    Ok(acc)
}

/// Multi-affine polynomial in two variables, indexed by bitmask
/// (bit 0: `z_1`, bit 1: `z_2`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultiAffine2Poly {
    pub coeffs: [Complex64; 4],
}

impl MultiAffine2Poly {
    pub fn eval(&self, z1: Complex64, z2: Complex64) -> Complex64 {
        let c = &self.coeffs;
        c[0] + c[1] * z1 + (c[2] + c[3] * z1) * z2
    }

    /// Reflection at multidegree (1, 1).
    pub fn reflect(&self) -> Self {
        let mut coeffs = [ZERO; 4];
        for (s, c) in coeffs.iter_mut().enumerate() {
            *c = self.coeffs[3 ^ s].conj();
        }
        Self { coeffs }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut coeffs = self.coeffs;
        for (c, o) in coeffs.iter_mut().zip(&other.coeffs) {
            *c += o;
        }
        Self { coeffs }
    }
}

/// Multi-affine polynomial in three variables, indexed by bitmask.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ThreeJson")]
pub struct MultiAffine3Poly {
    pub coeffs: [Complex64; 8],
}

#[derive(Deserialize)]
struct ThreeJson {
    coeffs: Vec<Complex64>,
}

impl TryFrom<ThreeJson> for MultiAffine3Poly {
    type Error = Error;

    fn try_from(raw: ThreeJson) -> Result<Self> {
        let coeffs: [Complex64; 8] = raw.coeffs.as_slice().try_into().map_err(|_| Error::DimensionMismatch {
            expected: 8,
            got: raw.coeffs.len(),
        })?;
        MultiAffine3Poly::new(coeffs)
    }
}

impl MultiAffine3Poly {
    pub fn new(coeffs: [Complex64; 8]) -> Result<Self> {
        check_finite(&coeffs)?;
        Ok(Self { coeffs })
    }

    pub fn from_real(coeffs: [f64; 8]) -> Self {
        Self {
            coeffs: coeffs.map(|c| Complex64::new(c, 0.0)),
        }
    }

    pub fn constant(c: Complex64) -> Self {
        let mut coeffs = [ZERO; 8];
        coeffs[0] = c;
        Self { coeffs }
    }

    /// Three-variable polynomial with the same monomial coefficients as a
    /// symmetric polynomial with `d = 3`.
    pub fn from_sym(p: &SymMultiAffinePoly) -> Result<Self> {
        if p.d() != 3 {
            return Err(Error::DimensionMismatch {
                expected: 3,
                got: p.d(),
            });
        }
        let mut coeffs = [ZERO; 8];
        for (s, c) in coeffs.iter_mut().enumerate() {
            *c = p.monomial_coeff(s.count_ones() as usize);
        }
        Ok(Self { coeffs })
    }

    pub fn eval(&self, z: [Complex64; 3]) -> Complex64 {
        let mut acc = ZERO;
        for (s, c) in self.coeffs.iter().enumerate() {
            let mut m = *c;
            for (k, zk) in z.iter().enumerate() {
                if s >> k & 1 == 1 {
                    m *= zk;
                }
            }
            acc += m;
        }
        acc
    }

    /// Reflection at multidegree (1, 1, 1).
    pub fn reflect(&self) -> Self {
        let mut coeffs = [ZERO; 8];
        for (s, c) in coeffs.iter_mut().enumerate() {
            *c = self.coeffs[7 ^ s].conj();
        }
        Self { coeffs }
    }

    /// `(a, b)` with `p = a(z_1, z_2) + b(z_1, z_2) z_3`.
    pub fn split(&self) -> (MultiAffine2Poly, MultiAffine2Poly) {
        let mut a = [ZERO; 4];
        let mut b = [ZERO; 4];
        a.copy_from_slice(&self.coeffs[..4]);
        b.copy_from_slice(&self.coeffs[4..]);
        (MultiAffine2Poly { coeffs: a }, MultiAffine2Poly { coeffs: b })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn cvec(xs: &[f64]) -> Vec<Complex64> {
        xs.iter().map(|&x| c(x)).collect()
    }

    #[test]
    fn symmetrize_examples() {
        let p = symmetrize(&UniPoly::from_real(&[1.0, -1.0]).unwrap(), 4).unwrap();
        assert_eq!(p.weights(), cvec(&[1.0, -1.0, 0.0, 0.0, 0.0]).as_slice());
        assert_eq!(p.monomial_coeff(1), c(-0.25));

        let p = symmetrize(&UniPoly::from_real(&[1.0]).unwrap(), 3).unwrap();
        assert_eq!(p.weights(), cvec(&[1.0, 0.0, 0.0, 0.0]).as_slice());

        let p = symmetrize(&UniPoly::from_real(&[1.0, -2.0, 1.0]).unwrap(), 2).unwrap();
        assert_eq!(p.weights(), cvec(&[1.0, -2.0, 1.0]).as_slice());
        // 1 - (z1 + z2) + z1 z2
        assert_eq!(p.monomial_coeff(1), c(-1.0));
        assert_eq!(p.monomial_coeff(2), c(1.0));
    }

    #[test]
    fn symmetrize_rejects_high_degree() {
        let q = UniPoly::from_real(&[1.0, 0.0, 1.0]).unwrap();
        assert!(matches!(
            symmetrize(&q, 1),
            Err(Error::DegreeExceeds { degree: 2, d: 1 })
        ));
        // Trailing zeros do not count towards the degree.
        let q = UniPoly::from_real(&[1.0, 2.0, 0.0, 0.0]).unwrap();
        assert_eq!(symmetrize(&q, 1).unwrap().d(), 1);
    }

    #[test]
    fn reflect_examples() {
        let p = SymMultiAffinePoly::from_real(&[1.0, -1.0, 0.0, 0.0]).unwrap();
        assert_eq!(reflect(&p).weights(), cvec(&[0.0, 0.0, -1.0, 1.0]).as_slice());
        let one = SymMultiAffinePoly::one(2).unwrap();
        assert_eq!(reflect(&one).weights(), cvec(&[0.0, 0.0, 1.0]).as_slice());
        let pal = SymMultiAffinePoly::from_real(&[1.0, 2.0, 1.0]).unwrap();
        assert_eq!(reflect(&pal), pal);
    }

    #[test]
    fn eval_examples() {
        let p = symmetrize(&UniPoly::from_real(&[1.0, -1.0]).unwrap(), 3).unwrap();
        assert!(p.eval(&[c(1.0); 3]).unwrap().norm() < 1e-15);
        let one = SymMultiAffinePoly::one(2).unwrap();
        assert_eq!(one.eval(&[c(0.3), Complex64::new(0.1, 2.0)]).unwrap(), c(1.0));
        let p = symmetrize(&UniPoly::from_real(&[1.0, -1.0]).unwrap(), 4).unwrap();
        let v = p.eval(&[c(1.0), c(1.0), c(1.0), c(-1.0)]).unwrap();
        assert!((v - c(0.5)).norm() < 1e-15);
        assert!(matches!(
            p.eval(&[c(1.0)]),
            Err(Error::DimensionMismatch { expected: 4, got: 1 })
        ));
    }

    #[test]
    fn json_schema() {
        let p = SymMultiAffinePoly::from_real(&[1.0, -1.0]).unwrap();
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"{"d":1,"weights":[[1.0,0.0],[-1.0,0.0]]}"#);
        assert!(serde_json::from_str::<SymMultiAffinePoly>(r#"{"d":3,"weights":[[1,0]]}"#).is_err());
        assert!(serde_json::from_str::<UniPoly>(r#"{"coeffs":[]}"#).is_err());
        assert!(serde_json::from_str::<MultiAffine3Poly>(r#"{"coeffs":[[1,0]]}"#).is_err());
    }

    #[test]
    fn split_and_reflect_three_variable() {
        let p = MultiAffine3Poly::from_real([1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
        let (a, b) = p.split();
        assert_eq!(a.coeffs, [c(1.0), c(0.0), c(0.0), c(0.0)]);
        assert_eq!(b.coeffs, [c(0.0), c(0.0), c(0.0), c(1.0)]);
        assert_eq!(p.reflect(), p);
    }

    /// Elementary symmetric polynomials by the product recurrence.
    fn elementary(z: &[Complex64]) -> Vec<Complex64> {
        let mut e = vec![c(1.0)];
        for &x in z {
            let mut next = vec![c(0.0); e.len() + 1];
            for (k, &v) in e.iter().enumerate() {
                next[k] += v;
                next[k + 1] += v * x;
            }
            e = next;
        }
        e
    }

    fn cplx() -> impl Strategy<Value = Complex64> {
        (-1.5f64..1.5, -1.5f64..1.5).prop_map(|(a, b)| Complex64::new(a, b))
    }

    proptest! {
        #[test]
        fn eval_matches_elementary_symmetric(
            w in prop::collection::vec(cplx(), 2..9),
            zs in prop::collection::vec(cplx(), 8),
        ) {
            let p = SymMultiAffinePoly::new(w.clone()).unwrap();
            let z = &zs[..p.d()];
            let e = elementary(z);
            let expect: Complex64 = (0..=p.d()).map(|k| p.monomial_coeff(k) * e[k]).sum();
            let got = p.eval(z).unwrap();
            prop_assert!((got - expect).norm() <= 1e-12 * expect.norm().max(1.0));
        }

        #[test]
        fn diagonal_consistency(w in prop::collection::vec(cplx(), 2..10), z in cplx()) {
            let p = SymMultiAffinePoly::new(w).unwrap();
            let got = p.eval(&vec![z; p.d()]).unwrap();
            let expect = p.diagonal().eval(z);
            prop_assert!((got - expect).norm() <= 1e-12 * expect.norm().max(1.0));
        }

        #[test]
        fn reflection_preserves_modulus_on_torus(
            w in prop::collection::vec(cplx(), 2..9),
            th in prop::collection::vec(0.0f64..std::f64::consts::TAU, 8),
        ) {
            let p = SymMultiAffinePoly::new(w).unwrap();
            let z: Vec<Complex64> = th[..p.d()].iter().map(|&t| Complex64::from_polar(1.0, t)).collect();
            let a = p.eval(&z).unwrap().norm();
            let b = reflect(&p).eval(&z).unwrap().norm();
            prop_assert!((a - b).abs() <= 1e-12 * a.max(1.0));
            prop_assert_eq!(reflect(&reflect(&p)), p);
        }

        #[test]
        fn symmetrize_diagonal_round_trip(w in prop::collection::vec(cplx(), 2..10), extra in 0usize..3) {
            let q = UniPoly::new(w).unwrap();
            let d = q.coeffs().len() - 1 + extra;
            let p = symmetrize(&q, d).unwrap();
            let (diag, padded) = (p.diagonal(), q.padded(d).unwrap());
            prop_assert_eq!(diag.coeffs(), padded.as_slice());
            prop_assert_eq!(&symmetrize(&p.diagonal(), d).unwrap(), &p);
        }
    }
}
