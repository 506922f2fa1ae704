use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{torus_min_deg1, MultiAffine3Poly, SymMultiAffinePoly, TrigDeg1, TrigPoly11, UniPoly};
use crate::error::{Error, Result};
use crate::numerics::poly_roots;

/// Default half-width of the boundary band.
pub const DEFAULT_EPS_STAB: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum StabilityStatus {
    StrictlyStable,
    BoundaryStable,
    Unstable,
}

impl StabilityStatus {
    pub fn from_margin(margin: f64, eps: f64) -> Self {
        if margin > eps {
            Self::StrictlyStable
        } else if margin >= -eps {
            Self::BoundaryStable
        } else {
            Self::Unstable
        }
    }

    /// Stable or on the boundary band.
    pub fn is_acceptable(self) -> bool {
        !matches!(self, Self::Unstable)
    }
}

/// Outcome of a stability test. The margin is positive inside the stable
/// region; the witness is the point (or root) attaining it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub status: StabilityStatus,
    #[serde(with = "crate::json::inf_as_null")]
    pub margin: f64,
    pub witness: Vec<Complex64>,
}

/// Margin `min |root| - 1`.
pub fn stability_univariate(q: &UniPoly, eps: f64) -> Result<StabilityReport> {
    if q.degree() == 0 {
        let c = q.coeffs()[0];
        return Ok(if c.norm() == 0.0 {
            StabilityReport {
                status: StabilityStatus::Unstable,
                margin: f64::NEG_INFINITY,
                witness: vec![Complex64::new(0.0, 0.0)],
            }
        } else {
            StabilityReport {
                status: StabilityStatus::StrictlyStable,
                margin: f64::INFINITY,
                witness: vec![],
            }
        });
    }
    let roots = poly_roots(q.coeffs())?;
    let root = roots
        .iter()
        .copied()
        .min_by(|a, b| a.norm().total_cmp(&b.norm()))
        .expect("degree >= 1");
    let margin = root.norm() - 1.0;
    Ok(StabilityReport {
        status: StabilityStatus::from_margin(margin, eps),
        margin,
        witness: vec![root],
    })
}

/// A symmetric multi-affine polynomial is stable exactly when its diagonal
/// restriction is.
pub fn stability_sym(p: &SymMultiAffinePoly, eps: f64) -> Result<StabilityReport> {
    stability_univariate(&p.diagonal(), eps)
}

/// Supremum of `r` with `p(r z)` stable: the smallest root modulus of the
/// diagonal restriction.
pub fn stability_radius(p: &SymMultiAffinePoly) -> Result<f64> {
    if p.weights()[0].norm() == 0.0 {
        return Err(Error::VanishesAtOrigin);
    }
    let q = p.diagonal();
    if q.degree() == 0 {
        return Ok(f64::INFINITY);
    }
    Ok(poly_roots(q.coeffs())?
        .iter()
        .map(|z| z.norm())
        .fold(f64::INFINITY, f64::min))
}

/// Layered stability test for `p = a(z_1, z_2) + b(z_1, z_2) z_3` with
/// `a = c(z_1) + e(z_1) z_2`:
///
/// 1. `|c_0|^2 - |c_1|^2 > 0`,
/// 2. `|c|^2 - |e|^2 > 0` on the circle,
/// 3. `|a|^2 - |b|^2 > 0` on the torus.
///
/// Each layer is a maximum-principle step; the margin is the smallest of
/// the three layer minima.
pub fn stability_3var(p: &MultiAffine3Poly, eps: f64) -> StabilityReport {
    let k = &p.coeffs;
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);

    let m1 = k[0].norm_sqr() - k[1].norm_sqr();
    let w1 = if k[1].norm() == 0.0 {
        one
    } else {
        -(k[0] / k[1]) / (k[0] / k[1]).norm()
    };

    let layer2 = TrigDeg1 {
        u0: k[0].norm_sqr() + k[1].norm_sqr() - k[2].norm_sqr() - k[3].norm_sqr(),
        u1: k[1] * k[0].conj() - k[3] * k[2].conj(),
    };
    let m2 = torus_min_deg1(&layer2);
    let w2 = layer2.argmin();

    let (a, b) = p.split();
    let (m3, z1, z2) = TrigPoly11::from_ab(&a, &b).min_on_torus();

    let mut margin = m1;
    let mut witness = vec![w1, zero, zero];
    if m2 < margin {
        margin = m2;
        witness = vec![w2, one, zero];
    }
    if m3 < margin {
        margin = m3;
        witness = vec![z1, z2, one];
    }
    StabilityReport {
        status: StabilityStatus::from_margin(margin, eps),
        margin,
        witness,
    }
}
