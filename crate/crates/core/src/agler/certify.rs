use serde::{Deserialize, Serialize};

use super::{build_agler_matrix, solve_b_tensor, AglerMatrix};
use crate::error::{Error, Result};
use crate::numerics::hermitian_eigenvalues;
use crate::poly::{stability_sym, StabilityReport, SymMultiAffinePoly, DEFAULT_DEGREE_CAP, DEFAULT_EPS_STAB};

/// Tolerances for [`certify`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AglerConfig {
    /// Relative PSD band, scaled by `max(1, ||B||_2)`.
    pub tol: f64,
    pub eps_stab: f64,
    pub degree_cap: usize,
}

impl Default for AglerConfig {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            eps_stab: DEFAULT_EPS_STAB,
            degree_cap: DEFAULT_DEGREE_CAP,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CertStatus {
    AglerDenominator,
    Boundary,
    NotCertified,
}

impl CertStatus {
    /// Verdict from the smallest eigenvalue against `band`.
    pub fn from_eigenvalue(min_eigenvalue: f64, band: f64) -> Self {
        if min_eigenvalue > band {
            Self::AglerDenominator
        } else if min_eigenvalue >= -band {
            Self::Boundary
        } else {
            Self::NotCertified
        }
    }

    /// Certified or on the boundary band.
    pub fn is_certified(self) -> bool {
        !matches!(self, Self::NotCertified)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertReport {
    pub status: CertStatus,
    pub min_eigenvalue: f64,
    pub spectral_norm: f64,
    pub stability: StabilityReport,
    /// Filled in once a certificate has been sampled.
    pub residual: Option<f64>,
}

/// Decides whether `p` is an Agler denominator by the PSD test on the
/// subset matrix. Unstable inputs are rejected.
pub fn certify(p: &SymMultiAffinePoly, cfg: &AglerConfig) -> Result<CertReport> {
    certify_with_matrix(p, cfg).map(|(r, _)| r)
}

/// [`certify`], also returning the assembled matrix.
pub fn certify_with_matrix(p: &SymMultiAffinePoly, cfg: &AglerConfig) -> Result<(CertReport, AglerMatrix)> {
    let stability = stability_sym(p, cfg.eps_stab)?;
    if !stability.status.is_acceptable() {
        return Err(Error::Unstable {
            margin: stability.margin,
        });
    }
    let m = build_agler_matrix(&solve_b_tensor(p)?, cfg.degree_cap)?;
    let values = hermitian_eigenvalues(&m.m)?;
    let min_eigenvalue = values[0];
    let spectral_norm = values.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    let band = cfg.tol * spectral_norm.max(1.0);
    let report = CertReport {
        status: CertStatus::from_eigenvalue(min_eigenvalue, band),
        min_eigenvalue,
        spectral_norm,
        stability,
        residual: None,
    };
    Ok((report, m))
}
