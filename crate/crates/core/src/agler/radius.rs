use serde::{Deserialize, Serialize};

use super::{certify, AglerConfig, CertStatus};
use crate::error::{Error, Result};
use crate::poly::{stability_radius, SymMultiAffinePoly};

const MAX_BISECTIONS: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadiusOptions {
    pub r_lo: f64,
    /// Upper end of the scan; `None` means the stability radius, or 1 when
    /// the diagonal restriction is constant.
    pub r_hi: Option<f64>,
    pub steps: usize,
    /// Final width of the bisection bracket.
    pub width_tol: f64,
    pub cert: AglerConfig,
}

impl Default for RadiusOptions {
    fn default() -> Self {
        Self {
            r_lo: 0.0,
            r_hi: None,
            steps: 21,
            width_tol: 1e-7,
            cert: AglerConfig::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub r: f64,
    pub status: CertStatus,
    pub min_eigenvalue: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadiusReport {
    /// Largest scale known to pass, after refinement.
    pub radius: f64,
    /// Smallest scale known to fail, if any.
    pub fail_above: Option<f64>,
    #[serde(with = "crate::json::inf_as_null")]
    pub stability_radius: f64,
    pub scan: Vec<ScanPoint>,
    /// Whether the scan passes on a prefix and fails on the rest.
    pub monotone: bool,
    pub bisections: usize,
}

fn probe(p: &SymMultiAffinePoly, r: f64, cfg: &AglerConfig) -> Result<ScanPoint> {
    let rep = certify(&p.scaled(r), cfg)?;
    Ok(ScanPoint {
        r,
        status: rep.status,
        min_eigenvalue: rep.min_eigenvalue,
    })
}

/// Scans `certify(p(r z))` over `[r_lo, r_hi]` and bisects the outermost
/// pass-to-fail transition. Scale 0 always passes when `p(0) != 0`.
pub fn agler_radius(p: &SymMultiAffinePoly, opts: &RadiusOptions) -> Result<RadiusReport> {
    let sr = stability_radius(p)?;
    let r_hi = opts.r_hi.unwrap_or(if sr.is_finite() { sr } else { 1.0 });
    if !(opts.r_lo >= 0.0 && opts.r_lo <= r_hi) {
        return Err(Error::InvalidInput(format!("bad scan range [{}, {r_hi}]", opts.r_lo)));
    }
    if r_hi > sr * (1.0 + 1e-12) {
        return Err(Error::InvalidInput(format!(
            "scan end {r_hi} exceeds the stability radius {sr}"
        )));
    }
    if opts.steps == 0 || !(opts.width_tol > 0.0) {
        return Err(Error::InvalidInput("steps and width_tol must be positive".into()));
    }

    let rs: Vec<f64> = if opts.steps == 1 {
        vec![r_hi]
    } else {
        let h = (r_hi - opts.r_lo) / (opts.steps - 1) as f64;
        (0..opts.steps)
            .map(|i| {
                if i + 1 == opts.steps {
                    r_hi
                } else {
                    opts.r_lo + h * i as f64
                }
            })
            .collect()
    };
    let scan = rs
        .iter()
        .map(|&r| probe(p, r, &opts.cert))
        .collect::<Result<Vec<_>>>()?;

    let passes: Vec<bool> = scan.iter().map(|s| s.status.is_certified()).collect();
    let monotone = passes.windows(2).all(|w| w[0] || !w[1]);

    let mut report = RadiusReport {
        radius: r_hi,
        fail_above: None,
        stability_radius: sr,
        scan,
        monotone,
        bisections: 0,
    };
    if *passes.last().expect("non-empty scan") {
        return Ok(report);
    }
    // Bracket around the last pass; the implicit pass at 0 covers an all-fail scan.
    let last_pass = passes.iter().rposition(|&ok| ok);
    let (mut lo, mut hi) = match last_pass {
        Some(i) => (rs[i], rs[i + 1]),
        None => (0.0, rs[0]),
    };
    while report.bisections < MAX_BISECTIONS && (hi - lo > opts.width_tol || lo == 0.0) {
        let mid = 0.5 * (lo + hi);
        if probe(p, mid, &opts.cert)?.status.is_certified() {
            lo = mid;
        } else {
            hi = mid;
        }
        report.bisections += 1;
    }
    report.radius = lo;
    report.fail_above = Some(hi);
    Ok(report)
}
