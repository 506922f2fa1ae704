//! Command implementations behind the `agler` binary.
//!
//! Every command reads JSON, writes JSON (to `--out` or stdout) and echoes
//! its [`RunConfig`]. Exit codes: 0 certified or passed, 1 not certified or
//! failed, 2 error. Errors are reported as JSON on stdout as well as a line
//! on stderr.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::agler::{
    agler_radius, certify_with_matrix, degree4_closed_form, extract_certificate, verify_certificate, AglerConfig,
    CertReport, CertStatus, RadiusOptions, SosCertificate,
};
use crate::error::{Error, Result};
use crate::json::{read_json, to_pretty, write_json};
use crate::kummert::{kummert_certificate, verify_kummert, KummertCertificate, KummertOptions};
use crate::poly::sample::DEFAULT_SEED;
use crate::poly::{symmetrize, MultiAffine3Poly, SymMultiAffinePoly, UniPoly, DEFAULT_DEGREE_CAP, MAX_DEGREE_CAP};

/// Largest degree reproduced by `paper-examples` without `--beyond-table`.
pub const TABLE_DMAX: usize = 11;
/// Default residual threshold for Agler certificates.
pub const AGLER_RESIDUAL_TOL: f64 = 1e-8;
/// Default residual threshold for three-variable decompositions.
pub const KUMMERT_RESIDUAL_TOL: f64 = 1e-6;
pub const DEFAULT_SAMPLES: usize = 200;

#[derive(Parser, Debug)]
#[command(
    name = "agler",
    version,
    about = "Agler denominator certification for stable polynomials"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Primary tolerance of the command (PSD band, comparison slack or residual threshold).
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Sample points for certificate verification.
    #[arg(long, global = true, default_value_t = DEFAULT_SAMPLES)]
    samples: usize,
    /// Seed of the sampling generator.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Degree cap for the subset matrix; largest degree for `paper-examples`.
    #[arg(long, global = true)]
    dmax: Option<usize>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Symmetrize a univariate polynomial into `d` variables.
    Symmetrize {
        input: PathBuf,
        #[arg(short, long)]
        d: usize,
    },
    /// Decide the Agler property of a symmetric multi-affine polynomial.
    Check {
        input: PathBuf,
        /// Also write the sum-of-squares certificate here.
        #[arg(long)]
        certificate: Option<PathBuf>,
    },
    /// Emit the sum-of-squares certificate of a symmetric multi-affine polynomial.
    Certificate { input: PathBuf },
    /// Check a certificate against its polynomial (symmetric or three-variable).
    Verify { polynomial: PathBuf, certificate: PathBuf },
    /// Scan and bisect the Agler radius.
    Radius {
        input: PathBuf,
        #[arg(long, default_value_t = 0.0)]
        r_lo: f64,
        #[arg(long)]
        r_hi: Option<f64>,
        #[arg(long, default_value_t = 21)]
        steps: usize,
    },
    /// Closed-form four-variable test.
    Degree4 { input: PathBuf },
    /// Three-variable decomposition.
    Kummert {
        input: PathBuf,
        /// Also write the decomposition here.
        #[arg(long)]
        certificate: Option<PathBuf>,
    },
    /// Certify the symmetrizations of `1 - z` for d = 3..dmax.
    #[command(name = "paper-examples")]
    ReferenceTable {
        /// Allow degrees above the reproduced table (up to the degree cap).
        #[arg(long)]
        beyond_table: bool,
    },
}

/// Parameters of a run, echoed in every output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: String,
    pub input: Vec<PathBuf>,
    pub output: Option<PathBuf>,
    pub tol: f64,
    pub samples: usize,
    pub seed: u64,
    pub degree_cap: usize,
}

#[derive(Serialize)]
struct Envelope<T: Serialize> {
    config: RunConfig,
    #[serde(flatten)]
    result: T,
}

#[derive(Serialize)]
struct ErrorReport {
    kind: &'static str,
    message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    margin: Option<f64>,
}

#[derive(Serialize)]
struct CheckOutput {
    #[serde(flatten)]
    report: CertReport,
    rank: Option<usize>,
    certificate: Option<PathBuf>,
}

#[derive(Serialize)]
struct VerifyOutput {
    kind: &'static str,
    residual: f64,
    pass: bool,
}

#[derive(Serialize)]
struct KummertOutput {
    #[serde(flatten)]
    report: Value,
    residual: f64,
    pass: bool,
    certificate_file: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub d: usize,
    pub status: CertStatus,
    pub min_eigenvalue: f64,
    pub spectral_norm: f64,
    pub runtime_seconds: f64,
}

#[derive(Serialize)]
struct TableOutput {
    rows: Vec<TableRow>,
    all_certified: bool,
}

/// Outcome of a command before it is written.
struct Outcome {
    json: String,
    code: i32,
}

fn outcome<T: Serialize>(config: &RunConfig, result: T, code: i32) -> Result<Outcome> {
    Ok(Outcome {
        json: to_pretty(&Envelope {
            config: config.clone(),
            result,
        })?,
        code,
    })
}

fn status_code(status: CertStatus) -> i32 {
    if status.is_certified() {
        0
    } else {
        1
    }
}

fn agler_config(common: &Common) -> AglerConfig {
    let mut cfg = AglerConfig::default();
    if let Some(t) = common.tol {
        cfg.tol = t;
    }
    if let Some(d) = common.dmax {
        cfg.degree_cap = d;
    }
    cfg
}

fn run_config(name: &str, input: &[&Path], common: &Common, tol: f64, degree_cap: usize) -> RunConfig {
    RunConfig {
        command: name.to_string(),
        input: input.iter().map(|p| p.to_path_buf()).collect(),
        output: common.out.clone(),
        tol,
        samples: common.samples,
        seed: common.seed,
        degree_cap,
    }
}

/// Certify, then extract and sample a certificate when certified.
fn check(p: &SymMultiAffinePoly, cfg: &AglerConfig, common: &Common) -> Result<(CertReport, Option<SosCertificate>)> {
    let (mut report, m) = certify_with_matrix(p, cfg)?;
    if !report.status.is_certified() {
        return Ok((report, None));
    }
    let cert = extract_certificate(&m, cfg.tol)?;
    report.residual = Some(verify_certificate(p, &cert, common.samples, common.seed)?);
    Ok((report, Some(cert)))
}

fn execute(command: &Command, common: &Common, config: &mut RunConfig) -> Result<Outcome> {
    let cfg = agler_config(common);
    match command {
        Command::Symmetrize { input, d } => {
            *config = run_config("symmetrize", &[input], common, cfg.tol, cfg.degree_cap);
            let q: UniPoly = read_json(input)?;
            Ok(Outcome {
                json: to_pretty(&symmetrize(&q, *d)?)?,
                code: 0,
            })
        }
        Command::Check { input, certificate } => {
            *config = run_config("check", &[input], common, cfg.tol, cfg.degree_cap);
            let p: SymMultiAffinePoly = read_json(input)?;
            let (report, cert) = check(&p, &cfg, common)?;
            if let (Some(path), Some(cert)) = (certificate, &cert) {
                write_json(path, cert)?;
            }
            let code = status_code(report.status);
            let out = CheckOutput {
                rank: cert.as_ref().map(|c| c.rank),
                certificate: certificate.clone().filter(|_| cert.is_some()),
                report,
            };
            outcome(config, out, code)
        }
        Command::Certificate { input } => {
            *config = run_config("certificate", &[input], common, cfg.tol, cfg.degree_cap);
            let p: SymMultiAffinePoly = read_json(input)?;
            let (report, m) = certify_with_matrix(&p, &cfg)?;
            if !report.status.is_certified() {
                return outcome(config, report, 1);
            }
            Ok(Outcome {
                json: to_pretty(&extract_certificate(&m, cfg.tol)?)?,
                code: 0,
            })
        }
        Command::Verify {
            polynomial,
            certificate,
        } => {
            let raw: Value = read_json(certificate)?;
            let three = raw.get("E").is_some();
            let tol = common.tol.unwrap_or(if three {
                KUMMERT_RESIDUAL_TOL
            } else {
                AGLER_RESIDUAL_TOL
            });
            *config = run_config("verify", &[polynomial, certificate], common, tol, cfg.degree_cap);
            let (kind, residual) = if three {
                let p: MultiAffine3Poly = read_json(polynomial)?;
                let cert: KummertCertificate = serde_json::from_value(raw)?;
                ("kummert", verify_kummert(&p, &cert, common.samples, common.seed)?)
            } else {
                let p: SymMultiAffinePoly = read_json(polynomial)?;
                let cert: SosCertificate = serde_json::from_value(raw)?;
                ("agler", verify_certificate(&p, &cert, common.samples, common.seed)?)
            };
            let pass = residual <= tol;
            outcome(config, VerifyOutput { kind, residual, pass }, if pass { 0 } else { 1 })
        }
        Command::Radius {
            input,
            r_lo,
            r_hi,
            steps,
        } => {
            *config = run_config("radius", &[input], common, cfg.tol, cfg.degree_cap);
            let p: SymMultiAffinePoly = read_json(input)?;
            let opts = RadiusOptions {
                r_lo: *r_lo,
                r_hi: *r_hi,
                steps: *steps,
                cert: cfg,
                ..RadiusOptions::default()
            };
            let report = agler_radius(&p, &opts)?;
            let code = if report.radius > 0.0 { 0 } else { 1 };
            outcome(config, report, code)
        }
        Command::Degree4 { input } => {
            let tol = common.tol.unwrap_or(1e-10);
            *config = run_config("degree4", &[input], common, tol, cfg.degree_cap);
            let p: SymMultiAffinePoly = read_json(input)?;
            let check = degree4_closed_form(&p, tol)?;
            outcome(config, check, if check.pass { 0 } else { 1 })
        }
        Command::Kummert { input, certificate } => {
            let tol = common.tol.unwrap_or(KUMMERT_RESIDUAL_TOL);
            *config = run_config("kummert", &[input], common, tol, cfg.degree_cap);
            let p: MultiAffine3Poly = read_json(input)?;
            let opts = KummertOptions {
                seed: common.seed,
                ..KummertOptions::default()
            };
            let report = kummert_certificate(&p, &opts)?;
            let residual = verify_kummert(&p, &report.certificate, common.samples, common.seed)?;
            if let Some(path) = certificate {
                write_json(path, &report.certificate)?;
            }
            let pass = residual <= tol;
            let out = KummertOutput {
                report: serde_json::to_value(&report)?,
                residual,
                pass,
                certificate_file: certificate.clone(),
            };
            outcome(config, out, if pass { 0 } else { 1 })
        }
        Command::ReferenceTable { beyond_table } => {
            let dmax = common.dmax.unwrap_or(TABLE_DMAX);
            let limit = if *beyond_table { MAX_DEGREE_CAP } else { TABLE_DMAX };
            let cap = dmax.max(DEFAULT_DEGREE_CAP);
            *config = run_config("paper-examples", &[], common, cfg.tol, cap);
            if dmax > limit {
                return Err(Error::DegreeCap { d: dmax, cap: limit });
            }
            let cfg = AglerConfig { degree_cap: cap, ..cfg };
            let rows = reference_table(dmax, &cfg)?;
            let all_certified = rows.iter().all(|r| r.status.is_certified());
            outcome(
                config,
                TableOutput { rows, all_certified },
                if all_certified { 0 } else { 1 },
            )
        }
    }
}

/// Certifies the symmetrization of `1 - z` for each `d` in `3..=dmax`.
pub fn reference_table(dmax: usize, cfg: &AglerConfig) -> Result<Vec<TableRow>> {
    let q = UniPoly::from_real(&[1.0, -1.0])?;
    (3..=dmax)
        .map(|d| {
            let start = Instant::now();
            let (report, _) = certify_with_matrix(&symmetrize(&q, d)?, cfg)?;
            Ok(TableRow {
                d,
                status: report.status,
                min_eigenvalue: report.min_eigenvalue,
                spectral_norm: report.spectral_norm,
                runtime_seconds: start.elapsed().as_secs_f64(),
            })
        })
        .collect()
}

fn emit(json: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => {
            let mut text = json.to_string();
            text.push('\n');
            std::fs::write(path, text)?;
        }
        None => println!("{json}"),
    }
    Ok(())
}

/// Runs the CLI on explicit arguments (the first is the program name).
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let mut config = run_config("", &[], &cli.common, f64::NAN, DEFAULT_DEGREE_CAP);
    let result = execute(&cli.command, &cli.common, &mut config);
    let (json, code) = match result {
        Ok(o) => (o.json, o.code),
        Err(e) => {
            eprintln!("error: {e}");
            let report = ErrorReport {
                kind: e.kind(),
                message: e.to_string(),
                margin: e.margin(),
            };
            match to_pretty(&Envelope {
                config: config.clone(),
                result: serde_json::json!({ "error": report }),
            }) {
                Ok(json) => (json, 2),
                Err(_) => return 2,
            }
        }
    };
    match emit(&json, cli.common.out.as_deref()) {
        Ok(()) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

pub fn main() -> i32 {
    run(std::env::args_os())
}
