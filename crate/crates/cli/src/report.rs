//! Machine-readable reports: JSON for single runs, CSV for audit tables.
//! Reports embed every tolerance used and contain no timestamps, so
//! identical configs produce byte-identical reports.

use serde::Serialize;

use netsum_core::engine::{ProtocolResult, Target};
use netsum_core::factorization::{FourierCoverReport, SearchOutcome, VerifyReport};
use netsum_core::spectral::{Polynomial, Spectrum};

#[derive(Debug, Serialize)]
pub struct SpectrumReport {
    pub n: usize,
    pub degree: usize,
    /// Distinct eigenvalues with multiplicities, descending.
    pub entries: Vec<(f64, usize)>,
    pub m: usize,
    pub tol: f64,
    pub diameter: usize,
    /// m - diameter: zero on the sum-optimal test families.
    pub gap: i64,
    /// Smallest polynomial degree certifying diameter <= bound.
    pub chebyshev_bound: usize,
    /// Off-principal norm achieved at that degree (must be < 1/(n-1)).
    pub chebyshev_norm: f64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub suspicious_gaps: Vec<f64>,
}

impl SpectrumReport {
    pub fn new(spec: &Spectrum, diameter: usize, bound: usize, norm: f64) -> Self {
        SpectrumReport {
            n: spec.n,
            degree: spec.degree,
            entries: spec
                .entries
                .iter()
                .map(|e| (e.value, e.multiplicity))
                .collect(),
            m: spec.m(),
            tol: spec.tol,
            diameter,
            gap: spec.m() as i64 - diameter as i64,
            chebyshev_bound: bound,
            chebyshev_norm: norm,
            suspicious_gaps: spec.suspicious_gaps.clone(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct PolynomialDoc {
    pub coeffs: Vec<f64>,
}

impl From<&Polynomial> for PolynomialDoc {
    fn from(p: &Polynomial) -> Self {
        PolynomialDoc {
            coeffs: p.coeffs().to_vec(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ProtocolDescriptor {
    pub name: String,
    pub rounds: usize,
    pub theorem: String,
}

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub protocol: ProtocolDescriptor,
    pub n: usize,
    pub rounds: usize,
    pub values: Vec<f64>,
    pub sum: f64,
    pub mean: f64,
    pub target: &'static str,
    pub max_abs_error: f64,
    pub max_rel_error: f64,
    /// Tolerance the pass/fail exit status was judged at.
    pub exact_tol: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certified: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l2_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l2_bound: Option<f64>,
    /// n * y for mean-targeting protocols: the implied sum estimates.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sum_estimates: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub polynomial: Option<PolynomialDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<Vec<Vec<f64>>>>,
}

pub fn target_str(target: Target) -> &'static str {
    match target {
        Target::Sum => "sum",
        Target::Mean => "mean",
    }
}

impl RunReport {
    pub fn new(
        descriptor: ProtocolDescriptor,
        result: &ProtocolResult,
        exact_tol: f64,
        pass: bool,
    ) -> Self {
        RunReport {
            protocol: descriptor,
            n: result.values.len(),
            rounds: result.rounds,
            values: result.values.clone(),
            sum: result.sum,
            mean: result.mean,
            target: target_str(result.target),
            max_abs_error: result.max_abs_error,
            max_rel_error: result.max_rel_error,
            exact_tol,
            pass,
            certificate: None,
            certified: None,
            l2_error: None,
            l2_bound: None,
            sum_estimates: None,
            polynomial: None,
            trace: result.trace.clone(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct VerifyReportDoc {
    pub n: usize,
    pub m: usize,
    pub residual: f64,
    pub tol: f64,
    pub pass: bool,
}

impl VerifyReportDoc {
    pub fn new(n: usize, m: usize, report: &VerifyReport) -> Self {
        VerifyReportDoc {
            n,
            m,
            residual: report.residual,
            tol: report.tol,
            pass: report.pass,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct FourierRowDoc {
    pub j: usize,
    pub best_step: usize,
    pub min_abs: f64,
    pub covered: bool,
}

#[derive(Debug, Serialize)]
pub struct FourierReportDoc {
    pub n: usize,
    pub support: Vec<usize>,
    pub tol: f64,
    pub dc_product: f64,
    pub pass: bool,
    pub rows: Vec<FourierRowDoc>,
}

impl FourierReportDoc {
    pub fn new(n: usize, support: Vec<usize>, report: &FourierCoverReport) -> Self {
        FourierReportDoc {
            n,
            support,
            tol: report.tol,
            dc_product: report.dc_product,
            pass: report.pass,
            rows: report
                .rows
                .iter()
                .map(|r| FourierRowDoc {
                    j: r.index,
                    best_step: r.best_step,
                    min_abs: r.min_abs,
                    covered: r.covered,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct SearchReportDoc {
    /// The search is best-effort instrumentation: it never claims
    /// nonexistence, only "no solution found within budget".
    pub mode: &'static str,
    pub n: usize,
    pub target: usize,
    pub budget: usize,
    pub seed: u64,
    pub restarts: usize,
    pub converged: bool,
    pub best_residual: f64,
    /// Residual threshold that counts as converged.
    pub pass_tol: f64,
    /// Residual trajectory per restart.
    pub history: Vec<Vec<f64>>,
}

impl SearchReportDoc {
    pub fn new(n: usize, target: usize, budget: usize, seed: u64, outcome: &SearchOutcome) -> Self {
        SearchReportDoc {
            mode: "experimental-best-effort",
            n,
            target,
            budget,
            seed,
            restarts: outcome.restarts,
            converged: outcome.converged,
            best_residual: outcome.best.residual,
            pass_tol: netsum_core::factorization::DEFAULT_RESIDUAL_TOL * n as f64,
            history: outcome.history.clone(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct SearchRejectionDoc {
    pub rejected: &'static str,
    pub target: usize,
    pub diameter: usize,
}

/// One audit table row.
#[derive(Debug, Clone)]
pub struct AuditRow {
    pub graph: String,
    pub n: usize,
    pub degree: usize,
    pub diameter: usize,
    pub m: usize,
    pub best_protocol: String,
    pub best_rounds: usize,
}

pub const AUDIT_HEADER: &str = "graph,n,d,D,m,best_protocol,best_rounds,gap";

pub fn render_audit_csv(rows: &[AuditRow]) -> String {
    let mut out = String::from(AUDIT_HEADER);
    out.push('\n');
    for r in rows {
        let gap = r.best_rounds as i64 - r.diameter as i64;
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.graph, r.n, r.degree, r.diameter, r.m, r.best_protocol, r.best_rounds, gap
        ));
    }
    out
}

/// Pretty JSON with a trailing newline; serde_json's output is
/// deterministic for our struct-ordered reports.
pub fn to_json_string<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}
