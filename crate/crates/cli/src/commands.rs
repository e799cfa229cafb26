//! Subcommand implementations shared by the binary and the test suites.
//!
//! Exit-code contract (stable for CI): 0 = pass, 1 = a computed check
//! failed (exactness, verification, cover, or search), 2 = usage, config,
//! file, or precondition errors.

use std::fmt::Display;
use std::fs;
use std::path::Path;

use netsum_core::engine::{run_protocol, Protocol};
use netsum_core::factorization::{
    cayley_symmetrize, circulant_reduce, eigen_factorization, fourier_cover_check,
    search_factorization, verify_factorization, FactorError, Factorization,
    DEFAULT_RESIDUAL_TOL,
};
use netsum_core::graph::{build_family, metrics, CayleySpec, Connectivity, Graph};
use netsum_core::protocols::{Diameter2Protocol, ScheduleProtocol, TreeProtocol};
use netsum_core::spectral::{chebyshev_polynomial, diameter_bound, offdiagonal_norm};

use crate::experiment::{
    build_protocol, spectrum_for, ExperimentConfig, ProtocolSpec, DEFAULT_EXACT_TOL,
};
use crate::family::parse_family;
use crate::format::{self, GraphFileFormat};
use crate::report::{
    self, AuditRow, FourierReportDoc, ProtocolDescriptor, RunReport, SearchRejectionDoc,
    SearchReportDoc, SpectrumReport, VerifyReportDoc,
};

/// Usage, config, file, or precondition problem: exit code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl<E: std::error::Error> From<E> for UsageError {
    fn from(e: E) -> Self {
        UsageError(e.to_string())
    }
}

/// Ok(true) = exit 0, Ok(false) = check failed, exit 1.
pub type CmdResult = Result<bool, UsageError>;

fn usage(msg: impl Into<String>) -> UsageError {
    UsageError(msg.into())
}

fn emit(out: Option<&Path>, content: &str) -> Result<(), UsageError> {
    match out {
        Some(path) => fs::write(path, content)
            .map_err(|e| usage(format!("{}: {e}", path.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

// -------------------------------------------------------------- generate

pub fn cmd_generate(tokens: &[String], json: bool, out: Option<&Path>) -> CmdResult {
    let refs: Vec<&str> = tokens.iter().map(String::as_str).collect();
    let family = parse_family(&refs).map_err(|e| usage(e.to_string()))?;
    let graph = build_family(&family).map_err(|e| usage(e.to_string()))?;
    let fmt = if json || out.is_some_and(|p| GraphFileFormat::for_path(p) == GraphFileFormat::Json)
    {
        GraphFileFormat::Json
    } else {
        GraphFileFormat::Text
    };
    emit(out, &format::render_graph(&graph, fmt))?;
    Ok(true)
}

// -------------------------------------------------------------- spectrum

pub fn cmd_spectrum(graph_path: &Path, tol: Option<f64>, out: Option<&Path>) -> CmdResult {
    let g = format::load_graph(graph_path)?;
    let m = match metrics(&g) {
        Connectivity::Connected(m) => m,
        Connectivity::Disconnected { from, to } => {
            return Err(usage(format!(
                "graph is not strongly connected (no path {from} -> {to})"
            )))
        }
    };
    let spec = spectrum_for(&g, tol).map_err(|e| usage(e.to_string()))?;
    let bound = diameter_bound(&spec).map_err(|e| usage(e.to_string()))?;
    let poly = chebyshev_polynomial(&spec, bound).map_err(|e| usage(e.to_string()))?;
    let norm = offdiagonal_norm(&poly, &spec);
    let doc = SpectrumReport::new(&spec, m.diameter, bound, norm);
    emit(out, &report::to_json_string(&doc))?;
    Ok(true)
}

// ------------------------------------------------------------------- run

pub fn cmd_run(
    config: &ExperimentConfig,
    out: Option<&Path>,
    save_schedule: Option<&Path>,
) -> CmdResult {
    let (g, family) = config.graph.realize().map_err(|e| usage(e.to_string()))?;
    let built = build_protocol(&g, family.as_ref(), &config.protocol, config.cluster_tol)
        .map_err(|e| usage(e.to_string()))?;
    if let Some(path) = save_schedule {
        let sched = built.schedule.as_ref().ok_or_else(|| {
            usage("--save-schedule needs a linear protocol (hoffman or schedule)")
        })?;
        format::save_schedule(sched, g.n(), path)?;
    }
    let x = config.input.realize(g.n()).map_err(|e| usage(e.to_string()))?;
    let result = run_protocol(&g, built.protocol.as_ref(), &x, config.trace)
        .map_err(|e| usage(e.to_string()))?;

    let descriptor = ProtocolDescriptor {
        name: built.protocol.name().to_string(),
        rounds: built.protocol.rounds(),
        theorem: built.protocol.technique().to_string(),
    };
    let mut pass = result.max_rel_error <= config.exact_tol;
    let mut doc = RunReport::new(descriptor, &result, config.exact_tol, pass);
    if let Some((certificate, certified, coeffs)) = built.approx {
        // mean-targeting protocols are judged by the certificate bound
        // ||y - mean|| <= certificate * ||x|| instead of per-vertex exactness
        let l2_error = result
            .values
            .iter()
            .map(|y| (y - result.mean) * (y - result.mean))
            .sum::<f64>()
            .sqrt();
        let x_norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let l2_bound = certificate * x_norm;
        pass = l2_error <= l2_bound * (1.0 + 1e-9) + 1e-300;
        doc.pass = pass;
        doc.certificate = Some(certificate);
        doc.certified = Some(certified);
        doc.l2_error = Some(l2_error);
        doc.l2_bound = Some(l2_bound);
        doc.sum_estimates = Some(result.values.iter().map(|y| y * g.n() as f64).collect());
        doc.polynomial = Some(report::PolynomialDoc { coeffs });
    }
    let out_path = out.or(config.out.as_deref());
    emit(out_path, &report::to_json_string(&doc))?;
    Ok(pass)
}

// ---------------------------------------------------------------- factor

pub fn cmd_factor_eigen(graph_path: &Path, tol: Option<f64>, out: Option<&Path>) -> CmdResult {
    let g = format::load_graph(graph_path)?;
    let spec = spectrum_for(&g, None).map_err(|e| usage(e.to_string()))?;
    let f = eigen_factorization(&g, &spec).map_err(|e| usage(e.to_string()))?;
    let residual_tol = tol.unwrap_or(DEFAULT_RESIDUAL_TOL);
    let pass = f.residual <= residual_tol * g.n() as f64;
    let rendered = format::render_factorization(&f, g.n());
    match out {
        Some(path) => {
            emit(Some(path), &rendered)?;
            let doc = VerifyReportDoc::new(
                g.n(),
                f.steps.len(),
                &netsum_core::factorization::VerifyReport {
                    residual: f.residual,
                    tol: residual_tol,
                    pass,
                },
            );
            print!("{}", report::to_json_string(&doc));
        }
        None => print!("{rendered}"),
    }
    Ok(pass)
}

pub fn cmd_factor_verify(
    graph_path: &Path,
    factor_path: &Path,
    tol: Option<f64>,
    out: Option<&Path>,
) -> CmdResult {
    let g = format::load_graph(graph_path)?;
    let f = format::load_factorization(factor_path)?;
    let residual_tol = tol.unwrap_or(DEFAULT_RESIDUAL_TOL);
    let verdict = verify_factorization(&g, &f.steps, residual_tol)
        .map_err(|e| usage(e.to_string()))?;
    let doc = VerifyReportDoc::new(g.n(), f.steps.len(), &verdict);
    emit(out, &report::to_json_string(&doc))?;
    Ok(verdict.pass)
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_factor_search(
    graph_path: &Path,
    target: usize,
    budget: usize,
    seed: u64,
    warm: Option<&Path>,
    save_best: Option<&Path>,
    out: Option<&Path>,
) -> CmdResult {
    let g = format::load_graph(graph_path)?;
    let warm_steps: Option<Factorization> = match warm {
        Some(path) => Some(format::load_factorization(path)?),
        None => None,
    };
    let outcome = search_factorization(
        &g,
        target,
        budget,
        seed,
        warm_steps.as_ref().map(|f| f.steps.as_slice()),
    );
    match outcome {
        Ok(outcome) => {
            let doc = SearchReportDoc::new(g.n(), target, budget, seed, &outcome);
            emit(out, &report::to_json_string(&doc))?;
            if let Some(path) = save_best {
                format::save_factorization(&outcome.best, g.n(), path)?;
            }
            Ok(outcome.converged)
        }
        Err(FactorError::TargetBelowDiameter { target, diameter }) => {
            let doc = SearchRejectionDoc {
                rejected: "target below walk lower bound",
                target,
                diameter,
            };
            emit(out, &report::to_json_string(&doc))?;
            Ok(false)
        }
        Err(e) => Err(usage(e.to_string())),
    }
}

pub fn cmd_factor_fourier(
    graph_path: &Path,
    schedule: Option<&Path>,
    tol: Option<f64>,
    out: Option<&Path>,
) -> CmdResult {
    let g = format::load_graph(graph_path)?;
    let generators = g
        .circulant_generators()
        .ok_or_else(|| usage("graph is not circulant under its labeling"))?;
    let mut support = generators;
    support.push(0);
    support.sort_unstable();
    let steps = match schedule {
        Some(path) => format::load_factorization(path)?.steps,
        None => {
            let spec = spectrum_for(&g, None).map_err(|e| usage(e.to_string()))?;
            eigen_factorization(&g, &spec)
                .map_err(|e| usage(e.to_string()))?
                .steps
        }
    };
    let vectors =
        circulant_reduce(g.n(), &support, &steps).map_err(|e| usage(e.to_string()))?;
    let residual_tol = tol.unwrap_or(DEFAULT_RESIDUAL_TOL);
    let cover = fourier_cover_check(&vectors, residual_tol).map_err(|e| usage(e.to_string()))?;
    let doc = FourierReportDoc::new(g.n(), support, &cover);
    emit(out, &report::to_json_string(&doc))?;
    Ok(cover.pass)
}

pub fn cmd_factor_symmetrize(
    graph_path: &Path,
    factor_path: &Path,
    out: Option<&Path>,
) -> CmdResult {
    let g = format::load_graph(graph_path)?;
    let f = format::load_factorization(factor_path)?;
    let report = cayley_symmetrize(&g, &f.steps).map_err(|e| usage(e.to_string()))?;
    let summary = serde_json::json!({
        "n": g.n(),
        "m": report.factorization.steps.len(),
        "residual_before": report.residual_before,
        "residual_after": report.residual_after,
    });
    println!("{}", serde_json::to_string_pretty(&summary).expect("summary"));
    emit(out, &format::render_factorization(&report.factorization, g.n()))?;
    Ok(true)
}

// ----------------------------------------------------------------- audit

const AUDIT_INPUT_SEED: u64 = 0xA0D17;

struct Candidate {
    name: &'static str,
    rounds: usize,
    exact: bool,
}

fn try_candidate(g: &Graph, p: &dyn Protocol, tol: f64) -> Option<(usize, bool)> {
    let x = netsum_core::engine::input::uniform(g.n(), AUDIT_INPUT_SEED);
    let r = run_protocol(g, p, &x, false).ok()?;
    Some((r.rounds, r.max_rel_error <= tol))
}

fn audit_row(name: String, family: &CayleySpec, tol: f64) -> Result<AuditRow, UsageError> {
    let g = build_family(family).map_err(|e| usage(e.to_string()))?;
    let m = match metrics(&g) {
        Connectivity::Connected(m) => m,
        Connectivity::Disconnected { from, to } => {
            return Err(usage(format!("{name}: disconnected ({from} -> {to})")))
        }
    };
    let spec = spectrum_for(&g, None).map_err(|e| usage(format!("{name}: {e}")))?;
    let mut candidates: Vec<Candidate> = Vec::new();

    if let Ok(p) = ScheduleProtocol::hoffman(&g, &spec) {
        if let Some((rounds, exact)) = try_candidate(&g, &p, tol) {
            candidates.push(Candidate {
                name: "hoffman",
                rounds,
                exact,
            });
        }
    }
    if matches!(family, CayleySpec::Product(_, _)) {
        let pspec = ProtocolSpec::Product {
            first: Box::new(ProtocolSpec::Hoffman),
            second: Box::new(ProtocolSpec::Hoffman),
        };
        if let Ok(built) = build_protocol(&g, Some(family), &pspec, None) {
            if let Some((rounds, exact)) = try_candidate(&g, built.protocol.as_ref(), tol) {
                candidates.push(Candidate {
                    name: "product",
                    rounds,
                    exact,
                });
            }
        }
    }
    if m.diameter <= 2 {
        if let Ok(p) = Diameter2Protocol::new(&g) {
            if let Some((rounds, exact)) = try_candidate(&g, &p, tol) {
                candidates.push(Candidate {
                    name: "diam2",
                    rounds,
                    exact,
                });
            }
        }
    }
    if let Ok(p) = TreeProtocol::new(&g, 0) {
        if let Some((rounds, exact)) = try_candidate(&g, &p, tol) {
            candidates.push(Candidate {
                name: "tree",
                rounds,
                exact,
            });
        }
    }

    let best = candidates
        .iter()
        .filter(|c| c.exact)
        .min_by_key(|c| c.rounds)
        .ok_or_else(|| usage(format!("{name}: no exact protocol applies")))?;
    Ok(AuditRow {
        graph: name,
        n: g.n(),
        degree: g.regular_degree().unwrap_or(0),
        diameter: m.diameter,
        m: spec.m(),
        best_protocol: best.name.to_string(),
        best_rounds: best.rounds,
    })
}

pub struct AuditScope {
    pub families: Vec<String>,
    pub min: usize,
    pub max: usize,
    pub product_cap: usize,
}

pub fn cmd_audit(scope: &AuditScope, tol: Option<f64>, out: Option<&Path>) -> CmdResult {
    let tol = tol.unwrap_or(DEFAULT_EXACT_TOL);
    let mut base: Vec<CayleySpec> = Vec::new();
    for family in &scope.families {
        match family.as_str() {
            "cycle" | "cycles" => {
                base.extend((scope.min.max(3)..=scope.max).map(|n| CayleySpec::Cycle { n }))
            }
            "complete" => {
                base.extend((scope.min.max(2)..=scope.max).map(|n| CayleySpec::Complete { n }))
            }
            "hypercube" | "hypercubes" => {
                let mut dim = 1;
                while (1usize << dim) <= scope.max {
                    base.push(CayleySpec::Hypercube { dim });
                    dim += 1;
                }
            }
            "petersen" => base.push(CayleySpec::Petersen),
            "product" | "products" => {} // handled below, over the base set
            other => return Err(usage(format!("unknown family `{other}` in --families"))),
        }
    }
    let mut rows = Vec::new();
    for spec in &base {
        rows.push(audit_row(spec.to_string(), spec, tol)?);
    }
    if scope.families.iter().any(|f| f.starts_with("product")) {
        for (i, a) in base.iter().enumerate() {
            for b in base.iter().skip(i) {
                let g1 = build_family(a).map_err(|e| usage(e.to_string()))?;
                let g2 = build_family(b).map_err(|e| usage(e.to_string()))?;
                if g1.n() * g2.n() > scope.product_cap {
                    continue;
                }
                let spec = CayleySpec::Product(Box::new(a.clone()), Box::new(b.clone()));
                rows.push(audit_row(spec.to_string(), &spec, tol)?);
            }
        }
    }
    emit(out, &report::render_audit_csv(&rows))?;
    Ok(true)
}
