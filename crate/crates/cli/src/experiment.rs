//! Experiment configuration: everything a `run` needs, fully deterministic
//! given the config (seeds included). Loadable from JSON via `--config`.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use netsum_core::engine::{input, Protocol};
use netsum_core::graph::{build_family, CayleySpec, Graph};
use netsum_core::protocols::{
    ApproxMeanProtocol, Diameter2Protocol, ProductProtocol, ProtocolError, ScheduleProtocol,
    TreeProtocol,
};
use netsum_core::spectral::{adjacency_spectrum, default_tol, SpectralError, Spectrum};

use crate::family::{parse_family_str, FamilyParseError};
use crate::format::{self, FormatError};

/// Default exactness tolerance for pass/fail judgments on exact protocols.
pub const DEFAULT_EXACT_TOL: f64 = 1e-9;

fn default_exact_tol() -> f64 {
    DEFAULT_EXACT_TOL
}

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("{0}")]
    Family(#[from] FamilyParseError),
    #[error("{0}")]
    Format(#[from] FormatError),
    #[error("{0}")]
    Graph(netsum_core::graph::GraphError),
    #[error("{0}")]
    Spectral(SpectralError),
    #[error("{0}")]
    Protocol(ProtocolError),
    #[error("{0}")]
    Config(String),
}

impl From<netsum_core::graph::GraphError> for ExperimentError {
    fn from(e: netsum_core::graph::GraphError) -> Self {
        ExperimentError::Graph(e)
    }
}

impl From<SpectralError> for ExperimentError {
    fn from(e: SpectralError) -> Self {
        ExperimentError::Spectral(e)
    }
}

impl From<ProtocolError> for ExperimentError {
    fn from(e: ProtocolError) -> Self {
        ExperimentError::Protocol(e)
    }
}

/// Where the graph comes from: a file in either format, or a family spec
/// string like `"product cycle 5 complete 2"`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GraphSource {
    File { file: PathBuf },
    Spec { spec: String },
}

impl GraphSource {
    /// Load or build the graph; a family spec also yields the parsed spec,
    /// which product protocols need for factor decomposition.
    pub fn realize(&self) -> Result<(Graph, Option<CayleySpec>), ExperimentError> {
        match self {
            GraphSource::File { file } => Ok((format::load_graph(file)?, None)),
            GraphSource::Spec { spec } => {
                let family = parse_family_str(spec)?;
                let graph = build_family(&family)?;
                Ok((graph, Some(family)))
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ProtocolSpec {
    Hoffman,
    Tree {
        #[serde(default)]
        root: usize,
    },
    Diam2,
    Product {
        first: Box<ProtocolSpec>,
        second: Box<ProtocolSpec>,
    },
    Approx {
        m: usize,
    },
    Schedule {
        file: PathBuf,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum InputSpec {
    Ones,
    Unit { index: usize },
    Uniform { seed: u64 },
    File { path: PathBuf },
}

impl InputSpec {
    pub fn realize(&self, n: usize) -> Result<Vec<f64>, ExperimentError> {
        let x = match self {
            InputSpec::Ones => input::ones(n),
            InputSpec::Unit { index } => {
                if *index >= n {
                    return Err(ExperimentError::Config(format!(
                        "unit index {index} out of range for n = {n}"
                    )));
                }
                input::unit(n, *index)
            }
            InputSpec::Uniform { seed } => input::uniform(n, *seed),
            InputSpec::File { path } => {
                let x = format::load_vector(path)?;
                if x.len() != n {
                    return Err(ExperimentError::Config(format!(
                        "input vector has {} values, graph has {n} vertices",
                        x.len()
                    )));
                }
                x
            }
        };
        Ok(x)
    }

    /// CLI shorthand: `ones`, `unit:K`, `uniform:SEED`, `file:PATH`.
    pub fn parse_cli(s: &str) -> Result<Self, ExperimentError> {
        let bad = |s: &str| {
            ExperimentError::Config(format!(
                "invalid input spec `{s}` (expected ones | unit:K | uniform:SEED | file:PATH)"
            ))
        };
        if s == "ones" {
            return Ok(InputSpec::Ones);
        }
        let (kind, arg) = s.split_once(':').ok_or_else(|| bad(s))?;
        match kind {
            "unit" => Ok(InputSpec::Unit {
                index: arg.parse().map_err(|_| bad(s))?,
            }),
            "uniform" => Ok(InputSpec::Uniform {
                seed: arg.parse().map_err(|_| bad(s))?,
            }),
            "file" => Ok(InputSpec::File {
                path: PathBuf::from(arg),
            }),
            _ => Err(bad(s)),
        }
    }
}

/// A full reproducible run description.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub graph: GraphSource,
    pub protocol: ProtocolSpec,
    pub input: InputSpec,
    /// Eigenvalue clustering tolerance; defaults to 1e-8 * max(1, d).
    #[serde(default)]
    pub cluster_tol: Option<f64>,
    /// Exactness tolerance for the pass/fail exit status.
    #[serde(default = "default_exact_tol")]
    pub exact_tol: f64,
    #[serde(default)]
    pub trace: bool,
    #[serde(default)]
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, ExperimentError> {
        let raw = std::fs::read_to_string(path).map_err(|source| {
            ExperimentError::Format(FormatError::Io {
                path: path.display().to_string(),
                source,
            })
        })?;
        serde_json::from_str(&raw).map_err(|e| ExperimentError::Format(FormatError::Json(e)))
    }
}

/// A built protocol plus the pieces reports need.
pub struct BuiltProtocol {
    pub protocol: Box<dyn Protocol>,
    /// Present for approx protocols: (certificate, certified, coefficients).
    pub approx: Option<(f64, bool, Vec<f64>)>,
    /// Present for linear protocols: the step matrices, exportable in
    /// sparse triplet form.
    pub schedule: Option<netsum_core::engine::Schedule>,
}

pub fn spectrum_for(g: &Graph, cluster_tol: Option<f64>) -> Result<Spectrum, ExperimentError> {
    let d = g.regular_degree().unwrap_or(0);
    let tol = cluster_tol.unwrap_or_else(|| default_tol(d));
    Ok(adjacency_spectrum(g, tol)?)
}

/// Construct the protocol described by `spec` for graph `g`. Product
/// protocols need `family` to know the factor decomposition.
pub fn build_protocol(
    g: &Graph,
    family: Option<&CayleySpec>,
    spec: &ProtocolSpec,
    cluster_tol: Option<f64>,
) -> Result<BuiltProtocol, ExperimentError> {
    let protocol: BuiltProtocol = match spec {
        ProtocolSpec::Hoffman => {
            let s = spectrum_for(g, cluster_tol)?;
            let sched = netsum_core::protocols::hoffman_protocol(g, &s)?;
            BuiltProtocol {
                protocol: Box::new(ScheduleProtocol::new(
                    g,
                    sched.clone(),
                    "hoffman",
                    "hoffman-eigenvalue-schedule",
                )?),
                approx: None,
                schedule: Some(sched),
            }
        }
        ProtocolSpec::Tree { root } => BuiltProtocol {
            protocol: Box::new(TreeProtocol::new(g, *root)?),
            approx: None,
            schedule: None,
        },
        ProtocolSpec::Diam2 => BuiltProtocol {
            protocol: Box::new(Diameter2Protocol::new(g)?),
            approx: None,
            schedule: None,
        },
        ProtocolSpec::Approx { m } => {
            let s = spectrum_for(g, cluster_tol)?;
            let p = ApproxMeanProtocol::new(g, &s, *m)?;
            let approx = Some((p.certificate(), p.certified(), p.polynomial().coeffs().to_vec()));
            BuiltProtocol {
                protocol: Box::new(p),
                approx,
                schedule: None,
            }
        }
        ProtocolSpec::Product { first, second } => {
            let (fam1, fam2) = match family {
                Some(CayleySpec::Product(a, b)) => (a.as_ref(), b.as_ref()),
                _ => {
                    return Err(ExperimentError::Config(
                        "product protocol needs the graph given as a `product ...` family spec"
                            .into(),
                    ))
                }
            };
            let g1 = build_family(fam1)?;
            let g2 = build_family(fam2)?;
            let p1 = build_protocol(&g1, Some(fam1), first, cluster_tol)?;
            let p2 = build_protocol(&g2, Some(fam2), second, cluster_tol)?;
            BuiltProtocol {
                protocol: Box::new(ProductProtocol::new(g1, p1.protocol, g2, p2.protocol)?),
                approx: None,
                schedule: None,
            }
        }
        ProtocolSpec::Schedule { file } => {
            let sched = format::load_schedule(file)?;
            BuiltProtocol {
                protocol: Box::new(ScheduleProtocol::new(
                    g,
                    sched.clone(),
                    "schedule-file",
                    "explicit-linear-schedule",
                )?),
                approx: None,
                schedule: Some(sched),
            }
        }
    };
    Ok(protocol)
}
