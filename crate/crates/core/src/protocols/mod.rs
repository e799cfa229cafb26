//! The constructive global-sum protocols.
//!
//! * [`hoffman_protocol`] — the eigenvalue-step schedule: m rounds of
//!   (A - lambda_t I) over the non-principal distinct eigenvalues, then a
//!   uniform scale; exact on connected regular graphs.
//! * [`TreeProtocol`] — spanning-tree gather plus broadcast, at most 2D
//!   rounds; the baseline that works on any strongly connected graph.
//! * [`Diameter2Protocol`] — the exact 2-round protocol for diameter-2
//!   graphs built from weighted distance-2 relays.
//! * [`ProductProtocol`] — composition over Cartesian products: factor
//!   protocols run fiber-by-fiber, phase one then phase two.
//! * [`ApproxMeanProtocol`] — the certified approximate-mean iteration
//!   driven by the Chebyshev recurrence.

mod approx;
mod diameter2;
mod product;
mod schedule;
mod tree;

pub use approx::ApproxMeanProtocol;
pub use diameter2::Diameter2Protocol;
pub use product::ProductProtocol;
pub use schedule::ScheduleProtocol;
pub use tree::TreeProtocol;

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::engine::{EngineError, Protocol, Schedule, StepMatrix};
use crate::graph::Graph;
use crate::spectral::{hoffman_factors, leja_order, SpectralError, Spectrum};

#[derive(Debug, Clone, PartialEq)]
pub enum ProtocolError {
    Irregular,
    Disconnected { from: usize, to: usize },
    /// The spectrum was computed for a different graph.
    SpectrumMismatch { expected_n: usize, got_n: usize },
    /// Tree protocol: a vertex with no directed path to or from the root.
    Unreachable { vertex: usize },
    /// Diameter-2 protocol refusal, with the measured diameter.
    DiameterTooLarge { diameter: usize },
    /// Product composition: a factor protocol did not finalize to the sum.
    FactorNotExact { which: usize, max_rel_error: f64 },
    Spectral(SpectralError),
    Engine(EngineError),
}

impl fmt::Display for ProtocolError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProtocolError::Irregular => write!(f, "graph is not regular"),
            ProtocolError::Disconnected { from, to } => {
                write!(f, "graph is not strongly connected: no path {from} -> {to}")
            }
            ProtocolError::SpectrumMismatch { expected_n, got_n } => {
                write!(f, "spectrum is for n = {got_n}, graph has n = {expected_n}")
            }
            ProtocolError::Unreachable { vertex } => {
                write!(f, "vertex {vertex} not connected to the root")
            }
            ProtocolError::DiameterTooLarge { diameter } => {
                write!(f, "requires diameter <= 2, measured diameter {diameter}")
            }
            ProtocolError::FactorNotExact { which, max_rel_error } => {
                write!(f, "factor protocol {which} is not exact (max rel error {max_rel_error:e})")
            }
            ProtocolError::Spectral(e) => write!(f, "{e}"),
            ProtocolError::Engine(e) => write!(f, "{e}"),
        }
    }
}

impl From<SpectralError> for ProtocolError {
    fn from(e: SpectralError) -> Self {
        ProtocolError::Spectral(e)
    }
}

impl From<EngineError> for ProtocolError {
    fn from(e: EngineError) -> Self {
        ProtocolError::Engine(e)
    }
}

/// The eigenvalue-step schedule: one factor A - lambda_t I per non-principal
/// distinct eigenvalue (descending), plus the final scale
/// n / prod(d - lambda_t). Runs in exactly m rounds and leaves the exact
/// global sum at every vertex of a connected regular graph.
pub fn hoffman_protocol(g: &Graph, spec: &Spectrum) -> Result<Schedule, ProtocolError> {
    if spec.n != g.n() {
        return Err(ProtocolError::SpectrumMismatch {
            expected_n: g.n(),
            got_n: spec.n,
        });
    }
    let degree = g.regular_degree().ok_or(ProtocolError::Irregular)?;
    if degree != spec.degree {
        return Err(ProtocolError::SpectrumMismatch {
            expected_n: g.n(),
            got_n: spec.n,
        });
    }
    let factors = hoffman_factors(spec)?;
    // Leja execution order keeps the intermediate factor products bounded
    let steps: Vec<StepMatrix> = leja_order(&factors.lambdas)
        .iter()
        .map(|&lambda| StepMatrix::adjacency_step(g, -lambda))
        .collect();
    Ok(Schedule::with_scale(steps, factors.scale))
}

/// JSON-facing descriptor of a protocol.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolInfo {
    pub name: String,
    pub rounds: usize,
    pub technique: String,
}

pub fn describe(p: &dyn Protocol) -> ProtocolInfo {
    ProtocolInfo {
        name: String::from(p.name()),
        rounds: p.rounds(),
        technique: String::from(p.technique()),
    }
}
