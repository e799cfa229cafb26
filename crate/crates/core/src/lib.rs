//! Round-based global-sum ("allreduce") protocols on regular symmetric networks.
//!
//! The model: a directed graph of processors, each starting with one real
//! value. Per time step every directed edge may carry exactly one scalar.
//! The task is for every vertex to acquire the global sum. This crate
//! provides:
//!
//! * graph families and structural metrics ([`graph`]),
//! * adjacency spectra, Hoffman factor schedules, and Chebyshev polynomial
//!   machinery for diameter bounds and approximate means ([`spectral`]),
//! * a deterministic round engine that enforces the one-scalar-per-edge
//!   bandwidth constraint structurally ([`engine`]),
//! * the constructive protocols: eigenvalue-step schedules, tree
//!   gather/broadcast, the exact diameter-2 protocol, product composition,
//!   and the certified approximate-mean iteration ([`protocols`]),
//! * step-matrix factorizations of the all-ones matrix J: verification,
//!   eigenvalue-derived exact factorizations, the circulant/Fourier
//!   reduction, and a best-effort numerical search ([`factorization`]).
//!
//! The crate is `no_std` (with `alloc`); IO, file formats, and the CLI live
//! in the companion `netsum-cli` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod engine;
pub mod factorization;
pub mod graph;
pub mod protocols;
pub mod spectral;

pub use engine::{
    run_linear_schedule, run_protocol, validate_step, EngineError, Protocol, ProtocolResult,
    Schedule, StepMatrix, Target,
};
pub use factorization::{
    cayley_symmetrize, circulant_reduce, eigen_factorization, fourier_cover_check,
    reachability_lower_bound, search_factorization, verify_factorization, CirculantVector,
    FactorError, Factorization, FourierCoverReport, SearchOutcome, VerifyReport,
};
pub use graph::{
    build_family, cartesian_product, distance2_table, metrics, CayleySpec, Connectivity,
    Distance2Table, Graph, GraphError, GraphMetrics,
};
pub use protocols::{
    hoffman_protocol, ApproxMeanProtocol, Diameter2Protocol, ProductProtocol, ProtocolError,
    ScheduleProtocol, TreeProtocol,
};
pub use spectral::{
    adjacency_spectrum, chebyshev_polynomial, circulant_spectrum, diameter_bound,
    hoffman_factors, offdiagonal_norm, CirculantSpectrum, HoffmanFactors, Polynomial,
    SpectralError, Spectrum, SpectrumEntry,
};
