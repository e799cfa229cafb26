//! The round engine: step matrices on the adjacency-plus-diagonal support,
//! linear schedules, and the emit/absorb protocol contract.
//!
//! The bandwidth constraint — one scalar per directed edge per time step —
//! is enforced structurally: the engine's message buffer has exactly one
//! slot per edge per round, a second emission on a busy edge aborts the run,
//! and a message on a non-edge aborts the run. Vertices keep unbounded local
//! state between rounds.
//!
//! A round is a two-phase barrier: all emissions are computed from pre-round
//! states, then all absorptions run. Received scalars are delivered sorted
//! by sender index, so floating-point reductions are deterministic.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use nalgebra::DMatrix;
use rand_core::{RngCore, SeedableRng};

use crate::graph::Graph;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportViolation {
    pub from: usize,
    pub to: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum EngineError {
    DimensionMismatch { expected: usize, got: usize },
    /// Nonzero weights off the adjacency-plus-diagonal support.
    SupportViolations(Vec<SupportViolation>),
    /// A protocol addressed a message along a non-edge.
    NonEdge { round: usize, from: usize, to: usize },
    /// A protocol tried to push a second scalar over one edge in one round.
    EdgeBusy { round: usize, from: usize, to: usize },
    NonFinite { round: usize },
}

impl fmt::Display for EngineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EngineError::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            EngineError::SupportViolations(vs) => {
                write!(f, "{} weight(s) off the adjacency+diagonal support", vs.len())?;
                if let Some(v) = vs.first() {
                    write!(f, ", first at edge ({}, {})", v.from, v.to)?;
                }
                Ok(())
            }
            EngineError::NonEdge { round, from, to } => {
                write!(f, "round {round}: message on non-edge ({from}, {to})")
            }
            EngineError::EdgeBusy { round, from, to } => {
                write!(f, "round {round}: edge ({from}, {to}) already carried a scalar")
            }
            EngineError::NonFinite { round } => {
                write!(f, "round {round}: non-finite value (overflow)")
            }
        }
    }
}

/// Per-round mixing operator: a diagonal weight per vertex plus one weight
/// per directed edge `(from, to)`. The matrix entry is `W[to][from]`, so a
/// round is `state' = W * state` in the receiver-row convention.
#[derive(Debug, Clone, PartialEq)]
pub struct StepMatrix {
    n: usize,
    diagonal: Vec<f64>,
    edge_weights: BTreeMap<(usize, usize), f64>,
}

impl StepMatrix {
    pub fn zeros(n: usize) -> Self {
        StepMatrix {
            n,
            diagonal: vec![0.0; n],
            edge_weights: BTreeMap::new(),
        }
    }

    /// A + c I on the support of `g`: weight 1 on every edge, c on the
    /// diagonal. The eigenvalue steps of the Hoffman schedule are
    /// `adjacency_step(g, -lambda)`.
    pub fn adjacency_step(g: &Graph, c: f64) -> Self {
        StepMatrix {
            n: g.n(),
            diagonal: vec![c; g.n()],
            edge_weights: g.edges().map(|e| (e, 1.0)).collect(),
        }
    }

    /// Assemble from explicit parts; edge keys must be off-diagonal pairs in
    /// range. The support is *not* checked against any graph here — that is
    /// `validate_step`'s job.
    pub fn from_parts(
        n: usize,
        diagonal: Vec<f64>,
        edge_weights: BTreeMap<(usize, usize), f64>,
    ) -> Result<Self, EngineError> {
        if diagonal.len() != n {
            return Err(EngineError::DimensionMismatch {
                expected: n,
                got: diagonal.len(),
            });
        }
        for &(u, v) in edge_weights.keys() {
            if u >= n || v >= n || u == v {
                return Err(EngineError::DimensionMismatch { expected: n, got: u.max(v) });
            }
        }
        Ok(StepMatrix {
            n,
            diagonal,
            edge_weights,
        })
    }

    /// Capture every nonzero entry of a dense matrix: off-diagonal
    /// `W[i][j]` becomes the weight of edge `j -> i`.
    pub fn from_dense(w: &DMatrix<f64>) -> Self {
        let n = w.nrows();
        let mut diagonal = vec![0.0; n];
        let mut edge_weights = BTreeMap::new();
        for i in 0..n {
            diagonal[i] = w[(i, i)];
            for j in 0..n {
                if i != j && w[(i, j)] != 0.0 {
                    edge_weights.insert((j, i), w[(i, j)]);
                }
            }
        }
        StepMatrix {
            n,
            diagonal,
            edge_weights,
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut w = DMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            w[(i, i)] = self.diagonal[i];
        }
        for (&(u, v), &weight) in &self.edge_weights {
            w[(v, u)] = weight;
        }
        w
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }

    pub fn diagonal_mut(&mut self) -> &mut [f64] {
        &mut self.diagonal
    }

    pub fn edge_weight(&self, from: usize, to: usize) -> f64 {
        self.edge_weights.get(&(from, to)).copied().unwrap_or(0.0)
    }

    pub fn set_edge_weight(&mut self, from: usize, to: usize, w: f64) {
        self.edge_weights.insert((from, to), w);
    }

    pub fn edge_weights(&self) -> impl Iterator<Item = ((usize, usize), f64)> + '_ {
        self.edge_weights.iter().map(|(&e, &w)| (e, w))
    }

    /// Multiply every weight (diagonal and edges) by `s`.
    pub fn scale(&mut self, s: f64) {
        for d in &mut self.diagonal {
            *d *= s;
        }
        for w in self.edge_weights.values_mut() {
            *w *= s;
        }
    }

    /// One application `W * x` using the fixed in-edge summation order.
    pub fn apply(&self, g: &Graph, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        for v in 0..self.n {
            let mut acc = self.diagonal[v] * x[v];
            for &u in g.in_neighbors(v) {
                acc += self.edge_weight(u, v) * x[u];
            }
            out[v] = acc;
        }
        out
    }
}

/// Accept iff every nonzero weight sits on an edge of `g` or on the
/// diagonal; report each violating ordered pair otherwise.
pub fn validate_step(g: &Graph, w: &StepMatrix) -> Result<(), EngineError> {
    if w.n() != g.n() {
        return Err(EngineError::DimensionMismatch {
            expected: g.n(),
            got: w.n(),
        });
    }
    let violations: Vec<SupportViolation> = w
        .edge_weights()
        .filter(|&((from, to), weight)| weight != 0.0 && !g.has_edge(from, to))
        .map(|((from, to), _)| SupportViolation { from, to })
        .collect();
    if violations.is_empty() {
        Ok(())
    } else {
        Err(EngineError::SupportViolations(violations))
    }
}

/// Ordered step matrices over one graph plus a final uniform scaling.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    pub steps: Vec<StepMatrix>,
    pub final_scale: f64,
}

impl Schedule {
    pub fn new(steps: Vec<StepMatrix>) -> Self {
        Schedule {
            steps,
            final_scale: 1.0,
        }
    }

    pub fn with_scale(steps: Vec<StepMatrix>, final_scale: f64) -> Self {
        Schedule { steps, final_scale }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

/// What a protocol's finalize output approximates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    Sum,
    Mean,
}

/// Outcome of a protocol run: per-vertex outputs and errors against the
/// exact global sum (or mean, for mean-targeting protocols).
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolResult {
    pub values: Vec<f64>,
    pub rounds: usize,
    /// The exact global sum of the input.
    pub sum: f64,
    pub mean: f64,
    pub target: Target,
    pub max_abs_error: f64,
    pub max_rel_error: f64,
    /// Per-round per-vertex state snapshots (round 0 = initial states),
    /// captured only when tracing is enabled.
    pub trace: Option<Vec<Vec<Vec<f64>>>>,
}

impl ProtocolResult {
    fn evaluate(
        values: Vec<f64>,
        rounds: usize,
        x: &[f64],
        target: Target,
        trace: Option<Vec<Vec<Vec<f64>>>>,
    ) -> Self {
        let sum: f64 = x.iter().sum();
        let mean = sum / x.len() as f64;
        let truth = match target {
            Target::Sum => sum,
            Target::Mean => mean,
        };
        let max_abs_error = values
            .iter()
            .map(|v| (v - truth).abs())
            .fold(0.0, f64::max);
        let max_rel_error = if truth != 0.0 {
            max_abs_error / truth.abs()
        } else {
            max_abs_error
        };
        ProtocolResult {
            values,
            rounds,
            sum,
            mean,
            target,
            max_abs_error,
            max_rel_error,
            trace,
        }
    }
}

/// Run a linear schedule: `state_0 = x`, `state_k = W_k * state_{k-1}`,
/// final values scaled by the schedule's factor.
pub fn run_linear_schedule(
    g: &Graph,
    sched: &Schedule,
    x: &[f64],
    trace: bool,
) -> Result<ProtocolResult, EngineError> {
    if x.len() != g.n() {
        return Err(EngineError::DimensionMismatch {
            expected: g.n(),
            got: x.len(),
        });
    }
    for w in &sched.steps {
        validate_step(g, w)?;
    }
    let mut state: Vec<f64> = x.to_vec();
    let mut snapshots = trace.then(|| vec![wrap_scalars(&state)]);
    for (k, w) in sched.steps.iter().enumerate() {
        state = w.apply(g, &state);
        if !state.iter().all(|v| v.is_finite()) {
            return Err(EngineError::NonFinite { round: k + 1 });
        }
        if let Some(snaps) = snapshots.as_mut() {
            snaps.push(wrap_scalars(&state));
        }
    }
    let values: Vec<f64> = state.iter().map(|v| v * sched.final_scale).collect();
    Ok(ProtocolResult::evaluate(
        values,
        sched.len(),
        x,
        Target::Sum,
        snapshots,
    ))
}

fn wrap_scalars(state: &[f64]) -> Vec<Vec<f64>> {
    state.iter().map(|&v| vec![v]).collect()
}

/// One scalar addressed to an out-neighbor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Emission {
    pub to: usize,
    pub value: f64,
}

/// One scalar received from an in-neighbor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Received {
    pub from: usize,
    pub value: f64,
}

/// The per-round communication contract. Rounds are numbered 1..=rounds().
/// `emit` is computed from pre-round states for every vertex before any
/// `absorb` runs; `absorb` receives scalars sorted by sender.
pub trait Protocol {
    fn name(&self) -> &str;
    /// Short machine-readable label of the construction technique.
    fn technique(&self) -> &str;
    fn rounds(&self) -> usize;
    fn target(&self) -> Target {
        Target::Sum
    }
    fn init_state(&self, vertex: usize, input: f64) -> Vec<f64>;
    fn emit(&self, round: usize, vertex: usize, state: &[f64]) -> Vec<Emission>;
    fn absorb(&self, round: usize, vertex: usize, state: &mut Vec<f64>, received: &[Received]);
    fn finalize(&self, vertex: usize, state: &[f64]) -> f64;
}

/// Execute a protocol round by round under the one-scalar-per-edge buffer.
pub fn run_protocol(
    g: &Graph,
    p: &dyn Protocol,
    x: &[f64],
    trace: bool,
) -> Result<ProtocolResult, EngineError> {
    if x.len() != g.n() {
        return Err(EngineError::DimensionMismatch {
            expected: g.n(),
            got: x.len(),
        });
    }
    let n = g.n();
    let edge_slot: BTreeMap<(usize, usize), usize> =
        g.edges().enumerate().map(|(i, e)| (e, i)).collect();
    let mut states: Vec<Vec<f64>> = (0..n).map(|v| p.init_state(v, x[v])).collect();
    let mut snapshots = trace.then(|| vec![states.clone()]);

    for round in 1..=p.rounds() {
        // emission phase: fill the per-edge buffer, one slot per edge
        let mut buffer: Vec<Option<f64>> = vec![None; edge_slot.len()];
        for from in 0..n {
            for Emission { to, value } in p.emit(round, from, &states[from]) {
                let slot = *edge_slot
                    .get(&(from, to))
                    .ok_or(EngineError::NonEdge { round, from, to })?;
                if buffer[slot].is_some() {
                    return Err(EngineError::EdgeBusy { round, from, to });
                }
                if !value.is_finite() {
                    return Err(EngineError::NonFinite { round });
                }
                buffer[slot] = Some(value);
            }
        }
        // absorption phase: deliver sorted by sender
        for v in 0..n {
            let received: Vec<Received> = g
                .in_neighbors(v)
                .iter()
                .filter_map(|&u| {
                    buffer[edge_slot[&(u, v)]].map(|value| Received { from: u, value })
                })
                .collect();
            p.absorb(round, v, &mut states[v], &received);
            if !states[v].iter().all(|s| s.is_finite()) {
                return Err(EngineError::NonFinite { round });
            }
        }
        if let Some(snaps) = snapshots.as_mut() {
            snaps.push(states.clone());
        }
    }

    let values: Vec<f64> = (0..n).map(|v| p.finalize(v, &states[v])).collect();
    Ok(ProtocolResult::evaluate(
        values,
        p.rounds(),
        x,
        p.target(),
        snapshots,
    ))
}

/// Deterministic input-vector generators.
pub mod input {
    use super::*;
    use rand_chacha::ChaCha8Rng;

    pub fn ones(n: usize) -> Vec<f64> {
        vec![1.0; n]
    }

    /// Indicator of vertex k.
    pub fn unit(n: usize, k: usize) -> Vec<f64> {
        let mut x = vec![0.0; n];
        if k < n {
            x[k] = 1.0;
        }
        x
    }

    /// Uniform values in [0, 1) from a seeded ChaCha stream; identical on
    /// every platform.
    pub fn uniform(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| next_f64(&mut rng)).collect()
    }

    pub(crate) fn next_f64(rng: &mut impl RngCore) -> f64 {
        // 53 random mantissa bits
        (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}
