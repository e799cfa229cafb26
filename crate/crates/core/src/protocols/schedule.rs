//! Linear schedules as emit/absorb protocols.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::engine::{validate_step, Emission, Protocol, Received, Schedule};
use crate::graph::Graph;
use crate::protocols::{hoffman_protocol, ProtocolError};
use crate::spectral::Spectrum;

/// Runs a linear [`Schedule`] through the message engine: the sender applies
/// the edge weight, the receiver applies its diagonal term and sums. This is
/// the bandwidth-conformant form of `run_linear_schedule` and the building
/// block product compositions use for eigenvalue schedules.
pub struct ScheduleProtocol {
    name: String,
    technique: String,
    schedule: Schedule,
    out_adj: Vec<Vec<usize>>,
}

impl ScheduleProtocol {
    pub fn new(
        g: &Graph,
        schedule: Schedule,
        name: impl Into<String>,
        technique: impl Into<String>,
    ) -> Result<Self, ProtocolError> {
        for step in &schedule.steps {
            validate_step(g, step)?;
        }
        Ok(ScheduleProtocol {
            name: name.into(),
            technique: technique.into(),
            schedule,
            out_adj: (0..g.n()).map(|v| g.out_neighbors(v).to_vec()).collect(),
        })
    }

    /// The Hoffman eigenvalue schedule as a protocol.
    pub fn hoffman(g: &Graph, spec: &Spectrum) -> Result<Self, ProtocolError> {
        let schedule = hoffman_protocol(g, spec)?;
        Self::new(g, schedule, "hoffman", "hoffman-eigenvalue-schedule")
    }

    pub fn schedule(&self) -> &Schedule {
        &self.schedule
    }
}

impl Protocol for ScheduleProtocol {
    fn name(&self) -> &str {
        &self.name
    }

    fn technique(&self) -> &str {
        &self.technique
    }

    fn rounds(&self) -> usize {
        self.schedule.len()
    }

    fn init_state(&self, _vertex: usize, input: f64) -> Vec<f64> {
        vec![input]
    }

    fn emit(&self, round: usize, vertex: usize, state: &[f64]) -> Vec<Emission> {
        let step = &self.schedule.steps[round - 1];
        self.out_adj[vertex]
            .iter()
            .map(|&to| Emission {
                to,
                value: step.edge_weight(vertex, to) * state[0],
            })
            .collect()
    }

    fn absorb(&self, round: usize, vertex: usize, state: &mut Vec<f64>, received: &[Received]) {
        let step = &self.schedule.steps[round - 1];
        let mut acc = step.diagonal()[vertex] * state[0];
        for r in received {
            acc += r.value;
        }
        state[0] = acc;
    }

    fn finalize(&self, _vertex: usize, state: &[f64]) -> f64 {
        state[0] * self.schedule.final_scale
    }
}
