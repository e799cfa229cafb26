//! The exact 2-round protocol for diameter-2 graphs.
//!
//! Round 1: every vertex sends its value to all out-neighbors. Round 2:
//! vertex i forwards to each out-neighbor k the combination
//! sum over in-neighbors j at distance 2 from k of x_j / n(j, k), where
//! n(j, k) counts the length-2 paths from j to k. Splitting each x_j evenly
//! over its n(j, k) relay paths makes the round-2 receipts at k total
//! exactly the sum of the values at distance 2 from k; adding k's own value
//! and its in-neighbors' round-1 values gives the global sum.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::engine::{Emission, Protocol, Received};
use crate::graph::{distance2_table, metrics, Connectivity, Graph};
use crate::protocols::ProtocolError;

/// State layout per vertex: `[own, recv_0 .. recv_{indeg-1}, relay_sum]`
/// where `recv_i` holds the round-1 value of the i-th in-neighbor (sorted)
/// and `relay_sum` accumulates the round-2 receipts.
pub struct Diameter2Protocol {
    diameter: usize,
    out_adj: Vec<Vec<usize>>,
    in_slot: Vec<BTreeMap<usize, usize>>,
    in_degree: Vec<usize>,
    /// Per vertex, aligned with `out_adj`: the (in-neighbor slot, 1/n(j,k))
    /// pairs feeding the round-2 message to that out-neighbor.
    relay_plan: Vec<Vec<Vec<(usize, f64)>>>,
}

impl Diameter2Protocol {
    pub fn new(g: &Graph) -> Result<Self, ProtocolError> {
        let m = match metrics(g) {
            Connectivity::Connected(m) => m,
            Connectivity::Disconnected { from, to } => {
                return Err(ProtocolError::Disconnected { from, to })
            }
        };
        if m.diameter > 2 {
            return Err(ProtocolError::DiameterTooLarge {
                diameter: m.diameter,
            });
        }
        let table = distance2_table(g);
        let n = g.n();
        let out_adj: Vec<Vec<usize>> = (0..n).map(|v| g.out_neighbors(v).to_vec()).collect();
        let in_slot: Vec<BTreeMap<usize, usize>> = (0..n)
            .map(|v| {
                g.in_neighbors(v)
                    .iter()
                    .enumerate()
                    .map(|(slot, &u)| (u, slot))
                    .collect()
            })
            .collect();
        let relay_plan = (0..n)
            .map(|i| {
                out_adj[i]
                    .iter()
                    .map(|&k| {
                        g.in_neighbors(i)
                            .iter()
                            .enumerate()
                            .filter_map(|(slot, &j)| {
                                table.path_count(j, k).map(|c| (slot, 1.0 / c as f64))
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Ok(Diameter2Protocol {
            diameter: m.diameter,
            in_degree: (0..n).map(|v| g.in_neighbors(v).len()).collect(),
            out_adj,
            in_slot,
            relay_plan,
        })
    }

    pub fn diameter(&self) -> usize {
        self.diameter
    }
}

impl Protocol for Diameter2Protocol {
    fn name(&self) -> &str {
        "diam2"
    }

    fn technique(&self) -> &str {
        "distance-2-weighted-relay"
    }

    fn rounds(&self) -> usize {
        2
    }

    fn init_state(&self, vertex: usize, input: f64) -> Vec<f64> {
        let mut state = vec![0.0; self.in_degree[vertex] + 2];
        state[0] = input;
        state
    }

    fn emit(&self, round: usize, vertex: usize, state: &[f64]) -> Vec<Emission> {
        match round {
            1 => self.out_adj[vertex]
                .iter()
                .map(|&to| Emission {
                    to,
                    value: state[0],
                })
                .collect(),
            _ => self.out_adj[vertex]
                .iter()
                .zip(&self.relay_plan[vertex])
                .map(|(&to, plan)| Emission {
                    to,
                    value: plan
                        .iter()
                        .map(|&(slot, coeff)| coeff * state[1 + slot])
                        .sum(),
                })
                .collect(),
        }
    }

    fn absorb(&self, round: usize, vertex: usize, state: &mut Vec<f64>, received: &[Received]) {
        if round == 1 {
            for r in received {
                state[1 + self.in_slot[vertex][&r.from]] = r.value;
            }
        } else {
            let relay_ix = state.len() - 1;
            state[relay_ix] += received.iter().map(|r| r.value).sum::<f64>();
        }
    }

    fn finalize(&self, vertex: usize, state: &[f64]) -> f64 {
        // own value + in-neighbors' values + distance-2 sum
        state[0]
            + state[1..=self.in_degree[vertex]].iter().sum::<f64>()
            + state[state.len() - 1]
    }
}
