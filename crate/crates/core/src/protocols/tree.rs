//! Gather-and-broadcast along BFS trees: the 2D baseline.

use alloc::vec;
use alloc::vec::Vec;

use crate::engine::{Emission, Protocol, Received};
use crate::graph::Graph;
use crate::protocols::ProtocolError;

/// Values flow inward to the root along a BFS in-tree with addition at
/// branch points, then the total is broadcast outward along a BFS out-tree
/// (a different tree on directed graphs). Total rounds:
/// ecc_in(root) + ecc_out(root), which is 2 * ecc(root) <= 2D on undirected
/// graphs. Exact on any strongly connected graph.
pub struct TreeProtocol {
    root: usize,
    gather_rounds: usize,
    broadcast_rounds: usize,
    dist_to_root: Vec<usize>,
    dist_from_root: Vec<usize>,
    gather_parent: Vec<Option<usize>>,
    broadcast_children: Vec<Vec<usize>>,
}

impl TreeProtocol {
    pub fn new(g: &Graph, root: usize) -> Result<Self, ProtocolError> {
        let n = g.n();
        if root >= n {
            return Err(ProtocolError::Unreachable { vertex: root });
        }
        let to = g.bfs_distances_to(root);
        let from = g.bfs_distances(root);
        let mut dist_to_root = vec![0usize; n];
        let mut dist_from_root = vec![0usize; n];
        for v in 0..n {
            dist_to_root[v] = to[v].ok_or(ProtocolError::Unreachable { vertex: v })?;
            dist_from_root[v] = from[v].ok_or(ProtocolError::Unreachable { vertex: v })?;
        }
        let mut gather_parent = vec![None; n];
        let mut broadcast_children = vec![Vec::new(); n];
        for v in 0..n {
            if v == root {
                continue;
            }
            // smallest-index parents keep the trees deterministic
            let gp = g
                .out_neighbors(v)
                .iter()
                .copied()
                .find(|&u| dist_to_root[u] + 1 == dist_to_root[v])
                .expect("BFS level has a parent");
            gather_parent[v] = Some(gp);
            let bp = g
                .in_neighbors(v)
                .iter()
                .copied()
                .find(|&u| dist_from_root[u] + 1 == dist_from_root[v])
                .expect("BFS level has a parent");
            broadcast_children[bp].push(v);
        }
        Ok(TreeProtocol {
            root,
            gather_rounds: dist_to_root.iter().copied().max().unwrap_or(0),
            broadcast_rounds: dist_from_root.iter().copied().max().unwrap_or(0),
            dist_to_root,
            dist_from_root,
            gather_parent,
            broadcast_children,
        })
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn gather_rounds(&self) -> usize {
        self.gather_rounds
    }

    pub fn broadcast_rounds(&self) -> usize {
        self.broadcast_rounds
    }
}

impl Protocol for TreeProtocol {
    fn name(&self) -> &str {
        "tree"
    }

    fn technique(&self) -> &str {
        "spanning-tree-gather-broadcast"
    }

    fn rounds(&self) -> usize {
        self.gather_rounds + self.broadcast_rounds
    }

    fn init_state(&self, _vertex: usize, input: f64) -> Vec<f64> {
        vec![input]
    }

    fn emit(&self, round: usize, vertex: usize, state: &[f64]) -> Vec<Emission> {
        if round <= self.gather_rounds {
            // deepest level sends first; a vertex sends once its whole
            // subtree has been folded into its accumulator
            let sending_depth = self.gather_rounds - round + 1;
            match self.gather_parent[vertex] {
                Some(parent) if self.dist_to_root[vertex] == sending_depth => {
                    vec![Emission {
                        to: parent,
                        value: state[0],
                    }]
                }
                _ => Vec::new(),
            }
        } else {
            let sending_depth = round - self.gather_rounds - 1;
            if self.dist_from_root[vertex] == sending_depth {
                self.broadcast_children[vertex]
                    .iter()
                    .map(|&to| Emission {
                        to,
                        value: state[0],
                    })
                    .collect()
            } else {
                Vec::new()
            }
        }
    }

    fn absorb(&self, round: usize, _vertex: usize, state: &mut Vec<f64>, received: &[Received]) {
        if round <= self.gather_rounds {
            for r in received {
                state[0] += r.value;
            }
        } else if let Some(r) = received.first() {
            // exactly one broadcast parent
            state[0] = r.value;
        }
    }

    fn finalize(&self, _vertex: usize, state: &[f64]) -> f64 {
        state[0]
    }
}
