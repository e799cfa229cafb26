//! Directed regular graphs, the named families, and structural metrics.
//!
//! Graphs are stored as explicit ordered edge sets with no self-loops;
//! undirected graphs are symmetric directed edge sets. The adjacency matrix
//! uses the receiver-row convention: `A[v][u] = 1` iff the edge `u -> v`
//! exists, so one communication round is literally a matrix-vector product
//! `state' = W * state` for a step matrix `W` supported on the adjacency
//! pattern plus the diagonal.

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use nalgebra::DMatrix;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphError {
    /// A graph must have at least one vertex.
    Empty,
    SelfLoop { vertex: usize },
    VertexOutOfRange { vertex: usize, n: usize },
    InvalidParameter(String),
}

impl fmt::Display for GraphError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphError::Empty => write!(f, "graph must have at least one vertex"),
            GraphError::SelfLoop { vertex } => write!(f, "self-loop at vertex {vertex}"),
            GraphError::VertexOutOfRange { vertex, n } => {
                write!(f, "vertex {vertex} out of range for n = {n}")
            }
            GraphError::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
        }
    }
}

/// Directed graph on vertices `0..n` with no self-loops.
#[derive(Debug, Clone, Eq)]
pub struct Graph {
    n: usize,
    directed: bool,
    edges: BTreeSet<(usize, usize)>,
    out_adj: Vec<Vec<usize>>,
    in_adj: Vec<Vec<usize>>,
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.directed == other.directed && self.edges == other.edges
    }
}

impl Graph {
    /// Build a graph from ordered pairs. With `directed = false` every edge
    /// is inserted together with its reverse.
    pub fn new(
        n: usize,
        directed: bool,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::Empty);
        }
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            if u == v {
                return Err(GraphError::SelfLoop { vertex: u });
            }
            for w in [u, v] {
                if w >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: w, n });
                }
            }
            set.insert((u, v));
            if !directed {
                set.insert((v, u));
            }
        }
        let mut out_adj = vec![Vec::new(); n];
        let mut in_adj = vec![Vec::new(); n];
        for &(u, v) in &set {
            out_adj[u].push(v);
            in_adj[v].push(u);
        }
        for adj in in_adj.iter_mut() {
            adj.sort_unstable();
        }
        // out_adj is already sorted by the BTreeSet iteration order.
        Ok(Graph {
            n,
            directed,
            edges: set,
            out_adj,
            in_adj,
        })
    }

    pub fn undirected(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, GraphError> {
        Self::new(n, false, edges)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn directed(&self) -> bool {
        self.directed
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.contains(&(u, v))
    }

    pub fn out_neighbors(&self, v: usize) -> &[usize] {
        &self.out_adj[v]
    }

    pub fn in_neighbors(&self, v: usize) -> &[usize] {
        &self.in_adj[v]
    }

    /// The common vertex degree, if out-degree = in-degree = d everywhere.
    pub fn regular_degree(&self) -> Option<usize> {
        let d = self.out_adj[0].len();
        for v in 0..self.n {
            if self.out_adj[v].len() != d || self.in_adj[v].len() != d {
                return None;
            }
        }
        Some(d)
    }

    /// True iff the edge set is symmetric (every edge has its reverse).
    pub fn is_symmetric(&self) -> bool {
        self.edges.iter().all(|&(u, v)| self.edges.contains(&(v, u)))
    }

    /// Adjacency matrix in the receiver-row convention: `A[(v, u)] = 1` iff
    /// the edge `u -> v` exists.
    pub fn adjacency_matrix(&self) -> DMatrix<f64> {
        let mut a = DMatrix::zeros(self.n, self.n);
        for &(u, v) in &self.edges {
            a[(v, u)] = 1.0;
        }
        a
    }

    /// Directed BFS distances from `source` along out-edges.
    pub fn bfs_distances(&self, source: usize) -> Vec<Option<usize>> {
        self.bfs(source, &self.out_adj)
    }

    /// Directed BFS distances *to* `target`, i.e. along reversed edges.
    pub fn bfs_distances_to(&self, target: usize) -> Vec<Option<usize>> {
        self.bfs(target, &self.in_adj)
    }

    fn bfs(&self, source: usize, adj: &[Vec<usize>]) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n];
        dist[source] = Some(0);
        let mut queue = VecDeque::new();
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap();
            for &v in &adj[u] {
                if dist[v].is_none() {
                    dist[v] = Some(du + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// If the graph is a circulant under its own labeling (edge set invariant
    /// under v -> v+1 mod n), returns the sorted generator offsets.
    pub fn circulant_generators(&self) -> Option<Vec<usize>> {
        let gens: Vec<usize> = self.out_adj[0].iter().map(|&v| v % self.n).collect();
        let expected: BTreeSet<(usize, usize)> = (0..self.n)
            .flat_map(|u| gens.iter().map(move |&s| (u, (u + s) % self.n)))
            .collect();
        if expected == self.edges {
            Some(gens)
        } else {
            None
        }
    }
}

/// Diameter and per-vertex eccentricities of a strongly connected graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphMetrics {
    /// `None` when the graph is irregular.
    pub degree: Option<usize>,
    pub diameter: usize,
    pub eccentricity: Vec<usize>,
}

/// Connectivity is a first-class reported state, not an error buried in a
/// protocol run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Connectivity {
    Connected(GraphMetrics),
    /// A witness pair with no directed path `from -> to`.
    Disconnected { from: usize, to: usize },
}

impl Connectivity {
    pub fn connected(self) -> Option<GraphMetrics> {
        match self {
            Connectivity::Connected(m) => Some(m),
            Connectivity::Disconnected { .. } => None,
        }
    }
}

/// All-sources BFS metrics.
pub fn metrics(g: &Graph) -> Connectivity {
    let mut ecc = vec![0usize; g.n()];
    for u in 0..g.n() {
        let dist = g.bfs_distances(u);
        for (v, d) in dist.iter().enumerate() {
            match d {
                Some(d) => ecc[u] = ecc[u].max(*d),
                None => return Connectivity::Disconnected { from: u, to: v },
            }
        }
    }
    let diameter = ecc.iter().copied().max().unwrap_or(0);
    Connectivity::Connected(GraphMetrics {
        degree: g.regular_degree(),
        diameter,
        eccentricity: ecc,
    })
}

/// For every ordered pair at directed distance exactly 2, the number of
/// length-2 paths between them.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Distance2Table {
    pairs: BTreeMap<(usize, usize), usize>,
}

impl Distance2Table {
    pub fn path_count(&self, j: usize, k: usize) -> Option<usize> {
        self.pairs.get(&(j, k)).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), usize)> + '_ {
        self.pairs.iter().map(|(&p, &c)| (p, c))
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Ordered pairs (j, k) with dist(j, k) = 2 and their 2-path counts n(j, k).
pub fn distance2_table(g: &Graph) -> Distance2Table {
    let mut pairs = BTreeMap::new();
    for j in 0..g.n() {
        let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
        for &i in g.out_neighbors(j) {
            for &k in g.out_neighbors(i) {
                *counts.entry(k).or_insert(0) += 1;
            }
        }
        for (k, c) in counts {
            // distance exactly 2: reachable in two steps, not adjacent, not j
            if k != j && !g.has_edge(j, k) {
                pairs.insert((j, k), c);
            }
        }
    }
    Distance2Table { pairs }
}

/// Specification of the built-in graph families.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CayleySpec {
    Cycle { n: usize },
    Complete { n: usize },
    Hypercube { dim: usize },
    Petersen,
    Circulant { n: usize, connections: Vec<usize> },
    Product(Box<CayleySpec>, Box<CayleySpec>),
}

impl fmt::Display for CayleySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CayleySpec::Cycle { n } => write!(f, "cycle {n}"),
            CayleySpec::Complete { n } => write!(f, "complete {n}"),
            CayleySpec::Hypercube { dim } => write!(f, "hypercube {dim}"),
            CayleySpec::Petersen => write!(f, "petersen"),
            CayleySpec::Circulant { n, connections } => {
                write!(f, "circulant {n} ")?;
                for (i, s) in connections.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{s}")?;
                }
                Ok(())
            }
            CayleySpec::Product(a, b) => write!(f, "product {a} {b}"),
        }
    }
}

/// Instantiate a named family.
pub fn build_family(spec: &CayleySpec) -> Result<Graph, GraphError> {
    match spec {
        CayleySpec::Cycle { n } => {
            require(*n >= 2, "cycle needs n >= 2")?;
            circulant(*n, &symmetric_closure(*n, &[1]))
        }
        CayleySpec::Complete { n } => {
            require(*n >= 2, "complete graph needs n >= 2")?;
            let conns: Vec<usize> = (1..*n).collect();
            circulant(*n, &conns)
        }
        CayleySpec::Hypercube { dim } => {
            require(*dim >= 1, "hypercube needs dimension >= 1")?;
            require(*dim <= 24, "hypercube dimension too large")?;
            let n = 1usize << dim;
            let edges = (0..n).flat_map(|u| (0..*dim).map(move |b| (u, u ^ (1 << b))));
            Graph::new(n, false, edges)
        }
        CayleySpec::Petersen => {
            // Kneser K(5,2): vertices are the 2-subsets of {0..4} in
            // lexicographic order, adjacent iff disjoint.
            let mut subsets = Vec::new();
            for a in 0..5u8 {
                for b in (a + 1)..5 {
                    subsets.push((a, b));
                }
            }
            let disjoint = |p: (u8, u8), q: (u8, u8)| {
                p.0 != q.0 && p.0 != q.1 && p.1 != q.0 && p.1 != q.1
            };
            let mut edges = Vec::new();
            for (i, &p) in subsets.iter().enumerate() {
                for (j, &q) in subsets.iter().enumerate() {
                    if i < j && disjoint(p, q) {
                        edges.push((i, j));
                    }
                }
            }
            Graph::new(10, false, edges)
        }
        CayleySpec::Circulant { n, connections } => {
            require(*n >= 2, "circulant needs n >= 2")?;
            require(!connections.is_empty(), "circulant needs a nonempty connection set")?;
            for &s in connections {
                if s == 0 || s >= *n {
                    return Err(GraphError::InvalidParameter(format!(
                        "circulant offset {s} outside 1..{}",
                        n - 1
                    )));
                }
            }
            circulant(*n, connections)
        }
        CayleySpec::Product(a, b) => {
            let g1 = build_family(a)?;
            let g2 = build_family(b)?;
            Ok(cartesian_product(&g1, &g2))
        }
    }
}

fn require(cond: bool, msg: &str) -> Result<(), GraphError> {
    if cond {
        Ok(())
    } else {
        Err(GraphError::InvalidParameter(String::from(msg)))
    }
}

fn symmetric_closure(n: usize, offsets: &[usize]) -> Vec<usize> {
    let mut set = BTreeSet::new();
    for &s in offsets {
        set.insert(s % n);
        set.insert((n - s % n) % n);
    }
    set.remove(&0);
    set.into_iter().collect()
}

/// Circulant graph on Z_n with edges v -> v + s for each offset s. The graph
/// is marked undirected exactly when the connection set is inverse-closed.
fn circulant(n: usize, connections: &[usize]) -> Result<Graph, GraphError> {
    let set: BTreeSet<usize> = connections.iter().copied().collect();
    let symmetric = set.iter().all(|&s| set.contains(&((n - s) % n)));
    let edges = (0..n).flat_map(|u| set.iter().map(move |&s| (u, (u + s) % n)));
    Graph::new(n, !symmetric, edges)
}

/// Cartesian product: vertex (a, b) -> a * n2 + b; edges change exactly one
/// coordinate by an edge of that factor.
pub fn cartesian_product(g1: &Graph, g2: &Graph) -> Graph {
    let n1 = g1.n();
    let n2 = g2.n();
    let mut edges = Vec::new();
    for (u, v) in g1.edges() {
        for b in 0..n2 {
            edges.push((u * n2 + b, v * n2 + b));
        }
    }
    for (u, v) in g2.edges() {
        for a in 0..n1 {
            edges.push((a * n2 + u, a * n2 + v));
        }
    }
    let directed = g1.directed() || g2.directed();
    Graph::new(n1 * n2, directed, edges).expect("factors are valid graphs")
}
