//! Text and JSON file formats.
//!
//! Graph text format: a header line `n <count> directed <0|1>` followed by
//! one `u v` edge per line, 0-indexed. The JSON alternative is
//! `{ "n": ..., "directed": ..., "edges": [[u, v], ...] }`; loading sniffs
//! the leading `{`. Undirected graphs are stored as their full symmetric
//! edge sets, so save/load round-trips are identities and canonical saves
//! are byte-stable.
//!
//! Step-matrix lists (schedules, factorizations) use sparse triplet blocks:
//! one `i j w` line per matrix entry (row i = receiver, column j = sender,
//! diagonal entries included), one `step <k>` line per factor, preceded by
//! a header: `factorization n=<n> m=<m> residual=<r>` or
//! `schedule n=<n> steps=<k> scale=<s>`.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use netsum_core::engine::{Schedule, StepMatrix};
use netsum_core::factorization::Factorization;
use netsum_core::graph::Graph;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("line {line}: {msg}")]
    Line { line: usize, msg: String },
    #[error("{0}")]
    Structure(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

fn line_err(line: usize, msg: impl Into<String>) -> FormatError {
    FormatError::Line {
        line,
        msg: msg.into(),
    }
}

fn read(path: &Path) -> Result<String, FormatError> {
    fs::read_to_string(path).map_err(|source| FormatError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn write(path: &Path, contents: &str) -> Result<(), FormatError> {
    fs::write(path, contents).map_err(|source| FormatError::Io {
        path: path.display().to_string(),
        source,
    })
}

// ---------------------------------------------------------------- graphs

#[derive(Serialize, Deserialize)]
struct GraphDoc {
    n: usize,
    directed: bool,
    edges: Vec<(usize, usize)>,
}

fn check_edge(n: usize, u: usize, v: usize) -> Result<(), String> {
    if u == v {
        return Err(format!("self-loop ({u}, {v}) is not allowed"));
    }
    for w in [u, v] {
        if w >= n {
            return Err(format!("vertex {w} out of range for n = {n}"));
        }
    }
    Ok(())
}

pub fn render_graph_text(g: &Graph) -> String {
    let mut out = format!("n {} directed {}\n", g.n(), u8::from(g.directed()));
    for (u, v) in g.edges() {
        out.push_str(&format!("{u} {v}\n"));
    }
    out
}

pub fn parse_graph_text(s: &str) -> Result<Graph, FormatError> {
    let mut n = None;
    let mut directed = false;
    let mut edges = Vec::new();
    for (ix, raw) in s.lines().enumerate() {
        let line = ix + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        if n.is_none() {
            if tokens.len() != 4 || tokens[0] != "n" || tokens[2] != "directed" {
                return Err(line_err(line, "expected header `n <count> directed <0|1>`"));
            }
            let count: usize = tokens[1]
                .parse()
                .map_err(|_| line_err(line, format!("invalid vertex count `{}`", tokens[1])))?;
            directed = match tokens[3] {
                "0" => false,
                "1" => true,
                other => return Err(line_err(line, format!("invalid directed flag `{other}`"))),
            };
            if count == 0 {
                return Err(line_err(line, "graph must have at least one vertex"));
            }
            n = Some(count);
            continue;
        }
        if tokens.len() != 2 {
            return Err(line_err(line, format!("expected `u v`, found `{trimmed}`")));
        }
        let u: usize = tokens[0]
            .parse()
            .map_err(|_| line_err(line, format!("invalid vertex `{}`", tokens[0])))?;
        let v: usize = tokens[1]
            .parse()
            .map_err(|_| line_err(line, format!("invalid vertex `{}`", tokens[1])))?;
        check_edge(n.unwrap(), u, v).map_err(|msg| line_err(line, msg))?;
        edges.push((u, v));
    }
    let n = n.ok_or_else(|| FormatError::Structure("missing header line".into()))?;
    Graph::new(n, directed, edges).map_err(|e| FormatError::Structure(e.to_string()))
}

pub fn render_graph_json(g: &Graph) -> String {
    let doc = GraphDoc {
        n: g.n(),
        directed: g.directed(),
        edges: g.edges().collect(),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("graph doc serializes");
    s.push('\n');
    s
}

pub fn parse_graph_json(s: &str) -> Result<Graph, FormatError> {
    let doc: GraphDoc = serde_json::from_str(s)?;
    if doc.n == 0 {
        return Err(FormatError::Structure(
            "graph must have at least one vertex".into(),
        ));
    }
    for (ix, &(u, v)) in doc.edges.iter().enumerate() {
        check_edge(doc.n, u, v)
            .map_err(|msg| FormatError::Structure(format!("edges[{ix}]: {msg}")))?;
    }
    Graph::new(doc.n, doc.directed, doc.edges).map_err(|e| FormatError::Structure(e.to_string()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphFileFormat {
    Text,
    Json,
}

impl GraphFileFormat {
    /// `.json` extension selects JSON; everything else is text.
    pub fn for_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") => GraphFileFormat::Json,
            _ => GraphFileFormat::Text,
        }
    }
}

pub fn render_graph(g: &Graph, format: GraphFileFormat) -> String {
    match format {
        GraphFileFormat::Text => render_graph_text(g),
        GraphFileFormat::Json => render_graph_json(g),
    }
}

/// Parse either format, sniffing JSON by the leading `{`.
pub fn parse_graph(s: &str) -> Result<Graph, FormatError> {
    if s.trim_start().starts_with('{') {
        parse_graph_json(s)
    } else {
        parse_graph_text(s)
    }
}

pub fn save_graph(g: &Graph, path: &Path) -> Result<(), FormatError> {
    write(path, &render_graph(g, GraphFileFormat::for_path(path)))
}

pub fn load_graph(path: &Path) -> Result<Graph, FormatError> {
    parse_graph(&read(path)?)
}

// --------------------------------------------------------------- vectors

pub fn render_vector(x: &[f64]) -> String {
    let mut out = String::new();
    for v in x {
        out.push_str(&format!("{v}\n"));
    }
    out
}

pub fn parse_vector(s: &str) -> Result<Vec<f64>, FormatError> {
    let mut out = Vec::new();
    for (ix, raw) in s.lines().enumerate() {
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let v: f64 = trimmed
            .parse()
            .map_err(|_| line_err(ix + 1, format!("invalid real value `{trimmed}`")))?;
        out.push(v);
    }
    Ok(out)
}

pub fn load_vector(path: &Path) -> Result<Vec<f64>, FormatError> {
    parse_vector(&read(path)?)
}

pub fn save_vector(x: &[f64], path: &Path) -> Result<(), FormatError> {
    write(path, &render_vector(x))
}

// -------------------------------------------------- step-matrix triplets

fn render_steps(steps: &[StepMatrix]) -> String {
    let mut out = String::new();
    for (k, step) in steps.iter().enumerate() {
        out.push_str(&format!("step {k}\n"));
        let mut entries: Vec<(usize, usize, f64)> = (0..step.n())
            .map(|i| (i, i, step.diagonal()[i]))
            .collect();
        entries.extend(step.edge_weights().map(|((from, to), w)| (to, from, w)));
        entries.sort_by_key(|&(i, j, _)| (i, j));
        for (i, j, w) in entries {
            out.push_str(&format!("{i} {j} {w}\n"));
        }
    }
    out
}

fn parse_header(line: &str, expected_kind: &str) -> Result<BTreeMap<String, String>, FormatError> {
    let mut tokens = line.split_whitespace();
    let kind = tokens.next().unwrap_or_default();
    if kind != expected_kind {
        return Err(line_err(1, format!("expected `{expected_kind}` header, found `{kind}`")));
    }
    let mut fields = BTreeMap::new();
    for token in tokens {
        let (key, value) = token
            .split_once('=')
            .ok_or_else(|| line_err(1, format!("malformed header field `{token}`")))?;
        fields.insert(key.to_string(), value.to_string());
    }
    Ok(fields)
}

fn header_field<T: std::str::FromStr>(
    fields: &BTreeMap<String, String>,
    key: &str,
) -> Result<T, FormatError> {
    let raw = fields
        .get(key)
        .ok_or_else(|| line_err(1, format!("missing header field `{key}`")))?;
    raw.parse()
        .map_err(|_| line_err(1, format!("invalid header field `{key}={raw}`")))
}

fn parse_steps(s: &str, n: usize, expected: usize) -> Result<Vec<StepMatrix>, FormatError> {
    let mut steps: Vec<StepMatrix> = Vec::new();
    for (ix, raw) in s.lines().enumerate().skip(1) {
        let line = ix + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        if tokens[0] == "step" {
            let k: usize = tokens
                .get(1)
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| line_err(line, "malformed `step <k>` line"))?;
            if k != steps.len() {
                return Err(line_err(line, format!("expected step {}, found step {k}", steps.len())));
            }
            steps.push(StepMatrix::zeros(n));
            continue;
        }
        if tokens.len() != 3 {
            return Err(line_err(line, format!("expected `i j w`, found `{trimmed}`")));
        }
        let step = steps
            .last_mut()
            .ok_or_else(|| line_err(line, "triplet before any `step` line"))?;
        let i: usize = tokens[0]
            .parse()
            .map_err(|_| line_err(line, format!("invalid row index `{}`", tokens[0])))?;
        let j: usize = tokens[1]
            .parse()
            .map_err(|_| line_err(line, format!("invalid column index `{}`", tokens[1])))?;
        let w: f64 = tokens[2]
            .parse()
            .map_err(|_| line_err(line, format!("invalid weight `{}`", tokens[2])))?;
        if i >= n || j >= n {
            return Err(line_err(line, format!("entry ({i}, {j}) out of range for n = {n}")));
        }
        if i == j {
            step.diagonal_mut()[i] = w;
        } else {
            // row = receiver, column = sender
            step.set_edge_weight(j, i, w);
        }
    }
    if steps.len() != expected {
        return Err(FormatError::Structure(format!(
            "header declares {expected} steps, file has {}",
            steps.len()
        )));
    }
    Ok(steps)
}

pub fn render_factorization(f: &Factorization, n: usize) -> String {
    let mut out = format!(
        "factorization n={n} m={} residual={:e}\n",
        f.steps.len(),
        f.residual
    );
    out.push_str(&render_steps(&f.steps));
    out
}

pub fn parse_factorization(s: &str) -> Result<Factorization, FormatError> {
    let header_line = s
        .lines()
        .next()
        .ok_or_else(|| FormatError::Structure("empty factorization file".into()))?;
    let fields = parse_header(header_line, "factorization")?;
    let n: usize = header_field(&fields, "n")?;
    let m: usize = header_field(&fields, "m")?;
    let residual: f64 = header_field(&fields, "residual")?;
    let steps = parse_steps(s, n, m)?;
    Ok(Factorization { steps, residual })
}

pub fn render_schedule(sched: &Schedule, n: usize) -> String {
    let mut out = format!(
        "schedule n={n} steps={} scale={}\n",
        sched.len(),
        sched.final_scale
    );
    out.push_str(&render_steps(&sched.steps));
    out
}

pub fn parse_schedule(s: &str) -> Result<Schedule, FormatError> {
    let header_line = s
        .lines()
        .next()
        .ok_or_else(|| FormatError::Structure("empty schedule file".into()))?;
    let fields = parse_header(header_line, "schedule")?;
    let n: usize = header_field(&fields, "n")?;
    let count: usize = header_field(&fields, "steps")?;
    let scale: f64 = header_field(&fields, "scale")?;
    let steps = parse_steps(s, n, count)?;
    Ok(Schedule::with_scale(steps, scale))
}

pub fn load_factorization(path: &Path) -> Result<Factorization, FormatError> {
    parse_factorization(&read(path)?)
}

pub fn save_factorization(f: &Factorization, n: usize, path: &Path) -> Result<(), FormatError> {
    write(path, &render_factorization(f, n))
}

pub fn load_schedule(path: &Path) -> Result<Schedule, FormatError> {
    parse_schedule(&read(path)?)
}

pub fn save_schedule(sched: &Schedule, n: usize, path: &Path) -> Result<(), FormatError> {
    write(path, &render_schedule(sched, n))
}
