//! Factorizations of the all-ones matrix J into step matrices on the
//! adjacency-plus-diagonal support.
//!
//! A schedule of step matrices computes the global sum exactly when their
//! product (in application order) equals J. This module verifies proposed
//! factorizations, derives exact ones from spectra, reduces circulant
//! schedules to per-frequency conditions on their first-column vectors, and
//! searches numerically for short factorizations with alternating least
//! squares. The search is instrumentation for an open question, not a
//! solver with guarantees: it never claims nonexistence, only "no solution
//! found within budget".

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use rand_core::SeedableRng;

use crate::engine::{input, validate_step, EngineError, StepMatrix};
use crate::graph::{metrics, Connectivity, Graph};
use crate::spectral::{hoffman_factors, leja_order, SpectralError, Spectrum};

/// Default residual tolerance factor: a factorization passes at residual
/// <= tol * n (Frobenius residuals scale with matrix size).
pub const DEFAULT_RESIDUAL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub enum FactorError {
    Engine(EngineError),
    Spectral(SpectralError),
    Disconnected { from: usize, to: usize },
    EmptyFactorList,
    /// Any length-m factorization needs every pair reachable by a lazy walk
    /// of length m, so m >= diameter is necessary.
    TargetBelowDiameter { target: usize, diameter: usize },
    ZeroBudget,
    /// A matrix handed to the circulant reduction is not circulant; the
    /// offending entry is named.
    NotCirculant { row: usize, col: usize },
    GraphNotCirculant,
    /// A circulant weight sits outside the declared support.
    OffSupport { offset: usize },
    /// Cover-check inputs disagree on n or support.
    Mismatch,
    MissingZeroOffset,
    DimensionMismatch { expected: usize, got: usize },
}

impl fmt::Display for FactorError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FactorError::Engine(e) => write!(f, "{e}"),
            FactorError::Spectral(e) => write!(f, "{e}"),
            FactorError::Disconnected { from, to } => {
                write!(f, "graph is not strongly connected: no path {from} -> {to}")
            }
            FactorError::EmptyFactorList => write!(f, "empty factor list"),
            FactorError::TargetBelowDiameter { target, diameter } => {
                write!(
                    f,
                    "target length {target} is below the walk lower bound (diameter {diameter})"
                )
            }
            FactorError::ZeroBudget => write!(f, "search budget must be positive"),
            FactorError::NotCirculant { row, col } => {
                write!(f, "matrix is not circulant at entry ({row}, {col})")
            }
            FactorError::GraphNotCirculant => write!(f, "graph is not circulant under its labeling"),
            FactorError::OffSupport { offset } => {
                write!(f, "nonzero weight at offset {offset} outside the support")
            }
            FactorError::Mismatch => write!(f, "vectors disagree on n or support"),
            FactorError::MissingZeroOffset => write!(f, "support must include offset 0"),
            FactorError::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
        }
    }
}

impl From<EngineError> for FactorError {
    fn from(e: EngineError) -> Self {
        FactorError::Engine(e)
    }
}

impl From<SpectralError> for FactorError {
    fn from(e: SpectralError) -> Self {
        FactorError::Spectral(e)
    }
}

/// An ordered list of step matrices with its Frobenius residual against J.
#[derive(Debug, Clone, PartialEq)]
pub struct Factorization {
    pub steps: Vec<StepMatrix>,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub residual: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Product of the steps in application order: the matrix a schedule applies
/// to the input vector, last step leftmost.
pub fn composite(steps: &[StepMatrix], n: usize) -> DMatrix<f64> {
    steps
        .iter()
        .fold(DMatrix::identity(n, n), |acc, w| w.to_dense() * acc)
}

fn residual_vs_j(m: &DMatrix<f64>) -> f64 {
    let mut acc = 0.0;
    for v in m.iter() {
        let d = v - 1.0;
        acc += d * d;
    }
    libm::sqrt(acc)
}

/// Check support of every factor, multiply them out, and compare to J in
/// Frobenius norm; pass iff residual <= tol * n.
pub fn verify_factorization(
    g: &Graph,
    steps: &[StepMatrix],
    tol: f64,
) -> Result<VerifyReport, FactorError> {
    for w in steps {
        validate_step(g, w)?;
    }
    let residual = residual_vs_j(&composite(steps, g.n()));
    Ok(VerifyReport {
        residual,
        tol,
        pass: residual <= tol * g.n() as f64,
    })
}

/// Exact length-m factorization from the spectrum: the factors
/// (A - lambda_t I) with the first factor scaled by n / prod(d - lambda_t).
pub fn eigen_factorization(g: &Graph, spec: &Spectrum) -> Result<Factorization, FactorError> {
    if spec.n != g.n() {
        return Err(FactorError::DimensionMismatch {
            expected: g.n(),
            got: spec.n,
        });
    }
    let factors = hoffman_factors(spec)?;
    // Leja execution order keeps the intermediate factor products bounded
    let mut steps: Vec<StepMatrix> = leja_order(&factors.lambdas)
        .iter()
        .map(|&lambda| StepMatrix::adjacency_step(g, -lambda))
        .collect();
    if let Some(first) = steps.first_mut() {
        first.scale(factors.scale);
    }
    let residual = residual_vs_j(&composite(&steps, g.n()));
    Ok(Factorization { steps, residual })
}

/// First-column vector of a circulant step matrix, with its discrete
/// Fourier transform.
///
/// Convention (used everywhere): W[i][j] = w[(i - j) mod n], so the support
/// S is the generator set plus 0 and fourier[j] = sum over s in S of
/// w[s] * omega^(-j s) with omega = exp(2 pi i / n). fourier[j] is the
/// eigenvalue of W on the Fourier vector f_j[v] = omega^(j v) / sqrt(n).
#[derive(Debug, Clone, PartialEq)]
pub struct CirculantVector {
    pub n: usize,
    /// Sorted offsets, always containing 0.
    pub support: Vec<usize>,
    /// Weights aligned with `support`.
    pub weights: Vec<f64>,
    pub fourier: Vec<Complex64>,
}

impl CirculantVector {
    pub fn new(n: usize, support: Vec<usize>, weights: Vec<f64>) -> Result<Self, FactorError> {
        if support.len() != weights.len() {
            return Err(FactorError::DimensionMismatch {
                expected: support.len(),
                got: weights.len(),
            });
        }
        if !support.contains(&0) {
            return Err(FactorError::MissingZeroOffset);
        }
        for &s in &support {
            if s >= n {
                return Err(FactorError::OffSupport { offset: s });
            }
        }
        let mut pairs: Vec<(usize, f64)> = support.into_iter().zip(weights).collect();
        pairs.sort_by_key(|&(s, _)| s);
        let support: Vec<usize> = pairs.iter().map(|&(s, _)| s).collect();
        let weights: Vec<f64> = pairs.iter().map(|&(_, w)| w).collect();
        let fourier = (0..n)
            .map(|j| {
                let mut acc = Complex64::new(0.0, 0.0);
                for (&s, &w) in support.iter().zip(&weights) {
                    let angle = -2.0 * PI * (j as f64) * (s as f64) / (n as f64);
                    acc += w * Complex64::new(libm::cos(angle), libm::sin(angle));
                }
                acc
            })
            .collect();
        Ok(CirculantVector {
            n,
            support,
            weights,
            fourier,
        })
    }

    pub fn weight_at(&self, offset: usize) -> f64 {
        self.support
            .iter()
            .position(|&s| s == offset)
            .map(|i| self.weights[i])
            .unwrap_or(0.0)
    }

    /// The circulant step matrix this vector generates.
    pub fn to_step_matrix(&self) -> StepMatrix {
        let mut w = StepMatrix::zeros(self.n);
        for (&s, &weight) in self.support.iter().zip(&self.weights) {
            if s == 0 {
                for d in w.diagonal_mut() {
                    *d = weight;
                }
            } else {
                for u in 0..self.n {
                    w.set_edge_weight(u, (u + s) % self.n, weight);
                }
            }
        }
        w
    }
}

/// Reduce circulant step matrices to their first-column vectors. Each input
/// must be exactly circulant and supported on `support` (which includes 0);
/// the first non-circulant entry is reported.
pub fn circulant_reduce(
    n: usize,
    support: &[usize],
    steps: &[StepMatrix],
) -> Result<Vec<CirculantVector>, FactorError> {
    if !support.contains(&0) {
        return Err(FactorError::MissingZeroOffset);
    }
    let support_set: Vec<usize> = {
        let mut s = support.to_vec();
        s.sort_unstable();
        s.dedup();
        s
    };
    let mut out = Vec::with_capacity(steps.len());
    for step in steps {
        if step.n() != n {
            return Err(FactorError::DimensionMismatch {
                expected: n,
                got: step.n(),
            });
        }
        let dense = step.to_dense();
        let mut w = vec![0.0; n];
        for (delta, slot) in w.iter_mut().enumerate() {
            *slot = dense[(delta, 0)];
        }
        for i in 0..n {
            for j in 0..n {
                if dense[(i, j)] != w[(i + n - j) % n] {
                    return Err(FactorError::NotCirculant { row: i, col: j });
                }
            }
        }
        for (delta, &weight) in w.iter().enumerate() {
            if weight != 0.0 && !support_set.contains(&delta) {
                return Err(FactorError::OffSupport { offset: delta });
            }
        }
        let weights: Vec<f64> = support_set.iter().map(|&s| w[s]).collect();
        out.push(CirculantVector::new(n, support_set.clone(), weights)?);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FourierCoverRow {
    /// Fourier index j in 1..n.
    pub index: usize,
    /// The step whose fourier component at j is smallest in magnitude.
    pub best_step: usize,
    pub min_abs: f64,
    pub covered: bool,
}

/// Per-frequency report: the circulant product equals J iff every
/// non-constant Fourier index is covered (some step's component vanishes)
/// and the product of the DC components equals n.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierCoverReport {
    pub rows: Vec<FourierCoverRow>,
    pub dc_product: f64,
    pub tol: f64,
    pub pass: bool,
}

pub fn fourier_cover_check(
    vectors: &[CirculantVector],
    tol: f64,
) -> Result<FourierCoverReport, FactorError> {
    let first = vectors.first().ok_or(FactorError::EmptyFactorList)?;
    let n = first.n;
    for v in vectors {
        if v.n != n || v.support != first.support {
            return Err(FactorError::Mismatch);
        }
    }
    let scale = tol * n as f64;
    let rows: Vec<FourierCoverRow> = (1..n)
        .map(|j| {
            let (best_step, min_abs) = vectors
                .iter()
                .enumerate()
                .map(|(k, v)| (k, v.fourier[j].norm()))
                .fold((0, f64::INFINITY), |(bk, bv), (k, v)| {
                    if v < bv {
                        (k, v)
                    } else {
                        (bk, bv)
                    }
                });
            FourierCoverRow {
                index: j,
                best_step,
                min_abs,
                covered: min_abs <= scale,
            }
        })
        .collect();
    let dc_product: f64 = vectors.iter().map(|v| v.fourier[0].re).product();
    let pass = rows.iter().all(|r| r.covered) && (dc_product - n as f64).abs() <= scale;
    Ok(FourierCoverReport {
        rows,
        dc_product,
        tol,
        pass,
    })
}

/// Fast necessary condition for any length-m factorization: the composite's
/// entry (u, v) can be nonzero only if a lazy walk of length m runs from v
/// to u, so every pair must be within distance m — i.e. m >= diameter.
pub fn reachability_lower_bound(g: &Graph) -> Result<usize, FactorError> {
    match metrics(g) {
        Connectivity::Connected(m) => Ok(m.diameter),
        Connectivity::Disconnected { from, to } => Err(FactorError::Disconnected { from, to }),
    }
}

/// Alternating-least-squares search outcome. `history` holds the residual
/// trajectory of each restart (first entry: residual of that restart's
/// initial factors); the best factorization across restarts is returned
/// regardless of convergence.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome {
    pub best: Factorization,
    pub history: Vec<Vec<f64>>,
    pub converged: bool,
    pub restarts: usize,
}

const SWEEPS_PER_RESTART: usize = 25;
const RIDGE: f64 = 1e-12;

/// Search for a length-`target_len` factorization of J by alternating
/// least squares over the masked step matrices, with seeded random
/// restarts. `budget` counts single-factor refits. A warm start, when
/// given, seeds the first restart.
pub fn search_factorization(
    g: &Graph,
    target_len: usize,
    budget: usize,
    seed: u64,
    warm_start: Option<&[StepMatrix]>,
) -> Result<SearchOutcome, FactorError> {
    if budget == 0 {
        return Err(FactorError::ZeroBudget);
    }
    let diameter = reachability_lower_bound(g)?;
    if target_len < diameter {
        return Err(FactorError::TargetBelowDiameter {
            target: target_len,
            diameter,
        });
    }
    if let Some(warm) = warm_start {
        if warm.len() != target_len {
            return Err(FactorError::DimensionMismatch {
                expected: target_len,
                got: warm.len(),
            });
        }
        for w in warm {
            validate_step(g, w)?;
        }
    }

    let n = g.n();
    // matrix coordinates of the free entries: diagonal then edges
    let positions: Vec<(usize, usize)> = (0..n)
        .map(|i| (i, i))
        .chain(g.edges().map(|(u, v)| (v, u)))
        .collect();
    let k = positions.len();
    let pass_tol = DEFAULT_RESIDUAL_TOL * n as f64;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut spent = 0usize;
    let mut history: Vec<Vec<f64>> = Vec::new();
    let mut best_steps: Option<Vec<DMatrix<f64>>> = None;
    let mut best_residual = f64::INFINITY;
    let mut converged = false;
    let mut restarts = 0usize;

    'outer: while spent < budget {
        let mut ws: Vec<DMatrix<f64>> = match warm_start {
            Some(warm) if restarts == 0 => warm.iter().map(|w| w.to_dense()).collect(),
            _ => (0..target_len)
                .map(|_| {
                    let mut w = DMatrix::zeros(n, n);
                    for &(r, c) in &positions {
                        w[(r, c)] = 2.0 * input::next_f64(&mut rng) - 1.0;
                    }
                    w
                })
                .collect(),
        };
        restarts += 1;
        let mut trajectory = Vec::new();
        let mut residual = dense_residual(&ws, n);
        trajectory.push(residual);
        if residual < best_residual {
            best_residual = residual;
            best_steps = Some(ws.clone());
        }
        if residual <= pass_tol {
            converged = true;
            history.push(trajectory);
            break 'outer;
        }

        for _sweep in 0..SWEEPS_PER_RESTART {
            for t in 0..target_len {
                if spent >= budget {
                    history.push(trajectory);
                    break 'outer;
                }
                spent += 1;
                refit_factor(&mut ws, t, &positions, k, n);
                residual = dense_residual(&ws, n);
                trajectory.push(residual);
                if residual < best_residual {
                    best_residual = residual;
                    best_steps = Some(ws.clone());
                }
                if residual <= pass_tol {
                    converged = true;
                    history.push(trajectory);
                    break 'outer;
                }
            }
        }
        history.push(trajectory);
    }

    let steps: Vec<StepMatrix> = best_steps
        .expect("at least one restart ran")
        .iter()
        .map(StepMatrix::from_dense)
        .collect();
    Ok(SearchOutcome {
        best: Factorization {
            steps,
            residual: best_residual,
        },
        history,
        converged,
        restarts,
    })
}

fn dense_residual(ws: &[DMatrix<f64>], n: usize) -> f64 {
    let product = ws.iter().fold(DMatrix::identity(n, n), |acc, w| w * acc);
    residual_vs_j(&product)
}

/// Exact solve of the masked least-squares subproblem for factor t, all
/// others fixed: minimize ||L W R - J||_F^2 + ridge ||W||^2 over the free
/// entries. The normal matrix factors through the Gram matrices of L and R.
fn refit_factor(
    ws: &mut [DMatrix<f64>],
    t: usize,
    positions: &[(usize, usize)],
    k: usize,
    n: usize,
) {
    let left = ws[t + 1..]
        .iter()
        .fold(DMatrix::identity(n, n), |acc, w| w * acc);
    let right = ws[..t]
        .iter()
        .fold(DMatrix::identity(n, n), |acc, w| w * acc);
    let gram_left = left.transpose() * &left;
    let gram_right = &right * right.transpose();
    let col_sums_left: Vec<f64> = (0..n).map(|r| left.column(r).sum()).collect();
    let row_sums_right: Vec<f64> = (0..n).map(|c| right.row(c).sum()).collect();

    let mut normal = DMatrix::zeros(k, k);
    for (p, &(rp, cp)) in positions.iter().enumerate() {
        for (q, &(rq, cq)) in positions.iter().enumerate() {
            normal[(p, q)] = gram_left[(rp, rq)] * gram_right[(cp, cq)];
        }
        normal[(p, p)] += RIDGE;
    }
    let rhs = DMatrix::from_fn(k, 1, |p, _| {
        let (r, c) = positions[p];
        col_sums_left[r] * row_sums_right[c]
    });

    let mut ridge = RIDGE;
    let solution = loop {
        match normal.clone().cholesky() {
            Some(chol) => break chol.solve(&rhs),
            None => {
                // bump the ridge until the normal matrix factors
                ridge *= 100.0;
                for p in 0..k {
                    normal[(p, p)] += ridge;
                }
            }
        }
    };
    let w = &mut ws[t];
    for (p, &(r, c)) in positions.iter().enumerate() {
        w[(r, c)] = solution[(p, 0)];
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymmetrizeReport {
    pub factorization: Factorization,
    pub residual_before: f64,
    pub residual_after: f64,
}

/// Project each factor of a circulant graph's factorization onto the
/// circulant subspace by averaging weights over each generator orbit.
/// Measures whether symmetric solutions exist near asymmetric ones.
pub fn cayley_symmetrize(g: &Graph, steps: &[StepMatrix]) -> Result<SymmetrizeReport, FactorError> {
    let generators = g
        .circulant_generators()
        .ok_or(FactorError::GraphNotCirculant)?;
    for w in steps {
        validate_step(g, w)?;
    }
    let n = g.n();
    let residual_before = residual_vs_j(&composite(steps, n));
    let projected: Vec<StepMatrix> = steps
        .iter()
        .map(|w| {
            let diag_mean = w.diagonal().iter().sum::<f64>() / n as f64;
            let mut out = StepMatrix::zeros(n);
            for d in out.diagonal_mut() {
                *d = diag_mean;
            }
            for &s in &generators {
                let mean = (0..n).map(|u| w.edge_weight(u, (u + s) % n)).sum::<f64>() / n as f64;
                for u in 0..n {
                    out.set_edge_weight(u, (u + s) % n, mean);
                }
            }
            out
        })
        .collect();
    let residual_after = residual_vs_j(&composite(&projected, n));
    Ok(SymmetrizeReport {
        factorization: Factorization {
            steps: projected,
            residual: residual_after,
        },
        residual_before,
        residual_after,
    })
}
