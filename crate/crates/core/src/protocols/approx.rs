//! Certified approximate mean in m rounds via the Chebyshev recurrence.

use alloc::vec;
use alloc::vec::Vec;

use crate::engine::{Emission, Protocol, Received, Target};
use crate::graph::Graph;
use crate::protocols::ProtocolError;
use crate::spectral::{
    chebyshev_polynomial, offdiagonal_norm, shifted_interval, Polynomial, Spectrum,
};

/// Computes y = p_m(A - dI) x in exactly m communication rounds, where p_m
/// is the degree-m polynomial with p_m(0) = 1 from the spectral module. Each
/// recurrence step is one multiplication by (a shifted-scaled) A, i.e. one
/// round. The result approximates the mean with the certificate
/// `||y - mean*1|| <= certificate * ||x||`; the certificate carries the
/// guarantee exactly when it is below 1/(n-1).
///
/// With m = 0 the protocol returns the input unchanged, the certificate is
/// 1, and `certified` is false.
pub struct ApproxMeanProtocol {
    rounds: usize,
    // per-round z_next = alpha * (sum of received) + beta * z + gamma * z_prev
    alpha: Vec<f64>,
    beta: Vec<f64>,
    gamma: Vec<f64>,
    final_scale: f64,
    out_adj: Vec<Vec<usize>>,
    polynomial: Polynomial,
    certificate: f64,
    certified: bool,
}

impl ApproxMeanProtocol {
    pub fn new(g: &Graph, spec: &Spectrum, m: usize) -> Result<Self, ProtocolError> {
        if spec.n != g.n() {
            return Err(ProtocolError::SpectrumMismatch {
                expected_n: g.n(),
                got_n: spec.n,
            });
        }
        let polynomial = chebyshev_polynomial(spec, m)?;
        let certificate = offdiagonal_norm(&polynomial, spec);
        let certified = spec.n > 1 && certificate < 1.0 / (spec.n as f64 - 1.0);
        let d = spec.degree as f64;

        let mut alpha = Vec::with_capacity(m);
        let mut beta = Vec::with_capacity(m);
        let mut gamma = Vec::with_capacity(m);
        let mut final_scale = 1.0;
        if m > 0 {
            let (a, b) = shifted_interval(spec)?;
            if b - a <= 1e-12 * a.abs().max(1.0) {
                // single shifted eigenvalue: iterate z <- (I - (A - dI)/a) z
                for _ in 0..m {
                    alpha.push(-1.0 / a);
                    beta.push(1.0 + d / a);
                    gamma.push(0.0);
                }
            } else {
                // z_1 = ell(B) x; z_{k+1} = 2 ell(B) z_k - z_{k-1};
                // ell(B) = (2A - (2d + a + b) I) / (b - a)
                let width = b - a;
                alpha.push(2.0 / width);
                beta.push(-(2.0 * d + a + b) / width);
                gamma.push(0.0);
                for _ in 1..m {
                    alpha.push(4.0 / width);
                    beta.push(-2.0 * (2.0 * d + a + b) / width);
                    gamma.push(-1.0);
                }
                // T_m at ell(0), by the scalar recurrence
                let ell0 = (-a - b) / width;
                let mut t_prev = 1.0;
                let mut t_curr = ell0;
                for _ in 1..m {
                    let next = 2.0 * ell0 * t_curr - t_prev;
                    t_prev = t_curr;
                    t_curr = next;
                }
                final_scale = 1.0 / t_curr;
            }
        }
        Ok(ApproxMeanProtocol {
            rounds: m,
            alpha,
            beta,
            gamma,
            final_scale,
            out_adj: (0..g.n()).map(|v| g.out_neighbors(v).to_vec()).collect(),
            polynomial,
            certificate,
            certified,
        })
    }

    /// Off-principal norm of the applied polynomial: the factor epsilon in
    /// `||y - mean*1|| <= epsilon * ||x||`.
    pub fn certificate(&self) -> f64 {
        self.certificate
    }

    /// True iff the certificate is below 1/(n-1).
    pub fn certified(&self) -> bool {
        self.certified
    }

    pub fn polynomial(&self) -> &Polynomial {
        &self.polynomial
    }
}

impl Protocol for ApproxMeanProtocol {
    fn name(&self) -> &str {
        "approx"
    }

    fn technique(&self) -> &str {
        "chebyshev-approximate-mean"
    }

    fn rounds(&self) -> usize {
        self.rounds
    }

    fn target(&self) -> Target {
        Target::Mean
    }

    fn init_state(&self, _vertex: usize, input: f64) -> Vec<f64> {
        // [z_prev, z_curr]
        vec![0.0, input]
    }

    fn emit(&self, _round: usize, vertex: usize, state: &[f64]) -> Vec<Emission> {
        self.out_adj[vertex]
            .iter()
            .map(|&to| Emission {
                to,
                value: state[1],
            })
            .collect()
    }

    fn absorb(&self, round: usize, _vertex: usize, state: &mut Vec<f64>, received: &[Received]) {
        let sum: f64 = received.iter().map(|r| r.value).sum();
        let k = round - 1;
        let z_next = self.alpha[k] * sum + self.beta[k] * state[1] + self.gamma[k] * state[0];
        state[0] = state[1];
        state[1] = z_next;
    }

    fn finalize(&self, _vertex: usize, state: &[f64]) -> f64 {
        state[1] * self.final_scale
    }
}
