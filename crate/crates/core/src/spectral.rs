//! Adjacency spectra, Hoffman factor schedules, and Chebyshev polynomials.
//!
//! For a connected d-regular graph with m + 1 distinct adjacency eigenvalues,
//! the product of the m factors (A - lambda_t I) over the non-principal
//! distinct eigenvalues is a multiple of the all-ones matrix J; running those
//! factors as communication rounds and scaling by n / prod(d - lambda_t)
//! delivers the global sum in m rounds. This module computes the clustered
//! spectrum, the factor list and scale, and the degree-m polynomials with
//! p(0) = 1 that bound the diameter and drive the approximate-mean protocol.
//!
//! Distinct-eigenvalue counting is the one genuinely numerical step, so the
//! clustering tolerance is a mandatory, recorded parameter of every spectrum.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use num_complex::Complex64;

use crate::graph::Graph;

#[derive(Debug, Clone, PartialEq)]
pub enum SpectralError {
    NonPositiveTolerance,
    Irregular,
    /// Dense eigensolve needs a symmetric adjacency; directed graphs are
    /// supported only through the circulant closed form.
    Unsupported,
    /// Asymmetric circulant connection sets give complex eigenvalues; use
    /// `circulant_spectrum` and its complex-capable variant.
    ComplexEigenvalues,
    /// Top multiplicity above one: the graph is not connected.
    NotConnected { top_multiplicity: usize },
    /// d - lambda vanished for a non-principal eigenvalue.
    DegenerateFactor { lambda: f64 },
    /// The shifted interval touches zero; offending eigenvalue reported.
    NonNegativeShift { lambda: f64 },
    TooFewEigenvalues,
    EmptyConnectionSet,
    OffsetOutOfRange { offset: usize, n: usize },
}

impl fmt::Display for SpectralError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpectralError::NonPositiveTolerance => write!(f, "clustering tolerance must be > 0"),
            SpectralError::Irregular => write!(f, "graph is not regular"),
            SpectralError::Unsupported => {
                write!(f, "unsupported: symmetric spectra only (or circulant closed form)")
            }
            SpectralError::ComplexEigenvalues => {
                write!(f, "asymmetric connection set has complex eigenvalues")
            }
            SpectralError::NotConnected { top_multiplicity } => {
                write!(f, "principal eigenvalue has multiplicity {top_multiplicity}: graph disconnected")
            }
            SpectralError::DegenerateFactor { lambda } => {
                write!(f, "factor d - lambda degenerate at lambda = {lambda}")
            }
            SpectralError::NonNegativeShift { lambda } => {
                write!(f, "shifted eigenvalue {lambda} - d is not negative; graph disconnected?")
            }
            SpectralError::TooFewEigenvalues => write!(f, "spectrum needs at least 2 distinct eigenvalues"),
            SpectralError::EmptyConnectionSet => write!(f, "connection set is empty"),
            SpectralError::OffsetOutOfRange { offset, n } => {
                write!(f, "offset {offset} outside 1..{n}")
            }
        }
    }
}

/// One distinct eigenvalue with its clustered multiplicity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumEntry {
    pub value: f64,
    pub multiplicity: usize,
}

/// Distinct adjacency eigenvalues, sorted descending.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub entries: Vec<SpectrumEntry>,
    pub n: usize,
    pub degree: usize,
    /// Clustering tolerance used to merge computed eigenvalues.
    pub tol: f64,
    /// Gaps between consecutive distinct entries that fell within 10x tol of
    /// the merge threshold; nonempty means the distinct count is fragile.
    pub suspicious_gaps: Vec<f64>,
}

impl Spectrum {
    /// Number of distinct eigenvalues minus one.
    pub fn m(&self) -> usize {
        self.entries.len() - 1
    }

    pub fn distinct_count(&self) -> usize {
        self.entries.len()
    }
}

/// Clustered complex spectrum for asymmetric circulants.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSpectrum {
    pub entries: Vec<(Complex64, usize)>,
    pub n: usize,
    pub degree: usize,
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CirculantSpectrum {
    Real(Spectrum),
    /// Flagged complex-capable variant.
    Complex(ComplexSpectrum),
}

/// Default clustering tolerance for a degree-d graph.
pub fn default_tol(degree: usize) -> f64 {
    1e-8 * (degree.max(1) as f64)
}

fn cluster(mut values: Vec<f64>, n: usize, degree: usize, tol: f64) -> Spectrum {
    values.sort_by(|a, b| b.partial_cmp(a).expect("finite eigenvalues"));
    let mut entries: Vec<SpectrumEntry> = Vec::new();
    let mut start = 0;
    while start < values.len() {
        let mut end = start + 1;
        while end < values.len() && values[end - 1] - values[end] <= tol {
            end += 1;
        }
        let sum: f64 = values[start..end].iter().sum();
        entries.push(SpectrumEntry {
            value: sum / (end - start) as f64,
            multiplicity: end - start,
        });
        start = end;
    }
    let suspicious_gaps = entries
        .windows(2)
        .map(|w| w[0].value - w[1].value)
        .filter(|gap| *gap <= 10.0 * tol)
        .collect();
    Spectrum {
        entries,
        n,
        degree,
        tol,
        suspicious_gaps,
    }
}

/// Distinct eigenvalues of the adjacency matrix, clustered at `tol`.
///
/// Symmetric graphs use the dense symmetric eigensolver; directed circulants
/// fall back to the closed form and must have a real spectrum.
pub fn adjacency_spectrum(g: &Graph, tol: f64) -> Result<Spectrum, SpectralError> {
    if tol <= 0.0 {
        return Err(SpectralError::NonPositiveTolerance);
    }
    let degree = g.regular_degree().ok_or(SpectralError::Irregular)?;
    if g.is_symmetric() {
        let eig = g.adjacency_matrix().symmetric_eigen();
        let values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        Ok(cluster(values, g.n(), degree, tol))
    } else if let Some(gens) = g.circulant_generators() {
        match circulant_spectrum_with_tol(g.n(), &gens, tol)? {
            CirculantSpectrum::Real(s) => Ok(s),
            CirculantSpectrum::Complex(_) => Err(SpectralError::ComplexEigenvalues),
        }
    } else {
        Err(SpectralError::Unsupported)
    }
}

/// Closed-form circulant eigenvalues for the connection set `s` on Z_n,
/// clustered at the default tolerance.
pub fn circulant_spectrum(n: usize, s: &[usize]) -> Result<CirculantSpectrum, SpectralError> {
    circulant_spectrum_with_tol(n, s, default_tol(s.len()))
}

pub fn circulant_spectrum_with_tol(
    n: usize,
    s: &[usize],
    tol: f64,
) -> Result<CirculantSpectrum, SpectralError> {
    if tol <= 0.0 {
        return Err(SpectralError::NonPositiveTolerance);
    }
    if s.is_empty() {
        return Err(SpectralError::EmptyConnectionSet);
    }
    // the connection set is a set: collapse duplicates
    let mut s: Vec<usize> = s.to_vec();
    s.sort_unstable();
    s.dedup();
    for &offset in &s {
        if offset == 0 || offset >= n {
            return Err(SpectralError::OffsetOutOfRange { offset, n });
        }
    }
    let values: Vec<Complex64> = (0..n).map(|j| circulant_eigenvalue(n, &s, j)).collect();
    if values.iter().all(|v| v.im.abs() <= tol) {
        let re: Vec<f64> = values.iter().map(|v| v.re).collect();
        Ok(CirculantSpectrum::Real(cluster(re, n, s.len(), tol)))
    } else {
        Ok(CirculantSpectrum::Complex(cluster_complex(values, n, s.len(), tol)))
    }
}

/// lambda_j = sum over offsets s of omega^(-j s), omega = exp(2 pi i / n).
/// As a multiset over j this equals the opposite sign convention (j <-> n-j).
fn circulant_eigenvalue(n: usize, s: &[usize], j: usize) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for &offset in s {
        let angle = -2.0 * PI * (j as f64) * (offset as f64) / (n as f64);
        acc += Complex64::new(libm::cos(angle), libm::sin(angle));
    }
    acc
}

fn cluster_complex(values: Vec<Complex64>, n: usize, degree: usize, tol: f64) -> ComplexSpectrum {
    let mut values = values;
    values.sort_by(|a, b| {
        (b.re, b.im)
            .partial_cmp(&(a.re, a.im))
            .expect("finite eigenvalues")
    });
    let mut entries: Vec<(Complex64, usize)> = Vec::new();
    for v in values {
        match entries.last_mut() {
            Some((rep, count)) if (*rep - v).norm() <= tol => {
                *rep = (*rep * (*count as f64) + v) / (*count as f64 + 1.0);
                *count += 1;
            }
            _ => entries.push((v, 1)),
        }
    }
    ComplexSpectrum {
        entries,
        n,
        degree,
        tol,
    }
}

/// The m non-principal distinct eigenvalues (descending) and the scale
/// n / prod(d - lambda_t) that turns the factor-product output into the sum.
#[derive(Debug, Clone, PartialEq)]
pub struct HoffmanFactors {
    pub lambdas: Vec<f64>,
    pub scale: f64,
}

pub fn hoffman_factors(spec: &Spectrum) -> Result<HoffmanFactors, SpectralError> {
    let top = spec.entries.first().ok_or(SpectralError::TooFewEigenvalues)?;
    if top.multiplicity != 1 {
        return Err(SpectralError::NotConnected {
            top_multiplicity: top.multiplicity,
        });
    }
    let d = spec.degree as f64;
    let lambdas: Vec<f64> = spec.entries[1..].iter().map(|e| e.value).collect();
    let mut product = 1.0;
    for &lambda in &lambdas {
        let factor = d - lambda;
        if factor.abs() <= spec.tol.max(1e-12) {
            return Err(SpectralError::DegenerateFactor { lambda });
        }
        product *= factor;
    }
    Ok(HoffmanFactors {
        lambdas,
        scale: spec.n as f64 / product,
    })
}

/// Order values for numerically stable Newton-style factor products: start
/// from the largest magnitude, then repeatedly append the value with the
/// largest distance product to those already chosen (Leja ordering).
///
/// The factors (A - lambda_t I) commute, so ordering cannot change the
/// exact result, but it dominates floating-point behavior: monotone
/// orderings let intermediate products grow exponentially with the factor
/// count (a cycle of length 64 loses all accuracy), while Leja ordering
/// keeps them bounded.
pub fn leja_order(values: &[f64]) -> Vec<f64> {
    let mut remaining: Vec<f64> = values.to_vec();
    let mut out: Vec<f64> = Vec::with_capacity(values.len());
    while !remaining.is_empty() {
        let key = |x: f64| -> f64 {
            if out.is_empty() {
                x.abs()
            } else {
                out.iter().map(|o| (x - o).abs()).product()
            }
        };
        let best = remaining
            .iter()
            .enumerate()
            .max_by(|(_, a), (_, b)| key(**a).partial_cmp(&key(**b)).expect("finite eigenvalues"))
            .map(|(i, _)| i)
            .expect("nonempty");
        out.push(remaining.remove(best));
    }
    out
}

/// Polynomial in monomial coefficients c_0..c_m.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<f64>) -> Self {
        assert!(!coeffs.is_empty(), "polynomial needs at least one coefficient");
        Polynomial { coeffs }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for &c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    fn mul_affine(&self, c0: f64, c1: f64) -> Polynomial {
        // self * (c0 + c1 x)
        let mut out = vec![0.0; self.coeffs.len() + 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            out[i] += c0 * a;
            out[i + 1] += c1 * a;
        }
        Polynomial { coeffs: out }
    }

    fn sub(&self, other: &Polynomial) -> Polynomial {
        let len = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![0.0; len];
        for (i, &a) in self.coeffs.iter().enumerate() {
            out[i] += a;
        }
        for (i, &b) in other.coeffs.iter().enumerate() {
            out[i] -= b;
        }
        Polynomial { coeffs: out }
    }
}

/// Interval endpoints for the shifted non-principal spectrum,
/// [a, b] = [lambda_min - d, lambda_2 - d], with b < 0 for connected graphs.
pub(crate) fn shifted_interval(spec: &Spectrum) -> Result<(f64, f64), SpectralError> {
    if spec.entries.len() < 2 {
        return Err(SpectralError::TooFewEigenvalues);
    }
    let d = spec.degree as f64;
    let lambda2 = spec.entries[1].value;
    let lambda_min = spec.entries.last().unwrap().value;
    let b = lambda2 - d;
    if b >= 0.0 {
        return Err(SpectralError::NonNegativeShift { lambda: lambda2 });
    }
    Ok((lambda_min - d, b))
}

/// Degree-m polynomial with p(0) = 1 minimizing the sup over the shifted
/// non-principal interval: the scaled-and-shifted Chebyshev polynomial
/// p(x) = T_m((2x - a - b) / (b - a)) / T_m((-a - b) / (b - a)).
///
/// A degenerate interval (two distinct eigenvalues) uses (1 - x/a)^m, which
/// annihilates the single shifted eigenvalue exactly.
pub fn chebyshev_polynomial(spec: &Spectrum, m: usize) -> Result<Polynomial, SpectralError> {
    if m == 0 {
        return Ok(Polynomial::new(vec![1.0]));
    }
    let (a, b) = shifted_interval(spec)?;
    if b - a <= 1e-12 * a.abs().max(1.0) {
        let mut p = Polynomial::new(vec![1.0]);
        for _ in 0..m {
            p = p.mul_affine(1.0, -1.0 / a);
        }
        return Ok(p);
    }
    // T_k of the affine map ell(x) = (2x - a - b) / (b - a), by the
    // three-term recurrence on polynomial coefficients.
    let ell = Polynomial::new(vec![(-a - b) / (b - a), 2.0 / (b - a)]);
    let mut t_prev = Polynomial::new(vec![1.0]);
    let mut t_curr = ell.clone();
    for _ in 1..m {
        let next = t_curr.mul_affine(2.0 * ell.coeffs[0], 2.0 * ell.coeffs[1]).sub(&t_prev);
        t_prev = t_curr;
        t_curr = next;
    }
    // normalize by the constant term so that p(0) = 1 exactly
    let c0 = t_curr.coeffs[0];
    Ok(Polynomial::new(t_curr.coeffs.iter().map(|c| c / c0).collect()))
}

/// max over non-principal distinct eigenvalues of |p(lambda - d)|.
///
/// For p with p(0) = 1 this equals the operator norm of p(A - dI) - J/n,
/// because all matrices involved share an eigenbasis and the principal
/// direction contributes p(0) - 1 = 0.
pub fn offdiagonal_norm(p: &Polynomial, spec: &Spectrum) -> f64 {
    let d = spec.degree as f64;
    spec.entries[1..]
        .iter()
        .map(|e| p.eval(e.value - d).abs())
        .fold(0.0, f64::max)
}

/// Smallest m whose Chebyshev polynomial has off-principal norm < 1/(n-1);
/// the graph diameter is at most this m.
pub fn diameter_bound(spec: &Spectrum) -> Result<usize, SpectralError> {
    if spec.n <= 1 {
        return Ok(0);
    }
    let threshold = 1.0 / (spec.n as f64 - 1.0);
    let cap = 4 * spec.n + 16;
    for m in 0..=cap {
        let p = chebyshev_polynomial(spec, m)?;
        if offdiagonal_norm(&p, spec) < threshold {
            return Ok(m);
        }
    }
    // Chebyshev norms decay geometrically on a negative interval, so the
    // loop above always returns for connected spectra.
    unreachable!("chebyshev norm did not decay below 1/(n-1) within {cap} degrees")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_family, CayleySpec};
    use approx::assert_relative_eq;

    fn spectrum_of(spec: &CayleySpec) -> Spectrum {
        let g = build_family(spec).unwrap();
        let d = g.regular_degree().unwrap();
        adjacency_spectrum(&g, default_tol(d)).unwrap()
    }

    fn entries(s: &Spectrum) -> Vec<(f64, usize)> {
        s.entries.iter().map(|e| (e.value, e.multiplicity)).collect()
    }

    #[test]
    fn petersen_spectrum() {
        let s = spectrum_of(&CayleySpec::Petersen);
        let e = entries(&s);
        assert_eq!(s.m(), 2);
        assert_eq!(e.len(), 3);
        assert_relative_eq!(e[0].0, 3.0, epsilon = 1e-9);
        assert_eq!(e[0].1, 1);
        assert_relative_eq!(e[1].0, 1.0, epsilon = 1e-9);
        assert_eq!(e[1].1, 5);
        assert_relative_eq!(e[2].0, -2.0, epsilon = 1e-9);
        assert_eq!(e[2].1, 4);
    }

    #[test]
    fn complete4_spectrum() {
        let s = spectrum_of(&CayleySpec::Complete { n: 4 });
        let e = entries(&s);
        assert_eq!(s.m(), 1);
        assert_relative_eq!(e[0].0, 3.0, epsilon = 1e-9);
        assert_relative_eq!(e[1].0, -1.0, epsilon = 1e-9);
        assert_eq!(e[1].1, 3);
    }

    /// Tensor-power oracle: hypercube eigenvalues are d - 2*popcount(v) with
    /// binomial multiplicities.
    fn hypercube_oracle(dim: usize) -> Vec<(f64, usize)> {
        let mut mults = vec![0usize; dim + 1];
        for v in 0..(1usize << dim) {
            mults[v.count_ones() as usize] += 1;
        }
        (0..=dim)
            .map(|k| (dim as f64 - 2.0 * k as f64, mults[k]))
            .collect()
    }

    #[test]
    fn hypercube_spectrum_matches_tensor_oracle() {
        for dim in 1..=5 {
            let s = spectrum_of(&CayleySpec::Hypercube { dim });
            let oracle = hypercube_oracle(dim);
            assert_eq!(s.distinct_count(), oracle.len(), "dim {dim}");
            for (got, want) in s.entries.iter().zip(oracle.iter()) {
                assert_relative_eq!(got.value, want.0, epsilon = 1e-9);
                assert_eq!(got.multiplicity, want.1, "dim {dim}");
            }
        }
    }

    #[test]
    fn multiplicities_sum_to_n_and_bounded_by_degree() {
        for spec in [
            CayleySpec::Cycle { n: 9 },
            CayleySpec::Hypercube { dim: 4 },
            CayleySpec::Petersen,
            CayleySpec::Complete { n: 7 },
        ] {
            let s = spectrum_of(&spec);
            let total: usize = s.entries.iter().map(|e| e.multiplicity).sum();
            assert_eq!(total, s.n);
            assert_eq!(s.entries[0].multiplicity, 1);
            for e in &s.entries {
                assert!(e.value.abs() <= s.degree as f64 + 1e-9);
            }
        }
    }

    #[test]
    fn circulant_c5_closed_form() {
        let s = match circulant_spectrum(5, &[1, 4]).unwrap() {
            CirculantSpectrum::Real(s) => s,
            CirculantSpectrum::Complex(_) => panic!("C5 spectrum is real"),
        };
        let e = entries(&s);
        assert_eq!(e.len(), 3);
        assert_relative_eq!(e[0].0, 2.0, epsilon = 1e-9);
        assert_eq!(e[0].1, 1);
        assert_relative_eq!(e[1].0, 0.6180339887498949, epsilon = 1e-9);
        assert_eq!(e[1].1, 2);
        assert_relative_eq!(e[2].0, -1.618033988749895, epsilon = 1e-9);
        assert_eq!(e[2].1, 2);
    }

    #[test]
    fn circulant_c4_and_c6() {
        let s4 = match circulant_spectrum(4, &[1, 3]).unwrap() {
            CirculantSpectrum::Real(s) => s,
            _ => panic!(),
        };
        assert_eq!(s4.m(), 2);
        assert_eq!(entries(&s4)[1].1, 2); // eigenvalue 0 twice

        let s6 = match circulant_spectrum(6, &[1, 5]).unwrap() {
            CirculantSpectrum::Real(s) => s,
            _ => panic!(),
        };
        assert_eq!(s6.m(), 3);
        let vals: Vec<f64> = s6.entries.iter().map(|e| e.value).collect();
        for (got, want) in vals.iter().zip([2.0, 1.0, -1.0, -2.0]) {
            assert_relative_eq!(*got, want, epsilon = 1e-9);
        }
    }

    #[test]
    fn circulant_matches_dense_on_symmetric_circulants() {
        for n in 3usize..=32 {
            for conns in [vec![1, n - 1], vec![1, 2, n - 2, n - 1]] {
                let g = build_family(&CayleySpec::Circulant {
                    n,
                    connections: conns.clone(),
                })
                .unwrap();
                let tol = default_tol(conns.len());
                let dense = adjacency_spectrum(&g, tol).unwrap();
                let closed = match circulant_spectrum_with_tol(n, &conns, tol).unwrap() {
                    CirculantSpectrum::Real(s) => s,
                    _ => panic!("symmetric set must be real"),
                };
                assert_eq!(dense.distinct_count(), closed.distinct_count(), "n={n}");
                for (a, b) in dense.entries.iter().zip(closed.entries.iter()) {
                    assert_relative_eq!(a.value, b.value, epsilon = 1e-9);
                    assert_eq!(a.multiplicity, b.multiplicity);
                }
            }
        }
    }

    #[test]
    fn asymmetric_circulant_is_complex_flagged() {
        match circulant_spectrum(5, &[1]).unwrap() {
            CirculantSpectrum::Complex(c) => {
                assert_eq!(c.entries.iter().map(|e| e.1).sum::<usize>(), 5);
            }
            CirculantSpectrum::Real(_) => panic!("directed C5 has complex eigenvalues"),
        }
    }

    #[test]
    fn directed_circulant_with_real_spectrum_unsupported_only_when_complex() {
        // directed triangle: eigenvalues are the cube roots of unity scaled — complex
        let g = build_family(&CayleySpec::Circulant {
            n: 3,
            connections: vec![1],
        })
        .unwrap();
        assert_eq!(
            adjacency_spectrum(&g, 1e-8),
            Err(SpectralError::ComplexEigenvalues)
        );
    }

    #[test]
    fn hoffman_factors_named_values() {
        // complete(n): lambdas = [-1], scale = 1
        let s = spectrum_of(&CayleySpec::Complete { n: 6 });
        let h = hoffman_factors(&s).unwrap();
        assert_eq!(h.lambdas.len(), 1);
        assert_relative_eq!(h.lambdas[0], -1.0, epsilon = 1e-9);
        assert_relative_eq!(h.scale, 1.0, epsilon = 1e-9);

        // petersen: scale = 10 / ((3-1)(3+2)) = 1
        let s = spectrum_of(&CayleySpec::Petersen);
        let h = hoffman_factors(&s).unwrap();
        assert_eq!(h.lambdas.len(), 2);
        assert_relative_eq!(h.scale, 1.0, epsilon = 1e-9);

        // cycle(5): cyclotomic identity gives scale 1
        let s = spectrum_of(&CayleySpec::Cycle { n: 5 });
        let h = hoffman_factors(&s).unwrap();
        assert_relative_eq!(h.scale, 1.0, epsilon = 1e-9);
        assert_relative_eq!(h.lambdas[0], 0.6180339887498949, epsilon = 1e-8);
        assert_relative_eq!(h.lambdas[1], -1.618033988749895, epsilon = 1e-8);
    }

    #[test]
    fn hoffman_rejects_disconnected() {
        let g = build_family(&CayleySpec::Product(
            Box::new(CayleySpec::Cycle { n: 4 }),
            Box::new(CayleySpec::Cycle { n: 4 }),
        ))
        .unwrap();
        let mut s = adjacency_spectrum(&g, 1e-8).unwrap();
        // forge a disconnected-looking spectrum
        s.entries[0].multiplicity = 2;
        assert!(matches!(
            hoffman_factors(&s),
            Err(SpectralError::NotConnected { top_multiplicity: 2 })
        ));
    }

    #[test]
    fn chebyshev_complete_graph_exact() {
        // p_1(x) = 1 + x/n for K_n
        let s = spectrum_of(&CayleySpec::Complete { n: 4 });
        let p = chebyshev_polynomial(&s, 1).unwrap();
        assert_eq!(p.degree(), 1);
        assert_relative_eq!(p.coeffs()[0], 1.0, epsilon = 1e-12);
        assert_relative_eq!(p.coeffs()[1], 0.25, epsilon = 1e-12);
        assert_relative_eq!(offdiagonal_norm(&p, &s), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn chebyshev_petersen_frozen_values() {
        // shifted interval [-5, -2]; 1/T_2(7/3) = 9/89; 1/T_1(7/3) = 3/7
        let s = spectrum_of(&CayleySpec::Petersen);
        let p2 = chebyshev_polynomial(&s, 2).unwrap();
        assert_relative_eq!(p2.eval(0.0), 1.0, epsilon = 1e-12);
        assert_relative_eq!(offdiagonal_norm(&p2, &s), 9.0 / 89.0, epsilon = 1e-10);
        let p1 = chebyshev_polynomial(&s, 1).unwrap();
        assert_relative_eq!(offdiagonal_norm(&p1, &s), 3.0 / 7.0, epsilon = 1e-10);
    }

    #[test]
    fn chebyshev_degree_zero_is_identity() {
        let s = spectrum_of(&CayleySpec::Petersen);
        let p = chebyshev_polynomial(&s, 0).unwrap();
        assert_eq!(p.coeffs(), &[1.0]);
        assert_relative_eq!(offdiagonal_norm(&p, &s), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn diameter_bound_values() {
        assert_eq!(diameter_bound(&spectrum_of(&CayleySpec::Petersen)).unwrap(), 2);
        assert_eq!(diameter_bound(&spectrum_of(&CayleySpec::Complete { n: 4 })).unwrap(), 1);
        // C5: 1/T_2 on [2cos(4pi/5)-2, 2cos(2pi/5)-2] is 1/9 < 1/4
        assert_eq!(diameter_bound(&spectrum_of(&CayleySpec::Cycle { n: 5 })).unwrap(), 2);
    }

    #[test]
    fn diameter_bound_dominates_bfs_diameter() {
        use crate::graph::metrics;
        for spec in [
            CayleySpec::Cycle { n: 7 },
            CayleySpec::Cycle { n: 10 },
            CayleySpec::Hypercube { dim: 4 },
            CayleySpec::Petersen,
            CayleySpec::Complete { n: 5 },
        ] {
            let g = build_family(&spec).unwrap();
            let d = metrics(&g).connected().unwrap().diameter;
            let s = spectrum_of(&spec);
            let bound = diameter_bound(&s).unwrap();
            assert!(d <= bound, "{spec}: D={d} bound={bound}");
            assert!(s.m() >= d, "{spec}: m={} D={d}", s.m());
        }
    }

    /// The scalar norm equals the operator norm of p(A - dI) - J/n because
    /// everything shares the adjacency eigenbasis; check against a dense
    /// evaluation and an SVD.
    #[test]
    fn offdiagonal_norm_matches_dense_operator_norm() {
        use nalgebra::DMatrix;
        for (spec, degrees) in [
            (CayleySpec::Petersen, vec![1, 2, 3]),
            (CayleySpec::Cycle { n: 12 }, vec![2, 4, 6]),
            (CayleySpec::Hypercube { dim: 4 }, vec![1, 3]),
            (CayleySpec::Complete { n: 8 }, vec![1, 2]),
        ] {
            let g = build_family(&spec).unwrap();
            let n = g.n();
            let d = g.regular_degree().unwrap() as f64;
            let s = adjacency_spectrum(&g, default_tol(d as usize)).unwrap();
            let shifted = g.adjacency_matrix() - DMatrix::from_diagonal_element(n, n, d);
            for m in degrees {
                let p = chebyshev_polynomial(&s, m).unwrap();
                // Horner evaluation of p at the shifted adjacency
                let mut value = DMatrix::zeros(n, n);
                for &c in p.coeffs().iter().rev() {
                    value = &value * &shifted + DMatrix::from_diagonal_element(n, n, c);
                }
                let deviation = value - DMatrix::from_element(n, n, 1.0 / n as f64);
                let operator_norm = deviation.svd(false, false).singular_values[0];
                let scalar_norm = offdiagonal_norm(&p, &s);
                assert!(
                    (operator_norm - scalar_norm).abs() <= 1e-8,
                    "{spec} m={m}: {operator_norm} vs {scalar_norm}"
                );
            }
        }
    }

    #[test]
    fn leja_order_is_a_permutation_starting_at_max_magnitude() {
        let values = [1.0, -2.0, 0.5, -0.5, 1.8];
        let ordered = leja_order(&values);
        assert_eq!(ordered.len(), values.len());
        assert_eq!(ordered[0], -2.0);
        let mut a = ordered.clone();
        let mut b = values.to_vec();
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        assert_eq!(a, b);
    }

    #[test]
    fn tolerance_insensitivity_on_named_families() {
        for spec in [
            CayleySpec::Cycle { n: 31 },
            CayleySpec::Cycle { n: 64 },
            CayleySpec::Hypercube { dim: 6 },
            CayleySpec::Petersen,
            CayleySpec::Complete { n: 64 },
        ] {
            let g = build_family(&spec).unwrap();
            let counts: Vec<usize> = [1e-9, 1e-8, 1e-7, 1e-6]
                .iter()
                .map(|&tol| adjacency_spectrum(&g, tol).unwrap().distinct_count())
                .collect();
            assert!(counts.windows(2).all(|w| w[0] == w[1]), "{spec}: {counts:?}");
        }
    }
}
