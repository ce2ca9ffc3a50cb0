//! Finite sums `sum_k c_k exp(i W(h_k))` of Gaussian exponentials over an
//! isonormal process `W` on `R^d`.
//!
//! The span of these exponentials is weak* dense in `L^inf(Omega)` and is
//! closed under products (`W` is linear), adjoints and second quantization,
//! so every identity of the crossed-product construction can be evaluated
//! exactly on it. Expectations use `E exp(i W(h)) = exp(-||h||^2 / 2)`;
//! [`mc_expectation`] realizes `W(h) = sum_i gamma_i h_i` with independent
//! standard normals as an independent check.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::C64;

/// Frequencies closer than this in every coordinate are merged.
pub const FREQ_TOL: f64 = 1e-12;
/// Coefficients below this modulus are dropped after merging.
pub const COEFF_EPS: f64 = 1e-15;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Term {
    pub coeff: C64,
    pub freq: Vec<f64>,
}

/// Canonical form: frequencies sorted lexicographically, no two within
/// [`FREQ_TOL`], no coefficient below [`COEFF_EPS`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GaussExp {
    dim: usize,
    terms: Vec<Term>,
}

impl GaussExp {
    pub fn zero(dim: usize) -> Self {
        GaussExp { dim, terms: Vec::new() }
    }

    pub fn constant(dim: usize, c: C64) -> Self {
        Self::from_terms(dim, vec![Term { coeff: c, freq: vec![0.0; dim] }]).expect("dimension is consistent")
    }

    pub fn one(dim: usize) -> Self {
        Self::constant(dim, C64::new(1.0, 0.0))
    }

    /// `exp(i W(h))`.
    pub fn exponential(freq: &[f64]) -> Self {
        Self::from_terms(freq.len(), vec![Term { coeff: C64::new(1.0, 0.0), freq: freq.to_vec() }])
            .expect("dimension is consistent")
    }

    pub fn from_terms(dim: usize, terms: Vec<Term>) -> Result<Self> {
        if let Some(t) = terms.iter().find(|t| t.freq.len() != dim) {
            return Err(Error::DimensionMismatch { left: t.freq.len(), right: dim });
        }
        Ok(GaussExp { dim, terms: canonicalize(terms) })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim == other.dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { left: self.dim, right: other.dim })
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn mul_unchecked(&self, other: &Self) -> Self {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                let freq = a.freq.iter().zip(&b.freq).map(|(x, y)| x + y).collect();
                terms.push(Term { coeff: a.coeff * b.coeff, freq });
            }
        }
        GaussExp { dim: self.dim, terms: canonicalize(terms) }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(self.add_unchecked(other))
    }

    pub(crate) fn add_unchecked(&self, other: &Self) -> Self {
        let terms = self.terms.iter().chain(&other.terms).cloned().collect();
        GaussExp { dim: self.dim, terms: canonicalize(terms) }
    }

    pub fn scale(&self, c: C64) -> Self {
        let terms = self.terms.iter().map(|t| Term { coeff: t.coeff * c, freq: t.freq.clone() }).collect();
        GaussExp { dim: self.dim, terms: canonicalize(terms) }
    }

    /// `(c exp(i W(h)))* = conj(c) exp(i W(-h))`.
    pub fn adjoint(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| Term { coeff: t.coeff.conj(), freq: t.freq.iter().map(|x| -x).collect() })
            .collect();
        GaussExp { dim: self.dim, terms: canonicalize(terms) }
    }

    /// `sum_k c_k exp(-||h_k||^2 / 2)`.
    pub fn expectation(&self) -> C64 {
        self.terms.iter().map(|t| t.coeff * (-0.5 * t.freq.iter().map(|x| x * x).sum::<f64>()).exp()).sum()
    }

    /// Multiplies every frequency by the matrix `u` without checking it.
    pub(crate) fn map_frequencies(&self, u: &DMatrix<f64>) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let h = u * DVector::from_column_slice(&t.freq);
                Term { coeff: t.coeff, freq: h.iter().copied().collect() }
            })
            .collect();
        GaussExp { dim: self.dim, terms: canonicalize(terms) }
    }

    /// Sum of coefficient moduli of `self - other`; bounds the sup-norm of
    /// the difference. Frequencies that disagree beyond [`FREQ_TOL`] count
    /// as distinct terms.
    pub fn distance(&self, other: &Self) -> f64 {
        if self.dim != other.dim {
            return f64::INFINITY;
        }
        let diff = self.add_unchecked(&other.scale(C64::new(-1.0, 0.0)));
        diff.terms.iter().map(|t| t.coeff.norm()).sum()
    }

    /// `sum_k |c_k|`, the bound on `|expectation|` and on the sup-norm.
    pub fn coefficient_norm(&self) -> f64 {
        self.terms.iter().map(|t| t.coeff.norm()).sum()
    }
}

fn same_freq(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= FREQ_TOL)
}

fn canonicalize(terms: Vec<Term>) -> Vec<Term> {
    let mut merged: Vec<Term> = Vec::with_capacity(terms.len());
    for t in terms {
        match merged.iter_mut().find(|m| same_freq(&m.freq, &t.freq)) {
            Some(m) => m.coeff += t.coeff,
            None => merged.push(t),
        }
    }
    merged.retain(|t| t.coeff.norm() >= COEFF_EPS);
    for t in &mut merged {
        for x in &mut t.freq {
            if *x == 0.0 {
                *x = 0.0; // drop negative zero
            }
        }
    }
    merged.sort_by(|a, b| {
        a.freq.iter().zip(&b.freq).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal)
    });
    merged
}

/// `Gamma(u) exp(i W(h)) = exp(i W(u h))` for orthogonal `u`.
pub fn second_quantization(u: &DMatrix<f64>, a: &GaussExp) -> Result<GaussExp> {
    if u.shape() != (a.dim, a.dim) {
        return Err(Error::DimensionMismatch { left: u.nrows(), right: a.dim });
    }
    let defect = crate::linalg::orthogonality_defect(u);
    if defect > 1e-10 {
        return Err(Error::NotOrthogonal(defect));
    }
    Ok(a.map_frequencies(u))
}

/// `<a, b> = E(a* b)`.
pub fn l2_inner(a: &GaussExp, b: &GaussExp) -> Result<C64> {
    Ok(a.adjoint().mul(b)?.expectation())
}

/// Draws `n` independent standard normal vectors in `R^dim`, reproducibly
/// from `seed`.
#[derive(Debug, Clone)]
pub struct GaussianSampler {
    dim: usize,
    samples: usize,
    seed: u64,
}

impl GaussianSampler {
    pub fn new(dim: usize, samples: usize, seed: u64) -> Result<Self> {
        if samples == 0 {
            return Err(Error::InvalidArgument("sample count must be positive".into()));
        }
        Ok(GaussianSampler { dim, samples, seed })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    /// `samples x dim` matrix of the `gamma_i`.
    pub fn sample_matrix(&self) -> DMatrix<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        DMatrix::from_fn(self.samples, self.dim, |_, _| StandardNormal.sample(&mut rng))
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct McEstimate {
    pub estimate: C64,
    /// Standard error of the mean, from the sample variance of `|X - mean|`.
    pub stderr: f64,
}

impl McEstimate {
    /// `|estimate - exact|` in units of stderr; 0 when both vanish.
    pub fn z_score(&self, exact: C64) -> f64 {
        let dev = (self.estimate - exact).norm();
        if self.stderr > 0.0 {
            dev / self.stderr
        } else if dev <= 1e-15 {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

pub fn mc_expectation(a: &GaussExp, sampler: &GaussianSampler) -> Result<McEstimate> {
    if sampler.dim != a.dim {
        return Err(Error::DimensionMismatch { left: sampler.dim, right: a.dim });
    }
    let gammas = sampler.sample_matrix();
    let n = sampler.samples;
    let values: Vec<C64> = gammas
        .row_iter()
        .map(|g| {
            a.terms
                .iter()
                .map(|t| {
                    let phase: f64 = g.iter().zip(&t.freq).map(|(x, h)| x * h).sum();
                    t.coeff * C64::from_polar(1.0, phase)
                })
                .sum()
        })
        .collect();
    let estimate = values.iter().sum::<C64>() / n as f64;
    let var = if n > 1 { values.iter().map(|v| (v - estimate).norm_sqr()).sum::<f64>() / (n - 1) as f64 } else { 0.0 };
    Ok(McEstimate { estimate, stderr: (var / n as f64).sqrt() })
}
