//! The group von Neumann algebra `VN(G)` of a finite group: finite sums
//! `sum_s c_s lambda_s`, the left regular representation, the normalized
//! Plancherel trace and the noncommutative `L^p` norms.

use std::ops::{Add, Mul, Sub};
use std::sync::Arc;

use nalgebra::DMatrix;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::linalg;
use crate::C64;

/// `(lambda_s)_{r, r'} = 1` iff `r = s r'`.
pub fn left_regular(group: &FiniteGroup, s: usize) -> Result<DMatrix<C64>> {
    group.check_element(s)?;
    let n = group.order();
    let mut m = DMatrix::zeros(n, n);
    for r in 0..n {
        m[(group.mul(s, r), r)] = C64::new(1.0, 0.0);
    }
    Ok(m)
}

/// The permutation underlying `lambda_s`, as `r -> s r`. Products of these
/// are exact.
pub fn left_translation(group: &FiniteGroup, s: usize) -> Vec<usize> {
    group.elements().map(|r| group.mul(s, r)).collect()
}

/// An exponent `p` in `[1, inf]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Exponent(f64);

impl Exponent {
    pub const INFINITY: Exponent = Exponent(f64::INFINITY);

    pub fn new(p: f64) -> Result<Self> {
        if p >= 1.0 {
            Ok(Exponent(p))
        } else {
            Err(Error::InvalidArgument(format!("L^p exponent must satisfy p >= 1, got {p}")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Normalized Schatten norm `((1/n) sum sigma_i^p)^(1/p)` of an `n x n`
/// matrix; the operator norm for `p = inf`.
pub fn normalized_schatten_norm(m: &DMatrix<C64>, p: Exponent) -> f64 {
    let sv = linalg::singular_values(m);
    if sv.is_empty() {
        return 0.0;
    }
    if p.0.is_infinite() {
        return sv.iter().copied().fold(0.0, f64::max);
    }
    let n = m.nrows() as f64;
    let sum: f64 = sv.iter().map(|s| s.powf(p.0)).sum();
    (sum / n).powf(1.0 / p.0)
}

#[derive(Debug, Clone)]
pub struct GroupAlgebraElement {
    group: Arc<FiniteGroup>,
    coeffs: Vec<C64>,
}

impl GroupAlgebraElement {
    pub fn zero(group: Arc<FiniteGroup>) -> Self {
        let coeffs = vec![C64::new(0.0, 0.0); group.order()];
        GroupAlgebraElement { group, coeffs }
    }

    pub fn one(group: Arc<FiniteGroup>) -> Self {
        Self::basis(group, 0).expect("identity is an element")
    }

    /// `lambda_s`.
    pub fn basis(group: Arc<FiniteGroup>, s: usize) -> Result<Self> {
        group.check_element(s)?;
        let mut x = Self::zero(group);
        x.coeffs[s] = C64::new(1.0, 0.0);
        Ok(x)
    }

    pub fn from_coeffs(group: Arc<FiniteGroup>, coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.len() != group.order() {
            return Err(Error::DimensionMismatch { left: coeffs.len(), right: group.order() });
        }
        Ok(GroupAlgebraElement { group, coeffs })
    }

    pub fn from_real(group: Arc<FiniteGroup>, coeffs: &[f64]) -> Result<Self> {
        Self::from_coeffs(group, coeffs.iter().map(|&c| C64::new(c, 0.0)).collect())
    }

    /// Coefficients with real and imaginary parts uniform in `[-1, 1]`.
    pub fn random(group: Arc<FiniteGroup>, rng: &mut impl Rng) -> Self {
        let coeffs =
            (0..group.order()).map(|_| C64::new(rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0))).collect();
        GroupAlgebraElement { group, coeffs }
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn coeff(&self, s: usize) -> C64 {
        self.coeffs[s]
    }

    fn same_group(&self, other: &Self) -> Result<()> {
        if self.group.is_same(&other.group) {
            Ok(())
        } else {
            Err(Error::GroupMismatch)
        }
    }

    /// Convolution `(xy)_t = sum_s x_s y_{s^-1 t}`.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.same_group(other)?;
        let g = &self.group;
        let mut out = Self::zero(g.clone());
        for s in g.elements() {
            if self.coeffs[s] == C64::new(0.0, 0.0) {
                continue;
            }
            for r in g.elements() {
                out.coeffs[g.mul(s, r)] += self.coeffs[s] * other.coeffs[r];
            }
        }
        Ok(out)
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.same_group(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Ok(GroupAlgebraElement { group: self.group.clone(), coeffs })
    }

    pub fn scale(&self, c: C64) -> Self {
        let coeffs = self.coeffs.iter().map(|a| a * c).collect();
        GroupAlgebraElement { group: self.group.clone(), coeffs }
    }

    /// `(x*)_s = conj(x_{s^-1})`.
    pub fn adjoint(&self) -> Self {
        let g = &self.group;
        let coeffs = g.elements().map(|s| self.coeffs[g.inv(s)].conj()).collect();
        GroupAlgebraElement { group: g.clone(), coeffs }
    }

    /// `M(x) = sum_s c_s lambda_s` as a `|G| x |G|` matrix.
    pub fn to_matrix(&self) -> DMatrix<C64> {
        let g = &self.group;
        let n = g.order();
        let mut m = DMatrix::zeros(n, n);
        for s in g.elements() {
            for r in 0..n {
                m[(g.mul(s, r), r)] += self.coeffs[s];
            }
        }
        m
    }

    /// Plancherel trace `tau(x) = c_e`, equal to `(1/|G|) Tr M(x)`.
    pub fn plancherel_trace(&self) -> C64 {
        self.coeffs[0]
    }

    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        Ok(normalized_schatten_norm(&self.to_matrix(), Exponent::new(p)?))
    }

    /// Largest coefficient deviation.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

impl Add for &GroupAlgebraElement {
    type Output = GroupAlgebraElement;
    fn add(self, rhs: Self) -> GroupAlgebraElement {
        self.try_add(rhs).expect("group mismatch")
    }
}

impl Sub for &GroupAlgebraElement {
    type Output = GroupAlgebraElement;
    fn sub(self, rhs: Self) -> GroupAlgebraElement {
        self.try_add(&rhs.scale(C64::new(-1.0, 0.0))).expect("group mismatch")
    }
}

impl Mul for &GroupAlgebraElement {
    type Output = GroupAlgebraElement;
    fn mul(self, rhs: Self) -> GroupAlgebraElement {
        self.try_mul(rhs).expect("group mismatch")
    }
}

/// CSV with one row per matrix row and `re,im` column pairs.
pub fn matrix_to_csv(m: &DMatrix<C64>) -> String {
    let mut out = String::new();
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| format!("{:.16e},{:.16e}", m[(i, j)].re, m[(i, j)].im)).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}
