//! Functions on the group: positive-definite and conditionally-negative
//! certificates, Fourier multipliers `lambda_s -> phi(s) lambda_s`, and the
//! semigroup symbols `phi_t = exp(-t psi)`.

use std::path::Path;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::algebra::GroupAlgebraElement;
use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::linalg;
use crate::C64;

pub const DEFAULT_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct SymbolFunction {
    group: Arc<FiniteGroup>,
    values: Vec<C64>,
}

impl SymbolFunction {
    pub fn new(group: Arc<FiniteGroup>, values: Vec<C64>) -> Result<Self> {
        if values.len() != group.order() {
            return Err(Error::DimensionMismatch { left: values.len(), right: group.order() });
        }
        Ok(SymbolFunction { group, values })
    }

    pub fn from_real(group: Arc<FiniteGroup>, values: &[f64]) -> Result<Self> {
        Self::new(group, values.iter().map(|&v| C64::new(v, 0.0)).collect())
    }

    pub fn constant(group: Arc<FiniteGroup>, c: C64) -> Self {
        let values = vec![c; group.order()];
        SymbolFunction { group, values }
    }

    /// Parses lines `element_index value_re [value_im]`; every element must
    /// appear exactly once. Blank lines and `#` comments are skipped.
    pub fn parse(group: Arc<FiniteGroup>, text: &str) -> Result<Self> {
        let n = group.order();
        let mut values: Vec<Option<C64>> = vec![None; n];
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| Error::Parse { line: line_no, message };
            let words: Vec<&str> = line.split_whitespace().collect();
            if !(2..=3).contains(&words.len()) {
                return Err(err("expected `element_index value_re [value_im]`".into()));
            }
            let idx: usize = words[0].parse().map_err(|_| err(format!("bad element index `{}`", words[0])))?;
            if idx >= n {
                return Err(err(format!("element {idx} out of range for order {n}")));
            }
            let num = |w: &str| w.parse::<f64>().map_err(|_| err(format!("bad number `{w}`")));
            let re = num(words[1])?;
            let im = if words.len() == 3 { num(words[2])? } else { 0.0 };
            if values[idx].replace(C64::new(re, im)).is_some() {
                return Err(err(format!("element {idx} given twice")));
            }
        }
        let values = values
            .into_iter()
            .enumerate()
            .map(|(s, v)| {
                v.ok_or(Error::Parse {
                    line: text.lines().count().max(1),
                    message: format!("no value for element {s}"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(group, values)
    }

    pub fn load_file(group: Arc<FiniteGroup>, path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(group, &std::fs::read_to_string(path)?)
    }

    pub fn to_text(&self) -> String {
        self.values.iter().enumerate().map(|(s, v)| format!("{s} {:e} {:e}\n", v.re, v.im)).collect()
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn value(&self, s: usize) -> C64 {
        self.values[s]
    }

    /// Real parts, provided every imaginary part is within `tol`.
    pub fn real_values(&self, tol: f64) -> Result<Vec<f64>> {
        self.values
            .iter()
            .enumerate()
            .map(|(element, v)| if v.im.abs() <= tol { Ok(v.re) } else { Err(Error::NotReal { element, imag: v.im }) })
            .collect()
    }

    pub fn pointwise_mul(&self, other: &Self) -> Result<Self> {
        if !self.group.is_same(&other.group) {
            return Err(Error::GroupMismatch);
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect();
        Ok(SymbolFunction { group: self.group.clone(), values })
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// `P_{s,r} = phi(s^-1 r)`.
    pub fn kernel_matrix(&self) -> DMatrix<C64> {
        let g = &self.group;
        DMatrix::from_fn(g.order(), g.order(), |s, r| self.values[g.mul(g.inv(s), r)])
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PositiveDefiniteReport {
    pub verdict: bool,
    pub hermitian_defect: f64,
    pub min_eigenvalue: f64,
    /// Tolerance after scaling by `max(1, ||P||_F)`.
    pub effective_tol: f64,
    /// Eigenvector of the minimum eigenvalue, present on failure.
    pub witness: Option<Vec<C64>>,
}

pub fn is_positive_definite(phi: &SymbolFunction, tol: f64) -> PositiveDefiniteReport {
    let p = phi.kernel_matrix();
    let effective_tol = tol * p.norm().max(1.0);
    let hermitian_defect = (&p - p.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    let (vals, vecs) = linalg::hermitian_eigen(&p);
    let min_eigenvalue = vals.first().copied().unwrap_or(0.0);
    let verdict = hermitian_defect <= effective_tol && min_eigenvalue >= -effective_tol;
    let witness = (!verdict && !vals.is_empty()).then(|| vecs.column(0).iter().copied().collect());
    PositiveDefiniteReport { verdict, hermitian_defect, min_eigenvalue, effective_tol, witness }
}

#[derive(Debug, Clone, Serialize)]
pub struct CndReport {
    pub verdict: bool,
    /// `|psi(e)|`.
    pub identity_defect: f64,
    /// `max_s |psi(s^-1) - psi(s)|`.
    pub symmetry_defect: f64,
    /// Largest eigenvalue of the quadratic form `c -> sum c_i c_j psi(s_i^-1 s_j)`
    /// restricted to unit vectors with `sum c_i = 0`; `None` for the trivial
    /// group, where that subspace is `{0}`.
    pub max_constrained_value: Option<f64>,
    /// Extremal direction scaled to max-norm 1.
    pub witness: Option<Vec<f64>>,
    /// Value of the quadratic form at `witness`.
    pub witness_value: Option<f64>,
    pub effective_tol: f64,
    pub failure: Option<String>,
}

pub fn is_cond_negative_type(psi: &SymbolFunction, tol: f64) -> Result<CndReport> {
    let values = psi.real_values(tol)?;
    let g = psi.group();
    let n = g.order();
    let a = DMatrix::from_fn(n, n, |s, r| values[g.mul(g.inv(s), r)]);
    let effective_tol = tol * a.norm().max(1.0);
    let identity_defect = values[0].abs();
    let symmetry_defect = g.elements().map(|s| (values[g.inv(s)] - values[s]).abs()).fold(0.0, f64::max);

    let basis = linalg::sum_zero_basis(n);
    let restricted = basis.transpose() * &a * &basis;
    let (vals, vecs) = linalg::symmetric_eigen(&restricted);
    let (max_constrained_value, witness, witness_value) = match vals.last() {
        Some(&top) => {
            let mut c: DVector<f64> = &basis * vecs.column(vals.len() - 1);
            let scale = c.amax();
            c /= scale;
            linalg::normalize_sign(&mut c);
            let value = (c.transpose() * &a * &c)[(0, 0)];
            (Some(top), Some(c.iter().copied().collect()), Some(value))
        }
        None => (None, None, None),
    };

    let failure = if identity_defect > effective_tol {
        Some(format!("psi(e) = {} is not zero", values[0]))
    } else if symmetry_defect > effective_tol {
        Some(format!("psi is not symmetric (defect {symmetry_defect:e})"))
    } else if max_constrained_value.is_some_and(|v| v > effective_tol) {
        Some(format!("quadratic form is positive on sum-zero vectors (max {:e})", max_constrained_value.unwrap()))
    } else {
        None
    };
    Ok(CndReport {
        verdict: failure.is_none(),
        identity_defect,
        symmetry_defect,
        max_constrained_value,
        witness,
        witness_value,
        effective_tol,
        failure,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SchoenbergEntry {
    pub t: f64,
    pub min_eigenvalue: f64,
    pub pass: bool,
}

/// Samples positive definiteness of `exp(-t psi)` over a finite grid of `t`.
/// This is a necessary condition only; the exact certificate is
/// [`is_cond_negative_type`].
#[derive(Debug, Clone, Serialize)]
pub struct SchoenbergReport {
    pub pass: bool,
    pub entries: Vec<SchoenbergEntry>,
    pub warning: Option<String>,
}

pub fn schoenberg_check(psi: &SymbolFunction, t_grid: &[f64], tol: f64) -> Result<SchoenbergReport> {
    let values = psi.real_values(tol)?;
    if values[0].abs() > tol {
        return Err(Error::InvalidArgument(format!("psi(e) = {} is not zero", values[0])));
    }
    let mut entries = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let phi = semigroup_symbol(psi, t)?;
        let report = is_positive_definite(&phi, tol);
        entries.push(SchoenbergEntry { t, min_eigenvalue: report.min_eigenvalue, pass: report.verdict });
    }
    let warning = t_grid.is_empty().then(|| "empty t-grid: vacuous pass".to_string());
    Ok(SchoenbergReport { pass: entries.iter().all(|e| e.pass), entries, warning })
}

/// `T(sum c_s lambda_s) = sum phi(s) c_s lambda_s`.
pub fn multiplier_apply(phi: &SymbolFunction, x: &GroupAlgebraElement) -> Result<GroupAlgebraElement> {
    if !phi.group.is_same(x.group()) {
        return Err(Error::GroupMismatch);
    }
    let coeffs = x.coeffs().iter().zip(&phi.values).map(|(c, p)| c * p).collect();
    GroupAlgebraElement::from_coeffs(x.group().clone(), coeffs)
}

/// `phi_t(s) = exp(-t psi(s))`.
pub fn semigroup_symbol(psi: &SymbolFunction, t: f64) -> Result<SymbolFunction> {
    if t.is_nan() || t < 0.0 {
        return Err(Error::InvalidArgument(format!("semigroup time must be >= 0, got {t}")));
    }
    let values = psi.real_values(DEFAULT_TOL)?;
    let values = values.iter().map(|&v| C64::new((-t * v).exp(), 0.0)).collect();
    SymbolFunction::new(psi.group.clone(), values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn z(n: usize) -> Arc<FiniteGroup> {
        Arc::new(FiniteGroup::cyclic(n).unwrap())
    }

    fn sym(g: &Arc<FiniteGroup>, v: &[f64]) -> SymbolFunction {
        SymbolFunction::from_real(g.clone(), v).unwrap()
    }

    #[test]
    fn positive_definite_examples() {
        let g = z(2);
        let r = is_positive_definite(&sym(&g, &[1.0, 1.0]), 1e-10);
        assert!(r.verdict);
        assert_abs_diff_eq!(r.min_eigenvalue, 0.0, epsilon = 1e-12);

        let r = is_positive_definite(&sym(&g, &[1.0, -2.0]), 1e-10);
        assert!(!r.verdict);
        assert_abs_diff_eq!(r.min_eigenvalue, -1.0, epsilon = 1e-12);
        let w = r.witness.unwrap();
        assert_abs_diff_eq!((w[0] - w[1]).norm(), 0.0, epsilon = 1e-12);

        let r = is_positive_definite(&sym(&g, &[1.0, (-1f64).exp()]), 1e-10);
        assert!(r.verdict);
        assert_abs_diff_eq!(r.min_eigenvalue, 1.0 - (-1f64).exp(), epsilon = 1e-12);
    }

    #[test]
    fn non_hermitian_kernel_is_rejected() {
        let g = z(3);
        let phi = SymbolFunction::new(g, vec![C64::new(1.0, 0.0), C64::new(0.1, 0.0), C64::new(0.3, 0.0)]).unwrap();
        let r = is_positive_definite(&phi, 1e-10);
        assert!(!r.verdict);
        assert!(r.hermitian_defect > 0.1);
    }

    #[test]
    fn cnd_examples() {
        let g = z(2);
        let r = is_cond_negative_type(&sym(&g, &[0.0, 1.0]), 1e-10).unwrap();
        assert!(r.verdict);
        assert_eq!(r.witness.as_deref(), Some(&[1.0, -1.0][..]));
        assert_abs_diff_eq!(r.witness_value.unwrap(), -2.0, epsilon = 1e-12);

        let r = is_cond_negative_type(&sym(&g, &[0.0, -1.0]), 1e-10).unwrap();
        assert!(!r.verdict);
        assert_eq!(r.witness.as_deref(), Some(&[1.0, -1.0][..]));
        assert_abs_diff_eq!(r.witness_value.unwrap(), 2.0, epsilon = 1e-12);

        for n in [1, 2, 5] {
            let r = is_cond_negative_type(&sym(&z(n), &vec![0.0; n]), 1e-10).unwrap();
            assert!(r.verdict);
        }
    }

    #[test]
    fn cnd_rejects_bad_identity_asymmetry_and_complex() {
        let g = z(3);
        assert!(!is_cond_negative_type(&sym(&g, &[0.5, 1.0, 1.0]), 1e-10).unwrap().verdict);
        let r = is_cond_negative_type(&sym(&g, &[0.0, 1.0, 2.0]), 1e-10).unwrap();
        assert!(!r.verdict && r.failure.unwrap().contains("symmetric"));
        let complex =
            SymbolFunction::new(g, vec![C64::new(0.0, 0.0), C64::new(1.0, 0.5), C64::new(1.0, -0.5)]).unwrap();
        assert!(matches!(is_cond_negative_type(&complex, 1e-10), Err(Error::NotReal { element: 1, .. })));
    }

    #[test]
    fn schoenberg_examples() {
        let g = z(2);
        let r = schoenberg_check(&sym(&g, &[0.0, 1.0]), &[0.1, 1.0, 10.0], 1e-10).unwrap();
        assert!(r.pass);
        for (e, t) in r.entries.iter().zip([0.1f64, 1.0, 10.0]) {
            assert_abs_diff_eq!(e.min_eigenvalue, 1.0 - (-t).exp(), epsilon = 1e-12);
        }
        let r = schoenberg_check(&sym(&g, &[0.0, -1.0]), &[1.0], 1e-10).unwrap();
        assert!(!r.pass);
        assert_abs_diff_eq!(r.entries[0].min_eigenvalue, 1.0 - 1f64.exp(), epsilon = 1e-12);
        let r = schoenberg_check(&sym(&g, &[0.0, -1.0]), &[], 1e-10).unwrap();
        assert!(r.pass && r.warning.is_some());
    }

    #[test]
    fn multiplier_examples() {
        let g = z(2);
        let x = GroupAlgebraElement::from_real(g.clone(), &[1.0, 1.0]).unwrap();
        let one = SymbolFunction::constant(g.clone(), C64::new(1.0, 0.0));
        assert_eq!(multiplier_apply(&one, &x).unwrap().coeffs(), x.coeffs());
        let y = multiplier_apply(&sym(&g, &[1.0, 0.5]), &x).unwrap();
        assert_eq!(y.coeffs(), &[C64::new(1.0, 0.0), C64::new(0.5, 0.0)]);
        let t0 = semigroup_symbol(&sym(&g, &[0.0, 1.0]), 0.0).unwrap();
        assert_eq!(multiplier_apply(&t0, &x).unwrap().coeffs(), x.coeffs());
        let other = GroupAlgebraElement::one(z(3));
        assert!(multiplier_apply(&one, &other).is_err());
    }

    #[test]
    fn semigroup_symbol_examples() {
        let g = z(2);
        let psi = sym(&g, &[0.0, 1.0]);
        let one = semigroup_symbol(&psi, 0.0).unwrap();
        assert!(one.values().iter().all(|v| *v == C64::new(1.0, 0.0)));
        let p1 = semigroup_symbol(&psi, 1.0).unwrap();
        assert_abs_diff_eq!(p1.value(1).re, 0.367879441171, epsilon = 1e-12);
        assert!(semigroup_symbol(&psi, -1.0).is_err());

        let g3 = z(3);
        let circle: Vec<f64> = (0..3).map(|k| 4.0 * (std::f64::consts::PI * k as f64 / 3.0).sin().powi(2)).collect();
        assert_abs_diff_eq!(circle[1], 3.0, epsilon = 1e-14);
        let p = semigroup_symbol(&sym(&g3, &circle), 0.5).unwrap();
        assert_abs_diff_eq!(p.value(0).re, 1.0);
        assert_abs_diff_eq!(p.value(1).re, (-1.5f64).exp(), epsilon = 1e-14);
        assert_abs_diff_eq!(p.value(2).re, (-1.5f64).exp(), epsilon = 1e-14);
    }

    #[test]
    fn symbol_file_parsing() {
        let g = z(3);
        let s = SymbolFunction::parse(g.clone(), "# psi\n0 0\n1 3.0\n2 3 0.0\n").unwrap();
        assert_eq!(s.value(2), C64::new(3.0, 0.0));
        let round = SymbolFunction::parse(g.clone(), &s.to_text()).unwrap();
        assert_eq!(round.values(), s.values());
        assert!(matches!(SymbolFunction::parse(g.clone(), "0 0\n1 x\n2 1"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(SymbolFunction::parse(g.clone(), "0 0\n0 1\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(SymbolFunction::parse(g.clone(), "0 0\n5 1\n"), Err(Error::Parse { line: 2, .. })));
        assert!(SymbolFunction::parse(g, "0 0\n1 1\n").is_err());
    }
}
