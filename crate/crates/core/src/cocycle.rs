//! Realization of a conditionally negative type `psi` as `psi(s) = ||b(s)||^2`
//! for a 1-cocycle `b` of an orthogonal representation `pi` on `R^d`.
//!
//! The Hilbert space is the closed span of the `b(s)`: the kernel
//! `K(s, r) = (psi(s) + psi(r) - psi(s^-1 r)) / 2` is factored as
//! `K = B B^T` with `B` of full column rank `d`, row `s` of `B` being `b(s)`.
//! On that span `pi_s` is forced by the cocycle law
//! `pi_s b(r) = b(sr) - b(s)`, which we solve in least squares and then
//! project onto the orthogonal group.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::linalg;
use crate::symbols::{is_cond_negative_type, SymbolFunction};

pub const DEFAULT_RANK_TOL: f64 = 1e-10;
/// Least-squares residual above which the construction is rejected.
pub const CONSTRUCTION_LIMIT: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct Cocycle {
    group: Arc<FiniteGroup>,
    dim: usize,
    b: Vec<DVector<f64>>,
    pi: Vec<DMatrix<f64>>,
    /// Residual of `pi_s b(r) = b(sr) - b(s)` after re-orthogonalization.
    construction_residual: f64,
}

/// Ordering of eigenpairs when selecting the basis of `H`. Different
/// orderings give cocycles that differ by a fixed orthogonal change of basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EigenOrder {
    Descending,
    Ascending,
}

/// `K(s, r) = (psi(s) + psi(r) - psi(s^-1 r)) / 2`. Refuses uncertified `psi`.
pub fn gram_from_psi(psi: &SymbolFunction, tol: f64) -> Result<DMatrix<f64>> {
    let report = is_cond_negative_type(psi, tol)?;
    if !report.verdict {
        return Err(Error::NotCertified(report.failure.unwrap_or_default()));
    }
    gram_unchecked(psi, tol)
}

fn gram_unchecked(psi: &SymbolFunction, tol: f64) -> Result<DMatrix<f64>> {
    let v = psi.real_values(tol)?;
    let g = psi.group();
    let n = g.order();
    Ok(DMatrix::from_fn(n, n, |s, r| 0.5 * (v[s] + v[r] - v[g.mul(g.inv(s), r)])))
}

pub fn extract_cocycle(psi: &SymbolFunction, rank_tol: f64) -> Result<Cocycle> {
    extract_cocycle_ordered(psi, rank_tol, EigenOrder::Descending)
}

pub fn extract_cocycle_ordered(psi: &SymbolFunction, rank_tol: f64, order: EigenOrder) -> Result<Cocycle> {
    let k = gram_from_psi(psi, crate::symbols::DEFAULT_TOL)?;
    let group = psi.group().clone();
    let n = group.order();

    let (vals, vecs) = linalg::symmetric_eigen(&k);
    let top = vals.last().copied().unwrap_or(0.0).max(0.0);
    let mut kept: Vec<usize> = (0..n).filter(|&i| top > 0.0 && vals[i] > rank_tol * top).collect();
    if order == EigenOrder::Descending {
        kept.reverse();
    }
    let dim = kept.len();
    let mut factor = DMatrix::zeros(n, dim);
    for (j, &i) in kept.iter().enumerate() {
        factor.set_column(j, &(vecs.column(i) * vals[i].sqrt()));
    }
    // K(e, .) = 0 exactly; pin b(e) = 0 rather than keep eigen-solver noise
    factor.row_mut(0).fill(0.0);
    let b: Vec<DVector<f64>> = (0..n).map(|s| factor.row(s).transpose()).collect();

    // B^T B = diag(kept eigenvalues), so the least-squares solution of
    // pi_s B^T = C_s^T is C_s^T B diag(1/lambda).
    let inv_gram = DMatrix::from_diagonal(&DVector::from_iterator(dim, kept.iter().map(|&i| 1.0 / vals[i])));
    let mut pi = Vec::with_capacity(n);
    let mut residual = 0.0f64;
    for s in 0..n {
        let targets = DMatrix::from_fn(n, dim, |r, j| b[group.mul(s, r)][j] - b[s][j]);
        let ls = targets.transpose() * &factor * &inv_gram;
        let orth = linalg::polar_orthogonal(&ls);
        let fit = &orth * factor.transpose() - targets.transpose();
        residual = residual.max(fit.amax());
        pi.push(orth);
    }
    if residual > CONSTRUCTION_LIMIT {
        return Err(Error::Construction { residual, limit: CONSTRUCTION_LIMIT });
    }
    Ok(Cocycle { group, dim, b, pi, construction_residual: residual })
}

impl Cocycle {
    /// Builds a cocycle from explicit data without checking the cocycle law;
    /// use [`verify_cocycle_law`] to audit it.
    pub fn from_parts(group: Arc<FiniteGroup>, b: Vec<DVector<f64>>, pi: Vec<DMatrix<f64>>) -> Result<Self> {
        let n = group.order();
        if b.len() != n || pi.len() != n {
            return Err(Error::DimensionMismatch { left: b.len().min(pi.len()), right: n });
        }
        let dim = b.first().map_or(0, |v| v.len());
        if b.iter().any(|v| v.len() != dim) || pi.iter().any(|m| m.shape() != (dim, dim)) {
            return Err(Error::InvalidArgument("inconsistent cocycle dimensions".into()));
        }
        Ok(Cocycle { group, dim, b, pi, construction_residual: 0.0 })
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn b(&self, s: usize) -> &DVector<f64> {
        &self.b[s]
    }

    pub fn pi(&self, s: usize) -> &DMatrix<f64> {
        &self.pi[s]
    }

    pub fn construction_residual(&self) -> f64 {
        self.construction_residual
    }

    /// The affine isometric action `h -> pi_s h + b(s)`.
    pub fn affine_action(&self, s: usize, h: &DVector<f64>) -> DVector<f64> {
        &self.pi[s] * h + &self.b[s]
    }

    /// Copy with `pi_s` replaced by `-pi_s`, for fault injection.
    pub fn with_flipped_pi(&self, s: usize) -> Result<Self> {
        self.group.check_element(s)?;
        let mut out = self.clone();
        out.pi[s].neg_mut();
        Ok(out)
    }

    /// Applies an orthogonal change of basis `q`: `b -> q b`, `pi -> q pi q^T`.
    pub fn change_basis(&self, q: &DMatrix<f64>) -> Result<Self> {
        let defect = linalg::orthogonality_defect(q);
        if q.shape() != (self.dim, self.dim) || defect > 1e-10 {
            return Err(Error::NotOrthogonal(defect));
        }
        let mut out = self.clone();
        for s in 0..self.group.order() {
            out.b[s] = q * &self.b[s];
            out.pi[s] = q * &self.pi[s] * q.transpose();
        }
        Ok(out)
    }

    pub fn to_json(&self) -> CocycleJson {
        CocycleJson {
            note: "basis-dependent: any orthogonal change of basis gives an equivalent cocycle",
            dim: self.dim,
            order: self.group.order(),
            b: self.b.iter().map(|v| v.iter().copied().collect()).collect(),
            pi: self.pi.iter().map(|m| m.row_iter().map(|r| r.iter().copied().collect()).collect()).collect(),
            construction_residual: self.construction_residual,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CocycleJson {
    pub note: &'static str,
    pub dim: usize,
    pub order: usize,
    pub b: Vec<Vec<f64>>,
    /// Row-major `pi_s` matrices.
    pub pi: Vec<Vec<Vec<f64>>>,
    pub construction_residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CocycleLawReport {
    pub pass: bool,
    /// `max ||b(sr) - b(s) - pi_s b(r)||_inf`.
    pub cocycle_residual: f64,
    /// `max |pi_s pi_r - pi_{sr}|`.
    pub homomorphism_residual: f64,
    /// `max |pi_s^T pi_s - I|`.
    pub orthogonality_residual: f64,
    pub tol: f64,
}

pub fn verify_cocycle_law(c: &Cocycle, tol: f64) -> CocycleLawReport {
    let g = &c.group;
    let mut cocycle_residual = 0.0f64;
    let mut homomorphism_residual = 0.0f64;
    let mut orthogonality_residual = 0.0f64;
    for s in g.elements() {
        orthogonality_residual = orthogonality_residual.max(linalg::orthogonality_defect(&c.pi[s]));
        for r in g.elements() {
            let sr = g.mul(s, r);
            let lhs = &c.b[sr];
            let rhs = &c.b[s] + &c.pi[s] * &c.b[r];
            cocycle_residual = cocycle_residual.max((lhs - rhs).amax());
            let prod = &c.pi[s] * &c.pi[r];
            homomorphism_residual = homomorphism_residual.max((prod - &c.pi[sr]).amax());
        }
    }
    let pass = cocycle_residual <= tol && homomorphism_residual <= tol && orthogonality_residual <= tol;
    CocycleLawReport { pass, cocycle_residual, homomorphism_residual, orthogonality_residual, tol }
}

#[derive(Debug, Clone, Serialize)]
pub struct NormIdentityReport {
    pub pass: bool,
    /// `max_s | ||b(s)||^2 - psi(s) |`.
    pub residual: f64,
    pub tol: f64,
}

pub fn verify_norm_identity(c: &Cocycle, psi: &SymbolFunction, tol: f64) -> Result<NormIdentityReport> {
    if !c.group.is_same(psi.group()) {
        return Err(Error::GroupMismatch);
    }
    let v = psi.real_values(tol)?;
    let residual = c.group.elements().map(|s| (c.b[s].norm_squared() - v[s]).abs()).fold(0.0, f64::max);
    Ok(NormIdentityReport { pass: residual <= tol, residual, tol })
}

/// Max deviation of `<b(s), b(r)>` from `K(s, r)`.
pub fn gram_residual(c: &Cocycle, psi: &SymbolFunction) -> Result<f64> {
    let k = gram_unchecked(psi, crate::symbols::DEFAULT_TOL)?;
    let g = &c.group;
    let mut worst = 0.0f64;
    for s in g.elements() {
        for r in g.elements() {
            worst = worst.max((c.b[s].dot(&c.b[r]) - k[(s, r)]).abs());
        }
    }
    Ok(worst)
}

/// Orthogonal `Q` minimizing `sum_s ||Q a(s) - b(s)||^2`, with the residual
/// `max_s ||Q a(s) - b(s)||_inf`.
pub fn procrustes_align(a: &Cocycle, b: &Cocycle) -> Result<(DMatrix<f64>, f64)> {
    if a.dim != b.dim || a.group.order() != b.group.order() {
        return Err(Error::DimensionMismatch { left: a.dim, right: b.dim });
    }
    let d = a.dim;
    if d == 0 {
        return Ok((DMatrix::zeros(0, 0), 0.0));
    }
    let mut m = DMatrix::zeros(d, d);
    for s in a.group.elements() {
        m += &b.b[s] * a.b[s].transpose();
    }
    let q = linalg::polar_orthogonal(&m);
    let residual = a.group.elements().map(|s| (&q * &a.b[s] - &b.b[s]).amax()).fold(0.0, f64::max);
    Ok((q, residual))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn z(n: usize) -> Arc<FiniteGroup> {
        Arc::new(FiniteGroup::cyclic(n).unwrap())
    }

    fn circle(n: usize) -> SymbolFunction {
        let v: Vec<f64> = (0..n).map(|k| 4.0 * (PI * k as f64 / n as f64).sin().powi(2)).collect();
        SymbolFunction::from_real(z(n), &v).unwrap()
    }

    #[test]
    fn gram_examples() {
        let k = gram_from_psi(&SymbolFunction::from_real(z(2), &[0.0, 1.0]).unwrap(), 1e-10).unwrap();
        assert_eq!(k, DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 0.0, 1.0]));
        let k = gram_from_psi(&SymbolFunction::from_real(z(4), &[0.0; 4]).unwrap(), 1e-10).unwrap();
        assert!(k.iter().all(|&x| x == 0.0));
        let k = gram_from_psi(&circle(3), 1e-10).unwrap();
        assert_abs_diff_eq!(k[(1, 1)], 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(k[(1, 2)], 1.5, epsilon = 1e-14);
        assert_abs_diff_eq!(k[(2, 2)], 3.0, epsilon = 1e-14);
        assert!(k.row(0).iter().all(|&x| x.abs() < 1e-15));
        let bad = SymbolFunction::from_real(z(2), &[0.0, -1.0]).unwrap();
        assert!(matches!(gram_from_psi(&bad, 1e-10), Err(Error::NotCertified(_))));
    }

    #[test]
    fn z2_delta_cocycle() {
        let psi = SymbolFunction::from_real(z(2), &[0.0, 1.0]).unwrap();
        let c = extract_cocycle(&psi, DEFAULT_RANK_TOL).unwrap();
        assert_eq!(c.dim(), 1);
        assert_eq!(c.b(0)[0], 0.0);
        assert_abs_diff_eq!(c.b(1)[0], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(c.pi(1)[(0, 0)], -1.0, epsilon = 1e-15);
        let law = verify_cocycle_law(&c, 1e-10);
        assert!(law.pass);
        assert!(law.cocycle_residual <= 1e-15);
        assert!(verify_norm_identity(&c, &psi, 1e-10).unwrap().residual <= 1e-15);
    }

    #[test]
    fn zero_cocycle() {
        let psi = SymbolFunction::from_real(z(3), &[0.0; 3]).unwrap();
        let c = extract_cocycle(&psi, DEFAULT_RANK_TOL).unwrap();
        assert_eq!(c.dim(), 0);
        let law = verify_cocycle_law(&c, 1e-10);
        assert!(law.pass && law.cocycle_residual == 0.0);
        assert_eq!(verify_norm_identity(&c, &psi, 1e-10).unwrap().residual, 0.0);
    }

    #[test]
    fn z3_circle_cocycle_matches_rotation_model() {
        let psi = circle(3);
        let c = extract_cocycle(&psi, DEFAULT_RANK_TOL).unwrap();
        assert_eq!(c.dim(), 2);
        assert!(verify_cocycle_law(&c, 1e-10).pass);
        assert!((c.b(1).norm_squared() - 3.0).abs() < 1e-12);
        assert!(gram_residual(&c, &psi).unwrap() < 1e-12);

        // b(k) = (cos(2 pi k/3) - 1, sin(2 pi k/3)), pi_k = rotation by 2 pi k/3
        let reference_b: Vec<DVector<f64>> = (0..3)
            .map(|k| {
                let a = 2.0 * PI * k as f64 / 3.0;
                DVector::from_vec(vec![a.cos() - 1.0, a.sin()])
            })
            .collect();
        let reference_pi: Vec<DMatrix<f64>> = (0..3)
            .map(|k| {
                let a = 2.0 * PI * k as f64 / 3.0;
                DMatrix::from_row_slice(2, 2, &[a.cos(), -a.sin(), a.sin(), a.cos()])
            })
            .collect();
        let reference = Cocycle::from_parts(z(3), reference_b, reference_pi).unwrap();
        assert!(verify_cocycle_law(&reference, 1e-12).pass);
        let (q, residual) = procrustes_align(&reference, &c).unwrap();
        assert!(residual < 1e-10, "residual {residual}");
        let mapped = reference.change_basis(&q).unwrap();
        for s in 0..3 {
            assert!((mapped.pi(s) - c.pi(s)).amax() < 1e-10);
        }
    }

    #[test]
    fn flipped_pi_breaks_the_law() {
        let psi = SymbolFunction::from_real(z(2), &[0.0, 1.0]).unwrap();
        let c = extract_cocycle(&psi, DEFAULT_RANK_TOL).unwrap().with_flipped_pi(1).unwrap();
        let law = verify_cocycle_law(&c, 1e-10);
        assert!(!law.pass);
        assert!(law.cocycle_residual >= 1.0);
    }

    #[test]
    fn eigen_order_changes_basis_only() {
        let g = Arc::new(FiniteGroup::symmetric(3).unwrap());
        let wl: Vec<f64> = g.word_length().unwrap().iter().map(|&x| x as f64).collect();
        let psi = SymbolFunction::from_real(g, &wl).unwrap();
        let a = extract_cocycle_ordered(&psi, DEFAULT_RANK_TOL, EigenOrder::Descending).unwrap();
        let b = extract_cocycle_ordered(&psi, DEFAULT_RANK_TOL, EigenOrder::Ascending).unwrap();
        assert!(verify_cocycle_law(&a, 1e-10).pass && verify_cocycle_law(&b, 1e-10).pass);
        let (_, residual) = procrustes_align(&a, &b).unwrap();
        assert!(residual < 1e-8);
    }

    #[test]
    fn affine_action_is_isometric() {
        let c = extract_cocycle(&circle(5), DEFAULT_RANK_TOL).unwrap();
        let h = DVector::from_vec(vec![0.3, -1.2]);
        let k = DVector::from_vec(vec![2.0, 0.7]);
        for s in 0..5 {
            let d = (c.affine_action(s, &h) - c.affine_action(s, &k)).norm();
            assert_abs_diff_eq!(d, (&h - &k).norm(), epsilon = 1e-12);
        }
    }

    #[test]
    fn uncertified_psi_is_refused() {
        let psi = SymbolFunction::from_real(z(2), &[0.0, -1.0]).unwrap();
        assert!(matches!(extract_cocycle(&psi, DEFAULT_RANK_TOL), Err(Error::NotCertified(_))));
    }
}
