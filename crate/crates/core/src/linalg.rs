//! Thin wrappers over nalgebra's dense decompositions, sorted and
//! sign-normalized so that downstream output is reproducible.

use nalgebra::{DMatrix, DVector};

use crate::C64;

/// Eigenpairs of a real symmetric matrix, eigenvalues ascending.
pub(crate) fn symmetric_eigen(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), DMatrix::zeros(0, 0));
    }
    let sym = (m + m.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        let mut v = eig.eigenvectors.column(i).clone_owned();
        normalize_sign(&mut v);
        vectors.set_column(k, &v);
    }
    (values, vectors)
}

/// Eigenpairs of the Hermitian part of a complex matrix, eigenvalues ascending.
pub(crate) fn hermitian_eigen(m: &DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), DMatrix::zeros(0, 0));
    }
    let herm = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let eig = herm.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        let mut v = eig.eigenvectors.column(i).clone_owned();
        // rotate the phase so the largest component is real positive
        if let Some(big) = v.iter().copied().max_by(|a, b| a.norm().total_cmp(&b.norm())) {
            if big.norm() > 0.0 {
                let phase = big.conj() / big.norm();
                v *= phase;
            }
        }
        vectors.set_column(k, &v);
    }
    (values, vectors)
}

/// Flips `v` so that its first largest-magnitude component is positive.
pub(crate) fn normalize_sign(v: &mut DVector<f64>) {
    let mut best = 0.0f64;
    let mut sign = 1.0;
    for &x in v.iter() {
        if x.abs() > best + 1e-12 {
            best = x.abs();
            sign = x.signum();
        }
    }
    if sign < 0.0 {
        v.neg_mut();
    }
}

/// Orthonormal basis (as columns) of the sum-zero subspace of R^n
/// (Helmert contrasts).
pub(crate) fn sum_zero_basis(n: usize) -> DMatrix<f64> {
    let cols = n.saturating_sub(1);
    let mut b = DMatrix::zeros(n, cols);
    for k in 1..n {
        let norm = ((k * (k + 1)) as f64).sqrt();
        for i in 0..k {
            b[(i, k - 1)] = 1.0 / norm;
        }
        b[(k, k - 1)] = -(k as f64) / norm;
    }
    b
}

pub(crate) fn singular_values(m: &DMatrix<C64>) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    m.clone().svd(false, false).singular_values.iter().copied().collect()
}

/// Nearest orthogonal matrix (polar factor).
pub(crate) fn polar_orthogonal(m: &DMatrix<f64>) -> DMatrix<f64> {
    if m.is_empty() {
        return m.clone();
    }
    let svd = m.clone().svd(true, true);
    svd.u.unwrap() * svd.v_t.unwrap()
}

/// `max |M^T M - I|` entrywise.
pub(crate) fn orthogonality_defect(m: &DMatrix<f64>) -> f64 {
    let n = m.ncols();
    let gram = m.transpose() * m;
    (gram - DMatrix::<f64>::identity(n, n)).amax()
}
