//! The crossed product `M = L^inf(Omega) x|_alpha G` with
//! `alpha_s = Gamma(pi_s)`, modelled by integrands `s -> f_s` for the
//! elements `sum_s pi(f_s)(lambda_s (x) Id)`.
//!
//! The product follows from `(lambda_s (x) Id) pi(x) (lambda_s (x) Id)* =
//! pi(alpha_s(x))`:
//!
//! ```text
//! (g * f)(t) = sum_s g_s alpha_s(f_{s^-1 t})
//! (f*)_t     = alpha_t(f_{t^-1})*
//! ```
//!
//! [`block_matrix`] renders an element as the operator it defines on
//! `l^2(G) (x) L^2(Omega)`, block `(r, r')` being the multiplication operator
//! `alpha_{r^-1}(f_{r r'^-1})`; products and adjoints computed there serve as
//! an independent oracle for the integrand formulas.

use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::GroupAlgebraElement;
use crate::cocycle::Cocycle;
use crate::error::{Error, Result};
use crate::gauss::{GaussExp, Term};
use crate::C64;

/// Time parametrization of the dilation unitaries.
///
/// * `A` multiplies `f_s` by `exp(i W(sqrt(2) t b(s)))`: a one-parameter
///   group in `t`, with `E U_t J = T_{t^2}`.
/// * `B` multiplies `f_s` by `exp(i W(sqrt(2 t) b(s)))` for `t >= 0`, with
///   `E U_t J = T_t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Convention {
    A,
    B,
}

impl Convention {
    /// Scale `c` such that `U_t` multiplies `f_s` by `exp(i W(c b(s)))`.
    pub fn frequency_scale(self, t: f64) -> Result<f64> {
        match self {
            Convention::A => Ok(std::f64::consts::SQRT_2 * t),
            Convention::B if t >= 0.0 => Ok((2.0 * t).sqrt()),
            Convention::B => Err(Error::InvalidArgument(format!("convention B is defined for t >= 0, got {t}"))),
        }
    }
}

impl std::str::FromStr for Convention {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "A" | "a" => Ok(Convention::A),
            "B" | "b" => Ok(Convention::B),
            other => Err(Error::InvalidArgument(format!("unknown convention `{other}`"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CrossedElement {
    cocycle: Arc<Cocycle>,
    integrand: Vec<GaussExp>,
}

impl CrossedElement {
    pub fn zero(cocycle: Arc<Cocycle>) -> Self {
        let integrand = vec![GaussExp::zero(cocycle.dim()); cocycle.group().order()];
        CrossedElement { cocycle, integrand }
    }

    /// `1 x| lambda_e`.
    pub fn unit(cocycle: Arc<Cocycle>) -> Self {
        let mut f = Self::zero(cocycle);
        f.integrand[0] = GaussExp::one(f.cocycle.dim());
        f
    }

    pub fn from_integrand(cocycle: Arc<Cocycle>, integrand: Vec<GaussExp>) -> Result<Self> {
        let n = cocycle.group().order();
        if integrand.len() != n {
            return Err(Error::DimensionMismatch { left: integrand.len(), right: n });
        }
        if let Some(f) = integrand.iter().find(|f| f.dim() != cocycle.dim()) {
            return Err(Error::DimensionMismatch { left: f.dim(), right: cocycle.dim() });
        }
        Ok(CrossedElement { cocycle, integrand })
    }

    /// Random element: each entry independently zero with probability 1/4,
    /// otherwise 1 to `max_terms` exponentials with standard normal
    /// frequencies and coefficients in the unit square.
    pub fn random(cocycle: Arc<Cocycle>, max_terms: usize, rng: &mut impl Rng) -> Self {
        let d = cocycle.dim();
        let integrand = (0..cocycle.group().order())
            .map(|_| {
                if rng.random_range(0..4) == 0 {
                    return GaussExp::zero(d);
                }
                let terms = (0..rng.random_range(1..=max_terms.max(1)))
                    .map(|_| Term {
                        coeff: C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
                        freq: (0..d).map(|_| rng.sample(rand_distr::StandardNormal)).collect(),
                    })
                    .collect();
                GaussExp::from_terms(d, terms).expect("dimension is consistent")
            })
            .collect();
        CrossedElement { cocycle, integrand }
    }

    pub fn cocycle(&self) -> &Arc<Cocycle> {
        &self.cocycle
    }

    pub fn integrand(&self) -> &[GaussExp] {
        &self.integrand
    }

    pub fn entry(&self, s: usize) -> &GaussExp {
        &self.integrand[s]
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.cocycle, &other.cocycle) {
            Ok(())
        } else {
            Err(Error::GroupMismatch)
        }
    }

    /// `alpha_s(a) = Gamma(pi_s) a`.
    pub fn alpha(&self, s: usize, a: &GaussExp) -> GaussExp {
        alpha(&self.cocycle, s, a)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let integrand = self.integrand.iter().zip(&other.integrand).map(|(a, b)| a.add_unchecked(b)).collect();
        Ok(CrossedElement { cocycle: self.cocycle.clone(), integrand })
    }

    pub fn scale(&self, c: C64) -> Self {
        let integrand = self.integrand.iter().map(|a| a.scale(c)).collect();
        CrossedElement { cocycle: self.cocycle.clone(), integrand }
    }

    /// Twisted convolution `(self * f)(t) = sum_s self_s alpha_s(f_{s^-1 t})`.
    pub fn mul(&self, f: &Self) -> Result<Self> {
        self.check_same(f)?;
        let g = self.cocycle.group();
        let mut out = vec![GaussExp::zero(self.cocycle.dim()); g.order()];
        for s in g.elements() {
            if self.integrand[s].is_zero() {
                continue;
            }
            for r in g.elements() {
                if f.integrand[r].is_zero() {
                    continue;
                }
                // r = s^-1 t
                let t = g.mul(s, r);
                let term = self.integrand[s].mul_unchecked(&self.alpha(s, &f.integrand[r]));
                out[t] = out[t].add_unchecked(&term);
            }
        }
        Ok(CrossedElement { cocycle: self.cocycle.clone(), integrand: out })
    }

    /// `(f*)_t = alpha_t(f_{t^-1})*`.
    pub fn adjoint(&self) -> Self {
        let g = self.cocycle.group();
        let integrand = g.elements().map(|t| self.alpha(t, &self.integrand[g.inv(t)]).adjoint()).collect();
        CrossedElement { cocycle: self.cocycle.clone(), integrand }
    }

    /// `phi(x) = E(x_e)`: the Plancherel weight, a finite trace here.
    pub fn weight(&self) -> C64 {
        self.integrand[0].expectation()
    }

    /// Largest [`GaussExp::distance`] between corresponding entries.
    pub fn distance(&self, other: &Self) -> f64 {
        self.integrand.iter().zip(&other.integrand).map(|(a, b)| a.distance(b)).fold(0.0, f64::max)
    }
}

pub(crate) fn alpha(c: &Cocycle, s: usize, a: &GaussExp) -> GaussExp {
    if s == 0 {
        return a.clone();
    }
    a.map_frequencies(c.pi(s))
}

/// `J(sum a_s lambda_s) = sum a_s (1 x| lambda_s)`.
pub fn embed_j(x: &GroupAlgebraElement, cocycle: &Arc<Cocycle>) -> Result<CrossedElement> {
    if !x.group().is_same(cocycle.group()) {
        return Err(Error::GroupMismatch);
    }
    let d = cocycle.dim();
    let integrand = x.coeffs().iter().map(|&c| GaussExp::constant(d, c)).collect();
    Ok(CrossedElement { cocycle: cocycle.clone(), integrand })
}

/// `pi(a)`: the integrand `a` at `e`, zero elsewhere.
pub fn embed_pi(a: &GaussExp, cocycle: &Arc<Cocycle>) -> Result<CrossedElement> {
    if a.dim() != cocycle.dim() {
        return Err(Error::DimensionMismatch { left: a.dim(), right: cocycle.dim() });
    }
    let mut f = CrossedElement::zero(cocycle.clone());
    f.integrand[0] = a.clone();
    Ok(f)
}

pub fn crossed_mul(g: &CrossedElement, f: &CrossedElement) -> Result<CrossedElement> {
    g.mul(f)
}

pub fn crossed_adjoint(f: &CrossedElement) -> CrossedElement {
    f.adjoint()
}

/// `phi((int f x| lambda)* (int g x| lambda)) = sum_s E(f_s* g_s)`.
pub fn weight_pair(f: &CrossedElement, g: &CrossedElement) -> Result<C64> {
    f.check_same(g)?;
    Ok(f.integrand.iter().zip(&g.integrand).map(|(a, b)| a.adjoint().mul_unchecked(b).expectation()).sum())
}

/// `E(int g_s x| lambda_s) = sum_s E(g_s) lambda_s`.
pub fn cond_expectation(f: &CrossedElement) -> GroupAlgebraElement {
    let coeffs = f.integrand.iter().map(GaussExp::expectation).collect();
    GroupAlgebraElement::from_coeffs(f.cocycle.group().clone(), coeffs).expect("integrand length matches the group")
}

/// `U_t(int f_s x| lambda_s) = int exp(i W(c b(s))) f_s x| lambda_s` with
/// `c` fixed by the convention.
pub fn apply_ut(f: &CrossedElement, t: f64, convention: Convention) -> Result<CrossedElement> {
    let c = convention.frequency_scale(t)?;
    let cocycle = &f.cocycle;
    let integrand = f
        .integrand
        .iter()
        .enumerate()
        .map(|(s, a)| {
            let h: Vec<f64> = cocycle.b(s).iter().map(|x| c * x).collect();
            GaussExp::exponential(&h).mul_unchecked(a)
        })
        .collect();
    Ok(CrossedElement { cocycle: cocycle.clone(), integrand })
}

/// The modular flow of the Plancherel weight. `G` is finite, hence
/// unimodular, and each `alpha_s` preserves the expectation, so the flow is
/// trivial on both `M` and `VN(G)`.
pub fn modular_flow(f: &CrossedElement, _t: f64) -> CrossedElement {
    f.clone()
}

pub fn modular_flow_group(x: &GroupAlgebraElement, _t: f64) -> GroupAlgebraElement {
    x.clone()
}

/// Residual of `u_t(sr) = u_t(s) alpha_s(u_t(r))` for
/// `u_t(s) = exp(-i W(c b(s)))`, maximized over all pairs.
pub fn takesaki_residual(cocycle: &Cocycle, t: f64, convention: Convention) -> Result<f64> {
    let c = convention.frequency_scale(t)?;
    let g = cocycle.group();
    let u = |s: usize| {
        let h: Vec<f64> = cocycle.b(s).iter().map(|x| -c * x).collect();
        GaussExp::exponential(&h)
    };
    let mut worst = 0.0f64;
    for s in g.elements() {
        for r in g.elements() {
            let lhs = u(g.mul(s, r));
            let rhs = u(s).mul_unchecked(&alpha(cocycle, s, &u(r)));
            worst = worst.max(lhs.distance(&rhs));
        }
    }
    Ok(worst)
}

/// Operator picture of a crossed-product element: a `|G| x |G|` array of
/// multiplication operators on `L^2(Omega)`.
#[derive(Debug, Clone)]
pub struct BlockMatrix {
    order: usize,
    dim: usize,
    blocks: Vec<GaussExp>,
}

impl BlockMatrix {
    pub fn block(&self, r: usize, rp: usize) -> &GaussExp {
        &self.blocks[r * self.order + rp]
    }

    pub fn mul(&self, other: &BlockMatrix) -> BlockMatrix {
        let n = self.order;
        let mut blocks = vec![GaussExp::zero(self.dim); n * n];
        for r in 0..n {
            for k in 0..n {
                let a = self.block(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..n {
                    let prod = a.mul_unchecked(other.block(k, c));
                    blocks[r * n + c] = blocks[r * n + c].add_unchecked(&prod);
                }
            }
        }
        BlockMatrix { order: n, dim: self.dim, blocks }
    }

    /// Conjugate transpose; the adjoint of a multiplication operator is
    /// multiplication by the conjugate.
    pub fn adjoint(&self) -> BlockMatrix {
        let n = self.order;
        let mut blocks = Vec::with_capacity(n * n);
        for r in 0..n {
            for c in 0..n {
                blocks.push(self.block(c, r).adjoint());
            }
        }
        BlockMatrix { order: n, dim: self.dim, blocks }
    }

    pub fn max_distance(&self, other: &BlockMatrix) -> f64 {
        self.blocks.iter().zip(&other.blocks).map(|(a, b)| a.distance(b)).fold(0.0, f64::max)
    }
}

/// `block[r, r'] = alpha_{r^-1}(f_{r r'^-1})`, from
/// `(pi(x) xi)(r) = alpha_{r^-1}(x) xi(r)` and
/// `((lambda_s (x) Id) xi)(r) = xi(s^-1 r)`.
pub fn block_matrix(f: &CrossedElement) -> BlockMatrix {
    let g = f.cocycle.group();
    let n = g.order();
    let mut blocks = Vec::with_capacity(n * n);
    for r in 0..n {
        for rp in 0..n {
            let s = g.mul(r, g.inv(rp));
            blocks.push(alpha(&f.cocycle, g.inv(r), &f.integrand[s]));
        }
    }
    BlockMatrix { order: n, dim: f.cocycle.dim(), blocks }
}

#[derive(Debug, Clone, Serialize)]
pub struct CrossedJson {
    pub dim: usize,
    pub order: usize,
    pub integrand: Vec<Vec<Term>>,
}

impl CrossedElement {
    pub fn to_json(&self) -> CrossedJson {
        CrossedJson {
            dim: self.cocycle.dim(),
            order: self.cocycle.group().order(),
            integrand: self.integrand.iter().map(|a| a.terms().to_vec()).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cocycle::{extract_cocycle, DEFAULT_RANK_TOL};
    use crate::group::FiniteGroup;
    use crate::symbols::SymbolFunction;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cocycle(spec: &str, psi: &[f64]) -> Arc<Cocycle> {
        let g = Arc::new(FiniteGroup::from_spec(spec).unwrap());
        let psi = SymbolFunction::from_real(g, psi).unwrap();
        Arc::new(extract_cocycle(&psi, DEFAULT_RANK_TOL).unwrap())
    }

    fn z2() -> Arc<Cocycle> {
        cocycle("z2", &[0.0, 1.0])
    }

    fn s3() -> Arc<Cocycle> {
        let g = FiniteGroup::symmetric(3).unwrap();
        let wl: Vec<f64> = g.word_length().unwrap().iter().map(|&x| x as f64).collect();
        cocycle("s3", &wl)
    }

    fn lambda(c: &Arc<Cocycle>, s: usize) -> CrossedElement {
        let x = GroupAlgebraElement::basis(c.group().clone(), s).unwrap();
        embed_j(&x, c).unwrap()
    }

    #[test]
    fn embed_j_examples() {
        let c = z2();
        let unit = lambda(&c, 0);
        assert_eq!(unit.entry(0), &GaussExp::one(1));
        assert!(unit.entry(1).is_zero());
        let l1 = lambda(&c, 1);
        assert_eq!(l1.entry(1), &GaussExp::one(1));
        let c3 = s3();
        let g = c3.group().clone();
        for s in g.elements() {
            for r in g.elements() {
                let prod = lambda(&c3, s).mul(&lambda(&c3, r)).unwrap();
                assert_eq!(prod.distance(&lambda(&c3, g.mul(s, r))), 0.0);
            }
        }
    }

    #[test]
    fn embed_pi_examples() {
        let c = z2();
        let one = embed_pi(&GaussExp::one(1), &c).unwrap();
        assert_eq!(one.distance(&CrossedElement::unit(c.clone())), 0.0);
        let a = embed_pi(&GaussExp::exponential(&[0.8]), &c).unwrap();
        let b = embed_pi(&GaussExp::exponential(&[-0.8]), &c).unwrap();
        assert_eq!(a.mul(&b).unwrap().distance(&CrossedElement::unit(c.clone())), 0.0);
        assert!(embed_pi(&GaussExp::one(2), &c).is_err());
    }

    #[test]
    fn commutation_relation() {
        let c = s3();
        let a = GaussExp::exponential(&[0.3, -0.7, 0.4]).add(&GaussExp::exponential(&[1.1, 0.2, -0.5])).unwrap();
        let pa = embed_pi(&a, &c).unwrap();
        for s in c.group().elements() {
            let ls = lambda(&c, s);
            let lhs = ls.mul(&pa).unwrap().mul(&ls.adjoint()).unwrap();
            let rotated = crate::gauss::second_quantization(c.pi(s), &a).unwrap();
            let rhs = embed_pi(&rotated, &c).unwrap();
            assert!(lhs.distance(&rhs) < 1e-12);
        }
    }

    #[test]
    fn product_moves_alpha_across_lambda() {
        let c = z2();
        let f = embed_pi(&GaussExp::exponential(&[0.5]), &c).unwrap();
        let prod = lambda(&c, 1).mul(&f).unwrap();
        assert!(prod.entry(0).is_zero());
        assert!(prod.entry(1).distance(&GaussExp::exponential(&[-0.5])) < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let f = CrossedElement::random(c.clone(), 3, &mut rng);
        let unit = CrossedElement::unit(c.clone());
        assert_eq!(unit.mul(&f).unwrap().distance(&f), 0.0);
        assert_eq!(f.mul(&unit).unwrap().distance(&f), 0.0);
    }

    #[test]
    fn adjoint_examples() {
        let c = s3();
        let g = c.group().clone();
        for s in g.elements() {
            assert_eq!(lambda(&c, s).adjoint().distance(&lambda(&c, g.inv(s))), 0.0);
        }
        let a = GaussExp::exponential(&[0.2, 0.9, -0.3]).scale(C64::new(0.0, 2.0));
        let pa = embed_pi(&a, &c).unwrap();
        assert_eq!(pa.adjoint().distance(&embed_pi(&a.adjoint(), &c).unwrap()), 0.0);
        let x = lambda(&c, 3).mul(&pa).unwrap();
        let via_blocks = block_matrix(&x).adjoint();
        assert!(block_matrix(&x.adjoint()).max_distance(&via_blocks) < 1e-12);
    }

    #[test]
    fn random_products_match_block_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for c in [z2(), s3(), cocycle("z4", &[0.0, 2.0, 4.0, 2.0])] {
            for _ in 0..5 {
                let f = CrossedElement::random(c.clone(), 2, &mut rng);
                let g = CrossedElement::random(c.clone(), 2, &mut rng);
                let lhs = block_matrix(&f.mul(&g).unwrap());
                let rhs = block_matrix(&f).mul(&block_matrix(&g));
                assert!(lhs.max_distance(&rhs) < 1e-10);
                let a = f.mul(&g).unwrap().adjoint();
                let b = g.adjoint().mul(&f.adjoint()).unwrap();
                assert!(a.distance(&b) < 1e-10);
            }
        }
    }

    #[test]
    fn untwisted_convolution_disagrees_with_oracle() {
        // the printed convolution without alpha is not the operator product
        let c = z2();
        let f = lambda(&c, 1);
        let g = embed_pi(&GaussExp::exponential(&[0.5]), &c).unwrap();
        let untwisted = f.entry(1).mul(g.entry(0)).unwrap();
        let oracle = block_matrix(&f).mul(&block_matrix(&g));
        let twisted = f.mul(&g).unwrap();
        assert!(block_matrix(&twisted).max_distance(&oracle) < 1e-15);
        assert!(untwisted.distance(twisted.entry(1)) > 1.0);
    }

    #[test]
    fn weight_pair_examples() {
        let c = s3();
        let g = c.group().clone();
        let x = GroupAlgebraElement::from_real(g.clone(), &[1.0, 0.0, 1.0, 0.0, 0.0, 0.0]).unwrap();
        let jx = embed_j(&x, &c).unwrap();
        assert_abs_diff_eq!(weight_pair(&jx, &jx).unwrap().re, 2.0, epsilon = 1e-15);
        let p = embed_pi(&GaussExp::exponential(&[0.4, 1.3, 0.1]), &c).unwrap();
        assert_abs_diff_eq!(weight_pair(&p, &p).unwrap().re, 1.0, epsilon = 1e-15);
        assert_eq!(weight_pair(&lambda(&c, 0), &lambda(&c, 2)).unwrap(), C64::new(0.0, 0.0));
        // consistency with phi(f* g)
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let f = CrossedElement::random(c.clone(), 2, &mut rng);
        let h = CrossedElement::random(c.clone(), 2, &mut rng);
        let direct = f.adjoint().mul(&h).unwrap().weight();
        assert!((direct - weight_pair(&f, &h).unwrap()).norm() < 1e-12);
    }

    #[test]
    fn cond_expectation_examples() {
        let c = s3();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let x = GroupAlgebraElement::random(c.group().clone(), &mut rng);
        assert_eq!(cond_expectation(&embed_j(&x, &c).unwrap()).max_abs_diff(&x), 0.0);
        let f = embed_pi(&GaussExp::exponential(&[1.0, 0.0, 0.0]), &c).unwrap();
        let e = cond_expectation(&f);
        assert_abs_diff_eq!(e.coeff(0).re, (-0.5f64).exp(), epsilon = 1e-15);
        let unit = cond_expectation(&CrossedElement::unit(c.clone()));
        assert_eq!(unit.coeffs(), GroupAlgebraElement::one(c.group().clone()).coeffs());
    }

    #[test]
    fn conditional_expectation_is_positive() {
        let c = s3();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..5 {
            let f = CrossedElement::random(c.clone(), 2, &mut rng);
            let m = cond_expectation(&f.adjoint().mul(&f).unwrap()).to_matrix();
            let (vals, _) = crate::linalg::hermitian_eigen(&m);
            assert!(vals[0] > -1e-10);
        }
    }

    #[test]
    fn ut_examples() {
        let c = z2();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = CrossedElement::random(c.clone(), 2, &mut rng);
        for conv in [Convention::A, Convention::B] {
            assert_eq!(apply_ut(&f, 0.0, conv).unwrap().distance(&f), 0.0);
        }
        let twice = apply_ut(&apply_ut(&f, 0.7, Convention::A).unwrap(), -1.9, Convention::A).unwrap();
        assert!(twice.distance(&apply_ut(&f, 0.7 - 1.9, Convention::A).unwrap()) < 1e-12);
        assert!(apply_ut(&f, -1.0, Convention::B).is_err());

        let t = 0.8;
        let l1 = lambda(&c, 1);
        let ea = cond_expectation(&apply_ut(&l1, t, Convention::A).unwrap());
        let eb = cond_expectation(&apply_ut(&l1, t, Convention::B).unwrap());
        assert_abs_diff_eq!(ea.coeff(1).re, (-t * t).exp(), epsilon = 1e-15);
        assert_abs_diff_eq!(eb.coeff(1).re, (-t).exp(), epsilon = 1e-15);
    }

    #[test]
    fn takesaki_identity_holds_and_detects_faults() {
        let c = s3();
        for t in [0.3, 1.0, 2.0] {
            assert!(takesaki_residual(&c, t, Convention::A).unwrap() < 1e-10);
            assert!(takesaki_residual(&c, t, Convention::B).unwrap() < 1e-10);
        }
        let bad = z2().with_flipped_pi(1).unwrap();
        assert!(takesaki_residual(&bad, 1.0, Convention::A).unwrap() > 1.0);
    }

    #[test]
    fn block_matrix_examples() {
        let c = s3();
        let unit = block_matrix(&CrossedElement::unit(c.clone()));
        let n = c.group().order();
        for r in 0..n {
            for rp in 0..n {
                let expected = if r == rp { GaussExp::one(c.dim()) } else { GaussExp::zero(c.dim()) };
                assert_eq!(unit.block(r, rp), &expected);
            }
        }
        let a = GaussExp::exponential(&[0.6, -0.1, 0.2]);
        let blocks = block_matrix(&embed_pi(&a, &c).unwrap());
        let g = c.group();
        for r in 0..n {
            let expected = a.map_frequencies(c.pi(g.inv(r)));
            assert!(blocks.block(r, r).distance(&expected) < 1e-15);
            for rp in 0..n {
                if rp != r {
                    assert!(blocks.block(r, rp).is_zero());
                }
            }
        }
    }

    #[test]
    fn modular_flow_is_trivial_and_commutes_with_j() {
        let c = s3();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let x = GroupAlgebraElement::random(c.group().clone(), &mut rng);
        let lhs = modular_flow(&embed_j(&x, &c).unwrap(), 1.3);
        let rhs = embed_j(&modular_flow_group(&x, 1.3), &c).unwrap();
        assert_eq!(lhs.distance(&rhs), 0.0);
    }

    #[test]
    fn mismatched_structures_are_rejected() {
        let a = CrossedElement::unit(z2());
        let b = CrossedElement::unit(z2());
        assert!(a.mul(&b).is_err());
        let x = GroupAlgebraElement::one(Arc::new(FiniteGroup::cyclic(3).unwrap()));
        assert!(embed_j(&x, &z2()).is_err());
    }
}
