//! Sectorial functional calculus of the multiplier generator
//! `A lambda_s = psi(s) lambda_s`.
//!
//! For `f` in `H0^inf(Sigma_theta)` and `0 < nu < theta`,
//!
//! ```text
//! f(a) = (1 / 2 pi i) oint_{d Sigma_nu} f(z) / (z - a) dz
//! ```
//!
//! with the boundary traversed counterclockwise around the positive axis.
//! Substituting `z = e^u e^{+-i nu}` turns each ray into an integral over
//! `u in R`, evaluated with composite Gauss-Legendre panels. Truncation
//! starts at `[1e-8, 1e8] * max psi` and is widened until the neglected
//! tails, bounded through the decay exponent of `f`, fall below
//! `tail_tol`. Panels are halved until two successive estimates agree.

use std::f64::consts::PI;
use std::fmt;
use std::num::NonZeroUsize;
use std::sync::Arc;

use gauss_quad::legendre::GaussLegendre;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::{left_regular, normalized_schatten_norm, Exponent};
use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::symbols::{SymbolFunction, DEFAULT_TOL};
use crate::C64;

#[derive(Debug, Clone, PartialEq)]
enum Kind {
    /// `z^a / (1 + z)^(2a)`.
    Power(f64),
    /// `exp(-t z) z / (z + eps)`.
    ExpRegularized {
        t: f64,
        eps: f64,
    },
    Product(Box<SectorFunction>, Box<SectorFunction>),
}

/// A closed-form function in `H0^inf` of a sector, with the decay data
/// `|f(z)| <= c(theta) |z|^s / (1 + |z|)^(2s)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorFunction {
    kind: Kind,
}

impl SectorFunction {
    pub fn power(a: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::InvalidArgument(format!("power exponent must be positive, got {a}")));
        }
        Ok(SectorFunction { kind: Kind::Power(a) })
    }

    pub fn exp_regularized(t: f64, eps: f64) -> Result<Self> {
        if !(t > 0.0 && eps > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "exp regularization needs t > 0 and eps > 0, got t = {t}, eps = {eps}"
            )));
        }
        Ok(SectorFunction { kind: Kind::ExpRegularized { t, eps } })
    }

    pub fn product(f: &SectorFunction, g: &SectorFunction) -> Self {
        SectorFunction { kind: Kind::Product(Box::new(f.clone()), Box::new(g.clone())) }
    }

    /// `power:A` or `exp:T:EPS`.
    pub fn parse(spec: &str) -> Result<Self> {
        let parts: Vec<&str> = spec.trim().split(':').map(str::trim).collect();
        let num = |s: &str| {
            s.parse::<f64>().map_err(|_| Error::InvalidArgument(format!("bad number `{s}` in function `{spec}`")))
        };
        match parts.as_slice() {
            ["power", a] => Self::power(num(a)?),
            ["exp", t, eps] => Self::exp_regularized(num(t)?, num(eps)?),
            _ => Err(Error::InvalidArgument(format!("unknown function `{spec}`"))),
        }
    }

    /// Comma-separated list of [`SectorFunction::parse`] specs; empty gives
    /// an empty family.
    pub fn parse_family(spec: &str) -> Result<Vec<Self>> {
        spec.split(',').filter(|s| !s.trim().is_empty()).map(Self::parse).collect()
    }

    /// `{z^a / (1 + z)^(2a) : a in {0.5, 1, 2}}`.
    pub fn builtin_family() -> Vec<Self> {
        [0.5, 1.0, 2.0].iter().map(|&a| Self::power(a).expect("positive")).collect()
    }

    /// Functions are analytic and bounded on `Sigma_theta` for every
    /// `theta` below this angle.
    pub fn max_angle(&self) -> f64 {
        match &self.kind {
            Kind::Power(_) => PI,
            Kind::ExpRegularized { .. } => PI / 2.0,
            Kind::Product(f, g) => f.max_angle().min(g.max_angle()),
        }
    }

    /// The exponent `s` of the decay bound.
    pub fn decay_exponent(&self) -> f64 {
        match &self.kind {
            Kind::Power(a) => *a,
            Kind::ExpRegularized { .. } => 1.0,
            Kind::Product(f, g) => f.decay_exponent() + g.decay_exponent(),
        }
    }

    /// The constant `c` of the decay bound on `Sigma_theta`, from
    /// `|1 + z| >= (1 + |z|) cos(theta / 2)`.
    pub fn decay_constant(&self, theta: f64) -> f64 {
        let half = (theta / 2.0).cos();
        match &self.kind {
            Kind::Power(a) => half.powf(-2.0 * a),
            Kind::ExpRegularized { t, eps } => {
                let kappa = t * theta.cos();
                (4.0 / eps).max(4.0 / (std::f64::consts::E * kappa)) / half
            }
            Kind::Product(f, g) => f.decay_constant(theta) * g.decay_constant(theta),
        }
    }

    pub fn eval(&self, z: C64) -> C64 {
        match &self.kind {
            Kind::Power(a) => (a * z.ln() - 2.0 * a * (1.0 + z).ln()).exp(),
            Kind::ExpRegularized { t, eps } => (-t * z).exp() * z / (z + eps),
            Kind::Product(f, g) => f.eval(z) * g.eval(z),
        }
    }

    /// `f(x)` on the spectrum, with `f(0) = 0`.
    pub fn eval_spectral(&self, x: f64) -> C64 {
        if x == 0.0 {
            C64::new(0.0, 0.0)
        } else {
            C64::new(self.eval_real(x), 0.0)
        }
    }

    fn eval_real(&self, x: f64) -> f64 {
        match &self.kind {
            Kind::Power(a) => x.powf(*a) / (1.0 + x).powf(2.0 * a),
            Kind::ExpRegularized { t, eps } => (-t * x).exp() * x / (x + eps),
            Kind::Product(f, g) => f.eval_real(x) * g.eval_real(x),
        }
    }

    /// Largest relative mismatch between the two central difference
    /// derivatives `df/dx` and `-i df/dy` at the sample points.
    pub fn cauchy_riemann_defect(&self, points: &[C64]) -> f64 {
        points
            .iter()
            .map(|&z| {
                let h = 1e-5 * z.norm().max(1e-3);
                let dx = (self.eval(z + h) - self.eval(z - h)) / (2.0 * h);
                let i_h = C64::new(0.0, h);
                let dy = (self.eval(z + i_h) - self.eval(z - i_h)) / (2.0 * i_h);
                (dx - dy).norm() / dx.norm().max(dy.norm()).max(1e-300)
            })
            .fold(0.0, f64::max)
    }

    /// Largest `|f(z)| / bound(z)` over a log-spaced grid on both rays of
    /// `d Sigma_theta` and the positive axis; at most 1 when the bound holds.
    pub fn decay_ratio(&self, theta: f64) -> f64 {
        let (s, c) = (self.decay_exponent(), self.decay_constant(theta));
        sector_grid(theta)
            .map(|z| {
                let r = z.norm();
                self.eval(z).norm() / (c * r.powf(s) / (1.0 + r).powf(2.0 * s))
            })
            .fold(0.0, f64::max)
    }

    /// `sup |f|` over `Sigma_theta`, estimated on the boundary rays.
    pub fn hinfty_norm(&self, theta: f64) -> f64 {
        sector_grid(theta).map(|z| self.eval(z).norm()).fold(0.0, f64::max)
    }
}

fn sector_grid(theta: f64) -> impl Iterator<Item = C64> {
    (0..=640).flat_map(move |k| {
        let r = 10f64.powf(-8.0 + k as f64 / 40.0);
        [theta, -theta, 0.0].into_iter().map(move |phi| C64::from_polar(r, phi))
    })
}

impl fmt::Display for SectorFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            Kind::Power(a) => write!(f, "power:{a}"),
            Kind::ExpRegularized { t, eps } => write!(f, "exp:{t}:{eps}"),
            Kind::Product(a, b) => write!(f, "({a})*({b})"),
        }
    }
}

/// Spectral data of `A`: nonnegative `psi` with `psi(e) = 0`.
#[derive(Debug, Clone)]
pub struct GeneratorData {
    group: Arc<FiniteGroup>,
    psi: Vec<f64>,
}

impl GeneratorData {
    pub fn new(psi: &SymbolFunction) -> Result<Self> {
        let values = psi.real_values(DEFAULT_TOL)?;
        let scale = values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        let tol = DEFAULT_TOL * scale;
        if values[0].abs() > tol {
            return Err(Error::InvalidArgument(format!("psi(e) = {} is not zero", values[0])));
        }
        if let Some(s) = values.iter().position(|&v| v < -tol) {
            return Err(Error::InvalidArgument(format!("psi({s}) = {} is negative", values[s])));
        }
        Ok(GeneratorData {
            group: psi.group().clone(),
            psi: values.iter().map(|&v| if v.abs() <= tol { 0.0 } else { v }).collect(),
        })
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn psi(&self) -> &[f64] {
        &self.psi
    }

    /// `max psi`, or 1 when `psi` vanishes identically.
    pub fn scale(&self) -> f64 {
        let m = self.psi.iter().copied().fold(0.0, f64::max);
        if m > 0.0 {
            m
        } else {
            1.0
        }
    }

    fn symbol(&self, values: Vec<C64>) -> SymbolFunction {
        SymbolFunction::new(self.group.clone(), values).expect("length matches")
    }
}

/// The multiplier `s -> (z - psi(s))^-1`.
pub fn resolvent(gen: &GeneratorData, z: C64) -> Result<SymbolFunction> {
    let mut values = Vec::with_capacity(gen.psi.len());
    for (s, &p) in gen.psi.iter().enumerate() {
        let d = z - p;
        if d.norm() <= 1e-14 * z.norm().max(1.0) {
            return Err(Error::Pole { z: format!("{z}"), element: s });
        }
        values.push(d.inv());
    }
    Ok(gen.symbol(values))
}

#[derive(Debug, Clone, Serialize)]
pub struct SectorialityReport {
    pub theta: f64,
    /// `max |lambda| ||(lambda - A)^-1||` over the grid: a lower bound for
    /// the sectoriality constant.
    pub estimate: f64,
    /// Largest pointwise bound `1 / sin(|arg lambda|)` (or 1 beyond `pi/2`)
    /// over the grid; `sup_bound` is its supremum over the complement of
    /// the sector.
    pub grid_bound: f64,
    pub sup_bound: f64,
    pub samples: usize,
}

/// For `psi >= 0`, `|lambda| / |lambda - x| <= 1 / sin(|arg lambda|)` when
/// `|arg lambda| < pi/2` and `<= 1` otherwise.
fn distance_bound(arg: f64) -> f64 {
    if arg >= PI / 2.0 {
        1.0
    } else {
        1.0 / arg.sin()
    }
}

pub fn sectoriality_constant(gen: &GeneratorData, theta: f64, grid: &[C64]) -> Result<SectorialityReport> {
    if !(theta > 0.0 && theta < PI) {
        return Err(Error::InvalidArgument(format!("sector angle must lie in (0, pi), got {theta}")));
    }
    let mut estimate = 0.0f64;
    let mut grid_bound = 0.0f64;
    for &l in grid {
        let arg = l.arg().abs();
        if l.norm() == 0.0 || arg <= theta {
            return Err(Error::InvalidArgument(format!("{l} lies in the closed sector of angle {theta}")));
        }
        resolvent(gen, l)?;
        for &p in &gen.psi {
            estimate = estimate.max(l.norm() / (l - p).norm());
        }
        grid_bound = grid_bound.max(distance_bound(arg));
    }
    Ok(SectorialityReport { theta, estimate, grid_bound, sup_bound: distance_bound(theta), samples: grid.len() })
}

#[derive(Debug, Clone, Serialize)]
pub struct QuadConfig {
    /// Required agreement of successive panel refinements.
    pub tol: f64,
    /// Bound on each neglected tail.
    pub tail_tol: f64,
    pub gauss_order: usize,
    /// Initial panel width in `u = ln r`.
    pub panel_width: f64,
    pub max_halvings: usize,
    pub max_extensions: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig {
            tol: 1e-10,
            tail_tol: 1e-12,
            gauss_order: 10,
            panel_width: 0.5,
            max_halvings: 10,
            max_extensions: 20,
        }
    }
}

impl QuadConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tail_tol > 0.0 && self.panel_width > 0.0) || self.gauss_order == 0 {
            return Err(Error::InvalidArgument("quadrature tolerances, panel width and order must be positive".into()));
        }
        Ok(())
    }
}

/// Integrand in `u` for the spectral value `a`: the two rays combined.
fn contour_integrand(f: &SectorFunction, a: f64, nu: f64, u: f64) -> C64 {
    let r = u.exp();
    let zp = C64::from_polar(r, nu);
    let zm = C64::from_polar(r, -nu);
    let v = f.eval(zm) * zm / (zm - a) - f.eval(zp) * zp / (zp - a);
    v / C64::new(0.0, 2.0 * PI)
}

/// `ln` of a truncation interval wide enough that both tails are below
/// `tail_tol`, starting from `[1e-8, 1e8] * scale`.
pub fn truncation(f: &SectorFunction, a: f64, nu: f64, scale: f64, quad: &QuadConfig) -> (f64, f64) {
    let s = f.decay_exponent();
    let step = 100f64.ln();
    let (mut lo, mut hi) = ((1e-8 * scale).ln(), (1e8 * scale).ln());
    for _ in 0..quad.max_extensions {
        if contour_integrand(f, a, nu, lo).norm() / s <= quad.tail_tol {
            break;
        }
        lo -= step;
    }
    for _ in 0..quad.max_extensions {
        if contour_integrand(f, a, nu, hi).norm() / s <= quad.tail_tol {
            break;
        }
        hi += step;
    }
    (lo, hi)
}

/// Composite Gauss-Legendre rule with `panels` equal panels on `[lo, hi]`.
pub fn contour_fixed(
    f: &SectorFunction,
    a: f64,
    nu: f64,
    (lo, hi): (f64, f64),
    panels: usize,
    rule: &GaussLegendre,
) -> C64 {
    let w = (hi - lo) / panels as f64;
    let mut sum = C64::new(0.0, 0.0);
    for k in 0..panels {
        let mid = lo + (k as f64 + 0.5) * w;
        for &(x, wt) in rule.as_node_weight_pairs() {
            sum += wt * contour_integrand(f, a, nu, mid + 0.5 * w * x);
        }
    }
    sum * (0.5 * w)
}

pub fn gauss_rule(order: usize) -> Result<GaussLegendre> {
    let n =
        NonZeroUsize::new(order).ok_or_else(|| Error::InvalidArgument("quadrature order must be positive".into()))?;
    Ok(GaussLegendre::new(n))
}

/// Contour value of `f(a)` for one spectral value `a > 0`.
pub fn contour_value(f: &SectorFunction, a: f64, nu: f64, scale: f64, quad: &QuadConfig) -> Result<C64> {
    quad.validate()?;
    let rule = gauss_rule(quad.gauss_order)?;
    let range = truncation(f, a, nu, scale, quad);
    let mut panels = ((range.1 - range.0) / quad.panel_width).ceil().max(1.0) as usize;
    let mut coarse = contour_fixed(f, a, nu, range, panels, &rule);
    let mut fine = coarse;
    for _ in 0..quad.max_halvings {
        panels *= 2;
        fine = contour_fixed(f, a, nu, range, panels, &rule);
        if (fine - coarse).norm() <= quad.tol {
            return Ok(fine);
        }
        coarse = fine;
    }
    Err(Error::Quadrature { value: a, coarse, fine })
}

fn check_angle(f: &SectorFunction, nu: f64) -> Result<()> {
    if !(nu > 0.0 && nu < f.max_angle()) {
        return Err(Error::InvalidArgument(format!("contour angle {nu} must lie in (0, {}) for {f}", f.max_angle())));
    }
    Ok(())
}

/// `f(A)` through the Cauchy integral; `psi(s) = 0` is sent to 0.
pub fn hinfty_apply(f: &SectorFunction, gen: &GeneratorData, nu: f64, quad: &QuadConfig) -> Result<SymbolFunction> {
    check_angle(f, nu)?;
    let scale = gen.scale();
    let mut cache: Vec<(f64, C64)> = Vec::new();
    let mut values = Vec::with_capacity(gen.psi.len());
    for &p in &gen.psi {
        if p == 0.0 {
            values.push(C64::new(0.0, 0.0));
            continue;
        }
        let v = match cache.iter().find(|(q, _)| *q == p) {
            Some(&(_, v)) => v,
            None => {
                let v = contour_value(f, p, nu, scale, quad)?;
                cache.push((p, v));
                v
            }
        };
        values.push(v);
    }
    Ok(gen.symbol(values))
}

/// `f(A)` by pointwise evaluation on the spectrum.
pub fn hinfty_apply_direct(f: &SectorFunction, gen: &GeneratorData) -> SymbolFunction {
    gen.symbol(gen.psi.iter().map(|&p| f.eval_spectral(p)).collect())
}

/// Errors of the fixed-step rule against the direct value as the panel
/// width is halved `levels - 1` times from `width`, on a truncation with
/// tails below `1e-15`.
pub fn halving_errors(
    f: &SectorFunction,
    a: f64,
    nu: f64,
    gauss_order: usize,
    width: f64,
    levels: usize,
) -> Result<Vec<f64>> {
    let quad = QuadConfig { tail_tol: 1e-15, ..QuadConfig::default() };
    let rule = gauss_rule(gauss_order)?;
    let range = truncation(f, a, nu, a, &quad);
    let exact = f.eval_spectral(a);
    let mut panels = ((range.1 - range.0) / width).ceil().max(1.0) as usize;
    let mut errors = Vec::with_capacity(levels);
    for _ in 0..levels {
        errors.push((contour_fixed(f, a, nu, range, panels, &rule) - exact).norm());
        panels *= 2;
    }
    Ok(errors)
}

#[derive(Debug, Clone, Serialize)]
pub struct NormEstimate {
    pub p: f64,
    /// `||f(A)||` on `L^2`: `max_s |f(psi(s))|`.
    pub p2_exact: f64,
    /// Best ratio `||f(A) x||_p / ||x||_p` found, over all amplifications.
    pub lower_bound: f64,
    /// Best ratio per amplification `k`.
    pub by_amplification: Vec<(usize, f64)>,
    pub theta: f64,
    pub hinfty_norm: f64,
    /// `lower_bound / hinfty_norm`.
    pub ratio: f64,
}

#[derive(Debug, Clone)]
pub struct NormSearch {
    pub amplifications: Vec<usize>,
    pub restarts: usize,
    pub iterations: usize,
    pub seed: u64,
}

impl Default for NormSearch {
    fn default() -> Self {
        NormSearch { amplifications: vec![1, 2], restarts: 4, iterations: 60, seed: 7 }
    }
}

/// Lower bound for `||f(A)||_{L^p -> L^p}`, amplified by `k x k` matrices
/// as a probe of the completely bounded norm. Basis elements `lambda_s`
/// give `|f(psi(s))|` exactly; random starts are improved by a
/// shrinking-step hill climb.
pub fn calculus_norm_estimate(
    f: &SectorFunction,
    gen: &GeneratorData,
    p: f64,
    theta: f64,
    search: &NormSearch,
) -> Result<NormEstimate> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::InvalidArgument(format!("norm estimates need 1 < p < inf, got {p}")));
    }
    let exponent = Exponent::new(p)?;
    let m: Vec<C64> = hinfty_apply_direct(f, gen).values().to_vec();
    let p2_exact = m.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let g = &gen.group;
    let n = g.order();
    let lambdas: Vec<DMatrix<C64>> = g.elements().map(|s| left_regular(g, s).expect("element")).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(search.seed);

    let mut by_amplification = Vec::new();
    for &k in &search.amplifications {
        let assemble = |blocks: &[DMatrix<C64>], weights: Option<&[C64]>| {
            let mut x = DMatrix::zeros(k * n, k * n);
            for (s, b) in blocks.iter().enumerate() {
                let w = weights.map_or(C64::new(1.0, 0.0), |w| w[s]);
                x += b.kronecker(&lambdas[s]) * w;
            }
            x
        };
        let ratio = |blocks: &[DMatrix<C64>]| {
            let x = normalized_schatten_norm(&assemble(blocks, None), exponent);
            if x == 0.0 {
                return 0.0;
            }
            normalized_schatten_norm(&assemble(blocks, Some(&m)), exponent) / x
        };
        let mut best = 0.0f64;
        for s in 0..n {
            let mut blocks = vec![DMatrix::zeros(k, k); n];
            blocks[s] = DMatrix::identity(k, k);
            best = best.max(ratio(&blocks));
        }
        let random_blocks = |rng: &mut ChaCha8Rng, scale: f64| -> Vec<DMatrix<C64>> {
            (0..n)
                .map(|_| {
                    DMatrix::from_fn(k, k, |_, _| {
                        C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) * scale
                    })
                })
                .collect()
        };
        for _ in 0..search.restarts {
            let mut x = random_blocks(&mut rng, 1.0);
            let mut value = ratio(&x);
            let mut step = 0.5;
            for _ in 0..search.iterations {
                let delta = random_blocks(&mut rng, step);
                let y: Vec<DMatrix<C64>> = x.iter().zip(&delta).map(|(a, d)| a + d).collect();
                let v = ratio(&y);
                if v > value {
                    x = y;
                    value = v;
                } else {
                    step *= 0.9;
                }
            }
            best = best.max(value);
        }
        by_amplification.push((k, best));
    }
    let lower_bound = by_amplification.iter().map(|&(_, v)| v).fold(p2_exact.min(0.0), f64::max);
    let hinfty_norm = f.hinfty_norm(theta);
    Ok(NormEstimate {
        p,
        p2_exact,
        lower_bound,
        by_amplification,
        theta,
        hinfty_norm,
        ratio: if hinfty_norm > 0.0 { lower_bound / hinfty_norm } else { 0.0 },
    })
}
