//! End-to-end verification of `T_t = E U_t J`: symbol, cocycle, crossed
//! product, and every side identity of the construction, under both time
//! conventions.
//!
//! Each suite produces a list of named [`Check`]s; a report passes iff every
//! check does, and the names of failing checks are collected in `failures`.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::GroupAlgebraElement;
use crate::cocycle::{self, Cocycle, DEFAULT_RANK_TOL};
use crate::crossed::{self, Convention, CrossedElement};
use crate::error::{Error, Result};
use crate::gauss::{mc_expectation, GaussExp, GaussianSampler};
use crate::symbols::{self, SymbolFunction};
use crate::C64;

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_T_GRID: [f64; 5] = [0.1, 0.5, 1.0, 2.0, 5.0];
pub const DEFAULT_SAMPLES: usize = 100_000;
pub const DEFAULT_SEED: u64 = 20_240_601;
const RANDOM_ELEMENTS: usize = 10;
const RANDOM_PAIRS: usize = 20;
const MC_SIGMAS: f64 = 5.0;
const PROBE_SIGMAS: f64 = 3.0;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub tol: f64,
    pub pass: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, residual: f64, tol: f64) -> Self {
        // NaN residuals fail
        Check { name: name.into(), residual, tol, pass: residual <= tol }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_checks(checks: &[Check]) -> Self {
        if checks.iter().all(|c| c.pass) {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn is_pass(self) -> bool {
        self == Verdict::Pass
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
        })
    }
}

fn failures(checks: &[Check]) -> Vec<String> {
    let mut names: Vec<String> = Vec::new();
    for c in checks.iter().filter(|c| !c.pass) {
        if !names.contains(&c.name) {
            names.push(c.name.clone());
        }
    }
    names
}

fn max_abs(it: impl IntoIterator<Item = f64>) -> f64 {
    // propagate NaN so that it fails the comparison downstream
    it.into_iter().fold(0.0, |acc, x| if x.is_nan() || acc.is_nan() { f64::NAN } else { acc.max(x) })
}

#[derive(Debug, Clone, Serialize)]
pub struct MarkovEntry {
    pub t: f64,
    /// `|phi_t(e) - 1|`.
    pub unital: f64,
    /// `max_s |Im phi_t(s)|`.
    pub selfadjoint: f64,
    pub min_eigenvalue: f64,
    pub effective_tol: f64,
    /// `max_s |tau(T_t lambda_s) - tau(lambda_s)|`.
    pub trace: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MarkovReport {
    pub verdict: Verdict,
    pub t_grid: Vec<f64>,
    pub entries: Vec<MarkovEntry>,
    /// `max |T_t T_t' lambda_s - T_{t+t'} lambda_s|` over grid pairs.
    pub semigroup_law: f64,
    pub checks: Vec<Check>,
    pub failures: Vec<String>,
}

/// Checks that `phi_t = exp(-t psi)` defines a semigroup of unital,
/// selfadjoint, completely positive, trace preserving multipliers on the
/// grid. `psi` need not be certified; a bad `psi` fails a named check.
pub fn verify_markov_semigroup(psi: &SymbolFunction, t_grid: &[f64], tol: f64) -> MarkovReport {
    let g = psi.group().clone();
    let phi = |t: f64| -> SymbolFunction {
        let values = psi.values().iter().map(|&v| (-v * t).exp()).collect();
        SymbolFunction::new(g.clone(), values).expect("length matches")
    };
    let mut entries = Vec::new();
    let mut checks = Vec::new();
    for &t in t_grid {
        let p = phi(t);
        let pd = symbols::is_positive_definite(&p, tol);
        let unital = (p.value(0) - 1.0).norm();
        let selfadjoint = max_abs(p.values().iter().map(|v| v.im.abs()));
        let trace = max_abs(g.elements().map(|s| {
            let x = GroupAlgebraElement::basis(g.clone(), s).expect("element");
            let y = symbols::multiplier_apply(&p, &x).expect("same group");
            (y.plancherel_trace() - x.plancherel_trace()).norm()
        }));
        let cp_defect = (-pd.min_eigenvalue).max(0.0).max(pd.hermitian_defect);
        checks.push(Check::new("unital", unital, tol));
        checks.push(Check::new("selfadjoint", selfadjoint, tol));
        checks.push(Check::new("completely_positive", cp_defect, pd.effective_tol));
        checks.push(Check::new("trace_preserving", trace, tol));
        entries.push(MarkovEntry {
            t,
            unital,
            selfadjoint,
            min_eigenvalue: pd.min_eigenvalue,
            effective_tol: pd.effective_tol,
            trace,
        });
    }
    let mut semigroup_law = 0.0f64;
    for &t in t_grid {
        for &u in t_grid {
            let (pt, pu, ptu) = (phi(t), phi(u), phi(t + u));
            for s in g.elements() {
                let x = GroupAlgebraElement::basis(g.clone(), s).expect("element");
                let lhs = symbols::multiplier_apply(&pt, &symbols::multiplier_apply(&pu, &x).unwrap()).unwrap();
                let rhs = symbols::multiplier_apply(&ptu, &x).unwrap();
                semigroup_law = max_abs([semigroup_law, lhs.max_abs_diff(&rhs)]);
            }
        }
    }
    checks.push(Check::new("semigroup_law", semigroup_law, tol));
    MarkovReport {
        verdict: Verdict::from_checks(&checks),
        t_grid: t_grid.to_vec(),
        entries,
        semigroup_law,
        failures: failures(&checks),
        checks,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Tolerances {
    /// Certification of `psi`.
    pub cert: f64,
    /// Dilation identity, cocycle and algebraic identities.
    pub dilation: f64,
    /// `phi o J = phi_G`.
    pub weight_j: f64,
    pub rank: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { cert: symbols::DEFAULT_TOL, dilation: 1e-10, weight_j: 1e-12, rank: DEFAULT_RANK_TOL }
    }
}

#[derive(Debug, Clone)]
pub struct DilationOptions {
    pub group_id: String,
    pub psi_id: String,
    pub t_grid: Vec<f64>,
    pub conventions: Vec<Convention>,
    pub tol: Tolerances,
    pub seed: u64,
    pub samples: usize,
}

impl Default for DilationOptions {
    fn default() -> Self {
        DilationOptions {
            group_id: String::new(),
            psi_id: String::new(),
            t_grid: DEFAULT_T_GRID.to_vec(),
            conventions: vec![Convention::A, Convention::B],
            tol: Tolerances::default(),
            seed: DEFAULT_SEED,
            samples: DEFAULT_SAMPLES,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CocycleSummary {
    pub dim: usize,
    pub construction_residual: f64,
    pub cocycle_residual: f64,
    pub homomorphism_residual: f64,
    pub orthogonality_residual: f64,
    pub norm_identity_residual: f64,
}

/// Residuals at one time and one convention.
#[derive(Debug, Clone, Serialize)]
pub struct ConventionEntry {
    pub convention: Convention,
    /// The time at which `E U_t J` is compared: `t` under B, `t^2` under A.
    pub realized_time: f64,
    /// `max_s |E U_t J(lambda_s) - exp(-realized_time psi(s)) lambda_s|`.
    pub dilation: f64,
    /// Same comparison on random group-algebra elements.
    pub random_elements: f64,
    /// `max_s |E U_t J(lambda_s) - T_t(lambda_s)|`; informative under A.
    pub deviation_from_t_t: f64,
    pub weight_preservation: f64,
    /// `U_t(fg) = U_t(f) U_t(g)` and `U_t(f*) = U_t(f)*` on random pairs.
    pub star_homomorphism: f64,
    /// `u_t(sr) = u_t(s) alpha_s(u_t(r))`.
    pub takesaki: f64,
    /// `phi(J(x) U_t J(y)) = tau(x T_t(y))`; B only.
    pub factorization: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TimeEntry {
    pub t: f64,
    pub conventions: Vec<ConventionEntry>,
}

#[derive(Debug, Clone, Serialize)]
pub struct McCheck {
    pub element: usize,
    pub t: f64,
    pub convention: Convention,
    pub estimate: C64,
    pub exact: C64,
    pub stderr: f64,
    pub z_score: f64,
    pub samples: usize,
}

/// Monte Carlo estimate of `E(exp(i W(sqrt(2) t b)))` for `||b||^2 = 1`,
/// compared with the two candidate closed forms.
#[derive(Debug, Clone, Serialize)]
pub struct ExponentProbe {
    pub t: f64,
    pub norm_sq: f64,
    pub estimate: f64,
    pub stderr: f64,
    /// `exp(-t^2 ||b||^2)`.
    pub quadratic: f64,
    /// `exp(-t ||b||^2)`.
    pub linear: f64,
    pub z_quadratic: f64,
    pub z_linear: f64,
    pub resolved: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct DilationReport {
    pub schema_version: u32,
    pub group_id: String,
    pub psi_id: String,
    pub order: usize,
    pub cocycle_dim: usize,
    pub t_grid: Vec<f64>,
    pub conventions: Vec<Convention>,
    pub seed: u64,
    pub samples: usize,
    pub tolerances: Tolerances,
    pub cocycle: CocycleSummary,
    pub markov: MarkovReport,
    pub per_t: Vec<TimeEntry>,
    /// `U_t U_t' = U_{t+t'}` under A, frequency level; `None` if A is not run.
    pub group_law_a: Option<f64>,
    pub weight: WeightReport,
    pub mc: Option<McCheck>,
    pub exponent_probe: ExponentProbe,
    pub notes: Vec<String>,
    pub checks: Vec<Check>,
    pub verdict: Verdict,
    pub failures: Vec<String>,
}

/// Certifies `psi`, extracts its cocycle and runs every suite.
pub fn verify_dilation(psi: &SymbolFunction, opts: &DilationOptions) -> Result<DilationReport> {
    let cert = symbols::is_cond_negative_type(psi, opts.tol.cert)?;
    if !cert.verdict {
        return Err(Error::NotCertified(cert.failure.unwrap_or_default()));
    }
    let c = cocycle::extract_cocycle(psi, opts.tol.rank)?;
    verify_dilation_with_cocycle(psi, Arc::new(c), opts)
}

fn expected_multiplier(psi: &[f64], time: f64, x: &GroupAlgebraElement) -> GroupAlgebraElement {
    let coeffs = x.coeffs().iter().zip(psi).map(|(c, p)| c * (-time * p).exp()).collect();
    GroupAlgebraElement::from_coeffs(x.group().clone(), coeffs).expect("length matches")
}

/// Runs every suite against a given cocycle, which may be faulty; faults
/// surface as failed checks rather than errors.
pub fn verify_dilation_with_cocycle(
    psi: &SymbolFunction,
    c: Arc<Cocycle>,
    opts: &DilationOptions,
) -> Result<DilationReport> {
    if !psi.group().is_same(c.group()) {
        return Err(Error::GroupMismatch);
    }
    if opts.conventions.is_empty() {
        return Err(Error::InvalidArgument("no convention selected".into()));
    }
    if opts.conventions.contains(&Convention::B) {
        if let Some(t) = opts.t_grid.iter().find(|&&t| t.is_nan() || t < 0.0) {
            return Err(Error::InvalidArgument(format!("convention B needs t >= 0, got {t}")));
        }
    }
    let tol = opts.tol.dilation;
    let psi_re = psi.real_values(opts.tol.cert)?;
    let g = c.group().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut checks = Vec::new();
    let mut notes = Vec::new();

    let law = cocycle::verify_cocycle_law(&c, tol);
    let norm = cocycle::verify_norm_identity(&c, psi, tol)?;
    checks.push(Check::new("cocycle_law", law.cocycle_residual, tol));
    checks.push(Check::new("pi_homomorphism", law.homomorphism_residual, tol));
    checks.push(Check::new("pi_orthogonal", law.orthogonality_residual, tol));
    checks.push(Check::new("norm_identity", norm.residual, tol));
    let cocycle_summary = CocycleSummary {
        dim: c.dim(),
        construction_residual: c.construction_residual(),
        cocycle_residual: law.cocycle_residual,
        homomorphism_residual: law.homomorphism_residual,
        orthogonality_residual: law.orthogonality_residual,
        norm_identity_residual: norm.residual,
    };

    let markov = verify_markov_semigroup(psi, &opts.t_grid, tol);
    checks.extend(markov.checks.iter().map(|ch| Check { name: format!("markov.{}", ch.name), ..ch.clone() }));

    let lambdas: Vec<CrossedElement> = g
        .elements()
        .map(|s| {
            let x = GroupAlgebraElement::basis(g.clone(), s).expect("element");
            crossed::embed_j(&x, &c).expect("same group")
        })
        .collect();
    let xs: Vec<GroupAlgebraElement> =
        (0..RANDOM_ELEMENTS).map(|_| GroupAlgebraElement::random(g.clone(), &mut rng)).collect();
    let pairs: Vec<(CrossedElement, CrossedElement)> = (0..3)
        .map(|_| (CrossedElement::random(c.clone(), 2, &mut rng), CrossedElement::random(c.clone(), 2, &mut rng)))
        .collect();

    let mut per_t = Vec::new();
    for &t in &opts.t_grid {
        let mut entries = Vec::new();
        for &conv in &opts.conventions {
            let realized_time = match conv {
                Convention::A => t * t,
                Convention::B => t,
            };
            let mut dilation = 0.0f64;
            let mut deviation = 0.0f64;
            for (s, l) in lambdas.iter().enumerate() {
                let got = crossed::cond_expectation(&crossed::apply_ut(l, t, conv)?);
                let x = GroupAlgebraElement::basis(g.clone(), s)?;
                dilation = max_abs([dilation, got.max_abs_diff(&expected_multiplier(&psi_re, realized_time, &x))]);
                deviation = max_abs([deviation, got.max_abs_diff(&expected_multiplier(&psi_re, t, &x))]);
            }
            let mut random_elements = 0.0f64;
            for x in &xs {
                let got = crossed::cond_expectation(&crossed::apply_ut(&crossed::embed_j(x, &c)?, t, conv)?);
                random_elements =
                    max_abs([random_elements, got.max_abs_diff(&expected_multiplier(&psi_re, realized_time, x))]);
            }
            let mut weight_preservation = 0.0f64;
            let mut star_homomorphism = 0.0f64;
            for (f, h) in &pairs {
                let uf = crossed::apply_ut(f, t, conv)?;
                let uh = crossed::apply_ut(h, t, conv)?;
                let w0 = crossed::weight_pair(f, f)?;
                let w1 = crossed::weight_pair(&uf, &uf)?;
                weight_preservation = max_abs([weight_preservation, (w0 - w1).norm()]);
                let prod = crossed::apply_ut(&f.mul(h)?, t, conv)?.distance(&uf.mul(&uh)?);
                let adj = crossed::apply_ut(&f.adjoint(), t, conv)?.distance(&uf.adjoint());
                star_homomorphism = max_abs([star_homomorphism, prod, adj]);
            }
            let takesaki = crossed::takesaki_residual(&c, t, conv)?;
            let factorization = match conv {
                Convention::B => {
                    let mut worst = 0.0f64;
                    for pair in xs.chunks(2) {
                        let (x, y) = (&pair[0], &pair[pair.len() - 1]);
                        let lhs = crossed::embed_j(x, &c)?
                            .mul(&crossed::apply_ut(&crossed::embed_j(y, &c)?, t, conv)?)?
                            .weight();
                        let rhs = x.try_mul(&expected_multiplier(&psi_re, t, y))?.plancherel_trace();
                        worst = max_abs([worst, (lhs - rhs).norm()]);
                    }
                    Some(worst)
                }
                Convention::A => None,
            };
            let tag = match conv {
                Convention::A => "A",
                Convention::B => "B",
            };
            checks.push(Check::new(format!("dilation_identity_{tag}"), dilation, tol));
            checks.push(Check::new(format!("dilation_random_{tag}"), random_elements, tol));
            checks.push(Check::new(format!("weight_preservation_{tag}"), weight_preservation, tol));
            checks.push(Check::new(format!("star_homomorphism_{tag}"), star_homomorphism, tol));
            checks.push(Check::new(format!("takesaki_{tag}"), takesaki, tol));
            if let Some(f) = factorization {
                checks.push(Check::new("factorization", f, tol));
            }
            entries.push(ConventionEntry {
                convention: conv,
                realized_time,
                dilation,
                random_elements,
                deviation_from_t_t: deviation,
                weight_preservation,
                star_homomorphism,
                takesaki,
                factorization,
            });
        }
        per_t.push(TimeEntry { t, conventions: entries });
    }

    let group_law_a = if opts.conventions.contains(&Convention::A) {
        let mut times: Vec<f64> = opts.t_grid.clone();
        times.extend(opts.t_grid.iter().map(|t| -t));
        let subjects: Vec<&CrossedElement> = lambdas.iter().chain(pairs.iter().map(|(f, _)| f)).collect();
        let mut worst = 0.0f64;
        for &t in &times {
            for &u in &opts.t_grid {
                for f in &subjects {
                    let lhs = crossed::apply_ut(&crossed::apply_ut(f, u, Convention::A)?, t, Convention::A)?;
                    let rhs = crossed::apply_ut(f, t + u, Convention::A)?;
                    worst = max_abs([worst, lhs.distance(&rhs)]);
                }
            }
        }
        checks.push(Check::new("group_law_A", worst, tol));
        notes.push("convention A realizes T_{t^2}: E U_t J = T_{t^2}, and (U_t) is a group in t".into());
        Some(worst)
    } else {
        None
    };
    if opts.conventions.contains(&Convention::B) {
        notes.push("convention B realizes T_t for each fixed t >= 0".into());
    }

    let weight = weight_suite(psi, &c, &opts.tol, &mut rng)?;
    checks.extend(weight.checks.iter().map(|ch| Check { name: format!("weight.{}", ch.name), ..ch.clone() }));

    let mc = mc_check(&c, &psi_re, opts)?;
    if let Some(m) = &mc {
        checks.push(Check::new("monte_carlo", m.z_score.abs(), MC_SIGMAS));
    }
    let exponent_probe = exponent_probe(opts.samples, opts.seed.wrapping_add(1))?;
    notes.push(format!("E(exp(i sqrt(2) t W(b))) at t = 1.5, ||b||^2 = 1 matches {}", exponent_probe.resolved));
    checks.push(Check::new("exponent_probe", exponent_probe.z_quadratic.abs(), PROBE_SIGMAS));

    Ok(DilationReport {
        schema_version: SCHEMA_VERSION,
        group_id: opts.group_id.clone(),
        psi_id: opts.psi_id.clone(),
        order: g.order(),
        cocycle_dim: c.dim(),
        t_grid: opts.t_grid.clone(),
        conventions: opts.conventions.clone(),
        seed: opts.seed,
        samples: opts.samples,
        tolerances: opts.tol.clone(),
        cocycle: cocycle_summary,
        markov,
        per_t,
        group_law_a,
        weight,
        mc,
        exponent_probe,
        notes,
        verdict: Verdict::from_checks(&checks),
        failures: failures(&checks),
        checks,
    })
}

/// One `(s, t)` pair: `s` maximizing `psi`, `t` the first positive grid
/// time, first selected convention.
fn mc_check(c: &Arc<Cocycle>, psi: &[f64], opts: &DilationOptions) -> Result<Option<McCheck>> {
    let Some(&t) = opts.t_grid.iter().find(|&&t| t > 0.0) else {
        return Ok(None);
    };
    if c.dim() == 0 {
        return Ok(None);
    }
    let conv = opts.conventions[0];
    let s = (0..psi.len()).max_by(|&a, &b| psi[a].total_cmp(&psi[b])).unwrap_or(0);
    let scale = conv.frequency_scale(t)?;
    let h: Vec<f64> = c.b(s).iter().map(|x| scale * x).collect();
    let a = GaussExp::exponential(&h);
    let sampler = GaussianSampler::new(c.dim(), opts.samples, opts.seed)?;
    let est = mc_expectation(&a, &sampler)?;
    let exact = a.expectation();
    Ok(Some(McCheck {
        element: s,
        t,
        convention: conv,
        estimate: est.estimate,
        exact,
        stderr: est.stderr,
        z_score: est.z_score(exact),
        samples: opts.samples,
    }))
}

pub fn exponent_probe(samples: usize, seed: u64) -> Result<ExponentProbe> {
    let (t, norm_sq) = (1.5, 1.0);
    let a = GaussExp::exponential(&[std::f64::consts::SQRT_2 * t * f64::sqrt(norm_sq)]);
    let est = mc_expectation(&a, &GaussianSampler::new(1, samples, seed)?)?;
    let quadratic = (-t * t * norm_sq).exp();
    let linear = (-t * norm_sq).exp();
    let z = |v: f64| est.z_score(C64::new(v, 0.0));
    let (z_quadratic, z_linear) = (z(quadratic), z(linear));
    let resolved = match (z_quadratic.abs() <= PROBE_SIGMAS, z_linear.abs() <= PROBE_SIGMAS) {
        (true, false) => "exp(-t^2 ||b||^2)",
        (false, true) => "exp(-t ||b||^2)",
        (true, true) => "both (inconclusive)",
        (false, false) => "neither",
    };
    Ok(ExponentProbe {
        t,
        norm_sq,
        estimate: est.estimate.re,
        stderr: est.stderr,
        quadratic,
        linear,
        z_quadratic,
        z_linear,
        resolved: resolved.into(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct WeightReport {
    pub verdict: Verdict,
    /// `max |phi(J(x)* J(x)) - tau(x* x)|` over random `x`.
    pub phi_j: f64,
    /// `max |phi(U_t f, U_t f) - phi(f, f)|`, both conventions, `t in {0.3, 1, 2}`.
    pub weight_preservation: f64,
    /// `max |phi(fg) - phi(gf)|` over random pairs.
    pub traciality: f64,
    /// `max |E(J(x)) - x|`; exact.
    pub expectation_j: f64,
    /// Modular flows are trivial; they must commute with `J`.
    pub modular: f64,
    pub cocycle_law: f64,
    pub checks: Vec<Check>,
    pub failures: Vec<String>,
}

/// The weight and trace suite for `psi`; extracts the cocycle first.
pub fn verify_weight_compat(psi: &SymbolFunction, tol: f64, seed: u64) -> Result<WeightReport> {
    let c = cocycle::extract_cocycle(psi, DEFAULT_RANK_TOL)?;
    verify_weight_compat_with_cocycle(psi, &Arc::new(c), tol, seed)
}

pub fn verify_weight_compat_with_cocycle(
    psi: &SymbolFunction,
    c: &Arc<Cocycle>,
    tol: f64,
    seed: u64,
) -> Result<WeightReport> {
    let tols = Tolerances { dilation: tol, ..Tolerances::default() };
    weight_suite(psi, c, &tols, &mut ChaCha8Rng::seed_from_u64(seed))
}

fn weight_suite(
    psi: &SymbolFunction,
    c: &Arc<Cocycle>,
    tol: &Tolerances,
    rng: &mut ChaCha8Rng,
) -> Result<WeightReport> {
    if !psi.group().is_same(c.group()) {
        return Err(Error::GroupMismatch);
    }
    let g = c.group().clone();
    let mut phi_j = 0.0f64;
    let mut expectation_j = 0.0f64;
    let mut modular = 0.0f64;
    for _ in 0..RANDOM_PAIRS {
        let x = GroupAlgebraElement::random(g.clone(), rng);
        let jx = crossed::embed_j(&x, c)?;
        let lhs = crossed::weight_pair(&jx, &jx)?;
        let rhs = x.adjoint().try_mul(&x)?.plancherel_trace();
        phi_j = max_abs([phi_j, (lhs - rhs).norm()]);
        expectation_j = max_abs([expectation_j, crossed::cond_expectation(&jx).max_abs_diff(&x)]);
        let flowed = crossed::modular_flow(&jx, 0.7);
        let other = crossed::embed_j(&crossed::modular_flow_group(&x, 0.7), c)?;
        modular = max_abs([modular, flowed.distance(&other)]);
    }
    let mut weight_preservation = 0.0f64;
    let mut traciality = 0.0f64;
    for _ in 0..RANDOM_PAIRS {
        let f = CrossedElement::random(c.clone(), 2, rng);
        let h = CrossedElement::random(c.clone(), 2, rng);
        let fh = f.mul(&h)?.weight();
        let hf = h.mul(&f)?.weight();
        traciality = max_abs([traciality, (fh - hf).norm()]);
        for t in [0.3, 1.0, 2.0] {
            for conv in [Convention::A, Convention::B] {
                let uf = crossed::apply_ut(&f, t, conv)?;
                let d = crossed::weight_pair(&uf, &uf)? - crossed::weight_pair(&f, &f)?;
                weight_preservation = max_abs([weight_preservation, d.norm()]);
            }
        }
    }
    let cocycle_law = cocycle::verify_cocycle_law(c, tol.dilation).cocycle_residual;
    let checks = vec![
        Check::new("phi_j", phi_j, tol.weight_j),
        Check::new("weight_preservation", weight_preservation, tol.dilation),
        Check::new("traciality", traciality, tol.dilation),
        Check::new("expectation_j", expectation_j, 0.0),
        Check::new("modular_flow", modular, 0.0),
        Check::new("cocycle_law", cocycle_law, tol.dilation),
    ];
    Ok(WeightReport {
        verdict: Verdict::from_checks(&checks),
        phi_j,
        weight_preservation,
        traciality,
        expectation_j,
        modular,
        cocycle_law,
        failures: failures(&checks),
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::group::FiniteGroup;

    fn z2(values: &[f64]) -> SymbolFunction {
        SymbolFunction::from_real(Arc::new(FiniteGroup::cyclic(2).unwrap()), values).unwrap()
    }

    fn quick() -> DilationOptions {
        DilationOptions { samples: 20_000, ..DilationOptions::default() }
    }

    #[test]
    fn markov_examples() {
        let r = verify_markov_semigroup(&z2(&[0.0, 1.0]), &[0.5, 1.0], 1e-10);
        assert_eq!(r.verdict, Verdict::Pass);
        // closed form: eigenvalues 1 +- exp(-t)
        assert!((r.entries[0].min_eigenvalue - (1.0 - (-0.5f64).exp())).abs() < 1e-12);
        let r = verify_markov_semigroup(&z2(&[0.0, 0.0]), &DEFAULT_T_GRID, 1e-10);
        assert_eq!(r.verdict, Verdict::Pass);
        let r = verify_markov_semigroup(&z2(&[0.0, -1.0]), &[0.5, 1.0], 1e-10);
        assert_eq!(r.verdict, Verdict::Fail);
        assert!(r.failures.contains(&"completely_positive".to_string()));
        assert!((r.entries[1].min_eigenvalue - (1.0 - 1f64.exp())).abs() < 1e-12);
    }

    #[test]
    fn z2_dilation_at_t_two() {
        let opts = DilationOptions { t_grid: vec![2.0], ..quick() };
        let r = verify_dilation(&z2(&[0.0, 1.0]), &opts).unwrap();
        assert_eq!(r.verdict, Verdict::Pass, "{:?}", r.failures);
        let entries = &r.per_t[0].conventions;
        let a = entries.iter().find(|e| e.convention == Convention::A).unwrap();
        let b = entries.iter().find(|e| e.convention == Convention::B).unwrap();
        assert!(b.dilation < 1e-12);
        assert_eq!(a.realized_time, 4.0);
        assert!(a.dilation < 1e-12);
        assert!((a.deviation_from_t_t - ((-2f64).exp() - (-4f64).exp())).abs() < 1e-12);
        assert!(r.notes.iter().any(|n| n.contains("A realizes T_{t^2}")));
    }

    #[test]
    fn time_zero_is_exact() {
        let f = catalog::builtin("s3-word").unwrap();
        let opts = DilationOptions { t_grid: vec![0.0], ..quick() };
        let r = verify_dilation(&f.psi, &opts).unwrap();
        for e in &r.per_t[0].conventions {
            assert_eq!(e.dilation, 0.0);
        }
    }

    #[test]
    fn builtins_pass() {
        for f in catalog::all_builtins() {
            let r = verify_dilation(&f.psi, &quick()).unwrap();
            assert_eq!(r.verdict, Verdict::Pass, "{}: {:?}", f.name, r.failures);
        }
    }

    #[test]
    fn weight_compat_examples() {
        let f = catalog::builtin("z3-circle").unwrap();
        let r = verify_weight_compat(&f.psi, 1e-10, 1).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        assert!(r.phi_j < 1e-10 && r.traciality < 1e-10 && r.weight_preservation < 1e-10);
        let r = verify_weight_compat(&z2(&[0.0, 0.0]), 1e-10, 1).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
    }

    #[test]
    fn flipped_pi_is_caught() {
        let f = catalog::builtin("z3-circle").unwrap();
        let c = cocycle::extract_cocycle(&f.psi, DEFAULT_RANK_TOL).unwrap();
        let bad = Arc::new(c.with_flipped_pi(1).unwrap());
        let r = verify_weight_compat_with_cocycle(&f.psi, &bad, 1e-10, 1).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
        assert!(r.failures.contains(&"cocycle_law".to_string()));
        let r = verify_dilation_with_cocycle(&f.psi, bad, &quick()).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
        assert!(r.failures.contains(&"cocycle_law".to_string()));
        assert!(r.failures.iter().any(|n| n.starts_with("takesaki")));
    }

    #[test]
    fn exponent_probe_prefers_quadratic() {
        let p = exponent_probe(100_000, 11).unwrap();
        assert_eq!(p.resolved, "exp(-t^2 ||b||^2)");
        assert!(p.z_linear.abs() > 10.0);
    }

    #[test]
    fn uncertified_psi_is_refused() {
        assert!(matches!(verify_dilation(&z2(&[0.0, -1.0]), &quick()), Err(Error::NotCertified(_))));
        let opts = DilationOptions { t_grid: vec![-1.0], ..quick() };
        assert!(verify_dilation(&z2(&[0.0, 1.0]), &opts).is_err());
    }

    #[test]
    fn reports_are_deterministic() {
        let f = catalog::builtin("z4-circle").unwrap();
        let a = serde_json::to_string(&verify_dilation(&f.psi, &quick()).unwrap()).unwrap();
        let b = serde_json::to_string(&verify_dilation(&f.psi, &quick()).unwrap()).unwrap();
        assert_eq!(a, b);
    }
}
