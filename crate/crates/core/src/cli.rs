//! The `fdil` command line.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails, 2 for usage,
//! parse and I/O errors. JSON reports are wrapped in an envelope carrying the
//! schema version and the hash of the effective configuration.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::algebra::{left_regular, matrix_to_csv};
use crate::cocycle::{self, Cocycle};
use crate::config::RunConfig;
use crate::crossed::Convention;
use crate::dilation::{self, DilationOptions, Tolerances, SCHEMA_VERSION};
use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::hcalc::{self, GeneratorData, NormSearch, QuadConfig, SectorFunction};
use crate::symbols;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Contour results count as correct within this distance of the direct
/// evaluation.
pub const HCALC_CHECK_TOL: f64 = 1e-6;

#[derive(Debug, Parser)]
#[command(
    name = "fdil",
    version,
    about = "Verify dilations of Fourier multiplier semigroups on finite groups",
    after_help = "Groups: `cyclic N` (`zN`), `dihedral N` (`dN`), `symmetric N` (`sN`, N <= 5), \
products joined by ` x `, or a Cayley-table file.\n\
Symbols: zero, delta[:C], circle, word-length, or a symbol file.\n\
Builtins: z2-delta, z3-circle, z4-circle, z8-circle, s3-word."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a group and print its structure.
    ValidateGroup {
        #[command(flatten)]
        common: Common,
        /// Print the left regular matrix of this element as CSV instead.
        #[arg(long, value_name = "S")]
        lambda: Option<usize>,
        /// Overwrite one Cayley entry before validating: `cayley:ROW:COL:VALUE`.
        #[arg(long, value_name = "FAULT")]
        inject_fault: Option<String>,
    },
    /// Certify that psi is conditionally of negative type.
    CheckSymbol {
        #[command(flatten)]
        common: Common,
    },
    /// Extract the 1-cocycle of psi and verify it.
    Cocycle {
        #[command(flatten)]
        common: Common,
        /// Negate one matrix pi_S: `pi:S`.
        #[arg(long, value_name = "FAULT")]
        inject_fault: Option<String>,
    },
    /// Run the full dilation pipeline.
    Dilate {
        #[command(flatten)]
        common: Common,
        /// Negate one matrix pi_S: `pi:S`.
        #[arg(long, value_name = "FAULT")]
        inject_fault: Option<String>,
    },
    /// Compare the contour functional calculus against direct evaluation.
    Hcalc {
        #[command(flatten)]
        common: Common,
        /// Contour angle in radians.
        #[arg(long)]
        angle: Option<f64>,
        /// Sector angle for the H-infinity norm, in radians.
        #[arg(long)]
        theta: Option<f64>,
        /// Estimate L^p norms of f(A) for this p.
        #[arg(long)]
        p: Option<f64>,
        /// Comma-separated functions, e.g. `power:0.5,power:1,exp:0.1:1e-6`.
        #[arg(long)]
        family: Option<String>,
    },
}

#[derive(Debug, Args)]
pub struct Common {
    /// TOML configuration file; flags override its entries.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub builtin: Option<String>,
    /// Group family description.
    #[arg(long)]
    pub group: Option<String>,
    /// Cayley-table file.
    #[arg(long, conflicts_with = "group")]
    pub group_file: Option<PathBuf>,
    /// Named symbol.
    #[arg(long)]
    pub psi: Option<String>,
    /// Symbol file with lines `index re [im]`.
    #[arg(long, conflicts_with = "psi")]
    pub psi_file: Option<PathBuf>,
    /// Comma-separated times.
    #[arg(long, value_delimiter = ',')]
    pub t_grid: Option<Vec<f64>>,
    #[arg(long)]
    pub cert_tol: Option<f64>,
    #[arg(long)]
    pub dilation_tol: Option<f64>,
    #[arg(long)]
    pub quad_tol: Option<f64>,
    /// Monte Carlo sample count.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// `A`, `B` or `both`.
    #[arg(long)]
    pub convention: Option<String>,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

impl Common {
    fn config(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if let Some(b) = &self.builtin {
            cfg.builtin = Some(b.clone());
        }
        if let Some(g) = &self.group {
            cfg.group = Some(g.clone());
            cfg.builtin = None;
        }
        if let Some(path) = &self.group_file {
            cfg.group = Some(format!("file:{}", path.display()));
            cfg.builtin = None;
        }
        if let Some(p) = &self.psi {
            cfg.psi = Some(p.clone());
        }
        if let Some(path) = &self.psi_file {
            cfg.psi = Some(format!("file:{}", path.display()));
        }
        if let Some(t) = &self.t_grid {
            cfg.t_grid = t.clone();
        }
        if let Some(v) = self.cert_tol {
            cfg.tolerances.cert = v;
        }
        if let Some(v) = self.dilation_tol {
            cfg.tolerances.dilation = v;
        }
        if let Some(v) = self.quad_tol {
            cfg.tolerances.quad = v;
        }
        if let Some(v) = self.samples {
            cfg.samples = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(c) = &self.convention {
            cfg.conventions = match c.trim() {
                "both" | "AB" => vec![Convention::A, Convention::B],
                other => vec![other.parse()?],
            };
        }
        if let Some(o) = &self.output {
            cfg.output = Some(o.clone());
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    schema_version: u32,
    command: &'a str,
    config_hash: String,
    verdict: &'static str,
    report: T,
}

fn verdict_str(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

struct Io<'a> {
    stdout: &'a mut dyn Write,
    stderr: &'a mut dyn Write,
}

impl Io<'_> {
    fn emit(&mut self, cfg: &RunConfig, text: &str) -> Result<()> {
        match &cfg.output {
            Some(path) => std::fs::write(path, text)?,
            None => self.stdout.write_all(text.as_bytes())?,
        }
        Ok(())
    }

    fn emit_json<T: Serialize>(&mut self, cfg: &RunConfig, command: &str, pass: bool, report: T) -> Result<i32> {
        let env = Envelope {
            schema_version: SCHEMA_VERSION,
            command,
            config_hash: cfg.hash(),
            verdict: verdict_str(pass),
            report,
        };
        let mut text = serde_json::to_string_pretty(&env)?;
        text.push('\n');
        self.emit(cfg, &text)?;
        Ok(if pass { EXIT_PASS } else { EXIT_FAIL })
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { stderr.write_all(text.as_bytes()) } else { stdout.write_all(text.as_bytes()) };
            return code;
        }
    };
    let mut io = Io { stdout, stderr };
    match dispatch(&cli.command, &mut io) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(io.stderr, "error: {e}");
            match e {
                Error::Quadrature { .. } | Error::Construction { .. } | Error::NotCertified(_) => EXIT_FAIL,
                _ => EXIT_USAGE,
            }
        }
    }
}

fn dispatch(command: &Command, io: &mut Io) -> Result<i32> {
    match command {
        Command::ValidateGroup { common, lambda, inject_fault } => {
            cmd_validate_group(&common.config()?, *lambda, inject_fault.as_deref(), io)
        }
        Command::CheckSymbol { common } => cmd_check_symbol(&common.config()?, io),
        Command::Cocycle { common, inject_fault } => cmd_cocycle(&common.config()?, inject_fault.as_deref(), io),
        Command::Dilate { common, inject_fault } => cmd_dilate(&common.config()?, inject_fault.as_deref(), io),
        Command::Hcalc { common, angle, theta, p, family } => {
            let mut cfg = common.config()?;
            if let Some(a) = angle {
                cfg.hcalc.angle = *a;
            }
            if let Some(t) = theta {
                cfg.hcalc.theta = *t;
            }
            if let Some(p) = p {
                cfg.hcalc.p = Some(*p);
            }
            if let Some(f) = family {
                cfg.hcalc.family = f.clone();
            }
            cmd_hcalc(&cfg, io)
        }
    }
}

fn parse_index(s: &str, what: &str) -> Result<usize> {
    s.trim().parse().map_err(|_| Error::InvalidArgument(format!("bad {what} `{s}` in fault spec")))
}

#[derive(Serialize)]
struct GroupSummary {
    group_id: String,
    order: usize,
    family: String,
    identity: usize,
    inverses: Vec<usize>,
    generators: Vec<usize>,
}

#[derive(Serialize)]
struct GroupFailure {
    group_id: String,
    failures: Vec<&'static str>,
    detail: String,
}

fn cmd_validate_group(cfg: &RunConfig, lambda: Option<usize>, fault: Option<&str>, io: &mut Io) -> Result<i32> {
    let (group_id, mut group) = cfg.group()?;
    if let Some(spec) = fault {
        let parts: Vec<&str> = spec.split(':').collect();
        let ["cayley", r, c, v] = parts.as_slice() else {
            return Err(Error::InvalidArgument(format!("expected cayley:ROW:COL:VALUE, got `{spec}`")));
        };
        let (r, c, v) = (parse_index(r, "row")?, parse_index(c, "column")?, parse_index(v, "value")?);
        let mut rows = group.cayley_rows();
        if r >= rows.len() || c >= rows.len() {
            return Err(Error::InvalidArgument(format!("entry ({r}, {c}) outside the table")));
        }
        rows[r][c] = v;
        group = match FiniteGroup::from_table(rows) {
            Ok(g) => g,
            Err(Error::GroupAxiom(axiom)) => {
                let report = GroupFailure { group_id, failures: vec![axiom.invariant()], detail: axiom.to_string() };
                return io.emit_json(cfg, "validate-group", false, report);
            }
            Err(e) => return Err(e),
        };
    }
    if let Some(s) = lambda {
        let csv = matrix_to_csv(&left_regular(&group, s)?);
        io.emit(cfg, &csv)?;
        return Ok(EXIT_PASS);
    }
    let report = GroupSummary {
        group_id,
        order: group.order(),
        family: group.family().to_string(),
        identity: group.identity(),
        inverses: group.elements().map(|s| group.inv(s)).collect(),
        generators: group.generators().to_vec(),
    };
    io.emit_json(cfg, "validate-group", true, report)
}

/// Loading a table file reports axiom violations as errors; surface them as
/// a failed verdict rather than a usage error.
fn load_subject(
    cfg: &RunConfig,
    command: &str,
    io: &mut Io,
) -> Result<std::result::Result<crate::config::Subject, i32>> {
    match cfg.subject() {
        Ok(s) => Ok(Ok(s)),
        Err(Error::GroupAxiom(axiom)) => {
            let report = GroupFailure {
                group_id: cfg.group.clone().unwrap_or_default(),
                failures: vec![axiom.invariant()],
                detail: axiom.to_string(),
            };
            Ok(Err(io.emit_json(cfg, command, false, report)?))
        }
        Err(e) => Err(e),
    }
}

#[derive(Serialize)]
struct SymbolReport {
    group_id: String,
    psi_id: String,
    cond_negative_type: symbols::CndReport,
    schoenberg: Option<symbols::SchoenbergReport>,
}

/// Twenty log-spaced times in `[1e-3, 1e3]`.
pub fn schoenberg_grid() -> Vec<f64> {
    (0..20).map(|k| 10f64.powf(-3.0 + 6.0 * k as f64 / 19.0)).collect()
}

fn cmd_check_symbol(cfg: &RunConfig, io: &mut Io) -> Result<i32> {
    let subject = match load_subject(cfg, "check-symbol", io)? {
        Ok(s) => s,
        Err(code) => return Ok(code),
    };
    let tol = cfg.tolerances.cert;
    let cnd = symbols::is_cond_negative_type(&subject.psi, tol)?;
    let schoenberg = symbols::schoenberg_check(&subject.psi, &schoenberg_grid(), tol).ok();
    let pass = cnd.verdict;
    let report =
        SymbolReport { group_id: subject.group_id, psi_id: subject.psi_id, cond_negative_type: cnd, schoenberg };
    io.emit_json(cfg, "check-symbol", pass, report)
}

fn apply_pi_fault(c: Cocycle, fault: Option<&str>) -> Result<Cocycle> {
    let Some(spec) = fault else {
        return Ok(c);
    };
    match spec.split_once(':') {
        Some(("pi", s)) => c.with_flipped_pi(parse_index(s, "element")?),
        _ => Err(Error::InvalidArgument(format!("expected pi:S, got `{spec}`"))),
    }
}

#[derive(Serialize)]
struct CocycleReport {
    group_id: String,
    psi_id: String,
    injected_fault: Option<String>,
    cocycle: cocycle::CocycleJson,
    law: cocycle::CocycleLawReport,
    norm_identity: cocycle::NormIdentityReport,
    failures: Vec<&'static str>,
}

fn extract(cfg: &RunConfig, psi: &symbols::SymbolFunction) -> Result<Cocycle> {
    let cert = symbols::is_cond_negative_type(psi, cfg.tolerances.cert)?;
    if !cert.verdict {
        return Err(Error::NotCertified(cert.failure.unwrap_or_default()));
    }
    cocycle::extract_cocycle(psi, cocycle::DEFAULT_RANK_TOL)
}

fn cmd_cocycle(cfg: &RunConfig, fault: Option<&str>, io: &mut Io) -> Result<i32> {
    let subject = match load_subject(cfg, "cocycle", io)? {
        Ok(s) => s,
        Err(code) => return Ok(code),
    };
    let c = apply_pi_fault(extract(cfg, &subject.psi)?, fault)?;
    let tol = cfg.tolerances.dilation;
    let law = cocycle::verify_cocycle_law(&c, tol);
    let norm_identity = cocycle::verify_norm_identity(&c, &subject.psi, tol)?;
    let mut failures = Vec::new();
    if law.cocycle_residual > tol {
        failures.push("cocycle_law");
    }
    if law.homomorphism_residual > tol {
        failures.push("pi_homomorphism");
    }
    if law.orthogonality_residual > tol {
        failures.push("pi_orthogonal");
    }
    if !norm_identity.pass {
        failures.push("norm_identity");
    }
    let pass = failures.is_empty();
    let report = CocycleReport {
        group_id: subject.group_id,
        psi_id: subject.psi_id,
        injected_fault: fault.map(str::to_string),
        cocycle: c.to_json(),
        law,
        norm_identity,
        failures,
    };
    io.emit_json(cfg, "cocycle", pass, report)
}

#[derive(Serialize)]
struct Refusal {
    group_id: String,
    psi_id: String,
    failures: Vec<&'static str>,
    detail: String,
}

fn cmd_dilate(cfg: &RunConfig, fault: Option<&str>, io: &mut Io) -> Result<i32> {
    let subject = match load_subject(cfg, "dilate", io)? {
        Ok(s) => s,
        Err(code) => return Ok(code),
    };
    let c = match extract(cfg, &subject.psi) {
        Ok(c) => c,
        Err(Error::NotCertified(detail)) => {
            let report = Refusal {
                group_id: subject.group_id,
                psi_id: subject.psi_id,
                failures: vec!["cond_negative_type"],
                detail,
            };
            return io.emit_json(cfg, "dilate", false, report);
        }
        Err(e) => return Err(e),
    };
    let c = apply_pi_fault(c, fault)?;
    let opts = DilationOptions {
        group_id: subject.group_id,
        psi_id: subject.psi_id,
        t_grid: cfg.t_grid.clone(),
        conventions: cfg.conventions.clone(),
        tol: Tolerances { cert: cfg.tolerances.cert, dilation: cfg.tolerances.dilation, ..Tolerances::default() },
        seed: cfg.seed,
        samples: cfg.samples,
    };
    let report = dilation::verify_dilation_with_cocycle(&subject.psi, Arc::new(c), &opts)?;
    io.emit_json(cfg, "dilate", report.verdict.is_pass(), report)
}

pub const HCALC_HEADER: &str =
    "function,element,psi,contour_re,contour_im,direct,abs_error,p,p2_exact,lower_bound,hinfty_norm";

fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

fn cmd_hcalc(cfg: &RunConfig, io: &mut Io) -> Result<i32> {
    let subject = match load_subject(cfg, "hcalc", io)? {
        Ok(s) => s,
        Err(code) => return Ok(code),
    };
    let gen = GeneratorData::new(&subject.psi)?;
    let family = SectorFunction::parse_family(&cfg.hcalc.family)?;
    let quad = QuadConfig { tol: cfg.tolerances.quad, ..QuadConfig::default() };
    let mut out = String::from(HCALC_HEADER);
    out.push('\n');
    let mut worst = 0.0f64;
    for f in &family {
        let contour = hcalc::hinfty_apply(f, &gen, cfg.hcalc.angle, &quad)?;
        let direct = hcalc::hinfty_apply_direct(f, &gen);
        let norms = match cfg.hcalc.p {
            Some(p) => {
                let search = NormSearch { seed: cfg.seed, ..NormSearch::default() };
                let e = hcalc::calculus_norm_estimate(f, &gen, p, cfg.hcalc.theta, &search)?;
                [fmt(e.p), fmt(e.p2_exact), fmt(e.lower_bound), fmt(e.hinfty_norm)]
            }
            None => Default::default(),
        };
        for (s, &psi) in gen.psi().iter().enumerate() {
            let (c, d) = (contour.value(s), direct.value(s));
            let err = (c - d).norm();
            worst = worst.max(err);
            out.push_str(&format!(
                "{f},{s},{},{},{},{},{},{}\n",
                fmt(psi),
                fmt(c.re),
                fmt(c.im),
                fmt(d.re),
                fmt(err),
                norms.join(",")
            ));
        }
    }
    io.emit(cfg, &out)?;
    if worst < HCALC_CHECK_TOL {
        Ok(EXIT_PASS)
    } else {
        writeln!(io.stderr, "max contour error {worst:e} exceeds {HCALC_CHECK_TOL:e}")?;
        Ok(EXIT_FAIL)
    }
}
