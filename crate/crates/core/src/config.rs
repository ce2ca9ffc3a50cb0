//! Versioned run configuration, read from TOML and overridable from the
//! command line. Reports embed [`RunConfig::hash`], the SHA-256 of the
//! canonical TOML rendering.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::catalog;
use crate::crossed::Convention;
use crate::dilation::{DEFAULT_SAMPLES, DEFAULT_SEED, DEFAULT_T_GRID};
use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::symbols::{SymbolFunction, DEFAULT_TOL};

pub const CONFIG_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub cert: f64,
    pub dilation: f64,
    pub quad: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { cert: DEFAULT_TOL, dilation: 1e-10, quad: 1e-10 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HcalcConfig {
    /// Contour angle `nu`.
    pub angle: f64,
    /// Sector angle for `H^inf` norms.
    pub theta: f64,
    /// Comma-separated function specs; see `SectorFunction::parse`.
    pub family: String,
    pub p: Option<f64>,
}

impl Default for HcalcConfig {
    fn default() -> Self {
        HcalcConfig {
            angle: std::f64::consts::FRAC_PI_4,
            theta: std::f64::consts::FRAC_PI_2,
            family: "power:0.5,power:1,power:2".into(),
            p: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub version: u32,
    /// Builtin `(G, psi)` fixture; takes precedence over `group` and `psi`.
    pub builtin: Option<String>,
    /// Group family spec or `file:PATH` to a Cayley table.
    pub group: Option<String>,
    /// Named symbol or `file:PATH` to a symbol file.
    pub psi: Option<String>,
    pub t_grid: Vec<f64>,
    pub conventions: Vec<Convention>,
    pub samples: usize,
    pub seed: u64,
    pub output: Option<PathBuf>,
    pub tolerances: Tolerances,
    pub hcalc: HcalcConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            version: CONFIG_VERSION,
            builtin: None,
            group: None,
            psi: None,
            t_grid: DEFAULT_T_GRID.to_vec(),
            conventions: vec![Convention::A, Convention::B],
            samples: DEFAULT_SAMPLES,
            seed: DEFAULT_SEED,
            output: None,
            tolerances: Tolerances::default(),
            hcalc: HcalcConfig::default(),
        }
    }
}

/// A resolved `(G, psi)` pair with the identifiers reported alongside it.
#[derive(Debug, Clone)]
pub struct Subject {
    pub group_id: String,
    pub psi_id: String,
    pub psi: SymbolFunction,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Parse {
            line: e.span().map_or(0, |s| text[..s.start].lines().count().max(1)),
            message: e.message().to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is serializable")
    }

    /// Hex SHA-256 of [`RunConfig::to_toml`] with `output` cleared: where a
    /// report is written does not change what it contains.
    pub fn hash(&self) -> String {
        let canonical = RunConfig { output: None, ..self.clone() };
        Sha256::digest(canonical.to_toml().as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if self.version != CONFIG_VERSION {
            return bad(format!("unsupported config version {}", self.version));
        }
        let t = &self.tolerances;
        if !(t.cert > 0.0 && t.dilation > 0.0 && t.quad > 0.0) {
            return bad("tolerances must be positive".into());
        }
        if self.samples == 0 {
            return bad("samples must be at least 1".into());
        }
        if self.t_grid.iter().any(|t| !t.is_finite()) {
            return bad("t-grid entries must be finite".into());
        }
        if self.conventions.is_empty() {
            return bad("at least one convention is required".into());
        }
        Ok(())
    }

    /// Resolves the group and symbol: a builtin, or `group` with `psi`.
    pub fn subject(&self) -> Result<Subject> {
        if let Some(name) = &self.builtin {
            let f = catalog::builtin(name)?;
            return Ok(Subject { group_id: f.group_id, psi_id: f.psi_id, psi: f.psi });
        }
        let group_id = self
            .group
            .clone()
            .ok_or_else(|| Error::InvalidArgument("no group given (use --group or --builtin)".into()))?;
        let group = Arc::new(FiniteGroup::load(&group_id)?);
        let psi_id = self
            .psi
            .clone()
            .ok_or_else(|| Error::InvalidArgument("no symbol given (use --psi or --builtin)".into()))?;
        let psi = match psi_id.strip_prefix("file:") {
            Some(path) => SymbolFunction::load_file(group, path)?,
            None => catalog::named_symbol(group, &psi_id)?,
        };
        Ok(Subject { group_id, psi_id, psi })
    }

    /// The group alone, for commands that do not need a symbol.
    pub fn group(&self) -> Result<(String, FiniteGroup)> {
        if let Some(name) = &self.builtin {
            let f = catalog::builtin(name)?;
            let g = (**f.group()).clone();
            return Ok((f.group_id, g));
        }
        let spec = self
            .group
            .clone()
            .ok_or_else(|| Error::InvalidArgument("no group given (use --group or --builtin)".into()))?;
        let g = FiniteGroup::load(&spec)?;
        Ok((spec, g))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let cfg = RunConfig {
            builtin: Some("z3-circle".into()),
            t_grid: vec![0.1, 1.0 / 3.0, 2.0],
            seed: 99,
            hcalc: HcalcConfig { p: Some(3.0), ..HcalcConfig::default() },
            ..RunConfig::default()
        };
        let text = cfg.to_toml();
        let back = RunConfig::from_toml(&text).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(back.to_toml(), text);
        assert_eq!(back.hash(), cfg.hash());
        assert_eq!(cfg.hash().len(), 64);
    }

    #[test]
    fn defaults_and_partial_files() {
        let cfg = RunConfig::from_toml("version = 1\nbuiltin = \"z2-delta\"\n").unwrap();
        assert_eq!(cfg.t_grid, DEFAULT_T_GRID.to_vec());
        assert_eq!(cfg.subject().unwrap().psi.values().len(), 2);
    }

    #[test]
    fn invalid_configs() {
        assert!(RunConfig::from_toml("version = 2\n").is_err());
        assert!(RunConfig::from_toml("samples = 0\n").is_err());
        assert!(RunConfig::from_toml("[tolerances]\ncert = 0.0\n").is_err());
        assert!(RunConfig::from_toml("bogus = 1\n").is_err());
        let err = RunConfig::from_toml("version = 1\nseed = \"x\"\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err:?}");
    }

    #[test]
    fn subjects() {
        let cfg = RunConfig { group: Some("z4".into()), psi: Some("circle".into()), ..RunConfig::default() };
        assert_eq!(cfg.subject().unwrap().psi.values().len(), 4);
        let cfg = RunConfig { group: Some("z4".into()), ..RunConfig::default() };
        assert!(cfg.subject().is_err());
        assert!(RunConfig::default().group().is_err());
    }
}
