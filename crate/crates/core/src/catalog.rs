//! Named symbols and the builtin `(G, psi)` fixtures.
//!
//! Symbol specs:
//!
//! | spec          | `psi(s)`                                        |
//! |---------------|-------------------------------------------------|
//! | `zero`        | `0`                                             |
//! | `delta[:c]`   | `0` at `e`, `c` (default 1) elsewhere           |
//! | `circle`      | `4 sin^2(pi k / n)` on `Z_n`                    |
//! | `word-length` | word length for the default generators          |
//!
//! Builtins: `z2-delta`, `z3-circle`, `z4-circle`, `z8-circle`, `s3-word`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::group::{Family, FiniteGroup};
use crate::symbols::SymbolFunction;

pub const BUILTINS: &[&str] = &["z2-delta", "z3-circle", "z4-circle", "z8-circle", "s3-word"];

/// A group together with a symbol on it.
#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: String,
    pub group_id: String,
    pub psi_id: String,
    pub psi: SymbolFunction,
}

impl Fixture {
    pub fn group(&self) -> &Arc<FiniteGroup> {
        self.psi.group()
    }
}

/// Evaluates a named symbol on `group`.
pub fn named_symbol(group: Arc<FiniteGroup>, spec: &str) -> Result<SymbolFunction> {
    let spec = spec.trim();
    let (name, arg) = match spec.split_once(':') {
        Some((n, a)) => (n.trim(), Some(a.trim())),
        None => (spec, None),
    };
    let n = group.order();
    let values: Vec<f64> = match (name, arg) {
        ("zero", None) => vec![0.0; n],
        ("delta", arg) => {
            let c = match arg {
                Some(a) => {
                    a.parse::<f64>().map_err(|_| Error::UnknownSymbol(format!("bad delta constant in `{spec}`")))?
                }
                None => 1.0,
            };
            (0..n).map(|s| if s == 0 { 0.0 } else { c }).collect()
        }
        ("circle", None) => match group.family() {
            Family::Cyclic(m) => {
                (0..*m).map(|k| 4.0 * (std::f64::consts::PI * k as f64 / *m as f64).sin().powi(2)).collect()
            }
            other => return Err(Error::UnknownSymbol(format!("`circle` needs a cyclic group, got {other}"))),
        },
        ("word-length" | "inversions", None) => group
            .word_length()
            .ok_or_else(|| Error::UnknownSymbol("group has no generating set".into()))?
            .into_iter()
            .map(|l| l as f64)
            .collect(),
        _ => return Err(Error::UnknownSymbol(spec.to_string())),
    };
    SymbolFunction::from_real(group, &values)
}

pub fn builtin(name: &str) -> Result<Fixture> {
    let (group_id, psi_id) = match name.trim() {
        "z2-delta" => ("cyclic 2", "delta"),
        "z3-circle" => ("cyclic 3", "circle"),
        "z4-circle" => ("cyclic 4", "circle"),
        "z8-circle" => ("cyclic 8", "circle"),
        "s3-word" => ("symmetric 3", "word-length"),
        other => return Err(Error::UnknownSymbol(format!("unknown builtin `{other}`"))),
    };
    let group = Arc::new(FiniteGroup::from_spec(group_id)?);
    Ok(Fixture {
        name: name.trim().to_string(),
        group_id: group_id.to_string(),
        psi_id: psi_id.to_string(),
        psi: named_symbol(group, psi_id)?,
    })
}

pub fn all_builtins() -> Vec<Fixture> {
    BUILTINS.iter().map(|n| builtin(n).expect("builtins are valid")).collect()
}
