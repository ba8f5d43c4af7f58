//! Layered settings: command-line flag > config file > built-in default.
//!
//! Config files hold one `key = value` pair per line; `#` starts a comment.
//! Keys may be written with `-` or `_`.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{invalid, Result, SweepError};

/// Every key a settings layer may carry.
pub const KEYS: [&str; 15] = [
    "omega",
    "big_omega",
    "g_over_gc",
    "t",
    "phi",
    "lambda",
    "n_spins",
    "cutoff",
    "heuristic",
    "n_atoms",
    "eta",
    "delta_c",
    "omega_r",
    "u",
    "out",
];

/// One layer of raw settings, keyed by normalized name.
pub type Layer = BTreeMap<String, String>;

pub fn normalize_key(key: &str) -> String {
    key.trim().replace('-', "_")
}

pub fn parse_config(text: &str, origin: &str) -> Result<Layer> {
    let mut out = Layer::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| SweepError::Config {
            path: origin.to_string(),
            line: i + 1,
            msg,
        };
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| err(format!("expected `key = value`, got `{line}`")))?;
        let key = normalize_key(k);
        if !KEYS.contains(&key.as_str()) {
            return Err(err(format!("unknown key `{key}`")));
        }
        let value = v.trim();
        if value.is_empty() {
            return Err(err(format!("empty value for `{key}`")));
        }
        if out.insert(key.clone(), value.to_string()).is_some() {
            return Err(err(format!("duplicate key `{key}`")));
        }
    }
    Ok(out)
}

pub fn load_config(path: &Path) -> Result<Layer> {
    let text = std::fs::read_to_string(path).map_err(|source| SweepError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_config(&text, &path.display().to_string())
}

/// Looks `key` up through the layers, highest precedence first.
pub fn lookup<'a>(key: &str, layers: &[&'a Layer]) -> Option<&'a str> {
    layers.iter().find_map(|l| l.get(key)).map(String::as_str)
}

/// A coordinate axis: an explicit list or `min:max:steps` (inclusive).
#[derive(Debug, Clone, PartialEq)]
pub enum Axis {
    List(Vec<f64>),
    Linspace { min: f64, max: f64, steps: usize },
}

impl Axis {
    pub fn parse(name: &str, s: &str) -> Result<Self> {
        let num = |x: &str| -> Result<f64> {
            let v: f64 = x
                .trim()
                .parse()
                .map_err(|_| SweepError::Invalid(format!("--{}: `{x}` is not a number", name.replace('_', "-"))))?;
            if !v.is_finite() {
                return invalid(format!("--{}: `{x}` is not finite", name.replace('_', "-")));
            }
            Ok(v)
        };
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            [one] => Ok(Axis::List(one.split(',').map(num).collect::<Result<_>>()?)),
            [a, b, n] => {
                let steps: usize = n.trim().parse().map_err(|_| {
                    SweepError::Invalid(format!("--{}: step count `{n}` is not an integer", name.replace('_', "-")))
                })?;
                if steps < 2 {
                    return invalid(format!("--{}: a swept axis needs steps >= 2", name.replace('_', "-")));
                }
                Ok(Axis::Linspace {
                    min: num(a)?,
                    max: num(b)?,
                    steps,
                })
            }
            _ => invalid(format!(
                "--{}: expected a value, a comma list or min:max:steps, got `{s}`",
                name.replace('_', "-")
            )),
        }
    }

    pub fn values(&self) -> Vec<f64> {
        match self {
            Axis::List(v) => v.clone(),
            Axis::Linspace { min, max, steps } => (0..*steps)
                .map(|i| {
                    if i + 1 == *steps {
                        *max
                    } else {
                        min + (max - min) * i as f64 / (*steps - 1) as f64
                    }
                })
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Axis::List(v) => v.len(),
            Axis::Linspace { steps, .. } => *steps,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Canonical text, round-trippable through [`Axis::parse`].
    pub fn canonical(&self) -> String {
        match self {
            Axis::List(v) => v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(","),
            Axis::Linspace { min, max, steps } => format!("{min:?}:{max:?}:{steps}"),
        }
    }
}
