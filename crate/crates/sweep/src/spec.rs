use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};
use std::fmt;
use std::path::PathBuf;

use quench_core::generators::ParameterChoice;
use sha2::{Digest, Sha256};

use crate::config::{lookup, Axis, Layer};
use crate::error::{invalid, Result, SweepError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    QfiMap,
    CfiMap,
    Asymptote,
    OptimalAngle,
    OracleCheck,
    CavityScaling,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::QfiMap => "qfi-map",
            Command::CfiMap => "cfi-map",
            Command::Asymptote => "asymptote",
            Command::OptimalAngle => "optimal-angle",
            Command::OracleCheck => "oracle-check",
            Command::CavityScaling => "cavity-scaling",
        }
    }

    /// Keys that affect this command's output; only these enter the spec hash.
    fn keys(self) -> &'static [&'static str] {
        match self {
            Command::QfiMap => &["omega", "big_omega", "g_over_gc", "t", "lambda", "heuristic"],
            Command::CfiMap => &["omega", "big_omega", "g_over_gc", "t", "phi", "lambda"],
            Command::Asymptote => &["omega", "phi"],
            Command::OptimalAngle => &["omega", "big_omega", "g_over_gc", "t", "lambda"],
            Command::OracleCheck => &["omega", "big_omega", "g_over_gc", "t", "lambda", "cutoff"],
            Command::CavityScaling => &["n_atoms", "eta", "delta_c", "omega_r", "u", "lambda"],
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Subcommand default slices of g/g_c for `qfi-map`.
pub const QFI_MAP_SLICES: [f64; 7] = [0.5, 0.68, 0.87, 1.0, 1.25, 1.62, 2.0];

/// Minimum distance of an `asymptote` angle from the pole at π/4.
pub const POLE_MARGIN: f64 = 1e-4;

/// Fully resolved sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub command: Command,
    pub omega: f64,
    pub big_omega: f64,
    pub g_over_gc: Axis,
    pub t: Axis,
    pub phi: Axis,
    pub lambda: ParameterChoice,
    pub n_spins: u32,
    pub cutoff: usize,
    pub heuristic: bool,
    pub n_atoms: Vec<u32>,
    pub eta: f64,
    pub delta_c: f64,
    pub omega_r: f64,
    pub u: f64,
    pub out: Option<PathBuf>,
    pub format: &'static str,
}

fn defaults(command: Command) -> Layer {
    let list = |v: &[f64]| Axis::List(v.to_vec()).canonical();
    let mut d: Layer = [
        ("omega", "1".to_string()),
        ("big_omega", "1".to_string()),
        ("lambda", "omega".to_string()),
        ("n_spins", "1".to_string()),
        ("cutoff", "400".to_string()),
        ("heuristic", "false".to_string()),
        ("n_atoms", "25,100,400".to_string()),
        ("eta", "1".to_string()),
        ("delta_c", "-1".to_string()),
        ("omega_r", "1".to_string()),
        ("u", "0".to_string()),
        ("g_over_gc", "1".to_string()),
        ("t", "1".to_string()),
        ("phi", "0".to_string()),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect();
    let mut set = |k: &str, v: String| {
        d.insert(k.to_string(), v);
    };
    match command {
        Command::QfiMap => {
            set("g_over_gc", list(&QFI_MAP_SLICES));
            set("t", "0:10:101".into());
        }
        Command::CfiMap => {
            set("g_over_gc", list(&[SQRT_2]));
            set("t", "0.5:6:12".into());
            set("phi", list(&(0..180).map(|k| k as f64 * PI / 180.0).collect::<Vec<_>>()));
        }
        Command::Asymptote => {
            set("phi", format!("{:?}:{:?}:200", 0.0, FRAC_PI_2));
        }
        Command::OptimalAngle => {
            set("g_over_gc", list(&[1.5f64.sqrt(), SQRT_2, 3f64.sqrt(), 5f64.sqrt()]));
            set("t", list(&[1.0, 2.0, 4.0]));
        }
        Command::OracleCheck => {
            set("g_over_gc", list(&[0.5, 0.9, 1.0, 1.5, 2.0]));
            set("t", list(&[0.5, 1.0]));
            set("cutoff", "3200".into());
        }
        Command::CavityScaling => {}
    }
    d
}

fn parse_f64(key: &str, s: &str) -> Result<f64> {
    match s.trim().parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => invalid(format!("--{}: `{s}` is not a finite number", key.replace('_', "-"))),
    }
}

fn parse_uint(key: &str, s: &str) -> Result<u64> {
    s.trim()
        .parse()
        .map_err(|_| SweepError::Invalid(format!("--{}: `{s}` is not a non-negative integer", key.replace('_', "-"))))
}

pub fn parse_lambda(s: &str) -> Result<ParameterChoice> {
    match s.trim() {
        "omega" => Ok(ParameterChoice::Omega),
        "Omega" | "big_omega" | "big-omega" => Ok(ParameterChoice::BigOmega),
        "g" => Ok(ParameterChoice::G),
        other => invalid(format!("--lambda: expected omega, Omega or g, got `{other}`")),
    }
}

fn parse_bool(key: &str, s: &str) -> Result<bool> {
    match s.trim() {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        other => invalid(format!("{key}: expected true or false, got `{other}`")),
    }
}

impl SweepSpec {
    /// Resolves `flags` over `config` over the command's defaults and
    /// validates the result.
    pub fn resolve(command: Command, flags: &Layer, config: &Layer) -> Result<Self> {
        let defaults = defaults(command);
        let layers = [flags, config, &defaults];
        let get = |k: &str| lookup(k, &layers).expect("every key has a default");
        let n_atoms = get("n_atoms")
            .split(',')
            .map(|x| parse_uint("n_atoms", x).and_then(|n| u32::try_from(n).map_err(|_| SweepError::Invalid(format!("--n-atoms: {n} too large")))))
            .collect::<Result<Vec<_>>>()?;
        let spec = SweepSpec {
            command,
            omega: parse_f64("omega", get("omega"))?,
            big_omega: parse_f64("big_omega", get("big_omega"))?,
            g_over_gc: Axis::parse("g_over_gc", get("g_over_gc"))?,
            t: Axis::parse("t", get("t"))?,
            phi: Axis::parse("phi", get("phi"))?,
            lambda: parse_lambda(get("lambda"))?,
            n_spins: u32::try_from(parse_uint("n_spins", get("n_spins"))?)
                .map_err(|_| SweepError::Invalid("--n-spins: too large".into()))?,
            cutoff: parse_uint("cutoff", get("cutoff"))? as usize,
            heuristic: parse_bool("heuristic", get("heuristic"))?,
            n_atoms,
            eta: parse_f64("eta", get("eta"))?,
            delta_c: parse_f64("delta_c", get("delta_c"))?,
            omega_r: parse_f64("omega_r", get("omega_r"))?,
            u: parse_f64("u", get("u"))?,
            out: lookup("out", &layers[..2]).map(PathBuf::from),
            format: "csv",
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn defaults(command: Command) -> Result<Self> {
        Self::resolve(command, &Layer::new(), &Layer::new())
    }

    fn validate(&self) -> Result<()> {
        if !(self.omega > 0.0 && self.big_omega > 0.0) {
            return invalid("--omega and --big-omega must be > 0");
        }
        if self.n_spins == 0 {
            return invalid("--n-spins must be >= 1");
        }
        if self.g_over_gc.values().iter().any(|&x| x < 0.0) {
            return invalid("--g-over-gc must be >= 0");
        }
        if self.t.values().iter().any(|&x| x < 0.0) {
            return invalid("--t must be >= 0");
        }
        match self.command {
            Command::QfiMap => {
                if self.lambda == ParameterChoice::G {
                    return invalid("qfi-map: --lambda must be omega or Omega");
                }
            }
            Command::CfiMap => {
                if self.g_over_gc.len() != 1 {
                    return invalid("cfi-map: --g-over-gc takes a single value");
                }
                if self.t.values().iter().any(|&x| x <= 0.0) {
                    return invalid("cfi-map: --t must be > 0 (the QFI vanishes at t = 0)");
                }
            }
            Command::Asymptote => {
                for phi in self.phi.values() {
                    let d = (phi - PI / 4.0 + PI / 2.0).rem_euclid(PI) - PI / 2.0;
                    if d.abs() < POLE_MARGIN {
                        return invalid(format!(
                            "asymptote: phi = {phi} lies within {POLE_MARGIN:e} rad of the pole at pi/4 (mod pi)"
                        ));
                    }
                }
            }
            Command::OptimalAngle => {
                if self.g_over_gc.values().iter().any(|&x| x <= 1.0) {
                    return invalid("optimal-angle: --g-over-gc must be > 1");
                }
                if self.t.values().iter().any(|&x| x <= 0.0) {
                    return invalid("optimal-angle: --t must be > 0");
                }
            }
            Command::OracleCheck => {
                if self.cutoff == 0 {
                    return invalid("oracle-check: --cutoff must be >= 1");
                }
            }
            Command::CavityScaling => {
                if self.n_atoms.len() < 3 {
                    return invalid("cavity-scaling: --n-atoms needs at least 3 entries");
                }
            }
        }
        Ok(())
    }

    /// Canonical `key=value;...` text of the settings the command reads.
    pub fn canonical(&self) -> String {
        let mut parts = vec![format!("command={}", self.command), format!("format={}", self.format)];
        for &k in self.command.keys() {
            let v = match k {
                "omega" => format!("{:?}", self.omega),
                "big_omega" => format!("{:?}", self.big_omega),
                "g_over_gc" => self.g_over_gc.canonical(),
                "t" => self.t.canonical(),
                "phi" => self.phi.canonical(),
                "lambda" => self.lambda.name().to_string(),
                "cutoff" => self.cutoff.to_string(),
                "heuristic" => self.heuristic.to_string(),
                "n_atoms" => self.n_atoms.iter().map(u32::to_string).collect::<Vec<_>>().join(","),
                "eta" => format!("{:?}", self.eta),
                "delta_c" => format!("{:?}", self.delta_c),
                "omega_r" => format!("{:?}", self.omega_r),
                "u" => format!("{:?}", self.u),
                _ => unreachable!("{k}"),
            };
            parts.push(format!("{k}={v}"));
        }
        parts.join(";")
    }

    /// SHA-256 of [`Self::canonical`], hex encoded.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.canonical().as_bytes()))
    }
}
