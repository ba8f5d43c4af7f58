use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::commands::run;
use crate::config::{load_config, Layer};
use crate::error::{Result, SweepError};
use crate::spec::{Command, SweepSpec};

#[derive(Debug, Parser)]
#[command(name = "quench", version, about = "Fisher-information sweeps for quenches across the Dicke transition")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CliCommand,
}

#[derive(Debug, Subcommand)]
pub enum CliCommand {
    /// ln(I_lambda * lambda^2) over (g/g_c, t), with the g = g_c column alongside
    QfiMap(CommonArgs),
    /// CFI/QFI of homodyne detection over (phi, t) at fixed g/g_c
    CfiMap(CommonArgs),
    /// ln(omega^2 CFI) of the expansion around phi = pi/4
    Asymptote(CommonArgs),
    /// Analytic optimal angle against the scanned CFI argmax
    OptimalAngle(CommonArgs),
    /// Cross-check the closed forms against truncated Fock evolution
    OracleCheck(CommonArgs),
    /// Fitted ln-QFI growth rate of the pumped cavity against sqrt(N)
    CavityScaling(CommonArgs),
}

impl CliCommand {
    pub fn split(&self) -> (Command, &CommonArgs) {
        match self {
            CliCommand::QfiMap(a) => (Command::QfiMap, a),
            CliCommand::CfiMap(a) => (Command::CfiMap, a),
            CliCommand::Asymptote(a) => (Command::Asymptote, a),
            CliCommand::OptimalAngle(a) => (Command::OptimalAngle, a),
            CliCommand::OracleCheck(a) => (Command::OracleCheck, a),
            CliCommand::CavityScaling(a) => (Command::CavityScaling, a),
        }
    }
}

/// Axes take a single value, a comma list, or `min:max:steps`.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub omega: Option<String>,
    #[arg(long = "big-omega", allow_hyphen_values = true)]
    pub big_omega: Option<String>,
    #[arg(long = "g-over-gc", allow_hyphen_values = true)]
    pub g_over_gc: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub t: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub phi: Option<String>,
    /// omega, Omega or g
    #[arg(long)]
    pub lambda: Option<String>,
    #[arg(long = "n-spins")]
    pub n_spins: Option<String>,
    /// Fock cutoff (largest tried by oracle-check)
    #[arg(long)]
    pub cutoff: Option<String>,
    /// Output CSV path; stdout when absent
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// `key = value` settings file, overridden by flags
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Also emit the heuristic superradiant QFI
    #[arg(long)]
    pub heuristic: bool,
    /// Atom numbers for cavity-scaling, comma separated
    #[arg(long = "n-atoms")]
    pub n_atoms: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub eta: Option<String>,
    #[arg(long = "delta-c", allow_hyphen_values = true)]
    pub delta_c: Option<String>,
    #[arg(long = "omega-r", allow_hyphen_values = true)]
    pub omega_r: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub u: Option<String>,
}

impl CommonArgs {
    /// The flags that were actually given.
    pub fn layer(&self) -> Layer {
        let mut l = Layer::new();
        let mut put = |k: &str, v: &Option<String>| {
            if let Some(v) = v {
                l.insert(k.to_string(), v.clone());
            }
        };
        put("omega", &self.omega);
        put("big_omega", &self.big_omega);
        put("g_over_gc", &self.g_over_gc);
        put("t", &self.t);
        put("phi", &self.phi);
        put("lambda", &self.lambda);
        put("n_spins", &self.n_spins);
        put("cutoff", &self.cutoff);
        put("n_atoms", &self.n_atoms);
        put("eta", &self.eta);
        put("delta_c", &self.delta_c);
        put("omega_r", &self.omega_r);
        put("u", &self.u);
        put("out", &self.out.as_ref().map(|p| p.display().to_string()));
        if self.heuristic {
            l.insert("heuristic".into(), "true".into());
        }
        l
    }

    pub fn resolve(&self, command: Command) -> Result<SweepSpec> {
        let config = match &self.config {
            Some(path) => load_config(path)?,
            None => Layer::new(),
        };
        SweepSpec::resolve(command, &self.layer(), &config)
    }
}

/// Runs a parsed command line and returns the process exit status.
pub fn execute(cli: &Cli) -> i32 {
    let (command, args) = cli.command.split();
    match execute_inner(command, args) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if matches!(e, SweepError::Invalid(_) | SweepError::Config { .. }) {
                eprintln!("run `quench {command} --help` for usage");
            }
            e.exit_code()
        }
    }
}

fn execute_inner(command: Command, args: &CommonArgs) -> Result<i32> {
    let spec = args.resolve(command)?;
    let outcome = run(&spec)?;
    let csv = outcome.table.to_csv(&spec);
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    let io_err = |source| SweepError::Io {
        path: "<stdout>".into(),
        source,
    };
    match &spec.out {
        Some(path) => std::fs::write(path, csv).map_err(|source| SweepError::Io {
            path: path.display().to_string(),
            source,
        })?,
        None if outcome.report.is_none() => lock.write_all(csv.as_bytes()).map_err(io_err)?,
        None => {}
    }
    if let Some(report) = &outcome.report {
        lock.write_all(report.as_bytes()).map_err(io_err)?;
    }
    Ok(if outcome.failed { 2 } else { 0 })
}
