//! The subcommands. Grid points are evaluated in parallel; `collect` keeps
//! the declared row-major order.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use quench_core::cavity::{
    exact_growth_rate, fit_growth, map_to_quadratic, qfi_growth_exponent, sqrt_n_regression, CavityParams,
};
use quench_core::fisher::{cfi_asymptotic, cfi_quadrature, optimal_angle, qfi_quench, scan_optimal_angle};
use quench_core::fock::{
    build_effective, qfi_quench_effective, FockBasisSpec, FockVector, PhotonMoments, PropagationMethod, Propagator,
};
use quench_core::gaussian::{
    bogoliubov_coeffs, effective_hamiltonian, evolve, quadrature_variance, vacuum_state, DickeParams,
};
use quench_core::generators::{qfi_heuristic_superradiant, ParameterChoice};
use rayon::prelude::*;

use crate::error::Result;
use crate::spec::{Command, SweepSpec};
use crate::table::{Cell, Table};

/// Grid resolution handed to the CFI angle scan.
pub const SCAN_GRID: f64 = 1e-3;
/// Samples in the cavity growth-rate fit window.
pub const CAVITY_SAMPLES: usize = 9;
/// Smallest cutoff tried by the Fock oracles before doubling.
pub const ORACLE_START_CUTOFF: usize = 100;

/// Result of a subcommand: its table, and for `oracle-check` the text report
/// and overall status.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub table: Table,
    pub report: Option<String>,
    pub failed: bool,
}

impl Outcome {
    fn data(table: Table) -> Self {
        Self {
            table,
            report: None,
            failed: false,
        }
    }
}

pub fn run(spec: &SweepSpec) -> Result<Outcome> {
    match spec.command {
        Command::QfiMap => qfi_map(spec).map(Outcome::data),
        Command::CfiMap => cfi_map(spec).map(Outcome::data),
        Command::Asymptote => asymptote(spec).map(Outcome::data),
        Command::OptimalAngle => optimal_angle_table(spec).map(Outcome::data),
        Command::OracleCheck => oracle_check(spec),
        Command::CavityScaling => cavity_scaling(spec).map(Outcome::data),
    }
}

fn params(spec: &SweepSpec, g_over_gc: f64) -> Result<DickeParams> {
    Ok(DickeParams::from_coupling_ratio(
        spec.omega,
        spec.big_omega,
        g_over_gc,
        spec.n_spins,
    )?)
}

fn grid(a: &[f64], b: &[f64]) -> Vec<(f64, f64)> {
    a.iter().flat_map(|&x| b.iter().map(move |&y| (x, y))).collect()
}

/// `ln(I_λ λ²)`.
fn ln_normalized_qfi(p: &DickeParams, lam: ParameterChoice, t: f64) -> f64 {
    (qfi_quench(p, lam, t) * lam.value(p).powi(2)).ln()
}

pub fn qfi_map(spec: &SweepSpec) -> Result<Table> {
    let lam = spec.lambda;
    let mut cols = vec!["g_over_gc", "t", "omega_t", "qfi", "ln_qfi_lambda2", "ln_qfi_lambda2_critical"];
    if spec.heuristic {
        cols.push("ln_qfi_lambda2_heuristic");
    }
    cols.push("provenance");
    let mut table = Table::new(cols);
    let critical = params(spec, 1.0)?;
    let points = grid(&spec.g_over_gc.values(), &spec.t.values());
    table.rows = points
        .par_iter()
        .map(|&(gr, t)| -> Result<Vec<Cell>> {
            let p = params(spec, gr)?;
            let qfi = qfi_quench(&p, lam, t);
            let mut row = vec![
                Cell::Num(gr),
                Cell::Num(t),
                Cell::Num(spec.omega * t),
                Cell::Num(qfi),
                Cell::Num((qfi * lam.value(&p).powi(2)).ln()),
                Cell::Num(ln_normalized_qfi(&critical, lam, t)),
            ];
            let mut prov = "local_generator;qfi_from_generator".to_string();
            if spec.heuristic {
                // the heuristic form exists only past the critical point
                let h = qfi_heuristic_superradiant(&p, lam, t)
                    .map(|q| (q * lam.value(&p).powi(2)).ln())
                    .unwrap_or(f64::NAN);
                row.push(Cell::Num(h));
                prov.push_str(";qfi_heuristic_superradiant");
            }
            row.push(Cell::Text(prov));
            Ok(row)
        })
        .collect::<Result<_>>()?;
    table.notes.push(format!(
        "ln_qfi_lambda2 = ln(I_lambda * lambda^2) with lambda = {}; ln_qfi_lambda2_critical is the same quantity at g = g_c",
        lam
    ));
    Ok(table)
}

pub fn cfi_map(spec: &SweepSpec) -> Result<Table> {
    let lam = spec.lambda;
    let p = params(spec, spec.g_over_gc.values()[0])?;
    let phis = spec.phi.values();
    let slices = spec
        .t
        .values()
        .into_par_iter()
        .map(|t| -> Result<Vec<Vec<Cell>>> {
            let qfi = qfi_quench(&p, lam, t);
            let (ridge_phi, ridge_cfi) = scan_optimal_angle(&p, lam, t, SCAN_GRID)?;
            Ok(phis
                .iter()
                .map(|&phi| {
                    let cfi = cfi_quadrature(&p, lam, t, phi);
                    vec![
                        Cell::Num(t),
                        Cell::Num(spec.omega * t),
                        Cell::Num(phi),
                        Cell::Num(cfi),
                        Cell::Num(qfi),
                        Cell::Num(cfi / qfi),
                        Cell::Num(ridge_phi),
                        Cell::Num(ridge_cfi / qfi),
                        Cell::from("cfi_quadrature;qfi_quench;scan_optimal_angle"),
                    ]
                })
                .collect())
        })
        .collect::<Result<Vec<_>>>()?;
    let mut table = Table::new(vec![
        "t",
        "omega_t",
        "phi",
        "cfi",
        "qfi",
        "ratio",
        "ridge_phi",
        "ridge_ratio",
        "provenance",
    ]);
    table.rows = slices.into_iter().flatten().collect();
    table.notes.push(format!(
        "g/g_c = {:?}, lambda = {}; ridge_* give the CFI argmax over phi in [0, pi) per time slice",
        p.ratio().sqrt(),
        lam
    ));
    Ok(table)
}

pub fn asymptote(spec: &SweepSpec) -> Result<Table> {
    let w = spec.omega;
    let mut table = Table::new(vec!["phi", "phi_minus_pi_over_4", "ln_omega2_cfi", "provenance"]);
    table.rows = spec
        .phi
        .values()
        .into_par_iter()
        .map(|phi| -> Result<Vec<Cell>> {
            let cfi = cfi_asymptotic(w, phi)?;
            Ok(vec![
                Cell::Num(phi),
                Cell::Num(phi - FRAC_PI_4),
                Cell::Num((w * w * cfi).ln()),
                Cell::from("cfi_asymptotic"),
            ])
        })
        .collect::<Result<_>>()?;
    table
        .notes
        .push("ln_omega2_cfi = ln(omega^2 * CFI) from the lowest-order expansion around phi = pi/4".into());
    Ok(table)
}

/// Distance between two angles modulo π.
pub fn angle_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(PI);
    d.min(PI - d)
}

pub fn optimal_angle_table(spec: &SweepSpec) -> Result<Table> {
    let lam = spec.lambda;
    let points = grid(&spec.g_over_gc.values(), &spec.t.values());
    let mut table = Table::new(vec![
        "g_over_gc",
        "r",
        "t",
        "omega_t",
        "phi_analytic",
        "phi_scan",
        "phi_distance",
        "cfi_at_analytic",
        "cfi_max",
        "provenance",
    ]);
    table.rows = points
        .par_iter()
        .map(|&(gr, t)| -> Result<Vec<Cell>> {
            let p = params(spec, gr)?;
            let r = p.ratio();
            let analytic = optimal_angle(r, spec.omega * t)?;
            let (scan, best) = scan_optimal_angle(&p, lam, t, SCAN_GRID)?;
            Ok(vec![
                Cell::Num(gr),
                Cell::Num(r),
                Cell::Num(t),
                Cell::Num(spec.omega * t),
                Cell::Num(analytic),
                Cell::Num(scan),
                Cell::Num(angle_distance(analytic, scan)),
                Cell::Num(cfi_quadrature(&p, lam, t, analytic)),
                Cell::Num(best),
                Cell::from("optimal_angle;scan_optimal_angle"),
            ])
        })
        .collect::<Result<_>>()?;
    table.notes.push(format!("lambda = {lam}; phi_distance is taken modulo pi"));
    Ok(table)
}

/// One row of the oracle report.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub check: &'static str,
    pub g_over_gc: f64,
    pub t: f64,
    pub residual: f64,
    pub tolerance: f64,
    pub cutoff: Option<usize>,
    pub error: Option<String>,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.error.is_none() && self.residual <= self.tolerance
    }

    pub fn line(&self) -> String {
        let mut s = format!(
            "{} check={} g_over_gc={} t={} residual={:.3e} tolerance={:.1e}",
            if self.passed() { "PASS" } else { "FAIL" },
            self.check,
            self.g_over_gc,
            self.t,
            self.residual,
            self.tolerance
        );
        if let Some(c) = self.cutoff {
            s.push_str(&format!(" cutoff={c}"));
        }
        if let Some(e) = &self.error {
            s.push_str(&format!(" error=\"{e}\""));
        }
        s
    }
}

/// Photon moments of the vacuum evolved under the truncated effective
/// Hamiltonian, doubling the cutoff until the tail test passes.
pub fn converged_moments(p: &DickeParams, t: f64, max_cutoff: usize) -> quench_core::Result<(PhotonMoments, usize)> {
    let mut cutoff = ORACLE_START_CUTOFF.min(max_cutoff);
    loop {
        let basis = FockBasisSpec::photon_only(cutoff);
        let attempt = (|| {
            let h = build_effective(p, &basis)?;
            let start = FockVector::ground_product(&basis);
            start.check_tail(&basis)?;
            let v = Propagator::new(&h, PropagationMethod::Auto)?.evolve(&start, t)?;
            v.check_tail(&basis)?;
            Ok(v.photon_moments(&basis))
        })();
        match attempt {
            Ok(m) => return Ok((m, cutoff)),
            Err(e @ quench_core::Error::CutoffInsufficient { .. }) if cutoff >= max_cutoff => return Err(e),
            Err(quench_core::Error::CutoffInsufficient { .. }) => cutoff = (2 * cutoff).min(max_cutoff),
            Err(e) => return Err(e),
        }
    }
}

const VARIANCE_TOL: f64 = 1e-8;
const QFI_TOL: f64 = 1e-4;
const PURITY_TOL: f64 = 1e-10;
const CHECK_ANGLES: [f64; 4] = [0.0, FRAC_PI_4, FRAC_PI_2, 3.0 * FRAC_PI_4];

fn check_point(spec: &SweepSpec, gr: f64, t: f64) -> Result<Vec<CheckResult>> {
    let p = params(spec, gr)?;
    let lam = spec.lambda;
    let base = |check, tolerance| CheckResult {
        check,
        g_over_gc: gr,
        t,
        residual: f64::NAN,
        tolerance,
        cutoff: None,
        error: None,
    };

    let mut variance = base("variance_vs_fock", VARIANCE_TOL);
    match converged_moments(&p, t, spec.cutoff) {
        Ok((m, cutoff)) => {
            variance.cutoff = Some(cutoff);
            variance.residual = CHECK_ANGLES
                .iter()
                .map(|&phi| (quadrature_variance(&p, t, phi) / m.quadrature_second_moment(phi) - 1.0).abs())
                .fold(0.0, f64::max);
        }
        Err(e) => variance.error = Some(e.to_string()),
    }

    let mut qfi = base("generator_qfi_vs_fidelity", QFI_TOL);
    let start = ORACLE_START_CUTOFF.min(spec.cutoff);
    match qfi_quench_effective(&p, lam, t, start, spec.cutoff, PropagationMethod::Auto) {
        Ok(q) => {
            qfi.cutoff = Some(q.cutoff);
            qfi.residual = (q.value / qfi_quench(&p, lam, t) - 1.0).abs();
        }
        Err(e) => qfi.error = Some(e.to_string()),
    }

    let mut sympl = base("purity_and_bogoliubov", PURITY_TOL);
    let s = evolve(&vacuum_state(), &effective_hamiltonian(&p), t);
    let b = bogoliubov_coeffs(&p, t);
    sympl.residual = s
        .purity_defect()
        .max((b.commutator() - 1.0).abs() / b.u.norm_sqr().max(1.0));

    Ok(vec![variance, qfi, sympl])
}

pub fn oracle_check(spec: &SweepSpec) -> Result<Outcome> {
    let points = grid(&spec.g_over_gc.values(), &spec.t.values());
    let results: Vec<CheckResult> = points
        .par_iter()
        .map(|&(gr, t)| check_point(spec, gr, t))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    let mut table = Table::new(vec![
        "check",
        "g_over_gc",
        "t",
        "residual",
        "tolerance",
        "cutoff",
        "status",
        "detail",
    ]);
    let mut report = String::new();
    for r in &results {
        report.push_str(&r.line());
        report.push('\n');
        table.rows.push(vec![
            Cell::from(r.check),
            Cell::Num(r.g_over_gc),
            Cell::Num(r.t),
            Cell::Num(r.residual),
            Cell::Num(r.tolerance),
            Cell::Int(r.cutoff.map_or(-1, |c| c as i64)),
            Cell::from(if r.passed() { "pass" } else { "fail" }),
            Cell::Text(r.error.clone().unwrap_or_default()),
        ]);
    }
    let failed = results.iter().any(|r| !r.passed());
    let n_fail = results.iter().filter(|r| !r.passed()).count();
    report.push_str(&format!(
        "{} checks, {} failed (lambda = {}, cutoff <= {})\n",
        results.len(),
        n_fail,
        spec.lambda,
        spec.cutoff
    ));
    Ok(Outcome {
        table,
        report: Some(report),
        failed,
    })
}

pub fn cavity_scaling(spec: &SweepSpec) -> Result<Table> {
    let rows = spec
        .n_atoms
        .par_iter()
        .map(|&n| -> Result<(f64, Vec<Cell>)> {
            let c = CavityParams::new(spec.delta_c, spec.omega_r, spec.u, spec.eta, n)?;
            let m = map_to_quadratic(&c)?;
            let fit = fit_growth(&c, spec.lambda, CAVITY_SAMPLES)?;
            Ok((
                fit.slope,
                vec![
                    Cell::Int(n as i64),
                    Cell::Num((n as f64).sqrt()),
                    Cell::Num(m.coupling_ratio_sq),
                    Cell::Num(fit.slope),
                    Cell::Num(fit.r_squared),
                    Cell::Num(fit.e_foldings),
                    Cell::Num(exact_growth_rate(&c)?),
                    Cell::Num(qfi_growth_exponent(&c)?),
                    Cell::from("fit_growth;exact_growth_rate;qfi_growth_exponent"),
                ],
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let slopes: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let reg = sqrt_n_regression(&spec.n_atoms, &slopes)?;
    let mut table = Table::new(vec![
        "n_atoms",
        "sqrt_n",
        "coupling_ratio_sq",
        "fitted_slope",
        "fit_r_squared",
        "e_foldings",
        "exact_rate",
        "closed_form_exponent",
        "provenance",
    ]);
    table.rows = rows.into_iter().map(|r| r.1).collect();
    table.notes.push(format!(
        "regression of fitted_slope on sqrt_n (sqrt_n_regression): slope = {:.16e}, intercept = {:.16e}, r_squared = {:.16e}",
        reg.slope, reg.intercept, reg.r_squared
    ));
    table.notes.push(format!(
        "growth fitted on ln QFI over t in [4/sqrt|nu|, 8/sqrt|nu|] with lambda = {} of the equivalent Dicke model",
        spec.lambda
    ));
    Ok(table)
}
