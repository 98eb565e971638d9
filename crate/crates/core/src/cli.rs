//! Command-line driver: configuration, the six commands and their outputs.
//!
//! Exit codes: 0 every check passed, 1 some check failed (outputs are still
//! written), 2 invalid parameters or configuration, 3 a solver did not
//! converge.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::params::ProblemParams;
use crate::pohozaev::{self, PohozaevError};
use crate::radial_ode::residual;
use crate::report::KvReport;
use crate::shooting::{self, ShootError, ShootingConfig, ShootingResult};
use crate::spectrum::{self, HarmonicIndex, InnerBoundary, SpectrumError};
use crate::symmetrize::{self, SymmetrizeError};
use crate::variational::{self, VariationalError};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    InvalidParameters(String),
    #[error("{0}")]
    Convergence(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::InvalidParameters(_) | CliError::Io(_) => 2,
            CliError::Convergence(_) => 3,
        }
    }
}

impl From<ShootError> for CliError {
    fn from(e: ShootError) -> Self {
        match e {
            ShootError::WindowTooShort(_) | ShootError::GridMismatch => CliError::InvalidParameters(e.to_string()),
            _ => CliError::Convergence(e.to_string()),
        }
    }
}

impl From<SpectrumError> for CliError {
    fn from(e: SpectrumError) -> Self {
        CliError::Convergence(e.to_string())
    }
}

impl From<VariationalError> for CliError {
    fn from(e: VariationalError) -> Self {
        CliError::Convergence(e.to_string())
    }
}

impl From<PohozaevError> for CliError {
    fn from(e: PohozaevError) -> Self {
        CliError::InvalidParameters(e.to_string())
    }
}

impl From<SymmetrizeError> for CliError {
    fn from(e: SymmetrizeError) -> Self {
        CliError::InvalidParameters(e.to_string())
    }
}

/// Everything a command needs. Built from defaults, then a config file,
/// then command-line flags.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: ProblemParams,
    pub r_start: f64,
    pub r_max: f64,
    pub grid_n: usize,
    /// Relative bisection width on `beta`.
    pub shoot_tol: f64,
    /// Threshold for the integral identities.
    pub quad_tol: f64,
    /// Relative eigenvalue tolerance.
    pub eig_tol: f64,
    pub n_eigs: usize,
    pub k_max: u32,
    pub output_dir: PathBuf,
    /// Scan range; defaults to the automatic shooting bracket.
    pub beta_low: Option<f64>,
    pub beta_high: Option<f64>,
    pub scan_n: usize,
    pub sym_fields: usize,
    pub sym_n: usize,
    pub sym_extent: f64,
    pub sym_seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            params: ProblemParams::new(2, 0.5, 1.0, 3.0),
            r_start: 1e-6,
            r_max: 30.0,
            grid_n: 4096,
            shoot_tol: 1e-12,
            quad_tol: 1e-6,
            eig_tol: 1e-10,
            n_eigs: 4,
            k_max: 1,
            output_dir: PathBuf::from("out"),
            beta_low: None,
            beta_high: None,
            scan_n: 64,
            sym_fields: 20,
            sym_n: 128,
            sym_extent: 4.0,
            sym_seed: 0,
        }
    }
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value
        .parse()
        .map_err(|_| CliError::InvalidParameters(format!("cannot parse `{value}` for key `{key}`")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool, CliError> {
    match value {
        "true" | "1" | "yes" | "on" => Ok(true),
        "false" | "0" | "no" | "off" => Ok(false),
        _ => Err(CliError::InvalidParameters(format!("cannot parse `{value}` for key `{key}`"))),
    }
}

/// Parses flat `key = value` lines; `#` starts a comment. Keys may use `-`
/// or `_`.
pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::InvalidParameters(format!("config line {}: expected `key = value`", ln + 1)))?;
        out.insert(k.trim().replace('-', "_"), v.trim().to_string());
    }
    Ok(out)
}

impl RunConfig {
    /// Applies `key = value` settings on top of `self`.
    pub fn apply(&mut self, settings: &BTreeMap<String, String>) -> Result<(), CliError> {
        for (k, v) in settings {
            match k.as_str() {
                "dimension" => self.params.d = parse_value(k, v)?,
                "weight_a" => self.params.a = parse_value(k, v)?,
                "power_p" => self.params.p = parse_value(k, v)?,
                "omega" => self.params.omega = parse_value(k, v)?,
                "oracle_mode" => self.params.oracle_mode = parse_bool(k, v)?,
                "r_start" => self.r_start = parse_value(k, v)?,
                "r_max" => self.r_max = parse_value(k, v)?,
                "grid_n" => self.grid_n = parse_value(k, v)?,
                "tol" | "shoot_tol" => self.shoot_tol = parse_value(k, v)?,
                "quad_tol" => self.quad_tol = parse_value(k, v)?,
                "eig_tol" => self.eig_tol = parse_value(k, v)?,
                "n_eigs" => self.n_eigs = parse_value(k, v)?,
                "k_max" => self.k_max = parse_value(k, v)?,
                "output" | "output_dir" => self.output_dir = PathBuf::from(v),
                "beta_low" => self.beta_low = Some(parse_value(k, v)?),
                "beta_high" => self.beta_high = Some(parse_value(k, v)?),
                "scan_n" => self.scan_n = parse_value(k, v)?,
                "sym_fields" => self.sym_fields = parse_value(k, v)?,
                "sym_n" => self.sym_n = parse_value(k, v)?,
                "sym_extent" => self.sym_extent = parse_value(k, v)?,
                "sym_seed" => self.sym_seed = parse_value(k, v)?,
                _ => return Err(CliError::InvalidParameters(format!("unknown config key `{k}`"))),
            }
        }
        Ok(())
    }

    /// Checks parameters and run settings.
    pub fn validate(&self) -> Result<(), CliError> {
        self.params
            .validate()
            .map_err(|e| CliError::InvalidParameters(e.to_string()))?;
        let bad = |m: String| Err(CliError::InvalidParameters(m));
        if self.grid_n < 64 {
            return bad(format!("grid_n = {} must be at least 64", self.grid_n));
        }
        for (name, t) in [("shoot_tol", self.shoot_tol), ("quad_tol", self.quad_tol), ("eig_tol", self.eig_tol)] {
            if !(t > 0.0) {
                return bad(format!("{name} = {t} must be positive"));
            }
        }
        if !(self.r_start > 0.0 && self.r_max > self.r_start) {
            return bad(format!("need 0 < r_start < r_max, got {} and {}", self.r_start, self.r_max));
        }
        if self.n_eigs < 2 {
            return bad(format!("n_eigs = {} must be at least 2", self.n_eigs));
        }
        if self.scan_n < 2 {
            return bad(format!("scan_n = {} must be at least 2", self.scan_n));
        }
        if self.sym_n < 4 || !self.sym_n.is_multiple_of(4) {
            return bad(format!("sym_n = {} must be a positive multiple of 4", self.sym_n));
        }
        Ok(())
    }

    pub fn shooting_config(&self) -> Result<ShootingConfig, CliError> {
        Ok(ShootingConfig::graded(self.r_start, self.r_max, self.grid_n)?)
    }
}

#[derive(Debug, Parser)]
#[command(name = "dgs", version, about = "Radial ground states of -div(|x|^{2a} grad u) + omega u = u^{p-1}")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Shoot for the ground state; writes profile.csv and solve_report.txt.
    Solve,
    /// Pohozaev quantity along the ground state; writes pohozaev.csv.
    Pohozaev,
    /// Linearized spectra for k = 0..k_max.
    Spectrum,
    /// Polarization and rearrangement properties on a random field corpus.
    Symmetrize,
    /// Classify a log-spaced range of shooting heights; writes scan.csv.
    #[command(alias = "scan_beta")]
    ScanBeta,
    /// Full pipeline with a consolidated pass/fail report.
    Verify,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    #[arg(long, global = true)]
    pub dimension: Option<u32>,
    #[arg(long = "weight-a", global = true, allow_negative_numbers = true)]
    pub weight_a: Option<f64>,
    #[arg(long = "power-p", global = true)]
    pub power_p: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub omega: Option<f64>,
    #[arg(long = "r-start", global = true)]
    pub r_start: Option<f64>,
    #[arg(long = "r-max", global = true)]
    pub r_max: Option<f64>,
    #[arg(long = "grid-n", global = true)]
    pub grid_n: Option<usize>,
    /// Relative shooting tolerance.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long = "n-eigs", global = true)]
    pub n_eigs: Option<usize>,
    #[arg(long = "k-max", global = true)]
    pub k_max: Option<u32>,
    /// Output directory.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// `key = value` configuration file; flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Admit a = 0 (classical reference problem).
    #[arg(long = "oracle-mode", global = true)]
    pub oracle_mode: bool,
}

impl Flags {
    /// Defaults, then the config file, then the flags.
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut cfg = RunConfig::default();
        if let Some(path) = &self.config {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::InvalidParameters(format!("cannot read config {}: {e}", path.display())))?;
            cfg.apply(&parse_config_text(&text)?)?;
        }
        if let Some(v) = self.dimension {
            cfg.params.d = v;
        }
        if let Some(v) = self.weight_a {
            cfg.params.a = v;
        }
        if let Some(v) = self.power_p {
            cfg.params.p = v;
        }
        if let Some(v) = self.omega {
            cfg.params.omega = v;
        }
        if let Some(v) = self.r_start {
            cfg.r_start = v;
        }
        if let Some(v) = self.r_max {
            cfg.r_max = v;
        }
        if let Some(v) = self.grid_n {
            cfg.grid_n = v;
        }
        if let Some(v) = self.tol {
            cfg.shoot_tol = v;
        }
        if let Some(v) = self.n_eigs {
            cfg.n_eigs = v;
        }
        if let Some(v) = self.k_max {
            cfg.k_max = v;
        }
        if let Some(v) = &self.output {
            cfg.output_dir = v.clone();
        }
        if self.oracle_mode {
            cfg.params.oracle_mode = true;
        }
        Ok(cfg)
    }
}

/// Pass/fail lines collected by a command.
#[derive(Debug, Clone, Default)]
pub struct Checks {
    report: KvReport,
    failed: usize,
}

impl Checks {
    pub fn check(&mut self, key: &str, ok: bool) {
        self.report.push(key, ok);
        if !ok {
            self.failed += 1;
        }
    }

    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }

    pub fn report(&self) -> &KvReport {
        &self.report
    }
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

fn solve_ground_state(cfg: &RunConfig) -> Result<ShootingResult, CliError> {
    let scfg = cfg.shooting_config()?;
    let bracket = shooting::auto_bracket(&cfg.params, &scfg)?;
    Ok(shooting::find_ground_state(&cfg.params, bracket, cfg.shoot_tol, &scfg)?)
}

fn solve_checks(res: &ShootingResult, cfg: &RunConfig, checks: &mut Checks, report: &mut KvReport) {
    let res_norm = residual(&res.profile, &cfg.params);
    report.push("ode_residual", res_norm);
    checks.check("ground_state_ode_residual", res_norm <= 1e-6);
    checks.check("ground_state_positive", res.profile.is_positive());
    checks.check("ground_state_decreasing", res.profile.is_strictly_decreasing());
}

/// Outcome of a command: the exit code (0 or 1) once outputs are written.
pub type CommandResult = Result<i32, CliError>;

fn finish(checks: &Checks) -> i32 {
    if checks.all_passed() {
        0
    } else {
        1
    }
}

pub fn cmd_solve(cfg: &RunConfig) -> CommandResult {
    let res = solve_ground_state(cfg)?;
    let mut report = res.report();
    let mut checks = Checks::default();
    solve_checks(&res, cfg, &mut checks, &mut report);
    report.extend(checks.report());
    write(&cfg.output_dir, "profile.csv", &res.profile.to_csv())?;
    write(&cfg.output_dir, "solve_report.txt", &report.to_string())?;
    Ok(finish(&checks))
}

/// `dJ/dr - G u^2` residual on the ground state solved with half the nodes.
fn coarse_dj_residual(cfg: &RunConfig) -> Result<f64, CliError> {
    let coarse = RunConfig {
        grid_n: cfg.grid_n / 2,
        ..cfg.clone()
    };
    let res = solve_ground_state(&coarse)?;
    Ok(pohozaev::verify_dj(&cfg.params, &res.profile))
}

fn pohozaev_checks(d: &pohozaev::PohozaevDiagnostics, coarse_residual: f64, report: &mut KvReport, checks: &mut Checks) {
    report.push("dJdr_residual_half_grid", coarse_residual);
    checks.check("pohozaev_dJdr_residual_halves", d.dj_dr_residual <= 0.5 * coarse_residual);
    let scale = d.j_max.abs().max(f64::MIN_POSITIVE);
    checks.check("pohozaev_J_vanishes_at_origin", d.j_origin_probe.abs() <= 1e-8 * scale);
    checks.check("pohozaev_J_vanishes_at_r_max", d.j_limits.1.abs() <= 1e-8 * scale);
    checks.check("pohozaev_J_nonnegative", d.j_min >= -1e-8 * scale);
    checks.check("pohozaev_G_single_sign_change", d.g_sign_pattern_ok());
    let r0_ok = d.r0_bisection.is_some_and(|b| (b - d.r0).abs() <= 1e-6 * d.r0);
    checks.check("pohozaev_r0_closed_form", r0_ok);
}

pub fn cmd_pohozaev(cfg: &RunConfig) -> CommandResult {
    pohozaev::preflight(&cfg.params)?;
    let res = solve_ground_state(cfg)?;
    let diag = pohozaev::diagnostics(&cfg.params, &res.profile)?;
    let mut checks = Checks::default();
    let mut report = diag.report();
    pohozaev_checks(&diag, coarse_dj_residual(cfg)?, &mut report, &mut checks);
    report.extend(checks.report());
    write(&cfg.output_dir, "pohozaev.csv", &diag.to_csv())?;
    write(&cfg.output_dir, "pohozaev_report.txt", &report.to_string())?;
    Ok(finish(&checks))
}

fn spectrum_k0_checks(rep: &spectrum::SpectrumReport, witness: f64, checks: &mut Checks) {
    checks.check("spectrum_k0_negative_count_is_one", rep.negative_count == 1);
    checks.check("spectrum_k0_second_eigenvector_one_sign_change", rep.sign_changes.get(1) == Some(&1));
    checks.check("spectrum_k0_zero_gap_positive", rep.zero_gap > 1e-2);
    checks.check("spectrum_k0_morse_witness_negative", witness < 0.0);
}

pub fn cmd_spectrum(cfg: &RunConfig) -> CommandResult {
    let res = solve_ground_state(cfg)?;
    let mut checks = Checks::default();
    let mut summary = KvReport::new();
    let mut previous_lowest: Option<f64> = None;
    for k in 0..=cfg.k_max {
        let idx = HarmonicIndex::new(k);
        let op = spectrum::assemble(&res.profile, &cfg.params, idx)?;
        let rep = spectrum::eigen_lowest(&op, cfg.n_eigs.min(op.len()), cfg.eig_tol)?;
        let mut report = rep.report();
        if k == 0 {
            let witness = spectrum::morse_witness(&op, &res.profile);
            report.push("morse_witness", witness);
            spectrum_k0_checks(&rep, witness, &mut checks);
            let swapped = spectrum::assemble_with(&res.profile, &cfg.params, idx, InnerBoundary::Dirichlet)?;
            let alt = spectrum::eigen_lowest(&swapped, cfg.n_eigs.min(swapped.len()), cfg.eig_tol)?;
            report.push("swapped_boundary_negative_count", alt.negative_count);
            report.push("swapped_boundary_zero_gap", alt.zero_gap);
            checks.check("spectrum_k0_boundary_swap_consistent", alt.negative_count == rep.negative_count);
        }
        if let Some(prev) = previous_lowest {
            checks.check(&format!("spectrum_k{k}_lowest_above_k{}", k - 1), rep.eigenvalues[0] > prev);
        }
        previous_lowest = Some(rep.eigenvalues[0]);
        summary.push(format!("k{k}_lambda_1"), rep.eigenvalues[0]);
        write(&cfg.output_dir, &format!("spectrum_k{k}.txt"), &report.to_string())?;
        write(&cfg.output_dir, &format!("eigenvectors_k{k}.csv"), &rep.eigenvectors_csv())?;
    }
    summary.extend(checks.report());
    write(&cfg.output_dir, "spectrum_report.txt", &summary.to_string())?;
    Ok(finish(&checks))
}

/// Worst case over the corpus of each measured property.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorpusSummary {
    pub polarization_lp_change: f64,
    pub polarization_dirichlet_defect: f64,
    pub rearrangement_lp_change: f64,
    pub rearrangement_excess: f64,
}

fn corpus(cfg: &RunConfig, n: usize) -> Result<(Vec<symmetrize::CorpusRow>, CorpusSummary), CliError> {
    let a = cfg.params.a;
    let rows = (0..cfg.sym_fields as u64)
        .map(|i| symmetrize::corpus_row(cfg.sym_seed + i, 2, n, cfg.sym_extent, a, cfg.params.p))
        .collect::<Result<Vec<_>, _>>()?;
    let worst = |f: fn(&symmetrize::CorpusRow) -> f64| rows.iter().map(f).fold(f64::NEG_INFINITY, f64::max);
    let summary = CorpusSummary {
        polarization_lp_change: worst(|r| r.polarization_lp_change),
        polarization_dirichlet_defect: worst(|r| r.polarization_dirichlet_defect),
        rearrangement_lp_change: worst(|r| r.rearrangement_lp_change),
        rearrangement_excess: worst(|r| r.rearrangement_excess),
    };
    Ok((rows, summary))
}

pub fn cmd_symmetrize(cfg: &RunConfig) -> CommandResult {
    let (rows, fine) = corpus(cfg, cfg.sym_n)?;
    let (_, coarse) = corpus(cfg, cfg.sym_n / 2)?;
    let tol_h = symmetrize::rearrangement_tolerance(cfg.sym_n);
    let mut table = String::from(
        "seed,polarization_lp_change,polarization_dirichlet_defect,rearrangement_lp_change,rearrangement_excess,pass\n",
    );
    for r in &rows {
        let pass = r.polarization_lp_change == 0.0 && r.rearrangement_lp_change == 0.0 && r.rearrangement_excess <= tol_h;
        table.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.seed,
            crate::report::fmt17(r.polarization_lp_change),
            crate::report::fmt17(r.polarization_dirichlet_defect),
            crate::report::fmt17(r.rearrangement_lp_change),
            crate::report::fmt17(r.rearrangement_excess),
            if pass { "pass" } else { "fail" }
        ));
    }
    let mut checks = Checks::default();
    checks.check("polarization_preserves_lp", fine.polarization_lp_change == 0.0);
    checks.check(
        "polarization_dirichlet_defect_shrinks",
        fine.polarization_dirichlet_defect < coarse.polarization_dirichlet_defect,
    );
    checks.check("rearrangement_preserves_lp", fine.rearrangement_lp_change == 0.0);
    checks.check("rearrangement_dirichlet_inequality", fine.rearrangement_excess <= tol_h);
    let mut report = KvReport::new();
    report
        .push("fields", cfg.sym_fields)
        .push("grid_n", cfg.sym_n)
        .push("polarization_dirichlet_defect", fine.polarization_dirichlet_defect)
        .push("polarization_dirichlet_defect_half_grid", coarse.polarization_dirichlet_defect)
        .push("rearrangement_excess", fine.rearrangement_excess)
        .push("rearrangement_tolerance", tol_h);
    report.extend(checks.report());
    write(&cfg.output_dir, "symmetrize_table.csv", &table)?;
    write(&cfg.output_dir, "symmetrize_report.txt", &report.to_string())?;
    Ok(finish(&checks))
}

pub fn cmd_scan_beta(cfg: &RunConfig) -> CommandResult {
    let scfg = cfg.shooting_config()?;
    let (low, high) = match (cfg.beta_low, cfg.beta_high) {
        (Some(l), Some(h)) => (l, h),
        (l, h) => {
            let (bl, bh) = shooting::auto_bracket(&cfg.params, &scfg)?;
            (l.unwrap_or(bl), h.unwrap_or(bh))
        }
    };
    if !(low > 0.0 && high > low) {
        return Err(CliError::InvalidParameters(format!("need 0 < beta_low < beta_high, got {low} and {high}")));
    }
    let betas = shooting::log_spaced(low, high, cfg.scan_n);
    let scan = shooting::scan_beta(&cfg.params, &betas, &scfg)?;
    let transitions = shooting::classification_transitions(&scan);
    let mut checks = Checks::default();
    checks.check("scan_single_transition", transitions == 1);
    let mut report = KvReport::new();
    report.push("beta_low", low).push("beta_high", high).push("transitions", transitions);
    report.extend(checks.report());
    write(&cfg.output_dir, "scan.csv", &shooting::scan_to_csv(&scan))?;
    write(&cfg.output_dir, "scan_report.txt", &report.to_string())?;
    Ok(finish(&checks))
}

/// Solve, functionals, Pohozaev diagnostics and the radial spectrum, with
/// every check in one report.
pub fn cmd_verify(cfg: &RunConfig) -> CommandResult {
    let res = solve_ground_state(cfg)?;
    let params = &cfg.params;
    let profile = &res.profile;
    let mut checks = Checks::default();
    let mut values = res.report();
    solve_checks(&res, cfg, &mut checks, &mut values);

    let f = variational::functionals(profile, params)?;
    values.extend(&f.report());
    checks.check("nehari_identity", f.nehari_residual.abs() <= cfg.quad_tol);
    checks.check("energy_relation", f.energy_relation_residual <= cfg.quad_tol);
    checks.check("dilation_identity", f.dilation_residual <= cfg.quad_tol);

    let rs = profile.r_start();
    let origin = variational::origin_coefficient_check(profile, params, (2.0 * rs, 100.0 * rs))?;
    values.push("origin_coefficient_error", origin);
    checks.check("origin_asymptotics", origin <= 1e-2);

    let window = (
        shooting::default_tail_window(profile, 1e-3).0,
        0.9 * profile.r_max(),
    );
    let free = shooting::fit_tail_free_power(profile, window)?;
    values.push("tail_radial_power", free.radial_power);
    let power_err = (free.radial_power - (1.0 - params.a)).abs() / (1.0 - params.a);
    checks.check("tail_stretched_exponent", power_err <= 0.02);

    match pohozaev::diagnostics(params, profile) {
        Ok(d) => {
            values.extend(&d.report());
            pohozaev_checks(&d, coarse_dj_residual(cfg)?, &mut values, &mut checks);
        }
        Err(e @ PohozaevError::Preflight { .. }) => {
            values.push("pohozaev_skipped", e.to_string());
        }
        Err(e) => return Err(e.into()),
    }

    let op = spectrum::assemble(profile, params, HarmonicIndex::new(0))?;
    let rep = spectrum::eigen_lowest(&op, cfg.n_eigs.min(op.len()), cfg.eig_tol)?;
    let witness = spectrum::morse_witness(&op, profile);
    values.push("spectrum_k0_negative_count", rep.negative_count);
    values.push("spectrum_k0_zero_gap", rep.zero_gap);
    values.push("morse_witness", witness);
    spectrum_k0_checks(&rep, witness, &mut checks);

    let mut report = KvReport::new();
    report.extend(checks.report()).extend(&values);
    write(&cfg.output_dir, "profile.csv", &profile.to_csv())?;
    write(&cfg.output_dir, "verify_report.txt", &report.to_string())?;
    Ok(finish(&checks))
}

pub fn run_command(command: Command, cfg: &RunConfig) -> CommandResult {
    cfg.validate()?;
    match command {
        Command::Solve => cmd_solve(cfg),
        Command::Pohozaev => cmd_pohozaev(cfg),
        Command::Spectrum => cmd_spectrum(cfg),
        Command::Symmetrize => cmd_symmetrize(cfg),
        Command::ScanBeta => cmd_scan_beta(cfg),
        Command::Verify => cmd_verify(cfg),
    }
}

/// Parses `args`, runs the command and returns the process exit code,
/// printing `error: <code>: <message>` on failure.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            if matches!(e.kind(), clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion) {
                let _ = e.print();
                return 0;
            }
            eprintln!("error: 2: {}", e.to_string().lines().next().unwrap_or("invalid arguments"));
            return 2;
        }
    };
    match cli.flags.resolve().and_then(|cfg| run_command(cli.command, &cfg)) {
        Ok(code) => code,
        Err(e) => {
            let code = e.exit_code();
            eprintln!("error: {code}: {e}");
            code
        }
    }
}
