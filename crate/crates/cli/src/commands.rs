//! The five subcommands. Each prints a report to stdout and writes CSVs under the output directory.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use pdmp_core::analysis::{check_conservation, check_monotone, ks_distance, AnalysisError, CheckReport};
use pdmp_core::export::{snapshot_filename, write_snapshot_csv};
use pdmp_core::mc::McError;
use pdmp_core::solver::{SolveError, Trajectory};
use pdmp_core::{
    cfl_max_dt, convergence_order, error_growth, run_ensemble, run_ensemble_with_threads, solve, total_cdf,
    ConvergenceStudy, PathConfig, SampleEnsemble, SolveOptions,
};
use thiserror::Error;

use crate::config::{ConfigError, Resolved};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("time step {dt} exceeds the CFL bound {dt_max}; set time.allow_cfl_violation to run anyway")]
    CflRefused { dt: f64, dt_max: f64 },
    #[error("{0} check(s) failed")]
    ChecksFailed(usize),
    #[error("numerical failure: {0}")]
    Numeric(String),
    #[error("{context}: {source}")]
    Io { context: String, source: io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } | CliError::Config(ConfigError::Read { .. }) => 1,
            CliError::Config(_) => 2,
            CliError::CflRefused { .. } => 3,
            CliError::ChecksFailed(_) => 4,
            CliError::Numeric(_) => 5,
        }
    }
}

impl From<SolveError> for CliError {
    fn from(e: SolveError) -> Self {
        match e {
            SolveError::CflViolation { dt, dt_max } => CliError::CflRefused { dt, dt_max },
            SolveError::NonFinite { .. } | SolveError::Drift { .. } => CliError::Numeric(e.to_string()),
            other => CliError::Config(ConfigError::Invalid(vec![other.to_string()])),
        }
    }
}

impl From<McError> for CliError {
    fn from(e: McError) -> Self {
        match e {
            McError::Config(_) => CliError::Config(ConfigError::Invalid(vec![e.to_string()])),
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::Solve(s) => s.into(),
            other => CliError::Config(ConfigError::Invalid(vec![other.to_string()])),
        }
    }
}

fn io_err(context: impl Into<String>) -> impl FnOnce(io::Error) -> CliError {
    let context = context.into();
    move |source| CliError::Io { context, source }
}

/// Output location for one command run.
pub struct Output {
    dir: PathBuf,
}

impl Output {
    pub fn new(dir: PathBuf) -> Self {
        Output { dir }
    }

    fn create(&self, name: &str) -> Result<(PathBuf, BufWriter<File>), CliError> {
        fs::create_dir_all(&self.dir).map_err(io_err(format!("creating {}", self.dir.display())))?;
        let path = self.dir.join(name);
        let file = File::create(&path).map_err(io_err(format!("creating {}", path.display())))?;
        Ok((path, BufWriter::new(file)))
    }

    fn write(
        &self,
        name: &str,
        body: impl FnOnce(&mut BufWriter<File>) -> io::Result<()>,
    ) -> Result<PathBuf, CliError> {
        let (path, mut w) = self.create(name)?;
        body(&mut w)
            .and_then(|_| w.flush())
            .map_err(io_err(format!("writing {}", path.display())))?;
        log::info!("wrote {}", path.display());
        Ok(path)
    }

    fn resolved_config(&self, r: &Resolved) -> Result<(), CliError> {
        let text = serde_json::to_string_pretty(&r.config).expect("config serializes");
        self.write(&format!("{}_config.json", r.config.run_name), |w| writeln!(w, "{text}"))?;
        Ok(())
    }
}

pub fn cfl(r: &Resolved) -> Result<(), CliError> {
    let bound = cfl_max_dt(&r.spec, &r.grid)?;
    println!("M = {}", bound.max_drift);
    println!("dx = {}", bound.dx);
    println!("max_l mu_l(1-q_ll) = {}", bound.max_exit_rate);
    match bound.dt_max {
        Some(m) => println!("dt_max = {m:.6} ({m})"),
        None => println!("dt_max = unbounded"),
    }
    if let Some(dt) = r.config.time.dt {
        println!(
            "dt = {dt} ({})",
            if bound.admits(dt) { "admissible" } else { "violates CFL" }
        );
    }
    Ok(())
}

fn run_solver(r: &Resolved) -> Result<Trajectory<f64>, CliError> {
    let t = &r.config.time;
    let mut opts =
        SolveOptions::new(t.horizon, t.dt.expect("resolved config has dt")).with_snapshots(r.config.snapshots.clone());
    if t.allow_cfl_violation {
        opts = opts.allow_cfl_violation();
        if let Some(m) = r.dt_max.filter(|&m| opts.dt > m) {
            log::warn!("running with dt = {} above the CFL bound {m}", opts.dt);
        }
    }
    Ok(solve(&r.spec, &r.grid, &r.initial, &opts)?)
}

/// Writes every snapshot and runs the enabled checks on each; returns the failure count.
fn export_and_check(r: &Resolved, tr: &Trajectory<f64>, out: &Output) -> Result<usize, CliError> {
    let checks = &r.config.checks;
    let mut failures = 0;
    for snap in &tr.snapshots {
        let t = snap.field.time();
        out.write(&snapshot_filename(&r.config.run_name, t), |w| {
            write_snapshot_csv(&r.grid, &snap.field, w)
        })?;
        let mut reports: Vec<CheckReport> = Vec::new();
        if checks.monotone {
            reports.push(check_monotone(&snap.field, checks.monotone_tol));
        }
        if checks.conservation {
            reports.push(check_conservation(
                &snap.field,
                &snap.marginal,
                tr.initial_left_mass,
                checks.conservation_tol,
            ));
        }
        for rep in reports {
            println!("t={t} {rep}");
            failures += usize::from(!rep.passed);
        }
    }
    Ok(failures)
}

pub fn solve_cmd(r: &Resolved, out: &Output) -> Result<(), CliError> {
    out.resolved_config(r)?;
    let tr = run_solver(r)?;
    println!("steps = {}", tr.steps);
    let failures = export_and_check(r, &tr, out)?;
    if failures > 0 {
        return Err(CliError::ChecksFailed(failures));
    }
    Ok(())
}

fn ensemble(r: &Resolved, horizon: f64) -> Result<SampleEnsemble<f64>, CliError> {
    let mc = r.config.mc.as_ref().ok_or_else(|| ConfigError::Schema {
        pointer: "/mc".into(),
        message: "this command needs an mc section".into(),
    })?;
    let mut cfg = PathConfig::new(mc.n, horizon, mc.seed);
    cfg.substep = mc.substep;
    Ok(match mc.threads {
        Some(n) => run_ensemble_with_threads(&r.spec, &r.initial, &cfg, n)?,
        None => run_ensemble(&r.spec, &r.initial, &cfg)?,
    })
}

pub fn simulate(r: &Resolved, out: &Output) -> Result<(), CliError> {
    out.resolved_config(r)?;
    let ens = ensemble(r, r.config.time.horizon)?;
    let path = out.write(&format!("{}_ensemble.csv", r.config.run_name), |w| ens.write_csv(w))?;
    let n = ens.len() as f64;
    let mean = ens.endpoints.iter().sum::<f64>() / n;
    println!(
        "paths = {} T = {} seed = {}",
        ens.len(),
        ens.provenance.horizon,
        ens.provenance.seed
    );
    println!("mean endpoint = {mean}");
    for s in 0..r.spec.states() {
        let frac = ens.end_states.iter().filter(|&&e| e == s).count() as f64 / n;
        println!("P(state {}) = {frac}", s + 1);
    }
    println!("ensemble written to {}", path.display());
    Ok(())
}

pub fn compare(r: &Resolved, out: &Output) -> Result<(), CliError> {
    out.resolved_config(r)?;
    let tol = r.config.mc.as_ref().map_or(0.02, |m| m.ks_tol);
    let tr = run_solver(r)?;
    let mut failures = export_and_check(r, &tr, out)?;
    let xs: Vec<f64> = r.grid.nodes().collect();
    let mut rows = Vec::new();
    println!("{:>12} {:>12} {:>8}", "t", "ks", "verdict");
    for snap in &tr.snapshots {
        let t = snap.field.time();
        let ens = ensemble(r, t)?;
        let ks = ks_distance(&xs, &total_cdf(&snap.field), &ens.endpoints);
        let pass = ks <= tol;
        failures += usize::from(!pass);
        println!("{t:>12} {ks:>12.6} {:>8}", if pass { "PASS" } else { "FAIL" });
        rows.push((t, ks, pass));
    }
    out.write(&format!("{}_ks.csv", r.config.run_name), |w| {
        writeln!(w, "t,ks,tol,pass")?;
        for (t, ks, pass) in &rows {
            writeln!(w, "{t},{ks:.16e},{tol},{pass}")?;
        }
        Ok(())
    })?;
    if failures > 0 {
        return Err(CliError::ChecksFailed(failures));
    }
    Ok(())
}

pub fn convergence(r: &Resolved, out: &Output) -> Result<(), CliError> {
    out.resolved_config(r)?;
    let c = r
        .config
        .convergence
        .clone()
        .unwrap_or_else(|| serde_json::from_str("{}").expect("convergence defaults"));
    let mut study = ConvergenceStudy::new(r.grid, c.levels);
    study.reference_factor = c.reference_factor;
    let report = convergence_order(&r.spec, &r.initial, r.config.time.horizon, &study)?;
    println!("reference nodes = {}", report.reference_nodes);
    println!("{:>14} {:>14}", "dx", "error");
    for (dx, e) in report.spacings.iter().zip(&report.errors) {
        println!("{dx:>14.6e} {e:>14.6e}");
    }
    let mut failures = 0;
    match report.order {
        Some(p) => {
            let pass = p >= c.order_band[0] && p <= c.order_band[1];
            failures += usize::from(!pass);
            println!(
                "order = {p:.4} ({} in [{}, {}])",
                if pass { "PASS" } else { "FAIL" },
                c.order_band[0],
                c.order_band[1]
            );
        }
        None => println!("order = undefined (zero error)"),
    }
    out.write(&format!("{}_convergence.csv", r.config.run_name), |w| {
        writeln!(w, "dx,error")?;
        for (dx, e) in report.spacings.iter().zip(&report.errors) {
            writeln!(w, "{dx:.16e},{e:.16e}")?;
        }
        Ok(())
    })?;

    if !c.growth_times.is_empty() {
        let errs = error_growth(&r.spec, &r.initial, &r.grid, &c.growth_times, c.reference_factor, 0.9)?;
        println!("{:>10} {:>14} {:>8}", "t", "error", "ratio");
        for (i, (t, e)) in c.growth_times.iter().zip(&errs).enumerate() {
            match i.checked_sub(1).map(|j| e / errs[j]) {
                Some(ratio) => {
                    let pass = ratio <= c.max_growth_ratio;
                    failures += usize::from(!pass);
                    println!("{t:>10} {e:>14.6e} {ratio:>8.3} {}", if pass { "PASS" } else { "FAIL" });
                }
                None => println!("{t:>10} {e:>14.6e}"),
            }
        }
    }
    if failures > 0 {
        return Err(CliError::ChecksFailed(failures));
    }
    Ok(())
}

pub fn output_for(r: &Resolved, override_dir: Option<&Path>) -> Output {
    Output::new(override_dir.map_or_else(|| r.config.output_dir.clone(), Path::to_path_buf))
}
