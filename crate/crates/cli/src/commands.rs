use std::fs;
use std::io::{self, Write};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use serde::Serialize;

use segregation::functional::discrete_energy;
use segregation::grid::Dim;
use segregation::membrane::{complementarity_of, free_boundary, ClassSummary};
use segregation::problem::Preset;
use segregation::solver::solve;
use segregation::study::{run_study, ENVELOPE_EXPONENT, SATURATION_FLOOR};

use crate::args::{Cli, Command};
use crate::manifest::RunManifest;
use crate::output;

/// Outcome of a command that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    /// Sweep budget exhausted, or a study outside its pass criteria.
    NotConverged,
}

impl From<Status> for ExitCode {
    fn from(s: Status) -> Self {
        match s {
            Status::Ok => ExitCode::SUCCESS,
            Status::NotConverged => ExitCode::from(2),
        }
    }
}

pub fn run(cli: Cli) -> Result<Status> {
    match cli.command {
        Command::Solve(args) => cmd_solve(&RunManifest::for_solve(&args)?),
        Command::Study(args) => cmd_study(&RunManifest::for_study(&args)?),
        Command::Presets { json } => cmd_presets(json),
    }
}

#[derive(Serialize)]
struct Residuals {
    positive: ClassSummary<f64>,
    negative: ClassSummary<f64>,
    zero: ClassSummary<f64>,
    /// `10 (2 dim / h^2) tol`, the acceptance bound for a converged run.
    bound: f64,
}

#[derive(Serialize)]
struct ZeroSet {
    nodes: usize,
    /// Node count times the cell measure (`h` in 1D, `h^2` in 2D).
    area: f64,
}

#[derive(Serialize)]
struct SolveSummary<'a> {
    schema: u32,
    manifest: &'a RunManifest,
    problem: String,
    dim: usize,
    n: usize,
    h: f64,
    tol: f64,
    max_iters: usize,
    iterations: usize,
    converged: bool,
    last_change: f64,
    energy: f64,
    residuals: Residuals,
    zero_set: ZeroSet,
    free_boundary_edges: usize,
}

pub fn cmd_solve(manifest: &RunManifest) -> Result<Status> {
    let problem = manifest.problem(manifest.n)?;
    let config = manifest.solver_config(&problem)?;
    if config.record_jp && problem.grid().dim() != Dim::One {
        bail!("--record-jp is only available for 1D problems");
    }
    let grid = *problem.grid();
    let report = solve(&problem, &config)?;
    let state = &report.state;

    let out = &manifest.out;
    fs::create_dir_all(out).with_context(|| format!("cannot create {}", out.display()))?;
    output::write_field(&out.join("u1.csv"), &state.u1)?;
    output::write_field(&out.join("u2.csv"), &state.u2)?;
    output::write_field(&out.join("v.csv"), &state.v())?;
    if config.record_energy {
        output::write_energy(&out.join("energy.csv"), &report.energy)?;
    }
    if config.record_jp {
        output::write_jp(&out.join("jp.csv"), &report.jp_sequence(&problem)?)?;
    }
    let fb = free_boundary(state);
    output::write_free_boundary(&out.join("freeboundary.csv"), state, &fb.nodes(state))?;

    let residuals = complementarity_of(&state.u1, &state.u2, &problem)?;
    let h = grid.h();
    let dim = grid.dim().count() as f64;
    let summary = SolveSummary {
        schema: 1,
        manifest,
        problem: manifest.label(),
        dim: grid.dim().count(),
        n: grid.n(),
        h,
        tol: config.tol,
        max_iters: config.max_iters,
        iterations: report.iterations,
        converged: report.converged,
        last_change: report.last_change,
        energy: discrete_energy(&state.v_interior(), &problem)?.total,
        residuals: Residuals {
            positive: residuals.positive,
            negative: residuals.negative,
            zero: residuals.zero,
            bound: 10.0 * (2.0 * dim / (h * h)) * config.tol,
        },
        zero_set: ZeroSet {
            nodes: fb.zero_nodes.len(),
            area: fb.zero_area,
        },
        free_boundary_edges: fb.edges.len(),
    };
    output::write_json(&out.join("report.json"), &summary)?;

    let mut stdout = io::stdout().lock();

    writeln!(
        stdout,
        "{} n={}: {} after {} sweeps (last change {:.3e}, tol {:.1e}) in {:.2?}",
        summary.problem,
        grid.n(),
        if report.converged {
            "converged"
        } else {
            "NOT converged"
        },
        report.iterations,
        report.last_change,
        config.tol,
        report.wall_time
    )?;
    writeln!(
        stdout,
        "zero set: {} nodes, area {:.6e}; worst residual {:.3e}",
        fb.zero_nodes.len(),
        fb.zero_area,
        residuals.worst()
    )?;
    writeln!(stdout, "wrote {}", out.display())?;
    Ok(if report.converged {
        Status::Ok
    } else {
        Status::NotConverged
    })
}

pub fn cmd_study(manifest: &RunManifest) -> Result<Status> {
    let params = manifest
        .study
        .as_ref()
        .context("missing study parameters")?;
    let tol = manifest.tol;
    let max_iters = manifest.max_iters;
    let parallel = manifest.parallel;
    let table = run_study(
        |n| manifest.problem(Some(n)).map_err(to_core),
        &params.n_list,
        params.reference,
        |mut c| {
            if let Some(t) = tol {
                c = c.with_tol(t);
            }
            if let Some(m) = max_iters {
                c = c.with_max_iters(m);
            }
            c.parallel = parallel;
            c
        },
    )?;

    let out = &manifest.out;
    fs::create_dir_all(out).with_context(|| format!("cannot create {}", out.display()))?;
    output::write_rates(&out.join("rates.csv"), &table)?;
    output::write_json(&out.join("manifest.json"), manifest)?;

    let mut stdout = io::stdout().lock();
    write!(stdout, "{}", output::rates_csv(&table))?;
    let exponent = ENVELOPE_EXPONENT;
    writeln!(
        stdout,
        "M = {:.6e} (max err / h^{exponent:.4}); M at coarsest n = {:.6e}",
        table.fitted_m(),
        table.coarsest_m()
    )?;
    if table.all_saturated() {
        writeln!(
            stdout,
            "all errors at or below {SATURATION_FLOOR:.0e}: exact to solver tolerance"
        )?;
    }
    let converged = table.rows.iter().all(|r| r.converged);
    let monotone = table.is_monotone();
    let enveloped = table.within_envelope();
    writeln!(
        stdout,
        "converged: {}; non-increasing: {}; within M_coarsest h^(2/7): {}",
        yes(converged),
        yes(monotone),
        yes(enveloped)
    )?;
    Ok(if converged && monotone && enveloped {
        Status::Ok
    } else {
        Status::NotConverged
    })
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn to_core(err: anyhow::Error) -> segregation::Error {
    match err.downcast::<segregation::Error>() {
        Ok(e) => e,
        Err(e) => segregation::Error::InvalidProblem(format!("{e:#}")),
    }
}

pub fn cmd_presets(json: bool) -> Result<Status> {
    let descriptors: Vec<_> = Preset::ALL.iter().map(|p| p.descriptor()).collect();
    let mut stdout = io::stdout().lock();
    if json {
        writeln!(stdout, "{}", serde_json::to_string_pretty(&descriptors)?)?;
    } else {
        writeln!(
            stdout,
            "{:<6} {:>3}  {:<16} {:>5} {:>5}  boundary",
            "name", "dim", "domain", "f1", "f2"
        )?;
        for d in &descriptors {
            writeln!(
                stdout,
                "{:<6} {:>3}  {:<16} {:>5} {:>5}  {}",
                d.name, d.dim, d.domain, d.f1, d.f2, d.boundary
            )?;
        }
    }
    Ok(Status::Ok)
}
