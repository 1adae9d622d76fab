use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use serde::Serialize;

use segregation::problem::{Preset, PresetOptions, ProblemFile};
use segregation::study::Reference;
use segregation::{Problem, SolverConfig};

use crate::args::{ReferenceArg, SolveArgs, SolverArgs, SourceArgs, StudyArgs};

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemSource {
    Preset {
        name: Preset,
        phi1_top_full_span: bool,
    },
    File {
        path: PathBuf,
    },
}

#[derive(Debug, Clone, Serialize)]
pub struct StudyParams {
    pub n_list: Vec<usize>,
    pub reference: Reference,
}

/// Everything that determines a run's output files.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub source: ProblemSource,
    pub n: Option<usize>,
    pub tol: Option<f64>,
    pub max_iters: Option<usize>,
    pub record_energy: bool,
    pub record_jp: bool,
    pub study: Option<StudyParams>,
    /// Not part of the serialized manifest, so runs into different
    /// directories write identical files.
    #[serde(skip)]
    pub out: PathBuf,
    #[serde(skip)]
    pub parallel: bool,
}

fn source(args: &SourceArgs, solver: &SolverArgs) -> Result<ProblemSource> {
    match (&args.preset, &args.problem) {
        (Some(name), None) => {
            let name: Preset = name.parse().map_err(|e| anyhow!("{e}"))?;
            Ok(ProblemSource::Preset {
                name,
                phi1_top_full_span: solver.phi1_top_full_span,
            })
        }
        (None, Some(path)) => Ok(ProblemSource::File { path: path.clone() }),
        _ => bail!("exactly one of --preset and --problem is required"),
    }
}

impl RunManifest {
    pub fn for_solve(args: &SolveArgs) -> Result<Self> {
        let source = source(&args.source, &args.solver)?;
        if matches!(source, ProblemSource::Preset { .. }) && args.n.is_none() {
            bail!("--n is required with --preset");
        }
        Ok(Self {
            source,
            n: args.n,
            tol: args.solver.tol,
            max_iters: args.solver.max_iters,
            record_energy: args.record_energy,
            record_jp: args.record_jp,
            study: None,
            out: args.out.clone(),
            parallel: args.solver.parallel,
        })
    }

    pub fn for_study(args: &StudyArgs) -> Result<Self> {
        let source = source(&args.source, &args.solver)?;
        if args.n_list.len() < segregation::study::MIN_RESOLUTIONS {
            bail!(
                "study requires ≥ {} resolutions",
                segregation::study::MIN_RESOLUTIONS
            );
        }
        if args.n_list.windows(2).any(|w| w[1] <= w[0]) {
            bail!("--n-list must be strictly increasing");
        }
        let reference = match args.reference {
            ReferenceArg::Analytic => Reference::Analytic,
            ReferenceArg::Oracle => Reference::Oracle,
        };
        Ok(Self {
            source,
            n: None,
            tol: args.solver.tol,
            max_iters: args.solver.max_iters,
            record_energy: false,
            record_jp: false,
            study: Some(StudyParams {
                n_list: args.n_list.clone(),
                reference,
            }),
            out: args.out.clone(),
            parallel: args.solver.parallel,
        })
    }

    pub fn label(&self) -> String {
        match &self.source {
            ProblemSource::Preset { name, .. } => name.to_string(),
            ProblemSource::File { path } => path
                .file_stem()
                .map_or_else(|| "problem".into(), |s| s.to_string_lossy().into_owned()),
        }
    }

    /// Builds the problem at resolution `n` (or the file's own `n`).
    pub fn problem(&self, n: Option<usize>) -> Result<Problem> {
        match &self.source {
            ProblemSource::Preset {
                name,
                phi1_top_full_span,
            } => {
                let n = n.context("a resolution is required with --preset")?;
                let options = PresetOptions {
                    phi1_top_full_span: *phi1_top_full_span,
                };
                Ok(name.problem_with(n, options)?)
            }
            ProblemSource::File { path } => {
                let file = load_problem_file(path)?;
                Ok(file
                    .to_problem(n)
                    .with_context(|| path.display().to_string())?)
            }
        }
    }

    pub fn solver_config(&self, problem: &Problem) -> Result<SolverConfig> {
        let mut config =
            SolverConfig::for_grid(problem.grid()).recording(self.record_energy, self.record_jp);
        if let Some(tol) = self.tol {
            config = config.with_tol(tol);
        }
        if let Some(max_iters) = self.max_iters {
            config = config.with_max_iters(max_iters);
        }
        config.parallel = self.parallel;
        config.validate()?;
        Ok(config)
    }
}

/// Parses a problem file, reporting syntax and schema errors as
/// `path:line:column: message`.
pub fn load_problem_file(path: &Path) -> Result<ProblemFile> {
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    ProblemFile::from_json(&text).map_err(|e| {
        let message = e.to_string();
        let suffix = format!(" at line {} column {}", e.line(), e.column());
        let message = message.strip_suffix(&suffix).unwrap_or(&message);
        anyhow!(
            "{}:{}:{}: {}",
            path.display(),
            e.line(),
            e.column(),
            message
        )
    })
}
