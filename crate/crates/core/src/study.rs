//! Convergence-rate studies: solve one problem family on a ladder of
//! resolutions, measure max-norm errors against a reference, and check them
//! against the `M h^(2/7)` envelope.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::membrane::{error_vs_reference, ErrorNorms};
use crate::oracle::{analytic_1d_constant, minimize_discrete_energy};
use crate::problem::ProblemSpec;
use crate::scalar::Real;
use crate::solver::{solve, SolverConfig};

/// Errors at or below this are treated as exact: they measure the stopping
/// tolerance, not the discretization, so orders are not computed from them.
pub const SATURATION_FLOOR: f64 = 1e-8;

pub const ENVELOPE_EXPONENT: f64 = 2.0 / 7.0;

pub const MIN_RESOLUTIONS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Reference {
    /// Closed-form 1D solution for constant dynamics.
    Analytic,
    /// Coordinate-descent minimizer of the same discrete energy; isolates the
    /// iteration error from the discretization error.
    Oracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StudyRow<T> {
    pub n: usize,
    pub h: T,
    pub errors: ErrorNorms<T>,
    /// Order against the previous row; `None` for the first row or when
    /// either error is saturated.
    pub order: Option<T>,
    pub iterations: usize,
    pub converged: bool,
}

impl<T: Real> StudyRow<T> {
    pub fn error(&self) -> T {
        self.errors.max()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateTable<T> {
    pub rows: Vec<StudyRow<T>>,
}

impl<T: Real> RateTable<T> {
    pub fn from_rows(rows: Vec<StudyRow<T>>) -> Self {
        let mut rows = rows;
        let floor = T::lit(SATURATION_FLOOR);
        for i in 1..rows.len() {
            let (prev, cur) = (rows[i - 1], rows[i]);
            rows[i].order = if prev.error() <= floor || cur.error() <= floor {
                None
            } else {
                Some((prev.error() / cur.error()).ln() / (prev.h / cur.h).ln())
            };
        }
        if let Some(first) = rows.first_mut() {
            first.order = None;
        }
        Self { rows }
    }

    /// `max err / h^(2/7)` over all rows.
    pub fn fitted_m(&self) -> T {
        self.rows
            .iter()
            .map(|r| r.error() / envelope(r.h))
            .fold(T::zero(), T::max)
    }

    /// The constant fitted at the coarsest resolution only.
    pub fn coarsest_m(&self) -> T {
        self.rows
            .first()
            .map_or(T::zero(), |r| r.error() / envelope(r.h))
    }

    /// Each error column is non-increasing, up to the saturation floor.
    pub fn is_monotone(&self) -> bool {
        let floor = T::lit(SATURATION_FLOOR);
        let ok = |a: T, b: T| b <= a.max(floor);
        self.rows.windows(2).all(|w| {
            let (a, b) = (w[0].errors, w[1].errors);
            ok(a.u1, b.u1) && ok(a.u2, b.u2) && ok(a.v, b.v)
        })
    }

    /// Every row satisfies `err <= M_coarsest h^(2/7)`, or is saturated.
    pub fn within_envelope(&self) -> bool {
        let m = self.coarsest_m();
        let floor = T::lit(SATURATION_FLOOR);
        // The coarsest row meets the bound with equality; allow its rounding.
        let slack = T::one() + T::lit(16.0) * T::epsilon();
        self.rows
            .iter()
            .all(|r| r.error() <= (m * envelope(r.h) * slack).max(floor))
    }

    /// Every computed (unsaturated) order is at least `min`.
    pub fn orders_at_least(&self, min: T) -> bool {
        self.rows.iter().filter_map(|r| r.order).all(|p| p >= min)
    }

    pub fn all_saturated(&self) -> bool {
        let floor = T::lit(SATURATION_FLOOR);
        self.rows.iter().all(|r| r.error() <= floor)
    }

    /// The pass/fail rule of a study run: monotone and inside the envelope.
    pub fn passes(&self) -> bool {
        self.is_monotone() && self.within_envelope()
    }
}

fn envelope<T: Real>(h: T) -> T {
    h.powf(T::lit(ENVELOPE_EXPONENT))
}

/// Solve `problem_at(n)` for each `n` (strictly increasing, at least three)
/// and tabulate errors against `reference`.
pub fn run_study<T: Real>(
    problem_at: impl Fn(usize) -> Result<ProblemSpec<T>>,
    ns: &[usize],
    reference: Reference,
    configure: impl Fn(SolverConfig<T>) -> SolverConfig<T>,
) -> Result<RateTable<T>> {
    if ns.len() < MIN_RESOLUTIONS {
        return Err(Error::InvalidConfig(format!(
            "study requires ≥ {MIN_RESOLUTIONS} resolutions"
        )));
    }
    if ns.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidConfig(
            "study resolutions must be strictly increasing".into(),
        ));
    }
    let mut rows = Vec::with_capacity(ns.len());
    for &n in ns {
        let problem = problem_at(n)?;
        let config = configure(SolverConfig::for_grid(problem.grid()));
        let report = solve(&problem, &config)?;
        let (r1, r2) = match reference {
            Reference::Analytic => analytic_1d_constant(&problem)?.sample(problem.grid()),
            Reference::Oracle => minimize_discrete_energy(&problem)?.densities(&problem),
        };
        let errors = error_vs_reference(&report.state, (&r1, &r2))?;
        rows.push(StudyRow {
            n,
            h: problem.grid().h(),
            errors,
            order: None,
            iterations: report.iterations,
            converged: report.converged,
        });
    }
    Ok(RateTable::from_rows(rows))
}
