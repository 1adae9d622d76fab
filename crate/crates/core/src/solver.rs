//! The projected Jacobi iteration for two segregated densities.
//!
//! Starting from zero interior values and the boundary traces, every sweep
//! sets, simultaneously on all interior nodes,
//!
//! ```text
//! u1 <- max(avg(u1) - avg(u2) - f1 h^2 / (2 dim), 0)
//! u2 <- max(avg(u2) - avg(u1) - f2 h^2 / (2 dim), 0)
//! ```
//!
//! where `avg` is the mean over stencil neighbors of the previous iterate.
//! Whichever density is positive after the projection forces the other to an
//! exact zero, so `u1 * u2 == 0` holds bit for bit on every iterate.

use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::functional::{jp_sequence, DiscreteEnergy, EnergyBreakdown, JpSequence};
use crate::grid::{inv_neighbor_count, neighbor_sum, Dim, GridSpec, ScalarField};
use crate::problem::{Density, ProblemSpec};
use crate::scalar::Real;

pub const DEFAULT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig<T> {
    /// Stop once no node of `(u1, u2)` moves by more than this in one sweep.
    pub tol: T,
    pub max_iters: usize,
    /// Record `J_h` after every sweep.
    pub record_energy: bool,
    /// Keep every iterate of `u1 - u2` so the interleaved descent sequence can
    /// be evaluated afterwards.
    pub record_jp: bool,
    /// Split each sweep across threads; results are bit-identical.
    pub parallel: bool,
}

impl<T: Real> SolverConfig<T> {
    /// Default tolerance and a budget of `50 n^2` sweeps.
    pub fn for_grid(grid: &GridSpec<T>) -> Self {
        Self {
            tol: T::lit(DEFAULT_TOL),
            max_iters: (50 * grid.n() * grid.n()).max(1),
            record_energy: false,
            record_jp: false,
            parallel: false,
        }
    }

    pub fn with_tol(mut self, tol: T) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_max_iters(mut self, max_iters: usize) -> Self {
        self.max_iters = max_iters;
        self
    }

    pub fn recording(mut self, energy: bool, jp: bool) -> Self {
        self.record_energy = energy;
        self.record_jp = jp;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol > T::zero()) || !self.tol.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "tol must be positive, got {}",
                self.tol
            )));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidConfig("max_iters must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverState<T> {
    pub u1: ScalarField<T>,
    pub u2: ScalarField<T>,
    /// Sweeps applied since initialization.
    pub k: usize,
}

impl<T: Real> SolverState<T> {
    pub fn density(&self, which: Density) -> &ScalarField<T> {
        match which {
            Density::First => &self.u1,
            Density::Second => &self.u2,
        }
    }

    /// `v = u1 - u2`, boundary included.
    pub fn v(&self) -> ScalarField<T> {
        self.u1.try_sub(&self.u2).expect("densities share a grid")
    }

    /// Interior part of `v`, the unknown of `J_h`.
    pub fn v_interior(&self) -> ScalarField<T> {
        self.v().with_zero_boundary()
    }

    /// Largest change of either density between two states.
    pub fn max_change(&self, other: &Self) -> T {
        self.u1
            .values()
            .iter()
            .zip(other.u1.values())
            .chain(self.u2.values().iter().zip(other.u2.values()))
            .fold(T::zero(), |m, (&a, &b)| m.max((a - b).abs()))
    }
}

/// Zero interior values, boundary values from the traces.
pub fn initialize<T: Real>(problem: &ProblemSpec<T>) -> SolverState<T> {
    SolverState {
        u1: problem.phi1().field().clone(),
        u2: problem.phi2().field().clone(),
        k: 0,
    }
}

/// Coefficients of one problem, reused across sweeps.
#[derive(Debug, Clone)]
pub struct Sweeper<'a, T> {
    problem: &'a ProblemSpec<T>,
    shift1: Vec<T>,
    shift2: Vec<T>,
    parallel: bool,
}

impl<'a, T: Real> Sweeper<'a, T> {
    pub fn new(problem: &'a ProblemSpec<T>) -> Self {
        let grid = problem.grid();
        let h = grid.h();
        let scale = h * h * inv_neighbor_count(grid);
        let shift = |f: &ScalarField<T>| f.values().iter().map(|&x| x * scale).collect();
        Self {
            problem,
            shift1: shift(problem.f1().field()),
            shift2: shift(problem.f2().field()),
            parallel: false,
        }
    }

    pub fn parallel(mut self, parallel: bool) -> Self {
        self.parallel = parallel;
        self
    }

    pub fn sweep(&self, state: &SolverState<T>) -> SolverState<T> {
        let grid = *self.problem.grid();
        let mut u1 = state.u1.clone();
        let mut u2 = state.u2.clone();
        let (old1, old2) = (state.u1.values(), state.u2.values());
        match (grid.dim(), self.parallel) {
            (Dim::Two, true) => {
                let side = grid.side();
                u1.values_mut()
                    .par_chunks_mut(side)
                    .zip(u2.values_mut().par_chunks_mut(side))
                    .enumerate()
                    .filter(|(j, _)| *j >= 1 && *j < grid.n())
                    .for_each(|(j, (row1, row2))| {
                        for i in 1..grid.n() {
                            let (a, b) = self.update(&grid, old1, old2, i + j * side);
                            row1[i] = a;
                            row2[i] = b;
                        }
                    });
            }
            _ => {
                let (new1, new2) = (u1.values_mut(), u2.values_mut());
                for k in grid.interior() {
                    let (a, b) = self.update(&grid, old1, old2, k);
                    new1[k] = a;
                    new2[k] = b;
                }
            }
        }
        SolverState {
            u1,
            u2,
            k: state.k + 1,
        }
    }

    #[inline]
    fn update(&self, grid: &GridSpec<T>, u1: &[T], u2: &[T], k: usize) -> (T, T) {
        let inv = inv_neighbor_count(grid);
        let diff = neighbor_sum(u1, grid, k) * inv - neighbor_sum(u2, grid, k) * inv;
        (
            project(diff - self.shift1[k]),
            project(-diff - self.shift2[k]),
        )
    }
}

#[inline]
fn project<T: Real>(x: T) -> T {
    if x > T::zero() {
        x
    } else {
        T::zero()
    }
}

/// One Jacobi sweep: every interior node is recomputed from `state` only.
pub fn sweep<T: Real>(state: &SolverState<T>, problem: &ProblemSpec<T>) -> SolverState<T> {
    Sweeper::new(problem).sweep(state)
}

#[derive(Debug, Clone)]
pub struct SolveReport<T> {
    pub state: SolverState<T>,
    pub iterations: usize,
    pub converged: bool,
    /// Max-norm change of the final sweep (0 when no sweep ran).
    pub last_change: T,
    pub tol: T,
    /// `J_h` of the initial iterate followed by one entry per sweep.
    pub energy: Vec<EnergyBreakdown<T>>,
    /// Interior part of `u1 - u2` for every iterate, initial one included.
    pub v_trace: Vec<ScalarField<T>>,
    pub wall_time: Duration,
}

impl<T: Real> SolveReport<T> {
    pub fn jp_sequence(&self, problem: &ProblemSpec<T>) -> Result<JpSequence<T>> {
        if self.v_trace.is_empty() {
            return Err(Error::Unsupported("solve was run without record_jp".into()));
        }
        jp_sequence(&self.v_trace, problem)
    }

    /// Fails unless the run converged.
    pub fn ensure_converged(&self) -> Result<()> {
        if self.converged {
            Ok(())
        } else {
            Err(Error::NotConverged {
                last_change: self.last_change.to_f64_lossy(),
                tol: self.tol.to_f64_lossy(),
            })
        }
    }
}

pub fn solve<T: Real>(
    problem: &ProblemSpec<T>,
    config: &SolverConfig<T>,
) -> Result<SolveReport<T>> {
    solve_observed(problem, config, |_, _| {})
}

/// [`solve`] with a callback invoked on every `(previous, next)` pair of iterates.
pub fn solve_observed<T: Real>(
    problem: &ProblemSpec<T>,
    config: &SolverConfig<T>,
    mut observer: impl FnMut(&SolverState<T>, &SolverState<T>),
) -> Result<SolveReport<T>> {
    let start = Instant::now();
    config.validate()?;
    problem.ensure_valid()?;

    let energy_eval = DiscreteEnergy::new(problem);
    let mut energy = Vec::new();
    let mut v_trace = Vec::new();
    let record =
        |state: &SolverState<T>, energy: &mut Vec<_>, v_trace: &mut Vec<_>| -> Result<()> {
            if config.record_energy || config.record_jp {
                let v = state.v_interior();
                if config.record_energy {
                    energy.push(energy_eval.evaluate(&v)?);
                }
                if config.record_jp {
                    v_trace.push(v);
                }
            }
            Ok(())
        };

    let mut state = initialize(problem);
    record(&state, &mut energy, &mut v_trace)?;

    if problem.grid().n() < 2 {
        return Ok(SolveReport {
            state,
            iterations: 0,
            converged: true,
            last_change: T::zero(),
            tol: config.tol,
            energy,
            v_trace,
            wall_time: start.elapsed(),
        });
    }

    let sweeper = Sweeper::new(problem).parallel(config.parallel);
    let mut last_change = T::zero();
    let mut converged = false;
    while state.k < config.max_iters {
        let next = sweeper.sweep(&state);
        last_change = next.max_change(&state);
        observer(&state, &next);
        state = next;
        record(&state, &mut energy, &mut v_trace)?;
        if last_change <= config.tol {
            converged = true;
            break;
        }
    }

    Ok(SolveReport {
        iterations: state.k,
        state,
        converged,
        last_change,
        tol: config.tol,
        energy,
        v_trace,
        wall_time: start.elapsed(),
    })
}

/// Breach of one of the iterate invariants.
#[derive(Debug, Clone, PartialEq)]
pub enum InvariantViolation {
    Negative {
        density: Density,
        node: usize,
    },
    Overlap {
        node: usize,
    },
    AboveTraceMax {
        density: Density,
        node: usize,
    },
    AboveNeighborAverage {
        density: Density,
        node: usize,
        excess: f64,
    },
}

/// Nonnegativity, exact disjointness and the `0 <= u_i <= max phi_i` bounds.
pub fn check_state<T: Real>(
    state: &SolverState<T>,
    problem: &ProblemSpec<T>,
) -> Vec<InvariantViolation> {
    let mut out = Vec::new();
    for which in [Density::First, Density::Second] {
        let u = state.density(which);
        let cap = problem.trace(which).max();
        for (node, &x) in u.values().iter().enumerate() {
            if !(x >= T::zero()) {
                out.push(InvariantViolation::Negative {
                    density: which,
                    node,
                });
            }
            if x > cap {
                out.push(InvariantViolation::AboveTraceMax {
                    density: which,
                    node,
                });
            }
        }
    }
    for (node, (&a, &b)) in state.u1.values().iter().zip(state.u2.values()).enumerate() {
        if a != T::zero() && b != T::zero() {
            out.push(InvariantViolation::Overlap { node });
        }
    }
    out
}

/// `u_i^{k+1} <= avg(u_i^k) + slack` on every interior node.
pub fn check_step<T: Real>(
    prev: &SolverState<T>,
    next: &SolverState<T>,
    slack: T,
) -> Vec<InvariantViolation> {
    let grid = *prev.u1.grid();
    let inv = inv_neighbor_count(&grid);
    let mut out = Vec::new();
    for which in [Density::First, Density::Second] {
        let (old, new) = (prev.density(which).values(), next.density(which).values());
        for k in grid.interior() {
            let excess = new[k] - neighbor_sum(old, &grid, k) * inv;
            if excess > slack {
                out.push(InvariantViolation::AboveNeighborAverage {
                    density: which,
                    node: k,
                    excess: excess.to_f64_lossy(),
                });
            }
        }
    }
    out
}
