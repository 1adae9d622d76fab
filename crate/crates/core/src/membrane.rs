//! Two-phase membrane view of a solution `v = u1 - u2`: the discrete
//! complementarity relations
//!
//! ```text
//! L_h v = f1          where v > 0
//! L_h v = -f2         where v < 0
//! -f2 <= L_h v <= f1  where u1 = u2 = 0
//! ```
//!
//! the free boundary between the phases, and max-norm errors against a
//! reference solution.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{apply_laplacian, ScalarField};
use crate::problem::ProblemSpec;
use crate::scalar::Real;
use crate::solver::{SolveReport, SolverState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeClass {
    Positive,
    Negative,
    Zero,
}

impl NodeClass {
    /// Exact sign test; the projection writes exact zeros.
    pub fn of<T: Real>(v: T) -> Self {
        if v > T::zero() {
            NodeClass::Positive
        } else if v < T::zero() {
            NodeClass::Negative
        } else {
            NodeClass::Zero
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            NodeClass::Positive => "positive",
            NodeClass::Negative => "negative",
            NodeClass::Zero => "zero",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassSummary<T> {
    pub count: usize,
    pub worst: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NodeResidual<T> {
    pub node: usize,
    pub class: NodeClass,
    pub residual: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComplementarityReport<T> {
    pub nodes: Vec<NodeResidual<T>>,
    pub positive: ClassSummary<T>,
    pub negative: ClassSummary<T>,
    pub zero: ClassSummary<T>,
}

impl<T: Real> ComplementarityReport<T> {
    pub fn summary(&self, class: NodeClass) -> &ClassSummary<T> {
        match class {
            NodeClass::Positive => &self.positive,
            NodeClass::Negative => &self.negative,
            NodeClass::Zero => &self.zero,
        }
    }

    pub fn worst(&self) -> T {
        self.positive
            .worst
            .max(self.negative.worst)
            .max(self.zero.worst)
    }
}

/// Complementarity residuals of a converged solve. Refuses unconverged runs.
pub fn complementarity<T: Real>(
    report: &SolveReport<T>,
    problem: &ProblemSpec<T>,
) -> Result<ComplementarityReport<T>> {
    report.ensure_converged()?;
    complementarity_of(&report.state.u1, &report.state.u2, problem)
}

/// Residuals for arbitrary densities on the problem grid. `L_h` is applied to
/// the full `v`, boundary values included.
pub fn complementarity_of<T: Real>(
    u1: &ScalarField<T>,
    u2: &ScalarField<T>,
    problem: &ProblemSpec<T>,
) -> Result<ComplementarityReport<T>> {
    let grid = problem.grid();
    if u1.grid() != grid || u2.grid() != grid {
        return Err(Error::GridMismatch);
    }
    let v = u1.try_sub(u2)?;
    let lap = apply_laplacian(&v);
    let (f1, f2) = (problem.f1().field(), problem.f2().field());
    let empty = ClassSummary {
        count: 0,
        worst: T::zero(),
    };
    let mut report = ComplementarityReport {
        nodes: Vec::with_capacity(grid.interior_len()),
        positive: empty,
        negative: empty,
        zero: empty,
    };
    for k in grid.interior() {
        let class = NodeClass::of(v[k]);
        let residual = match class {
            NodeClass::Positive => (lap[k] - f1[k]).abs(),
            NodeClass::Negative => (lap[k] + f2[k]).abs(),
            NodeClass::Zero => (lap[k] - f1[k]).max(-f2[k] - lap[k]).max(T::zero()),
        };
        let summary = match class {
            NodeClass::Positive => &mut report.positive,
            NodeClass::Negative => &mut report.negative,
            NodeClass::Zero => &mut report.zero,
        };
        summary.count += 1;
        summary.worst = summary.worst.max(residual);
        report.nodes.push(NodeResidual {
            node: k,
            class,
            residual,
        });
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FreeBoundarySet<T> {
    /// Edges `(a, b)` whose endpoints have different sign classes of `v`.
    pub edges: Vec<(usize, usize)>,
    /// Interior nodes where both densities vanish.
    pub zero_nodes: Vec<usize>,
    /// `|zero_nodes| * h^dim`.
    pub zero_area: T,
}

impl<T: Real> FreeBoundarySet<T> {
    /// Interior nodes touching a sign-change edge or in the zero set, ascending.
    pub fn nodes(&self, state: &SolverState<T>) -> Vec<usize> {
        let grid = state.u1.grid();
        let mut out: Vec<usize> = self
            .edges
            .iter()
            .flat_map(|&(a, b)| [a, b])
            .chain(self.zero_nodes.iter().copied())
            .filter(|&k| grid.is_interior(k))
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

pub fn free_boundary<T: Real>(state: &SolverState<T>) -> FreeBoundarySet<T> {
    let grid = *state.u1.grid();
    let v = state.v();
    let edges = grid
        .edges()
        .into_iter()
        .filter(|&(a, b)| grid.is_interior(a) || grid.is_interior(b))
        .filter(|&(a, b)| NodeClass::of(v[a]) != NodeClass::of(v[b]))
        .collect();
    let zero_nodes: Vec<usize> = grid
        .interior()
        .filter(|&k| state.u1[k] == T::zero() && state.u2[k] == T::zero())
        .collect();
    let zero_area = T::from_usize_lossy(zero_nodes.len()) * grid.cell_measure();
    FreeBoundarySet {
        edges,
        zero_nodes,
        zero_area,
    }
}

/// Max-norm errors over interior nodes, with `e_i = reference_i - computed_i`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorNorms<T> {
    pub u1: T,
    pub u2: T,
    /// `max |e1 - e2|`, the error in `v`.
    pub v: T,
    /// `max |e1 + e2|`.
    pub sum: T,
    /// Whether `|e1 + e2| <= |e1 - e2|` held at every node.
    pub combination_holds: bool,
}

impl<T: Real> ErrorNorms<T> {
    pub fn max(&self) -> T {
        self.u1.max(self.u2).max(self.v)
    }
}

pub fn error_vs_reference<T: Real>(
    state: &SolverState<T>,
    reference: (&ScalarField<T>, &ScalarField<T>),
) -> Result<ErrorNorms<T>> {
    let (r1, r2) = reference;
    state.u1.check_same_grid(r1)?;
    state.u2.check_same_grid(r2)?;
    let grid = *state.u1.grid();
    let mut out = ErrorNorms {
        u1: T::zero(),
        u2: T::zero(),
        v: T::zero(),
        sum: T::zero(),
        combination_holds: true,
    };
    for k in grid.interior() {
        let e1 = r1[k] - state.u1[k];
        let e2 = r2[k] - state.u2[k];
        out.u1 = out.u1.max(e1.abs());
        out.u2 = out.u2.max(e2.abs());
        out.v = out.v.max((e1 - e2).abs());
        out.sum = out.sum.max((e1 + e2).abs());
        out.combination_holds &= (e1 + e2).abs() <= (e1 - e2).abs();
    }
    Ok(out)
}
