//! Problem data: internal dynamics `f1, f2`, boundary traces `phi1, phi2`,
//! the admissibility checks on that data, and the boundary-absorbed dynamics.

mod file;
mod presets;

pub use file::{ProblemFile, SourceSpec};
pub use presets::{Preset, PresetDescriptor, PresetOptions};

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{GridSpec, ScalarField};
use crate::scalar::Real;

/// Which of the two densities a quantity belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Density {
    First,
    Second,
}

impl fmt::Display for Density {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Density::First => "1",
            Density::Second => "2",
        })
    }
}

/// Boundary values of one density, stored as a full field that is zero on
/// interior nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryTrace<T> {
    field: ScalarField<T>,
}

impl<T: Real> BoundaryTrace<T> {
    pub fn constant(grid: GridSpec<T>, c: T) -> Self {
        let raw = (0..grid.len())
            .map(|k| if grid.is_interior(k) { T::zero() } else { c })
            .collect();
        Self {
            field: ScalarField::from_raw(grid, raw),
        }
    }

    /// One value per boundary node, in arc order (see [`GridSpec::boundary_arc`]).
    pub fn table(grid: GridSpec<T>, values: &[T]) -> Result<Self> {
        let order = grid.boundary_in_arc_order();
        if values.len() != order.len() {
            return Err(Error::InvalidProblem(format!(
                "boundary table needs {} values, got {}",
                order.len(),
                values.len()
            )));
        }
        let mut raw = vec![T::zero(); grid.len()];
        for (&k, &v) in order.iter().zip(values) {
            raw[k] = v;
        }
        Ok(Self {
            field: ScalarField::from_values(grid, raw)?,
        })
    }

    /// Linear interpolation of `(arc position, value)` breakpoints. Breakpoints
    /// must be sorted by arc position and span every boundary node.
    pub fn piecewise_linear(grid: GridSpec<T>, points: &[(T, T)]) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidProblem(
                "piecewise-linear trace needs breakpoints".into(),
            ));
        }
        if points.windows(2).any(|w| w[1].0 < w[0].0) {
            return Err(Error::InvalidProblem(
                "breakpoints must be sorted by arc position".into(),
            ));
        }
        let mut raw = vec![T::zero(); grid.len()];
        for k in grid.boundary_in_arc_order() {
            let t = grid.boundary_arc(k).expect("boundary node");
            raw[k] = interpolate(points, t).ok_or_else(|| {
                Error::InvalidProblem(format!("arc position {t} is outside the breakpoint range"))
            })?;
        }
        Ok(Self {
            field: ScalarField::from_values(grid, raw)?,
        })
    }

    pub fn field(&self) -> &ScalarField<T> {
        &self.field
    }

    /// Largest boundary value (0 for an empty boundary).
    pub fn max(&self) -> T {
        let grid = self.field.grid();
        (0..grid.len())
            .filter(|&k| !grid.is_interior(k))
            .fold(T::zero(), |m, k| m.max(self.field[k]))
    }
}

fn interpolate<T: Real>(points: &[(T, T)], t: T) -> Option<T> {
    if points.len() == 1 {
        return (points[0].0 == t).then_some(points[0].1);
    }
    for w in points.windows(2) {
        let ((t0, v0), (t1, v1)) = (w[0], w[1]);
        if t < t0 || t > t1 {
            continue;
        }
        if v0 == v1 {
            return Some(v0);
        }
        if t1 == t0 {
            return Some(v1);
        }
        let s = (t - t0) / (t1 - t0);
        return Some(v0 + (v1 - v0) * s);
    }
    None
}

/// Internal dynamics `f_i` sampled on every node.
#[derive(Debug, Clone, PartialEq)]
pub struct DynamicsField<T> {
    field: ScalarField<T>,
    constant: Option<T>,
}

impl<T: Real> DynamicsField<T> {
    pub fn constant(grid: GridSpec<T>, c: T) -> Self {
        Self {
            field: ScalarField::constant(grid, c),
            constant: Some(c),
        }
    }

    /// One value per node in row-major order.
    pub fn table(grid: GridSpec<T>, values: Vec<T>) -> Result<Self> {
        let field = ScalarField::from_values(grid, values)?;
        let first = field[0];
        let constant = field.values().iter().all(|&v| v == first).then_some(first);
        Ok(Self { field, constant })
    }

    pub fn field(&self) -> &ScalarField<T> {
        &self.field
    }

    /// The common value when the dynamics are spatially constant.
    pub fn as_constant(&self) -> Option<T> {
        self.constant
    }
}

/// A two-density segregation problem on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec<T> {
    grid: GridSpec<T>,
    f1: DynamicsField<T>,
    f2: DynamicsField<T>,
    phi1: BoundaryTrace<T>,
    phi2: BoundaryTrace<T>,
    g: ScalarField<T>,
}

impl<T: Real> ProblemSpec<T> {
    pub fn new(
        grid: GridSpec<T>,
        f1: DynamicsField<T>,
        f2: DynamicsField<T>,
        phi1: BoundaryTrace<T>,
        phi2: BoundaryTrace<T>,
    ) -> Result<Self> {
        for f in [f1.field(), f2.field(), phi1.field(), phi2.field()] {
            if *f.grid() != grid {
                return Err(Error::GridMismatch);
            }
        }
        let g = phi1.field().try_sub(phi2.field())?;
        Ok(Self {
            grid,
            f1,
            f2,
            phi1,
            phi2,
            g,
        })
    }

    pub fn grid(&self) -> &GridSpec<T> {
        &self.grid
    }

    pub fn f1(&self) -> &DynamicsField<T> {
        &self.f1
    }

    pub fn f2(&self) -> &DynamicsField<T> {
        &self.f2
    }

    pub fn dynamics(&self, which: Density) -> &DynamicsField<T> {
        match which {
            Density::First => &self.f1,
            Density::Second => &self.f2,
        }
    }

    pub fn phi1(&self) -> &BoundaryTrace<T> {
        &self.phi1
    }

    pub fn phi2(&self) -> &BoundaryTrace<T> {
        &self.phi2
    }

    pub fn trace(&self, which: Density) -> &BoundaryTrace<T> {
        match which {
            Density::First => &self.phi1,
            Density::Second => &self.phi2,
        }
    }

    /// `g = phi1 - phi2` on the boundary, zero inside.
    pub fn g(&self) -> &ScalarField<T> {
        &self.g
    }

    pub fn validate(&self) -> Validation {
        let mut violations = Vec::new();
        for which in [Density::First, Density::Second] {
            let f = self.dynamics(which).field();
            for (node, &value) in f.values().iter().enumerate() {
                if !(value >= T::zero()) {
                    violations.push(Violation::NegativeDynamics {
                        density: which,
                        node,
                        value: value.to_f64_lossy(),
                    });
                }
            }
        }
        let boundary = self.grid.boundary_in_arc_order();
        for which in [Density::First, Density::Second] {
            let phi = self.trace(which).field();
            for &node in &boundary {
                if !(phi[node] >= T::zero()) {
                    violations.push(Violation::NegativeTrace {
                        density: which,
                        node,
                        value: phi[node].to_f64_lossy(),
                    });
                }
            }
        }
        for &node in &boundary {
            let (a, b) = (self.phi1.field()[node], self.phi2.field()[node]);
            if a != T::zero() && b != T::zero() {
                violations.push(Violation::ProductNonzero {
                    node,
                    phi1: a.to_f64_lossy(),
                    phi2: b.to_f64_lossy(),
                });
            }
        }
        Validation { violations }
    }

    /// Like [`ProblemSpec::validate`] but as a `Result`, for callers that just
    /// need a valid problem.
    pub fn ensure_valid(&self) -> Result<()> {
        let v = self.validate();
        if v.is_ok() {
            Ok(())
        } else {
            Err(Error::InvalidProblem(v.to_string()))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Violation {
    NegativeDynamics {
        density: Density,
        node: usize,
        value: f64,
    },
    NegativeTrace {
        density: Density,
        node: usize,
        value: f64,
    },
    ProductNonzero {
        node: usize,
        phi1: f64,
        phi2: f64,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NegativeDynamics {
                density,
                node,
                value,
            } => {
                write!(f, "negative dynamics f{density} = {value} at node {node}")
            }
            Violation::NegativeTrace {
                density,
                node,
                value,
            } => {
                write!(
                    f,
                    "negative boundary trace phi{density} = {value} at node {node}"
                )
            }
            Violation::ProductNonzero { node, phi1, phi2 } => {
                write!(
                    f,
                    "product nonzero at node {node}: phi1 = {phi1}, phi2 = {phi2}"
                )
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Validation {
    pub violations: Vec<Violation>,
}

impl Validation {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for Validation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return f.write_str("ok");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// `f1, f2` with the boundary data folded in: at an interior node,
/// `f~ = f - (sum of g over boundary neighbors) / h^2`. Boundary entries are 0.
#[derive(Debug, Clone, PartialEq)]
pub struct ModifiedDynamics<T> {
    pub f1: ScalarField<T>,
    pub f2: ScalarField<T>,
}

pub fn modified_dynamics<T: Real>(problem: &ProblemSpec<T>) -> ModifiedDynamics<T> {
    let grid = *problem.grid();
    let h = grid.h();
    let inv_h2 = (h * h).recip();
    let g = problem.g();
    let absorbed = |f: &ScalarField<T>| {
        let mut out = vec![T::zero(); grid.len()];
        for k in grid.interior() {
            let boundary_sum: T = grid
                .neighbors_unchecked(k)
                .as_slice()
                .iter()
                .filter(|&&m| !grid.is_interior(m))
                .map(|&m| g[m])
                .sum();
            out[k] = if boundary_sum == T::zero() {
                f[k]
            } else {
                f[k] - boundary_sum * inv_h2
            };
        }
        ScalarField::from_raw(grid, out)
    };
    ModifiedDynamics {
        f1: absorbed(problem.f1().field()),
        f2: absorbed(problem.f2().field()),
    }
}
