use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::{BoundaryTrace, DynamicsField, ProblemSpec};
use crate::error::{Error, Result};
use crate::grid::{Dim, GridSpec};
use crate::scalar::Real;

/// The published example problems: four constant-dynamics runs on `[-1, 1]`
/// and two on the unit square with piecewise-linear boundary traces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    Fig1a,
    Fig1b,
    Fig1c,
    Fig1d,
    Fig2,
    Fig3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PresetOptions {
    /// Read the first piece of `phi1` on the top edge as `0.5 - 5x/8` on the
    /// whole of `[0, 0.8]` instead of bridging `(0.2, 0.375)` to `(0.8, 0)`.
    /// Both readings describe the same line; the flag only changes how the
    /// breakpoints are written down.
    pub phi1_top_full_span: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PresetDescriptor {
    pub name: &'static str,
    pub dim: usize,
    pub domain: &'static str,
    pub f1: f64,
    pub f2: f64,
    pub boundary: &'static str,
}

const LINE_BOUNDARY: &str = "phi1(-1) = 1, phi2(1) = 1, phi2(-1) = phi1(1) = 0";
const SQUARE_BOUNDARY: &str =
    "piecewise linear: phi1 = 0.5 on x = 0, phi2 = 0.5 on x = 1, both vanish \
     along the bottom at x = 0.2 and along the top at x = 0.8";

impl Preset {
    pub const ALL: [Preset; 6] = [
        Preset::Fig1a,
        Preset::Fig1b,
        Preset::Fig1c,
        Preset::Fig1d,
        Preset::Fig2,
        Preset::Fig3,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Fig1a => "fig1a",
            Preset::Fig1b => "fig1b",
            Preset::Fig1c => "fig1c",
            Preset::Fig1d => "fig1d",
            Preset::Fig2 => "fig2",
            Preset::Fig3 => "fig3",
        }
    }

    pub fn dim(self) -> Dim {
        match self {
            Preset::Fig2 | Preset::Fig3 => Dim::Two,
            _ => Dim::One,
        }
    }

    /// Constant internal dynamics `(f1, f2)`.
    pub fn dynamics(self) -> (f64, f64) {
        match self {
            Preset::Fig1a => (0.0, 0.0),
            Preset::Fig1b => (0.0, 3.0),
            Preset::Fig1c => (1.0, 8.0),
            Preset::Fig1d => (2.0, 8.0),
            Preset::Fig2 => (0.0, 5.0),
            Preset::Fig3 => (4.0, 12.0),
        }
    }

    pub fn descriptor(self) -> PresetDescriptor {
        let (f1, f2) = self.dynamics();
        let (domain, boundary) = match self.dim() {
            Dim::One => ("[-1, 1]", LINE_BOUNDARY),
            Dim::Two => ("[0, 1] x [0, 1]", SQUARE_BOUNDARY),
        };
        PresetDescriptor {
            name: self.name(),
            dim: self.dim().count(),
            domain,
            f1,
            f2,
            boundary,
        }
    }

    pub fn problem<T: Real>(self, n: usize) -> Result<ProblemSpec<T>> {
        self.problem_with(n, PresetOptions::default())
    }

    pub fn problem_with<T: Real>(self, n: usize, options: PresetOptions) -> Result<ProblemSpec<T>> {
        let (f1, f2) = self.dynamics();
        let (grid, phi1, phi2) = match self.dim() {
            Dim::One => {
                let grid = GridSpec::line(T::lit(-1.0), T::lit(2.0), n)?;
                let phi1 = BoundaryTrace::table(grid, &[T::one(), T::zero()])?;
                let phi2 = BoundaryTrace::table(grid, &[T::zero(), T::one()])?;
                (grid, phi1, phi2)
            }
            Dim::Two => {
                let grid = GridSpec::square([T::zero(), T::zero()], T::one(), n)?;
                let to_t = |pts: &[(f64, f64)]| {
                    pts.iter()
                        .map(|&(t, v)| (T::lit(t), T::lit(v)))
                        .collect::<Vec<_>>()
                };
                let phi1 = BoundaryTrace::piecewise_linear(grid, &to_t(&square_phi1(options)))?;
                let phi2 = BoundaryTrace::piecewise_linear(grid, &to_t(&SQUARE_PHI2))?;
                (grid, phi1, phi2)
            }
        };
        let problem = ProblemSpec::new(
            grid,
            DynamicsField::constant(grid, T::lit(f1)),
            DynamicsField::constant(grid, T::lit(f2)),
            phi1,
            phi2,
        )?;
        problem.ensure_valid()?;
        Ok(problem)
    }
}

// Breakpoints along the unit-square boundary, arc position t running
// counterclockwise from the origin: bottom t = x, right t = 1 + y,
// top t = 3 - x, left t = 4 - y.
fn square_phi1(options: PresetOptions) -> Vec<(f64, f64)> {
    let mut pts = vec![(0.0, 0.5), (0.2, 0.0), (2.2, 0.0)];
    if !options.phi1_top_full_span {
        pts.push((2.8, 0.375));
    }
    pts.extend([(3.0, 0.5), (4.0, 0.5)]);
    pts
}

const SQUARE_PHI2: [(f64, f64); 6] = [
    (0.0, 0.0),
    (0.2, 0.0),
    (1.0, 0.5),
    (2.0, 0.5),
    (2.2, 0.0),
    (4.0, 0.0),
];

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownPreset(s.to_string()))
    }
}
