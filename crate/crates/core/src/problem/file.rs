//! JSON problem files.
//!
//! ```json
//! {
//!   "dim": 1, "origin": [-1.0], "extent": [2.0], "n": 64,
//!   "f1": {"constant": 1.0}, "f2": {"constant": 8.0},
//!   "phi1": {"table": [1.0, 0.0]},
//!   "phi2": {"piecewise_linear": [[0.0, 0.0], [2.0, 1.0]]}
//! }
//! ```
//!
//! Dynamics accept `constant` or `table` (one value per node, row-major).
//! Traces accept `constant`, `table` (one value per boundary node in arc
//! order) or `piecewise_linear` breakpoints `[arc position, value]`.

use serde::{Deserialize, Serialize};

use super::{BoundaryTrace, DynamicsField, ProblemSpec};
use crate::error::{Error, Result};
use crate::grid::{Dim, GridSpec};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceSpec {
    Constant(f64),
    Table(Vec<f64>),
    PiecewiseLinear(Vec<[f64; 2]>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub dim: usize,
    pub origin: Vec<f64>,
    pub extent: Vec<f64>,
    pub n: usize,
    pub f1: SourceSpec,
    pub f2: SourceSpec,
    pub phi1: SourceSpec,
    pub phi2: SourceSpec,
}

impl ProblemFile {
    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    /// Builds the problem, optionally on a different `n` than the file states.
    pub fn to_problem<T: Real>(&self, n_override: Option<usize>) -> Result<ProblemSpec<T>> {
        let dim = Dim::from_count(self.dim)?;
        let axes = dim.count();
        if self.origin.len() != axes || self.extent.len() != axes {
            return Err(Error::InvalidProblem(format!(
                "origin and extent need {axes} entries each"
            )));
        }
        if axes == 2 && self.extent[0] != self.extent[1] {
            return Err(Error::InvalidProblem(
                "2D domains must be squares (equal extents)".into(),
            ));
        }
        let n = n_override.unwrap_or(self.n);
        let origin = [
            T::lit(self.origin[0]),
            T::lit(*self.origin.get(1).unwrap_or(&0.0)),
        ];
        let grid = GridSpec::new(dim, origin, T::lit(self.extent[0]), n)?;
        ProblemSpec::new(
            grid,
            dynamics(grid, &self.f1, "f1")?,
            dynamics(grid, &self.f2, "f2")?,
            trace(grid, &self.phi1)?,
            trace(grid, &self.phi2)?,
        )
    }
}

fn dynamics<T: Real>(grid: GridSpec<T>, spec: &SourceSpec, name: &str) -> Result<DynamicsField<T>> {
    match spec {
        SourceSpec::Constant(c) => Ok(DynamicsField::constant(grid, T::lit(*c))),
        SourceSpec::Table(values) => {
            DynamicsField::table(grid, values.iter().map(|&v| T::lit(v)).collect())
        }
        SourceSpec::PiecewiseLinear(_) => Err(Error::InvalidProblem(format!(
            "{name}: piecewise_linear is only defined for boundary traces"
        ))),
    }
}

fn trace<T: Real>(grid: GridSpec<T>, spec: &SourceSpec) -> Result<BoundaryTrace<T>> {
    match spec {
        SourceSpec::Constant(c) => Ok(BoundaryTrace::constant(grid, T::lit(*c))),
        SourceSpec::Table(values) => {
            BoundaryTrace::table(grid, &values.iter().map(|&v| T::lit(v)).collect::<Vec<_>>())
        }
        SourceSpec::PiecewiseLinear(points) => BoundaryTrace::piecewise_linear(
            grid,
            &points
                .iter()
                .map(|&[t, v]| (T::lit(t), T::lit(v)))
                .collect::<Vec<_>>(),
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::Preset;

    const FIG1C: &str = r#"{
        "dim": 1, "origin": [-1.0], "extent": [2.0], "n": 16,
        "f1": {"constant": 1.0}, "f2": {"constant": 8.0},
        "phi1": {"table": [1.0, 0.0]},
        "phi2": {"piecewise_linear": [[0.0, 0.0], [2.0, 1.0]]}
    }"#;

    #[test]
    fn parses_and_matches_preset() {
        let file = ProblemFile::from_json(FIG1C).unwrap();
        let p: ProblemSpec<f64> = file.to_problem(None).unwrap();
        assert_eq!(p, Preset::Fig1c.problem(16).unwrap());
        let q: ProblemSpec<f64> = file.to_problem(Some(32)).unwrap();
        assert_eq!(q.grid().n(), 32);
    }

    #[test]
    fn rejects_unknown_keys() {
        let text = FIG1C.replacen("\"n\": 16", "\"n\": 16, \"colour\": 3", 1);
        let err = ProblemFile::from_json(&text).unwrap_err();
        assert!(err.to_string().contains("unknown field"));
        assert!(err.line() >= 1);
        let bad_variant = FIG1C.replace("{\"constant\": 8.0}", "{\"cosine\": 8.0}");
        assert!(ProblemFile::from_json(&bad_variant).is_err());
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let text = "{\n  \"dim\": 1,\n  \"origin\": [oops]\n}";
        let err = ProblemFile::from_json(text).unwrap_err();
        assert_eq!(err.line(), 3);
    }

    #[test]
    fn rejects_piecewise_dynamics_and_bad_shapes() {
        let mut file = ProblemFile::from_json(FIG1C).unwrap();
        file.f1 = SourceSpec::PiecewiseLinear(vec![[0.0, 1.0]]);
        assert!(file.to_problem::<f64>(None).is_err());

        let mut file = ProblemFile::from_json(FIG1C).unwrap();
        file.origin = vec![0.0, 0.0];
        assert!(file.to_problem::<f64>(None).is_err());

        let mut file = ProblemFile::from_json(FIG1C).unwrap();
        file.dim = 2;
        file.origin = vec![0.0, 0.0];
        file.extent = vec![1.0, 2.0];
        assert!(file.to_problem::<f64>(None).is_err());
    }
}
