use std::ops::Index;

use super::GridSpec;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Real values on every node of a grid, boundary included.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField<T> {
    grid: GridSpec<T>,
    values: Vec<T>,
}

impl<T: Real> ScalarField<T> {
    pub fn zeros(grid: GridSpec<T>) -> Self {
        Self::constant(grid, T::zero())
    }

    pub fn constant(grid: GridSpec<T>, c: T) -> Self {
        Self {
            values: vec![c; grid.len()],
            grid,
        }
    }

    /// Wraps `values`, checking the node count and that every entry is finite.
    pub fn from_values(grid: GridSpec<T>, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(k));
        }
        Ok(Self { grid, values })
    }

    pub(crate) fn from_raw(grid: GridSpec<T>, values: Vec<T>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self { grid, values }
    }

    /// Samples `f` at every node position (`[x, 0]` in 1D).
    pub fn from_fn(grid: GridSpec<T>, mut f: impl FnMut([T; 2]) -> T) -> Self {
        let values = (0..grid.len()).map(|k| f(grid.position(k))).collect();
        Self { grid, values }
    }

    pub fn grid(&self) -> &GridSpec<T> {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub(crate) fn values_mut(&mut self) -> &mut [T] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn at(&self, i: usize, j: usize) -> T {
        self.values[self.grid.index(i, j)]
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(T, T) -> T) -> Result<Self> {
        self.check_same_grid(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Ok(Self {
            grid: self.grid,
            values,
        })
    }

    /// `a * self + b * other`.
    pub fn axpby(&self, a: T, other: &Self, b: T) -> Result<Self> {
        self.zip_with(other, |x, y| a * x + b * y)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    /// `(w, v) = sum over all nodes of w_a * v_a`.
    pub fn dot(&self, other: &Self) -> Result<T> {
        self.check_same_grid(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| a * b)
            .sum())
    }

    pub fn max_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    /// Largest `|self - other|` over interior nodes.
    pub fn max_abs_diff_interior(&self, other: &Self) -> Result<T> {
        self.check_same_grid(other)?;
        Ok(self.grid.interior().fold(T::zero(), |m, k| {
            m.max((self.values[k] - other.values[k]).abs())
        }))
    }

    /// Copy with every boundary entry set to zero.
    pub fn with_zero_boundary(&self) -> Self {
        let mut out = self.clone();
        for k in 0..self.grid.len() {
            if !self.grid.is_interior(k) {
                out.values[k] = T::zero();
            }
        }
        out
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn check_same_grid(&self, other: &Self) -> Result<()> {
        if self.grid == other.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }
}

impl<T> Index<usize> for ScalarField<T> {
    type Output = T;

    fn index(&self, k: usize) -> &T {
        &self.values[k]
    }
}
