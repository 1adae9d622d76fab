//! Uniform node-centered meshes on intervals and squares, their index sets,
//! and the 3-point / 5-point discrete Laplacians.
//!
//! Nodes are numbered row-major: node `(i, j)` has flat index `i + j * (n + 1)`.
//! In 1D only `i` is used. Boundary values are stored alongside interior ones.

mod field;

pub use field::ScalarField;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Dim {
    One,
    Two,
}

impl Dim {
    pub fn count(self) -> usize {
        match self {
            Dim::One => 1,
            Dim::Two => 2,
        }
    }

    pub fn from_count(d: usize) -> Result<Self> {
        match d {
            1 => Ok(Dim::One),
            2 => Ok(Dim::Two),
            _ => Err(Error::InvalidGrid(format!(
                "dimension must be 1 or 2, got {d}"
            ))),
        }
    }
}

/// Uniform mesh with `n` subdivisions per axis.
///
/// In 2D both axes share `n` and the side length, so one spacing `h` serves
/// both directions of the 5-point stencil.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec<T> {
    dim: Dim,
    origin: [T; 2],
    extent: T,
    n: usize,
}

impl<T: Real> GridSpec<T> {
    /// Interval `[origin, origin + extent]`.
    pub fn line(origin: T, extent: T, n: usize) -> Result<Self> {
        Self::new(Dim::One, [origin, T::zero()], extent, n)
    }

    /// Square `[ox, ox + side] x [oy, oy + side]`.
    pub fn square(origin: [T; 2], side: T, n: usize) -> Result<Self> {
        Self::new(Dim::Two, origin, side, n)
    }

    pub fn new(dim: Dim, origin: [T; 2], extent: T, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGrid("n must be positive".into()));
        }
        if !(extent > T::zero()) || !extent.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "extent must be positive and finite, got {extent}"
            )));
        }
        if origin.iter().any(|o| !o.is_finite()) {
            return Err(Error::InvalidGrid("origin must be finite".into()));
        }
        let origin = match dim {
            Dim::One => [origin[0], T::zero()],
            Dim::Two => origin,
        };
        Ok(Self {
            dim,
            origin,
            extent,
            n,
        })
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn origin(&self) -> [T; 2] {
        self.origin
    }

    pub fn extent(&self) -> T {
        self.extent
    }

    pub fn h(&self) -> T {
        self.extent / T::from_usize_lossy(self.n)
    }

    /// Nodes along one axis, `n + 1`.
    pub fn side(&self) -> usize {
        self.n + 1
    }

    /// Total node count, `(n + 1)^dim`.
    pub fn len(&self) -> usize {
        self.side().pow(self.dim.count() as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn interior_len(&self) -> usize {
        (self.n - 1).pow(self.dim.count() as u32)
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i <= self.n && j <= self.n);
        i + j * self.side()
    }

    /// Inverse of [`GridSpec::index`].
    pub fn node(&self, flat: usize) -> (usize, usize) {
        match self.dim {
            Dim::One => (flat, 0),
            Dim::Two => (flat % self.side(), flat / self.side()),
        }
    }

    /// Coordinate of the `i`-th node along `axis`; hits both endpoints exactly.
    pub fn coord(&self, axis: usize, i: usize) -> T {
        let o = self.origin[axis];
        if i == self.n {
            o + self.extent
        } else {
            o + T::from_usize_lossy(i) * self.h()
        }
    }

    pub fn position(&self, flat: usize) -> [T; 2] {
        let (i, j) = self.node(flat);
        match self.dim {
            Dim::One => [self.coord(0, i), T::zero()],
            Dim::Two => [self.coord(0, i), self.coord(1, j)],
        }
    }

    pub fn is_interior(&self, flat: usize) -> bool {
        let (i, j) = self.node(flat);
        let inside = |k: usize| k >= 1 && k < self.n;
        match self.dim {
            Dim::One => inside(i),
            Dim::Two => inside(i) && inside(j),
        }
    }

    /// Interior nodes in ascending flat order.
    pub fn interior(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&k| self.is_interior(k))
    }

    pub fn index_set(&self) -> IndexSet {
        let (interior, boundary) = (0..self.len()).partition(|&k| self.is_interior(k));
        IndexSet {
            len: self.len(),
            interior,
            boundary,
        }
    }

    /// Stencil neighbors of an interior node: `[left, right]` in 1D,
    /// `[left, right, down, up]` in 2D.
    pub fn neighbors(&self, flat: usize) -> Result<Neighbors> {
        if !self.is_interior(flat) {
            return Err(Error::NotInterior(flat));
        }
        Ok(self.neighbors_unchecked(flat))
    }

    pub(crate) fn neighbors_unchecked(&self, flat: usize) -> Neighbors {
        match self.dim {
            Dim::One => Neighbors {
                nodes: [flat - 1, flat + 1, 0, 0],
                len: 2,
            },
            Dim::Two => {
                let s = self.side();
                Neighbors {
                    nodes: [flat - 1, flat + 1, flat - s, flat + s],
                    len: 4,
                }
            }
        }
    }

    /// Length of the boundary: `extent` in 1D (the two endpoints sit at arc
    /// positions 0 and `extent`), the perimeter in 2D.
    pub fn perimeter(&self) -> T {
        match self.dim {
            Dim::One => self.extent,
            Dim::Two => T::lit(4.0) * self.extent,
        }
    }

    /// Arc position of a boundary node, measured from the origin corner and
    /// running counterclockwise in 2D (bottom, right, top, left).
    pub fn boundary_arc(&self, flat: usize) -> Option<T> {
        if self.is_interior(flat) {
            return None;
        }
        let (i, j) = self.node(flat);
        let n = self.n;
        let step = |k: usize| {
            if k == n {
                self.extent
            } else {
                T::from_usize_lossy(k) * self.h()
            }
        };
        let side = self.extent;
        Some(match self.dim {
            Dim::One => step(i),
            Dim::Two => {
                if j == 0 {
                    step(i)
                } else if i == n {
                    side + step(j)
                } else if j == n {
                    side + side + step(n - i)
                } else {
                    // i == 0, 0 < j < n
                    side + side + side + step(n - j)
                }
            }
        })
    }

    /// Boundary nodes ordered by arc position.
    pub fn boundary_in_arc_order(&self) -> Vec<usize> {
        let n = self.n;
        match self.dim {
            Dim::One => vec![0, n],
            Dim::Two => {
                let mut out = Vec::with_capacity(4 * n);
                out.extend((0..n).map(|i| self.index(i, 0)));
                out.extend((0..n).map(|j| self.index(n, j)));
                out.extend((0..n).map(|k| self.index(n - k, n)));
                out.extend((0..n).map(|k| self.index(0, n - k)));
                out
            }
        }
    }

    /// Grid edges `(a, b)` with `a < b`: horizontal edges first, then vertical.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let s = self.side();
        match self.dim {
            Dim::One => (0..self.n).map(|i| (i, i + 1)).collect(),
            Dim::Two => {
                let mut out = Vec::with_capacity(2 * self.n * s);
                for j in 0..s {
                    for i in 0..self.n {
                        out.push((self.index(i, j), self.index(i + 1, j)));
                    }
                }
                for j in 0..self.n {
                    for i in 0..s {
                        out.push((self.index(i, j), self.index(i, j + 1)));
                    }
                }
                out
            }
        }
    }

    /// Cell measure `h^dim`.
    pub fn cell_measure(&self) -> T {
        self.h().powi(self.dim.count() as i32)
    }

    pub fn same_as(&self, other: &Self) -> bool {
        self == other
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Neighbors {
    nodes: [usize; 4],
    len: usize,
}

impl Neighbors {
    pub fn as_slice(&self) -> &[usize] {
        &self.nodes[..self.len]
    }
}

/// The node sets `all`, `interior` and `boundary = all \ interior`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexSet {
    len: usize,
    interior: Vec<usize>,
    boundary: Vec<usize>,
}

impl IndexSet {
    pub fn all(&self) -> impl Iterator<Item = usize> {
        0..self.len
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn interior(&self) -> &[usize] {
        &self.interior
    }

    pub fn boundary(&self) -> &[usize] {
        &self.boundary
    }
}

/// Sum of the stencil neighbors, added pairwise so that a sum of values bounded
/// by `m` is bounded by `2 * dim * m` without rounding overshoot.
#[inline]
pub(crate) fn neighbor_sum<T: Real>(values: &[T], grid: &GridSpec<T>, flat: usize) -> T {
    match grid.dim {
        Dim::One => values[flat - 1] + values[flat + 1],
        Dim::Two => {
            let s = grid.side();
            (values[flat - 1] + values[flat + 1]) + (values[flat - s] + values[flat + s])
        }
    }
}

#[inline]
pub(crate) fn inv_neighbor_count<T: Real>(grid: &GridSpec<T>) -> T {
    match grid.dim {
        Dim::One => T::lit(0.5),
        Dim::Two => T::lit(0.25),
    }
}

/// Mean of the 2 (1D) or 4 (2D) stencil neighbors of an interior node.
pub fn neighbor_average<T: Real>(field: &ScalarField<T>, flat: usize) -> Result<T> {
    let grid = field.grid();
    if flat >= grid.len() || !grid.is_interior(flat) {
        return Err(Error::NotInterior(flat));
    }
    Ok(neighbor_sum(field.values(), grid, flat) * inv_neighbor_count(grid))
}

#[inline]
pub(crate) fn laplacian_at<T: Real>(values: &[T], grid: &GridSpec<T>, flat: usize, inv_h2: T) -> T {
    let centre = T::from_usize_lossy(2 * grid.dim.count()) * values[flat];
    (neighbor_sum(values, grid, flat) - centre) * inv_h2
}

/// `L_h` at an interior node: `(v[i-1] - 2v[i] + v[i+1]) / h^2` in 1D and the
/// 5-point stencil in 2D.
pub fn discrete_laplacian<T: Real>(field: &ScalarField<T>, flat: usize) -> Result<T> {
    let grid = field.grid();
    if flat >= grid.len() || !grid.is_interior(flat) {
        return Err(Error::NotInterior(flat));
    }
    let h = grid.h();
    Ok(laplacian_at(field.values(), grid, flat, (h * h).recip()))
}

/// `L_h` on every interior node; boundary entries of the result are zero.
pub fn apply_laplacian<T: Real>(field: &ScalarField<T>) -> ScalarField<T> {
    let grid = *field.grid();
    let h = grid.h();
    let inv_h2 = (h * h).recip();
    let mut out = vec![T::zero(); grid.len()];
    for k in grid.interior() {
        out[k] = laplacian_at(field.values(), &grid, k, inv_h2);
    }
    ScalarField::from_raw(grid, out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(vals: &[f64], h: f64) -> ScalarField<f64> {
        let n = vals.len() - 1;
        let grid = GridSpec::line(0.0, h * n as f64, n).unwrap();
        ScalarField::from_values(grid, vals.to_vec()).unwrap()
    }

    #[test]
    fn neighbor_average_examples() {
        assert_eq!(
            neighbor_average(&line(&[0.0, 9.0, 4.0], 1.0), 1).unwrap(),
            2.0
        );
        assert_eq!(
            neighbor_average(&line(&[1.0, 0.0, -1.0], 1.0), 1).unwrap(),
            0.0
        );
        let grid = GridSpec::square([0.0, 0.0], 1.0, 5).unwrap();
        let c = ScalarField::constant(grid, 3.7);
        for k in grid.interior() {
            assert_eq!(neighbor_average(&c, k).unwrap(), 3.7);
        }
    }

    #[test]
    fn stencils_reject_boundary_nodes() {
        let f = line(&[0.0, 1.0, 4.0], 1.0);
        assert_eq!(neighbor_average(&f, 0), Err(Error::NotInterior(0)));
        assert_eq!(discrete_laplacian(&f, 2), Err(Error::NotInterior(2)));
        let grid = GridSpec::square([0.0, 0.0], 1.0, 3).unwrap();
        let z = ScalarField::zeros(grid);
        assert!(discrete_laplacian(&z, grid.index(0, 1)).is_err());
        assert!(discrete_laplacian(&z, grid.index(1, 3)).is_err());
        assert!(discrete_laplacian(&z, grid.index(1, 1)).is_ok());
    }

    #[test]
    fn laplacian_examples() {
        assert_eq!(
            discrete_laplacian(&line(&[0.0, 1.0, 4.0], 1.0), 1).unwrap(),
            2.0
        );

        let grid = GridSpec::<f64>::line(-1.0, 2.0, 10).unwrap();
        let affine = ScalarField::from_fn(grid, |p| 0.3 - 1.7 * p[0]);
        let quad = ScalarField::from_fn(grid, |p| p[0] * p[0]);
        for k in grid.interior() {
            assert!(discrete_laplacian(&affine, k).unwrap().abs() < 1e-12);
            assert!((discrete_laplacian(&quad, k).unwrap() - 2.0).abs() < 1e-10);
        }
        let sq = GridSpec::<f64>::square([0.0, 0.0], 1.0, 7).unwrap();
        let plane = ScalarField::from_fn(sq, |p| 1.0 + 2.0 * p[0] - 0.5 * p[1]);
        let lap = apply_laplacian(&plane);
        assert!(lap.values().iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn apply_laplacian_of_constant_is_zero() {
        let grid = GridSpec::square([-1.0, -1.0], 2.0, 6).unwrap();
        let lap = apply_laplacian(&ScalarField::constant(grid, 5.0));
        assert!(lap.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn index_sets_partition_nodes() {
        for grid in [
            GridSpec::line(-1.0, 2.0, 7).unwrap(),
            GridSpec::square([0.0, 0.0], 1.0, 7).unwrap(),
            GridSpec::line(0.0, 1.0, 1).unwrap(),
        ] {
            let set = grid.index_set();
            let d = grid.dim().count() as u32;
            assert_eq!(set.interior().len(), (grid.n() - 1).pow(d));
            assert_eq!(set.boundary().len(), set.len() - (grid.n() - 1).pow(d));
            assert_eq!(set.len(), grid.side().pow(d));
            let mut all: Vec<_> = set
                .interior()
                .iter()
                .chain(set.boundary())
                .copied()
                .collect();
            all.sort_unstable();
            assert_eq!(all, set.all().collect::<Vec<_>>());
        }
    }

    #[test]
    fn coordinates_hit_endpoints() {
        let grid = GridSpec::line(-1.0, 2.0, 3).unwrap();
        assert_eq!(grid.coord(0, 0), -1.0);
        assert_eq!(grid.coord(0, 3), 1.0);
        let sq = GridSpec::square([0.1, 0.3], 0.7, 9).unwrap();
        assert_eq!(sq.position(sq.index(9, 9)), [0.1 + 0.7, 0.3 + 0.7]);
        assert_eq!(sq.position(sq.index(0, 0)), [0.1, 0.3]);
    }

    #[test]
    fn arc_order_covers_boundary_once() {
        let grid = GridSpec::square([0.0, 0.0], 1.0, 4).unwrap();
        let order = grid.boundary_in_arc_order();
        let mut sorted = order.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, grid.index_set().boundary().to_vec());
        let arcs: Vec<f64> = order
            .iter()
            .map(|&k| grid.boundary_arc(k).unwrap())
            .collect();
        assert!(arcs.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(arcs[0], 0.0);
        assert!(grid.boundary_arc(grid.index(2, 2)).is_none());
    }

    #[test]
    fn rejects_degenerate_grids() {
        assert!(GridSpec::line(0.0, 1.0, 0).is_err());
        assert!(GridSpec::line(0.0, -1.0, 4).is_err());
        assert!(GridSpec::square([0.0, f64::NAN], 1.0, 4).is_err());
        assert!(Dim::from_count(3).is_err());
    }
}
