//! Reference solutions that do not go through the Jacobi iteration: exact
//! cyclic coordinate descent on `J_h`, and the closed-form 1D solution for
//! constant dynamics.

use crate::error::{Error, Result};
use crate::functional::DiscreteEnergy;
use crate::grid::{apply_laplacian, neighbor_sum, Dim, GridSpec, ScalarField};
use crate::problem::ProblemSpec;
use crate::scalar::Real;

pub const COORDINATE_DESCENT: &str = "cyclic-coordinate-descent";

#[derive(Debug, Clone, PartialEq)]
pub struct OracleSolution<T> {
    /// Minimizer over zero-boundary vectors (the interior part of `u1 - u2`).
    pub v: ScalarField<T>,
    pub energy: T,
    pub passes: usize,
    /// False when the pass budget ran out before the stopping rule fired.
    pub optimal: bool,
    pub method: &'static str,
}

impl<T: Real> OracleSolution<T> {
    /// Full densities `(max(v + g, 0), max(-(v + g), 0))`.
    pub fn densities(&self, problem: &ProblemSpec<T>) -> (ScalarField<T>, ScalarField<T>) {
        let full = self
            .v
            .zip_with(problem.g(), |a, b| a + b)
            .expect("same grid");
        (
            full.map(|x| x.max(T::zero())),
            full.map(|x| (-x).max(T::zero())),
        )
    }
}

#[derive(Debug, Clone, Copy)]
pub struct DescentOptions {
    pub max_passes: usize,
    /// Stop once a pass lowers the energy by less than `energy_rtol * (1 + |J|)`...
    pub energy_rtol: f64,
    /// ...and moves no coordinate by more than `step_rtol * (1 + max |v|)`.
    pub step_rtol: f64,
}

impl Default for DescentOptions {
    fn default() -> Self {
        Self {
            max_passes: 2_000_000,
            energy_rtol: 1e-15,
            step_rtol: 1e-14,
        }
    }
}

/// Restriction of `J_h` to one coordinate, up to a constant:
/// `q x^2 - b x + f1 max(x, 0) - f2 min(x, 0)`.
#[derive(Debug, Clone, Copy)]
struct Section<T> {
    q: T,
    b: T,
    f1: T,
    f2: T,
}

impl<T: Real> Section<T> {
    fn at(&self, x: T) -> T {
        self.q * x * x - self.b * x + self.f1 * x.max(T::zero()) - self.f2 * x.min(T::zero())
    }

    fn argmin(&self) -> T {
        let two_q = self.q + self.q;
        let right = ((self.b - self.f1) / two_q).max(T::zero());
        let left = ((self.b + self.f2) / two_q).min(T::zero());
        let mut best = T::zero();
        let mut best_val = self.at(best);
        for x in [right, left] {
            let val = self.at(x);
            if val < best_val {
                best = x;
                best_val = val;
            }
        }
        best
    }

    /// One-sided derivatives in the `+x` and `-x` directions.
    fn directional_derivatives(&self, x: T) -> (T, T) {
        let smooth = (self.q + self.q) * x - self.b;
        let up = smooth + if x >= T::zero() { self.f1 } else { -self.f2 };
        let down = -smooth + if x > T::zero() { -self.f1 } else { self.f2 };
        (up, down)
    }
}

struct Sections<'a, T> {
    grid: GridSpec<T>,
    q: T,
    inv_h2: T,
    lap_g: ScalarField<T>,
    problem: &'a ProblemSpec<T>,
}

impl<'a, T: Real> Sections<'a, T> {
    fn new(problem: &'a ProblemSpec<T>) -> Self {
        let grid = *problem.grid();
        let h = grid.h();
        let inv_h2 = (h * h).recip();
        // -1/2 (L_h v, v) contributes dim / h^2 * x^2 for each coordinate.
        let q = T::from_usize_lossy(grid.dim().count()) * inv_h2;
        Self {
            grid,
            q,
            inv_h2,
            lap_g: apply_laplacian(problem.g()),
            problem,
        }
    }

    fn at(&self, v: &[T], k: usize) -> Section<T> {
        // Cross terms of the Dirichlet form give (sum of neighbors) / h^2; the
        // boundary term gives (L_h g)_k.
        let b = neighbor_sum(v, &self.grid, k) * self.inv_h2 + self.lap_g[k];
        Section {
            q: self.q,
            b,
            f1: self.problem.f1().field()[k],
            f2: self.problem.f2().field()[k],
        }
    }
}

pub fn minimize_discrete_energy<T: Real>(problem: &ProblemSpec<T>) -> Result<OracleSolution<T>> {
    minimize_discrete_energy_with(problem, DescentOptions::default())
}

/// Exact minimization of each coordinate section in turn, ascending node order.
/// `J_h` is strictly convex, so the passes converge to its unique minimizer.
pub fn minimize_discrete_energy_with<T: Real>(
    problem: &ProblemSpec<T>,
    options: DescentOptions,
) -> Result<OracleSolution<T>> {
    problem.ensure_valid()?;
    let grid = *problem.grid();
    let sections = Sections::new(problem);
    let energy = DiscreteEnergy::new(problem);
    let interior: Vec<usize> = grid.interior().collect();
    let mut v = ScalarField::zeros(grid);
    let mut current = energy.evaluate(&v)?.total;
    let (energy_rtol, step_rtol) = (T::lit(options.energy_rtol), T::lit(options.step_rtol));

    for pass in 1..=options.max_passes {
        let mut max_step = T::zero();
        for &k in &interior {
            let x = sections.at(v.values(), k).argmin();
            max_step = max_step.max((x - v[k]).abs());
            v.values_mut()[k] = x;
        }
        let next = energy.evaluate(&v)?.total;
        let decrease = current - next;
        current = next;
        if decrease < energy_rtol * (T::one() + next.abs())
            && max_step <= step_rtol * (T::one() + v.max_abs())
        {
            return Ok(OracleSolution {
                v,
                energy: current,
                passes: pass,
                optimal: true,
                method: COORDINATE_DESCENT,
            });
        }
    }
    Ok(OracleSolution {
        v,
        energy: current,
        passes: options.max_passes,
        optimal: false,
        method: COORDINATE_DESCENT,
    })
}

/// For each interior node, the one-sided derivatives of `J_h` along `+e_k` and
/// `-e_k` at `v`. Both are nonnegative at the minimizer.
pub fn coordinate_derivatives<T: Real>(
    v: &ScalarField<T>,
    problem: &ProblemSpec<T>,
) -> Result<Vec<(usize, T, T)>> {
    if v.grid() != problem.grid() {
        return Err(Error::GridMismatch);
    }
    let sections = Sections::new(problem);
    Ok(problem
        .grid()
        .interior()
        .map(|k| {
            let (up, down) = sections.at(v.values(), k).directional_derivatives(v[k]);
            (k, up, down)
        })
        .collect())
}

/// Shape of the closed-form 1D solution `v` on `[xl, xr]`, with
/// `v(xl) = alpha >= 0` and `v(xr) = -beta <= 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Profile<T> {
    /// `v = 0`.
    Zero,
    /// `v = f1/2 (x-a)^2` left of `a`, `0` on `[a, b]`, `-f2/2 (x-b)^2` right of `b`.
    Plateau { a: T, b: T },
    /// Single sign change at `c` with common slope `s`:
    /// `f1/2 (x-c)^2 + s (x-c)` for `x <= c`, `-f2/2 (x-c)^2 + s (x-c)` after.
    Crossing { c: T, slope: T },
    /// `v <= 0` throughout: `v'' = -f2` between `v(xl) = 0` and `v(xr) = -beta`.
    Negative,
    /// `v >= 0` throughout: `v'' = f1` between `v(xl) = alpha` and `v(xr) = 0`.
    Positive,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticSolution<T> {
    pub xl: T,
    pub xr: T,
    pub alpha: T,
    pub beta: T,
    pub f1: T,
    pub f2: T,
    pub profile: Profile<T>,
}

impl<T: Real> AnalyticSolution<T> {
    pub fn v(&self, x: T) -> T {
        let half = T::lit(0.5);
        let (f1, f2) = (self.f1, self.f2);
        match self.profile {
            Profile::Zero => T::zero(),
            Profile::Plateau { a, b } => {
                if x < a {
                    half * f1 * (x - a) * (x - a)
                } else if x > b {
                    -half * f2 * (x - b) * (x - b)
                } else {
                    T::zero()
                }
            }
            Profile::Crossing { c, slope } => {
                let d = x - c;
                if d <= T::zero() {
                    half * f1 * d * d + slope * d
                } else {
                    -half * f2 * d * d + slope * d
                }
            }
            Profile::Negative => {
                let len = self.xr - self.xl;
                (x - self.xl) * (half * f2 * (self.xr - x) - self.beta / len)
            }
            Profile::Positive => {
                let len = self.xr - self.xl;
                (self.xr - x) * (self.alpha / len - half * f1 * (x - self.xl))
            }
        }
    }

    /// `[a, b]` where `v` vanishes between the phases (`a == b` for a single
    /// crossing); `None` when one phase fills the interval.
    pub fn free_boundary(&self) -> Option<(T, T)> {
        match self.profile {
            Profile::Plateau { a, b } => Some((a, b)),
            Profile::Crossing { c, .. } => Some((c, c)),
            _ => None,
        }
    }

    /// `(u1, u2) = (max(v, 0), max(-v, 0))` sampled on `grid`.
    pub fn sample(&self, grid: &GridSpec<T>) -> (ScalarField<T>, ScalarField<T>) {
        let v = ScalarField::from_fn(*grid, |p| self.v(p[0]));
        (v.map(|x| x.max(T::zero())), v.map(|x| (-x).max(T::zero())))
    }
}

/// Closed-form solution of `v'' = f1 [v > 0] - f2 [v < 0]` for constant
/// dynamics and data positive only for density 1 at the left end and density 2
/// at the right end.
pub fn analytic_1d_constant<T: Real>(problem: &ProblemSpec<T>) -> Result<AnalyticSolution<T>> {
    let grid = problem.grid();
    if grid.dim() != Dim::One {
        return Err(Error::Unsupported(
            "closed-form reference is 1D only".into(),
        ));
    }
    let (f1, f2) = match (problem.f1().as_constant(), problem.f2().as_constant()) {
        (Some(a), Some(b)) => (a, b),
        _ => {
            return Err(Error::Unsupported(
                "closed-form reference needs constant dynamics".into(),
            ))
        }
    };
    let n = grid.n();
    let (phi1, phi2) = (problem.phi1().field(), problem.phi2().field());
    if phi2[0] != T::zero() || phi1[n] != T::zero() {
        return Err(Error::Unsupported(
            "closed-form reference needs phi2 = 0 at the left end and phi1 = 0 at the right end"
                .into(),
        ));
    }
    problem.ensure_valid()?;
    let (alpha, beta) = (phi1[0], phi2[n]);
    let xl = grid.coord(0, 0);
    let xr = grid.coord(0, n);
    let profile = profile(xl, xr, alpha, beta, f1, f2);
    Ok(AnalyticSolution {
        xl,
        xr,
        alpha,
        beta,
        f1,
        f2,
        profile,
    })
}

fn profile<T: Real>(xl: T, xr: T, alpha: T, beta: T, f1: T, f2: T) -> Profile<T> {
    let zero = T::zero();
    let two = T::lit(2.0);
    if alpha == zero && beta == zero {
        return Profile::Zero;
    }
    // Where each phase would end if it decayed quadratically to zero slope.
    let a = if alpha == zero {
        xl
    } else if f1 > zero {
        xl + (two * alpha / f1).sqrt()
    } else {
        T::infinity()
    };
    let b = if beta == zero {
        xr
    } else if f2 > zero {
        xr - (two * beta / f2).sqrt()
    } else {
        T::neg_infinity()
    };
    if a <= b {
        return Profile::Plateau { a, b };
    }
    if alpha == zero {
        return Profile::Negative;
    }
    if beta == zero {
        return Profile::Positive;
    }
    let half = T::lit(0.5);
    // Slope matching at c; increasing in c, -inf at xl and +inf at xr.
    let mismatch =
        |c: T| half * f1 * (c - xl) - alpha / (c - xl) - half * f2 * (xr - c) + beta / (xr - c);
    let c = bisect(mismatch, xl, xr, T::lit(1e-13) * (xr - xl));
    let slope = half * f1 * (c - xl) - alpha / (c - xl);
    Profile::Crossing { c, slope }
}

fn bisect<T: Real>(f: impl Fn(T) -> T, mut lo: T, mut hi: T, width: T) -> T {
    let half = T::lit(0.5);
    for _ in 0..400 {
        let mid = lo + (hi - lo) * half;
        if mid <= lo || mid >= hi || hi - lo <= width {
            break;
        }
        if f(mid) < T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo + (hi - lo) * half
}
