//! Energies: the discrete membrane functional `J_h`, its coordinate-interleaved
//! descent sequence along a 1D Jacobi trace, and a quadrature of the continuous
//! two-density energy for diagnostics.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{apply_laplacian, Dim, ScalarField};
use crate::problem::ProblemSpec;
use crate::scalar::Real;

/// The four terms of `J_h(v) = -1/2 (L_h v, v) + (f1, v+) - (f2, v-) - (L_h g, v)`,
/// where `v+ = max(v, 0)` and `v- = min(v, 0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyBreakdown<T> {
    pub quadratic: T,
    pub drive1: T,
    pub drive2: T,
    pub boundary: T,
    pub total: T,
}

/// Evaluates `J_h` for one problem; `L_h g` is computed once.
#[derive(Debug, Clone)]
pub struct DiscreteEnergy<'a, T> {
    problem: &'a ProblemSpec<T>,
    lap_g: ScalarField<T>,
}

impl<'a, T: Real> DiscreteEnergy<'a, T> {
    pub fn new(problem: &'a ProblemSpec<T>) -> Self {
        Self {
            problem,
            lap_g: apply_laplacian(problem.g()),
        }
    }

    /// `L_h g` on interior nodes, from the zero-extended boundary field.
    pub fn lap_g(&self) -> &ScalarField<T> {
        &self.lap_g
    }

    /// `v` must vanish on every boundary node.
    pub fn evaluate(&self, v: &ScalarField<T>) -> Result<EnergyBreakdown<T>> {
        let grid = self.problem.grid();
        if v.grid() != grid {
            return Err(Error::GridMismatch);
        }
        if let Some(k) = (0..grid.len()).find(|&k| !grid.is_interior(k) && v[k] != T::zero()) {
            return Err(Error::NonZeroBoundary(k, v[k].to_f64_lossy()));
        }
        let half = T::lit(0.5);
        let quadratic = -half * apply_laplacian(v).dot(v)?;
        let f1 = self.problem.f1().field().values();
        let f2 = self.problem.f2().field().values();
        let mut drive1 = T::zero();
        let mut drive2 = T::zero();
        let mut boundary = T::zero();
        for k in grid.interior() {
            let x = v[k];
            drive1 = drive1 + f1[k] * x.max(T::zero());
            drive2 = drive2 - f2[k] * x.min(T::zero());
            boundary = boundary - self.lap_g[k] * x;
        }
        let total = quadratic + drive1 + drive2 + boundary;
        Ok(EnergyBreakdown {
            quadratic,
            drive1,
            drive2,
            boundary,
            total,
        })
    }
}

pub fn discrete_energy<T: Real>(
    v: &ScalarField<T>,
    problem: &ProblemSpec<T>,
) -> Result<EnergyBreakdown<T>> {
    DiscreteEnergy::new(problem).evaluate(v)
}

/// One entry `J_p = J_h(v^{k,i})` of the interleaved sequence: the hybrid vector
/// takes sweep `k` values on coordinates `1..=i` and sweep `k-1` values beyond.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JpTerm<T> {
    /// `p = (N - 1)(k - 1) + i`, starting at 1.
    pub p: usize,
    pub sweep: usize,
    pub coord: usize,
    pub value: T,
    /// `v_i^k - v_i^{k-1}`: the single coordinate that changed from the previous hybrid.
    pub delta: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JpSequence<T> {
    /// `J_h` of the first recorded iterate, the value preceding `J_1`.
    pub initial: T,
    pub terms: Vec<JpTerm<T>>,
}

impl<T: Real> JpSequence<T> {
    pub fn values(&self) -> impl Iterator<Item = T> + '_ {
        self.terms.iter().map(|t| t.value)
    }

    /// Per step `J_{p-1} - J_p` paired with the lower bound `delta_p^2 / h^2`.
    pub fn drops(&self, h: T) -> Vec<(T, T)> {
        let inv_h2 = (h * h).recip();
        let mut prev = self.initial;
        self.terms
            .iter()
            .map(|t| {
                let drop = prev - t.value;
                prev = t.value;
                (drop, t.delta * t.delta * inv_h2)
            })
            .collect()
    }
}

/// `J_p` along a 1D trace of zero-boundary iterates `v^0, v^1, ..., v^K`.
pub fn jp_sequence<T: Real>(
    trace: &[ScalarField<T>],
    problem: &ProblemSpec<T>,
) -> Result<JpSequence<T>> {
    let grid = problem.grid();
    if grid.dim() != Dim::One {
        return Err(Error::Unsupported(
            "the interleaved descent sequence is defined for 1D traces only".into(),
        ));
    }
    if trace.len() < 2 {
        return Err(Error::Unsupported(
            "descent sequence needs at least two recorded iterates".into(),
        ));
    }
    let energy = DiscreteEnergy::new(problem);
    let initial = energy.evaluate(&trace[0])?.total;
    let interior = grid.n() - 1;
    let mut terms = Vec::with_capacity(interior * (trace.len() - 1));
    for (k, pair) in trace.windows(2).enumerate() {
        let (old, new) = (&pair[0], &pair[1]);
        let mut hybrid = old.clone();
        for i in 1..=interior {
            hybrid.values_mut()[i] = new[i];
            terms.push(JpTerm {
                p: interior * k + i,
                sweep: k + 1,
                coord: i,
                value: energy.evaluate(&hybrid)?.total,
                delta: new[i] - old[i],
            });
        }
    }
    Ok(JpSequence { initial, terms })
}

/// Trapezoidal quadrature of `sum_i (|grad u_i|^2 / 2 + f_i u_i)` with
/// cellwise forward-difference gradients. First order at kinks.
pub fn continuous_energy<T: Real>(
    u1: &ScalarField<T>,
    u2: &ScalarField<T>,
    problem: &ProblemSpec<T>,
) -> Result<T> {
    let grid = *problem.grid();
    if u1.grid() != &grid || u2.grid() != &grid {
        return Err(Error::GridMismatch);
    }
    let h = grid.h();
    let half = T::lit(0.5);
    let n = grid.n();
    let dirichlet = |u: &ScalarField<T>| -> T {
        match grid.dim() {
            Dim::One => (0..n).map(|i| (u[i + 1] - u[i]).powi(2)).sum::<T>() * half / h,
            Dim::Two => {
                let mut acc = T::zero();
                for j in 0..n {
                    for i in 0..n {
                        let c = u.at(i, j);
                        acc = acc + (u.at(i + 1, j) - c).powi(2) + (u.at(i, j + 1) - c).powi(2);
                    }
                }
                // h^2 * |grad|^2 / 2 with grad = diff / h
                acc * half
            }
        }
    };
    let weight = |k: usize| -> T {
        let (i, j) = grid.node(k);
        let w = |m: usize| if m == 0 || m == n { half } else { T::one() };
        match grid.dim() {
            Dim::One => w(i) * h,
            Dim::Two => w(i) * w(j) * h * h,
        }
    };
    let f1 = problem.f1().field();
    let f2 = problem.f2().field();
    let reaction: T = (0..grid.len())
        .map(|k| weight(k) * (f1[k] * u1[k] + f2[k] * u2[k]))
        .sum();
    Ok(dirichlet(u1) + dirichlet(u2) + reaction)
}
