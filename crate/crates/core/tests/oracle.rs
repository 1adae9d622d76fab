use segregation::grid::{apply_laplacian, Dim};
use segregation::oracle::{
    analytic_1d_constant, coordinate_derivatives, minimize_discrete_energy, Profile,
};
use segregation::problem::Preset;
use segregation::solver::{solve, SolverConfig};

#[test]
fn solver_matches_coordinate_descent() {
    for preset in Preset::ALL {
        let ns: &[usize] = match preset.dim() {
            Dim::One => &[8, 16, 32],
            Dim::Two => &[8, 16],
        };
        for &n in ns {
            let p = preset.problem::<f64>(n).unwrap();
            let report = solve(&p, &SolverConfig::for_grid(p.grid())).unwrap();
            assert!(report.converged, "{preset} n={n}");
            let oracle = minimize_discrete_energy(&p).unwrap();
            assert!(oracle.optimal, "{preset} n={n}");
            let diff = report
                .state
                .v_interior()
                .max_abs_diff_interior(&oracle.v)
                .unwrap();
            assert!(diff <= 1e-7, "{preset} n={n}: {diff}");
        }
    }
}

#[test]
fn oracle_minimizer_has_optimality_certificate() {
    for preset in Preset::ALL {
        let p = preset.problem::<f64>(8).unwrap();
        let oracle = minimize_discrete_energy(&p).unwrap();
        for (k, up, down) in coordinate_derivatives(&oracle.v, &p).unwrap() {
            assert!(
                up >= -1e-10 && down >= -1e-10,
                "{preset} node {k}: {up} {down}"
            );
        }
    }
}

#[test]
fn closed_form_solves_the_ode_away_from_the_free_boundary() {
    for preset in [Preset::Fig1b, Preset::Fig1c, Preset::Fig1d] {
        let p = preset.problem::<f64>(8).unwrap();
        let sol = analytic_1d_constant(&p).unwrap();
        let (f1, f2) = preset.dynamics();
        assert!((sol.v(-1.0) - 1.0).abs() < 1e-12, "{preset}");
        assert!((sol.v(1.0) + 1.0).abs() < 1e-12, "{preset}");
        let d = 1e-4;
        for i in 1..200 {
            let x = -1.0 + i as f64 / 100.0;
            let (a, b) = sol.free_boundary().unwrap();
            if (a - 2.0 * d..=b + 2.0 * d).contains(&x) {
                continue;
            }
            let second = (sol.v(x - d) - 2.0 * sol.v(x) + sol.v(x + d)) / (d * d);
            let expected = if sol.v(x) > 0.0 { f1 } else { -f2 };
            assert!(
                (second - expected).abs() < 1e-4,
                "{preset} x={x}: {second} vs {expected}"
            );
            // C^1 across the free boundary.
        }
        let (a, b) = sol.free_boundary().unwrap();
        let slope = |x: f64| (sol.v(x + d) - sol.v(x - d)) / (2.0 * d);
        assert!((slope(a - 1e-3) - slope(a + 1e-3)).abs() < 0.05, "{preset}");
        assert!((slope(b - 1e-3) - slope(b + 1e-3)).abs() < 0.05, "{preset}");
    }
}

#[test]
fn closed_form_shapes_of_the_presets() {
    let shape = |p: Preset| {
        analytic_1d_constant(&p.problem::<f64>(4).unwrap())
            .unwrap()
            .profile
    };
    assert!(matches!(shape(Preset::Fig1a), Profile::Crossing { c, .. } if c.abs() < 1e-12));
    assert!(matches!(shape(Preset::Fig1b), Profile::Crossing { c, .. } if c > 0.0));
    assert!(
        matches!(shape(Preset::Fig1c), Profile::Plateau { a, b } if (a - (2f64.sqrt() - 1.0)).abs() < 1e-12 && (b - 0.5).abs() < 1e-12)
    );
    assert!(matches!(shape(Preset::Fig1d), Profile::Plateau { .. }));
}

#[test]
fn affine_solution_is_discretely_exact() {
    let p = Preset::Fig1a.problem::<f64>(10).unwrap();
    let sol = analytic_1d_constant(&p).unwrap();
    let (u1, u2) = sol.sample(p.grid());
    let v = u1.try_sub(&u2).unwrap();
    let lap = apply_laplacian(&v);
    assert!(lap.values().iter().all(|x| x.abs() < 1e-10));
}
