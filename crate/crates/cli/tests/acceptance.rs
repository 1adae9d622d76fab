//! Acceptance gate: one PASS/FAIL line per criterion. Runs every criterion
//! even when earlier ones fail, then exits nonzero if any failed.

use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::process::Command;
use std::time::Instant;

use segregation::grid::Dim;
use segregation::membrane::{complementarity, free_boundary, NodeClass};
use segregation::oracle::minimize_discrete_energy;
use segregation::problem::Preset;
use segregation::solver::{check_state, check_step, solve, solve_observed};
use segregation::study::{run_study, Reference};
use segregation::{Problem, SolveReport, SolverConfig};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn invariant_resolutions(p: Preset) -> [usize; 2] {
    match p.dim() {
        Dim::One => [16, 64],
        Dim::Two => [16, 48],
    }
}

fn config(problem: &Problem) -> SolverConfig {
    SolverConfig::for_grid(problem.grid())
}

/// Per-run tallies of invariant violations over every iterate.
struct InvariantRun {
    label: String,
    iterates: usize,
    overlap: usize,
    bounds: usize,
    steps: usize,
}

fn invariant_runs() -> Vec<InvariantRun> {
    let mut runs = Vec::new();
    for preset in Preset::ALL {
        for n in invariant_resolutions(preset) {
            let p = preset.problem::<f64>(n).unwrap();
            let mut run = InvariantRun {
                label: format!("{preset}/{n}"),
                iterates: 0,
                overlap: 0,
                bounds: 0,
                steps: 0,
            };
            let (m1, m2) = (p.phi1().max(), p.phi2().max());
            let report = solve_observed(&p, &config(&p), |prev, next| {
                run.iterates += 1;
                for k in 0..next.u1.grid().len() {
                    let (a, b) = (next.u1[k], next.u2[k]);
                    // Bit-level: one factor is +0.0 exactly.
                    if !(a.to_bits() == 0 || b.to_bits() == 0) || a * b != 0.0 {
                        run.overlap += 1;
                    }
                    if !(a >= 0.0 && b >= 0.0 && a <= m1 && b <= m2) {
                        run.bounds += 1;
                    }
                }
                run.bounds += check_state(next, &p).len();
                run.steps += check_step(prev, next, 1e-14).len();
            })
            .unwrap();
            assert!(report.converged, "{preset} n={n} did not converge");
            runs.push(run);
        }
    }
    runs
}

fn c1_disjointness(runs: &[InvariantRun]) -> Outcome {
    let bad: Vec<_> = runs
        .iter()
        .filter(|r| r.overlap > 0)
        .map(|r| format!("{}: {}", r.label, r.overlap))
        .collect();
    let total: usize = runs.iter().map(|r| r.iterates).sum();
    outcome(
        bad.is_empty(),
        format!(
            "{} runs, {total} iterates; overlapping nodes: {}",
            runs.len(),
            list_or_none(&bad)
        ),
    )
}

fn c2_stability(runs: &[InvariantRun]) -> Outcome {
    let bad: Vec<_> = runs
        .iter()
        .filter(|r| r.bounds + r.steps > 0)
        .map(|r| format!("{}: bounds {} steps {}", r.label, r.bounds, r.steps))
        .collect();
    outcome(
        bad.is_empty(),
        format!(
            "0 <= u_i <= max phi_i and u^(k+1) <= avg u^k (slack 1e-14); violations: {}",
            list_or_none(&bad)
        ),
    )
}

fn c3_energy_descent() -> Outcome {
    let mut notes = Vec::new();
    let mut pass = true;
    for preset in [Preset::Fig1a, Preset::Fig1b, Preset::Fig1c, Preset::Fig1d] {
        let p = preset.problem::<f64>(32).unwrap();
        let report = solve(&p, &config(&p).recording(false, true)).unwrap();
        let jp = report.jp_sequence(&p).unwrap();
        let j1 = jp.terms.first().map_or(jp.initial, |t| t.value);
        let slack = 1e-12 * (1.0 + j1.abs());
        let drops = jp.drops(p.grid().h());
        let rises = drops.iter().filter(|(d, _)| *d < -slack).count();
        let short = drops.iter().filter(|(d, b)| *d < *b - slack).count();
        pass &= rises == 0 && short == 0;
        notes.push(format!(
            "{preset}: {} terms, rises {rises}, below bound {short}",
            drops.len()
        ));
    }
    for preset in [Preset::Fig2, Preset::Fig3] {
        let p = preset.problem::<f64>(32).unwrap();
        let report = solve(&p, &config(&p).recording(true, false)).unwrap();
        let e: Vec<f64> = report.energy.iter().map(|e| e.total).collect();
        // Same slack form as the 1D check: J at the first sweep, since the
        // initial interior iterate is zero and so is its energy.
        let slack = 1e-12 * (1.0 + e.get(1).unwrap_or(&e[0]).abs());
        let rises = e.windows(2).filter(|w| w[1] > w[0] + slack).count();
        let worst = e
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::NEG_INFINITY, f64::max);
        pass &= rises == 0;
        notes.push(format!(
            "{preset} (empirical full-sweep J_h): {} sweeps, rises {rises}, largest step {worst:.1e} vs slack {slack:.1e}",
            e.len() - 1
        ));
    }
    outcome(pass, notes.join("; "))
}

fn c4_oracle() -> Outcome {
    let mut worst: (f64, String) = (0.0, String::new());
    let mut pass = true;
    for preset in Preset::ALL {
        let ns: &[usize] = match preset.dim() {
            Dim::One => &[8, 16, 32],
            Dim::Two => &[8, 16],
        };
        for &n in ns {
            let p = preset.problem::<f64>(n).unwrap();
            let report = solve(&p, &config(&p)).unwrap();
            let oracle = minimize_discrete_energy(&p).unwrap();
            let diff = report
                .state
                .v_interior()
                .max_abs_diff_interior(&oracle.v)
                .unwrap();
            pass &= oracle.optimal && report.converged && diff <= 1e-7;
            if diff >= worst.0 {
                worst = (diff, format!("{preset}/{n}"));
            }
        }
    }
    outcome(
        pass,
        format!(
            "max |v_solver - v_oracle| = {:.3e} at {} (tol 1e-7)",
            worst.0, worst.1
        ),
    )
}

fn c5_exact_case() -> Outcome {
    let mut pass = true;
    let mut notes = Vec::new();
    for n in [2, 8, 16, 64, 128, 256] {
        let p = Preset::Fig1a.problem::<f64>(n).unwrap();
        let report = solve(&p, &config(&p)).unwrap();
        let v = report.state.v();
        let err = (0..=n)
            .map(|k| (v[k] + p.grid().position(k)[0]).abs())
            .fold(0.0, f64::max);
        let fb = free_boundary(&report.state);
        let centered = fb.zero_nodes == vec![n / 2];
        pass &= report.converged && err <= 1e-8 && centered;
        notes.push(format!(
            "n={n}: {err:.1e}{}",
            if centered {
                ""
            } else {
                " (free boundary off center)"
            }
        ));
    }
    outcome(
        pass,
        format!("max |v + x| (tol 1e-8): {}", notes.join(", ")),
    )
}

struct Study {
    preset: Preset,
    table: segregation::RateTable,
}

fn studies() -> Vec<Study> {
    [Preset::Fig1b, Preset::Fig1c, Preset::Fig1d]
        .into_iter()
        .map(|preset| Study {
            preset,
            table: run_study(
                |n| preset.problem::<f64>(n),
                &[16, 32, 64, 128],
                Reference::Analytic,
                |c| c,
            )
            .unwrap(),
        })
        .collect()
}

fn errors(t: &segregation::RateTable) -> String {
    t.rows
        .iter()
        .map(|r| format!("{:.2e}", r.error()))
        .collect::<Vec<_>>()
        .join(" ")
}

fn c6a_monotone(studies: &[Study]) -> Outcome {
    let pass = studies.iter().all(|s| s.table.is_monotone());
    let notes: Vec<_> = studies
        .iter()
        .map(|s| {
            format!(
                "{} {}: [{}]",
                s.preset,
                ok(s.table.is_monotone()),
                errors(&s.table)
            )
        })
        .collect();
    outcome(pass, notes.join("; "))
}

fn c6b_envelope(studies: &[Study]) -> Outcome {
    let pass = studies.iter().all(|s| s.table.within_envelope());
    let notes: Vec<_> = studies
        .iter()
        .map(|s| {
            format!(
                "{} {}: M16 = {:.3e}",
                s.preset,
                ok(s.table.within_envelope()),
                s.table.coarsest_m()
            )
        })
        .collect();
    outcome(pass, notes.join("; "))
}

fn c6c_order(studies: &[Study]) -> Outcome {
    let pass = studies.iter().all(|s| s.table.orders_at_least(1.0));
    let notes: Vec<_> = studies
        .iter()
        .map(|s| {
            let orders: Vec<_> = s.table.rows[1..]
                .iter()
                .map(|r| r.order.map_or_else(|| "sat".into(), |p| format!("{p:.2}")))
                .collect();
            format!(
                "{} {}: [{}]",
                s.preset,
                ok(s.table.orders_at_least(1.0)),
                orders.join(" ")
            )
        })
        .collect();
    outcome(
        pass,
        format!(
            "orders between successive n (need >= 1): {}",
            notes.join("; ")
        ),
    )
}

fn c7_complementarity() -> Outcome {
    let mut pass = true;
    let mut worst_ratio: f64 = 0.0;
    for preset in Preset::ALL {
        for n in invariant_resolutions(preset) {
            let p = preset.problem::<f64>(n).unwrap();
            let cfg = config(&p);
            let report: SolveReport = solve(&p, &cfg).unwrap();
            let c = complementarity(&report, &p).unwrap();
            let h = p.grid().h();
            let bound = 10.0 * (2.0 * p.grid().dim().count() as f64 / (h * h)) * cfg.tol;
            for class in [NodeClass::Positive, NodeClass::Negative, NodeClass::Zero] {
                let w = c.summary(class).worst;
                pass &= w <= bound;
                worst_ratio = worst_ratio.max(w / bound);
            }
        }
    }
    outcome(
        pass,
        format!("worst residual / (10 (2 dim/h^2) tol) = {worst_ratio:.3}"),
    )
}

fn c8_zero_sets() -> Outcome {
    let area = |preset: Preset| {
        let p = preset.problem::<f64>(128).unwrap();
        let report = solve(&p, &config(&p)).unwrap();
        assert!(report.converged, "{preset} did not converge");
        let fb = free_boundary(&report.state);
        (fb.zero_nodes.len(), fb.zero_area, p.grid().h())
    };
    let (n2, a2, h) = area(Preset::Fig2);
    let (n3, a3, _) = area(Preset::Fig3);
    let fig2 = a2 <= 4.0 * h * h;
    let fig3 = a3 >= 0.01;
    outcome(
        fig2 && fig3,
        format!(
            "fig2 zero set {n2} nodes = {a2:.3e} (need <= 4h^2 = {:.3e}: {}); fig3 zero set {n3} nodes = {a3:.4} (need >= 0.01: {})",
            4.0 * h * h,
            ok(fig2),
            ok(fig3)
        ),
    )
}

fn c9_determinism() -> Outcome {
    let root = std::env::temp_dir().join(format!("segregation-acceptance-{}", std::process::id()));
    let run = |name: &str| {
        let out = root.join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_segregation"))
            .args([
                "solve",
                "--preset",
                "fig3",
                "--n",
                "64",
                "--record-energy",
                "--out",
            ])
            .arg(&out)
            .output()
            .unwrap();
        assert!(
            status.status.success(),
            "{}",
            String::from_utf8_lossy(&status.stderr)
        );
        out
    };
    let (a, b) = (run("a"), run("b"));
    let mut names: Vec<_> = fs::read_dir(&a)
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    let differing: Vec<_> = names
        .iter()
        .filter(|n| fs::read(a.join(n)).ok() != fs::read(b.join(n)).ok())
        .map(|n| n.to_string_lossy().into_owned())
        .collect();
    let same_set = names.len() == fs::read_dir(&b).unwrap().count();
    let _ = fs::remove_dir_all(&root);
    outcome(
        same_set && differing.is_empty() && !names.is_empty(),
        format!(
            "{} files compared; differing: {}",
            names.len(),
            list_or_none(&differing)
        ),
    )
}

fn ok(b: bool) -> &'static str {
    if b {
        "ok"
    } else {
        "NO"
    }
}

fn list_or_none(items: &[String]) -> String {
    if items.is_empty() {
        "none".into()
    } else {
        items.join(", ")
    }
}

fn main() {
    // libtest passes filter arguments; this target has no sub-tests to filter.
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let mut failures = 0;
    let mut report = |id: &str, name: &str, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let result = panic::catch_unwind(AssertUnwindSafe(f));
        let secs = start.elapsed().as_secs_f64();
        let (pass, detail) = match result {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("panicked: {}", panic_message(&e))),
        };
        failures += usize::from(!pass);
        println!(
            "{} [{id}] {name} ({secs:.1}s) :: {detail}",
            if pass { "PASS" } else { "FAIL" }
        );
    };

    let mut runs = Vec::new();
    report("1", "disjointness of every iterate", &mut || {
        runs = invariant_runs();
        c1_disjointness(&runs)
    });
    report(
        "2",
        "nonnegativity, trace bound and neighbor-average bound",
        &mut || c2_stability(&runs),
    );
    report(
        "3",
        "interleaved energy descent with drop bound",
        &mut c3_energy_descent,
    );
    report(
        "4",
        "agreement with coordinate-descent minimizer",
        &mut c4_oracle,
    );
    report(
        "5",
        "affine case is exact with centered free boundary",
        &mut c5_exact_case,
    );
    let mut studies_done = Vec::new();
    report("6a", "study errors non-increasing in n", &mut || {
        studies_done = studies();
        c6a_monotone(&studies_done)
    });
    let studies = studies_done;
    report(
        "6b",
        "study errors within M h^(2/7), M fitted at n = 16",
        &mut || c6b_envelope(&studies),
    );
    report("6c", "study observed order >= 1", &mut || {
        c6c_order(&studies)
    });
    report(
        "7",
        "membrane complementarity at the fixed point",
        &mut c7_complementarity,
    );
    report(
        "8",
        "zero set absent for fig2, present for fig3 (n = 128)",
        &mut c8_zero_sets,
    );
    report(
        "9",
        "byte-identical output of repeated fig3 solves",
        &mut c9_determinism,
    );

    println!("acceptance: {} of 11 criteria failed", failures);
    if failures > 0 {
        std::process::exit(1);
    }
}

fn panic_message(e: &Box<dyn std::any::Any + Send>) -> String {
    e.downcast_ref::<String>()
        .cloned()
        .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
        .unwrap_or_default()
}
