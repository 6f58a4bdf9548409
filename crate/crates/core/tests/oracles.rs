//! Independent oracles: dense symmetric eigensolvers, sign-flip reductions
//! and the command-line pipelines against direct library calls.

use std::f64::consts::PI;

use approx::assert_relative_eq;
use nalgebra::{DMatrix, SymmetricEigen};
use switchdiff::analysis::{
    find_threshold, invader_potential, linearized_stability, positive_state_linearization, switching_equilibrium,
    Equilibrium, ThresholdOptions,
};
use switchdiff::cli::{run_scenario, ScenarioConfig, Task};
use switchdiff::dynamics::{initial_state, integrate_to_steady, InitialData, SteadyOptions, System};
use switchdiff::mesh::assemble_neumann_laplacian;
use switchdiff::model::sample_coefficient;
use switchdiff::roots::ThresholdName;
use switchdiff::spectral::{principal_eigen, EigenProblem};
use switchdiff::verify::{competitive_scenario, reference_scenario};
use switchdiff::{build_grid, CoefficientSpec, Field, Grid, SystemKind};

/// `W^(1/2) (d L + diag(e)) W^(-1/2)`, symmetric for the trapezoid weights `W`.
fn symmetrized(g: &Grid, d: f64, e: &[f64]) -> DMatrix<f64> {
    let l = assemble_neumann_laplacian(g);
    let w = g.quadrature_weights();
    let n = g.len();
    DMatrix::from_fn(n, n, |i, j| {
        let a = d * l.entry(i, j) + if i == j { e[i] } else { 0.0 };
        a * (w[i] / w[j]).sqrt()
    })
}

fn dense_top(g: &Grid, d: f64, e: &[f64]) -> f64 {
    let m = symmetrized(g, d, e);
    let asym = (&m - m.transpose()).abs().max();
    assert!(asym < 1e-8 * m.abs().max(), "not symmetric: {asym}");
    SymmetricEigen::new(m).eigenvalues.max()
}

fn dense_bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let flo = f(lo);
    assert!(flo * f(hi) < 0.0);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if f(mid) * flo > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn laplacian_spectrum_matches_dense() {
    let g = build_grid(0.0, 1.0, 401).unwrap();
    let m = symmetrized(&g, 1.0, &vec![0.0; g.len()]);
    let mut ev: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| b.partial_cmp(a).unwrap());
    assert!(ev[0].abs() < 1e-8);
    assert_relative_eq!(-ev[1], PI * PI, max_relative = 1e-4);
    assert_relative_eq!(-ev[2], 4.0 * PI * PI, max_relative = 1e-4);
}

#[test]
fn scalar_eigenvalue_matches_dense() {
    let g = build_grid(0.0, 1.0, 201).unwrap();
    for (d, c0) in [(0.1, -0.1), (1.0, 0.0), (3.0, 0.1)] {
        let e = g.field_from(|x| (2.0 * PI * x).cos() + c0);
        let iter = principal_eigen(&EigenProblem::scalar(&g, d, e.clone())).unwrap().lambda;
        assert_relative_eq!(iter, dense_top(&g, d, e.values()), max_relative = 1e-9, epsilon = 1e-9);
    }
}

#[test]
fn d_c_matches_dense_bisection() {
    let g = build_grid(0.0, 1.0, 401).unwrap();
    let p = reference_scenario();
    let opts = ThresholdOptions::default();
    let r = find_threshold(ThresholdName::DC, &p, &g, &opts).unwrap();
    let uv = switching_equilibrium(&p, &g, &opts.steady).unwrap();
    let pot = invader_potential(&p, &g, &uv.state).unwrap();
    let oracle = dense_bisect(|d| dense_top(&g, d, pot.values()), p.d1, 0.55);
    assert!((r.root - oracle).abs() < 1e-6, "{} vs {oracle}", r.root);
    assert!((r.root - 0.28051).abs() < 1e-4);
}

#[test]
fn mu_star_matches_dense_bisection() {
    let g = build_grid(0.0, 1.0, 401).unwrap();
    let e = sample_coefficient(&CoefficientSpec::cosine(-0.1, 1.0, 2.0), &g).unwrap();
    let mut p = reference_scenario();
    p.m = CoefficientSpec::Samples { values: e.values().to_vec() };
    let r = find_threshold(ThresholdName::MuStar, &p, &g, &ThresholdOptions::default()).unwrap();
    let oracle = dense_bisect(|mu| dense_top(&g, 1.0, e.map(|v| mu * v).values()), 1.0, 100.0);
    assert!((r.root - oracle).abs() < 1e-6 * oracle, "{} vs {oracle}", r.root);
}

#[test]
fn positive_state_stability_matches_sign_flip() {
    let g = build_grid(0.0, 1.0, 101).unwrap();
    let p = competitive_scenario();
    let init = initial_state(&InitialData::Constant { values: vec![0.5, 0.5] }, &g, 2, None, 0).unwrap();
    let mut sys = System::new(SystemKind::TwoSpeciesGeneral, &p, &g).unwrap();
    let s = integrate_to_steady(&mut sys, &init, &SteadyOptions { tol: 1e-11, ..Default::default() }).unwrap();
    assert!(s.converged);
    let dense = linearized_stability(SystemKind::TwoSpeciesGeneral, &p, &g, &s, Equilibrium::Positive)
        .unwrap()
        .principal_eigenvalue;

    // the off-diagonal terms are non-positive, so phi2 -> -phi2 gives a cooperative problem
    let lin = positive_state_linearization(&p, &g, SystemKind::TwoSpeciesGeneral, &s.state).unwrap();
    assert!(lin.coupling[0][1].max() <= 0.0 && lin.coupling[1][0].max() <= 0.0);
    let flip = |f: &Field| f.map(|v| -v);
    let coop = EigenProblem::pair(
        &g,
        (lin.diffusions[0], lin.diffusions[1]),
        lin.coupling[0][0].clone(),
        flip(&lin.coupling[0][1]),
        flip(&lin.coupling[1][0]),
        lin.coupling[1][1].clone(),
    );
    let noda = principal_eigen(&coop).unwrap().lambda;
    assert_relative_eq!(dense, noda, max_relative = 1e-8);
    assert!(noda < -1e-9);
}

#[test]
fn constant_eigen_task_reports_m0() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = ScenarioConfig::from_json(
        r#"{"grid": {"a": 0, "b": 1, "n": 101},
            "params": {"d1": 0.1, "d2": 1, "alpha": {"kind": "constant", "value": 1},
                       "beta": {"kind": "constant", "value": 2}, "m": {"kind": "constant", "value": 0.5}},
            "task": {"kind": "eigen"}}"#,
    )
    .unwrap();
    cfg.output = dir.path().to_path_buf();
    let run = run_scenario(&cfg);
    assert_eq!(run.exit_code, 0);
    let csv = std::fs::read_to_string(dir.path().join("eigen.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("lambda,residual,iterations"));
    let lambda: f64 = lines.next().unwrap().split(',').next().unwrap().parse().unwrap();
    assert!((lambda - 0.5).abs() < 1e-8);
    for p in run.csv.iter().chain(&run.svg) {
        assert!(p.exists());
    }
}

#[test]
fn threshold_task_matches_direct_bisection() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = ScenarioConfig::new(Task::Threshold { name: ThresholdName::DC });
    cfg.grid.n = 201;
    cfg.output = dir.path().to_path_buf();
    assert_eq!(run_scenario(&cfg).exit_code, 0);
    let csv = std::fs::read_to_string(dir.path().join("threshold.csv")).unwrap();
    let row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[0], "d_c");
    let (root, residual): (f64, f64) = (row[3].parse().unwrap(), row[4].parse().unwrap());
    assert!(residual <= 1e-8);

    let g = build_grid(0.0, 1.0, 201).unwrap();
    let p = reference_scenario();
    let uv = switching_equilibrium(&p, &g, &SteadyOptions { tol: 1e-10, ..Default::default() }).unwrap();
    let pot = invader_potential(&p, &g, &uv.state).unwrap();
    let oracle = dense_bisect(|d| dense_top(&g, d, pot.values()), 0.1, 0.55);
    assert!((root - oracle).abs() < 1e-6);
}

#[test]
fn exit_codes_follow_error_kind() {
    let dir = tempfile::tempdir().unwrap();
    let mut bad = ScenarioConfig::new(Task::Eigen);
    bad.grid.n = 1;
    bad.output = dir.path().join("bad");
    let run = run_scenario(&bad);
    assert_eq!(run.exit_code, 2);
    let report = std::fs::read_to_string(&run.report).unwrap();
    assert!(report.contains("violated precondition"));

    let mut h = ScenarioConfig::new(Task::Threshold { name: ThresholdName::DC });
    h.grid.n = 101;
    h.params.alpha = CoefficientSpec::constant(0.2);
    h.params.beta = CoefficientSpec::constant(0.2);
    h.output = dir.path().join("h");
    assert_eq!(run_scenario(&h).exit_code, 4);
}
