use proptest::prelude::*;
use switchdiff::dynamics::{State, System};
use switchdiff::mesh::{assemble_neumann_laplacian, integrate};
use switchdiff::spectral::{principal_eigen, scalar_lambda, EigenProblem, MuFamily};
use switchdiff::{build_grid, CoefficientSpec, Field, Grid, ModelParams, SystemKind};

fn grid() -> Grid {
    build_grid(0.0, 1.0, 61).unwrap()
}

fn profile(g: &Grid, c: &[f64]) -> Field {
    g.field_from(|x| c[0] + c[1] * (std::f64::consts::PI * x).cos() + c[2] * (2.0 * std::f64::consts::PI * x).cos())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn laplacian_conserves_mass(c in prop::array::uniform3(-1.0..1.0f64)) {
        let g = grid();
        let lf = assemble_neumann_laplacian(&g).apply(&profile(&g, &c)).unwrap();
        prop_assert!(integrate(&g, &lf).unwrap().abs() < 1e-9);
    }

    #[test]
    fn eigenvalue_between_mean_and_max(d in 0.01..5.0f64, c in prop::array::uniform3(-1.0..1.0f64)) {
        let g = grid();
        let e = profile(&g, &c);
        let l = scalar_lambda(&g, d, &e).unwrap();
        let mean = integrate(&g, &e).unwrap();
        prop_assert!(l >= mean - 1e-9 && l <= e.max() + 1e-9);
    }

    #[test]
    fn eigenvalue_decreases_in_d(d in 0.01..2.0f64, c in prop::array::uniform3(-1.0..1.0f64)) {
        let g = grid();
        let e = profile(&g, &c);
        prop_assume!(e.max() - e.min() > 1e-3);
        prop_assert!(scalar_lambda(&g, 1.5 * d, &e).unwrap() < scalar_lambda(&g, d, &e).unwrap());
    }

    #[test]
    fn eigenfunction_positive_and_normalized(
        d1 in 0.01..1.0f64,
        ratio in 1.0..20.0f64,
        alpha in 0.05..2.0f64,
        beta in 0.05..2.0f64,
        c in prop::array::uniform3(-1.0..1.0f64),
    ) {
        let g = grid();
        let m = profile(&g, &c);
        prop_assume!(m.max() > 0.0);
        let p = ModelParams::switching(d1, d1 * ratio, alpha, beta, CoefficientSpec::Samples { values: m.into_values() });
        let e = principal_eigen(&EigenProblem::switching(&p, &g).unwrap()).unwrap();
        let top = e.eigenfunctions.iter().map(Field::max).fold(0.0, f64::max);
        prop_assert!((top - 1.0).abs() < 1e-12);
        prop_assert!(e.eigenfunctions.iter().all(|f| f.min() > 0.0));
        prop_assert!(e.residual < 1e-7 * (1.0 + e.lambda.abs()));
    }

    #[test]
    fn scaling_identity(mu in 0.2..5.0f64, c in prop::array::uniform3(-1.0..1.0f64)) {
        let g = grid();
        let base = EigenProblem::pair(&g, (1.0, 3.0), profile(&g, &c).map(|v| v - 0.5), g.constant(0.5), g.constant(0.3), profile(&g, &c).map(|v| v - 0.3));
        let fam = MuFamily::scaling(&base);
        let lhs = principal_eigen(&fam.at(mu)).unwrap().lambda;
        let mut slow = base.clone();
        for d in slow.diffusions.iter_mut() {
            *d /= mu;
        }
        let rhs = mu * principal_eigen(&slow).unwrap().lambda;
        prop_assert!((lhs - rhs).abs() <= 1e-8 * (1.0 + lhs.abs()));
    }

    #[test]
    fn step_keeps_state_nonnegative(
        u in prop::collection::vec(0.0..2.0f64, 61),
        v in prop::collection::vec(0.0..2.0f64, 61),
        w in prop::collection::vec(0.0..2.0f64, 61),
    ) {
        let g = grid();
        let p = ModelParams::switching(0.1, 1.0, 1.0, 1.0, CoefficientSpec::cosine(0.4, 0.3, 1.0)).with_d3(0.4);
        let mut sys = System::new(SystemKind::ThreeComponent, &p, &g).unwrap();
        let s = State::new(0.0, vec![Field::new(u), Field::new(v), Field::new(w)]);
        if let Ok(next) = sys.step(&s, 0.01) {
            prop_assert!(next.components.iter().all(|f| f.min() >= 0.0));
        }
    }
}
