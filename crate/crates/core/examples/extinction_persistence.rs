//! The sign of lambda0 decides extinction or persistence of the switching pair.
use switchdiff::dynamics::{initial_state, persistence_floor, simulate, InitialData, SimOptions, System};
use switchdiff::spectral::{principal_eigen, EigenProblem};
use switchdiff::{build_grid, CoefficientSpec, ModelParams, SystemKind};

fn main() -> switchdiff::Result<()> {
    let g = build_grid(0.0, 1.0, 201)?;
    for mean in [-0.3, -0.1, 0.1, 0.4] {
        let p = ModelParams::switching(0.1, 1.0, 1.0, 1.0, CoefficientSpec::cosine(mean, 0.5, 1.0));
        let l0 = principal_eigen(&EigenProblem::switching(&p, &g)?)?.lambda;
        let mut sys = System::new(SystemKind::Submodel, &p, &g)?;
        let init = initial_state(&InitialData::Constant { values: vec![0.3, 0.3] }, &g, 2, None, 0)?;
        let opts = SimOptions { dt: 0.05, t_max: 500.0, sample_interval: 5.0, ..Default::default() };
        let (end, log) = simulate(&mut sys, &init, &opts)?;
        let mass: f64 = end.masses(&g)?.iter().sum();
        println!(
            "mean m {mean:+.1}: lambda0 {l0:+.4e}  final mass {mass:.3e}  floor {:.3e}",
            persistence_floor(&log, 0.5)?
        );
    }
    Ok(())
}
