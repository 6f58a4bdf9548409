//! Decay of the adjoint-weighted Lyapunov functional at lambda0 = 0.
use switchdiff::analysis::{find_threshold, ThresholdOptions};
use switchdiff::dynamics::{initial_state, monitor_lyapunov, simulate, InitialData, SimOptions, System};
use switchdiff::roots::ThresholdName;
use switchdiff::spectral::{adjoint_principal_eigen, principal_eigen, EigenProblem};
use switchdiff::{build_grid, CoefficientSpec, ModelParams, SystemKind};

fn main() -> switchdiff::Result<()> {
    let g = build_grid(0.0, 1.0, 201)?;
    let mut p = ModelParams::switching(0.1, 1.0, 1.0, 1.0, CoefficientSpec::cosine(-0.1, 1.0, 2.0));
    let mu0 = find_threshold(ThresholdName::MuZero, &p, &g, &ThresholdOptions::default())?;
    p.m = p.m.scaled(mu0.root);

    let prob = EigenProblem::switching(&p, &g)?;
    let e = principal_eigen(&prob)?;
    let adj = adjoint_principal_eigen(&prob)?;
    println!("mu_zero {:.8}, lambda0 after scaling {:+.2e}", mu0.root, e.lambda);

    let mut sys = System::new(SystemKind::Submodel, &p, &g)?;
    let init = initial_state(&InitialData::Eigenfunction { scale: 0.5 }, &g, 2, Some(&e), 0)?;
    let opts = SimOptions { dt: 0.1, t_max: 2000.0, sample_interval: 200.0, keep_snapshots: true, ..Default::default() };
    let (_, log) = simulate(&mut sys, &init, &opts)?;
    for (t, l) in log.sample_times.iter().zip(monitor_lyapunov(&log, &adj, &g)?) {
        println!("t = {t:6.0}  L = {l:.6e}");
    }
    Ok(())
}
