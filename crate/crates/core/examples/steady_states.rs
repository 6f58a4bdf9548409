//! Semi-trivial steady states and their linear stability.
use switchdiff::analysis::{linearized_stability, single_equilibrium, switching_equilibrium, Equilibrium};
use switchdiff::dynamics::{State, SteadyOptions, SteadyResult};
use switchdiff::Field;
use switchdiff::{build_grid, CoefficientSpec, ModelParams, SystemKind};

fn main() -> switchdiff::Result<()> {
    let g = build_grid(0.0, 1.0, 201)?;
    let p = ModelParams::switching(0.1, 1.0, 1.0, 1.0, CoefficientSpec::cosine(0.4, 0.3, 1.0)).with_d3(0.2);
    let opts = SteadyOptions { tol: 1e-10, ..Default::default() };

    let uv = switching_equilibrium(&p, &g, &opts)?;
    let (u, v) = (&uv.state.components[0], &uv.state.components[1]);
    println!("(u*, v*): max u {:.6}, max v {:.6}, residual {:.1e}", u.max(), v.max(), uv.residual);
    let w = single_equilibrium(&p, &g, p.d3, &opts)?;
    println!("w*: max {:.6}, min {:.6}", w.state.components[0].max(), w.state.components[0].min());

    // embed both states in the three-component system
    let embed = |s: &SteadyResult, comps: Vec<Field>| SteadyResult { state: State::new(0.0, comps), ..s.clone() };
    let uv0 = embed(&uv, vec![u.clone(), v.clone(), g.zeros()]);
    let w3 = embed(&w, vec![g.zeros(), g.zeros(), w.state.components[0].clone()]);
    let three = |s: &SteadyResult, which| linearized_stability(SystemKind::ThreeComponent, &p, &g, s, which);
    let a = three(&uv0, Equilibrium::SwitchingOnly)?;
    let b = three(&w3, Equilibrium::SingleOnly)?;
    println!("(u*, v*, 0): {:?} ({:+.4e})", a.classification, a.principal_eigenvalue);
    println!("(0, 0, w*):  {:?} ({:+.4e})", b.classification, b.principal_eigenvalue);
    Ok(())
}
