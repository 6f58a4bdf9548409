//! Weak competition between the two states: every start reaches the same
//! positive steady state.
use switchdiff::analysis::{linearized_stability, Equilibrium};
use switchdiff::dynamics::{initial_state, integrate_to_steady, InitialData, SteadyOptions, System};
use switchdiff::model::classify_regime;
use switchdiff::{build_grid, CoefficientSpec, ModelParams, SystemKind};

fn main() -> switchdiff::Result<()> {
    let g = build_grid(0.0, 1.0, 201)?;
    let p = ModelParams::switching(0.1, 1.0, 0.05, 0.05, CoefficientSpec::cosine(0.9, 0.1, 1.0)).with_interaction(0.5, 0.5);
    let regime = classify_regime(&p, &g)?;
    println!("competitive regime: {}  rectangle {:?}", regime.in_s1, regime.competitive_rectangle);

    let opts = SteadyOptions { tol: 1e-10, ..Default::default() };
    let mut first = None;
    for seed in 0..3 {
        let data = InitialData::Random { lower: vec![0.01, 0.01], upper: vec![1.5, 1.5] };
        let init = initial_state(&data, &g, 2, None, seed)?;
        let mut sys = System::new(SystemKind::TwoSpeciesGeneral, &p, &g)?;
        let s = integrate_to_steady(&mut sys, &init, &opts)?;
        let gap = first.as_ref().map_or(0.0, |f: &switchdiff::dynamics::SteadyResult| f.state.distance(&s.state));
        println!("seed {seed}: t = {:7.1}  distance to first {gap:.2e}", s.state.t);
        first.get_or_insert(s);
    }
    let st = linearized_stability(SystemKind::TwoSpeciesGeneral, &p, &g, first.as_ref().unwrap(), Equilibrium::Positive)?;
    println!("rightmost eigenvalue at the steady state {:+.4e}", st.principal_eigenvalue);
    Ok(())
}
