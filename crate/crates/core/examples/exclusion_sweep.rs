//! Competitive exclusion across d3, run in parallel.
use switchdiff::analysis::{sweep_outcomes, SweepOptions, SweepParameter};
use switchdiff::dynamics::SimOptions;
use switchdiff::{build_grid, CoefficientSpec, ModelParams};

fn main() -> switchdiff::Result<()> {
    let g = build_grid(0.0, 1.0, 201)?;
    let p = ModelParams::switching(0.1, 1.0, 1.0, 1.0, CoefficientSpec::cosine(0.4, 0.3, 1.0));
    let opts = SweepOptions {
        sim: SimOptions { dt: 0.05, t_max: 5000.0, sample_interval: 5.0, steady_tol: Some(1e-10), ..Default::default() },
        ..Default::default()
    };
    let r = sweep_outcomes(&p, &g, SweepParameter::D3, &[0.05, 0.08, 0.6, 1.5], &opts)?;
    for pt in &r.points {
        println!(
            "d3 = {:5.2}  {:12}  lambda(u*,v*,0) {:+.3e}  lambda(0,0,w*) {:+.3e}  t = {:.0}",
            pt.value,
            pt.outcome.as_str(),
            pt.lambda_uv0,
            pt.lambda_00w,
            pt.t_end
        );
    }
    println!("w wins up to {:?}, u and v win from {:?}", r.empirical_c1, r.empirical_c2);
    Ok(())
}
