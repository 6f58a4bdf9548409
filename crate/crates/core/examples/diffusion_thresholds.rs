//! The thresholds d_c and d_0 in the three-species competition, with the
//! invasion eigenvalues along d3.
use switchdiff::analysis::{find_threshold, invader_potential, scan_d0, switching_equilibrium, ThresholdOptions};
use switchdiff::roots::ThresholdName;
use switchdiff::spectral::scalar_lambda;
use switchdiff::{build_grid, CoefficientSpec, ModelParams};

fn main() -> switchdiff::Result<()> {
    let g = build_grid(0.0, 1.0, 401)?;
    let p = ModelParams::switching(0.1, 1.0, 1.0, 1.0, CoefficientSpec::cosine(0.4, 0.3, 1.0));
    let opts = ThresholdOptions::default();
    let dbar = p.weighted_diffusion().unwrap();

    let uv = switching_equilibrium(&p, &g, &opts.steady)?;
    let pot = invader_potential(&p, &g, &uv.state)?;
    for d3 in [0.1, 0.2, 0.28, 0.3, 0.4, 0.55] {
        println!("d3 = {d3:.2}  lambda(d3, m - u* - v*) = {:+.6e}", scalar_lambda(&g, d3, &pot)?);
    }

    let dc = find_threshold(ThresholdName::DC, &p, &g, &opts)?;
    println!("d_c = {:.10} in ({}, {dbar})", dc.root, p.d1);
    for r in scan_d0(&p, &g, (p.d1, dbar), &opts)? {
        println!("d_0 = {:.10}", r.root);
    }
    Ok(())
}
