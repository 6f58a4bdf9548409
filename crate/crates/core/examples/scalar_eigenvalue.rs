//! lambda(d, e) for a scalar weight: decreasing in d, and the critical
//! diffusion 1/mu_star when the weight has negative mean.
use switchdiff::analysis::{find_threshold, ThresholdOptions};
use switchdiff::model::sample_coefficient;
use switchdiff::roots::ThresholdName;
use switchdiff::spectral::scalar_lambda;
use switchdiff::{build_grid, CoefficientSpec, ModelParams};

fn main() -> switchdiff::Result<()> {
    let g = build_grid(0.0, 1.0, 401)?;
    for c0 in [-0.1, 0.0, 0.1] {
        let e = sample_coefficient(&CoefficientSpec::cosine(c0, 1.0, 2.0), &g)?;
        let row: Vec<String> = [0.01, 0.1, 0.3, 1.0, 3.0]
            .iter()
            .map(|&d| scalar_lambda(&g, d, &e).map(|l| format!("{l:+.5}")))
            .collect::<Result<_, _>>()?;
        println!("c0 = {c0:+.1}: {}", row.join("  "));
    }

    let p = ModelParams::switching(0.1, 1.0, 1.0, 1.0, CoefficientSpec::cosine(-0.1, 1.0, 2.0));
    let mu = find_threshold(ThresholdName::MuStar, &p, &g, &ThresholdOptions::default())?;
    println!("mu_star = {:.10}, so lambda(d, e) < 0 for d > {:.6}", mu.root, 1.0 / mu.root);
    Ok(())
}
