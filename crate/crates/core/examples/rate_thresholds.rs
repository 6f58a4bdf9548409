//! Critical switching rates beta_c and alpha_c for d1 < d3 < d2, with the
//! closed-form slope of lambda2 at each.
use switchdiff::analysis::{find_threshold, lambda2_sensitivity, Rate, ThresholdOptions};
use switchdiff::roots::ThresholdName;
use switchdiff::{build_grid, CoefficientSpec, ModelParams};

fn main() -> switchdiff::Result<()> {
    let g = build_grid(0.0, 1.0, 401)?;
    let p = ModelParams::switching(0.1, 1.0, 1.0, 1.0, CoefficientSpec::cosine(0.4, 0.3, 1.0)).with_d3(0.4);
    let opts = ThresholdOptions::default();

    for (name, rate) in [(ThresholdName::BetaC, Rate::Beta), (ThresholdName::AlphaC, Rate::Alpha)] {
        let r = find_threshold(name, &p, &g, &opts)?;
        let slope = lambda2_sensitivity(&rate.set(&p, r.root), &g, rate, &opts.steady)?;
        println!("{} = {:.10}  bracket ({:.4}, {:.4})  slope {slope:+.4e}", name.as_str(), r.root, r.bracket.0, r.bracket.1);
    }
    Ok(())
}
