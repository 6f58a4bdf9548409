//! Slope of lambda0 in mu at mu = 0, from the closed form and by differencing.
use switchdiff::spectral::{lambda_of_mu, lambda_prime_details, MuFamily};
use switchdiff::{build_grid, CoefficientSpec, ModelParams};

fn main() -> switchdiff::Result<()> {
    let g = build_grid(0.0, 1.0, 401)?;
    let mut p = ModelParams::switching(0.1, 1.0, 1.0, 1.0, CoefficientSpec::cosine(0.4, 0.3, 1.0));
    p.alpha = CoefficientSpec::cosine(1.0, 0.5, 1.0);

    let lp = lambda_prime_details(&p, &g)?;
    let fam = MuFamily::switching(&p, &g)?;
    let h = 1e-4;
    let fd = (lambda_of_mu(&fam, h)? - lambda_of_mu(&fam, -h)?) / (2.0 * h);
    println!("closed form         {:.10}", lp.value);
    println!("central difference  {fd:.10}");
    println!("d1 Phi1 + d2 Phi2 = {:.10} (deviation {:.1e})", lp.constant, lp.constancy_deviation);
    Ok(())
}
