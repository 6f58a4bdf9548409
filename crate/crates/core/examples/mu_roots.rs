//! Roots of mu -> lambda(1, mu M) when m has negative mean.
use switchdiff::roots::{log_lattice, sample_curve, ThresholdName};
use switchdiff::spectral::{find_mu_roots, MuFamily};
use switchdiff::{build_grid, CoefficientSpec, ModelParams};

fn main() -> switchdiff::Result<()> {
    let g = build_grid(0.0, 1.0, 401)?;
    let p = ModelParams::switching(0.1, 1.0, 1.0, 1.0, CoefficientSpec::cosine(-0.1, 1.0, 2.0));
    let fam = MuFamily::switching(&p, &g)?;

    let mus = log_lattice(1e-2, 1e2, 9);
    for (mu, l) in mus.iter().zip(sample_curve(&fam, &mus)?) {
        println!("mu = {mu:9.4}  lambda0 = {l:+.6e}");
    }
    for r in find_mu_roots(&fam, ThresholdName::MuZero, (1e-3, 1e3), 4)? {
        println!("root mu_zero = {:.10} (residual {:.1e})", r.root, r.residual);
    }
    Ok(())
}
