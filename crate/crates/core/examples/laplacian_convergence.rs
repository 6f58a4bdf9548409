//! Second-order accuracy of the Neumann Laplacian on cos(pi x).
use std::f64::consts::PI;

use switchdiff::build_grid;
use switchdiff::mesh::assemble_neumann_laplacian;

fn main() -> switchdiff::Result<()> {
    let mut prev: Option<f64> = None;
    for n in [51, 101, 201, 401, 801] {
        let g = build_grid(0.0, 1.0, n)?;
        let f = g.field_from(|x| (PI * x).cos());
        let lf = assemble_neumann_laplacian(&g).apply(&f)?;
        let err = lf
            .iter()
            .zip(g.nodes())
            .map(|(v, x)| (v + PI * PI * (PI * x).cos()).abs())
            .fold(0.0, f64::max);
        match prev {
            Some(p) => println!("n = {n:4}  sup error {err:.3e}  ratio {:.3}", p / err),
            None => println!("n = {n:4}  sup error {err:.3e}"),
        }
        prev = Some(err);
    }
    Ok(())
}
