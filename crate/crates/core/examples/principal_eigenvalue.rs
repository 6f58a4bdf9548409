//! Principal eigenvalue of the switching pair, its eigenfunctions and the
//! adjoint, checked against a dense eigensolver.
use switchdiff::spectral::{adjoint_principal_eigen, principal_eigen, rightmost_dense, EigenProblem};
use switchdiff::{build_grid, CoefficientSpec, ModelParams};

fn main() -> switchdiff::Result<()> {
    let g = build_grid(0.0, 1.0, 201)?;
    let p = ModelParams::switching(0.1, 1.0, 1.0, 1.0, CoefficientSpec::cosine(0.4, 0.3, 1.0));
    let problem = EigenProblem::switching(&p, &g)?;

    let e = principal_eigen(&problem)?;
    println!("lambda0     {:.12}", e.lambda);
    println!("residual    {:.2e} after {} iterations", e.residual, e.iterations);
    println!("bracket     [{:.14}, {:.14}]", e.bracket.0, e.bracket.1);
    println!("dense       {:.12}", rightmost_dense(&problem.assemble())?);

    let adj = adjoint_principal_eigen(&problem)?;
    println!("adjoint     {:.12}", adj.lambda);
    for i in (0..g.len()).step_by(40) {
        println!(
            "x = {:.2}  phi = ({:.5}, {:.5})  psi = ({:.5}, {:.5})",
            g.nodes()[i],
            e.component(0)[i],
            e.component(1)[i],
            adj.component(0)[i],
            adj.component(1)[i]
        );
    }
    Ok(())
}
