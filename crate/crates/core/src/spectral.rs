//! Principal eigenpairs of `diag(d_k L) + M(x)` with a cooperative coupling `M`.
//!
//! The discrete operator is assembled with the components interleaved node by
//! node, which gives a band of half-width `K`. For a cooperative, irreducible
//! coupling, `sigma I - A` is a nonsingular M-matrix whenever `sigma` exceeds the
//! principal eigenvalue, so its inverse is entrywise positive. The solver is the
//! Noda iteration: inverse iteration whose shift is the Collatz-Wielandt upper
//! bound `max_i (A x)_i / x_i`. Iterates stay strictly positive, the shift
//! decreases monotonically onto the Perron root, and every step yields the
//! two-sided bracket `min_i (A x)_i / x_i <= lambda <= max_i (A x)_i / x_i`.

use nalgebra::DMatrix;

use crate::banded::BandedMatrix;
use crate::error::{Error, Result};
use crate::mesh::{assemble_neumann_laplacian, integrate, Field, Grid};
use crate::model::ModelParams;
use crate::roots::{scan_roots, Curve, ThresholdName, ThresholdResult};

/// Convergence controls for [`principal_eigen_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Target width of the Collatz-Wielandt bracket, relative to `1 + |lambda|`.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: 1e-12,
            max_iter: 500,
        }
    }
}

/// `lambda phi = d_k L phi_k + sum_l M_kl(x) phi_l` on a grid, `K` in {1, 2}.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenProblem {
    pub diffusions: Vec<f64>,
    /// `coupling[k][l]` is the field `M_kl(x)`.
    pub coupling: Vec<Vec<Field>>,
    pub grid: Grid,
}

impl EigenProblem {
    /// Scalar problem `d L + e(x)`.
    pub fn scalar(grid: &Grid, d: f64, potential: Field) -> Self {
        EigenProblem {
            diffusions: vec![d],
            coupling: vec![vec![potential]],
            grid: grid.clone(),
        }
    }

    /// Two-component problem with coupling `[[m11, m12], [m21, m22]]`.
    pub fn pair(grid: &Grid, d: (f64, f64), m11: Field, m12: Field, m21: Field, m22: Field) -> Self {
        EigenProblem {
            diffusions: vec![d.0, d.1],
            coupling: vec![vec![m11, m12], vec![m21, m22]],
            grid: grid.clone(),
        }
    }

    /// Linearization at the origin of the switching pair:
    /// coupling `[[m - alpha, beta], [alpha, m - beta]]`.
    pub fn switching(params: &ModelParams, grid: &Grid) -> Result<Self> {
        let f = params.fields(grid)?;
        Ok(Self::switching_with_potential(grid, (params.d1, params.d2), &f.alpha, &f.beta, &f.m))
    }

    /// Coupling `[[p - alpha, beta], [alpha, p - beta]]` for a given potential `p`.
    pub fn switching_with_potential(
        grid: &Grid,
        d: (f64, f64),
        alpha: &Field,
        beta: &Field,
        potential: &Field,
    ) -> Self {
        Self::pair(
            grid,
            d,
            potential.zip_map(alpha, |p, a| p - a),
            beta.clone(),
            alpha.clone(),
            potential.zip_map(beta, |p, b| p - b),
        )
    }

    pub fn components(&self) -> usize {
        self.diffusions.len()
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.components();
        if !(k == 1 || k == 2) {
            return Err(Error::Config(format!("eigenproblems have 1 or 2 components, got {k}")));
        }
        if self.coupling.len() != k || self.coupling.iter().any(|row| row.len() != k) {
            return Err(Error::Config("coupling must be a K x K matrix of fields".into()));
        }
        let n = self.grid.len();
        for row in &self.coupling {
            for f in row {
                if f.len() != n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        found: f.len(),
                    });
                }
            }
        }
        if self.diffusions.iter().any(|&d| !(d > 0.0 && d.is_finite())) {
            return Err(Error::Config(format!("diffusions must be positive, got {:?}", self.diffusions)));
        }
        if k == 2 {
            let (m12, m21) = (&self.coupling[0][1], &self.coupling[1][0]);
            if m12.min() < 0.0 || m21.min() < 0.0 {
                return Err(Error::Cooperativity(format!(
                    "off-diagonal coupling has negative entries (min {}, {})",
                    m12.min(),
                    m21.min()
                )));
            }
            if !m12.iter().zip(m21.iter()).any(|(a, b)| *a > 0.0 && *b > 0.0) {
                return Err(Error::Cooperativity(
                    "off-diagonal coupling is never positive at a common node".into(),
                ));
            }
        }
        Ok(())
    }

    /// Problem whose operator is the adjoint with respect to the quadrature inner
    /// product. The Laplacian is self-adjoint there, so only the coupling is transposed.
    pub fn adjoint(&self) -> EigenProblem {
        let k = self.components();
        let coupling = (0..k)
            .map(|i| (0..k).map(|j| self.coupling[j][i].clone()).collect())
            .collect();
        EigenProblem {
            diffusions: self.diffusions.clone(),
            coupling,
            grid: self.grid.clone(),
        }
    }

    /// Banded matrix of the discrete operator, unknowns ordered `(node, component)`.
    pub fn assemble(&self) -> BandedMatrix {
        let k = self.components();
        let n = self.grid.len();
        let lap = assemble_neumann_laplacian(&self.grid);
        let mut a = BandedMatrix::zeros(n * k, k, k);
        for i in 0..n {
            for (c, &d) in self.diffusions.iter().enumerate() {
                let row = i * k + c;
                for j in i.saturating_sub(1)..=(i + 1).min(n - 1) {
                    a.add(row, j * k + c, d * lap.entry(i, j));
                }
                for l in 0..k {
                    a.add(row, i * k + l, self.coupling[c][l][i]);
                }
            }
        }
        a
    }
}

/// Principal eigenvalue with its positive eigenfunction(s).
#[derive(Debug, Clone, PartialEq)]
pub struct EigenResult {
    pub lambda: f64,
    /// Strictly positive, sup-norm 1 over all components together.
    pub eigenfunctions: Vec<Field>,
    /// `sup |A phi - lambda phi|`
    pub residual: f64,
    pub iterations: usize,
    /// Final Collatz-Wielandt bounds.
    pub bracket: (f64, f64),
}

impl EigenResult {
    pub fn component(&self, k: usize) -> &Field {
        &self.eigenfunctions[k]
    }
}

fn interleave(parts: &[Field]) -> Vec<f64> {
    let k = parts.len();
    let n = parts[0].len();
    let mut out = vec![0.0; n * k];
    for (c, f) in parts.iter().enumerate() {
        for (i, v) in f.iter().enumerate() {
            out[i * k + c] = *v;
        }
    }
    out
}

fn split(x: &[f64], k: usize) -> Vec<Field> {
    (0..k)
        .map(|c| Field::new(x.iter().skip(c).step_by(k).copied().collect()))
        .collect()
}

fn collatz_wielandt(a: &BandedMatrix, x: &[f64], ax: &mut [f64]) -> (f64, f64) {
    a.matvec(x, ax);
    ax.iter()
        .zip(x)
        .map(|(y, v)| y / v)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| (lo.min(r), hi.max(r)))
}

fn shifted(a: &BandedMatrix, sigma: f64) -> BandedMatrix {
    let mut s = a.clone();
    for i in 0..s.dim() {
        let v = s.get(i, i);
        s.set(i, i, sigma - v);
    }
    for i in 0..s.dim() {
        let lo = i.saturating_sub(s.lower_bandwidth());
        let hi = (i + s.upper_bandwidth()).min(s.dim() - 1);
        for j in lo..=hi {
            if j != i {
                let v = s.get(i, j);
                s.set(i, j, -v);
            }
        }
    }
    s
}

pub fn principal_eigen(problem: &EigenProblem) -> Result<EigenResult> {
    principal_eigen_with(problem, SolverOptions::default(), None)
}

/// Noda iteration, optionally warm-started from a positive guess.
pub fn principal_eigen_with(
    problem: &EigenProblem,
    opts: SolverOptions,
    guess: Option<&[Field]>,
) -> Result<EigenResult> {
    problem.validate()?;
    let k = problem.components();
    let a = problem.assemble();
    let dim = a.dim();
    let mut x = match guess {
        Some(g) if g.len() == k && g.iter().all(|f| f.len() * k == dim && f.min() > 0.0) => interleave(g),
        _ => vec![1.0; dim],
    };
    let mut ax = vec![0.0; dim];
    let (mut lower, mut upper) = collatz_wielandt(&a, &x, &mut ax);
    let mut iterations = 0;
    let mut stalled = 0;
    let mut best_width = f64::INFINITY;
    let converged = |lo: f64, hi: f64| hi - lo <= opts.tol * (1.0 + hi.abs());

    // the ratios (A x)_i / x_i cancel badly on fine grids, so after the first
    // solve the bounds come from x / (sigma - A)^{-1} x only
    if !converged(lower, upper) {
        let mut sigma = upper + 1e-3 * (upper - lower).max(1e-12 * (1.0 + upper.abs()));
        while iterations < opts.max_iter {
            let lu = match shifted(&a, sigma).factor() {
                Ok(lu) => lu,
                Err(_) => break,
            };
            let mut y = x.clone();
            lu.solve_in_place(&mut y);
            iterations += 1;
            if y.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
                break;
            }
            let (rmin, rmax) = x
                .iter()
                .zip(&y)
                .map(|(xi, yi)| xi / yi)
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| (lo.min(r), hi.max(r)));
            let ymax = y.iter().copied().fold(0.0, f64::max);
            for v in y.iter_mut() {
                *v /= ymax;
            }
            x = y;
            let (lo, hi) = (sigma - rmax, sigma - rmin);
            if iterations == 1 {
                (lower, upper) = (lo, hi);
            } else {
                (lower, upper) = (lower.max(lo), upper.min(hi));
            }
            let width = upper - lower;
            if converged(lower, upper) {
                break;
            }
            if width < 0.5 * best_width {
                best_width = width;
                stalled = 0;
            } else {
                stalled += 1;
                if stalled >= 25 {
                    break;
                }
            }
            sigma = upper + 1e-3 * width;
        }
    }

    let width = upper - lower;
    if !(width <= 1e-6 * (1.0 + upper.abs())) {
        return Err(Error::NotConverged {
            what: "principal eigenvalue",
            iterations,
            last_change: width,
        });
    }
    let lambda = 0.5 * (upper + lower);
    a.matvec(&x, &mut ax);
    let residual = ax
        .iter()
        .zip(&x)
        .fold(0.0, |m, (y, v)| f64::max(m, (y - lambda * v).abs()));
    Ok(EigenResult {
        lambda,
        eigenfunctions: split(&x, k),
        residual,
        iterations,
        bracket: (lower, upper),
    })
}

/// Principal eigenpair of the adjoint operator (quadrature inner product).
pub fn adjoint_principal_eigen(problem: &EigenProblem) -> Result<EigenResult> {
    principal_eigen(&problem.adjoint())
}

/// Scalar principal eigenvalue `lambda(d, e)` of `d L + e`.
pub fn scalar_lambda(grid: &Grid, d: f64, potential: &Field) -> Result<f64> {
    Ok(principal_eigen(&EigenProblem::scalar(grid, d, potential.clone()))?.lambda)
}

/// Affine family `diag(d_k L) + fixed + mu * varying`.
#[derive(Debug, Clone, PartialEq)]
pub struct MuFamily {
    pub diffusions: Vec<f64>,
    pub fixed: Vec<Vec<Field>>,
    pub varying: Vec<Vec<Field>>,
    pub grid: Grid,
}

impl MuFamily {
    /// The switching pair with `mu` multiplying `m` only.
    pub fn switching(params: &ModelParams, grid: &Grid) -> Result<Self> {
        let f = params.fields(grid)?;
        let zero = grid.zeros();
        Ok(MuFamily {
            diffusions: vec![params.d1, params.d2],
            fixed: vec![
                vec![f.alpha.map(|a| -a), f.beta.clone()],
                vec![f.alpha.clone(), f.beta.map(|b| -b)],
            ],
            varying: vec![vec![f.m.clone(), zero.clone()], vec![zero, f.m]],
            grid: grid.clone(),
        })
    }

    /// `mu` multiplies the whole coupling of `problem`.
    pub fn scaling(problem: &EigenProblem) -> Self {
        let zero = problem.grid.zeros();
        let k = problem.components();
        MuFamily {
            diffusions: problem.diffusions.clone(),
            fixed: vec![vec![zero; k]; k],
            varying: problem.coupling.clone(),
            grid: problem.grid.clone(),
        }
    }

    pub fn at(&self, mu: f64) -> EigenProblem {
        let coupling = self
            .fixed
            .iter()
            .zip(&self.varying)
            .map(|(fr, vr)| fr.iter().zip(vr).map(|(f, v)| f.zip_map(v, |a, b| a + mu * b)).collect())
            .collect();
        EigenProblem {
            diffusions: self.diffusions.clone(),
            coupling,
            grid: self.grid.clone(),
        }
    }
}

impl Curve for MuFamily {
    fn eval(&self, mu: f64) -> Result<f64> {
        lambda_of_mu(self, mu)
    }
}

pub fn lambda_of_mu(family: &MuFamily, mu: f64) -> Result<f64> {
    if !mu.is_finite() {
        return Err(Error::Config(format!("mu must be finite, got {mu}")));
    }
    Ok(principal_eigen(&family.at(mu))?.lambda)
}

/// `d -> lambda(d, e)` for a fixed scalar potential.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffusionCurve {
    pub grid: Grid,
    pub potential: Field,
}

impl Curve for DiffusionCurve {
    fn eval(&self, d: f64) -> Result<f64> {
        scalar_lambda(&self.grid, d, &self.potential)
    }
}

/// Derivative of the principal eigenvalue at `mu = 0` together with the
/// structural quantities of the `mu = 0` eigenfunction.
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaPrime {
    pub value: f64,
    /// Sup-norm eigenfunction `(Phi1, Phi2)` at `mu = 0`.
    pub phi: (Field, Field),
    /// `max - min` of `d1 Phi1 + d2 Phi2`.
    pub constancy_deviation: f64,
    /// Mean of `d1 Phi1 + d2 Phi2`.
    pub constant: f64,
    /// `int (d2 alpha + d1 beta) Phi1 / int beta`.
    pub constant_formula: f64,
}

/// `int m (Phi1 + Phi2) / int (Phi1 + Phi2)` evaluated with the `mu = 0` eigenfunction.
pub fn lambda_prime_at_zero(params: &ModelParams, grid: &Grid) -> Result<f64> {
    Ok(lambda_prime_details(params, grid)?.value)
}

pub fn lambda_prime_details(params: &ModelParams, grid: &Grid) -> Result<LambdaPrime> {
    let f = params.fields(grid)?;
    let family = MuFamily::switching(params, grid)?;
    let base = principal_eigen(&family.at(0.0))?;
    let (p1, p2) = (base.component(0).clone(), base.component(1).clone());
    let sum = p1.zip_map(&p2, |a, b| a + b);
    let weighted = f.m.zip_map(&sum, |m, s| m * s);
    let value = integrate(grid, &weighted)? / integrate(grid, &sum)?;

    let combo = p1.zip_map(&p2, |a, b| params.d1 * a + params.d2 * b);
    let constancy_deviation = combo.max() - combo.min();
    let constant = integrate(grid, &combo)? / grid.measure();
    let num = Field::new(
        (0..grid.len())
            .map(|i| (params.d2 * f.alpha[i] + params.d1 * f.beta[i]) * p1[i])
            .collect(),
    );
    let constant_formula = integrate(grid, &num)? / integrate(grid, &f.beta)?;

    if constancy_deviation > 1e-6 || (constant - constant_formula).abs() > 1e-6 * constant.abs() {
        return Err(Error::Invariant(format!(
            "d1 Phi1 + d2 Phi2 is not constant to tolerance (deviation {constancy_deviation:e}, \
             constant {constant}, formula {constant_formula}); refine the grid"
        )));
    }
    Ok(LambdaPrime {
        value,
        phi: (p1, p2),
        constancy_deviation,
        constant,
        constant_formula,
    })
}

/// Scans `[lo, hi]` on a log lattice (default 64 points) and bisects every sign
/// change of the curve to `|lambda| <= 1e-9`.
pub fn find_mu_roots<C: Curve + Sync + ?Sized>(
    curve: &C,
    name: ThresholdName,
    bracket: (f64, f64),
    max_roots: usize,
) -> Result<Vec<ThresholdResult>> {
    find_mu_roots_with(curve, name, bracket, max_roots, 64)
}

pub fn find_mu_roots_with<C: Curve + Sync + ?Sized>(
    curve: &C,
    name: ThresholdName,
    bracket: (f64, f64),
    max_roots: usize,
    points: usize,
) -> Result<Vec<ThresholdResult>> {
    scan_roots(curve, name, bracket, points, max_roots, 1e-9)
}

/// Rightmost real part of the spectrum of a banded matrix, by dense Schur decomposition.
///
/// Used where the operator is not cooperative and the Perron machinery does not apply.
pub fn rightmost_dense(a: &BandedMatrix) -> Result<f64> {
    let n = a.dim();
    let dense = DMatrix::from_fn(n, n, |i, j| a.get(i, j));
    let eig = dense
        .try_schur(f64::EPSILON, 0)
        .ok_or(Error::NotConverged {
            what: "dense Schur decomposition",
            iterations: 0,
            last_change: f64::NAN,
        })?
        .complex_eigenvalues();
    Ok(eig.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::build_grid;
    use crate::model::CoefficientSpec;
    use std::f64::consts::PI;

    fn unit(n: usize) -> Grid {
        build_grid(0.0, 1.0, n).unwrap()
    }

    #[test]
    fn constant_potential_gives_constant_eigenfunction() {
        let g = unit(101);
        for d in [0.01, 1.0, 10.0] {
            let r = principal_eigen(&EigenProblem::scalar(&g, d, g.constant(0.7))).unwrap();
            assert!((r.lambda - 0.7).abs() < 1e-10, "{}", r.lambda);
            assert!(r.component(0).min() > 1.0 - 1e-9);
        }
    }

    #[test]
    fn constant_pair_has_perron_vector_beta_alpha() {
        let g = unit(51);
        let (m0, a0, b0) = (0.3, 0.4, 1.1);
        let p = EigenProblem::pair(&g, (0.2, 2.0), g.constant(m0 - a0), g.constant(b0), g.constant(a0), g.constant(m0 - b0));
        let r = principal_eigen(&p).unwrap();
        assert!((r.lambda - m0).abs() < 1e-10);
        let (p1, p2) = (r.component(0), r.component(1));
        for i in 0..g.len() {
            assert!((p1[i] / p2[i] - b0 / a0).abs() < 1e-8);
        }
        let adj = adjoint_principal_eigen(&p).unwrap();
        assert!((adj.lambda - r.lambda).abs() < 1e-8 * (1.0 + r.lambda.abs()));
        for i in 0..g.len() {
            assert!((adj.component(0)[i] - 1.0).abs() < 1e-8 && (adj.component(1)[i] - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn cosine_potential_matches_dense() {
        let g = unit(101);
        let e = g.field_from(|x| (2.0 * PI * x).cos());
        let p = EigenProblem::scalar(&g, 0.05, e);
        let r = principal_eigen(&p).unwrap();
        let dense = rightmost_dense(&p.assemble()).unwrap();
        assert!((r.lambda - dense).abs() < 1e-9 * (1.0 + dense.abs()), "{} vs {dense}", r.lambda);
        assert!(r.component(0).min() > 0.0);
        assert!(r.residual < 1e-7);
    }

    #[test]
    fn rejects_competitive_coupling() {
        let g = unit(11);
        let p = EigenProblem::pair(&g, (1.0, 1.0), g.zeros(), g.constant(-0.1), g.constant(1.0), g.zeros());
        assert!(matches!(principal_eigen(&p), Err(Error::Cooperativity(_))));
        let q = EigenProblem::pair(&g, (1.0, 1.0), g.zeros(), g.zeros(), g.constant(1.0), g.zeros());
        assert!(matches!(principal_eigen(&q), Err(Error::Cooperativity(_))));
    }

    #[test]
    fn mu_zero_eigenvalue_vanishes() {
        let g = unit(201);
        let params = ModelParams::switching(0.1, 1.0, 1.0, 0.5, CoefficientSpec::cosine(-0.1, 1.0, 2.0));
        let fam = MuFamily::switching(&params, &g).unwrap();
        assert!(lambda_of_mu(&fam, 0.0).unwrap().abs() < 1e-10);
        assert!(lambda_of_mu(&fam, f64::NAN).is_err());
    }

    #[test]
    fn constant_ratio_lambda_prime_is_mean_m() {
        let g = unit(201);
        let mut params = ModelParams::switching(0.1, 1.0, 1.0, 0.5, CoefficientSpec::cosine(0.2, 1.0, 1.0));
        params.beta = CoefficientSpec::cosine(0.5, 0.2, 3.0);
        params.alpha = params.beta.scaled(2.0);
        let lp = lambda_prime_details(&params, &g).unwrap();
        let mean_m = integrate(&g, &params.fields(&g).unwrap().m).unwrap();
        assert!((lp.value - mean_m).abs() < 1e-7, "{} vs {mean_m}", lp.value);
        for i in 0..g.len() {
            assert!((lp.phi.1[i] / lp.phi.0[i] - 2.0).abs() < 1e-7);
        }
    }
}
