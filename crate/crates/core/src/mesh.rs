//! Uniform interval mesh, the Neumann Laplacian stencil and trapezoid quadrature.
//!
//! The boundary rows use the mirror (ghost-node) closure `[-2, 2] / h^2`. With
//! trapezoid weights this makes the discrete Laplacian self-adjoint, and the
//! summation-by-parts identity `sum_i (f_{i+1} - f_i)^2 / h = -<f, L f>` holds
//! exactly, which is what the energy routine relies on.

use std::ops::{Deref, DerefMut};

use serde::{Deserialize, Serialize};

use crate::banded::BandedMatrix;
use crate::error::{Error, Result};

/// Uniform grid on `[a, b]` with trapezoid weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    a: f64,
    b: f64,
    h: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

/// Serializable grid description.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub a: f64,
    pub b: f64,
    pub n: usize,
}

impl GridSpec {
    pub fn build(&self) -> Result<Grid> {
        build_grid(self.a, self.b, self.n)
    }
}

pub fn build_grid(a: f64, b: f64, n: usize) -> Result<Grid> {
    if n < 3 {
        return Err(Error::Config(format!("grid needs at least 3 nodes, got {n}")));
    }
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::Config(format!("grid endpoints must satisfy a < b, got [{a}, {b}]")));
    }
    let h = (b - a) / (n - 1) as f64;
    let mut nodes: Vec<f64> = (0..n).map(|i| a + i as f64 * h).collect();
    nodes[n - 1] = b;
    let mut weights = vec![h; n];
    weights[0] = 0.5 * h;
    weights[n - 1] = 0.5 * h;
    Ok(Grid {
        a,
        b,
        h,
        nodes,
        weights,
    })
}

impl Grid {
    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn spacing(&self) -> f64 {
        self.h
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn quadrature_weights(&self) -> &[f64] {
        &self.weights
    }

    /// Length of the domain.
    pub fn measure(&self) -> f64 {
        self.b - self.a
    }

    pub fn spec(&self) -> GridSpec {
        GridSpec {
            a: self.a,
            b: self.b,
            n: self.len(),
        }
    }

    /// Samples `f` at every node.
    pub fn field_from(&self, f: impl Fn(f64) -> f64) -> Field {
        Field::new(self.nodes.iter().map(|&x| f(x)).collect())
    }

    pub fn constant(&self, value: f64) -> Field {
        Field::new(vec![value; self.len()])
    }

    pub fn zeros(&self) -> Field {
        self.constant(0.0)
    }

    pub(crate) fn check(&self, f: &[f64]) -> Result<()> {
        if f.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: f.len(),
            });
        }
        Ok(())
    }

    /// Quadrature inner product `sum_i w_i f_i g_i`.
    pub fn inner(&self, f: &[f64], g: &[f64]) -> Result<f64> {
        self.check(f)?;
        self.check(g)?;
        Ok(self
            .weights
            .iter()
            .zip(f)
            .zip(g)
            .map(|((w, a), b)| w * a * b)
            .sum())
    }

    /// Linear interpolation of nodal values onto another grid over the same interval.
    pub fn interpolate_to(&self, f: &[f64], target: &Grid) -> Result<Field> {
        self.check(f)?;
        let n = self.len();
        let values = target
            .nodes()
            .iter()
            .map(|&x| {
                let s = ((x - self.a) / self.h).clamp(0.0, (n - 1) as f64);
                let i = (s.floor() as usize).min(n - 2);
                let t = s - i as f64;
                (1.0 - t) * f[i] + t * f[i + 1]
            })
            .collect();
        Ok(Field::new(values))
    }
}

/// Nodal values aligned with a [`Grid`].
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Field {
    values: Vec<f64>,
}

impl Field {
    pub fn new(values: Vec<f64>) -> Self {
        Self { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| f64::max(m, v.abs()))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Field {
        Field::new(self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn zip_map(&self, other: &Field, f: impl Fn(f64, f64) -> f64) -> Field {
        assert_eq!(self.len(), other.len(), "field length mismatch");
        Field::new(
            self.values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        )
    }

    /// Sup-norm distance to another field of equal length.
    pub fn distance(&self, other: &Field) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| f64::max(m, (a - b).abs()))
    }
}

impl Deref for Field {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.values
    }
}

impl DerefMut for Field {
    fn deref_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }
}

impl From<Vec<f64>> for Field {
    fn from(values: Vec<f64>) -> Self {
        Field::new(values)
    }
}

/// Second-difference Neumann Laplacian, stored as a tridiagonal band.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteOperator {
    matrix: BandedMatrix,
}

impl DiscreteOperator {
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &BandedMatrix {
        &self.matrix
    }

    pub fn apply(&self, f: &[f64]) -> Result<Field> {
        if f.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: f.len(),
            });
        }
        let mut out = vec![0.0; self.dim()];
        self.apply_into(f, &mut out);
        Ok(Field::new(out))
    }

    /// `out = L f` without allocation. Lengths are the caller's responsibility.
    #[inline]
    pub fn apply_into(&self, f: &[f64], out: &mut [f64]) {
        let n = f.len();
        let m = &self.matrix;
        out[0] = m.get(0, 0) * f[0] + m.get(0, 1) * f[1];
        for i in 1..n - 1 {
            out[i] = m.get(i, i - 1) * f[i - 1] + m.get(i, i) * f[i] + m.get(i, i + 1) * f[i + 1];
        }
        out[n - 1] = m.get(n - 1, n - 2) * f[n - 2] + m.get(n - 1, n - 1) * f[n - 1];
    }

    /// Entry `(i, j)`; zero outside the tridiagonal band.
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.matrix.get(i, j)
    }
}

pub fn assemble_neumann_laplacian(grid: &Grid) -> DiscreteOperator {
    let n = grid.len();
    let inv_h2 = 1.0 / (grid.spacing() * grid.spacing());
    let mut m = BandedMatrix::zeros(n, 1, 1);
    m.set(0, 0, -2.0 * inv_h2);
    m.set(0, 1, 2.0 * inv_h2);
    for i in 1..n - 1 {
        m.set(i, i - 1, inv_h2);
        m.set(i, i, -2.0 * inv_h2);
        m.set(i, i + 1, inv_h2);
    }
    m.set(n - 1, n - 2, 2.0 * inv_h2);
    m.set(n - 1, n - 1, -2.0 * inv_h2);
    DiscreteOperator { matrix: m }
}

/// Trapezoid rule.
pub fn integrate(grid: &Grid, f: &[f64]) -> Result<f64> {
    grid.check(f)?;
    Ok(grid.weights.iter().zip(f).map(|(w, v)| w * v).sum())
}

/// Discrete `int |f'|^2`, summed over cells so that it equals `-<f, L f>`.
pub fn dirichlet_energy(grid: &Grid, f: &[f64]) -> Result<f64> {
    grid.check(f)?;
    let h = grid.spacing();
    Ok(f.windows(2).map(|w| (w[1] - w[0]) * (w[1] - w[0])).sum::<f64>() / h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn five_node_grid() {
        let g = build_grid(0.0, 1.0, 5).unwrap();
        assert_eq!(g.nodes(), &[0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(g.quadrature_weights(), &[0.125, 0.25, 0.25, 0.25, 0.125]);
    }

    #[test]
    fn weights_sum_to_length() {
        for n in [3, 11, 201] {
            let g = build_grid(0.0, 1.0, n).unwrap();
            let s: f64 = g.quadrature_weights().iter().sum();
            assert!((s - 1.0).abs() < 1e-14, "n = {n}: {s}");
        }
        let g = build_grid(-1.0, 2.0, 301).unwrap();
        assert_relative_eq!(g.spacing(), 0.01, max_relative = 1e-14);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(matches!(build_grid(0.0, 1.0, 2), Err(Error::Config(_))));
        assert!(matches!(build_grid(1.0, 1.0, 10), Err(Error::Config(_))));
        assert!(matches!(build_grid(2.0, 1.0, 10), Err(Error::Config(_))));
    }

    #[test]
    fn laplacian_rows_sum_to_zero() {
        for n in [3, 11, 201] {
            let g = build_grid(0.0, 1.0, n).unwrap();
            let lap = assemble_neumann_laplacian(&g);
            let out = lap.apply(&g.constant(1.0)).unwrap();
            assert!(out.sup_norm() == 0.0, "n = {n}");
        }
    }

    fn cos_error(n: usize) -> f64 {
        let g = build_grid(0.0, 1.0, n).unwrap();
        let lap = assemble_neumann_laplacian(&g);
        let f = g.field_from(|x| (PI * x).cos());
        let lf = lap.apply(&f).unwrap();
        g.nodes()
            .iter()
            .zip(lf.iter())
            .fold(0.0, |m, (&x, &v)| f64::max(m, (v + PI * PI * (PI * x).cos()).abs()))
    }

    #[test]
    fn second_order_on_cosine() {
        let e201 = cos_error(201);
        let e401 = cos_error(401);
        assert!(e401 < 1e-3);
        assert!(e201 / e401 >= 3.5, "ratio {}", e201 / e401);
    }

    #[test]
    fn quadrature_examples() {
        let g = build_grid(0.0, 1.0, 201).unwrap();
        assert_relative_eq!(integrate(&g, &g.constant(1.0)).unwrap(), 1.0, epsilon = 1e-12);
        let c = g.field_from(|x| (2.0 * PI * x).cos());
        assert!(integrate(&g, &c).unwrap().abs() < 1e-10);
        let g11 = build_grid(0.0, 1.0, 11).unwrap();
        let lin = g11.field_from(|x| x);
        assert!((integrate(&g11, &lin).unwrap() - 0.5).abs() < 1e-12);
        assert!(matches!(integrate(&g, &lin), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn energy_examples() {
        let g = build_grid(0.0, 1.0, 51).unwrap();
        assert_eq!(dirichlet_energy(&g, &g.constant(3.0)).unwrap(), 0.0);
        let lin = g.field_from(|x| x);
        assert!((dirichlet_energy(&g, &lin).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn interpolation_is_exact_for_linear_fields() {
        let coarse = build_grid(0.0, 2.0, 21).unwrap();
        let fine = build_grid(0.0, 2.0, 41).unwrap();
        let f = coarse.field_from(|x| 3.0 * x - 1.0);
        let g = coarse.interpolate_to(&f, &fine).unwrap();
        let expect = fine.field_from(|x| 3.0 * x - 1.0);
        assert!(g.distance(&expect) < 1e-12);
    }

    proptest! {
        #[test]
        fn laplacian_is_self_adjoint(
            n in 3usize..60,
            seed in proptest::collection::vec(-1.0f64..1.0, 120),
        ) {
            let g = build_grid(0.0, 1.0, n).unwrap();
            let lap = assemble_neumann_laplacian(&g);
            let f = Field::new(seed[..n].to_vec());
            let h = Field::new(seed[60..60 + n].to_vec());
            let lhs = g.inner(&lap.apply(&f).unwrap(), &h).unwrap();
            let rhs = g.inner(&f, &lap.apply(&h).unwrap()).unwrap();
            let scale = 1.0 + lhs.abs().max(rhs.abs());
            prop_assert!((lhs - rhs).abs() <= 1e-12 * scale);
        }

        #[test]
        fn energy_matches_summation_by_parts(
            n in 3usize..120,
            seed in proptest::collection::vec(-2.0f64..2.0, 120),
        ) {
            let g = build_grid(-0.5, 1.5, n).unwrap();
            let lap = assemble_neumann_laplacian(&g);
            let f = Field::new(seed[..n].to_vec());
            let e = dirichlet_energy(&g, &f).unwrap();
            let ibp = -g.inner(&f, &lap.apply(&f).unwrap()).unwrap();
            prop_assert!((e - ibp).abs() <= 1e-10 * e.abs().max(1e-300) + 1e-300);
        }
    }
}
