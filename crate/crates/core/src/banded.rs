//! Banded matrices and LU factorization without pivoting.
//!
//! Every matrix factored here is a nonsingular M-matrix (implicit diffusion
//! steps and shifted cooperative operators), for which Gaussian elimination
//! without row exchanges is stable and all pivots are positive.

use crate::error::{Error, Result};

/// Square matrix stored by diagonals: `kl` sub-diagonals, `ku` super-diagonals.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    // row-major, width kl + ku + 1; entry (i, j) lives at i * width + (j + kl - i)
    data: Vec<f64>,
}

impl BandedMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        Self {
            n,
            kl,
            ku,
            data: vec![0.0; n * (kl + ku + 1)],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn lower_bandwidth(&self) -> usize {
        self.kl
    }

    pub fn upper_bandwidth(&self) -> usize {
        self.ku
    }

    #[inline]
    fn width(&self) -> usize {
        self.kl + self.ku + 1
    }

    #[inline]
    pub fn in_band(&self, i: usize, j: usize) -> bool {
        j + self.kl >= i && j <= i + self.ku && i < self.n && j < self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if self.in_band(i, j) {
            self.data[i * self.width() + (j + self.kl - i)]
        } else {
            0.0
        }
    }

    /// Panics if `(i, j)` lies outside the band.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        assert!(self.in_band(i, j), "({i}, {j}) outside band");
        let w = self.width();
        self.data[i * w + (j + self.kl - i)] = value;
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, value: f64) {
        assert!(self.in_band(i, j), "({i}, {j}) outside band");
        let w = self.width();
        self.data[i * w + (j + self.kl - i)] += value;
    }

    /// Iterator over the stored columns of row `i` as `(j, a_ij)`.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let lo = i.saturating_sub(self.kl);
        let hi = (i + self.ku).min(self.n - 1);
        (lo..=hi).map(move |j| (j, self.get(i, j)))
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n);
        debug_assert_eq!(y.len(), self.n);
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = self.row(i).map(|(j, a)| a * x[j]).sum();
        }
    }

    pub fn transpose(&self) -> BandedMatrix {
        let mut t = BandedMatrix::zeros(self.n, self.ku, self.kl);
        for i in 0..self.n {
            for (j, a) in self.row(i) {
                t.set(j, i, a);
            }
        }
        t
    }

    /// Expands to a dense row-major matrix. Test and diagnostics helper.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut out = vec![vec![0.0; self.n]; self.n];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, a) in self.row(i) {
                row[j] = a;
            }
        }
        out
    }

    /// LU factorization in place of a copy. Fails on a non-positive pivot.
    pub fn factor(&self) -> Result<BandedLu> {
        let mut lu = self.clone();
        let n = self.n;
        for k in 0..n {
            let pivot = lu.get(k, k);
            if !(pivot > 0.0) || !pivot.is_finite() {
                return Err(Error::SingularPivot { row: k, pivot });
            }
            let i_end = (k + self.kl).min(n - 1);
            let j_end = (k + self.ku).min(n - 1);
            for i in (k + 1)..=i_end {
                let l = lu.get(i, k) / pivot;
                if l == 0.0 {
                    continue;
                }
                lu.set(i, k, l);
                for j in (k + 1)..=j_end {
                    let u = lu.get(k, j);
                    if u != 0.0 {
                        lu.add(i, j, -l * u);
                    }
                }
            }
        }
        Ok(BandedLu { lu })
    }
}

/// Packed LU factors of a [`BandedMatrix`].
#[derive(Debug, Clone)]
pub struct BandedLu {
    lu: BandedMatrix,
}

impl BandedLu {
    pub fn dim(&self) -> usize {
        self.lu.n
    }

    pub fn solve_in_place(&self, b: &mut [f64]) {
        let n = self.lu.n;
        assert_eq!(b.len(), n);
        let kl = self.lu.kl;
        let ku = self.lu.ku;
        // forward: L y = b, unit diagonal
        for i in 0..n {
            let lo = i.saturating_sub(kl);
            let mut s = b[i];
            for (j, bj) in b.iter().enumerate().take(i).skip(lo) {
                s -= self.lu.get(i, j) * bj;
            }
            b[i] = s;
        }
        // backward: U x = y
        for i in (0..n).rev() {
            let hi = (i + ku).min(n - 1);
            let mut s = b[i];
            for (j, bj) in b.iter().enumerate().take(hi + 1).skip(i + 1) {
                s -= self.lu.get(i, j) * bj;
            }
            b[i] = s / self.lu.get(i, i);
        }
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }

    /// Smallest pivot of the factorization.
    pub fn min_pivot(&self) -> f64 {
        (0..self.lu.n)
            .map(|i| self.lu.get(i, i))
            .fold(f64::INFINITY, f64::min)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn diag_dominant(n: usize, kl: usize, ku: usize, seed: u64) -> BandedMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut a = BandedMatrix::zeros(n, kl, ku);
        for i in 0..n {
            let mut off = 0.0;
            for j in i.saturating_sub(kl)..=(i + ku).min(n - 1) {
                if j != i {
                    let v = -rng.gen_range(0.0..1.0);
                    a.set(i, j, v);
                    off += f64::abs(v);
                }
            }
            a.set(i, i, off + rng.gen_range(0.1..1.0));
        }
        a
    }

    #[test]
    fn solve_recovers_known_solution() {
        for &(kl, ku) in &[(1, 1), (2, 2), (1, 3)] {
            let a = diag_dominant(37, kl, ku, 7);
            let x: Vec<f64> = (0..37).map(|i| (i as f64 * 0.3).sin() + 2.0).collect();
            let mut b = vec![0.0; 37];
            a.matvec(&x, &mut b);
            let got = a.factor().unwrap().solve(&b);
            for (g, e) in got.iter().zip(&x) {
                assert!((g - e).abs() < 1e-12, "{g} vs {e}");
            }
        }
    }

    #[test]
    fn transpose_swaps_entries() {
        let a = diag_dominant(9, 1, 2, 3);
        let t = a.transpose();
        for i in 0..9 {
            for j in 0..9 {
                assert_eq!(a.get(i, j), t.get(j, i));
            }
        }
    }

    #[test]
    fn zero_pivot_is_rejected() {
        let a = BandedMatrix::zeros(3, 1, 1);
        assert!(matches!(a.factor(), Err(Error::SingularPivot { row: 0, .. })));
    }
}
