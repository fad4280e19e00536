//! Banded LU factorization without pivoting.
//!
//! The Jacobians assembled by the monotone scheme are M-matrices (positive
//! diagonal, non-positive off-diagonals, weakly diagonally dominant with
//! strict dominance next to the boundary), for which Gaussian elimination
//! without pivoting is stable.

use crate::error::{Error, Result};

/// Square matrix with `kl` sub- and `ku` super-diagonals.
#[derive(Debug, Clone)]
pub struct BandMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    /// Row-major band storage: row `i`, column `j` lives at `i*(kl+ku+1) + (j + kl - i)`.
    data: Vec<f64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        BandMatrix { n, kl, ku, data: vec![0.0; n * (kl + ku + 1)] }
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        i * (self.kl + self.ku + 1) + (j + self.kl - i)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Adds `v` at `(i, j)`; panics outside the band.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        assert!(j + self.kl >= i && j <= i + self.ku, "entry ({i}, {j}) outside band");
        let k = self.idx(i, j);
        self.data[k] += v;
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if j + self.kl < i || j > i + self.ku {
            0.0
        } else {
            self.data[self.idx(i, j)]
        }
    }

    /// In-place LU; fails on a vanishing pivot.
    pub fn factor(mut self) -> Result<BandLu> {
        let (n, kl, ku) = (self.n, self.kl, self.ku);
        let w = kl + ku + 1;
        for k in 0..n {
            let piv = self.data[k * w + kl];
            if !(piv.abs() > 0.0) || !piv.is_finite() {
                return Err(Error::Numerical(format!("zero or non-finite pivot {piv} at row {k}")));
            }
            let last_row = (k + kl).min(n - 1);
            let last_col = (k + ku).min(n - 1);
            for i in k + 1..=last_row {
                let ik = i * w + (k + kl - i);
                let l = self.data[ik] / piv;
                if l == 0.0 {
                    continue;
                }
                self.data[ik] = l;
                let row_k = k * w + kl - k;
                let row_i = i * w + kl - i;
                for j in k + 1..=last_col {
                    self.data[row_i + j] -= l * self.data[row_k + j];
                }
            }
        }
        Ok(BandLu { m: self })
    }
}

/// Factored band matrix.
#[derive(Debug, Clone)]
pub struct BandLu {
    m: BandMatrix,
}

impl BandLu {
    pub fn solve(&self, b: &mut [f64]) {
        let (n, kl, ku) = (self.m.n, self.m.kl, self.m.ku);
        let w = kl + ku + 1;
        let d = &self.m.data;
        for i in 0..n {
            let j0 = i.saturating_sub(kl);
            let mut s = b[i];
            for j in j0..i {
                s -= d[i * w + kl + j - i] * b[j];
            }
            b[i] = s;
        }
        for i in (0..n).rev() {
            let j1 = (i + ku).min(n - 1);
            let mut s = b[i];
            for j in i + 1..=j1 {
                s -= d[i * w + kl + j - i] * b[j];
            }
            b[i] = s / d[i * w + kl];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tridiagonal_poisson() {
        let n = 50;
        let mut a = BandMatrix::zeros(n, 1, 1);
        for i in 0..n {
            a.add(i, i, 2.0);
            if i > 0 {
                a.add(i, i - 1, -1.0);
            }
            if i + 1 < n {
                a.add(i, i + 1, -1.0);
            }
        }
        let x: Vec<f64> = (0..n).map(|i| (i as f64 * 0.1).sin()).collect();
        let mut b: Vec<f64> = (0..n)
            .map(|i| {
                let mut s = 2.0 * x[i];
                if i > 0 {
                    s -= x[i - 1];
                }
                if i + 1 < n {
                    s -= x[i + 1];
                }
                s
            })
            .collect();
        a.factor().unwrap().solve(&mut b);
        for i in 0..n {
            assert!((b[i] - x[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn wide_band_matches_dense_product() {
        let n = 30;
        let (kl, ku) = (4, 6);
        let mut a = BandMatrix::zeros(n, kl, ku);
        for i in 0..n {
            for j in i.saturating_sub(kl)..=(i + ku).min(n - 1) {
                let v = if i == j { 20.0 } else { -(((i * 7 + j * 3) % 5) as f64) * 0.3 };
                a.add(i, j, v);
            }
        }
        let x: Vec<f64> = (0..n).map(|i| 1.0 + i as f64).collect();
        let mut b: Vec<f64> = (0..n).map(|i| (0..n).map(|j| a.get(i, j) * x[j]).sum()).collect();
        a.factor().unwrap().solve(&mut b);
        for i in 0..n {
            assert!((b[i] - x[i]).abs() < 1e-10);
        }
    }
}
