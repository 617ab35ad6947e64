//! Band storage and LU factorization with partial pivoting.
//!
//! Row `i` stores columns `i - kl ..= i + kl + ku`; the extra `kl`
//! superdiagonals hold fill-in produced by row interchanges.

use alloc::vec;
use alloc::vec::Vec;

use crate::math;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct BandMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    data: Vec<f64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        Self {
            n,
            kl,
            ku,
            data: vec![0.0; n * (2 * kl + ku + 1)],
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    fn stride(&self) -> usize {
        2 * self.kl + self.ku + 1
    }

    #[inline]
    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        let off = j as isize - i as isize + self.kl as isize;
        if off < 0 || off as usize >= self.stride() || i >= self.n || j >= self.n {
            None
        } else {
            Some(i * self.stride() + off as usize)
        }
    }

    pub fn in_band(&self, i: usize, j: usize) -> bool {
        i < self.n && j < self.n && j + self.kl >= i && j <= i + self.ku
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.slot(i, j).map_or(0.0, |s| self.data[s])
    }

    /// Accumulates `v` into entry `(i, j)`.
    ///
    /// # Panics
    /// If `(i, j)` lies outside the declared band.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        assert!(self.in_band(i, j), "entry ({i}, {j}) outside band");
        let s = self.slot(i, j).unwrap();
        self.data[s] += v;
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        assert!(self.in_band(i, j), "entry ({i}, {j}) outside band");
        let s = self.slot(i, j).unwrap();
        self.data[s] = v;
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(self.kl);
                let hi = (i + self.ku + 1).min(self.n);
                (lo..hi).map(|j| self.get(i, j) * x[j]).sum()
            })
            .collect()
    }

    pub fn factor(mut self) -> Result<BandLu> {
        let (n, kl, ku) = (self.n, self.kl, self.ku);
        let mut pivots = Vec::with_capacity(n);
        let mut scale = 0.0f64;
        for v in &self.data {
            scale = scale.max(math::abs(*v));
        }
        for k in 0..n {
            let last_row = (k + kl + 1).min(n);
            let mut p = k;
            let mut best = math::abs(self.get(k, k));
            for i in k + 1..last_row {
                let v = math::abs(self.get(i, k));
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == 0.0 || best <= f64::EPSILON * 1e-3 * scale {
                return Err(Error::Singular(k));
            }
            pivots.push(p);
            let last_col = (k + kl + ku + 1).min(n);
            if p != k {
                for j in k..last_col {
                    let a = self.slot(k, j).unwrap();
                    let b = self.slot(p, j).unwrap();
                    self.data.swap(a, b);
                }
            }
            let pivot = self.get(k, k);
            for i in k + 1..last_row {
                let s = self.slot(i, k).unwrap();
                let l = self.data[s] / pivot;
                self.data[s] = l;
                if l != 0.0 {
                    for j in k + 1..last_col {
                        let ukj = self.get(k, j);
                        let t = self.slot(i, j).unwrap();
                        self.data[t] -= l * ukj;
                    }
                }
            }
        }
        Ok(BandLu { lu: self, pivots })
    }
}

#[derive(Debug, Clone)]
pub struct BandLu {
    lu: BandMatrix,
    pivots: Vec<usize>,
}

impl BandLu {
    /// Overwrites `b` with the solution of `A x = b`.
    pub fn solve_in_place(&self, b: &mut [f64]) {
        let m = &self.lu;
        let (n, kl, ku) = (m.n, m.kl, m.ku);
        for k in 0..n {
            let p = self.pivots[k];
            if p != k {
                b.swap(k, p);
            }
            let bk = b[k];
            if bk != 0.0 {
                for i in k + 1..(k + kl + 1).min(n) {
                    b[i] -= m.get(i, k) * bk;
                }
            }
        }
        for k in (0..n).rev() {
            let mut s = b[k];
            for j in k + 1..(k + kl + ku + 1).min(n) {
                s -= m.get(k, j) * b[j];
            }
            b[k] = s / m.get(k, k);
        }
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn tridiagonal_poisson() {
        let n = 9;
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
        let x_true: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
        let b = a.matvec(&x_true);
        let x = a.factor().unwrap().solve(&b);
        for (u, v) in x.iter().zip(&x_true) {
            assert!((u - v).abs() < 1e-12);
        }
    }

    #[test]
    fn pivoting_needed() {
        // Zero leading diagonal forces an interchange.
        let mut a = BandMatrix::zeros(3, 1, 1);
        a.set(0, 0, 0.0);
        a.set(0, 1, 1.0);
        a.set(1, 0, 2.0);
        a.set(1, 1, 1.0);
        a.set(1, 2, 1.0);
        a.set(2, 1, 1.0);
        a.set(2, 2, 3.0);
        let x_true = [1.0, -2.0, 0.5];
        let b = a.matvec(&x_true);
        let x = a.factor().unwrap().solve(&b);
        for (u, v) in x.iter().zip(&x_true) {
            assert!((u - v).abs() < 1e-14);
        }
    }

    #[test]
    fn singular_detected() {
        let mut a = BandMatrix::zeros(2, 1, 1);
        a.set(0, 0, 1.0);
        a.set(0, 1, 1.0);
        a.set(1, 0, 1.0);
        a.set(1, 1, 1.0);
        assert!(matches!(a.factor(), Err(Error::Singular(_))));
    }

    proptest! {
        #[test]
        fn random_band_systems(
            seed_vals in proptest::collection::vec(-1.0..1.0f64, 12 * 7),
            x_true in proptest::collection::vec(-5.0..5.0f64, 12),
        ) {
            let (n, kl, ku) = (12, 3, 2);
            let mut a = BandMatrix::zeros(n, kl, ku);
            let mut it = seed_vals.iter();
            for i in 0..n {
                for j in i.saturating_sub(kl)..(i + ku + 1).min(n) {
                    let v = *it.next().unwrap();
                    a.set(i, j, if i == j { v + 4.0 * v.signum().max(0.5) } else { v });
                }
            }
            let b = a.matvec(&x_true);
            let x = a.clone().factor().unwrap().solve(&b);
            let r = a.matvec(&x);
            for (u, v) in r.iter().zip(&b) {
                prop_assert!((u - v).abs() < 1e-9);
            }
        }
    }
}
