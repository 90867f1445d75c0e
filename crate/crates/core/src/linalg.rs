//! Perron–Frobenius data of small nonnegative integer matrices.

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Dense square matrix of nonnegative integers, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NonnegMatrix {
    n: usize,
    entries: Vec<u64>,
}

impl NonnegMatrix {
    pub fn new(n: usize, entries: Vec<u64>) -> Self {
        assert_eq!(entries.len(), n * n);
        NonnegMatrix { n, entries }
    }

    pub fn from_rows(rows: &[Vec<u64>]) -> Self {
        let n = rows.len();
        let entries = rows.iter().flat_map(|r| {
            assert_eq!(r.len(), n);
            r.iter().copied()
        });
        NonnegMatrix { n, entries: entries.collect() }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = NonnegMatrix { n, entries: alloc::vec![0; n * n] };
        for i in 0..n {
            m.entries[i * n + i] = 1;
        }
        m
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.entries[i * self.n + j]
    }

    pub fn rows(&self) -> Vec<Vec<u64>> {
        self.entries.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn mul(&self, other: &NonnegMatrix) -> NonnegMatrix {
        let n = self.n;
        let mut out = alloc::vec![0u64; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    out[i * n + j] += a * other.get(k, j);
                }
            }
        }
        NonnegMatrix { n, entries: out }
    }

    pub fn transpose(&self) -> NonnegMatrix {
        let n = self.n;
        let mut out = alloc::vec![0u64; n * n];
        for i in 0..n {
            for j in 0..n {
                out[j * n + i] = self.get(i, j);
            }
        }
        NonnegMatrix { n, entries: out }
    }

    /// Primitive iff some power up to Wielandt's bound `(n-1)^2 + 1` is
    /// strictly positive.
    pub fn is_primitive(&self) -> bool {
        let n = self.n;
        if n == 0 {
            return false;
        }
        let pattern: Vec<bool> = self.entries.iter().map(|&x| x > 0).collect();
        let mut power = pattern.clone();
        let bound = (n - 1) * (n - 1) + 1;
        for _ in 0..bound {
            if power.iter().all(|&b| b) {
                return true;
            }
            let mut next = alloc::vec![false; n * n];
            for i in 0..n {
                for k in 0..n {
                    if !power[i * n + k] {
                        continue;
                    }
                    for j in 0..n {
                        next[i * n + j] |= pattern[k * n + j];
                    }
                }
            }
            power = next;
        }
        false
    }

    fn apply(&self, v: &[f64], out: &mut [f64]) {
        let n = self.n;
        for (i, o) in out.iter_mut().enumerate().take(n) {
            *o = (0..n).map(|j| self.get(i, j) as f64 * v[j]).sum();
        }
    }
}

/// Perron eigenpair from power iteration.
#[derive(Clone, Debug, PartialEq)]
pub struct PerronPair {
    pub value: f64,
    /// Positive eigenvector normalized to sum 1.
    pub vector: Vec<f64>,
    pub iterations: usize,
    /// `‖A v − λ v‖∞ / ‖v‖∞` at exit.
    pub residual: f64,
}

pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_ITER: usize = 1_000_000;

/// Power iteration from the all-ones vector for the right Perron eigenpair
/// `A v = λ v`. Stops when successive eigenvalue estimates differ by less
/// than `tol` and the residual is below `tol`.
pub fn perron_right(a: &NonnegMatrix, tol: f64, max_iter: usize) -> Result<PerronPair> {
    if !a.is_primitive() {
        return Err(Error::NotIrreducible);
    }
    let n = a.size();
    let mut v = alloc::vec![1.0 / n as f64; n];
    let mut w = alloc::vec![0.0; n];
    let mut lambda = 0.0f64;
    let mut history = Vec::new();
    for it in 1..=max_iter {
        a.apply(&v, &mut w);
        let s: f64 = w.iter().sum();
        // v sums to 1, so the sum of A v estimates λ
        let new_lambda = s;
        for x in w.iter_mut() {
            *x /= s;
        }
        core::mem::swap(&mut v, &mut w);
        let residual = residual_of(a, &v, new_lambda);
        let delta = (new_lambda - lambda).abs();
        lambda = new_lambda;
        if history.len() < 64 {
            history.push(lambda);
        }
        if delta < tol && residual < tol {
            return Ok(PerronPair { value: lambda, vector: v, iterations: it, residual });
        }
    }
    Err(Error::Convergence { what: "power iteration".into(), partial: history })
}

/// Left Perron eigenpair `v^T A = λ v^T`.
pub fn perron_left(a: &NonnegMatrix, tol: f64, max_iter: usize) -> Result<PerronPair> {
    perron_right(&a.transpose(), tol, max_iter)
}

pub fn residual_of(a: &NonnegMatrix, v: &[f64], lambda: f64) -> f64 {
    let n = a.size();
    let mut av = alloc::vec![0.0; n];
    a.apply(v, &mut av);
    let vmax = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let r = av
        .iter()
        .zip(v)
        .fold(0.0f64, |m, (x, y)| m.max((x - lambda * y).abs()));
    r / vmax
}
