//! Tridiagonal LU with partial pivoting (the LAPACK `gttrf`/`gttrs` scheme).
//!
//! Both the staggered wave step (real) and the P1 Helmholtz system (complex)
//! are tridiagonal in a suitable ordering.

use nalgebra::ComplexField;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Tridiagonal<T> {
    /// Sub-diagonal, length `n - 1`.
    pub lower: Vec<T>,
    pub diag: Vec<T>,
    /// Super-diagonal, length `n - 1`.
    pub upper: Vec<T>,
}

impl<T: ComplexField<RealField = f64> + Copy> Tridiagonal<T> {
    pub fn zeros(n: usize) -> Self {
        Tridiagonal {
            lower: vec![T::zero(); n.saturating_sub(1)],
            diag: vec![T::zero(); n],
            upper: vec![T::zero(); n.saturating_sub(1)],
        }
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        if i == j {
            self.diag[i]
        } else if j + 1 == i {
            self.lower[j]
        } else if i + 1 == j {
            self.upper[i]
        } else {
            T::zero()
        }
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut acc = self.diag[i] * x[i];
                if i > 0 {
                    acc += self.lower[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    acc += self.upper[i] * x[i + 1];
                }
                acc
            })
            .collect()
    }

    /// Maximum absolute column sum.
    pub fn norm1(&self) -> f64 {
        let n = self.dim();
        (0..n)
            .map(|j| {
                let mut s = self.diag[j].modulus();
                if j > 0 {
                    s += self.upper[j - 1].modulus();
                }
                if j + 1 < n {
                    s += self.lower[j].modulus();
                }
                s
            })
            .fold(0.0, f64::max)
    }

    pub fn factor(&self) -> Result<TriLu<T>> {
        let n = self.dim();
        let mut dl = self.lower.clone();
        let mut d = self.diag.clone();
        let mut du = self.upper.clone();
        let mut du2 = vec![T::zero(); n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        for i in 0..n.saturating_sub(1) {
            if d[i].modulus() >= dl[i].modulus() {
                if d[i].modulus() == 0.0 {
                    return Err(Error::SingularStep { row: i, pivot: 0.0 });
                }
                let fact = dl[i] / d[i];
                dl[i] = fact;
                d[i + 1] -= fact * du[i];
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                let tmp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = tmp - fact * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] = -fact * du[i + 1];
                }
                swapped[i] = true;
            }
        }
        if n > 0 && d[n - 1].modulus() == 0.0 {
            return Err(Error::SingularStep {
                row: n - 1,
                pivot: 0.0,
            });
        }
        Ok(TriLu {
            dl,
            d,
            du,
            du2,
            swapped,
        })
    }
}

#[derive(Clone, Debug)]
pub struct TriLu<T> {
    dl: Vec<T>,
    d: Vec<T>,
    du: Vec<T>,
    du2: Vec<T>,
    swapped: Vec<bool>,
}

impl<T: ComplexField<RealField = f64> + Copy> TriLu<T> {
    /// Smallest pivot modulus, a cheap singularity indicator.
    pub fn min_pivot(&self) -> f64 {
        self.d
            .iter()
            .map(|p| p.modulus())
            .fold(f64::INFINITY, f64::min)
    }

    pub fn solve_in_place(&self, b: &mut [T]) {
        let n = self.d.len();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                let tmp = b[i];
                b[i] = b[i + 1];
                b[i + 1] = tmp - self.dl[i] * b[i];
            } else {
                let bi = b[i];
                b[i + 1] -= self.dl[i] * bi;
            }
        }
        if n == 0 {
            return;
        }
        b[n - 1] /= self.d[n - 1];
        if n > 1 {
            b[n - 2] = (b[n - 2] - self.du[n - 2] * b[n - 1]) / self.d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - self.du[i] * b[i + 1] - self.du2[i] * b[i + 2]) / self.d[i];
        }
    }

    pub fn solve(&self, rhs: &[T]) -> Vec<T> {
        let mut x = rhs.to_vec();
        self.solve_in_place(&mut x);
        x
    }

    /// Exact `||A^{-1}||_1`, one solve per column (O(n^2) for tridiagonal A).
    pub fn inverse_norm1(&self) -> f64 {
        let n = self.d.len();
        let mut col = vec![T::zero(); n];
        let mut best = 0.0f64;
        for j in 0..n {
            col.iter_mut().for_each(|c| *c = T::zero());
            col[j] = T::one();
            self.solve_in_place(&mut col);
            let s: f64 = col.iter().map(|c| c.modulus()).sum();
            if !s.is_finite() {
                return f64::INFINITY;
            }
            best = best.max(s);
        }
        best
    }
}

pub fn norm2<T: ComplexField<RealField = f64> + Copy>(x: &[T]) -> f64 {
    x.iter().map(|v| v.modulus_squared()).sum::<f64>().sqrt()
}
