//! Dense LU factorisation with partial pivoting and a 1-norm condition estimate.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// `P A = L U`, stored packed in row-major order.
#[derive(Debug, Clone)]
pub struct Lu<T> {
    n: usize,
    lu: Vec<T>,
    /// Row `i` of `P A` is row `perm[i]` of `A`.
    perm: Vec<usize>,
    norm1: T,
}

impl<T: Real> Lu<T> {
    /// Factors the `n × n` row-major matrix `a`.
    pub fn factor(mut a: Vec<T>, n: usize) -> Result<Self> {
        assert_eq!(a.len(), n * n, "matrix storage does not match dimension");
        let norm1 = (0..n).map(|j| (0..n).fold(T::zero(), |s, i| s + a[i * n + j].abs())).fold(T::zero(), T::max);
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let p = (k..n)
                .max_by(|&x, &y| a[x * n + k].abs().partial_cmp(&a[y * n + k].abs()).expect("finite pivot"))
                .expect("non-empty column");
            let pivot = a[p * n + k];
            if pivot == T::zero() || !pivot.is_finite() {
                return Err(Error::MatrixSingular { condition: f64::INFINITY });
            }
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let (top, bottom) = a.split_at_mut((k + 1) * n);
            let row_k = &top[k * n..];
            for row in bottom.chunks_exact_mut(n) {
                let l = row[k] / pivot;
                row[k] = l;
                if l != T::zero() {
                    for j in k + 1..n {
                        row[j] = row[j] - l * row_k[j];
                    }
                }
            }
        }
        Ok(Self { n, lu: a, perm, norm1 })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.n;
        let mut x: Vec<T> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let row = &self.lu[i * n..i * n + i];
            let s = row.iter().zip(&x[..i]).fold(T::zero(), |s, (&l, &xj)| s + l * xj);
            x[i] = x[i] - s;
        }
        for i in (0..n).rev() {
            let row = &self.lu[i * n..(i + 1) * n];
            let s = row[i + 1..].iter().zip(&x[i + 1..]).fold(T::zero(), |s, (&u, &xj)| s + u * xj);
            x[i] = (x[i] - s) / row[i];
        }
        x
    }

    /// Solves `Aᵀ x = b`.
    /// Solves `A x = b` followed by `iterations` steps of iterative
    /// refinement against the unfactored `a` (row-major). Residuals are
    /// accumulated in doubled precision, so the refined solution is accurate
    /// to a few ulps regardless of pivoting order.
    pub fn solve_refined(&self, a: &[T], b: &[T], iterations: usize) -> Vec<T> {
        let n = self.n;
        let mut x = self.solve(b);
        for _ in 0..iterations {
            let r: Vec<T> = (0..n).map(|i| residual(&a[i * n..(i + 1) * n], &x, b[i])).collect();
            let dx = self.solve(&r);
            for (xi, d) in x.iter_mut().zip(dx) {
                *xi = *xi + d;
            }
        }
        x
    }

    pub fn solve_transpose(&self, b: &[T]) -> Vec<T> {
        let n = self.n;
        let mut w = b.to_vec();
        // Uᵀ w = b
        for i in 0..n {
            let s = (0..i).fold(T::zero(), |s, k| s + self.lu[k * n + i] * w[k]);
            w[i] = (w[i] - s) / self.lu[i * n + i];
        }
        // Lᵀ v = w
        for i in (0..n).rev() {
            let s = (i + 1..n).fold(T::zero(), |s, k| s + self.lu[k * n + i] * w[k]);
            w[i] = w[i] - s;
        }
        let mut x = vec![T::zero(); n];
        for (i, &p) in self.perm.iter().enumerate() {
            x[p] = w[i];
        }
        x
    }

    /// Hager's estimate of `‖A‖₁ ‖A⁻¹‖₁` (a lower bound, usually tight).
    pub fn condition_estimate(&self) -> T {
        let n = self.n;
        if n == 0 {
            return T::one();
        }
        let mut x = vec![T::one() / T::lit(n as f64); n];
        let mut est = T::zero();
        for _ in 0..5 {
            let y = self.solve(&x);
            est = y.iter().fold(T::zero(), |s, v| s + v.abs());
            if !est.is_finite() {
                return T::infinity();
            }
            let xi: Vec<T> = y.iter().map(|&v| if v >= T::zero() { T::one() } else { -T::one() }).collect();
            let z = self.solve_transpose(&xi);
            let (j, zmax) =
                z.iter()
                    .enumerate()
                    .fold((0, T::zero()), |(bj, bv), (j, &v)| if v.abs() > bv { (j, v.abs()) } else { (bj, bv) });
            let ztx = z.iter().zip(&x).fold(T::zero(), |s, (&a, &b)| s + a * b);
            if zmax <= ztx {
                break;
            }
            x = vec![T::zero(); n];
            x[j] = T::one();
        }
        est * self.norm1
    }
}

/// Factors, rejects ill-conditioned matrices, and returns the factorisation.
/// `b − row·x` in twice the working precision (compensated dot product
/// built from error-free `TwoSum`/`TwoProduct` transformations).
fn residual<T: Real>(row: &[T], x: &[T], b: T) -> T {
    let (mut s, mut c) = (b, T::zero());
    for (&r, &xj) in row.iter().zip(x) {
        let p = -r * xj;
        let pe = (-r).mul_add(xj, -p);
        let t = s + p;
        let z = t - s;
        let se = (s - (t - z)) + (p - z);
        s = t;
        c = c + (se + pe);
    }
    s + c
}

pub fn factor_checked<T: Real>(a: Vec<T>, n: usize, max_condition: T) -> Result<Lu<T>> {
    let lu = Lu::factor(a, n)?;
    let cond = lu.condition_estimate();
    if !(cond <= max_condition) {
        return Err(Error::MatrixSingular { condition: cond.to_f64_lossy() });
    }
    Ok(lu)
}
