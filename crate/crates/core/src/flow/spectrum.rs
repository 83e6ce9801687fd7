//! Linear stability of the flow: eigenvalues of `∂F/∂ℓ` with `F = M⁻¹ b`.
//!
//! With `F₀ = F(ℓ₀)` and `R(ℓ) = b(ℓ) − M(ℓ) F₀` we have `R(ℓ₀) = 0` and
//! `∂F/∂ℓ = M⁻¹ ∂R/∂ℓ`, so only one factorisation is needed. Since
//! `(M F₀)_e = Σ_f m_{ef} Dλ_f[F₀]`, every entry of `∂R/∂ℓ` is local to the
//! tetrahedra around one edge. Dihedral derivatives and `Dλ[F₀]` use the
//! configured differentiation; the remaining outer derivative of
//! `m Dλ[F₀]` is a central difference.

use super::system::{evaluate_state, Differentiation, LocalStar};
use crate::complex::{ComplexTopology3, MetricAssignment};
use crate::error::{Error, Result};
use crate::geometry::{Tetrahedron, Triangle};
use crate::scalar::{Differentiable, Tangent};
use ndarray::Array2;
use ndarray_linalg::EigVals;
use num_complex::Complex;
use rayon::prelude::*;

/// Eigenvalues of the linearised flow at one state.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    /// Sorted by real part, descending (ties: imaginary part descending).
    pub eigenvalues: Vec<Complex<f64>>,
    /// Eigenvalues whose real part exceeds `tolerance`.
    pub positive_real_count: usize,
    pub tolerance: f64,
    /// `max |F₀|`: zero at a fixed point.
    pub velocity_norm: f64,
    pub spectral_radius: f64,
}

/// Relative step of the outer (Jacobian) finite differences.
const OUTER_STEP: f64 = 1e-4;

/// Eigenvalues of the finite-difference Jacobian of `ℓ ↦ M(ℓ)⁻¹ b(ℓ)`,
/// sorted by real part descending.
pub fn jacobian_spectrum<T: Differentiable>(
    top: &ComplexTopology3,
    metric: &MetricAssignment<T>,
) -> Result<Vec<Complex<f64>>> {
    Ok(stability_report(top, metric, Differentiation::Exact, T::max_condition())?.eigenvalues)
}

/// Full stability diagnostic; `diff` and `max_condition` as in the flow.
pub fn stability_report<T: Differentiable>(
    top: &ComplexTopology3,
    metric: &MetricAssignment<T>,
    diff: Differentiation<T>,
    max_condition: T,
) -> Result<StabilityReport> {
    let state = evaluate_state(top, metric, diff, max_condition)?;
    let lu = state.system.factor(max_condition)?;
    let f0 = &state.velocity;
    let d = residual_jacobian(top, metric, f0, diff)?;
    let n = top.edge_count();
    let columns: Vec<Vec<T>> =
        (0..n).into_par_iter().map(|j| lu.solve(&(0..n).map(|i| d[i * n + j]).collect::<Vec<_>>())).collect();
    let jac = Array2::<f64>::from_shape_fn((n, n), |(i, j)| columns[j][i].to_f64_lossy());
    let mut eigenvalues: Vec<Complex<f64>> =
        if n == 0 { Vec::new() } else { jac.eigvals().map_err(|e| Error::Eigensolver(e.to_string()))?.to_vec() };
    eigenvalues.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
    let spectral_radius = eigenvalues.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let tolerance = 1e-6 * spectral_radius;
    Ok(StabilityReport {
        positive_real_count: eigenvalues.iter().filter(|z| z.re > tolerance).count(),
        eigenvalues,
        tolerance,
        velocity_norm: f0.iter().fold(0.0, |m, v| m.max(v.to_f64_lossy().abs())),
        spectral_radius,
    })
}

/// Dense row-major `∂R/∂ℓ` (lengths, not squared lengths).
fn residual_jacobian<T: Differentiable>(
    top: &ComplexTopology3,
    metric: &MetricAssignment<T>,
    f0: &[T],
    diff: Differentiation<T>,
) -> Result<Vec<T>> {
    let n = top.edge_count();
    let lengths = metric.lengths();
    let outer = T::lit(OUTER_STEP);
    let four = T::lit(4.0);
    let mut d = vec![T::zero(); n * n];

    // −4 ∂ε_e/∂ℓ_j = +4 Σ_t ∂θ_{t,e}/∂ℓ_j
    let tet_blocks: Vec<[[T; 6]; 6]> = (0..top.tet_count())
        .into_par_iter()
        .map(|t| {
            let edges = top.tet_edges(t);
            let base: [T; 6] = edges.map(|e| lengths[e]);
            let mut block = [[T::zero(); 6]; 6];
            for a in 0..6 {
                let column: [T; 6] = match diff {
                    Differentiation::Exact => {
                        let sq: [Tangent<T>; 6] = std::array::from_fn(|k| {
                            let l = base[k];
                            Tangent::new(l * l, if k == a { l + l } else { T::zero() })
                        });
                        let tet = Tetrahedron::new(sq)?;
                        std::array::from_fn(|k| tet.dihedral_angle(k).derivative())
                    }
                    Differentiation::Central(_) => {
                        let h = outer * base[a];
                        let angles = |s: T| -> Result<[T; 6]> {
                            let mut l = base;
                            l[a] = l[a] + s;
                            let tet = Tetrahedron::new(l.map(|x| x * x))?;
                            Ok(std::array::from_fn(|k| tet.dihedral_angle(k)))
                        };
                        let (p, m) = (angles(h)?, angles(-h)?);
                        std::array::from_fn(|k| (p[k] - m[k]) / (h + h))
                    }
                };
                for k in 0..6 {
                    block[k][a] = column[k];
                }
            }
            Ok(block)
        })
        .collect::<Result<_>>()?;
    for (t, block) in tet_blocks.iter().enumerate() {
        let edges = top.tet_edges(t);
        for (k, &row) in edges.iter().enumerate() {
            for (a, &col) in edges.iter().enumerate() {
                d[row * n + col] = d[row * n + col] + four * block[k][a];
            }
        }
    }

    // −∂/∂ℓ_j (m_{ef} Dλ_f[F₀])
    let fmax = f0.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    if fmax == T::zero() {
        return Ok(d);
    }
    let lmax = lengths.iter().copied().fold(T::zero(), T::max);
    let delta = outer * lmax / fmax;
    let tri_blocks: Vec<(Vec<usize>, Vec<[T; 3]>)> = (0..top.triangle_count())
        .into_par_iter()
        .map(|f| {
            let star = LocalStar::new(top, f);
            let base: Vec<T> = star.edges.iter().map(|&e| lengths[e]).collect();
            let dir: Vec<T> = star.edges.iter().map(|&e| f0[e]).collect();
            let tri_edges = top.triangle_edges(f);
            let tri_local: [usize; 3] =
                tri_edges.map(|e| star.edges.iter().position(|&x| x == e).expect("triangle edge in star"));
            let lambda_at = |l: &[T]| star.lambda(&l.iter().map(|&x| x * x).collect::<Vec<_>>());
            let directional = |l: &[T]| -> Result<T> {
                match diff {
                    Differentiation::Exact => {
                        let sq: Vec<Tangent<T>> =
                            l.iter().zip(&dir).map(|(&x, &v)| Tangent::new(x * x, (x + x) * v)).collect();
                        Ok(star.lambda(&sq)?.derivative())
                    }
                    Differentiation::Central(_) => {
                        let shifted = |s: T| l.iter().zip(&dir).map(|(&x, &v)| x + s * v).collect::<Vec<_>>();
                        Ok((lambda_at(&shifted(delta))? - lambda_at(&shifted(-delta))?) / (delta + delta))
                    }
                }
            };
            let arms = |l: &[T]| -> Result<[T; 3]> {
                let tri = Triangle::new(tri_local.map(|i| l[i] * l[i]))?;
                Ok(std::array::from_fn(|k| tri.moment_arm(k)))
            };
            let g0 = directional(&base)?;
            let m0 = arms(&base)?;
            let mut cols = Vec::with_capacity(base.len());
            for j in 0..base.len() {
                let h = outer * base[j];
                let mut plus = base.clone();
                plus[j] = plus[j] + h;
                let mut minus = base.clone();
                minus[j] = minus[j] - h;
                let dg = (directional(&plus)? - directional(&minus)?) / (h + h);
                let dm: [T; 3] = if tri_local.contains(&j) {
                    let (mp, mm) = (arms(&plus)?, arms(&minus)?);
                    std::array::from_fn(|k| (mp[k] - mm[k]) / (h + h))
                } else {
                    [T::zero(); 3]
                };
                cols.push(std::array::from_fn(|k| dm[k] * g0 + m0[k] * dg));
            }
            Ok((star.edges, cols))
        })
        .collect::<Result<_>>()?;
    for (f, (edges, cols)) in tri_blocks.iter().enumerate() {
        for (k, &row) in top.triangle_edges(f).iter().enumerate() {
            for (j, &col) in edges.iter().enumerate() {
                d[row * n + col] = d[row * n + col] - cols[j][k];
            }
        }
    }
    Ok(d)
}
