//! The edge-length system `Σ_λ m_λ λ̇ = −4 ε_ℓ`, one row per edge.

use super::linalg::{factor_checked, Lu};
use crate::complex::{ComplexTopology3, MetricAssignment};
use crate::curvature::deficit_angles;
use crate::error::{Error, Result};
use crate::geometry::{dual_geometry, DualGeometry, Tetrahedron};
use crate::scalar::{Differentiable, Real, Tangent};
use rayon::prelude::*;

/// How `∂λ/∂ℓ` is obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Differentiation<T> {
    /// Forward-mode tangents: exact up to round-off.
    Exact,
    /// Central differences with relative step `η`: `h = η ℓ_i`.
    Central(T),
}

impl<T> Default for Differentiation<T> {
    fn default() -> Self {
        Differentiation::Exact
    }
}

impl<T: Real> Differentiation<T> {
    pub fn is_valid(&self) -> bool {
        match *self {
            Differentiation::Exact => true,
            Differentiation::Central(eta) => eta > T::zero() && eta < T::one(),
        }
    }
}

/// The (at most two) tetrahedra sharing a triangle, re-indexed over their
/// (at most nine) distinct edges so that `λ` can be re-evaluated cheaply.
#[derive(Debug, Clone)]
pub(crate) struct LocalStar {
    pub edges: Vec<usize>,
    /// Local edge indices of each tetrahedron and the slot of the shared face.
    tets: Vec<([usize; 6], usize)>,
}

impl LocalStar {
    pub fn new(top: &ComplexTopology3, tri: usize) -> Self {
        let mut edges: Vec<usize> = Vec::with_capacity(9);
        let mut tets = Vec::with_capacity(2);
        for &t in top.triangle_tets(tri) {
            let local = top.tet_edges(t).map(|e| match edges.iter().position(|&x| x == e) {
                Some(i) => i,
                None => {
                    edges.push(e);
                    edges.len() - 1
                }
            });
            tets.push((local, top.face_slot(t, tri).expect("face of tet")));
        }
        Self { edges, tets }
    }

    pub fn gather<T: Real>(&self, lengths_sq: &[T]) -> Vec<T> {
        self.edges.iter().map(|&e| lengths_sq[e]).collect()
    }

    /// `λ` from the local squared lengths.
    pub fn lambda<T: Real>(&self, sq: &[T]) -> Result<T> {
        let mut lambda = T::zero();
        for (local, slot) in &self.tets {
            lambda = lambda + Tetrahedron::new(local.map(|i| sq[i]))?.face_segment(*slot);
        }
        Ok(lambda)
    }

    /// `∂λ/∂ℓ_i` (with respect to lengths, not squared lengths) for every
    /// local edge.
    pub fn gradient<T: Differentiable>(&self, sq: &[T], diff: Differentiation<T>) -> Result<Vec<T>> {
        match diff {
            Differentiation::Exact => self.tangent_gradient(sq),
            Differentiation::Central(eta) => self.central_gradient(sq, eta),
        }
    }

    /// One tangent evaluation per edge, seeded with `d(ℓ_i²)/dℓ_i = 2ℓ_i`.
    fn tangent_gradient<T: Differentiable>(&self, sq: &[T]) -> Result<Vec<T>> {
        let mut probe: Vec<Tangent<T>> = sq.iter().map(|&x| Tangent::constant(x)).collect();
        let mut grad = Vec::with_capacity(sq.len());
        for i in 0..sq.len() {
            let len = sq[i].sqrt();
            probe[i] = Tangent::new(sq[i], len + len);
            grad.push(self.lambda(&probe)?.derivative());
            probe[i] = Tangent::constant(sq[i]);
        }
        Ok(grad)
    }

    /// Central differences with step `η ℓ_i`, shrunk tenfold up to three
    /// times if a probe leaves the realizable region.
    fn central_gradient<T: Real>(&self, sq: &[T], eta: T) -> Result<Vec<T>> {
        let mut probe = sq.to_vec();
        let mut grad = Vec::with_capacity(sq.len());
        for i in 0..sq.len() {
            let len = sq[i].sqrt();
            let mut h = eta * len;
            let mut attempt = 0;
            let d = loop {
                probe[i] = (len + h) * (len + h);
                let plus = self.lambda(&probe);
                probe[i] = (len - h) * (len - h);
                let minus = self.lambda(&probe);
                probe[i] = sq[i];
                match (plus, minus) {
                    (Ok(p), Ok(m)) => break (p - m) / (h + h),
                    (Err(e), _) | (_, Err(e)) => {
                        if attempt == 3 {
                            return Err(e);
                        }
                        attempt += 1;
                        h = h / T::lit(10.0);
                    }
                }
            };
            grad.push(d);
        }
        Ok(grad)
    }
}

/// Partials `∂λ/∂ℓ_i` of the dual edge of `tri`, as
/// `(edge id, partial)` pairs sorted by edge id. Only the edges of the two
/// tetrahedra sharing `tri` appear.
pub fn dual_length_jacobian<T: Differentiable>(
    top: &ComplexTopology3,
    metric: &MetricAssignment<T>,
    tri: usize,
    diff: Differentiation<T>,
) -> Result<Vec<(usize, T)>> {
    let star = LocalStar::new(top, tri);
    let grad = star.gradient(&star.gather(&metric.lengths_sq), diff)?;
    let mut out: Vec<(usize, T)> = star.edges.iter().copied().zip(grad).collect();
    out.sort_by_key(|&(e, _)| e);
    Ok(out)
}

/// `M ℓ̇ = b` with `M` dense, row-major, `n × n`.
#[derive(Debug, Clone, PartialEq)]
pub struct RrfSystem<T> {
    pub n: usize,
    pub matrix: Vec<T>,
    pub rhs: Vec<T>,
}

impl<T: Real> RrfSystem<T> {
    pub fn entry(&self, row: usize, col: usize) -> T {
        self.matrix[row * self.n + col]
    }

    pub fn rhs_norm(&self) -> T {
        self.rhs.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    /// Factors `M`, failing with `MatrixSingular` above `max_condition`.
    pub fn factor(&self, max_condition: T) -> Result<Lu<T>> {
        factor_checked(self.matrix.clone(), self.n, max_condition)
    }

    /// Every deficit vanishes to within the geometric tolerance.
    pub fn is_stationary(&self) -> bool {
        self.rhs_norm() <= T::lit(4.0) * T::geometric_tolerance()
    }

    /// `M⁻¹ b` with one step of iterative refinement.
    ///
    /// At a stationary point `ℓ̇ = 0` solves the system whatever the rank of
    /// `M` (symmetric flat lattices have exactly singular `M`), so it is
    /// returned without factoring.
    pub fn solve(&self, max_condition: T) -> Result<Vec<T>> {
        if self.is_stationary() {
            return Ok(vec![T::zero(); self.n]);
        }
        Ok(self.factor(max_condition)?.solve_refined(&self.matrix, &self.rhs, 1))
    }
}

/// Assembles `M_{ℓ,i} = Σ_{λ ∋ ℓ} m_{ℓλ} ∂λ/∂ℓ_i` and `b_ℓ = −4 ε_ℓ`.
///
/// The per-triangle gradients are computed in parallel and accumulated in
/// canonical triangle order, so the result does not depend on scheduling.
pub fn assemble_rrf_system<T: Differentiable>(
    top: &ComplexTopology3,
    metric: &MetricAssignment<T>,
    dual: &DualGeometry<T>,
    deficit: &[T],
    diff: Differentiation<T>,
) -> Result<RrfSystem<T>> {
    let n = top.edge_count();
    let grads: Vec<Vec<(usize, T)>> = (0..top.triangle_count())
        .into_par_iter()
        .map(|f| dual_length_jacobian(top, metric, f, diff))
        .collect::<Result<_>>()?;
    let mut matrix = vec![T::zero(); n * n];
    for (f, grad) in grads.iter().enumerate() {
        for (k, &row) in top.triangle_edges(f).iter().enumerate() {
            let m = dual.moment_arm[f][k];
            for &(col, d) in grad {
                matrix[row * n + col] = matrix[row * n + col] + m * d;
            }
        }
    }
    let four = T::lit(4.0);
    let rhs = deficit.iter().map(|&e| -four * e).collect();
    Ok(RrfSystem { n, matrix, rhs })
}

/// Everything evaluated at one state of the flow.
#[derive(Debug, Clone)]
pub struct FlowState<T> {
    pub dual: DualGeometry<T>,
    pub deficit: Vec<T>,
    pub system: RrfSystem<T>,
    /// `ℓ̇`.
    pub velocity: Vec<T>,
}

/// Builds and solves the system at `metric`.
pub fn evaluate_state<T: Differentiable>(
    top: &ComplexTopology3,
    metric: &MetricAssignment<T>,
    diff: Differentiation<T>,
    max_condition: T,
) -> Result<FlowState<T>> {
    if !top.is_compact() {
        return Err(Error::NotCompact);
    }
    let dual = dual_geometry(top, metric)?;
    let deficit = deficit_angles(top, metric)?;
    let system = assemble_rrf_system(top, metric, &dual, &deficit, diff)?;
    let velocity = system.solve(max_condition)?;
    Ok(FlowState { dual, deficit, system, velocity })
}

/// `ℓ̇ = M⁻¹ b` at the given edge lengths.
pub fn velocity<T: Differentiable>(
    top: &ComplexTopology3,
    lengths: &[T],
    diff: Differentiation<T>,
    max_condition: T,
) -> Result<Vec<T>> {
    let metric = MetricAssignment::from_lengths(lengths);
    Ok(evaluate_state(top, &metric, diff, max_condition)?.velocity)
}
