//! Time integration of `ℓ̇ = M(ℓ)⁻¹ b(ℓ)`.

use super::system::{velocity, Differentiation};
use crate::complex::{ComplexTopology3, MetricAssignment};
use crate::curvature::{deficit_angles, regge_action};
use crate::error::{Error, Result};
use crate::geometry::dual_geometry;
use crate::scalar::{Differentiable, Real};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Integrator {
    ExplicitEuler,
    Rk4,
    #[default]
    Rk45Adaptive,
}

impl Integrator {
    pub fn as_str(self) -> &'static str {
        match self {
            Integrator::ExplicitEuler => "explicit_euler",
            Integrator::Rk4 => "rk4",
            Integrator::Rk45Adaptive => "rk45_adaptive",
        }
    }
}

impl std::str::FromStr for Integrator {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "explicit_euler" | "euler" => Ok(Integrator::ExplicitEuler),
            "rk4" => Ok(Integrator::Rk4),
            "rk45_adaptive" | "rk45" => Ok(Integrator::Rk45Adaptive),
            other => Err(Error::InvalidArgument(format!("unknown integrator `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowConfig<T> {
    /// Fixed step for Euler/RK4, first trial step for RK45.
    pub dt_initial: T,
    pub dt_min: T,
    pub dt_max: T,
    pub integrator: Integrator,
    pub rel_tol: T,
    pub abs_tol: T,
    pub t_end: T,
    /// Halt once any edge falls below this fraction of its initial length.
    pub stop_min_edge_fraction: T,
    /// If false, RK45 treats a nonrealizable trial stage as a rejected step
    /// and retries with a smaller one; otherwise the run ends immediately.
    pub stop_on_nonrealizable: bool,
    /// Record a snapshot every this many accepted steps (first and last are
    /// always recorded).
    pub record_every: usize,
    /// How `∂λ/∂ℓ` is evaluated.
    pub differentiation: Differentiation<T>,
    /// Condition-estimate threshold for the mass matrix.
    pub max_condition: T,
    pub max_steps: usize,
}

impl<T: Real> Default for FlowConfig<T> {
    fn default() -> Self {
        Self {
            dt_initial: T::lit(1e-3),
            dt_min: T::lit(1e-12),
            dt_max: T::lit(1.0),
            integrator: Integrator::Rk45Adaptive,
            rel_tol: T::lit(1e-8),
            abs_tol: T::lit(1e-12),
            t_end: T::one(),
            stop_min_edge_fraction: T::lit(1e-3),
            stop_on_nonrealizable: true,
            record_every: 1,
            differentiation: Differentiation::Exact,
            max_condition: T::max_condition(),
            max_steps: 1_000_000,
        }
    }
}

impl<T: Real> FlowConfig<T> {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidArgument(msg.to_string()));
        if !(self.dt_min > T::zero() && self.dt_min <= self.dt_initial && self.dt_initial <= self.dt_max) {
            return bad("need 0 < dt_min <= dt_initial <= dt_max");
        }
        if !(self.rel_tol > T::zero() && self.abs_tol > T::zero()) {
            return bad("tolerances must be positive");
        }
        if !self.differentiation.is_valid() {
            return bad("finite-difference step must lie in (0, 1)");
        }
        if !(self.max_condition > T::zero()) {
            return bad("max_condition must be positive");
        }
        if !self.t_end.is_finite() {
            return bad("t_end must be finite");
        }
        if !(self.stop_min_edge_fraction >= T::zero() && self.stop_min_edge_fraction < T::one()) {
            return bad("stop_min_edge_fraction must lie in [0, 1)");
        }
        if self.record_every == 0 {
            return bad("record_every must be at least 1");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    ReachedTEnd,
    EdgeCollapse,
    NonRealizable,
    MatrixSingular,
    /// The adaptive controller needed a step below `dt_min` (or `max_steps` ran out).
    StepTooSmall,
}

impl Termination {
    pub fn as_str(self) -> &'static str {
        match self {
            Termination::ReachedTEnd => "reached_t_end",
            Termination::EdgeCollapse => "edge_collapse",
            Termination::NonRealizable => "nonrealizable",
            Termination::MatrixSingular => "matrix_singular",
            Termination::StepTooSmall => "step_too_small",
        }
    }

    /// Maps an evaluation failure to the termination it causes, if any.
    pub fn from_error(err: &Error) -> Option<Self> {
        match err {
            Error::NonRealizable(_) | Error::DegenerateFace(_) | Error::NonPositiveLength { .. } => {
                Some(Termination::NonRealizable)
            }
            Error::MatrixSingular { .. } => Some(Termination::MatrixSingular),
            Error::StepTooSmall { .. } => Some(Termination::StepTooSmall),
            _ => None,
        }
    }
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A recorded state with its diagnostics. Curvature diagnostics are NaN if
/// the state is not realizable.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot<T> {
    pub t: T,
    pub metric: MetricAssignment<T>,
    pub min_len: T,
    pub max_len: T,
    pub min_deficit: T,
    pub regge_action: T,
    pub well_centered: bool,
    /// Coefficient of variation (population std / mean) of the edge lengths.
    pub length_cv: T,
}

impl<T: Real> Snapshot<T> {
    pub fn capture(top: &ComplexTopology3, lengths: &[T], t: T) -> Self {
        let mut metric = MetricAssignment::from_lengths(lengths);
        metric.time = t;
        let min_len = lengths.iter().copied().fold(T::infinity(), T::min);
        let max_len = lengths.iter().copied().fold(T::neg_infinity(), T::max);
        let (min_deficit, action) = match deficit_angles(top, &metric) {
            Ok(eps) => (eps.iter().copied().fold(T::infinity(), T::min), regge_action(top, &metric, &eps)),
            Err(_) => (T::nan(), T::nan()),
        };
        let well_centered = dual_geometry(top, &metric).map(|d| d.is_well_centered()).unwrap_or(false);
        Self {
            t,
            min_len,
            max_len,
            min_deficit,
            regge_action: action,
            well_centered,
            length_cv: coefficient_of_variation(lengths),
            metric,
        }
    }
}

pub fn coefficient_of_variation<T: Real>(values: &[T]) -> T {
    let n = T::lit(values.len() as f64);
    let mean = values.iter().copied().sum::<T>() / n;
    let var = values.iter().map(|&v| (v - mean) * (v - mean)).sum::<T>() / n;
    var.sqrt() / mean
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowTrajectory<T> {
    pub snapshots: Vec<Snapshot<T>>,
    pub termination: Termination,
    /// Diagnostic for abnormal terminations.
    pub message: Option<String>,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

impl<T: Real> FlowTrajectory<T> {
    pub fn last(&self) -> &Snapshot<T> {
        self.snapshots.last().expect("trajectory has at least one snapshot")
    }

    pub fn final_metric(&self) -> &MetricAssignment<T> {
        &self.last().metric
    }
}

/// Outcome of one accepted step.
#[derive(Debug, Clone)]
pub struct StepResult<T> {
    pub metric: MetricAssignment<T>,
    pub dt: T,
    /// Suggested next step (equal to `dt` for fixed-step integrators).
    pub dt_next: T,
    pub rejected: usize,
    /// `ℓ̇` at the new state when the integrator already evaluated it.
    velocity_next: Option<Vec<T>>,
}

/// Advances `state` by one accepted step of the configured integrator,
/// starting from the trial step `config.dt_initial`.
pub fn step<T: Differentiable>(
    top: &ComplexTopology3,
    state: &MetricAssignment<T>,
    config: &FlowConfig<T>,
) -> Result<StepResult<T>> {
    config.validate()?;
    let lengths = state.lengths();
    let k1 = velocity(top, &lengths, config.differentiation, config.max_condition)?;
    let mut out = advance(top, &lengths, &k1, config, state.time, config.dt_initial)?;
    out.metric.time = state.time + out.dt;
    Ok(out)
}

fn axpy<T: Real>(y: &[T], terms: &[(T, &[T])]) -> Vec<T> {
    (0..y.len()).map(|i| terms.iter().fold(y[i], |acc, &(c, k)| acc + c * k[i])).collect()
}

fn advance<T: Differentiable>(
    top: &ComplexTopology3,
    y: &[T],
    k1: &[T],
    config: &FlowConfig<T>,
    t: T,
    dt: T,
) -> Result<StepResult<T>> {
    let f = |l: &[T]| velocity(top, l, config.differentiation, config.max_condition);
    let fixed = |l: Vec<T>| StepResult {
        metric: MetricAssignment::from_lengths(&l),
        dt,
        dt_next: dt,
        rejected: 0,
        velocity_next: None,
    };
    match config.integrator {
        Integrator::ExplicitEuler => Ok(fixed(axpy(y, &[(dt, k1)]))),
        Integrator::Rk4 => {
            let half = dt * T::lit(0.5);
            let k2 = f(&axpy(y, &[(half, k1)]))?;
            let k3 = f(&axpy(y, &[(half, &k2)]))?;
            let k4 = f(&axpy(y, &[(dt, &k3)]))?;
            let s = dt / T::lit(6.0);
            let two = T::lit(2.0);
            Ok(fixed(axpy(y, &[(s, k1), (s * two, &k2), (s * two, &k3), (s, &k4)])))
        }
        Integrator::Rk45Adaptive => dormand_prince(y, k1, config, t, dt, f),
    }
}

fn dormand_prince<T: Differentiable>(
    y: &[T],
    k1: &[T],
    config: &FlowConfig<T>,
    t: T,
    mut dt: T,
    f: impl Fn(&[T]) -> Result<Vec<T>>,
) -> Result<StepResult<T>> {
    let c = |x: f64| T::lit(x);
    let mut rejected = 0;
    loop {
        let attempt = (|| -> Result<(Vec<T>, Vec<T>, T)> {
            let k2 = f(&axpy(y, &[(dt * c(1.0 / 5.0), k1)]))?;
            let k3 = f(&axpy(y, &[(dt * c(3.0 / 40.0), k1), (dt * c(9.0 / 40.0), &k2)]))?;
            let k4 = f(&axpy(y, &[(dt * c(44.0 / 45.0), k1), (dt * c(-56.0 / 15.0), &k2), (dt * c(32.0 / 9.0), &k3)]))?;
            let k5 = f(&axpy(
                y,
                &[
                    (dt * c(19372.0 / 6561.0), k1),
                    (dt * c(-25360.0 / 2187.0), &k2),
                    (dt * c(64448.0 / 6561.0), &k3),
                    (dt * c(-212.0 / 729.0), &k4),
                ],
            ))?;
            let k6 = f(&axpy(
                y,
                &[
                    (dt * c(9017.0 / 3168.0), k1),
                    (dt * c(-355.0 / 33.0), &k2),
                    (dt * c(46732.0 / 5247.0), &k3),
                    (dt * c(49.0 / 176.0), &k4),
                    (dt * c(-5103.0 / 18656.0), &k5),
                ],
            ))?;
            let y_new = axpy(
                y,
                &[
                    (dt * c(35.0 / 384.0), k1),
                    (dt * c(500.0 / 1113.0), &k3),
                    (dt * c(125.0 / 192.0), &k4),
                    (dt * c(-2187.0 / 6784.0), &k5),
                    (dt * c(11.0 / 84.0), &k6),
                ],
            );
            let k7 = f(&y_new)?;
            let err = axpy(
                &vec![T::zero(); y.len()],
                &[
                    (dt * c(71.0 / 57600.0), k1),
                    (dt * c(-71.0 / 16695.0), &k3),
                    (dt * c(71.0 / 1920.0), &k4),
                    (dt * c(-17253.0 / 339200.0), &k5),
                    (dt * c(22.0 / 525.0), &k6),
                    (dt * c(-1.0 / 40.0), &k7),
                ],
            );
            let norm = (0..y.len()).fold(T::zero(), |m, i| {
                let scale = config.abs_tol + config.rel_tol * y[i].abs().max(y_new[i].abs());
                m.max(err[i].abs() / scale)
            });
            Ok((y_new, k7, norm))
        })();
        let factor = match attempt {
            Ok((y_new, k7, norm)) if norm <= T::one() => {
                let grow =
                    if norm == T::zero() { c(5.0) } else { (c(0.9) * norm.powf(c(-0.2))).min(c(5.0)).max(c(0.2)) };
                let dt_next = (dt * grow).min(config.dt_max).max(config.dt_min);
                return Ok(StepResult {
                    metric: MetricAssignment::from_lengths(&y_new),
                    dt,
                    dt_next,
                    rejected,
                    velocity_next: Some(k7),
                });
            }
            Ok((_, _, norm)) => (c(0.9) * norm.powf(c(-0.2))).max(c(0.1)).min(c(0.9)),
            Err(e) => match Termination::from_error(&e) {
                Some(Termination::NonRealizable) if !config.stop_on_nonrealizable => c(0.25),
                _ => return Err(e),
            },
        };
        rejected += 1;
        if dt <= config.dt_min {
            return Err(Error::StepTooSmall { t: t.to_f64_lossy(), dt_min: config.dt_min.to_f64_lossy() });
        }
        dt = (dt * factor).max(config.dt_min);
    }
}

/// Integrates from `metric0` until `t_end` or a stop condition.
///
/// Errors are returned only for invalid input (configuration, non-compact
/// complex, unrealizable initial state); failures during the run end it with
/// the corresponding [`Termination`].
pub fn run_flow<T: Differentiable>(
    top: &ComplexTopology3,
    metric0: &MetricAssignment<T>,
    config: &FlowConfig<T>,
) -> Result<FlowTrajectory<T>> {
    config.validate()?;
    if !top.is_compact() {
        return Err(Error::NotCompact);
    }
    dual_geometry(top, metric0)?;
    let initial = metric0.lengths();
    let mut lengths = initial.clone();
    let mut t = metric0.time;
    let mut traj = FlowTrajectory {
        snapshots: vec![Snapshot::capture(top, &lengths, t)],
        termination: Termination::ReachedTEnd,
        message: None,
        accepted_steps: 0,
        rejected_steps: 0,
    };
    let finish = |mut traj: FlowTrajectory<T>, lengths: &[T], t: T, term: Termination, msg: Option<String>| {
        if traj.last().t != t {
            traj.snapshots.push(Snapshot::capture(top, lengths, t));
        }
        traj.termination = term;
        traj.message = msg;
        traj
    };
    let fail = |e: Error| match Termination::from_error(&e) {
        Some(term) => Ok((term, e.to_string())),
        None => Err(e),
    };

    let mut k1 = match velocity(top, &lengths, config.differentiation, config.max_condition) {
        Ok(v) => v,
        Err(e) => {
            let (term, msg) = fail(e)?;
            return Ok(finish(traj, &lengths, t, term, Some(msg)));
        }
    };
    let mut dt = config.dt_initial;
    let end_tol = T::lit(64.0) * T::epsilon() * config.t_end.abs().max(T::one());
    loop {
        if t >= config.t_end - end_tol {
            return Ok(finish(traj, &lengths, t, Termination::ReachedTEnd, None));
        }
        if traj.accepted_steps >= config.max_steps {
            let msg = format!("max_steps = {} exhausted at t = {t}", config.max_steps);
            return Ok(finish(traj, &lengths, t, Termination::StepTooSmall, Some(msg)));
        }
        let trial = dt.min(config.t_end - t);
        let out = match advance(top, &lengths, &k1, config, t, trial) {
            Ok(out) => out,
            Err(e) => {
                let (term, msg) = fail(e)?;
                return Ok(finish(traj, &lengths, t, term, Some(format!("at t = {t}: {msg}"))));
            }
        };
        traj.rejected_steps += out.rejected;
        traj.accepted_steps += 1;
        t = t + out.dt;
        lengths = out.metric.lengths();
        if config.integrator == Integrator::Rk45Adaptive {
            dt = out.dt_next;
        }
        let collapsed = lengths.iter().zip(&initial).position(|(&l, &l0)| !(l > config.stop_min_edge_fraction * l0));
        if let Some(e) = collapsed {
            let msg = format!("edge {} reached length {} at t = {t}", top.edge_key(e), lengths[e]);
            return Ok(finish(traj, &lengths, t, Termination::EdgeCollapse, Some(msg)));
        }
        if traj.accepted_steps % config.record_every == 0 {
            traj.snapshots.push(Snapshot::capture(top, &lengths, t));
        }
        k1 = match out.velocity_next {
            Some(v) => v,
            None => match velocity(top, &lengths, config.differentiation, config.max_condition) {
                Ok(v) => v,
                Err(e) => {
                    let (term, msg) = fail(e)?;
                    return Ok(finish(traj, &lengths, t, term, Some(format!("at t = {t}: {msg}"))));
                }
            },
        };
    }
}
