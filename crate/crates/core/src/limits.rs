//! Self-similar maps, fixed-point iteration and the regularized double limit.
//!
//! Each family map sends the characteristic quantity of the inner copies to
//! that of the next level up. The characteristic impedance is a fixed point;
//! finite approximations are iterates of the map starting from the
//! termination. Without regularization the in-band maps are neutral and the
//! iterates need not settle, which [`iterate`] reports as a first-class
//! outcome rather than an error.

use num_complex::Complex64;

use crate::circuit::EvalContext;
use crate::error::{Error, Result};
use crate::families::{FamilyImpedance, FamilyParams};
use crate::reduce::parallel;

/// Relative Cauchy tolerance for inner limits.
pub const INNER_TOL: f64 = 1e-10;
/// Iteration cap for inner limits. Lightly lossy ladders contract by about
/// `1 − ε` per step, so ε = 1e−4 needs well over 1e5 steps at low frequency.
pub const INNER_MAX_ITER: usize = 1_000_000;
/// Longest period scanned by cycle detection.
pub const CYCLE_WINDOW: usize = 32;
/// Relative distance within which an iterate counts as a revisit.
pub const CYCLE_TOL: f64 = 1e-8;
/// A revisit only counts as a cycle while consecutive steps are at least this
/// large (relative); slowly converging spirals revisit with tiny steps.
pub const CYCLE_MIN_STEP: f64 = 1e-3;
/// Default regularization schedule.
pub const DEFAULT_EPS_SCHEDULE: [f64; 3] = [1e-2, 1e-3, 1e-4];

/// `(ε + iωL) + (ε + 1/(iωC)) ∥ z`: one more ladder cell in front of `z`.
pub fn ladder_map(z: Complex64, ctx: &EvalContext, l: f64, c: f64) -> Result<Complex64> {
    Ok(ctx.inductor(l) + parallel(ctx.capacitor(c), z)?)
}

/// `(ε + iωL) ∥ (5z/3 + 3(ε + 1/(iωC)))`: gasket side impedance one level up.
pub fn sg_map(z: Complex64, ctx: &EvalContext, l: f64, c: f64) -> Result<Complex64> {
    parallel(ctx.inductor(l), z * (5.0 / 3.0) + ctx.capacitor(c) * 3.0)
}

/// Legs `(zv, zl)` of the star equivalent to three copies of the `(zv, zl)`
/// star scaled by `r`, joined by the outer capacitors and inductor.
pub fn hanoi_map(
    zv: Complex64,
    zl: Complex64,
    ctx: &EvalContext,
    r: f64,
    l: f64,
    c: f64,
) -> Result<(Complex64, Complex64)> {
    let (ind, cap) = (ctx.inductor(l), ctx.capacitor(c));
    let lateral = zl * (2.0 * r) + parallel(zl * (2.0 * r) + ind, zv * (2.0 * r) + zl * (2.0 * r) + cap * 2.0)?;
    let zl_next = lateral / 2.0;
    let vertical = zv * r + (zv * r + zl * (2.0 * r) + cap) / 2.0;
    Ok((vertical - zl_next / 2.0, zl_next))
}

/// One application of the family map.
pub fn apply_map(params: &FamilyParams, value: &FamilyImpedance, ctx: &EvalContext) -> Result<FamilyImpedance> {
    match (*params, *value) {
        (FamilyParams::Ladder { l, c }, FamilyImpedance::Scalar(z)) => {
            ladder_map(z, ctx, l, c).map(FamilyImpedance::Scalar)
        }
        (FamilyParams::Sg { l, c }, FamilyImpedance::Scalar(z)) => sg_map(z, ctx, l, c).map(FamilyImpedance::Scalar),
        (FamilyParams::Hanoi { l, c, r }, FamilyImpedance::Pair { zv, zl }) => {
            hanoi_map(zv, zl, ctx, r, l, c).map(|(zv, zl)| FamilyImpedance::Pair { zv, zl })
        }
        _ => Err(Error::InvalidParameter(
            "value shape does not match the family".into(),
        )),
    }
}

/// Starting point with positive real part; lossless maps never resonate from it.
pub fn default_start(params: &FamilyParams) -> FamilyImpedance {
    let z = Complex64::new(params.reference_impedance(), 0.0);
    match params {
        FamilyParams::Hanoi { .. } => FamilyImpedance::Pair { zv: z, zl: z },
        _ => FamilyImpedance::Scalar(z),
    }
}

/// State of a fixed-point iteration.
pub trait IterState: Clone {
    fn distance(&self, other: &Self) -> f64;
    fn magnitude(&self) -> f64;
}

impl IterState for Complex64 {
    fn distance(&self, other: &Self) -> f64 {
        (self - other).norm()
    }

    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

impl IterState for (Complex64, Complex64) {
    fn distance(&self, other: &Self) -> f64 {
        (self.0 - other.0).norm().hypot((self.1 - other.1).norm())
    }

    fn magnitude(&self) -> f64 {
        self.0.norm().hypot(self.1.norm())
    }
}

impl IterState for FamilyImpedance {
    fn distance(&self, other: &Self) -> f64 {
        FamilyImpedance::distance(self, other)
    }

    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IterationStatus {
    Converged,
    CycleDetected { period: usize },
    MaxIterations,
}

#[derive(Debug, Clone)]
pub struct IterationReport<S> {
    pub status: IterationStatus,
    /// The final iterate when converged.
    pub value: Option<S>,
    /// Every iterate, starting with the initial point.
    pub history: Vec<S>,
    /// Number of map applications performed.
    pub iterations: usize,
}

impl<S> IterationReport<S> {
    pub fn converged(&self) -> bool {
        self.status == IterationStatus::Converged
    }

    pub fn last(&self) -> &S {
        self.history.last().expect("history holds at least the start point")
    }
}

/// Fixed-point iteration with a relative Cauchy stopping rule.
///
/// Stops as converged once `|z_n − z_{n−1}| ≤ tol·max(1, |z_n|)`. Reports a
/// cycle when, for some period `p` in `2..=32`, the last two windows of `p`
/// iterates each return within [`CYCLE_TOL`] while the orbit still moves by
/// at least [`CYCLE_MIN_STEP`] per step. Map errors abort the iteration.
pub fn iterate<S, F>(mut map: F, z0: S, tol: f64, max_iter: usize) -> Result<IterationReport<S>>
where
    S: IterState,
    F: FnMut(&S) -> Result<S>,
{
    if !(tol > 0.0) || max_iter == 0 {
        return Err(Error::InvalidParameter(format!(
            "need tol > 0 and max_iter ≥ 1, got {tol} and {max_iter}"
        )));
    }
    let mut history = Vec::with_capacity(max_iter.min(4096) + 1);
    history.push(z0);
    for n in 1..=max_iter {
        let next = map(history.last().unwrap())?;
        let scale = next.magnitude().max(1.0);
        let step = next.distance(history.last().unwrap());
        if !step.is_finite() || !scale.is_finite() {
            history.push(next);
            return Err(Error::Iteration(format!("iterate {n} is not finite")));
        }
        history.push(next);
        if step <= tol * scale {
            let value = history.last().cloned();
            return Ok(IterationReport {
                status: IterationStatus::Converged,
                value,
                history,
                iterations: n,
            });
        }
        if step >= CYCLE_MIN_STEP * scale {
            if let Some(period) = detect_cycle(&history, scale) {
                return Ok(IterationReport {
                    status: IterationStatus::CycleDetected { period },
                    value: None,
                    history,
                    iterations: n,
                });
            }
        }
    }
    Ok(IterationReport {
        status: IterationStatus::MaxIterations,
        value: None,
        history,
        iterations: max_iter,
    })
}

fn detect_cycle<S: IterState>(history: &[S], scale: f64) -> Option<usize> {
    let n = history.len() - 1;
    let tol = CYCLE_TOL * scale;
    (2..=CYCLE_WINDOW).find(|&p| {
        n >= 2 * p
            && history[n].distance(&history[n - p]) <= tol
            && history[n - p].distance(&history[n - 2 * p]) <= tol
    })
}

/// Iterates the family map from `start` at `ctx` with the inner-limit settings.
pub fn iterate_family(
    params: &FamilyParams,
    ctx: &EvalContext,
    start: FamilyImpedance,
) -> Result<IterationReport<FamilyImpedance>> {
    iterate(|z| apply_map(params, z, ctx), start, INNER_TOL, INNER_MAX_ITER)
}

/// Inner limit at one regularization value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsilonLimit {
    pub epsilon: f64,
    pub value: FamilyImpedance,
    pub iterations: usize,
}

/// Outcome of [`double_limit`]: the plain sequence of inner limits (no
/// extrapolation) and its last entry.
#[derive(Debug, Clone, PartialEq)]
pub struct DoubleLimit {
    pub value: FamilyImpedance,
    pub sequence: Vec<EpsilonLimit>,
    /// Whether successive inner limits agree to `tol` (relative).
    pub cauchy: bool,
    /// Largest relative gap between successive inner limits.
    pub max_gap: f64,
}

/// For each ε of a strictly decreasing positive schedule, iterates the family
/// map to its limit, starting from the limit at the previous ε; reports the raw sequence and flags it when successive
/// limits are not within `tol`.
pub fn double_limit(params: &FamilyParams, omega: f64, eps_schedule: &[f64], tol: f64) -> Result<DoubleLimit> {
    params.validate()?;
    if eps_schedule.is_empty()
        || eps_schedule.iter().any(|e| !(*e > 0.0))
        || eps_schedule.windows(2).any(|w| !(w[1] < w[0]))
    {
        return Err(Error::InvalidParameter(
            "regularization schedule must be positive and strictly decreasing".into(),
        ));
    }
    let mut sequence: Vec<EpsilonLimit> = Vec::with_capacity(eps_schedule.len());
    for &epsilon in eps_schedule {
        let ctx = EvalContext::new(omega, epsilon)?;
        // the inner limit does not depend on the start, so each ε resumes
        // from the previous limit, which is already within O(ε) of the next
        let start = sequence.last().map_or_else(|| default_start(params), |prev| prev.value);
        let report = iterate_family(params, &ctx, start)?;
        let value = report.value.ok_or_else(|| {
            Error::Iteration(format!(
                "inner limit at ε = {epsilon} did not converge ({:?} after {} iterations)",
                report.status, report.iterations
            ))
        })?;
        sequence.push(EpsilonLimit {
            epsilon,
            value,
            iterations: report.iterations,
        });
    }
    let max_gap = sequence
        .windows(2)
        .map(|w| w[1].value.distance(&w[0].value) / w[1].value.norm().max(1.0))
        .fold(0.0, f64::max);
    Ok(DoubleLimit {
        value: sequence.last().unwrap().value,
        cauchy: max_gap <= tol,
        max_gap,
        sequence,
    })
}
