//! The outer majorize-minimize loop.
//!
//! Each iteration majorizes the objective at the current iterate, minimizes
//! every coordinate surrogate independently, and tests the relative-change
//! convergence criterion
//!
//! ```text
//! (f(x_m) - f(x_{m+1})) / (|f(x_m)| + 1) <= epsilon.
//! ```
//!
//! Iterates are tracked in log coordinates, so runs that legitimately head to
//! the boundary of the orthant keep producing correct objective values long
//! after the plain coordinates would have left `f64` range.

use crate::error::{Error, Result};
use crate::signomial::{CompositeObjective, PositivePoint};
use crate::surrogate::{
    build_surrogate, solve_coordinate_log, CoordinateSolve, DivergenceDirection, InnerSolveOptions,
    SurrogateCoordinate,
};
use nalgebra::{DMatrix, DVector};

/// Multiplicative step applied to a coordinate whose surrogate has no
/// interior minimizer.
pub const DIVERGENCE_DAMPING: f64 = 10.0;

/// Outer-loop configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Relative-change convergence threshold.
    pub epsilon: f64,
    pub max_iterations: usize,
    /// Number of secant conditions for quasi-Newton acceleration; 0 is plain MM.
    pub acceleration_q: usize,
    /// Plain substeps taken before each secant extrapolation. Short warmups
    /// leave transient modes in the secant pairs; the default damps them.
    pub acceleration_warmup: usize,
    /// A run whose objective falls below this value is declared divergent.
    pub divergence_value_floor: f64,
    /// A run whose iterate leaves `[lo, hi]^n` is declared divergent.
    /// `(0.0, f64::INFINITY)` disables the check.
    pub divergence_coordinate_bounds: (f64, f64),
    pub inner: InnerSolveOptions,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            epsilon: 1e-9,
            max_iterations: 100_000,
            acceleration_q: 0,
            acceleration_warmup: 8,
            divergence_value_floor: -1e12,
            divergence_coordinate_bounds: (1e-12, 1e12),
            inner: InnerSolveOptions::default(),
        }
    }
}

impl SolverConfig {
    fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0) {
            return Err(Error::InvalidCoefficient(self.epsilon));
        }
        if self.max_iterations == 0 || self.acceleration_q > 3 {
            return Err(Error::InvalidCoefficient(self.acceleration_q as f64));
        }
        Ok(())
    }
}

/// How an iterate was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepKind {
    Mm,
    Accelerated,
    /// At least one coordinate took a damped multiplicative step because its
    /// surrogate decreases monotonically toward the boundary.
    DampedDivergence,
}

/// One recorded iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub point: PositivePoint,
    pub objective: f64,
    pub step: StepKind,
}

/// Which bound a divergent coordinate crossed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoordinateBound {
    BelowLower,
    AboveUpper,
}

/// Details of a divergence declaration.
#[derive(Debug, Clone, PartialEq)]
pub struct DivergenceInfo {
    /// Per-coordinate bound violations at the final iterate.
    pub coordinates: Vec<Option<CoordinateBound>>,
    pub value_floor_hit: bool,
    pub non_finite_objective: bool,
}

/// Why the loop stopped.
#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Converged,
    Diverged(DivergenceInfo),
    IterationBudgetExhausted,
}

/// Full record of a solve.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationTrace {
    initial_point: PositivePoint,
    initial_objective: f64,
    records: Vec<IterationRecord>,
    outcome: Outcome,
    rejected_accelerations: usize,
}

impl IterationTrace {
    pub fn initial_point(&self) -> &PositivePoint {
        &self.initial_point
    }

    pub fn initial_objective(&self) -> f64 {
        self.initial_objective
    }

    pub fn records(&self) -> &[IterationRecord] {
        &self.records
    }

    pub fn outcome(&self) -> &Outcome {
        &self.outcome
    }

    pub fn iterations(&self) -> usize {
        self.records.len()
    }

    pub fn rejected_accelerations(&self) -> usize {
        self.rejected_accelerations
    }

    pub fn final_point(&self) -> &PositivePoint {
        self.records
            .last()
            .map_or(&self.initial_point, |r| &r.point)
    }

    pub fn final_objective(&self) -> f64 {
        self.records
            .last()
            .map_or(self.initial_objective, |r| r.objective)
    }

    /// Initial objective followed by each iteration's objective.
    pub fn objectives(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.records.len() + 1);
        v.push(self.initial_objective);
        v.extend(self.records.iter().map(|r| r.objective));
        v
    }
}

/// Anything the MM loop can drive: an objective with a separated majorizer.
/// The penalty solver implements this with an anchor-dependent surrogate.
pub(crate) trait MmProblem {
    fn dimension(&self) -> usize;
    fn objective_log(&self, y: &[f64]) -> f64;
    fn surrogate_log(&self, y: &[f64]) -> (Vec<SurrogateCoordinate>, f64);
}

impl MmProblem for CompositeObjective {
    fn dimension(&self) -> usize {
        CompositeObjective::dimension(self)
    }

    fn objective_log(&self, y: &[f64]) -> f64 {
        self.value_log(y)
    }

    fn surrogate_log(&self, y: &[f64]) -> (Vec<SurrogateCoordinate>, f64) {
        build_surrogate(self, y)
    }
}

/// Run the MM loop on a composite objective.
pub fn solve(
    f: &CompositeObjective,
    x0: &PositivePoint,
    cfg: &SolverConfig,
) -> Result<IterationTrace> {
    solve_problem(f, x0, cfg)
}

pub(crate) fn solve_problem<P: MmProblem>(
    problem: &P,
    x0: &PositivePoint,
    cfg: &SolverConfig,
) -> Result<IterationTrace> {
    cfg.validate()?;
    if x0.dimension() != problem.dimension() {
        return Err(Error::DimensionMismatch {
            expected: problem.dimension(),
            found: x0.dimension(),
        });
    }
    let (lo, hi) = cfg.divergence_coordinate_bounds;
    let (log_lo, log_hi) = (lo.ln(), hi.ln());

    let mut y = x0.log_coords();
    let mut fy = problem.objective_log(&y);
    let mut records = Vec::new();
    let mut rejected = 0usize;

    if !fy.is_finite() {
        let info = DivergenceInfo {
            coordinates: vec![None; y.len()],
            value_floor_hit: false,
            non_finite_objective: true,
        };
        return Ok(IterationTrace {
            initial_point: x0.clone(),
            initial_objective: fy,
            records: Vec::new(),
            outcome: Outcome::Diverged(info),
            rejected_accelerations: 0,
        });
    }

    let initial_objective = fy;
    let mut outcome = Outcome::IterationBudgetExhausted;
    for _ in 0..cfg.max_iterations {
        let (y_next, f_next, kind) = iterate(problem, &y, cfg, &mut rejected);
        records.push(IterationRecord {
            point: PositivePoint::from_log(&y_next),
            objective: f_next,
            step: kind,
        });

        if !f_next.is_finite() || f_next < cfg.divergence_value_floor {
            outcome = Outcome::Diverged(DivergenceInfo {
                coordinates: vec![None; y_next.len()],
                value_floor_hit: f_next.is_finite(),
                non_finite_objective: !f_next.is_finite(),
            });
            break;
        }
        let coordinates: Vec<Option<CoordinateBound>> = y_next
            .iter()
            .map(|&yi| {
                if yi < log_lo {
                    Some(CoordinateBound::BelowLower)
                } else if yi > log_hi {
                    Some(CoordinateBound::AboveUpper)
                } else {
                    None
                }
            })
            .collect();
        if coordinates.iter().any(|c| c.is_some()) {
            outcome = Outcome::Diverged(DivergenceInfo {
                coordinates,
                value_floor_hit: false,
                non_finite_objective: false,
            });
            break;
        }
        // The relative-change test presumes both sides are near a surrogate
        // minimum; a damped step is not one, so the test is skipped for it.
        let converged =
            kind != StepKind::DampedDivergence && (fy - f_next) / (fy.abs() + 1.0) <= cfg.epsilon;
        y = y_next;
        fy = f_next;
        if converged {
            outcome = Outcome::Converged;
            break;
        }
    }

    Ok(IterationTrace {
        initial_point: x0.clone(),
        initial_objective,
        records,
        outcome,
        rejected_accelerations: rejected,
    })
}

/// One outer iteration: plain coordinate minimization, or a secant
/// extrapolation built from `max(q + 1, warmup)` plain substeps.
fn iterate<P: MmProblem>(
    problem: &P,
    y: &[f64],
    cfg: &SolverConfig,
    rejected: &mut usize,
) -> (Vec<f64>, f64, StepKind) {
    let q = cfg.acceleration_q;
    if q == 0 {
        let (y_next, damped) = plain_step(problem, y, &cfg.inner);
        let f_next = problem.objective_log(&y_next);
        let kind = if damped {
            StepKind::DampedDivergence
        } else {
            StepKind::Mm
        };
        return (y_next, f_next, kind);
    }

    let substeps = cfg.acceleration_warmup.max(q + 1);
    let mut anchors: Vec<Vec<f64>> = Vec::with_capacity(substeps + 1);
    anchors.push(y.to_vec());
    for _ in 0..substeps {
        let (next, damped) = plain_step(problem, anchors.last().unwrap(), &cfg.inner);
        if damped {
            // The fixed-point map is undefined here; fall back to the damped
            // plain step and drop the secant history.
            let f_next = problem.objective_log(&next);
            return (next, f_next, StepKind::DampedDivergence);
        }
        anchors.push(next);
    }
    let y_plain = anchors[substeps].clone();
    let f_plain = problem.objective_log(&y_plain);

    // Secant pairs come from the last q+1 anchors, in the x domain.
    if anchors.iter().flatten().any(|&v| v.abs() > 700.0) {
        // exp would overflow; acceleration is pointless this far out.
        *rejected += 1;
        return (y_plain, f_plain, StepKind::Mm);
    }
    let s = substeps;
    let xs: Vec<Vec<f64>> = anchors[s - q - 1..=s]
        .iter()
        .map(|a| a.iter().map(|&v| v.exp()).collect())
        .collect();
    let pairs: Vec<(PositivePoint, PositivePoint)> = (0..=q)
        .map(|j| {
            (
                PositivePoint::new(xs[j].clone()).expect("positive iterate"),
                PositivePoint::new(xs[j + 1].clone()).expect("positive iterate"),
            )
        })
        .collect();
    if let Some(candidate) = accelerate(&pairs) {
        let y_acc: Vec<f64> = candidate.coords().iter().map(|&v| v.ln()).collect();
        let f_acc = problem.objective_log(&y_acc);
        if f_acc.is_finite() && f_acc <= f_plain {
            return (y_acc, f_acc, StepKind::Accelerated);
        }
    }
    *rejected += 1;
    (y_plain, f_plain, StepKind::Mm)
}

/// Minimize every coordinate surrogate at the anchor; damp the coordinates
/// whose surrogates slide to the boundary.
fn plain_step<P: MmProblem>(problem: &P, y: &[f64], inner: &InnerSolveOptions) -> (Vec<f64>, bool) {
    let (coords, _offset) = problem.surrogate_log(y);
    let mut next = y.to_vec();
    let mut damped = false;
    let step = DIVERGENCE_DAMPING.ln();
    for c in &coords {
        let i = c.index();
        match solve_coordinate_log(c, y[i], inner) {
            CoordinateSolve::Root(yi) => next[i] = yi,
            CoordinateSolve::Flat => {}
            CoordinateSolve::Diverges(DivergenceDirection::TowardZero) => {
                next[i] = y[i] - step;
                damped = true;
            }
            CoordinateSolve::Diverges(DivergenceDirection::TowardInfinity) => {
                next[i] = y[i] + step;
                damped = true;
            }
        }
    }
    (next, damped)
}

/// Secant extrapolation of a fixed-point map from `q + 1` consecutive
/// `(x, M(x))` pairs.
///
/// With columns `u_k = x_{m-k+1} - x_{m-k}` and `v_k = M(x_{m-k+1}) - M(x_{m-k})`
/// the proposal is
///
/// ```text
/// x_acc = M(x_m) + V (U^T U - U^T V)^-1 U^T (M(x_m) - x_m).
/// ```
///
/// Returns `None` when the secant system is singular or the proposal leaves
/// the positive orthant. Callers must still apply their own descent guard.
pub fn accelerate(history: &[(PositivePoint, PositivePoint)]) -> Option<PositivePoint> {
    if history.len() < 2 {
        return None;
    }
    let q = history.len() - 1;
    let n = history[0].0.dimension();
    let mut u = DMatrix::zeros(n, q);
    let mut v = DMatrix::zeros(n, q);
    for j in 0..q {
        for i in 0..n {
            u[(i, j)] = history[j + 1].0.coords()[i] - history[j].0.coords()[i];
            v[(i, j)] = history[j + 1].1.coords()[i] - history[j].1.coords()[i];
        }
    }
    let (x_m, m_x_m) = &history[q];
    let residual = DVector::from_iterator(
        n,
        m_x_m.coords().iter().zip(x_m.coords()).map(|(a, b)| a - b),
    );
    let system = u.transpose() * &u - u.transpose() * &v;
    let rhs = u.transpose() * &residual;
    let sol = system.lu().solve(&rhs)?;
    let correction = v * sol;
    let coords: Vec<f64> = m_x_m
        .coords()
        .iter()
        .zip(correction.iter())
        .map(|(a, b)| a + b)
        .collect();
    if coords.iter().all(|&c| c.is_finite() && c > 0.0) {
        Some(PositivePoint::new(coords).expect("checked positive"))
    } else {
        None
    }
}
