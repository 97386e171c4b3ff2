//! Quadratic programming over the positive orthant by multiplicative MM
//! updates inside the quadratic penalty method.
//!
//! For `f(x) = 1/2 x^T Q x + c^T x` with `A x <= b` and `E x = d`, the
//! penalized objective
//!
//! ```text
//! f_lambda(x) = f(x) + lambda |(Ax - b)_+|^2 + lambda |Ex - d|^2
//! ```
//!
//! is majorized by a quadratic with matrix `H_lambda = Q + 2 lambda (A^T A +
//! E^T E)` and, after splitting each row of `H_lambda` by sign against the
//! current iterate, minimized coordinate-wise in closed form. The update is
//! multiplicative, so iterates stay in the open orthant; an epsilon floor
//! keeps coordinates from sticking to the boundary.

use crate::driver::accelerate;
use crate::error::{Error, Result};
use crate::penalty::PenaltySchedule;
use crate::signomial::PositivePoint;
use nalgebra::{DMatrix, DVector};

/// A quadratic program `min 1/2 x^T Q x + c^T x` over `x > 0` with optional
/// inequality system `A x <= b` and equality system `E x = d`.
#[derive(Debug, Clone, PartialEq)]
pub struct QpProblem {
    q: DMatrix<f64>,
    c: DVector<f64>,
    a: DMatrix<f64>,
    b: DVector<f64>,
    e: DMatrix<f64>,
    d: DVector<f64>,
}

impl QpProblem {
    /// `Q` is symmetrized on construction; `Q` may have any definiteness.
    pub fn new(
        q: DMatrix<f64>,
        c: DVector<f64>,
        inequalities: Option<(DMatrix<f64>, DVector<f64>)>,
        equalities: Option<(DMatrix<f64>, DVector<f64>)>,
    ) -> Result<Self> {
        let n = c.len();
        if n == 0 {
            return Err(Error::ZeroDimension);
        }
        if q.nrows() != n || q.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: q.nrows().max(q.ncols()),
            });
        }
        let q = (&q + q.transpose()) * 0.5;
        let (a, b) = match inequalities {
            Some((a, b)) => {
                if a.ncols() != n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        found: a.ncols(),
                    });
                }
                if a.nrows() != b.len() {
                    return Err(Error::DimensionMismatch {
                        expected: a.nrows(),
                        found: b.len(),
                    });
                }
                (a, b)
            }
            None => (DMatrix::zeros(0, n), DVector::zeros(0)),
        };
        let (e, d) = match equalities {
            Some((e, d)) => {
                if e.ncols() != n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        found: e.ncols(),
                    });
                }
                if e.nrows() != d.len() {
                    return Err(Error::DimensionMismatch {
                        expected: e.nrows(),
                        found: d.len(),
                    });
                }
                (e, d)
            }
            None => (DMatrix::zeros(0, n), DVector::zeros(0)),
        };
        Ok(QpProblem { q, c, a, b, e, d })
    }

    pub fn dimension(&self) -> usize {
        self.c.len()
    }

    pub fn q(&self) -> &DMatrix<f64> {
        &self.q
    }

    pub fn c(&self) -> &DVector<f64> {
        &self.c
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn b(&self) -> &DVector<f64> {
        &self.b
    }

    pub fn e(&self) -> &DMatrix<f64> {
        &self.e
    }

    pub fn d(&self) -> &DVector<f64> {
        &self.d
    }
}

/// Penalized-surrogate data at one penalty constant and anchor.
///
/// `h_lambda` depends only on the penalty constant; the shift vector
/// `v_lambda_m` and the clamp `r_m = min(A x_m - b, 0)` are refreshed at every
/// iterate.
#[derive(Debug, Clone, PartialEq)]
pub struct PenalizedQpState {
    lambda: f64,
    h_lambda: DMatrix<f64>,
    v_lambda_m: DVector<f64>,
    r_m: DVector<f64>,
}

impl PenalizedQpState {
    pub fn new(p: &QpProblem, lambda: f64, x_m: &PositivePoint) -> Result<Self> {
        if !(lambda >= 0.0) {
            return Err(Error::InvalidCoefficient(lambda));
        }
        let h_lambda = &p.q + (p.a.transpose() * &p.a + p.e.transpose() * &p.e) * (2.0 * lambda);
        let mut state = PenalizedQpState {
            lambda,
            h_lambda,
            v_lambda_m: DVector::zeros(p.dimension()),
            r_m: DVector::zeros(p.a.nrows()),
        };
        state.refresh(p, x_m)?;
        Ok(state)
    }

    /// Recompute the anchor-dependent pieces at a new iterate.
    pub fn refresh(&mut self, p: &QpProblem, x_m: &PositivePoint) -> Result<()> {
        if x_m.dimension() != p.dimension() {
            return Err(Error::DimensionMismatch {
                expected: p.dimension(),
                found: x_m.dimension(),
            });
        }
        let x = DVector::from_row_slice(x_m.coords());
        self.r_m = (&p.a * &x - &p.b).map(|v| v.min(0.0));
        self.v_lambda_m = &p.c
            - p.a.transpose() * (&p.b + &self.r_m) * (2.0 * self.lambda)
            - p.e.transpose() * &p.d * (2.0 * self.lambda);
        Ok(())
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn h_lambda(&self) -> &DMatrix<f64> {
        &self.h_lambda
    }

    pub fn v_lambda_m(&self) -> &DVector<f64> {
        &self.v_lambda_m
    }

    pub fn r_m(&self) -> &DVector<f64> {
        &self.r_m
    }
}

/// One closed-form multiplicative MM update.
///
/// With `h+_i` and `h-_i` the positive and negative parts of row `i` of
/// `H_lambda` against `x_m`, the new coordinate is the positive root of the
/// coordinate surrogate:
///
/// ```text
/// x_i <- (x_mi / 2) [ -v_i/h+_i + sqrt((v_i/h+_i)^2 - 4 h-_i/h+_i) ]
/// ```
///
/// collapsing to `x_mi * max(-v_i/h+_i, eps_floor)` when `h-_i = 0`; the
/// floor keeps boundary-bound coordinates positive.
pub fn qp_update(
    x_m: &PositivePoint,
    state: &PenalizedQpState,
    eps_floor: f64,
) -> Result<PositivePoint> {
    let n = x_m.dimension();
    if state.h_lambda.nrows() != n {
        return Err(Error::DimensionMismatch {
            expected: state.h_lambda.nrows(),
            found: n,
        });
    }
    let x = x_m.coords();
    let mut next = vec![0.0; n];
    for i in 0..n {
        let mut h_plus = 0.0;
        let mut h_minus = 0.0;
        for (j, &xj) in x.iter().enumerate() {
            let h = state.h_lambda[(i, j)];
            if h > 0.0 {
                h_plus += h * xj;
            } else if h < 0.0 {
                h_minus += h * xj;
            }
        }
        if h_plus <= 0.0 {
            return Err(Error::QpHplusZero { coordinate: i });
        }
        let ratio = state.v_lambda_m[i] / h_plus;
        next[i] = if h_minus < 0.0 {
            let discriminant = ratio * ratio - 4.0 * h_minus / h_plus;
            debug_assert!(discriminant >= 0.0);
            0.5 * x[i] * (-ratio + discriminant.sqrt())
        } else {
            x[i] * (-ratio).max(eps_floor)
        };
    }
    PositivePoint::new(next)
}

/// `f_lambda(x) = 1/2 x^T Q x + c^T x + lambda |(Ax-b)_+|^2 + lambda |Ex-d|^2`.
pub fn qp_penalized_value(p: &QpProblem, lambda: f64, x: &PositivePoint) -> Result<f64> {
    if x.dimension() != p.dimension() {
        return Err(Error::DimensionMismatch {
            expected: p.dimension(),
            found: x.dimension(),
        });
    }
    let xv = DVector::from_row_slice(x.coords());
    let mut v = 0.5 * (xv.transpose() * &p.q * &xv)[(0, 0)] + p.c.dot(&xv);
    if p.a.nrows() > 0 {
        let r = (&p.a * &xv - &p.b).map(|t| t.max(0.0));
        v += lambda * r.norm_squared();
    }
    if p.e.nrows() > 0 {
        let r = &p.e * &xv - &p.d;
        v += lambda * r.norm_squared();
    }
    Ok(v)
}

/// One recorded iterate of a penalized QP stage.
#[derive(Debug, Clone, PartialEq)]
pub struct QpIterationRecord {
    pub point: PositivePoint,
    pub penalized_value: f64,
    pub accelerated: bool,
}

/// One stage of a penalized QP run.
#[derive(Debug, Clone, PartialEq)]
pub struct QpStage {
    pub lambda: f64,
    pub iterations: usize,
    pub solution: PositivePoint,
    pub penalized_value: f64,
    /// Set when the stage was abandoned because some `h+_i` vanished; the
    /// solver then advances to the next penalty constant.
    pub skipped: bool,
    /// Per-iteration iterates and penalized objective values.
    pub records: Vec<QpIterationRecord>,
}

/// The full output of [`solve_qp`].
#[derive(Debug, Clone, PartialEq)]
pub struct QpRun {
    pub stages: Vec<QpStage>,
    pub final_point: PositivePoint,
}

/// Minimize the penalized objectives along the schedule, warm-starting each
/// stage. Stage `lambda` iterates [`qp_update`] until the relative change of
/// `f_lambda` drops below the stage epsilon. Secant acceleration follows the
/// schedule's solver configuration.
pub fn solve_qp(
    p: &QpProblem,
    x0: &PositivePoint,
    schedule: &PenaltySchedule,
    eps_floor: f64,
) -> Result<QpRun> {
    if x0.dimension() != p.dimension() {
        return Err(Error::DimensionMismatch {
            expected: p.dimension(),
            found: x0.dimension(),
        });
    }
    if !(eps_floor > 0.0) {
        return Err(Error::InvalidCoefficient(eps_floor));
    }
    let cfg = &schedule.inner;
    let q = cfg.acceleration_q;
    let mut current = x0.clone();
    let mut stages = Vec::new();
    let mut last_error = None;
    for &lambda in schedule.lambdas() {
        let mut state = PenalizedQpState::new(p, lambda, &current)?;
        let mut x = current.clone();
        let mut value = qp_penalized_value(p, lambda, &x)?;
        let mut iterations = 0;
        let mut skipped = false;
        let mut records = Vec::new();
        'stage: for _ in 0..cfg.max_iterations {
            let mut accelerated = false;
            let step = if q == 0 {
                state.refresh(p, &x)?;
                match qp_update(&x, &state, eps_floor) {
                    Ok(next) => next,
                    Err(e @ Error::QpHplusZero { .. }) => {
                        skipped = true;
                        last_error = Some(e);
                        break 'stage;
                    }
                    Err(e) => return Err(e),
                }
            } else {
                // Plain substeps, then one secant extrapolation over the last
                // q+1 anchors, accepted only on descent of f_lambda.
                let substeps = cfg.acceleration_warmup.max(q + 1);
                let mut anchors = vec![x.clone()];
                for _ in 0..substeps {
                    state.refresh(p, anchors.last().unwrap())?;
                    match qp_update(anchors.last().unwrap(), &state, eps_floor) {
                        Ok(next) => anchors.push(next),
                        Err(e @ Error::QpHplusZero { .. }) => {
                            skipped = true;
                            last_error = Some(e);
                            break 'stage;
                        }
                        Err(e) => return Err(e),
                    }
                }
                let plain = anchors[substeps].clone();
                let pairs: Vec<(PositivePoint, PositivePoint)> = (substeps - q - 1..substeps)
                    .map(|j| (anchors[j].clone(), anchors[j + 1].clone()))
                    .collect();
                match accelerate(&pairs) {
                    Some(candidate)
                        if qp_penalized_value(p, lambda, &candidate)?
                            <= qp_penalized_value(p, lambda, &plain)? =>
                    {
                        accelerated = true;
                        candidate
                    }
                    _ => plain,
                }
            };
            let next_value = qp_penalized_value(p, lambda, &step)?;
            iterations += 1;
            records.push(QpIterationRecord {
                point: step.clone(),
                penalized_value: next_value,
                accelerated,
            });
            let converged = (value - next_value) / (value.abs() + 1.0) <= cfg.epsilon;
            x = step;
            value = next_value;
            if converged || !value.is_finite() {
                break;
            }
        }
        stages.push(QpStage {
            lambda,
            iterations,
            solution: x.clone(),
            penalized_value: value,
            skipped,
            records,
        });
        if !skipped && schedule.warm_start {
            current = x;
        }
    }
    if stages.iter().all(|s| s.skipped) {
        return Err(last_error.unwrap_or(Error::QpHplusZero { coordinate: 0 }));
    }
    Ok(QpRun {
        stages,
        final_point: current,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::driver::SolverConfig;
    use approx::assert_relative_eq;

    fn point(coords: &[f64]) -> PositivePoint {
        PositivePoint::new(coords.to_vec()).unwrap()
    }

    #[test]
    fn unconstrained_stationary_point_is_fixed() {
        // Q = 2I, c = (-2,-2): minimum at (1,1); the update must not move it.
        let p = QpProblem::new(
            DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 2.0]),
            DVector::from_row_slice(&[-2.0, -2.0]),
            None,
            None,
        )
        .unwrap();
        let x = point(&[1.0, 1.0]);
        let state = PenalizedQpState::new(&p, 0.0, &x).unwrap();
        let next = qp_update(&x, &state, 1e-9).unwrap();
        assert_relative_eq!(next.coords()[0], 1.0, epsilon = 1e-15);
        assert_relative_eq!(next.coords()[1], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn f10_table_terminus_is_numerically_fixed() {
        // (2/3, 4/3) is the lambda -> infinity limit; at lambda = 2^17 the
        // stationary point sits ~7e-6 away, so one update moves the limit
        // point by only its O(1/lambda) bias.
        let p = crate::problems::f10();
        let x = point(&[2.0 / 3.0, 4.0 / 3.0]);
        let state = PenalizedQpState::new(&p, 131072.0, &x).unwrap();
        let next = qp_update(&x, &state, 1e-9).unwrap();
        assert!((next.coords()[0] - x.coords()[0]).abs() < 1e-5);
        assert!((next.coords()[1] - x.coords()[1]).abs() < 1e-5);
        // The exact stage-lambda stationary point is a fixed point to
        // machine precision (both active-constraint rows enter the clamp).
        let xs = point(&[0.6666740134843231, 1.3333378544533836]);
        let state = PenalizedQpState::new(&p, 131072.0, &xs).unwrap();
        let fixed = qp_update(&xs, &state, 1e-9).unwrap();
        assert!((fixed.coords()[0] - xs.coords()[0]).abs() < 1e-12);
        assert!((fixed.coords()[1] - xs.coords()[1]).abs() < 1e-12);
    }

    #[test]
    fn descent_of_penalized_value_along_updates() {
        let p = crate::problems::f10();
        let lambda = 8.0;
        let mut x = point(&[1.0, 1.0]);
        let mut state = PenalizedQpState::new(&p, lambda, &x).unwrap();
        let mut value = qp_penalized_value(&p, lambda, &x).unwrap();
        for _ in 0..50 {
            state.refresh(&p, &x).unwrap();
            let next = qp_update(&x, &state, 1e-9).unwrap();
            let next_value = qp_penalized_value(&p, lambda, &next).unwrap();
            assert!(next_value <= value + 1e-12 * (1.0 + value.abs()));
            x = next;
            value = next_value;
        }
    }

    #[test]
    fn penalized_value_counts_only_violations() {
        let p = crate::problems::f10();
        // (2/3, 4/3) satisfies all three constraints: value equals f.
        let x = point(&[2.0 / 3.0, 4.0 / 3.0]);
        let plain = qp_penalized_value(&p, 0.0, &x).unwrap();
        for lambda in [1.0, 64.0, 131072.0] {
            assert_relative_eq!(
                qp_penalized_value(&p, lambda, &x).unwrap(),
                plain,
                epsilon = 1e-12
            );
        }
        // violating only the first constraint by delta adds lambda * delta^2
        let delta = 0.05;
        let xv = point(&[0.85, 1.2]);
        let base = qp_penalized_value(&p, 0.0, &xv).unwrap();
        assert_relative_eq!(
            qp_penalized_value(&p, 4.0, &xv).unwrap(),
            base + 4.0 * delta * delta,
            epsilon = 1e-12
        );
    }

    #[test]
    fn f10_run_reaches_constrained_minimum() {
        let p = crate::problems::f10();
        let schedule = PenaltySchedule::powers_of_two(
            0,
            17,
            SolverConfig {
                max_iterations: 100_000,
                ..SolverConfig::default()
            },
        )
        .unwrap();
        let run = solve_qp(&p, &point(&[1.0, 1.0]), &schedule, 1e-9).unwrap();
        let x = run.final_point.coords();
        assert!((x[0] - 2.0 / 3.0).abs() < 1e-3, "x1 = {}", x[0]);
        assert!((x[1] - 4.0 / 3.0).abs() < 1e-3, "x2 = {}", x[1]);
        assert_eq!(run.stages.len(), 18);
    }

    #[test]
    fn indefinite_q_skips_stages_until_penalty_dominates() {
        // Q with a nonpositive row of positives: row sums force h+ = 0 at
        // lambda = 0 ... use Q = -I and a constraint system that fixes it.
        let p = QpProblem::new(
            DMatrix::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, -1.0]),
            DVector::from_row_slice(&[1.0, 1.0]),
            Some((
                DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 1.0]),
                DVector::from_row_slice(&[2.0, 2.0]),
            )),
            None,
        )
        .unwrap();
        // tiny lambda: H = -I + 2 lambda I has negative diagonal, h+ = 0
        let schedule = PenaltySchedule::new(
            vec![0.125, 4.0, 8.0, 16.0, 32.0, 64.0],
            SolverConfig {
                max_iterations: 10_000,
                ..SolverConfig::default()
            },
        )
        .unwrap();
        // start inside the basin of the interior penalized minimizer
        let run = solve_qp(&p, &point(&[3.0, 3.0]), &schedule, 1e-9).unwrap();
        assert!(run.stages[0].skipped);
        assert!(!run.stages[1].skipped);
        // minimize -1/2|x|^2 + 1^T x with x <= 2: pushed onto x = 2 as lambda grows
        let x = run.final_point.coords();
        assert!((x[0] - 2.0).abs() < 0.05, "x1 = {}", x[0]);
    }

    #[test]
    fn discriminant_stays_nonnegative_on_mixed_sign_updates() {
        let p = QpProblem::new(
            DMatrix::from_row_slice(2, 2, &[2.0, -1.5, -1.5, 3.0]),
            DVector::from_row_slice(&[-1.0, -2.0]),
            None,
            None,
        )
        .unwrap();
        let mut x = point(&[3.0, 0.2]);
        let mut state = PenalizedQpState::new(&p, 0.0, &x).unwrap();
        for _ in 0..200 {
            state.refresh(&p, &x).unwrap();
            x = qp_update(&x, &state, 1e-9).unwrap();
            assert!(x.coords().iter().all(|&v| v > 0.0));
        }
    }
}
