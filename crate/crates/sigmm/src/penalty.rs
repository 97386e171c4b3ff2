//! Quadratic-penalty method for constrained signomial programs.
//!
//! Equality constraints `r_i(x) = 0` and inequality constraints
//! `s_j(x) <= 0` are folded into the objective as
//!
//! ```text
//! f_lambda(x) = f(x) + lambda sum_i r_i(x)^2 + lambda sum_j max(s_j(x), 0)^2
//! ```
//!
//! and `f_lambda` is decreased by the MM driver for an increasing schedule of
//! penalty constants. The squares `r_i^2` are signomials and majorize like
//! any other; the hinge squares switch between `[s(x) - s(x_m)]^2` and
//! `s(x)^2` depending on the sign of `s(x_m)`, so the stage surrogate is
//! rebuilt at every anchor.

use crate::driver::{solve_problem, IterationTrace, MmProblem, Outcome, SolverConfig};
use crate::error::{Error, Result};
use crate::signomial::{CompositeObjective, PositivePoint, Signomial};
use crate::surrogate::{build_surrogate, merge_coordinates, SurrogateCoordinate};

/// Strictly increasing penalty constants plus the per-stage solver
/// configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct PenaltySchedule {
    lambdas: Vec<f64>,
    pub inner: SolverConfig,
    pub warm_start: bool,
    /// Stop growing the penalty once successive stage solutions move less
    /// than this (infinity norm).
    pub stabilization_tolerance: f64,
}

impl PenaltySchedule {
    pub fn new(lambdas: Vec<f64>, inner: SolverConfig) -> Result<Self> {
        if lambdas.is_empty() || lambdas[0] <= 0.0 {
            return Err(Error::InvalidCoefficient(*lambdas.first().unwrap_or(&0.0)));
        }
        if lambdas.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidCoefficient(0.0));
        }
        Ok(PenaltySchedule {
            lambdas,
            inner,
            warm_start: true,
            stabilization_tolerance: 1e-6,
        })
    }

    /// The schedule `lambda = 2^k` for `k0 <= k <= k1`.
    pub fn powers_of_two(k0: i32, k1: i32, inner: SolverConfig) -> Result<Self> {
        if k1 < k0 {
            return Err(Error::InvalidCoefficient(k1 as f64));
        }
        PenaltySchedule::new((k0..=k1).map(|k| 2f64.powi(k)).collect(), inner)
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }
}

impl Default for PenaltySchedule {
    fn default() -> Self {
        let inner = SolverConfig {
            max_iterations: 500,
            ..SolverConfig::default()
        };
        PenaltySchedule::powers_of_two(0, 17, inner).expect("valid default schedule")
    }
}

/// A constrained signomial program in penalty form.
#[derive(Debug, Clone, PartialEq)]
pub struct PenaltyProblem {
    objective: CompositeObjective,
    equalities: Vec<Signomial>,
    inequalities: Vec<Signomial>,
    schedule: PenaltySchedule,
}

impl PenaltyProblem {
    pub fn new(objective: CompositeObjective, schedule: PenaltySchedule) -> Self {
        PenaltyProblem {
            objective,
            equalities: Vec::new(),
            inequalities: Vec::new(),
            schedule,
        }
    }

    /// Add an equality constraint `r(x) = 0`. The signomial must already have
    /// nonnegative exponents; [`Signomial::normalize_constraint`] produces
    /// this form from `h(x) = 1`.
    pub fn with_equality(mut self, r: Signomial) -> Result<Self> {
        self.check_dim(&r)?;
        if let Some(&e) = r
            .terms()
            .iter()
            .flat_map(|t| t.exponents().iter())
            .find(|&&e| e < 0.0)
        {
            return Err(Error::InvalidExponent(e));
        }
        self.equalities.push(r);
        Ok(self)
    }

    /// Add an equality constraint given as `h(x) = 1`; normalized on entry.
    pub fn with_equality_from_unit(self, h: Signomial) -> Result<Self> {
        let r = h.normalize_constraint();
        self.with_equality(r)
    }

    /// Add an inequality constraint `s(x) <= 0`, used as given.
    pub fn with_inequality(mut self, s: Signomial) -> Result<Self> {
        self.check_dim(&s)?;
        self.inequalities.push(s);
        Ok(self)
    }

    /// Add an inequality constraint given as `u(x) <= 1`; rewritten to
    /// `r(x) <= 0` with nonnegative exponents.
    pub fn with_inequality_from_unit(self, u: Signomial) -> Result<Self> {
        let s = u.normalize_constraint();
        self.with_inequality(s)
    }

    fn check_dim(&self, s: &Signomial) -> Result<()> {
        if s.dimension() != self.objective.dimension() {
            return Err(Error::DimensionMismatch {
                expected: self.objective.dimension(),
                found: s.dimension(),
            });
        }
        Ok(())
    }

    pub fn objective(&self) -> &CompositeObjective {
        &self.objective
    }

    pub fn equalities(&self) -> &[Signomial] {
        &self.equalities
    }

    pub fn inequalities(&self) -> &[Signomial] {
        &self.inequalities
    }

    pub fn schedule(&self) -> &PenaltySchedule {
        &self.schedule
    }

    /// The evaluator of `f_lambda`.
    pub fn penalized_objective(&self, lambda: f64) -> Result<PenalizedObjective> {
        if !(lambda > 0.0) {
            return Err(Error::InvalidCoefficient(lambda));
        }
        Ok(PenalizedObjective {
            base: self.objective.clone(),
            equality_squares: self.equalities.iter().map(Signomial::square).collect(),
            inequalities: self.inequalities.clone(),
            lambda,
        })
    }

    /// Total constraint violation `sum r_i(x)^2 + sum max(s_j(x), 0)^2`.
    pub fn constraint_violation(&self, x: &PositivePoint) -> Result<f64> {
        let mut v = 0.0;
        for r in &self.equalities {
            v += r.evaluate(x)?.powi(2);
        }
        for s in &self.inequalities {
            v += s.evaluate(x)?.max(0.0).powi(2);
        }
        Ok(v)
    }

    /// Run the penalty method: one MM stage per penalty constant, each
    /// warm-started from the previous solution.
    ///
    /// The schedule stops early once successive stage solutions agree to the
    /// stabilization tolerance, and immediately after any stage that the
    /// driver declares divergent.
    pub fn solve_constrained(&self, x0: &PositivePoint) -> Result<ConstrainedRun> {
        if x0.dimension() != self.objective.dimension() {
            return Err(Error::DimensionMismatch {
                expected: self.objective.dimension(),
                found: x0.dimension(),
            });
        }
        let equality_squares: Vec<Signomial> =
            self.equalities.iter().map(Signomial::square).collect();
        let mut stages = Vec::new();
        let mut current = x0.clone();
        let mut stabilized = false;
        for &lambda in &self.schedule.lambdas {
            let stage = StageObjective {
                problem: self,
                equality_squares: &equality_squares,
                lambda,
            };
            let trace = solve_problem(&stage, &current, &self.schedule.inner)?;
            let solution = trace.final_point().clone();
            let diverged = matches!(trace.outcome(), Outcome::Diverged(_));
            let moved = solution
                .coords()
                .iter()
                .zip(current.coords())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            stages.push(PenaltyStage { lambda, trace });
            if self.schedule.warm_start {
                current = solution;
            }
            if diverged {
                break;
            }
            if stages.len() > 1 && moved <= self.schedule.stabilization_tolerance {
                stabilized = true;
                break;
            }
        }
        Ok(ConstrainedRun {
            final_point: current,
            stages,
            stabilized,
        })
    }
}

/// Evaluator for a fixed penalty constant.
#[derive(Debug, Clone, PartialEq)]
pub struct PenalizedObjective {
    base: CompositeObjective,
    equality_squares: Vec<Signomial>,
    inequalities: Vec<Signomial>,
    lambda: f64,
}

impl PenalizedObjective {
    pub fn value(&self, x: &PositivePoint) -> Result<f64> {
        if x.dimension() != self.base.dimension() {
            return Err(Error::DimensionMismatch {
                expected: self.base.dimension(),
                found: x.dimension(),
            });
        }
        Ok(penalized_value_log(
            &self.base,
            &self.equality_squares,
            &self.inequalities,
            self.lambda,
            &x.log_coords(),
        ))
    }
}

fn penalized_value_log(
    base: &CompositeObjective,
    equality_squares: &[Signomial],
    inequalities: &[Signomial],
    lambda: f64,
    y: &[f64],
) -> f64 {
    let mut v = base.value_log(y);
    for rsq in equality_squares {
        v += lambda * rsq.eval_log(y);
    }
    for s in inequalities {
        let sv = s.eval_log(y).max(0.0);
        v += lambda * sv * sv;
    }
    v
}

/// The hinge-square majorizer: `[s(x) - s(x_m)]^2` when `s(x_m) < 0`,
/// otherwise `s(x)^2`. Dominates `max(s(x), 0)^2` with equality at the anchor.
pub fn majorize_hinge_square(s: &Signomial, x_m: &PositivePoint) -> Result<Signomial> {
    let anchor_value = s.evaluate(x_m)?;
    if anchor_value < 0.0 {
        Ok(s.add_constant(-anchor_value)?.square())
    } else {
        Ok(s.square())
    }
}

/// One stage of a constrained run.
#[derive(Debug, Clone, PartialEq)]
pub struct PenaltyStage {
    pub lambda: f64,
    pub trace: IterationTrace,
}

impl PenaltyStage {
    pub fn solution(&self) -> &PositivePoint {
        self.trace.final_point()
    }
}

/// The full output of [`PenaltyProblem::solve_constrained`].
#[derive(Debug, Clone, PartialEq)]
pub struct ConstrainedRun {
    pub stages: Vec<PenaltyStage>,
    pub final_point: PositivePoint,
    /// True when the schedule stopped early because stage solutions stopped
    /// moving; false when it ran to exhaustion or a stage diverged.
    pub stabilized: bool,
}

impl ConstrainedRun {
    /// Outcome of the last executed stage.
    pub fn last_outcome(&self) -> Option<&Outcome> {
        self.stages.last().map(|s| s.trace.outcome())
    }
}

/// The penalized objective at one penalty constant, majorized by rebuilding
/// the hinge squares at every anchor.
struct StageObjective<'a> {
    problem: &'a PenaltyProblem,
    equality_squares: &'a [Signomial],
    lambda: f64,
}

impl MmProblem for StageObjective<'_> {
    fn dimension(&self) -> usize {
        self.problem.objective.dimension()
    }

    fn objective_log(&self, y: &[f64]) -> f64 {
        penalized_value_log(
            &self.problem.objective,
            self.equality_squares,
            &self.problem.inequalities,
            self.lambda,
            y,
        )
    }

    fn surrogate_log(&self, y: &[f64]) -> (Vec<SurrogateCoordinate>, f64) {
        let (mut coords, mut offset) = build_surrogate(&self.problem.objective, y);
        let n = y.len();
        let mut extras = Signomial::zero(n).expect("n >= 1");
        for rsq in self.equality_squares {
            extras = extras.add(rsq).expect("same dimension");
        }
        for s in &self.problem.inequalities {
            let anchor_value = s.eval_log(y);
            let hinge = if anchor_value < 0.0 {
                s.add_constant(-anchor_value).expect("finite")
            } else {
                s.clone()
            };
            extras = extras.add(&hinge.square()).expect("same dimension");
        }
        if !extras.is_empty() {
            let scaled = extras.scale(self.lambda).expect("finite lambda");
            let (pen_coords, pen_offset) = build_surrogate(&CompositeObjective::plain(scaled), y);
            coords = merge_coordinates(coords, pen_coords);
            offset += pen_offset;
        }
        (coords, offset)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::toy_equality_program;
    use approx::assert_relative_eq;

    fn point(coords: &[f64]) -> PositivePoint {
        PositivePoint::new(coords.to_vec()).unwrap()
    }

    #[test]
    fn penalized_objective_with_no_constraints_is_the_objective() {
        let (f, _) = toy_equality_program();
        let p = PenaltyProblem::new(f.clone(), PenaltySchedule::default());
        let e = p.penalized_objective(4.0).unwrap();
        let x = point(&[1.5, 0.5]);
        assert_relative_eq!(e.value(&x).unwrap(), f.value(&x).unwrap());
    }

    #[test]
    fn penalized_objective_counts_equality_violation() {
        // r = x1^2 + x2^2 - x1 x2^2, lambda = 1, x = (1, 1): f + (1 + 1 - 1)^2
        let (f, _) = toy_equality_program();
        let r = Signomial::from_terms(
            2,
            &[(1.0, &[2.0, 0.0]), (1.0, &[0.0, 2.0]), (-1.0, &[1.0, 2.0])],
        )
        .unwrap();
        let p = PenaltyProblem::new(f.clone(), PenaltySchedule::default())
            .with_equality(r)
            .unwrap();
        let x = point(&[1.0, 1.0]);
        let e = p.penalized_objective(1.0).unwrap();
        assert_relative_eq!(
            e.value(&x).unwrap(),
            f.value(&x).unwrap() + 1.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn inactive_inequality_adds_nothing() {
        let (f, _) = toy_equality_program();
        let s = Signomial::from_terms(2, &[(1.0, &[1.0, 0.0]), (-2.0, &[0.0, 0.0])]).unwrap();
        let p = PenaltyProblem::new(f.clone(), PenaltySchedule::default())
            .with_inequality(s)
            .unwrap();
        let x = point(&[1.0, 1.0]);
        let e = p.penalized_objective(8.0).unwrap();
        assert_relative_eq!(e.value(&x).unwrap(), f.value(&x).unwrap());
    }

    #[test]
    fn equality_with_negative_exponent_rejected() {
        let (f, _) = toy_equality_program();
        let raw = Signomial::from_terms(2, &[(1.0, &[-1.0, 0.0]), (-1.0, &[0.0, 0.0])]).unwrap();
        let err = PenaltyProblem::new(f, PenaltySchedule::default()).with_equality(raw);
        assert!(err.is_err());
    }

    #[test]
    fn hinge_majorizer_tangent_at_boundary() {
        // s(x) = x1 - 2 at x_m = 1: returns (x1 - 1)^2, zero at the anchor.
        let s = Signomial::from_terms(1, &[(1.0, &[1.0]), (-2.0, &[0.0])]).unwrap();
        let xm = point(&[1.0]);
        let m = majorize_hinge_square(&s, &xm).unwrap();
        assert_relative_eq!(m.evaluate(&xm).unwrap(), 0.0);
        let expected =
            Signomial::from_terms(1, &[(1.0, &[2.0]), (-2.0, &[1.0]), (1.0, &[0.0])]).unwrap();
        assert_eq!(m, expected);
    }

    #[test]
    fn hinge_majorizer_active_branch_is_plain_square() {
        let s = Signomial::from_terms(1, &[(1.0, &[1.0]), (-2.0, &[0.0])]).unwrap();
        let xm = point(&[5.0]);
        let m = majorize_hinge_square(&s, &xm).unwrap();
        assert_eq!(m, s.square());
        // at the anchor: s(x_m)^2 = max(s, 0)^2 since s(x_m) > 0
        assert_relative_eq!(m.evaluate(&xm).unwrap(), 9.0, epsilon = 1e-12);
    }

    #[test]
    fn hinge_majorizer_dominates_hinge_square() {
        use rand::{Rng, SeedableRng};
        // s(x) = x1 + x2 - 4 over random pairs: the anchored majorizer must
        // dominate max(s, 0)^2 everywhere.
        let s = Signomial::from_terms(
            2,
            &[(1.0, &[1.0, 0.0]), (1.0, &[0.0, 1.0]), (-4.0, &[0.0, 0.0])],
        )
        .unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x41b3);
        for _ in 0..100 {
            let sample = |rng: &mut rand_chacha::ChaCha8Rng| {
                point(&[
                    0.1 + 5.0 * rng.random::<f64>(),
                    0.1 + 5.0 * rng.random::<f64>(),
                ])
            };
            let xm = sample(&mut rng);
            let x = sample(&mut rng);
            let m = majorize_hinge_square(&s, &xm).unwrap();
            let hinge_sq = s.evaluate(&x).unwrap().max(0.0).powi(2);
            assert!(
                m.evaluate(&x).unwrap() >= hinge_sq - 1e-10,
                "majorizer below the hinge square at {:?}",
                x.coords()
            );
            // tangency: equality at the anchor
            let at_anchor = s.evaluate(&xm).unwrap().max(0.0).powi(2);
            assert!((m.evaluate(&xm).unwrap() - at_anchor).abs() <= 1e-12 * (1.0 + at_anchor));
        }
    }

    #[test]
    fn toy_program_reaches_analytic_solution() {
        let (f, r) = toy_equality_program();
        // The lambda = 1 stage of this program has its infimum on the
        // boundary; start the schedule at 2 where the stage minimum is interior.
        let schedule = PenaltySchedule::powers_of_two(
            1,
            17,
            SolverConfig {
                max_iterations: 500,
                ..SolverConfig::default()
            },
        )
        .unwrap();
        let p = PenaltyProblem::new(f, schedule).with_equality(r).unwrap();
        let run = p.solve_constrained(&point(&[2.0, 0.3])).unwrap();
        let x = run.final_point.coords();
        assert!((x[0] - 1.0).abs() <= 1e-3, "x1 = {}", x[0]);
        assert!((x[1] - 1.0).abs() <= 1e-3, "x2 = {}", x[1]);
    }

    #[test]
    fn feasibility_improves_along_schedule() {
        let (f, r) = toy_equality_program();
        let schedule = PenaltySchedule::powers_of_two(
            1,
            17,
            SolverConfig {
                max_iterations: 500,
                ..SolverConfig::default()
            },
        )
        .unwrap();
        let p = PenaltyProblem::new(f, schedule).with_equality(r).unwrap();
        let run = p.solve_constrained(&point(&[2.0, 2.0])).unwrap();
        let violations: Vec<f64> = run
            .stages
            .iter()
            .map(|s| p.constraint_violation(s.solution()).unwrap())
            .collect();
        for w in violations.windows(2) {
            assert!(w[1] <= w[0] + 1e-10, "violations {violations:?}");
        }
    }

    #[test]
    fn unconstrained_penalty_run_matches_plain_solve() {
        let f = crate::problems::f1();
        let p = PenaltyProblem::new(f.clone(), PenaltySchedule::default());
        let run = p.solve_constrained(&point(&[1.0, 2.0])).unwrap();
        let direct = crate::driver::solve(
            &f,
            &point(&[1.0, 2.0]),
            &SolverConfig {
                max_iterations: 500,
                ..SolverConfig::default()
            },
        )
        .unwrap();
        // lambda is irrelevant without constraints: stage 1 replays the plain
        // trace exactly, later stages only polish until movement stabilizes.
        assert_eq!(run.stages[0].trace.records(), direct.records());
        assert!(run.stabilized);
        let a = run.final_point.coords();
        let b = direct.final_point().coords();
        assert!((a[0] - b[0]).abs() < 1e-4);
        assert!((a[1] - b[1]).abs() < 1e-4);
    }
}
