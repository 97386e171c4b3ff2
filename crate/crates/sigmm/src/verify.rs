//! Regression suites against the published results for the bundled problems.
//!
//! Five named suites drive every reproduction target: the unconstrained
//! example table (`table1`), the two penalized quadratic programs (`table2`,
//! `table3`), the majorization property sweep (`majorization`), and the
//! independent-oracle cross-checks (`oracles`). Each suite returns one
//! [`CheckItem`] per assertion so callers can print measured-versus-expected
//! lines; the acceptance tests require every item to pass.

use crate::diagnostics::{
    check_bounded_below, check_coercive, check_strict_convexity, BoundedBelow, Coercivity,
};
use crate::driver::{solve, Outcome, SolverConfig};
use crate::error::Result;
use crate::oracle::{
    closed_form_update, finite_difference_gradient, grid_minimize, relative_steps,
    ClosedFormUpdate, GridSpec,
};
use crate::penalty::{PenaltyProblem, PenaltySchedule};
use crate::problems;
use crate::signomial::{CompositeObjective, PositivePoint};
use crate::surrogate::majorize;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// One named assertion with its measured and expected values.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckItem {
    pub name: String,
    pub passed: bool,
    pub measured: String,
    pub expected: String,
}

impl CheckItem {
    fn new(name: impl Into<String>, passed: bool, measured: String, expected: String) -> Self {
        CheckItem {
            name: name.into(),
            passed,
            measured,
            expected,
        }
    }
}

/// A suite's worth of checks.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub suite: String,
    pub items: Vec<CheckItem>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.items.iter().all(|i| i.passed)
    }

    pub fn failures(&self) -> Vec<&CheckItem> {
        self.items.iter().filter(|i| !i.passed).collect()
    }
}

/// Suite names accepted by [`run_suite`].
pub const SUITE_NAMES: [&str; 5] = ["table1", "table2", "table3", "majorization", "oracles"];

pub fn run_suite(name: &str) -> Result<SuiteReport> {
    match name {
        "table1" => table1(),
        "table2" => table2(),
        "table3" => table3(),
        "majorization" => majorization(),
        "oracles" => oracles(),
        other => Err(crate::error::Error::UnknownTestFunction(other.to_string())),
    }
}

fn point(coords: &[f64]) -> PositivePoint {
    PositivePoint::new(coords.to_vec()).expect("valid point")
}

fn fmt_point(p: &PositivePoint) -> String {
    let parts: Vec<String> = p.coords().iter().map(|c| format!("{c:.4}")).collect();
    format!("({})", parts.join(", "))
}

fn close(a: &PositivePoint, b: &[f64], tol: f64) -> bool {
    a.coords().len() == b.len() && a.coords().iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}

fn monotone_nonincreasing(values: &[f64]) -> bool {
    values
        .windows(2)
        .all(|w| w[1] <= w[0] + 1e-12 * (1.0 + w[0].abs()))
}

/// The unconstrained example table plus the acceleration benchmark.
pub fn table1() -> Result<SuiteReport> {
    let mut items = Vec::new();
    let cfg = SolverConfig::default();

    // f1: unique minimum
    let t = solve(&problems::f1(), &point(&[1.0, 2.0]), &cfg)?;
    items.push(CheckItem::new(
        "f1 point",
        close(t.final_point(), &[1.4310, 1.4310], 1e-3),
        fmt_point(t.final_point()),
        "(1.4310, 1.4310) +/- 1e-3".into(),
    ));
    items.push(CheckItem::new(
        "f1 value",
        (t.final_objective() - 3.4128).abs() <= 1e-3,
        format!("{:.4}", t.final_objective()),
        "3.4128 +/- 1e-3".into(),
    ));
    items.push(CheckItem::new(
        "f1 iterations",
        (t.iterations() as i64 - 38).abs() <= 10,
        t.iterations().to_string(),
        "38 +/- 10".into(),
    ));

    // f2: continuum of minima, immediate convergence
    let t = solve(&problems::f2(), &point(&[1.0, 2.0]), &cfg)?;
    let x = t.final_point().coords();
    items.push(CheckItem::new(
        "f2 value",
        (t.final_objective() - 2.0).abs() <= 1e-6,
        format!("{:.7}", t.final_objective()),
        "2.0000000 +/- 1e-6".into(),
    ));
    items.push(CheckItem::new(
        "f2 on constraint curve",
        (x[0] * x[1] * x[1] - 1.0).abs() <= 1e-6,
        format!("x1 x2^2 = {:.7}", x[0] * x[1] * x[1]),
        "1 +/- 1e-6".into(),
    ));
    items.push(CheckItem::new(
        "f2 iterations",
        t.iterations() <= 3,
        t.iterations().to_string(),
        "<= 3".into(),
    ));

    // f3: divergence toward the value 0
    let t = solve(&problems::f3(), &point(&[1.0, 1.0]), &cfg)?;
    items.push(CheckItem::new(
        "f3 outcome",
        matches!(t.outcome(), Outcome::Diverged(_)),
        format!("{:?}", t.outcome()),
        "Diverged".into(),
    ));
    items.push(CheckItem::new(
        "f3 objective decreasing toward 0",
        monotone_nonincreasing(&t.objectives())
            && t.final_objective() >= 0.0
            && t.final_objective() <= 1e-2,
        format!(
            "final {:.2e}, monotone {}",
            t.final_objective(),
            monotone_nonincreasing(&t.objectives())
        ),
        "monotone, final in [0, 1e-2]".into(),
    ));

    // f4: value reaches the continuum; the published point is not a fixed
    // point of the published updates, so the point row records the mismatch.
    let t = solve(&problems::f4(), &point(&[0.1, 0.2, 0.3, 0.4]), &cfg)?;
    items.push(CheckItem::new(
        "f4 value",
        t.final_objective().abs() <= 1e-10,
        format!("{:.2e}", t.final_objective()),
        "<= 1e-10".into(),
    ));
    items.push(CheckItem::new(
        "f4 point",
        close(t.final_point(), &[0.1596, 0.3191, 0.1954, 0.2606], 1e-3),
        fmt_point(t.final_point()),
        "(0.1596, 0.3191, 0.1954, 0.2606) +/- 1e-3".into(),
    ));

    // f5 from equal components: the saddle point
    let t = solve(&problems::f5(), &point(&[1.0, 1.0, 1.0]), &cfg)?;
    let saddle = 1.0 / 6f64.sqrt();
    items.push(CheckItem::new(
        "f5 saddle point",
        close(t.final_point(), &[saddle, saddle, saddle], 1e-4),
        fmt_point(t.final_point()),
        "(0.4082, 0.4082, 0.4082) +/- 1e-4".into(),
    ));
    items.push(CheckItem::new(
        "f5 saddle value",
        (t.final_objective() - 0.2973).abs() <= 1e-3,
        format!("{:.4}", t.final_objective()),
        "0.2973 +/- 1e-3".into(),
    ));

    // f5 from unequal components: unbounded descent
    let wild = SolverConfig {
        divergence_coordinate_bounds: (0.0, f64::INFINITY),
        ..SolverConfig::default()
    };
    let t = solve(&problems::f5(), &point(&[1.0, 2.0, 3.0]), &wild)?;
    items.push(CheckItem::new(
        "f5 diverges from (1,2,3)",
        matches!(t.outcome(), Outcome::Diverged(_)) && t.final_objective() < -1e3,
        format!("{:?}, final {:.3e}", t.outcome(), t.final_objective()),
        "Diverged, objective < -1e3".into(),
    ));
    items.push(CheckItem::new(
        "f5 descent from (1,2,3)",
        monotone_nonincreasing(&t.objectives()),
        "monotone".into(),
        "monotone".into(),
    ));

    // f6 plain and accelerated
    let t0 = solve(&problems::f6(), &point(&[1.0, 1.0]), &cfg)?;
    items.push(CheckItem::new(
        "f6 point",
        close(t0.final_point(), &[2.9978, 0.4994], 1e-3),
        fmt_point(t0.final_point()),
        "(2.9978, 0.4994) +/- 1e-3".into(),
    ));
    items.push(CheckItem::new(
        "f6 value",
        (t0.final_objective() + 14.2031).abs() <= 1e-3,
        format!("{:.4}", t0.final_objective()),
        "-14.2031 +/- 1e-3".into(),
    ));
    items.push(CheckItem::new(
        "f6 plain iterations",
        (t0.iterations() as f64 - 558.0).abs() <= 0.15 * 558.0,
        t0.iterations().to_string(),
        "558 +/- 15%".into(),
    ));
    let t1 = solve(
        &problems::f6(),
        &point(&[1.0, 1.0]),
        &SolverConfig {
            acceleration_q: 1,
            ..SolverConfig::default()
        },
    )?;
    items.push(CheckItem::new(
        "f6 q=1 iterations",
        t1.iterations() <= 60,
        t1.iterations().to_string(),
        "<= 60".into(),
    ));
    let t2 = solve(
        &problems::f6(),
        &point(&[1.0, 1.0]),
        &SolverConfig {
            acceleration_q: 2,
            ..SolverConfig::default()
        },
    )?;
    items.push(CheckItem::new(
        "f6 q=2 iterations",
        t2.iterations() <= 25,
        t2.iterations().to_string(),
        "<= 25".into(),
    ));
    let same = |a: &PositivePoint, b: &PositivePoint| {
        a.coords()
            .iter()
            .zip(b.coords())
            .all(|(x, y)| (x - y).abs() <= 1e-4)
    };
    items.push(CheckItem::new(
        "f6 accelerated runs reach the same minimizer",
        same(t0.final_point(), t1.final_point()) && same(t0.final_point(), t2.final_point()),
        format!(
            "{} / {} / {}",
            fmt_point(t0.final_point()),
            fmt_point(t1.final_point()),
            fmt_point(t2.final_point())
        ),
        "pairwise within 1e-4".into(),
    ));

    // f7: scaled copy of the initial point
    let x0: Vec<f64> = (1..=10).map(|i| i as f64).collect();
    let t = solve(&problems::f7(), &point(&x0), &cfg)?;
    let expected: Vec<f64> = x0.iter().map(|v| 0.0255 * v).collect();
    items.push(CheckItem::new(
        "f7 value",
        t.final_objective() <= 1e-6,
        format!("{:.3e}", t.final_objective()),
        "<= 1e-6".into(),
    ));
    items.push(CheckItem::new(
        "f7 point is 0.0255 x0",
        close(t.final_point(), &expected, 1e-3),
        fmt_point(t.final_point()),
        "0.0255 * (1..10) componentwise +/- 1e-3".into(),
    ));

    // f8: divergence toward the value 0
    let x0: Vec<f64> = (1..=7).map(|i| i as f64).collect();
    let t = solve(&problems::f8(), &point(&x0), &cfg)?;
    let initial = t.initial_objective();
    items.push(CheckItem::new(
        "f8 outcome",
        matches!(t.outcome(), Outcome::Diverged(_)),
        format!("{:?}", t.outcome()),
        "Diverged".into(),
    ));
    items.push(CheckItem::new(
        "f8 objective decreasing toward 0",
        monotone_nonincreasing(&t.objectives())
            && t.final_objective() >= 0.0
            && t.final_objective() <= 0.1 * initial,
        format!("final {:.2e} from {:.2}", t.final_objective(), initial),
        "monotone, final <= initial/10".into(),
    ));

    // f9: boundary coordinates
    let t = solve(&problems::f9(), &point(&[1.0, 2.0, 3.0, 4.0]), &cfg)?;
    let x = t.final_point().coords();
    items.push(CheckItem::new(
        "f9 value",
        (t.final_objective() - 2.0).abs() <= 1e-4,
        format!("{:.5}", t.final_objective()),
        "2.0000 +/- 1e-4".into(),
    ));
    items.push(CheckItem::new(
        "f9 middle coordinates vanish",
        x[1] < 1e-3 && x[2] < 1e-3,
        format!("x2 = {:.2e}, x3 = {:.2e}", x[1], x[2]),
        "both < 1e-3".into(),
    ));

    Ok(SuiteReport {
        suite: "table1".into(),
        items,
    })
}

/// Published stage solutions for the first quadratic program,
/// `log2(lambda) = 0..17`, inner epsilon 1e-9.
#[allow(clippy::approx_constant)] // row 3 happens to sit near pi/4
pub const TABLE2_ROWS: [(f64, f64); 18] = [
    (0.9503, 1.6464),
    (0.8580, 1.5164),
    (0.8138, 1.4461),
    (0.7853, 1.4067),
    (0.7264, 1.3702),
    (0.6967, 1.3518),
    (0.6817, 1.3426),
    (0.6742, 1.3380),
    (0.6704, 1.3356),
    (0.6686, 1.3345),
    (0.6676, 1.3339),
    (0.6671, 1.3336),
    (0.6669, 1.3335),
    (0.6668, 1.3334),
    (0.6667, 1.3334),
    (0.6667, 1.3334),
    (0.6667, 1.3333),
    (0.6667, 1.3333),
];

/// Published stage data for the second quadratic program,
/// `log2(lambda) = 0..21`: plain counts, accelerated counts, solutions.
pub const TABLE3_ROWS: [(usize, usize, f64, f64); 22] = [
    (18, 5, 3.0000, 1.8000),
    (2, 2, 2.8571, 1.7143),
    (56, 6, 2.6667, 1.6667),
    (97, 5, 2.5455, 1.6364),
    (167, 5, 2.4762, 1.6190),
    (312, 5, 2.4390, 1.6098),
    (541, 6, 2.4198, 1.6049),
    (955, 5, 2.4099, 1.6025),
    (1674, 4, 2.4050, 1.6012),
    (2924, 3, 2.4025, 1.6006),
    (4839, 3, 2.4013, 1.6003),
    (7959, 4, 2.4006, 1.6002),
    (12220, 4, 2.4003, 1.6001),
    (17674, 4, 2.4002, 1.6000),
    (21739, 3, 2.4001, 1.6000),
    (20736, 3, 2.4000, 1.6000),
    (8073, 3, 2.4000, 1.6000),
    (111, 3, 2.4000, 1.6000),
    (6, 4, 2.4000, 1.6000),
    (5, 2, 2.4000, 1.6000),
    (3, 2, 2.4000, 1.6000),
    (2, 2, 2.4000, 1.6000),
];

/// Stage solutions of the first quadratic program against the published rows.
pub fn table2() -> Result<SuiteReport> {
    let mut items = Vec::new();
    let p = problems::f10();
    let schedule = PenaltySchedule::powers_of_two(
        0,
        17,
        SolverConfig {
            epsilon: 1e-9,
            max_iterations: 100_000,
            ..SolverConfig::default()
        },
    )?;
    let run = crate::nnqp::solve_qp(&p, &point(&[1.0, 1.0]), &schedule, 1e-9)?;
    for (stage, &(e1, e2)) in run.stages.iter().zip(TABLE2_ROWS.iter()) {
        let k = stage.lambda.log2().round() as i32;
        items.push(CheckItem::new(
            format!("lambda 2^{k}"),
            close(&stage.solution, &[e1, e2], 1e-3),
            format!(
                "{} in {} iters",
                fmt_point(&stage.solution),
                stage.iterations
            ),
            format!("({e1:.4}, {e2:.4}) +/- 1e-3"),
        ));
    }
    items.push(CheckItem::new(
        "final point",
        close(&run.final_point, &[2.0 / 3.0, 4.0 / 3.0], 1e-3),
        fmt_point(&run.final_point),
        "(0.6667, 1.3333) +/- 1e-3".into(),
    ));
    Ok(SuiteReport {
        suite: "table2".into(),
        items,
    })
}

/// Stage solutions and iteration counts of the second quadratic program.
pub fn table3() -> Result<SuiteReport> {
    let mut items = Vec::new();
    let p = problems::f11();
    let plain = PenaltySchedule::powers_of_two(
        0,
        21,
        SolverConfig {
            epsilon: 1e-16,
            max_iterations: 200_000,
            ..SolverConfig::default()
        },
    )?;
    let run = crate::nnqp::solve_qp(&p, &point(&[1.0, 1.0]), &plain, 1e-9)?;
    for (stage, &(count, _, e1, e2)) in run.stages.iter().zip(TABLE3_ROWS.iter()) {
        let k = stage.lambda.log2().round() as i32;
        items.push(CheckItem::new(
            format!("lambda 2^{k} solution"),
            close(&stage.solution, &[e1, e2], 1e-3),
            fmt_point(&stage.solution),
            format!("({e1:.4}, {e2:.4}) +/- 1e-3"),
        ));
        let ratio = stage.iterations as f64 / count as f64;
        items.push(CheckItem::new(
            format!("lambda 2^{k} plain iterations"),
            (1.0 / 3.0..=3.0).contains(&ratio),
            stage.iterations.to_string(),
            format!("{count} within x3"),
        ));
    }
    items.push(CheckItem::new(
        "final point",
        close(&run.final_point, &[2.4, 1.6], 1e-3),
        fmt_point(&run.final_point),
        "(2.4000, 1.6000) +/- 1e-3".into(),
    ));

    let accel = PenaltySchedule::powers_of_two(
        0,
        21,
        SolverConfig {
            epsilon: 1e-16,
            max_iterations: 200_000,
            acceleration_q: 1,
            ..SolverConfig::default()
        },
    )?;
    let run = crate::nnqp::solve_qp(&p, &point(&[1.0, 1.0]), &accel, 1e-9)?;
    let worst = run.stages.iter().map(|s| s.iterations).max().unwrap_or(0);
    items.push(CheckItem::new(
        "accelerated stage iterations",
        worst <= 10,
        format!("max {worst}"),
        "every stage <= 10".into(),
    ));
    items.push(CheckItem::new(
        "accelerated final point",
        close(&run.final_point, &[2.4, 1.6], 1e-3),
        fmt_point(&run.final_point),
        "(2.4000, 1.6000) +/- 1e-3".into(),
    ));
    Ok(SuiteReport {
        suite: "table3".into(),
        items,
    })
}

fn random_point(rng: &mut ChaCha8Rng, n: usize) -> PositivePoint {
    point(
        &(0..n)
            .map(|_| {
                let t: f64 = rng.random();
                0.1 * (100f64).powf(t) // log-uniform on [0.1, 10]
            })
            .collect::<Vec<_>>(),
    )
}

/// Dominance, tangency, and descent properties of the surrogate machinery.
pub fn majorization() -> Result<SuiteReport> {
    let mut items = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(0x4d4d_2024);
    for (name, f) in problems::unconstrained_suite() {
        let n = f.dimension();
        let mut dominance_worst: f64 = 0.0;
        let mut value_gap_worst: f64 = 0.0;
        let mut deriv_gap_worst: f64 = 0.0;
        for _ in 0..100 {
            let anchor = random_point(&mut rng, n);
            let x = random_point(&mut rng, n);
            let report = majorize(&f, &anchor)?;
            let fx = f.value(&x)?;
            let sx = report.value_at(&x)?;
            dominance_worst = dominance_worst.max((fx - sx) / (1.0 + fx.abs()));
            let fa = f.value(&anchor)?;
            let sa = report.value_at(&anchor)?;
            value_gap_worst = value_gap_worst.max((sa - fa).abs() / (1.0 + fa.abs()));
            let grad = f.gradient(&anchor)?;
            for c in report.coordinates() {
                let gi = c.derivative(anchor.coords()[c.index()]);
                let scale = grad[c.index()].abs() + 1e-3 * (1.0 + fa.abs());
                deriv_gap_worst = deriv_gap_worst.max((gi - grad[c.index()]).abs() / scale);
            }
        }
        items.push(CheckItem::new(
            format!("{name} dominance"),
            dominance_worst <= 1e-9,
            format!("worst gap {dominance_worst:.2e}"),
            "surrogate >= objective - 1e-9 (1+|f|)".into(),
        ));
        items.push(CheckItem::new(
            format!("{name} value tangency"),
            value_gap_worst <= 1e-10,
            format!("worst gap {value_gap_worst:.2e}"),
            "relative 1e-10 at the anchor".into(),
        ));
        items.push(CheckItem::new(
            format!("{name} derivative tangency"),
            deriv_gap_worst <= 1e-6,
            format!("worst gap {deriv_gap_worst:.2e}"),
            "relative 1e-6 at the anchor".into(),
        ));
    }

    // descent with slack along every recorded table run
    let cfg = SolverConfig::default();
    let mut descent_ok = true;
    let mut worst_case = String::new();
    for (name, f, x0) in [
        ("f1", problems::f1(), vec![1.0, 2.0]),
        ("f2", problems::f2(), vec![1.0, 2.0]),
        ("f3", problems::f3(), vec![1.0, 1.0]),
        ("f4", problems::f4(), vec![0.1, 0.2, 0.3, 0.4]),
        ("f5", problems::f5(), vec![1.0, 1.0, 1.0]),
        ("f6", problems::f6(), vec![1.0, 1.0]),
        ("f7", problems::f7(), (1..=10).map(|i| i as f64).collect()),
        ("f8", problems::f8(), (1..=7).map(|i| i as f64).collect()),
        ("f9", problems::f9(), vec![1.0, 2.0, 3.0, 4.0]),
    ] {
        let t = solve(&f, &point(&x0), &cfg)?;
        if !monotone_nonincreasing(&t.objectives()) {
            descent_ok = false;
            worst_case = name.to_string();
        }
    }
    items.push(CheckItem::new(
        "descent on every recorded run",
        descent_ok,
        if descent_ok {
            "monotone".into()
        } else {
            format!("violated on {worst_case}")
        },
        "objective non-increasing with 1e-12 (1+|f|) slack".into(),
    ));

    Ok(SuiteReport {
        suite: "majorization".into(),
        items,
    })
}

/// Closed-form, grid, finite-difference, cross-solver, and diagnostics checks.
pub fn oracles() -> Result<SuiteReport> {
    let mut items = Vec::new();

    // Generic surrogate path versus the published closed-form updates.
    let cases: [(&str, ClosedFormUpdate, CompositeObjective, Vec<f64>); 6] = [
        ("f1", ClosedFormUpdate::F1, problems::f1(), vec![1.0, 2.0]),
        ("f2", ClosedFormUpdate::F2, problems::f2(), vec![1.0, 2.0]),
        ("f3", ClosedFormUpdate::F3, problems::f3(), vec![1.0, 1.0]),
        (
            "f4",
            ClosedFormUpdate::F4,
            problems::f4(),
            vec![0.1, 0.2, 0.3, 0.4],
        ),
        (
            "f5 (1,1,1)",
            ClosedFormUpdate::F5,
            problems::f5(),
            vec![1.0, 1.0, 1.0],
        ),
        (
            "f5 (1,2,3)",
            ClosedFormUpdate::F5,
            problems::f5(),
            vec![1.0, 2.0, 3.0],
        ),
    ];
    for (name, which, f, x0) in cases {
        let cfg = SolverConfig {
            epsilon: f64::MIN_POSITIVE,
            max_iterations: 5,
            ..SolverConfig::default()
        };
        let trace = solve(&f, &point(&x0), &cfg)?;
        let mut expected = point(&x0);
        let mut worst: f64 = 0.0;
        for record in trace.records() {
            expected = closed_form_update(which, &expected)?;
            for (a, b) in record.point.coords().iter().zip(expected.coords()) {
                worst = worst.max((a - b).abs() / b.abs());
            }
        }
        // runs that stop early sit on a fixed point of the closed form too
        let again = closed_form_update(which, &expected)?;
        if trace.records().len() < 5 {
            for (a, b) in again.coords().iter().zip(expected.coords()) {
                worst = worst.max((a - b).abs() / b.abs());
            }
        }
        items.push(CheckItem::new(
            format!("{name} closed-form agreement"),
            worst <= 1e-8,
            format!(
                "worst relative gap {worst:.2e} over {} iterations",
                trace.records().len()
            ),
            "relative 1e-8 over 5 iterations".into(),
        ));
    }

    // f3 boundary-path identities along the whole recorded run.
    let t = solve(
        &problems::f3(),
        &point(&[1.0, 1.0]),
        &SolverConfig::default(),
    )?;
    let c1 = 2f64.powf(0.3);
    let c2 = 2f64.powf(0.08);
    let mut worst_inv: f64 = 0.0;
    let mut worst_ratio: f64 = 0.0;
    let records = t.records();
    for (m, r) in records.iter().enumerate() {
        let x = r.point.coords();
        worst_inv = worst_inv.max((x[0] * x[1].powf(1.5) - c1).abs());
        if m + 1 < records.len() {
            let ratio = records[m + 1].point.coords()[1] / x[1];
            worst_ratio = worst_ratio.max((ratio - c2).abs());
        }
    }
    items.push(CheckItem::new(
        "f3 invariant x1 x2^(3/2) = 2^(3/10)",
        worst_inv <= 1e-8,
        format!(
            "worst |gap| {worst_inv:.2e} over {} iterations",
            records.len()
        ),
        "absolute 1e-8 for m >= 1".into(),
    ));
    items.push(CheckItem::new(
        "f3 ratio x2'/x2 = 2^(2/25)",
        worst_ratio <= 1e-8,
        format!("worst |gap| {worst_ratio:.2e}"),
        "absolute 1e-8 for m >= 1".into(),
    ));

    // Grid oracle confirms the f1 minimum.
    let f1 = problems::f1();
    let grid = GridSpec::uniform(2, 0.5, 3.0, 400)?;
    let (_, grid_value) = grid_minimize(|x| f1.value(&point(x)).unwrap(), &grid)?;
    items.push(CheckItem::new(
        "grid search f1 minimum",
        (grid_value - 3.4128).abs() <= 1e-3,
        format!("{grid_value:.5}"),
        "3.4128 +/- 1e-3".into(),
    ));

    // Specialized QP solver versus the generic signomial penalty path.
    let qp = problems::f10();
    let tight = SolverConfig {
        epsilon: 1e-12,
        max_iterations: 100_000,
        ..SolverConfig::default()
    };
    let qp_run = crate::nnqp::solve_qp(
        &qp,
        &point(&[1.0, 1.0]),
        &PenaltySchedule::powers_of_two(0, 17, tight.clone())?,
        1e-9,
    )?;
    let mut generic = PenaltyProblem::new(
        problems::qp_objective_signomial(&qp)?,
        PenaltySchedule::powers_of_two(0, 17, tight)?,
    );
    for s in problems::qp_inequality_signomials(&qp)? {
        generic = generic.with_inequality(s)?;
    }
    let generic_run = generic.solve_constrained(&point(&[1.0, 1.0]))?;
    let gap = qp_run
        .final_point
        .coords()
        .iter()
        .zip(generic_run.final_point.coords())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    items.push(CheckItem::new(
        "specialized vs generic penalty on the first QP",
        gap <= 1e-4,
        format!(
            "{} vs {} (gap {gap:.2e})",
            fmt_point(&qp_run.final_point),
            fmt_point(&generic_run.final_point)
        ),
        "agree within 1e-4".into(),
    ));

    // Analytic gradients versus central differences.
    let mut rng = ChaCha8Rng::seed_from_u64(0x4744_2024);
    for (name, f) in problems::unconstrained_suite() {
        let n = f.dimension();
        let mut worst: f64 = 0.0;
        for _ in 0..100 {
            let x = random_point(&mut rng, n);
            let analytic = f.gradient(&x)?;
            let fx = f.value(&x)?;
            let numeric =
                finite_difference_gradient(|p| f.value(p), &x, &relative_steps(&x, 1e-6))?;
            for (a, b) in analytic.iter().zip(&numeric) {
                let scale = a.abs() + 1e-3 * (1.0 + fx.abs());
                worst = worst.max((a - b).abs() / scale);
            }
        }
        items.push(CheckItem::new(
            format!("{name} gradient check"),
            worst <= 1e-5,
            format!("worst relative gap {worst:.2e}"),
            "central differences, relative 1e-5".into(),
        ));
    }

    // Diagnostics on the three instructive posynomials.
    let p1 = match &problems::f1() {
        CompositeObjective::Plain(s) => s.clone(),
        _ => unreachable!(),
    };
    let (sc1, _) = check_strict_convexity(&p1)?;
    items.push(CheckItem::new(
        "f1 diagnostics",
        sc1 && check_coercive(&p1)? == Coercivity::Yes,
        format!("strictly convex {sc1}, coercive {:?}", check_coercive(&p1)?),
        "strictly convex and coercive".into(),
    ));
    let p2 = match &problems::f2() {
        CompositeObjective::Plain(s) => s.clone(),
        _ => unreachable!(),
    };
    let (sc2, rank2) = check_strict_convexity(&p2)?;
    items.push(CheckItem::new(
        "f2 diagnostics",
        !sc2 && rank2 == 1,
        format!("rank {rank2} of 2"),
        "not strictly convex, rank 1".into(),
    ));
    let p3 = match &problems::f3() {
        CompositeObjective::Plain(s) => s.clone(),
        _ => unreachable!(),
    };
    let sound = match (check_coercive(&p3)?, check_bounded_below(&p3)?) {
        (Coercivity::No { certificate: c1 }, BoundedBelow::No { certificate: c2 }) => {
            let check = |v: &[f64], strict: bool| {
                p3.terms().iter().all(|t| {
                    let d: f64 = t.exponents().iter().zip(v).map(|(a, b)| a * b).sum();
                    if strict {
                        d < 0.0
                    } else {
                        d <= 1e-9
                    }
                })
            };
            check(&c1, false) && check(&c2, true)
        }
        _ => false,
    };
    items.push(CheckItem::new(
        "f3 diagnostics certificates",
        sound,
        format!("{sound}"),
        "non-coercive and unattained, certificates re-verified".into(),
    ));

    Ok(SuiteReport {
        suite: "oracles".into(),
        items,
    })
}
