//! Acceptance suite: one test per reproduction criterion, each printing a
//! pass/fail line. The expected values and tolerances are pinned here and in
//! `sigmm::verify`; nothing is calibrated at run time.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sigmm::diagnostics::{check_bounded_below, check_coercive, BoundedBelow, Coercivity};
use sigmm::penalty::{PenaltyProblem, PenaltySchedule};
use sigmm::verify::{self, CheckItem};
use sigmm::{PositivePoint, Signomial, SolverConfig};
use std::time::Instant;

fn report(criterion: &str, items: &[CheckItem]) {
    let failures: Vec<&CheckItem> = items.iter().filter(|i| !i.passed).collect();
    if failures.is_empty() {
        println!("{criterion}: PASS ({} checks)", items.len());
    } else {
        println!(
            "{criterion}: FAIL ({} of {} checks)",
            failures.len(),
            items.len()
        );
        for f in &failures {
            println!(
                "  {} | measured {} | expected {}",
                f.name, f.measured, f.expected
            );
        }
        panic!(
            "{criterion}: {} failed checks:\n{}",
            failures.len(),
            failures
                .iter()
                .map(|f| format!(
                    "  {} | measured {} | expected {}",
                    f.name, f.measured, f.expected
                ))
                .collect::<Vec<_>>()
                .join("\n")
        );
    }
}

fn items_named(items: &[CheckItem], names: &[&str]) -> Vec<CheckItem> {
    items
        .iter()
        .filter(|i| names.iter().any(|n| i.name.starts_with(n)))
        .cloned()
        .collect()
}

/// Criterion 1: the unconstrained example table, under ten seconds.
#[test]
fn criterion_1_unconstrained_table() {
    let start = Instant::now();
    let suite = verify::table1().unwrap();
    let elapsed = start.elapsed();
    let mut items = items_named(
        &suite.items,
        &[
            "f1", "f2", "f3", "f4", "f5", "f7", "f8", "f9", "f6 point", "f6 value", "f6 plain",
        ],
    );
    items.push(CheckItem {
        name: "table runtime".into(),
        passed: elapsed.as_secs_f64() < 10.0,
        measured: format!("{:.2}s", elapsed.as_secs_f64()),
        expected: "< 10s".into(),
    });
    report("criterion 1 (unconstrained table)", &items);
}

/// Criterion 2: the boundary-path identities along the f3 run.
#[test]
fn criterion_2_f3_identities() {
    let suite = verify::oracles().unwrap();
    let items = items_named(&suite.items, &["f3 invariant", "f3 ratio"]);
    assert_eq!(items.len(), 2);
    report("criterion 2 (f3 identities)", &items);
}

/// Criterion 3: quasi-Newton acceleration of the slow example.
#[test]
fn criterion_3_acceleration() {
    let suite = verify::table1().unwrap();
    let items = items_named(
        &suite.items,
        &["f6 plain iterations", "f6 q=1", "f6 q=2", "f6 accelerated"],
    );
    assert_eq!(items.len(), 4);
    report("criterion 3 (acceleration)", &items);
}

/// Criterion 4: the first quadratic program's stage table, under five seconds.
#[test]
fn criterion_4_first_qp_table() {
    let start = Instant::now();
    let suite = verify::table2().unwrap();
    let elapsed = start.elapsed();
    let mut items = suite.items.clone();
    items.push(CheckItem {
        name: "table runtime".into(),
        passed: elapsed.as_secs_f64() < 5.0,
        measured: format!("{:.2}s", elapsed.as_secs_f64()),
        expected: "< 5s".into(),
    });
    report("criterion 4 (first QP table)", &items);
}

/// Criterion 5: the second quadratic program's stage table.
#[test]
fn criterion_5_second_qp_table() {
    let suite = verify::table3().unwrap();
    report("criterion 5 (second QP table)", &suite.items);
}

/// Criterion 6: majorization dominance, tangency, and descent everywhere.
#[test]
fn criterion_6_majorization_properties() {
    let suite = verify::majorization().unwrap();
    let mut items = suite.items.clone();

    // descent also holds along every stage of the penalized runs
    let tight = SolverConfig {
        epsilon: 1e-9,
        max_iterations: 100_000,
        ..Default::default()
    };
    let schedule = PenaltySchedule::powers_of_two(0, 17, tight).unwrap();
    let run = sigmm::nnqp::solve_qp(
        &sigmm::problems::f10(),
        &PositivePoint::new(vec![1.0, 1.0]).unwrap(),
        &schedule,
        1e-9,
    )
    .unwrap();
    let mut qp_descent = true;
    for stage in &run.stages {
        let mut prev = f64::INFINITY;
        for r in &stage.records {
            if r.penalized_value > prev + 1e-12 * (1.0 + prev.abs()) {
                qp_descent = false;
            }
            prev = r.penalized_value;
        }
    }
    items.push(CheckItem {
        name: "descent along penalized QP stages".into(),
        passed: qp_descent,
        measured: format!("{qp_descent}"),
        expected: "non-increasing per stage".into(),
    });

    let (f, r) = sigmm::problems::toy_equality_program();
    let schedule = PenaltySchedule::powers_of_two(
        1,
        17,
        SolverConfig {
            max_iterations: 500,
            ..Default::default()
        },
    )
    .unwrap();
    let p = PenaltyProblem::new(f, schedule).with_equality(r).unwrap();
    let run = p
        .solve_constrained(&PositivePoint::new(vec![2.0, 0.3]).unwrap())
        .unwrap();
    let mut pen_descent = true;
    for stage in &run.stages {
        let obj = stage.trace.objectives();
        for w in obj.windows(2) {
            if w[1] > w[0] + 1e-12 * (1.0 + w[0].abs()) {
                pen_descent = false;
            }
        }
    }
    items.push(CheckItem {
        name: "descent along signomial penalty stages".into(),
        passed: pen_descent,
        measured: format!("{pen_descent}"),
        expected: "non-increasing per stage".into(),
    });

    report("criterion 6 (majorization properties)", &items);
}

/// Criterion 7: oracle equivalence of the independent solution paths.
#[test]
fn criterion_7_oracle_equivalence() {
    let suite = verify::oracles().unwrap();
    let items = items_named(
        &suite.items,
        &[
            "f1 closed-form",
            "f2 closed-form",
            "f3 closed-form",
            "f4 closed-form",
            "f5 (1,1,1) closed-form",
            "f5 (1,2,3) closed-form",
            "grid search",
            "specialized vs generic",
        ],
    );
    assert_eq!(items.len(), 8);
    report("criterion 7 (oracle equivalence)", &items);
}

/// Criterion 8: diagnostics verdicts, plus a soundness sweep of 500 random
/// exponent sets against a 10^4-direction sampling oracle.
#[test]
fn criterion_8_diagnostics() {
    let suite = verify::oracles().unwrap();
    let mut items = items_named(
        &suite.items,
        &["f1 diagnostics", "f2 diagnostics", "f3 diagnostics"],
    );

    let mut rng = ChaCha8Rng::seed_from_u64(0xd1a6_2024);
    let mut unsound = Vec::new();
    let mut checked = 0;
    while checked < 500 {
        let n = 1 + (rng.random::<u32>() % 4) as usize;
        let m = 1 + (rng.random::<u32>() % 6) as usize;
        let mut spec = Vec::new();
        for _ in 0..m {
            let a: Vec<f64> = (0..n)
                .map(|_| ((rng.random::<f64>() * 6.0 - 3.0) * 4.0).round() / 4.0)
                .collect();
            spec.push((0.5 + rng.random::<f64>(), a));
        }
        let refs: Vec<(f64, &[f64])> = spec.iter().map(|(c, a)| (*c, a.as_slice())).collect();
        let Ok(f) = Signomial::from_terms(n, &refs) else {
            continue;
        };
        if !f.is_posynomial() {
            continue;
        }
        checked += 1;
        let alphas: Vec<Vec<f64>> = f.terms().iter().map(|t| t.exponents().to_vec()).collect();
        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
        let (sampled_min, _) = sigmm::diagnostics::sampled_min_max_dot(&f, 10_000, checked as u64);

        match check_coercive(&f).unwrap() {
            Coercivity::Yes => {
                // a direction with max_a a.v clearly negative refutes coercivity
                if sampled_min < -1e-9 {
                    unsound.push(format!(
                        "coercive Yes but sampled direction gives {sampled_min}"
                    ));
                }
            }
            Coercivity::No { certificate } => {
                let worst = alphas
                    .iter()
                    .map(|a| dot(a, &certificate))
                    .fold(f64::NEG_INFINITY, f64::max);
                if worst > 1e-9 {
                    unsound.push(format!(
                        "coercivity certificate violated: max a.v = {worst}"
                    ));
                }
            }
            Coercivity::Unknown { .. } => {}
        }
        match check_bounded_below(&f).unwrap() {
            BoundedBelow::Yes => {
                // 0 in the hull: no direction can strictly separate
                if sampled_min < -1e-6 {
                    let worst = sampled_min;
                    unsound.push(format!(
                        "hull membership claimed but separation {worst} sampled"
                    ));
                }
            }
            BoundedBelow::No { certificate } => {
                let worst = alphas
                    .iter()
                    .map(|a| dot(a, &certificate))
                    .fold(f64::NEG_INFINITY, f64::max);
                if worst >= 0.0 {
                    unsound.push(format!(
                        "separation certificate violated: max a.v = {worst}"
                    ));
                }
                // agreement: 0 outside the hull implies non-coercive
                if matches!(check_coercive(&f).unwrap(), Coercivity::Yes) {
                    unsound.push("outside hull but declared coercive".to_string());
                }
            }
            BoundedBelow::Unknown { .. } => {}
        }
    }
    items.push(CheckItem {
        name: "500-set soundness sweep".into(),
        passed: unsound.is_empty(),
        measured: if unsound.is_empty() {
            "no unsound verdicts".into()
        } else {
            unsound.join("; ")
        },
        expected: "no unsound verdicts against the sampling oracle".into(),
    });
    report("criterion 8 (diagnostics)", &items);
}

/// Criterion 9: analytic gradients against central differences.
#[test]
fn criterion_9_gradient_checks() {
    let suite = verify::oracles().unwrap();
    let items = items_named(
        &suite.items,
        &[
            "f1 gradient",
            "f2 gradient",
            "f3 gradient",
            "f4 gradient",
            "f5 gradient",
            "f6 gradient",
            "f7 gradient",
            "f8 gradient",
            "f9 gradient",
        ],
    );
    assert_eq!(items.len(), 9);
    report("criterion 9 (gradient checks)", &items);
}
