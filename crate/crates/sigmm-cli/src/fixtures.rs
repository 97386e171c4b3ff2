//! Bundled problem files, generated from the library's example problems.
//!
//! The `.prob` files shipped under `problems/` are the serialized forms of
//! these fixtures; a test keeps them in sync byte for byte.

use crate::problem_file::{Constraint, Objective, Options, ProblemFile};
use sigmm::{CompositeObjective, PositivePoint, Signomial};

fn split(objective: CompositeObjective) -> (Signomial, Option<Signomial>) {
    match objective {
        CompositeObjective::Plain(s) => (s, None),
        CompositeObjective::PlainPlusNegLog(s, p) => (s, Some(p)),
        CompositeObjective::NegLog(p) | CompositeObjective::Log(p) => {
            // not used by the bundled set; represent as the bare posynomial
            (p, None)
        }
    }
}

fn signomial_file(objective: CompositeObjective, initial: &[f64], options: Options) -> ProblemFile {
    let dimension = objective.dimension();
    let (plain, neg_log) = split(objective);
    ProblemFile {
        dimension,
        objective: Objective::Signomial { plain, neg_log },
        constraints: Vec::new(),
        initial: PositivePoint::new(initial.to_vec()).expect("valid initial point"),
        options,
    }
}

/// `(file stem, title line, problem)` for every bundled example.
pub fn all() -> Vec<(&'static str, &'static str, ProblemFile)> {
    let eps9 = Options {
        epsilon: Some(1e-9),
        ..Options::default()
    };
    let mut out: Vec<(&'static str, &'static str, ProblemFile)> = vec![(
        "f1",
        "f1: coercive posynomial with a unique interior minimum",
        signomial_file(sigmm::problems::f1(), &[1.0, 2.0], eps9.clone()),
    )];
    out.push((
        "f2",
        "f2: posynomial minimized on the whole curve x1 x2^2 = 1",
        signomial_file(sigmm::problems::f2(), &[1.0, 2.0], eps9.clone()),
    ));
    out.push((
        "f3",
        "f3: posynomial whose infimum 0 is approached along the boundary",
        signomial_file(sigmm::problems::f3(), &[1.0, 1.0], eps9.clone()),
    ));
    out.push((
        "f4",
        "f4: signomial square (x1 x2 - x3 x4)^2 with a continuum of minima",
        signomial_file(sigmm::problems::f4(), &[0.1, 0.2, 0.3, 0.4], eps9.clone()),
    ));
    out.push((
        "f5",
        "f5: pairwise products minus the log of the coordinate sum",
        signomial_file(sigmm::problems::f5(), &[1.0, 1.0, 1.0], eps9.clone()),
    ));
    out.push((
        "f6",
        "f6: slow two-variable signomial, the acceleration benchmark",
        signomial_file(sigmm::problems::f6(), &[1.0, 1.0], eps9.clone()),
    ));
    out.push((
        "f7",
        "f7: ten-variable signomial minimized near a sphere",
        signomial_file(
            sigmm::problems::f7(),
            &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0],
            eps9.clone(),
        ),
    ));
    out.push((
        "f8",
        "f8: seven-variable posynomial whose infimum is not attained",
        signomial_file(
            sigmm::problems::f8(),
            &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0],
            eps9.clone(),
        ),
    ));
    out.push((
        "f9",
        "f9: posynomial converging onto the boundary of the orthant",
        signomial_file(sigmm::problems::f9(), &[1.0, 2.0, 3.0, 4.0], eps9.clone()),
    ));
    out.push((
        "f10",
        "f10: quadratic program over the positive orthant, three inequalities",
        ProblemFile {
            dimension: 2,
            objective: Objective::Quadratic(sigmm::problems::f10()),
            constraints: Vec::new(),
            initial: PositivePoint::new(vec![1.0, 1.0]).unwrap(),
            options: Options {
                schedule: Some((0, 17)),
                inner_eps: Some(1e-9),
                eps_floor: Some(1e-9),
                ..Options::default()
            },
        },
    ));
    out.push((
        "f11",
        "f11: ill-conditioned quadratic program, two inequalities",
        ProblemFile {
            dimension: 2,
            objective: Objective::Quadratic(sigmm::problems::f11()),
            constraints: Vec::new(),
            initial: PositivePoint::new(vec![1.0, 1.0]).unwrap(),
            options: Options {
                schedule: Some((0, 21)),
                inner_eps: Some(1e-16),
                eps_floor: Some(1e-9),
                max_iters: Some(200_000),
                ..Options::default()
            },
        },
    ));
    let (toy_f, toy_r) = sigmm::problems::toy_equality_program();
    out.push((
        "toy",
        "toy: minimize x1 + x2 subject to x1 x2 = 1",
        ProblemFile {
            dimension: 2,
            objective: Objective::Signomial {
                plain: split(toy_f).0,
                neg_log: None,
            },
            constraints: vec![Constraint::Equality(toy_r)],
            initial: PositivePoint::new(vec![2.0, 0.3]).unwrap(),
            options: Options {
                schedule: Some((1, 17)),
                inner_eps: Some(1e-9),
                max_iters: Some(500),
                ..Options::default()
            },
        },
    ));
    out
}
