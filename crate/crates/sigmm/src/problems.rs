//! Bundled example problems.
//!
//! Nine unconstrained objectives (f1-f9), two inequality-constrained
//! quadratic programs (f10, f11), and a toy equality-constrained program.
//! These drive the regression suites in [`crate::verify`] and ship as problem
//! files with the command-line interface.

use crate::error::Result;
use crate::nnqp::QpProblem;
use crate::signomial::{CompositeObjective, Signomial};
use nalgebra::{DMatrix, DVector};

/// `x1^-3 + 3 x1^-1 x2^-2 + x1 x2`: coercive posynomial with the unique
/// minimizer `(6^(1/5), 6^(1/5))`.
pub fn f1() -> CompositeObjective {
    CompositeObjective::plain(
        Signomial::from_terms(
            2,
            &[
                (1.0, &[-3.0, 0.0]),
                (3.0, &[-1.0, -2.0]),
                (1.0, &[1.0, 1.0]),
            ],
        )
        .expect("valid terms"),
    )
}

/// `x1^-1 x2^-2 + x1 x2^2`: minimum value 2 on the whole curve `x1 x2^2 = 1`.
pub fn f2() -> CompositeObjective {
    CompositeObjective::plain(
        Signomial::from_terms(2, &[(1.0, &[-1.0, -2.0]), (1.0, &[1.0, 2.0])]).expect("valid terms"),
    )
}

/// `x1^-1 x2^-2 + x1 x2`: infimum 0, not attained; iterates drift to the
/// boundary along `x1 x2^(3/2) = 2^(3/10)`.
pub fn f3() -> CompositeObjective {
    CompositeObjective::plain(
        Signomial::from_terms(2, &[(1.0, &[-1.0, -2.0]), (1.0, &[1.0, 1.0])]).expect("valid terms"),
    )
}

/// `(x1 x2 - x3 x4)^2` expanded as a signomial; a continuum of minima.
pub fn f4() -> CompositeObjective {
    CompositeObjective::plain(
        Signomial::from_terms(
            4,
            &[
                (1.0, &[2.0, 2.0, 0.0, 0.0]),
                (-2.0, &[1.0, 1.0, 1.0, 1.0]),
                (1.0, &[0.0, 0.0, 2.0, 2.0]),
            ],
        )
        .expect("valid terms"),
    )
}

/// `x1 x2 + x1 x3 + x2 x3 - ln(x1 + x2 + x3)`: unbounded below, with a saddle
/// point at all coordinates `1/sqrt(6)`.
pub fn f5() -> CompositeObjective {
    let plain = Signomial::from_terms(
        3,
        &[
            (1.0, &[1.0, 1.0, 0.0]),
            (1.0, &[1.0, 0.0, 1.0]),
            (1.0, &[0.0, 1.0, 1.0]),
        ],
    )
    .expect("valid terms");
    let sum = Signomial::from_terms(
        3,
        &[
            (1.0, &[1.0, 0.0, 0.0]),
            (1.0, &[0.0, 1.0, 0.0]),
            (1.0, &[0.0, 0.0, 1.0]),
        ],
    )
    .expect("valid terms");
    CompositeObjective::plain_plus_neg_log(plain, sum).expect("posynomial")
}

/// A degree-(2,6) signomial in two variables with minimum -14.203125 at
/// `(3, 1/2)`; slow plain-MM convergence makes it the acceleration benchmark.
pub fn f6() -> CompositeObjective {
    CompositeObjective::plain(
        Signomial::from_terms(
            2,
            &[
                (1.0, &[2.0, 6.0]),
                (1.0, &[2.0, 4.0]),
                (-2.0, &[2.0, 3.0]),
                (-1.0, &[2.0, 2.0]),
                (5.25, &[1.0, 3.0]),
                (-2.0, &[2.0, 1.0]),
                (4.5, &[1.0, 2.0]),
                (3.0, &[2.0, 0.0]),
                (3.0, &[1.0, 1.0]),
                (-12.75, &[1.0, 0.0]),
            ],
        )
        .expect("valid terms"),
    )
}

/// `(sum x_i^2 - 1/4)^2 + 1e-5 sum x_i^2 - 2e-5 sum_{i=7..10} x_i` in ten
/// variables, written out as a signomial.
pub fn f7() -> CompositeObjective {
    let n = 10;
    let mut terms: Vec<(f64, Vec<f64>)> = Vec::new();
    for i in 0..n {
        let mut a = vec![0.0; n];
        a[i] = 4.0;
        terms.push((1.0, a));
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let mut a = vec![0.0; n];
            a[i] = 2.0;
            a[j] = 2.0;
            terms.push((2.0, a));
        }
    }
    for i in 0..n {
        let mut a = vec![0.0; n];
        a[i] = 2.0;
        terms.push((1e-5 - 0.5, a));
    }
    for i in 6..n {
        let mut a = vec![0.0; n];
        a[i] = 1.0;
        terms.push((-2e-5, a));
    }
    terms.push((1.0 / 16.0, vec![0.0; n]));
    let refs: Vec<(f64, &[f64])> = terms.iter().map(|(c, a)| (*c, a.as_slice())).collect();
    CompositeObjective::plain(Signomial::from_terms(n, &refs).expect("valid terms"))
}

/// A seven-variable posynomial whose infimum 0 is not attained.
pub fn f8() -> CompositeObjective {
    CompositeObjective::plain(
        Signomial::from_terms(
            7,
            &[
                (1.0, &[1.0, 0.0, 2.0, 0.0, 0.0, -1.0, -1.0]),
                (1.0, &[2.0, 0.0, -1.0, 0.0, -2.0, -1.0, 1.0]),
                (1.0, &[3.0, 2.0, 0.0, 0.0, -2.0, 2.0, 0.0]),
                (1.0, &[0.0, -1.0, 0.0, -1.0, 0.0, 2.0, 0.0]),
                (1.0, &[0.0, 0.0, 1.0, 0.0, 3.0, -3.0, 0.0]),
            ],
        )
        .expect("valid terms"),
    )
}

/// `x1 x4^2 + x2 x3 + x1 x2 x3 x4^2 + x1^-1 x4^-2`: minimum value 2 reached
/// as the middle coordinates slide to zero.
pub fn f9() -> CompositeObjective {
    CompositeObjective::plain(
        Signomial::from_terms(
            4,
            &[
                (1.0, &[1.0, 0.0, 0.0, 2.0]),
                (1.0, &[0.0, 1.0, 1.0, 0.0]),
                (1.0, &[1.0, 1.0, 1.0, 2.0]),
                (1.0, &[-1.0, 0.0, 0.0, -2.0]),
            ],
        )
        .expect("valid terms"),
    )
}

/// The objective of `f10` / `f11` as a plain signomial, for cross-checking
/// the specialized quadratic solver against the generic penalty path.
pub fn qp_objective_signomial(qp: &QpProblem) -> Result<CompositeObjective> {
    let n = qp.dimension();
    let mut terms: Vec<(f64, Vec<f64>)> = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let c = 0.5 * qp.q()[(i, j)];
            if c != 0.0 {
                let mut a = vec![0.0; n];
                a[i] += 1.0;
                a[j] += 1.0;
                terms.push((c, a));
            }
        }
        if qp.c()[i] != 0.0 {
            let mut a = vec![0.0; n];
            a[i] = 1.0;
            terms.push((qp.c()[i], a));
        }
    }
    let refs: Vec<(f64, &[f64])> = terms.iter().map(|(c, a)| (*c, a.as_slice())).collect();
    Ok(CompositeObjective::plain(Signomial::from_terms(n, &refs)?))
}

/// Linear inequality rows `a^T x <= b` of a QP as signomials `a^T x - b <= 0`.
pub fn qp_inequality_signomials(qp: &QpProblem) -> Result<Vec<Signomial>> {
    let n = qp.dimension();
    let mut out = Vec::new();
    for r in 0..qp.a().nrows() {
        let mut terms: Vec<(f64, Vec<f64>)> = Vec::new();
        for i in 0..n {
            let c = qp.a()[(r, i)];
            if c != 0.0 {
                let mut a = vec![0.0; n];
                a[i] = 1.0;
                terms.push((c, a));
            }
        }
        terms.push((-qp.b()[r], vec![0.0; n]));
        let refs: Vec<(f64, &[f64])> = terms.iter().map(|(c, a)| (*c, a.as_slice())).collect();
        out.push(Signomial::from_terms(n, &refs)?);
    }
    Ok(out)
}

/// `1/2 x1^2 + x2^2 - x1 x2 - 2 x1 - 6 x2` with three inequality
/// constraints; constrained minimum `(2/3, 4/3)`.
pub fn f10() -> QpProblem {
    QpProblem::new(
        DMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 2.0]),
        DVector::from_row_slice(&[-2.0, -6.0]),
        Some((
            DMatrix::from_row_slice(3, 2, &[1.0, 1.0, -1.0, 2.0, 2.0, 1.0]),
            DVector::from_row_slice(&[2.0, 2.0, 3.0]),
        )),
        None,
    )
    .expect("valid problem")
}

/// `x1^2 + 4 x2^2 - 8 x1 - 16 x2` with two inequality constraints;
/// constrained minimum `(2.4, 1.6)`. Ill-conditioned at large penalties.
pub fn f11() -> QpProblem {
    QpProblem::new(
        DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 8.0]),
        DVector::from_row_slice(&[-8.0, -16.0]),
        Some((
            DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 0.0]),
            DVector::from_row_slice(&[4.0, 3.0]),
        )),
        None,
    )
    .expect("valid problem")
}

/// Minimize `x1 + x2` subject to `x1 x2 = 1`; analytic solution `(1, 1)`.
/// Returns the objective and the normalized equality constraint.
pub fn toy_equality_program() -> (CompositeObjective, Signomial) {
    let f =
        Signomial::from_terms(2, &[(1.0, &[1.0, 0.0]), (1.0, &[0.0, 1.0])]).expect("valid terms");
    let h = Signomial::from_terms(2, &[(1.0, &[1.0, 1.0])]).expect("valid terms");
    (CompositeObjective::plain(f), h.normalize_constraint())
}

/// All nine unconstrained objectives with their conventional names.
pub fn unconstrained_suite() -> Vec<(&'static str, CompositeObjective)> {
    vec![
        ("f1", f1()),
        ("f2", f2()),
        ("f3", f3()),
        ("f4", f4()),
        ("f5", f5()),
        ("f6", f6()),
        ("f7", f7()),
        ("f8", f8()),
        ("f9", f9()),
    ]
}
