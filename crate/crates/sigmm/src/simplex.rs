//! A tiny dense two-phase simplex solver.
//!
//! Problems are standard form, `min c.x` subject to `A x = b`, `x >= 0`;
//! general inequality problems are converted by the diagnostics module. The
//! instances solved here have at most a few dozen variables, so a dense
//! tableau with Bland's rule is plenty.

use nalgebra::{DMatrix, DVector};

const PIVOT_TOL: f64 = 1e-11;
const FEAS_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum LpOutcome {
    Optimal {
        x: DVector<f64>,
        value: f64,
    },
    Infeasible,
    Unbounded,
    /// Pivot budget exhausted; callers report an unknown verdict.
    Stalled,
}

/// Solve `min c.x  s.t.  A x = b, x >= 0` by the two-phase tableau method.
pub(crate) fn solve_standard(a: &DMatrix<f64>, b: &DVector<f64>, c: &DVector<f64>) -> LpOutcome {
    let m = a.nrows();
    let n = a.ncols();
    debug_assert_eq!(b.len(), m);
    debug_assert_eq!(c.len(), n);

    // Tableau over structural + artificial columns, rhs last.
    let cols = n + m;
    let mut t = DMatrix::zeros(m, cols + 1);
    for i in 0..m {
        let flip = if b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            t[(i, j)] = flip * a[(i, j)];
        }
        t[(i, n + i)] = 1.0;
        t[(i, cols)] = flip * b[i];
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    // Phase 1: minimize the sum of artificials.
    let mut phase1 = vec![0.0; cols];
    phase1[n..cols].fill(1.0);
    match run_simplex(&mut t, &mut basis, &phase1, n + m) {
        SimplexEnd::Optimal => {}
        SimplexEnd::Unbounded => return LpOutcome::Infeasible,
        SimplexEnd::Stalled => return LpOutcome::Stalled,
    }
    let infeasibility: f64 = basis
        .iter()
        .enumerate()
        .filter(|(_, &j)| j >= n)
        .map(|(i, _)| t[(i, cols)])
        .sum();
    if infeasibility > FEAS_TOL {
        return LpOutcome::Infeasible;
    }
    // Drive any degenerate artificials out of the basis where possible.
    for row in 0..m {
        if basis[row] >= n {
            if let Some(j) = (0..n).find(|&j| t[(row, j)].abs() > PIVOT_TOL) {
                pivot(&mut t, &mut basis, row, j);
            }
        }
    }

    // Phase 2 on the structural costs; artificial columns are frozen out.
    let mut phase2 = vec![0.0; cols];
    phase2[..n].copy_from_slice(c.as_slice());
    match run_simplex(&mut t, &mut basis, &phase2, n) {
        SimplexEnd::Optimal => {}
        SimplexEnd::Unbounded => return LpOutcome::Unbounded,
        SimplexEnd::Stalled => return LpOutcome::Stalled,
    }

    let mut x = DVector::zeros(n);
    for (row, &j) in basis.iter().enumerate() {
        if j < n {
            x[j] = t[(row, cols)];
        }
    }
    let value = c.dot(&x);
    LpOutcome::Optimal { x, value }
}

enum SimplexEnd {
    Optimal,
    Unbounded,
    Stalled,
}

/// Bland's rule simplex over the first `usable` columns.
fn run_simplex(
    t: &mut DMatrix<f64>,
    basis: &mut [usize],
    cost: &[f64],
    usable: usize,
) -> SimplexEnd {
    let m = t.nrows();
    let rhs = t.ncols() - 1;
    let max_pivots = 200 + 20 * (m + usable);
    for _ in 0..max_pivots {
        // reduced costs: c_j - c_B B^-1 A_j, computed from the tableau rows
        let mut entering = None;
        for j in 0..usable {
            if basis.contains(&j) {
                continue;
            }
            let mut reduced = cost[j];
            for i in 0..m {
                reduced -= cost[basis[i]] * t[(i, j)];
            }
            if reduced < -PIVOT_TOL {
                entering = Some(j);
                break; // Bland: smallest index
            }
        }
        let Some(j) = entering else {
            return SimplexEnd::Optimal;
        };
        let mut leaving: Option<(usize, f64)> = None;
        for i in 0..m {
            if t[(i, j)] > PIVOT_TOL {
                let ratio = t[(i, rhs)] / t[(i, j)];
                let better = match leaving {
                    None => true,
                    Some((li, lr)) => {
                        ratio < lr - PIVOT_TOL || (ratio < lr + PIVOT_TOL && basis[i] < basis[li])
                    }
                };
                if better {
                    leaving = Some((i, ratio));
                }
            }
        }
        let Some((row, _)) = leaving else {
            return SimplexEnd::Unbounded;
        };
        pivot(t, basis, row, j);
    }
    SimplexEnd::Stalled
}

fn pivot(t: &mut DMatrix<f64>, basis: &mut [usize], row: usize, col: usize) {
    let m = t.nrows();
    let cols = t.ncols();
    let p = t[(row, col)];
    for j in 0..cols {
        t[(row, j)] /= p;
    }
    for i in 0..m {
        if i != row {
            let factor = t[(i, col)];
            if factor != 0.0 {
                for j in 0..cols {
                    t[(i, j)] -= factor * t[(row, j)];
                }
            }
        }
    }
    basis[row] = col;
}

/// Maximize `objective . z` over `G z <= h` with free variables, via the
/// split `z = z+ - z-` and slack variables. Returns the maximizer.
pub(crate) fn maximize_free(
    objective: &DVector<f64>,
    g: &DMatrix<f64>,
    h: &DVector<f64>,
) -> LpOutcome {
    let m = g.nrows();
    let n = g.ncols();
    let total = 2 * n + m;
    let mut a = DMatrix::zeros(m, total);
    for i in 0..m {
        for j in 0..n {
            a[(i, j)] = g[(i, j)];
            a[(i, n + j)] = -g[(i, j)];
        }
        a[(i, 2 * n + i)] = 1.0;
    }
    let mut c = DVector::zeros(total);
    for j in 0..n {
        c[j] = -objective[j];
        c[n + j] = objective[j];
    }
    match solve_standard(&a, h, &c) {
        LpOutcome::Optimal { x, value } => {
            let z = DVector::from_fn(n, |j, _| x[j] - x[n + j]);
            LpOutcome::Optimal {
                x: z,
                value: -value,
            }
        }
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_a_textbook_lp() {
        // max 3x + 2y s.t. x + y <= 4, x + 3y <= 6, x,y >= 0: optimum (4, 0), 12
        let a = DMatrix::from_row_slice(2, 4, &[1.0, 1.0, 1.0, 0.0, 1.0, 3.0, 0.0, 1.0]);
        let b = DVector::from_row_slice(&[4.0, 6.0]);
        let c = DVector::from_row_slice(&[-3.0, -2.0, 0.0, 0.0]);
        match solve_standard(&a, &b, &c) {
            LpOutcome::Optimal { x, value } => {
                assert!((x[0] - 4.0).abs() < 1e-9);
                assert!(x[1].abs() < 1e-9);
                assert!((value + 12.0).abs() < 1e-9);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn detects_infeasibility() {
        // x = 1 and x = 2 simultaneously
        let a = DMatrix::from_row_slice(2, 1, &[1.0, 1.0]);
        let b = DVector::from_row_slice(&[1.0, 2.0]);
        let c = DVector::from_row_slice(&[1.0]);
        assert_eq!(solve_standard(&a, &b, &c), LpOutcome::Infeasible);
    }

    #[test]
    fn detects_unboundedness() {
        // min -x s.t. x - y = 0: x can grow without bound
        let a = DMatrix::from_row_slice(1, 2, &[1.0, -1.0]);
        let b = DVector::from_row_slice(&[0.0]);
        let c = DVector::from_row_slice(&[-1.0, 0.0]);
        assert_eq!(solve_standard(&a, &b, &c), LpOutcome::Unbounded);
    }

    #[test]
    fn maximize_free_handles_negative_coordinates() {
        // max v1 s.t. v1 <= -2 (so v1* = -2), |v| <= 5 box rows
        let g = DMatrix::from_row_slice(3, 1, &[1.0, 1.0, -1.0]);
        let h = DVector::from_row_slice(&[-2.0, 5.0, 5.0]);
        let obj = DVector::from_row_slice(&[1.0]);
        match maximize_free(&obj, &g, &h) {
            LpOutcome::Optimal { x, value } => {
                assert!((x[0] + 2.0).abs() < 1e-9);
                assert!((value + 2.0).abs() < 1e-9);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn feasibility_of_convex_combination() {
        // weights on {(-3,0), (-1,-2), (1,1)} summing to 1 with zero mean exist
        let pts = [[-3.0, 0.0], [-1.0, -2.0], [1.0, 1.0]];
        let mut a = DMatrix::zeros(3, 3);
        for (j, p) in pts.iter().enumerate() {
            a[(0, j)] = p[0];
            a[(1, j)] = p[1];
            a[(2, j)] = 1.0;
        }
        let b = DVector::from_row_slice(&[0.0, 0.0, 1.0]);
        let c = DVector::zeros(3);
        assert!(matches!(
            solve_standard(&a, &b, &c),
            LpOutcome::Optimal { .. }
        ));
    }
}
