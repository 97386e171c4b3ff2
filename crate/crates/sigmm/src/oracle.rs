//! Independent oracles used to validate the solver paths.
//!
//! These are deliberately naive: exhaustive grid search, the closed-form
//! coordinate updates of the bundled low-dimensional examples, and central
//! finite differences. They live in the library (not just in test code) so
//! the command-line `verify` suites can replay them.

use crate::error::{Error, Result};
use crate::signomial::PositivePoint;

/// Cost guard for exhaustive search.
const GRID_DIMENSION_LIMIT: usize = 4;

/// Per-coordinate log-spaced grids.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    axes: Vec<(f64, f64, usize)>,
}

impl GridSpec {
    /// Each axis is `(lower, upper, count)` with `lower > 0`, `count >= 2`.
    pub fn new(axes: Vec<(f64, f64, usize)>) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::ZeroDimension);
        }
        for &(lo, hi, count) in &axes {
            if !(lo > 0.0) || !(hi > lo) {
                return Err(Error::NonPositiveCoordinate {
                    index: 0,
                    value: lo,
                });
            }
            if count < 2 {
                return Err(Error::InvalidCoefficient(count as f64));
            }
        }
        Ok(GridSpec { axes })
    }

    /// The same `(lower, upper, count)` on every axis.
    pub fn uniform(dimension: usize, lower: f64, upper: f64, count: usize) -> Result<Self> {
        GridSpec::new(vec![(lower, upper, count); dimension])
    }

    pub fn dimension(&self) -> usize {
        self.axes.len()
    }

    fn axis_values(&self, i: usize) -> Vec<f64> {
        let (lo, hi, count) = self.axes[i];
        let (llo, lhi) = (lo.ln(), hi.ln());
        (0..count)
            .map(|k| (llo + (lhi - llo) * k as f64 / (count - 1) as f64).exp())
            .collect()
    }
}

/// Exhaustively evaluate `f` over the grid and return the best point.
///
/// Restricted to four dimensions; the cost is the product of the axis counts.
pub fn grid_minimize<F>(f: F, grid: &GridSpec) -> Result<(PositivePoint, f64)>
where
    F: Fn(&[f64]) -> f64,
{
    let n = grid.dimension();
    if n > GRID_DIMENSION_LIMIT {
        return Err(Error::GridTooLarge {
            dimension: n,
            limit: GRID_DIMENSION_LIMIT,
        });
    }
    let axes: Vec<Vec<f64>> = (0..n).map(|i| grid.axis_values(i)).collect();
    let mut index = vec![0usize; n];
    let mut best_value = f64::INFINITY;
    let mut best_point = vec![axes[0][0]; n];
    let mut point = vec![0.0; n];
    loop {
        for i in 0..n {
            point[i] = axes[i][index[i]];
        }
        let v = f(&point);
        if v < best_value {
            best_value = v;
            best_point.copy_from_slice(&point);
        }
        // odometer increment
        let mut i = 0;
        loop {
            index[i] += 1;
            if index[i] < axes[i].len() {
                break;
            }
            index[i] = 0;
            i += 1;
            if i == n {
                return Ok((PositivePoint::new(best_point)?, best_value));
            }
        }
    }
}

/// The bundled test functions with published coordinate updates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClosedFormUpdate {
    F1,
    F2,
    F3,
    F4,
    F5,
}

impl ClosedFormUpdate {
    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "f1" => Ok(ClosedFormUpdate::F1),
            "f2" => Ok(ClosedFormUpdate::F2),
            "f3" => Ok(ClosedFormUpdate::F3),
            "f4" => Ok(ClosedFormUpdate::F4),
            "f5" => Ok(ClosedFormUpdate::F5),
            other => Err(Error::UnknownTestFunction(other.to_string())),
        }
    }

    fn dimension(&self) -> usize {
        match self {
            ClosedFormUpdate::F1 | ClosedFormUpdate::F2 | ClosedFormUpdate::F3 => 2,
            ClosedFormUpdate::F4 => 4,
            ClosedFormUpdate::F5 => 3,
        }
    }
}

/// One exact MM update of the named test function, from its published
/// per-coordinate minimizers. Used to validate the generic surrogate path
/// iteration by iteration.
pub fn closed_form_update(which: ClosedFormUpdate, x_m: &PositivePoint) -> Result<PositivePoint> {
    if x_m.dimension() != which.dimension() {
        return Err(Error::DimensionMismatch {
            expected: which.dimension(),
            found: x_m.dimension(),
        });
    }
    let x = x_m.coords();
    let next = match which {
        ClosedFormUpdate::F1 => {
            let r = x[0] / x[1];
            vec![
                (3.0 * (r * r + 1.0) * r).powf(0.2),
                (6.0 * (x[1] / x[0]).powi(2)).powf(0.2),
            ]
        }
        ClosedFormUpdate::F2 => {
            vec![(x[0] / x[1]).powf(2.0 / 3.0), (x[1] / x[0]).powf(1.0 / 3.0)]
        }
        ClosedFormUpdate::F3 => {
            vec![
                (x[0] / x[1]).powf(3.0 / 5.0),
                (2.0 * (x[1] / x[0]).powi(2)).powf(0.2),
            ]
        }
        ClosedFormUpdate::F4 => {
            vec![
                (x[0].powi(3) * x[2] * x[3] / x[1]).powf(0.25),
                (x[1].powi(3) * x[2] * x[3] / x[0]).powf(0.25),
                (x[2].powi(3) * x[0] * x[1] / x[3]).powf(0.25),
                (x[3].powi(3) * x[0] * x[1] / x[2]).powf(0.25),
            ]
        }
        ClosedFormUpdate::F5 => {
            let total: f64 = x.iter().sum();
            (0..3)
                .map(|i| {
                    let others = total - x[i];
                    (x[i] * x[i] / (others * total)).sqrt()
                })
                .collect()
        }
    };
    PositivePoint::new(next)
}

/// Central finite differences with per-coordinate steps `h_i`.
///
/// Steps must keep `x_i - h_i` positive.
pub fn finite_difference_gradient<F>(f: F, x: &PositivePoint, h: &[f64]) -> Result<Vec<f64>>
where
    F: Fn(&PositivePoint) -> Result<f64>,
{
    let n = x.dimension();
    if h.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: h.len(),
        });
    }
    let mut g = vec![0.0; n];
    for i in 0..n {
        let hi = h[i];
        if !(hi > 0.0) || x.coords()[i] - hi <= 0.0 {
            return Err(Error::NonPositiveCoordinate {
                index: i,
                value: x.coords()[i] - hi,
            });
        }
        let mut up = x.coords().to_vec();
        up[i] += hi;
        let mut down = x.coords().to_vec();
        down[i] -= hi;
        let fu = f(&PositivePoint::new(up)?)?;
        let fd = f(&PositivePoint::new(down)?)?;
        g[i] = (fu - fd) / (2.0 * hi);
    }
    Ok(g)
}

/// Relative steps `h_i = scale * x_i`, the convention of the gradient checks.
pub fn relative_steps(x: &PositivePoint, scale: f64) -> Vec<f64> {
    x.coords().iter().map(|&v| scale * v).collect()
}
