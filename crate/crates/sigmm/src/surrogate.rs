//! Parameter-separated majorization and the one-dimensional inner solver.
//!
//! At an anchor `x_m` every objective handled here is majorized by a sum of
//! univariate functions
//!
//! ```text
//! g_i(x_i) = sum_k w_k x_i^{p_k} + L_i ln x_i,     w_k > 0,
//! ```
//!
//! one per coordinate, plus a constant. Positive-coefficient terms contribute
//! the power terms through the arithmetic-geometric mean bound with exponent
//! `p = |alpha|_1 sgn(alpha_i)`; negative-coefficient terms and the log
//! compositions contribute the `ln x_i` pieces through supporting-hyperplane
//! and Jensen bounds.
//!
//! All weights are carried in log form (the `ln x_i` coefficient as a signed
//! pair of log magnitudes), and the stationarity equation is evaluated in a
//! shifted exponent frame, so coordinate minimization keeps resolving the
//! true balance even on runs whose iterates leave `f64` range by hundreds of
//! orders of magnitude.

use crate::error::{Error, Result};
use crate::signomial::{dot, CompositeObjective, PositivePoint, Signomial};

/// One `w * x^p` piece of a coordinate surrogate, with `w` stored as `ln w`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerTerm {
    ln_weight: f64,
    power: f64,
}

impl PowerTerm {
    pub fn weight(&self) -> f64 {
        self.ln_weight.exp()
    }

    pub fn ln_weight(&self) -> f64 {
        self.ln_weight
    }

    pub fn power(&self) -> f64 {
        self.power
    }
}

/// `ln(e^a + e^b)` with empty parts encoded as negative infinity.
fn lse2(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// The univariate surrogate of one coordinate at a fixed anchor.
///
/// The `ln x_i` coefficient is kept as two log magnitudes (positive and
/// negative contributions) so that boundary-bound runs cannot underflow it
/// to an exact zero and flip the coercivity analysis.
#[derive(Debug, Clone, PartialEq)]
pub struct SurrogateCoordinate {
    index: usize,
    power_terms: Vec<PowerTerm>,
    lw_pos: f64,
    lw_neg: f64,
}

impl SurrogateCoordinate {
    pub fn index(&self) -> usize {
        self.index
    }

    pub fn power_terms(&self) -> &[PowerTerm] {
        &self.power_terms
    }

    /// Coefficient of `ln x_i`.
    pub fn log_weight(&self) -> f64 {
        self.lw_pos.exp() - self.lw_neg.exp()
    }

    /// Sign of the `ln x_i` coefficient: -1, 0, or 1.
    fn log_weight_sign(&self) -> i8 {
        if self.lw_pos > self.lw_neg {
            1
        } else if self.lw_neg > self.lw_pos {
            -1
        } else {
            0
        }
    }

    /// Surrogate value `g_i(x_i)` as a function of the log coordinate.
    pub(crate) fn value_at_log(&self, y: f64) -> f64 {
        let mut v = self.log_weight() * y;
        for t in &self.power_terms {
            v += (t.ln_weight + t.power * y).exp();
        }
        v
    }

    /// `x g_i'(x)` at the log coordinate `y`, as `(mantissa, shift)` with the
    /// true value `mantissa * exp(shift)`. The shift keeps the dominant term
    /// of the balance at unit scale.
    fn phi_shifted(&self, y: f64) -> (f64, f64) {
        let mut shift = lse2(self.lw_pos, self.lw_neg);
        for t in &self.power_terms {
            let e = t.ln_weight + t.power * y + t.power.abs().ln();
            if e > shift {
                shift = e;
            }
        }
        if shift == f64::NEG_INFINITY {
            return (0.0, 0.0);
        }
        let mut v = (self.lw_pos - shift).exp() - (self.lw_neg - shift).exp();
        for t in &self.power_terms {
            v += t.power * (t.ln_weight + t.power * y - shift).exp();
        }
        (v, shift)
    }

    /// Second derivative of `y -> g_i(e^y)` in the same shifted frame.
    fn phi_prime_shifted(&self, y: f64, shift: f64) -> f64 {
        let mut v = 0.0;
        for t in &self.power_terms {
            v += t.power * t.power * (t.ln_weight + t.power * y - shift).exp();
        }
        v
    }

    /// Derivative `g_i'(x)`.
    pub fn derivative(&self, x: f64) -> f64 {
        let y = x.ln();
        let (v, shift) = self.phi_shifted(y);
        v * (shift - y).exp()
    }
}

/// A full majorizer: per-coordinate surrogates plus the constant that restores
/// tangency with the objective at the anchor.
#[derive(Debug, Clone, PartialEq)]
pub struct SurrogateReport {
    anchor: PositivePoint,
    coordinates: Vec<SurrogateCoordinate>,
    constant_offset: f64,
}

impl SurrogateReport {
    pub fn anchor(&self) -> &PositivePoint {
        &self.anchor
    }

    pub fn coordinates(&self) -> &[SurrogateCoordinate] {
        &self.coordinates
    }

    pub fn constant_offset(&self) -> f64 {
        self.constant_offset
    }

    /// Evaluate the full surrogate at a point.
    pub fn value_at(&self, x: &PositivePoint) -> Result<f64> {
        if x.dimension() != self.anchor.dimension() {
            return Err(Error::DimensionMismatch {
                expected: self.anchor.dimension(),
                found: x.dimension(),
            });
        }
        let y = x.log_coords();
        let sum: f64 = self
            .coordinates
            .iter()
            .map(|c| c.value_at_log(y[c.index]))
            .sum();
        Ok(sum + self.constant_offset)
    }
}

/// Options for the one-dimensional Newton/bisection solver.
#[derive(Debug, Clone, PartialEq)]
pub struct InnerSolveOptions {
    /// Tolerance on the stationarity residual `x g'(x)`, measured against the
    /// anchor residual `|x_mi g'(x_mi)| + 1`.
    pub inner_tolerance: f64,
    pub max_inner_iterations: usize,
    /// Growth factor for the bracketing interval in the log domain.
    pub bracket_expansion_factor: f64,
}

impl Default for InnerSolveOptions {
    fn default() -> Self {
        InnerSolveOptions {
            inner_tolerance: 1e-12,
            max_inner_iterations: 100,
            bracket_expansion_factor: 10.0,
        }
    }
}

/// Direction in which a non-coercive coordinate surrogate decreases.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DivergenceDirection {
    TowardZero,
    TowardInfinity,
}

/// Signal returned when a coordinate surrogate has no stationary point on
/// `(0, inf)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoordinateDivergence {
    pub direction: DivergenceDirection,
}

/// Where a coordinate minimization can end up.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum CoordinateSolve {
    /// Interior minimizer, in log coordinates.
    Root(f64),
    /// The surrogate is constant in this coordinate.
    Flat,
    Diverges(DivergenceDirection),
}

/// Build the separated majorizer of `f` at `x_m`.
///
/// The report satisfies `value_at(x) >= f(x)` on the positive orthant with
/// equality at `x = x_m`.
pub fn majorize(f: &CompositeObjective, x_m: &PositivePoint) -> Result<SurrogateReport> {
    if x_m.dimension() != f.dimension() {
        return Err(Error::DimensionMismatch {
            expected: f.dimension(),
            found: x_m.dimension(),
        });
    }
    let y = x_m.log_coords();
    let (coordinates, constant_offset) = build_surrogate(f, &y);
    Ok(SurrogateReport {
        anchor: x_m.clone(),
        coordinates,
        constant_offset,
    })
}

/// Minimize one coordinate surrogate.
///
/// Returns the interior minimizer when it exists; for a non-coercive
/// coordinate returns the divergence direction instead of iterating forever.
/// A coordinate with no dependence on `x_i` reports the anchor itself.
pub fn minimize_coordinate(
    g: &SurrogateCoordinate,
    x_mi: f64,
    opts: &InnerSolveOptions,
) -> std::result::Result<f64, CoordinateDivergence> {
    match solve_coordinate_log(g, x_mi.ln(), opts) {
        CoordinateSolve::Root(y) => Ok(y.exp()),
        CoordinateSolve::Flat => Ok(x_mi),
        CoordinateSolve::Diverges(direction) => Err(CoordinateDivergence { direction }),
    }
}

/// Core per-coordinate construction, in log coordinates. Returns the
/// coordinate surrogates and the tangency constant.
pub(crate) fn build_surrogate(
    f: &CompositeObjective,
    y: &[f64],
) -> (Vec<SurrogateCoordinate>, f64) {
    let n = y.len();
    let mut acc = Accumulator::new(n);
    match f {
        CompositeObjective::Plain(s) => acc.add_plain(s, y, 0.0),
        CompositeObjective::NegLog(p) => acc.add_neg_log(p, y),
        CompositeObjective::Log(p) => {
            // ln p(x) <= ln p(x_m) - 1 + p(x)/p(x_m); majorize p with weights
            // scaled by 1/p(x_m).
            let lse = p.ln_eval_log(y);
            acc.offset += lse - 1.0;
            acc.add_plain(p, y, -lse);
        }
        CompositeObjective::PlainPlusNegLog(s, p) => {
            acc.add_plain(s, y, 0.0);
            acc.add_neg_log(p, y);
        }
    }
    acc.finish()
}

/// Per-coordinate accumulation of power terms and signed log weights.
struct Accumulator {
    power_terms: Vec<Vec<PowerTerm>>,
    lw_pos: Vec<f64>,
    lw_neg: Vec<f64>,
    offset: f64,
}

impl Accumulator {
    fn new(n: usize) -> Self {
        Accumulator {
            power_terms: vec![Vec::new(); n],
            lw_pos: vec![f64::NEG_INFINITY; n],
            lw_neg: vec![f64::NEG_INFINITY; n],
            offset: 0.0,
        }
    }

    /// Add a signed `coefficient * ln x_i` with `ln |coefficient|` given.
    fn add_log_weight(&mut self, i: usize, negative: bool, ln_magnitude: f64) {
        if ln_magnitude == f64::NEG_INFINITY {
            return;
        }
        if negative {
            self.lw_neg[i] = lse2(self.lw_neg[i], ln_magnitude);
        } else {
            self.lw_pos[i] = lse2(self.lw_pos[i], ln_magnitude);
        }
    }

    /// Positive-coefficient terms via the AM-GM bound, negative ones via the
    /// supporting-hyperplane bound, all scaled by `exp(ln_scale)`.
    fn add_plain(&mut self, s: &Signomial, y: &[f64], ln_scale: f64) {
        for t in s.terms() {
            let c = t.coefficient();
            let alpha = t.exponents();
            let anchor_exponent = dot(alpha, y);
            if c > 0.0 {
                let norm1 = t.exponent_norm();
                if norm1 == 0.0 {
                    self.offset += (ln_scale + c.ln()).exp();
                    continue;
                }
                let ln_c = c.ln();
                for (i, &a) in alpha.iter().enumerate() {
                    if a == 0.0 {
                        continue;
                    }
                    let power = norm1 * a.signum();
                    let ln_weight =
                        ln_scale + ln_c + anchor_exponent + (a.abs() / norm1).ln() - power * y[i];
                    self.power_terms[i].push(PowerTerm { ln_weight, power });
                }
            } else {
                // c < 0: c x^alpha <= a_m (1 + sum_i alpha_i (ln x_i - ln x_mi))
                // with a_m the term value at the anchor.
                let ln_mag = ln_scale + (-c).ln() + anchor_exponent;
                let a_m = -ln_mag.exp();
                let mut anchor_log_part = 0.0;
                for (i, &a) in alpha.iter().enumerate() {
                    if a != 0.0 {
                        // contribution a_m * a: negative when a > 0
                        self.add_log_weight(i, a > 0.0, ln_mag + a.abs().ln());
                        anchor_log_part += a * y[i];
                    }
                }
                self.offset += a_m * (1.0 - anchor_log_part);
            }
        }
    }

    /// Jensen bound for `-ln p(x)`: coordinate `i` receives
    /// `-sum_alpha w_alpha alpha_i ln x_i` with softmax weights `w_alpha`.
    fn add_neg_log(&mut self, p: &Signomial, y: &[f64]) {
        let lse = p.ln_eval_log(y);
        for t in p.terms() {
            let alpha = t.exponents();
            let anchor_exponent = dot(alpha, y);
            let ln_w = t.coefficient().ln() + anchor_exponent - lse;
            for (i, &a) in alpha.iter().enumerate() {
                if a != 0.0 {
                    // contribution -w * a: negative when a > 0
                    self.add_log_weight(i, a > 0.0, ln_w + a.abs().ln());
                }
            }
            self.offset -= ln_w.exp() * (lse - anchor_exponent);
        }
    }

    fn finish(self) -> (Vec<SurrogateCoordinate>, f64) {
        let coords = self
            .power_terms
            .into_iter()
            .zip(self.lw_pos)
            .zip(self.lw_neg)
            .enumerate()
            .map(
                |(index, ((power_terms, lw_pos), lw_neg))| SurrogateCoordinate {
                    index,
                    power_terms,
                    lw_pos,
                    lw_neg,
                },
            )
            .collect();
        (coords, self.offset)
    }
}

/// Combine two per-coordinate surrogate sets for the same dimension, summing
/// power terms and log weights coordinate by coordinate.
pub(crate) fn merge_coordinates(
    mut a: Vec<SurrogateCoordinate>,
    b: Vec<SurrogateCoordinate>,
) -> Vec<SurrogateCoordinate> {
    debug_assert_eq!(a.len(), b.len());
    for (ca, cb) in a.iter_mut().zip(b) {
        debug_assert_eq!(ca.index, cb.index);
        ca.power_terms.extend(cb.power_terms);
        ca.lw_pos = lse2(ca.lw_pos, cb.lw_pos);
        ca.lw_neg = lse2(ca.lw_neg, cb.lw_neg);
    }
    a
}

/// Find the root of the increasing function `y -> x g_i'(x)` by safeguarded
/// Newton with a bisection fallback on a sign-changing bracket.
pub(crate) fn solve_coordinate_log(
    g: &SurrogateCoordinate,
    y0: f64,
    opts: &InnerSolveOptions,
) -> CoordinateSolve {
    let has_pos = g.power_terms.iter().any(|t| t.power > 0.0);
    let has_neg = g.power_terms.iter().any(|t| t.power < 0.0);
    let l_sign = g.log_weight_sign();
    if g.power_terms.is_empty() && l_sign == 0 {
        return CoordinateSolve::Flat;
    }
    // The derivative tends to the log-weight as the vanishing side wins; no
    // sign change means the surrogate decreases monotonically toward a
    // boundary.
    if !has_pos && l_sign <= 0 {
        return CoordinateSolve::Diverges(DivergenceDirection::TowardInfinity);
    }
    if !has_neg && l_sign >= 0 {
        return CoordinateSolve::Diverges(DivergenceDirection::TowardZero);
    }

    let sign_at = |y: f64| -> f64 { g.phi_shifted(y).0 };

    // Bracket the root around the anchor, growing the half-width.
    let mut half = opts.bracket_expansion_factor.ln().max(0.1);
    let (mut lo, mut hi) = (y0 - half, y0 + half);
    let mut expansions = 0;
    while sign_at(lo) > 0.0 {
        half *= opts.bracket_expansion_factor;
        lo = y0 - half;
        expansions += 1;
        if expansions > 200 {
            return CoordinateSolve::Diverges(DivergenceDirection::TowardZero);
        }
    }
    expansions = 0;
    while sign_at(hi) < 0.0 {
        half *= opts.bracket_expansion_factor;
        hi = y0 + half;
        expansions += 1;
        if expansions > 200 {
            return CoordinateSolve::Diverges(DivergenceDirection::TowardInfinity);
        }
    }

    // Residual test on the shifted mantissa: |phi| / (local term scale) is
    // the relative imbalance of the stationarity equation, which stays
    // meaningful at any magnitude. An anchor-relative threshold would fire
    // spuriously at points whose terms are all tiny but far from balance.

    let mut y = y0.clamp(lo, hi);
    let (mut v, mut shift) = g.phi_shifted(y);
    if v == 0.0 {
        return CoordinateSolve::Root(y);
    }
    let mut last_width = f64::INFINITY;
    for _ in 0..opts.max_inner_iterations {
        if v > 0.0 {
            hi = y;
        } else {
            lo = y;
        }
        let width = hi - lo;
        // Newton crawls on exponentials when started far from the balance;
        // fall back to bisection whenever the bracket stops halving.
        let force_bisection = width > 0.5 * last_width;
        last_width = width;
        let d2 = g.phi_prime_shifted(y, shift);
        let newton = if v.is_finite() && d2.is_finite() && d2 > 0.0 {
            y - v / d2
        } else {
            f64::NAN
        };
        let next = if !force_bisection && newton.is_finite() && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        let step = (next - y).abs();
        let (nv, ns) = g.phi_shifted(next);
        if nv.abs() <= opts.inner_tolerance
            || step <= 2.0 * f64::EPSILON * (1.0 + y.abs())
            || hi - lo <= 4.0 * f64::EPSILON * (1.0 + y.abs())
        {
            return CoordinateSolve::Root(next);
        }
        y = next;
        v = nv;
        shift = ns;
    }
    CoordinateSolve::Root(y)
}
