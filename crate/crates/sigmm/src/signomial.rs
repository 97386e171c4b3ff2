//! Signomials, points in the positive orthant, and the composite objectives
//! built from them.
//!
//! A signomial is a finite sum of terms `c * x1^a1 * ... * xn^an` over the
//! open positive orthant. Coefficients may carry either sign and exponents may
//! be fractional. Terms are evaluated through the log domain,
//! `c * exp(a . ln x)`, so large exponent norms do not overflow prematurely.

use crate::error::{Error, Result};

/// One monomial term `coefficient * x^exponents`.
#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    coefficient: f64,
    exponents: Vec<f64>,
}

impl Term {
    /// A term with nonzero finite coefficient and finite exponents.
    pub fn new(coefficient: f64, exponents: Vec<f64>) -> Result<Self> {
        if coefficient == 0.0 || !coefficient.is_finite() {
            return Err(Error::InvalidCoefficient(coefficient));
        }
        if let Some(&e) = exponents.iter().find(|e| !e.is_finite()) {
            return Err(Error::InvalidExponent(e));
        }
        // Normalize -0.0 so exponent vectors compare and merge exactly.
        let exponents = exponents
            .into_iter()
            .map(|e| if e == 0.0 { 0.0 } else { e })
            .collect();
        Ok(Term {
            coefficient,
            exponents,
        })
    }

    pub fn coefficient(&self) -> f64 {
        self.coefficient
    }

    pub fn exponents(&self) -> &[f64] {
        &self.exponents
    }

    /// l1 norm of the exponent vector.
    pub fn exponent_norm(&self) -> f64 {
        self.exponents.iter().map(|a| a.abs()).sum()
    }
}

/// A finite sum of terms with pairwise distinct exponent vectors.
///
/// Duplicate exponent vectors are merged by adding coefficients at
/// construction; terms merged to zero are dropped. The term list is kept
/// sorted, so equal signomials have identical representations.
#[derive(Debug, Clone, PartialEq)]
pub struct Signomial {
    dimension: usize,
    terms: Vec<Term>,
}

impl Signomial {
    pub fn new(dimension: usize, terms: Vec<Term>) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::ZeroDimension);
        }
        for t in &terms {
            if t.exponents.len() != dimension {
                return Err(Error::DimensionMismatch {
                    expected: dimension,
                    found: t.exponents.len(),
                });
            }
        }
        Ok(Signomial {
            dimension,
            terms: canonicalize(terms),
        })
    }

    /// Convenience constructor from `(coefficient, exponents)` pairs.
    pub fn from_terms(dimension: usize, terms: &[(f64, &[f64])]) -> Result<Self> {
        let terms = terms
            .iter()
            .map(|(c, a)| Term::new(*c, a.to_vec()))
            .collect::<Result<Vec<_>>>()?;
        Signomial::new(dimension, terms)
    }

    /// The zero signomial (empty term list).
    pub fn zero(dimension: usize) -> Result<Self> {
        Signomial::new(dimension, Vec::new())
    }

    /// The constant signomial `value` (empty when `value == 0`).
    pub fn constant(dimension: usize, value: f64) -> Result<Self> {
        if value == 0.0 {
            return Signomial::zero(dimension);
        }
        Signomial::new(dimension, vec![Term::new(value, vec![0.0; dimension])?])
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// True when every coefficient is positive and the term list is nonempty.
    pub fn is_posynomial(&self) -> bool {
        !self.terms.is_empty() && self.terms.iter().all(|t| t.coefficient > 0.0)
    }

    /// Evaluate at a positive point.
    pub fn evaluate(&self, x: &PositivePoint) -> Result<f64> {
        self.check_dim(x.dimension())?;
        Ok(self.eval_log(&x.log_coords()))
    }

    /// Evaluate, reporting whether any term overflowed to an infinity.
    ///
    /// When terms of one sign overflow the value is the matching signed
    /// infinity; when both signs overflow the value is NaN.
    pub fn evaluate_checked(&self, x: &PositivePoint) -> Result<Evaluation> {
        self.check_dim(x.dimension())?;
        let y = x.log_coords();
        let mut sum = 0.0;
        let mut pos_overflow = false;
        let mut neg_overflow = false;
        for t in &self.terms {
            let v = t.coefficient * dot(&t.exponents, &y).exp();
            if v.is_finite() {
                sum += v;
            } else if v > 0.0 {
                pos_overflow = true;
            } else {
                neg_overflow = true;
            }
        }
        let value = match (pos_overflow, neg_overflow) {
            (false, false) => sum,
            (true, false) => f64::INFINITY,
            (false, true) => f64::NEG_INFINITY,
            (true, true) => f64::NAN,
        };
        Ok(Evaluation {
            value,
            overflowed: pos_overflow || neg_overflow,
        })
    }

    /// Evaluate from log coordinates `y = ln x`.
    pub(crate) fn eval_log(&self, y: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|t| t.coefficient * dot(&t.exponents, y).exp())
            .sum()
    }

    /// `ln f(x)` for a posynomial, from log coordinates, via log-sum-exp.
    ///
    /// Callers must have checked `is_posynomial`.
    pub(crate) fn ln_eval_log(&self, y: &[f64]) -> f64 {
        debug_assert!(self.is_posynomial());
        let mut max = f64::NEG_INFINITY;
        for t in &self.terms {
            let e = t.coefficient.ln() + dot(&t.exponents, y);
            if e > max {
                max = e;
            }
        }
        if !max.is_finite() {
            return max;
        }
        let sum: f64 = self
            .terms
            .iter()
            .map(|t| (t.coefficient.ln() + dot(&t.exponents, y) - max).exp())
            .sum();
        max + sum.ln()
    }

    /// Analytic gradient at a positive point.
    pub fn gradient(&self, x: &PositivePoint) -> Result<Vec<f64>> {
        self.check_dim(x.dimension())?;
        Ok(self.gradient_log(&x.log_coords()))
    }

    /// Gradient with respect to x, computed from log coordinates.
    pub(crate) fn gradient_log(&self, y: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; self.dimension];
        for t in &self.terms {
            let e = dot(&t.exponents, y);
            for (i, &a) in t.exponents.iter().enumerate() {
                if a != 0.0 {
                    g[i] += t.coefficient * a * (e - y[i]).exp();
                }
            }
        }
        g
    }

    /// The product of this signomial with itself, duplicates merged.
    pub fn square(&self) -> Signomial {
        let mut terms = Vec::with_capacity(self.terms.len() * self.terms.len());
        for a in &self.terms {
            for b in &self.terms {
                let exps: Vec<f64> = a
                    .exponents
                    .iter()
                    .zip(&b.exponents)
                    .map(|(p, q)| p + q)
                    .collect();
                // Products of valid terms stay valid.
                terms.push(Term::new(a.coefficient * b.coefficient, exps).expect("valid term"));
            }
        }
        Signomial {
            dimension: self.dimension,
            terms: canonicalize(terms),
        }
    }

    /// Sum of two signomials over the same variables.
    pub fn add(&self, other: &Signomial) -> Result<Signomial> {
        self.check_dim(other.dimension)?;
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Ok(Signomial {
            dimension: self.dimension,
            terms: canonicalize(terms),
        })
    }

    /// This signomial scaled by a constant.
    pub fn scale(&self, factor: f64) -> Result<Signomial> {
        if !factor.is_finite() {
            return Err(Error::InvalidCoefficient(factor));
        }
        if factor == 0.0 {
            return Signomial::zero(self.dimension);
        }
        let terms = self
            .terms
            .iter()
            .map(|t| Term {
                coefficient: factor * t.coefficient,
                exponents: t.exponents.clone(),
            })
            .collect();
        Ok(Signomial {
            dimension: self.dimension,
            terms,
        })
    }

    /// This signomial plus a constant.
    pub fn add_constant(&self, value: f64) -> Result<Signomial> {
        self.add(&Signomial::constant(self.dimension, value)?)
    }

    /// Rewrite the constraint `h(x) = 1` (or `h(x) <= 1`) as `r(x) = 0`
    /// (resp. `r(x) <= 0`) with all exponents nonnegative.
    ///
    /// Multiplies `h` by `x^mu` with `mu_i = max_beta max(-beta_i, 0)` and
    /// subtracts `x^mu`. On the positive orthant `r(x) = 0` exactly when
    /// `h(x) = 1`.
    pub fn normalize_constraint(&self) -> Signomial {
        let mut mu = vec![0.0; self.dimension];
        for t in &self.terms {
            for (m, &a) in mu.iter_mut().zip(&t.exponents) {
                *m = f64::max(*m, -a);
            }
        }
        let mut terms: Vec<Term> = self
            .terms
            .iter()
            .map(|t| Term {
                coefficient: t.coefficient,
                exponents: t.exponents.iter().zip(&mu).map(|(a, m)| a + m).collect(),
            })
            .collect();
        terms.push(Term {
            coefficient: -1.0,
            exponents: mu,
        });
        Signomial {
            dimension: self.dimension,
            terms: canonicalize(terms),
        }
    }

    fn check_dim(&self, found: usize) -> Result<()> {
        if found != self.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                found,
            });
        }
        Ok(())
    }
}

/// Result of a checked evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub value: f64,
    pub overflowed: bool,
}

fn canonicalize(mut terms: Vec<Term>) -> Vec<Term> {
    terms.sort_by(|a, b| {
        for (p, q) in a.exponents.iter().zip(&b.exponents) {
            match p.total_cmp(q) {
                std::cmp::Ordering::Equal => continue,
                other => return other,
            }
        }
        std::cmp::Ordering::Equal
    });
    let mut merged: Vec<Term> = Vec::with_capacity(terms.len());
    for t in terms {
        match merged.last_mut() {
            Some(last) if last.exponents == t.exponents => last.coefficient += t.coefficient,
            _ => merged.push(t),
        }
    }
    merged.retain(|t| t.coefficient != 0.0);
    merged
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| p * q).sum()
}

/// A point in the open positive orthant.
#[derive(Debug, Clone, PartialEq)]
pub struct PositivePoint {
    coords: Vec<f64>,
}

impl PositivePoint {
    /// Construction rejects nonpositive or non-finite entries.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::ZeroDimension);
        }
        for (index, &value) in coords.iter().enumerate() {
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::NonPositiveCoordinate { index, value });
            }
        }
        Ok(PositivePoint { coords })
    }

    /// The point `exp(y)`, clamping each coordinate to the positive finite
    /// range of `f64`. Solvers track iterates in log coordinates; the clamp
    /// only engages on runs already declared divergent.
    pub fn from_log(y: &[f64]) -> Self {
        let coords = y
            .iter()
            .map(|&yi| yi.exp().clamp(f64::MIN_POSITIVE, f64::MAX))
            .collect();
        PositivePoint { coords }
    }

    pub fn dimension(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// The log-domain image `y` with `x_i = exp(y_i)`.
    pub fn log_coords(&self) -> Vec<f64> {
        self.coords.iter().map(|&x| x.ln()).collect()
    }
}

/// Objectives handled by the solver: a signomial, optionally composed with
/// the logarithm.
///
/// The log modes require the underlying signomial to be a posynomial so that
/// the logarithm is defined on the whole orthant.
#[derive(Debug, Clone, PartialEq)]
pub enum CompositeObjective {
    /// `f(x)` for a signomial `f`.
    Plain(Signomial),
    /// `-ln p(x)` for a posynomial `p`.
    NegLog(Signomial),
    /// `ln p(x)` for a posynomial `p`.
    Log(Signomial),
    /// `f(x) - ln p(x)` for a signomial `f` and posynomial `p`.
    PlainPlusNegLog(Signomial, Signomial),
}

impl CompositeObjective {
    pub fn plain(f: Signomial) -> Self {
        CompositeObjective::Plain(f)
    }

    pub fn neg_log(p: Signomial) -> Result<Self> {
        if !p.is_posynomial() {
            return Err(Error::NotPosynomial);
        }
        Ok(CompositeObjective::NegLog(p))
    }

    pub fn log(p: Signomial) -> Result<Self> {
        if !p.is_posynomial() {
            return Err(Error::NotPosynomial);
        }
        Ok(CompositeObjective::Log(p))
    }

    pub fn plain_plus_neg_log(f: Signomial, p: Signomial) -> Result<Self> {
        if !p.is_posynomial() {
            return Err(Error::NotPosynomial);
        }
        if f.dimension() != p.dimension() {
            return Err(Error::DimensionMismatch {
                expected: f.dimension(),
                found: p.dimension(),
            });
        }
        Ok(CompositeObjective::PlainPlusNegLog(f, p))
    }

    pub fn dimension(&self) -> usize {
        match self {
            CompositeObjective::Plain(f)
            | CompositeObjective::NegLog(f)
            | CompositeObjective::Log(f)
            | CompositeObjective::PlainPlusNegLog(f, _) => f.dimension(),
        }
    }

    /// The plain signomial when this objective is one and it is a posynomial.
    /// Used by the diagnostics, which only apply to posynomials.
    pub fn as_posynomial(&self) -> Option<&Signomial> {
        match self {
            CompositeObjective::Plain(f) if f.is_posynomial() => Some(f),
            _ => None,
        }
    }

    pub fn value(&self, x: &PositivePoint) -> Result<f64> {
        if x.dimension() != self.dimension() {
            return Err(Error::DimensionMismatch {
                expected: self.dimension(),
                found: x.dimension(),
            });
        }
        Ok(self.value_log(&x.log_coords()))
    }

    pub(crate) fn value_log(&self, y: &[f64]) -> f64 {
        match self {
            CompositeObjective::Plain(f) => f.eval_log(y),
            CompositeObjective::NegLog(p) => -p.ln_eval_log(y),
            CompositeObjective::Log(p) => p.ln_eval_log(y),
            CompositeObjective::PlainPlusNegLog(f, p) => f.eval_log(y) - p.ln_eval_log(y),
        }
    }

    pub fn gradient(&self, x: &PositivePoint) -> Result<Vec<f64>> {
        if x.dimension() != self.dimension() {
            return Err(Error::DimensionMismatch {
                expected: self.dimension(),
                found: x.dimension(),
            });
        }
        let y = x.log_coords();
        let g = match self {
            CompositeObjective::Plain(f) => f.gradient_log(&y),
            CompositeObjective::NegLog(p) => {
                let v = p.eval_log(&y);
                p.gradient_log(&y).into_iter().map(|gi| -gi / v).collect()
            }
            CompositeObjective::Log(p) => {
                let v = p.eval_log(&y);
                p.gradient_log(&y).into_iter().map(|gi| gi / v).collect()
            }
            CompositeObjective::PlainPlusNegLog(f, p) => {
                let v = p.eval_log(&y);
                f.gradient_log(&y)
                    .into_iter()
                    .zip(p.gradient_log(&y))
                    .map(|(a, b)| a - b / v)
                    .collect()
            }
        };
        Ok(g)
    }
}
