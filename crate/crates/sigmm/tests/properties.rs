//! Property tests for the algebra and the surrogate machinery, on random
//! signomials rather than the bundled examples.

use proptest::prelude::*;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sigmm::surrogate::SurrogateCoordinate;
use sigmm::{
    majorize, minimize_coordinate, CompositeObjective, InnerSolveOptions, PositivePoint, Signomial,
    Term,
};

fn point(coords: &[f64]) -> PositivePoint {
    PositivePoint::new(coords.to_vec()).unwrap()
}

/// Random signomial with up to six terms and exponents in [-3, 3].
fn signomial_strategy(dim: usize) -> impl Strategy<Value = Signomial> {
    let term = (
        (-5.0f64..5.0).prop_filter("nonzero", |c| c.abs() > 1e-3),
        proptest::collection::vec(-3.0f64..3.0, dim),
    );
    proptest::collection::vec(term, 1..6).prop_map(move |terms| {
        let terms = terms
            .into_iter()
            .map(|(c, a)| Term::new(c, a).unwrap())
            .collect::<Vec<_>>();
        Signomial::new(dim, terms).unwrap()
    })
}

fn point_strategy(dim: usize) -> impl Strategy<Value = PositivePoint> {
    proptest::collection::vec(0.1f64..10.0, dim).prop_map(|c| PositivePoint::new(c).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    /// evaluate(square(f), x) equals evaluate(f, x)^2, relative to the scale
    /// of the expanded square (cancellation near zeros of f makes the naive
    /// relative-to-f^2 comparison meaningless).
    #[test]
    fn square_evaluates_to_square(f in signomial_strategy(3), x in point_strategy(3)) {
        let direct = f.evaluate(&x).unwrap();
        let squared = f.square().evaluate(&x).unwrap();
        // magnitude scale of the expanded square
        let y = x.log_coords();
        let term_scale: f64 = f
            .terms()
            .iter()
            .map(|t| {
                let e: f64 = t.exponents().iter().zip(&y).map(|(a, yi)| a * yi).sum();
                (t.coefficient().abs().ln() + e).exp()
            })
            .sum();
        let scale = (direct * direct).abs().max(term_scale * term_scale);
        prop_assert!((squared - direct * direct).abs() <= 1e-12 * scale.max(1e-300));
    }

    /// The analytic gradient matches central finite differences.
    #[test]
    fn gradient_matches_finite_differences(f in signomial_strategy(3), x in point_strategy(3)) {
        let analytic = f.gradient(&x).unwrap();
        let fx = f.evaluate(&x).unwrap();
        let numeric = sigmm::oracle::finite_difference_gradient(
            |p| f.evaluate(p),
            &x,
            &sigmm::oracle::relative_steps(&x, 1e-6),
        )
        .unwrap();
        for (a, b) in analytic.iter().zip(&numeric) {
            let scale = a.abs() + 1e-3 * (1.0 + fx.abs());
            prop_assert!((a - b).abs() <= 1e-5 * scale, "analytic {a}, numeric {b}");
        }
    }

    /// Dominance and tangency of the separated majorizer.
    #[test]
    fn surrogate_majorizes(f in signomial_strategy(3), xm in point_strategy(3), x in point_strategy(3)) {
        let obj = CompositeObjective::plain(f);
        let report = majorize(&obj, &xm).unwrap();
        let fx = obj.value(&x).unwrap();
        let sx = report.value_at(&x).unwrap();
        prop_assert!(sx >= fx - 1e-9 * (1.0 + fx.abs()), "surrogate {sx} below objective {fx}");
        let fa = obj.value(&xm).unwrap();
        let sa = report.value_at(&xm).unwrap();
        prop_assert!((sa - fa).abs() <= 1e-10 * (1.0 + fa.abs()));
    }

    /// Constraint normalization: nonnegative exponents, and r(x) = 0 exactly
    /// where h(x) = 1 (here via the scaled identity r = x^mu (h - 1)).
    #[test]
    fn normalize_constraint_is_faithful(h in signomial_strategy(2), x in point_strategy(2)) {
        let r = h.normalize_constraint();
        for t in r.terms() {
            for &e in t.exponents() {
                prop_assert!(e >= 0.0);
            }
        }
        // mu from the construction
        let mut mu = [0.0f64; 2];
        for t in h.terms() {
            for (m, &a) in mu.iter_mut().zip(t.exponents()) {
                *m = m.max(-a);
            }
        }
        let scale = x.coords()[0].powf(mu[0]) * x.coords()[1].powf(mu[1]);
        let hv = h.evaluate(&x).unwrap();
        let rv = r.evaluate(&x).unwrap();
        prop_assert!(
            (rv - scale * (hv - 1.0)).abs() <= 1e-9 * (1.0 + scale * (1.0 + hv.abs())),
            "r = {rv}, x^mu (h-1) = {}",
            scale * (hv - 1.0)
        );
    }
}

/// The one-dimensional solver agrees with a 200-step bisection oracle on
/// random coercive coordinates.
#[test]
fn inner_solver_matches_bisection_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x1d_2024);
    let opts = InnerSolveOptions::default();
    let mut tested = 0;
    while tested < 100 {
        // random posynomial coordinate via a random signomial surrogate
        let dim = 1 + (rng.random::<u32>() % 3) as usize;
        let terms: Vec<Term> = (0..1 + rng.random::<u32>() % 4)
            .map(|_| {
                let c = 0.1 + 5.0 * rng.random::<f64>();
                let a: Vec<f64> = (0..dim).map(|_| rng.random::<f64>() * 6.0 - 3.0).collect();
                Term::new(c, a).unwrap()
            })
            .collect();
        let f = CompositeObjective::plain(Signomial::new(dim, terms).unwrap());
        let anchor = point(
            &(0..dim)
                .map(|_| 0.1 + 9.9 * rng.random::<f64>())
                .collect::<Vec<_>>(),
        );
        let report = majorize(&f, &anchor).unwrap();
        for c in report.coordinates() {
            let x_mi = anchor.coords()[c.index()];
            let Ok(root) = minimize_coordinate(c, x_mi, &opts) else {
                continue;
            };
            let oracle = bisect_derivative(c, 1e-8, 1e8);
            let Some(oracle) = oracle else { continue };
            assert!(
                (root - oracle).abs() <= 1e-8 * oracle.abs().max(root.abs()),
                "solver {root}, oracle {oracle}"
            );
            // stationarity within the reported tolerance scale
            let residual = c.derivative(root).abs();
            let anchor_scale = c.derivative(x_mi).abs() + 1.0;
            assert!(
                residual <= 1e-6 * anchor_scale,
                "residual {residual} at root {root}"
            );
            tested += 1;
        }
    }
}

/// 200-step bisection on the sign of g' over [lo, hi]; None when the
/// derivative does not change sign on the interval.
fn bisect_derivative(c: &SurrogateCoordinate, lo: f64, hi: f64) -> Option<f64> {
    let (mut lo, mut hi) = (lo, hi);
    if !(c.derivative(lo) < 0.0 && c.derivative(hi) > 0.0) {
        return None;
    }
    for _ in 0..200 {
        let mid = (lo * hi).sqrt(); // geometric midpoint matches the log domain
        if c.derivative(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some((lo * hi).sqrt())
}

/// Log-domain strict convexity: the transformed derivative is strictly
/// increasing wherever power terms are present.
#[test]
fn log_domain_second_derivative_positive() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x2e_2024);
    for _ in 0..100 {
        let c = 0.1 + 5.0 * rng.random::<f64>();
        let p1 = 0.5 + 3.0 * rng.random::<f64>();
        let p2 = -(0.5 + 3.0 * rng.random::<f64>());
        let f = CompositeObjective::plain(
            Signomial::from_terms(1, &[(c, &[p1]), (1.0, &[p2])]).unwrap(),
        );
        let anchor = point(&[0.2 + 5.0 * rng.random::<f64>()]);
        let report = majorize(&f, &anchor).unwrap();
        let coord = &report.coordinates()[0];
        // finite-difference the derivative of y -> g(e^y)
        for _ in 0..10 {
            let y = rng.random::<f64>() * 6.0 - 3.0;
            let h = 1e-5;
            let d_lo = coord.derivative((y - h).exp()) * (y - h).exp();
            let d_hi = coord.derivative((y + h).exp()) * (y + h).exp();
            assert!(
                d_hi > d_lo,
                "transformed derivative not increasing at y = {y}"
            );
        }
    }
}

/// Descent holds along random plain solves, by construction of the driver.
#[test]
fn random_signomial_runs_descend() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x3f_2024);
    let cfg = sigmm::SolverConfig {
        max_iterations: 300,
        ..Default::default()
    };
    for _ in 0..50 {
        let dim = 1 + (rng.random::<u32>() % 3) as usize;
        let terms: Vec<Term> = (0..2 + rng.random::<u32>() % 4)
            .map(|_| {
                let c = (rng.random::<f64>() * 10.0 - 5.0).clamp(-5.0, 5.0);
                let c = if c.abs() < 0.05 { 0.5 } else { c };
                let a: Vec<f64> = (0..dim).map(|_| rng.random::<f64>() * 6.0 - 3.0).collect();
                Term::new(c, a).unwrap()
            })
            .collect();
        let Ok(sig) = Signomial::new(dim, terms) else {
            continue;
        };
        if sig.is_empty() {
            continue;
        }
        let f = CompositeObjective::plain(sig);
        let x0 = point(
            &(0..dim)
                .map(|_| 0.2 + 5.0 * rng.random::<f64>())
                .collect::<Vec<_>>(),
        );
        let trace = sigmm::solve(&f, &x0, &cfg).unwrap();
        let obj = trace.objectives();
        for w in obj.windows(2) {
            assert!(
                w[1] <= w[0] + 1e-12 * (1.0 + w[0].abs()),
                "ascent from {} to {}",
                w[0],
                w[1]
            );
        }
    }
}
