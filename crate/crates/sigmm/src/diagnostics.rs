//! Checkable optimality conditions for posynomials.
//!
//! For a posynomial with exponent set `S`, the log reparameterization
//! `h(y) = sum c_a exp(a.y)` is convex; three structural questions decide how
//! a minimization run can behave:
//!
//! - strict convexity of `h` holds exactly when the exponents span all of
//!   `R^n` (checked by rank);
//! - coercivity holds exactly when the origin lies in the interior of the
//!   convex hull of `S`, equivalently `max_a a.v > 0` for every direction
//!   `v != 0` (checked by small linear programs over the recession cone);
//! - the infimum is attained exactly when the origin lies in the hull at all
//!   (checked by a feasibility program; when it fails, a strict separating
//!   direction is returned as a certificate).
//!
//! Every `No` verdict carries a certificate direction that is re-verified
//! against each exponent vector before being returned, so verdicts may be
//! `Unknown` but never unsound.

use crate::driver::IterationTrace;
use crate::error::Result;
use crate::signomial::{CompositeObjective, Signomial};
use crate::simplex::{maximize_free, solve_standard, LpOutcome};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Certificate acceptance margin, matching the soundness re-check tolerance.
const CERT_TOL: f64 = 1e-9;

/// Coercivity of the log reparameterization.
#[derive(Debug, Clone, PartialEq)]
pub enum Coercivity {
    Yes,
    /// `certificate` is a unit direction with `max_a a.v <= 0`.
    No {
        certificate: Vec<f64>,
    },
    Unknown {
        reason: String,
    },
}

/// Whether the infimum over the open orthant is attained.
#[derive(Debug, Clone, PartialEq)]
pub enum BoundedBelow {
    /// The origin lies in the hull of the exponents: a minimizer exists
    /// (possibly a continuum).
    Yes,
    /// `certificate` is a unit direction with `a.v < 0` for every exponent:
    /// the infimum is approached only along a boundary path.
    No {
        certificate: Vec<f64>,
    },
    Unknown {
        reason: String,
    },
}

/// The bundle produced by [`diagnose`].
#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsReport {
    pub strictly_convex: bool,
    pub exponent_rank: usize,
    pub dimension: usize,
    pub coercive: Coercivity,
    pub bounded_below: BoundedBelow,
    /// Set when the objective was not a posynomial and all verdicts are Unknown.
    pub note: Option<String>,
}

/// Exponent vectors of a signomial as matrix rows.
fn exponent_rows(f: &Signomial) -> Vec<Vec<f64>> {
    f.terms().iter().map(|t| t.exponents().to_vec()).collect()
}

/// Rank of the exponent matrix and the span condition for strict convexity.
///
/// Rank uses a singular-value cutoff of `1e-10` times the largest singular
/// value. Requires a posynomial.
pub fn check_strict_convexity(f: &Signomial) -> Result<(bool, usize)> {
    if !f.is_posynomial() {
        return Err(crate::error::Error::NotPosynomial);
    }
    let rows = exponent_rows(f);
    let n = f.dimension();
    let m = DMatrix::from_fn(rows.len(), n, |i, j| rows[i][j]);
    let svd = m.svd(false, false);
    let max_sv = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let rank = if max_sv == 0.0 {
        0
    } else {
        svd.singular_values
            .iter()
            .filter(|&&s| s > 1e-10 * max_sv)
            .count()
    };
    Ok((rank == n, rank))
}

/// Decide whether `max_a a.v > 0` for every `v != 0`, i.e. whether the origin
/// is interior to the hull of the exponents.
///
/// The recession cone `{v : a.v <= 0 for all a}` is probed along all `2n`
/// signed axis objectives inside the unit box; the cone is `{0}` exactly when
/// every probe tops out at zero. A nonzero probe maximizer is polished into a
/// unit certificate.
pub fn check_coercive(f: &Signomial) -> Result<Coercivity> {
    if !f.is_posynomial() {
        return Err(crate::error::Error::NotPosynomial);
    }
    let alphas = exponent_rows(f);
    let n = f.dimension();
    let scale = alpha_scale(&alphas);
    // G v <= h: exponent rows (a.v <= 0) plus the box |v_j| <= 1.
    let m = alphas.len();
    let mut g = DMatrix::zeros(m + 2 * n, n);
    let mut h = DVector::zeros(m + 2 * n);
    for (i, a) in alphas.iter().enumerate() {
        for j in 0..n {
            g[(i, j)] = a[j];
        }
    }
    for j in 0..n {
        g[(m + 2 * j, j)] = 1.0;
        h[m + 2 * j] = 1.0;
        g[(m + 2 * j + 1, j)] = -1.0;
        h[m + 2 * j + 1] = 1.0;
    }
    let mut best: Option<Vec<f64>> = None;
    for j in 0..n {
        for sign in [1.0, -1.0] {
            let mut obj = DVector::zeros(n);
            obj[j] = sign;
            match maximize_free(&obj, &g, &h) {
                LpOutcome::Optimal { x, value } => {
                    if value > CERT_TOL {
                        let candidate: Vec<f64> = x.iter().cloned().collect();
                        if verified_nonpositive(&alphas, &candidate, scale) {
                            best = Some(candidate);
                        }
                    }
                }
                LpOutcome::Stalled => {
                    return Ok(Coercivity::Unknown {
                        reason: "linear program stalled".to_string(),
                    })
                }
                // The box makes the probes bounded and always feasible (v = 0).
                _ => {
                    return Ok(Coercivity::Unknown {
                        reason: "unexpected linear program outcome".to_string(),
                    })
                }
            }
            if best.is_some() {
                break;
            }
        }
        if best.is_some() {
            break;
        }
    }
    match best {
        None => Ok(Coercivity::Yes),
        Some(raw) => {
            let polished = polish_certificate(&alphas, &raw);
            let cert = if verified_nonpositive(&alphas, &polished, scale) {
                polished
            } else {
                normalize(&raw)
            };
            Ok(Coercivity::No { certificate: cert })
        }
    }
}

/// Decide whether the origin lies in the convex hull of the exponents.
///
/// Feasibility of `sum p_a a = 0, sum p_a = 1, p >= 0` is an exact linear
/// program. When infeasible, the minimum-norm point of the hull yields the
/// strict separation certificate `v = -p*/|p*|`.
pub fn check_bounded_below(f: &Signomial) -> Result<BoundedBelow> {
    if !f.is_posynomial() {
        return Err(crate::error::Error::NotPosynomial);
    }
    let alphas = exponent_rows(f);
    let n = f.dimension();
    let scale = alpha_scale(&alphas);
    let m = alphas.len();
    let mut a = DMatrix::zeros(n + 1, m);
    for (j, alpha) in alphas.iter().enumerate() {
        for i in 0..n {
            a[(i, j)] = alpha[i];
        }
        a[(n, j)] = 1.0;
    }
    let mut b = DVector::zeros(n + 1);
    b[n] = 1.0;
    let c = DVector::zeros(m);
    match solve_standard(&a, &b, &c) {
        LpOutcome::Optimal { .. } => Ok(BoundedBelow::Yes),
        LpOutcome::Infeasible => {
            let p_star = min_norm_hull_point(&alphas);
            let norm = p_star.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm <= CERT_TOL * scale {
                return Ok(BoundedBelow::Unknown {
                    reason: "hull membership ambiguous near the origin".to_string(),
                });
            }
            let cert: Vec<f64> = p_star.iter().map(|v| -v / norm).collect();
            // the exact minimum-norm point separates with margin |p*|;
            // allow half of that for the approximate solve
            let margin = alphas
                .iter()
                .map(|a| dot(a, &cert))
                .fold(f64::NEG_INFINITY, f64::max);
            if margin <= -0.5 * norm && margin < 0.0 {
                Ok(BoundedBelow::No { certificate: cert })
            } else {
                Ok(BoundedBelow::Unknown {
                    reason: "separation certificate failed verification".to_string(),
                })
            }
        }
        LpOutcome::Stalled | LpOutcome::Unbounded => Ok(BoundedBelow::Unknown {
            reason: "linear program did not resolve".to_string(),
        }),
    }
}

/// Full diagnostics bundle; non-posynomials get Unknown verdicts with a note.
pub fn diagnose(f: &CompositeObjective) -> DiagnosticsReport {
    let n = f.dimension();
    match f.as_posynomial() {
        Some(p) => {
            let (strictly_convex, exponent_rank) = check_strict_convexity(p).unwrap_or((false, 0));
            let coercive = check_coercive(p).unwrap_or(Coercivity::Unknown {
                reason: "check failed".to_string(),
            });
            let bounded_below = check_bounded_below(p).unwrap_or(BoundedBelow::Unknown {
                reason: "check failed".to_string(),
            });
            DiagnosticsReport {
                strictly_convex,
                exponent_rank,
                dimension: n,
                coercive,
                bounded_below,
                note: None,
            }
        }
        None => DiagnosticsReport {
            strictly_convex: false,
            exponent_rank: 0,
            dimension: n,
            coercive: Coercivity::Unknown {
                reason: "objective is not a posynomial".to_string(),
            },
            bounded_below: BoundedBelow::Unknown {
                reason: "objective is not a posynomial".to_string(),
            },
            note: Some("diagnostics apply to posynomials only".to_string()),
        },
    }
}

/// Empirical convergence checklist for a completed run.
#[derive(Debug, Clone, PartialEq)]
pub struct ChecklistReport {
    /// (a) coercivity of the objective; `None` when it is not a posynomial.
    pub coercivity: Option<Coercivity>,
    /// (b) isolated stationary points cannot be decided numerically.
    pub isolated_stationary_points_checkable: bool,
    /// (c) continuity of the iteration map is assumed, not measured.
    pub map_continuity_assumed: bool,
    /// (d) gradient norm at the final iterate, against the threshold below.
    pub terminal_gradient_norm: f64,
    pub terminal_gradient_threshold: f64,
    pub terminal_is_stationary: bool,
    /// (e) the objective never increased along the recorded run.
    pub descent_held: bool,
    /// Number of leading iterations with strictly decreasing objective.
    pub strict_descent_prefix: usize,
}

/// Evaluate the empirically checkable convergence properties on a trace.
pub fn mm_convergence_checklist(
    f: &CompositeObjective,
    trace: &IterationTrace,
) -> Result<ChecklistReport> {
    let coercivity = f.as_posynomial().map(check_coercive).transpose()?;
    let terminal = trace.final_point();
    let grad = f.gradient(terminal)?;
    let norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
    let threshold = 1e-3 * (1.0 + trace.final_objective().abs());
    let objectives = trace.objectives();
    let mut descent_held = true;
    let mut strict_prefix = 0;
    let mut still_strict = true;
    for w in objectives.windows(2) {
        if w[1] > w[0] + 1e-12 * (1.0 + w[0].abs()) {
            descent_held = false;
        }
        if still_strict && w[1] < w[0] - 1e-15 * (1.0 + w[0].abs()) {
            strict_prefix += 1;
        } else {
            still_strict = false;
        }
    }
    Ok(ChecklistReport {
        coercivity,
        isolated_stationary_points_checkable: false,
        map_continuity_assumed: true,
        terminal_gradient_norm: norm,
        terminal_gradient_threshold: threshold,
        terminal_is_stationary: norm < threshold,
        descent_held,
        strict_descent_prefix: strict_prefix,
    })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

fn normalize(v: &[f64]) -> Vec<f64> {
    let n = norm(v);
    if n == 0.0 {
        v.to_vec()
    } else {
        v.iter().map(|x| x / n).collect()
    }
}

fn alpha_scale(alphas: &[Vec<f64>]) -> f64 {
    alphas.iter().map(|a| norm(a)).fold(1.0, f64::max)
}

fn verified_nonpositive(alphas: &[Vec<f64>], v: &[f64], scale: f64) -> bool {
    let nv = norm(v);
    if !(nv > 0.0) {
        return false;
    }
    alphas.iter().all(|a| dot(a, v) / nv <= CERT_TOL * scale)
}

/// `max_a a.v` over the unit sphere, minimized by projected subgradient from
/// several deterministic starts. Used to polish LP certificates into the
/// direction that separates most evenly.
fn polish_certificate(alphas: &[Vec<f64>], seed: &[f64]) -> Vec<f64> {
    let n = seed.len();
    let q = |v: &[f64]| {
        alphas
            .iter()
            .map(|a| dot(a, v))
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let mut starts: Vec<Vec<f64>> = vec![normalize(seed)];
    // the negated min-norm hull point is the exact minimizer when 0 is
    // strictly separated
    let p_star = min_norm_hull_point(alphas);
    if norm(&p_star) > 1e-12 {
        starts.push(normalize(&p_star.iter().map(|v| -v).collect::<Vec<_>>()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5169_0001);
    for _ in 0..16 {
        let v: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
        if norm(&v) > 1e-6 {
            starts.push(normalize(&v));
        }
    }
    let mut best = starts[0].clone();
    let mut best_q = q(&best);
    for start in starts {
        let mut v = start;
        let mut step = 0.5;
        for _ in 0..200 {
            // subgradient: the exponent achieving the max
            let (mut gi, mut gval) = (0, f64::NEG_INFINITY);
            for (i, a) in alphas.iter().enumerate() {
                let d = dot(a, &v);
                if d > gval {
                    gval = d;
                    gi = i;
                }
            }
            let mut next: Vec<f64> = v
                .iter()
                .zip(&alphas[gi])
                .map(|(vi, ai)| vi - step * ai)
                .collect();
            if norm(&next) < 1e-12 {
                break;
            }
            next = normalize(&next);
            if q(&next) <= q(&v) {
                v = next;
            } else {
                step *= 0.7;
            }
        }
        let qv = q(&v);
        if qv < best_q {
            best_q = qv;
            best = v;
        }
    }
    best
}

/// Minimum-norm point of the convex hull of the rows, by projected gradient
/// over the weight simplex. For a strictly separated origin the negated,
/// normalized result is the maximally separating direction.
fn min_norm_hull_point(alphas: &[Vec<f64>]) -> Vec<f64> {
    let m = alphas.len();
    let n = alphas[0].len();
    let mut w = vec![1.0 / m as f64; m];
    // Lipschitz constant of the gradient 2 G G^T w
    let lip: f64 = 2.0 * alphas.iter().map(|a| dot(a, a)).sum::<f64>().max(1e-12);
    let step = 1.0 / lip;
    let point = |w: &[f64]| -> Vec<f64> {
        let mut p = vec![0.0; n];
        for (wi, a) in w.iter().zip(alphas) {
            for (pj, aj) in p.iter_mut().zip(a) {
                *pj += wi * aj;
            }
        }
        p
    };
    for _ in 0..4000 {
        let p = point(&w);
        // gradient of |G^T w|^2 wrt w is 2 G p
        let grad: Vec<f64> = alphas.iter().map(|a| 2.0 * dot(a, &p)).collect();
        let moved: Vec<f64> = w.iter().zip(&grad).map(|(wi, gi)| wi - step * gi).collect();
        w = project_simplex(&moved);
    }
    point(&w)
}

/// Euclidean projection onto the probability simplex.
fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cssv = 0.0;
    let mut rho = 0;
    for (i, &ui) in u.iter().enumerate() {
        cssv += ui;
        if ui - (cssv - 1.0) / (i + 1) as f64 > 0.0 {
            rho = i + 1;
        }
    }
    let theta = (u[..rho].iter().sum::<f64>() - 1.0) / rho as f64;
    v.iter().map(|&x| (x - theta).max(0.0)).collect()
}

/// Brute-force direction sampling used as the test oracle against the LP
/// verdicts: returns the best (smallest) sampled value of `max_a a.v` and the
/// minimizing direction.
pub fn sampled_min_max_dot(f: &Signomial, directions: usize, seed: u64) -> (f64, Vec<f64>) {
    let alphas = exponent_rows(f);
    let n = f.dimension();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = f64::INFINITY;
    let mut best_v = vec![0.0; n];
    for _ in 0..directions {
        let mut v: Vec<f64> = (0..n).map(|_| standard_normal(&mut rng)).collect();
        let nv = norm(&v);
        if nv < 1e-12 {
            continue;
        }
        v.iter_mut().for_each(|x| *x /= nv);
        let q = alphas
            .iter()
            .map(|a| dot(a, &v))
            .fold(f64::NEG_INFINITY, f64::max);
        if q < best {
            best = q;
            best_v = v;
        }
    }
    (best, best_v)
}

fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller from two uniforms; tails beyond ~9 sigma are irrelevant here.
    let u1: f64 = rng.random::<f64>().max(1e-300);
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems;
    use crate::signomial::PositivePoint;

    fn posy(f: &CompositeObjective) -> &Signomial {
        f.as_posynomial().expect("posynomial")
    }

    #[test]
    fn f1_is_strictly_convex_and_coercive() {
        let f = problems::f1();
        let (sc, rank) = check_strict_convexity(posy(&f)).unwrap();
        assert!(sc);
        assert_eq!(rank, 2);
        assert_eq!(check_coercive(posy(&f)).unwrap(), Coercivity::Yes);
        assert_eq!(check_bounded_below(posy(&f)).unwrap(), BoundedBelow::Yes);
    }

    #[test]
    fn f2_is_rank_deficient() {
        let f = problems::f2();
        let (sc, rank) = check_strict_convexity(posy(&f)).unwrap();
        assert!(!sc);
        assert_eq!(rank, 1);
        // 0 is the hull midpoint, so the minimum is attained, but on a
        // continuum: not coercive.
        assert_eq!(check_bounded_below(posy(&f)).unwrap(), BoundedBelow::Yes);
        assert!(matches!(
            check_coercive(posy(&f)).unwrap(),
            Coercivity::No { .. }
        ));
    }

    #[test]
    fn f3_has_a_strict_separation_certificate() {
        let f = problems::f3();
        match check_bounded_below(posy(&f)).unwrap() {
            BoundedBelow::No { certificate } => {
                // certificate must separate both exponents strictly
                for a in [[-1.0, -2.0], [1.0, 1.0]] {
                    assert!(dot(&a, &certificate) < 0.0, "certificate {certificate:?}");
                }
                // the evenly separating direction is (-3, 2)/sqrt(13)
                assert!((certificate[0] + 3.0 / 13f64.sqrt()).abs() < 1e-6);
                assert!((certificate[1] - 2.0 / 13f64.sqrt()).abs() < 1e-6);
            }
            other => panic!("expected a certificate, got {other:?}"),
        }
        match check_coercive(posy(&f)).unwrap() {
            Coercivity::No { certificate } => {
                for a in [[-1.0, -2.0], [1.0, 1.0]] {
                    assert!(dot(&a, &certificate) <= 1e-9);
                }
            }
            other => panic!("expected non-coercive, got {other:?}"),
        }
    }

    #[test]
    fn axis_pairs_are_coercive() {
        // exponents {e1, -e1, e2, -e2}: origin is the hull centroid
        let f = Signomial::from_terms(
            2,
            &[
                (1.0, &[1.0, 0.0]),
                (1.0, &[-1.0, 0.0]),
                (1.0, &[0.0, 1.0]),
                (1.0, &[0.0, -1.0]),
            ],
        )
        .unwrap();
        assert_eq!(check_coercive(&f).unwrap(), Coercivity::Yes);
    }

    #[test]
    fn single_variable_posynomial() {
        // x1 in n=1: rank 1 (strictly convex), hull {1} excludes 0
        let f = Signomial::from_terms(1, &[(1.0, &[1.0])]).unwrap();
        let (sc, rank) = check_strict_convexity(&f).unwrap();
        assert!(sc);
        assert_eq!(rank, 1);
        match check_bounded_below(&f).unwrap() {
            BoundedBelow::No { certificate } => assert!(certificate[0] < 0.0),
            other => panic!("expected certificate, got {other:?}"),
        }
    }

    #[test]
    fn first_quadrant_exponents_separate_diagonally() {
        let f = Signomial::from_terms(2, &[(1.0, &[1.0, 0.0]), (1.0, &[0.0, 1.0])]).unwrap();
        match check_bounded_below(&f).unwrap() {
            BoundedBelow::No { certificate } => {
                assert!(dot(&[1.0, 0.0], &certificate) < 0.0);
                assert!(dot(&[0.0, 1.0], &certificate) < 0.0);
            }
            other => panic!("expected certificate, got {other:?}"),
        }
    }

    #[test]
    fn signomial_input_gets_unknown_verdicts() {
        let report = diagnose(&problems::f4());
        assert!(report.note.is_some());
        assert!(matches!(report.coercive, Coercivity::Unknown { .. }));
    }

    #[test]
    fn checklist_on_f1_run() {
        let trace = crate::driver::solve(
            &problems::f1(),
            &PositivePoint::new(vec![1.0, 2.0]).unwrap(),
            &crate::driver::SolverConfig::default(),
        )
        .unwrap();
        let report = mm_convergence_checklist(&problems::f1(), &trace).unwrap();
        assert_eq!(report.coercivity, Some(Coercivity::Yes));
        assert!(report.descent_held);
        assert!(
            report.terminal_is_stationary,
            "norm {}",
            report.terminal_gradient_norm
        );
        assert!(report.terminal_gradient_norm < 1e-3);
        // descent is strict until the tail of the run
        assert!(report.strict_descent_prefix + 3 >= trace.iterations());
    }

    #[test]
    fn agreement_not_in_hull_implies_not_coercive() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let n = 1 + (rng.random::<u32>() % 3) as usize;
            let terms = 1 + (rng.random::<u32>() % 5) as usize;
            let mut spec = Vec::new();
            for _ in 0..terms {
                let a: Vec<f64> = (0..n)
                    .map(|_| ((rng.random::<f64>() * 6.0 - 3.0) * 2.0).round() / 2.0)
                    .collect();
                spec.push((1.0, a));
            }
            let refs: Vec<(f64, &[f64])> = spec.iter().map(|(c, a)| (*c, a.as_slice())).collect();
            let f = match Signomial::from_terms(n, &refs) {
                Ok(f) if f.is_posynomial() => f,
                _ => continue,
            };
            let bb = check_bounded_below(&f).unwrap();
            let co = check_coercive(&f).unwrap();
            if matches!(bb, BoundedBelow::No { .. }) {
                assert!(
                    matches!(co, Coercivity::No { .. }),
                    "0 outside hull must imply non-coercive"
                );
            }
        }
    }
}
