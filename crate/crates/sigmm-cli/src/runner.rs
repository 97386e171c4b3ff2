//! Solve dispatch, summary printing, and trace files.

use crate::problem_file::{Constraint, Objective, Options, ProblemFile};
use anyhow::{anyhow, Result};
use sigmm::nnqp::{self, QpProblem};
use sigmm::penalty::{PenaltyProblem, PenaltySchedule};
use sigmm::{CompositeObjective, Outcome, PositivePoint, SolverConfig, StepKind};
use std::fmt::Write as _;

/// Flag overrides applied on top of the file options.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub epsilon: Option<f64>,
    pub max_iters: Option<usize>,
    pub accel: Option<usize>,
    pub schedule: Option<(i32, i32)>,
    pub inner_eps: Option<f64>,
    pub eps_floor: Option<f64>,
}

struct Effective {
    epsilon: f64,
    max_iters: usize,
    accel: usize,
    schedule: (i32, i32),
    inner_eps: f64,
    eps_floor: f64,
}

fn effective(file: &Options, flags: &Overrides) -> Effective {
    let defaults = SolverConfig::default();
    Effective {
        epsilon: flags.epsilon.or(file.epsilon).unwrap_or(defaults.epsilon),
        max_iters: flags
            .max_iters
            .or(file.max_iters)
            .unwrap_or(defaults.max_iterations),
        accel: flags.accel.or(file.accel).unwrap_or(0),
        schedule: flags.schedule.or(file.schedule).unwrap_or((0, 17)),
        inner_eps: flags.inner_eps.or(file.inner_eps).unwrap_or(1e-9),
        eps_floor: flags.eps_floor.or(file.eps_floor).unwrap_or(1e-9),
    }
}

/// `(1.4310, 1.4310)` with coordinates below 1e-4 printed as zero.
pub fn format_point(x: &PositivePoint) -> String {
    let parts: Vec<String> = x
        .coords()
        .iter()
        .map(|&c| {
            if c < 1e-4 {
                "0.0000".to_string()
            } else {
                format!("{c:.4}")
            }
        })
        .collect();
    format!("({})", parts.join(", "))
}

fn outcome_word(outcome: &Outcome) -> &'static str {
    match outcome {
        Outcome::Converged => "converged",
        Outcome::Diverged(_) => "diverges",
        Outcome::IterationBudgetExhausted => "iteration budget exhausted",
    }
}

fn step_word(step: StepKind) -> &'static str {
    match step {
        StepKind::Mm => "mm",
        StepKind::Accelerated => "accelerated",
        StepKind::DampedDivergence => "damped-divergence",
    }
}

/// Full-precision number for trace files.
fn precise(v: f64) -> String {
    format!("{v:.16e}")
}

struct TraceWriter {
    out: String,
    rows: usize,
}

impl TraceWriter {
    fn new(dimension: usize) -> Self {
        let mut header = String::from("iteration,lambda,objective,penalized");
        for i in 1..=dimension {
            let _ = write!(header, ",x{i}");
        }
        header.push_str(",step\n");
        TraceWriter {
            out: header,
            rows: 0,
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn row(
        &mut self,
        iteration: usize,
        lambda: Option<f64>,
        objective: f64,
        penalized: Option<f64>,
        coords: &[f64],
        step: &str,
    ) {
        self.rows += 1;
        let lambda = lambda.map(precise).unwrap_or_default();
        let penalized = penalized.map(precise).unwrap_or_default();
        let _ = write!(
            self.out,
            "{iteration},{lambda},{},{penalized}",
            precise(objective)
        );
        for &c in coords {
            let _ = write!(self.out, ",{}", precise(c));
        }
        let _ = writeln!(self.out, ",{step}");
    }

    fn finish(mut self, outcome: &str, point: &PositivePoint, value: f64) -> String {
        let coords: Vec<String> = point.coords().iter().map(|&c| precise(c)).collect();
        let _ = writeln!(
            self.out,
            "summary,outcome={outcome},iterations={},value={},point=({})",
            self.rows,
            precise(value),
            coords.join(";")
        );
        self.out
    }
}

/// Result of a solve run: printable summary plus the optional trace body.
pub struct RunOutput {
    pub summary: String,
    pub trace: Option<String>,
}

pub fn run_solve(problem: &ProblemFile, flags: &Overrides, want_trace: bool) -> Result<RunOutput> {
    let opts = effective(&problem.options, flags);
    match &problem.objective {
        Objective::Quadratic(qp) => run_qp(problem, qp, &opts, want_trace),
        Objective::Signomial { plain, neg_log } => {
            let objective = match neg_log {
                None => CompositeObjective::plain(plain.clone()),
                Some(p) => CompositeObjective::plain_plus_neg_log(plain.clone(), p.clone())
                    .map_err(|e| anyhow!("{e}"))?,
            };
            if problem.constraints.is_empty() {
                run_unconstrained(problem, &objective, &opts, want_trace)
            } else {
                run_penalty(problem, &objective, &opts, want_trace)
            }
        }
    }
}

fn solver_config(opts: &Effective, epsilon: f64) -> SolverConfig {
    SolverConfig {
        epsilon,
        max_iterations: opts.max_iters,
        acceleration_q: opts.accel,
        ..SolverConfig::default()
    }
}

fn run_unconstrained(
    problem: &ProblemFile,
    objective: &CompositeObjective,
    opts: &Effective,
    want_trace: bool,
) -> Result<RunOutput> {
    let cfg = solver_config(opts, opts.epsilon);
    let trace = sigmm::solve(objective, &problem.initial, &cfg).map_err(|e| anyhow!("{e}"))?;
    let mut summary = String::new();
    let _ = writeln!(
        summary,
        "initial point : {}",
        format_point(&problem.initial)
    );
    let _ = writeln!(summary, "outcome       : {}", outcome_word(trace.outcome()));
    let _ = writeln!(summary, "iterations    : {}", trace.iterations());
    let _ = writeln!(
        summary,
        "min point     : {}",
        format_point(trace.final_point())
    );
    let _ = writeln!(summary, "min value     : {:.4}", trace.final_objective());
    let body = want_trace.then(|| {
        let mut w = TraceWriter::new(problem.dimension);
        for (m, r) in trace.records().iter().enumerate() {
            w.row(
                m + 1,
                None,
                r.objective,
                None,
                r.point.coords(),
                step_word(r.step),
            );
        }
        w.finish(
            outcome_word(trace.outcome()),
            trace.final_point(),
            trace.final_objective(),
        )
    });
    Ok(RunOutput {
        summary,
        trace: body,
    })
}

fn run_penalty(
    problem: &ProblemFile,
    objective: &CompositeObjective,
    opts: &Effective,
    want_trace: bool,
) -> Result<RunOutput> {
    let inner = solver_config(opts, opts.inner_eps);
    let schedule = PenaltySchedule::powers_of_two(opts.schedule.0, opts.schedule.1, inner)
        .map_err(|e| anyhow!("{e}"))?;
    let mut p = PenaltyProblem::new(objective.clone(), schedule);
    for c in &problem.constraints {
        p = match c {
            Constraint::Equality(r) => p.with_equality(r.clone()).map_err(|e| anyhow!("{e}"))?,
            Constraint::Inequality(s) => {
                p.with_inequality(s.clone()).map_err(|e| anyhow!("{e}"))?
            }
        };
    }
    let run = p
        .solve_constrained(&problem.initial)
        .map_err(|e| anyhow!("{e}"))?;

    let mut summary = String::new();
    let _ = writeln!(
        summary,
        "initial point : {}",
        format_point(&problem.initial)
    );
    let _ = writeln!(summary, "log2(lambda)  iterations  x_lambda");
    for stage in &run.stages {
        let _ = writeln!(
            summary,
            "{:<13} {:<11} {}",
            stage.lambda.log2().round() as i64,
            stage.trace.iterations(),
            format_point(stage.solution())
        );
    }
    if let Some(outcome) = run.last_outcome() {
        if matches!(outcome, Outcome::Diverged(_)) {
            let _ = writeln!(summary, "outcome       : diverges (last stage)");
        }
    }
    if run.stabilized {
        let _ = writeln!(
            summary,
            "schedule      : stopped early, stage solutions stabilized"
        );
    }
    let value = objective
        .value(&run.final_point)
        .map_err(|e| anyhow!("{e}"))?;
    let _ = writeln!(
        summary,
        "final point   : {}",
        format_point(&run.final_point)
    );
    let _ = writeln!(summary, "final value   : {value:.4}");

    let body = want_trace.then(|| {
        let mut w = TraceWriter::new(problem.dimension);
        let mut iteration = 0;
        for stage in &run.stages {
            for r in stage.trace.records() {
                iteration += 1;
                let base = objective.value(&r.point).unwrap_or(f64::NAN);
                w.row(
                    iteration,
                    Some(stage.lambda),
                    base,
                    Some(r.objective),
                    r.point.coords(),
                    step_word(r.step),
                );
            }
        }
        w.finish("schedule finished", &run.final_point, value)
    });
    Ok(RunOutput {
        summary,
        trace: body,
    })
}

fn run_qp(
    problem: &ProblemFile,
    qp: &QpProblem,
    opts: &Effective,
    want_trace: bool,
) -> Result<RunOutput> {
    let inner = solver_config(opts, opts.inner_eps);
    let schedule = PenaltySchedule::powers_of_two(opts.schedule.0, opts.schedule.1, inner)
        .map_err(|e| anyhow!("{e}"))?;
    let run = nnqp::solve_qp(qp, &problem.initial, &schedule, opts.eps_floor)
        .map_err(|e| anyhow!("{e}"))?;

    let mut summary = String::new();
    let _ = writeln!(
        summary,
        "initial point : {}",
        format_point(&problem.initial)
    );
    let _ = writeln!(summary, "log2(lambda)  iterations  x_lambda");
    for stage in &run.stages {
        let note = if stage.skipped {
            "  (skipped: penalty too small)"
        } else {
            ""
        };
        let _ = writeln!(
            summary,
            "{:<13} {:<11} {}{note}",
            stage.lambda.log2().round() as i64,
            stage.iterations,
            format_point(&stage.solution)
        );
    }
    let value = nnqp::qp_penalized_value(qp, 0.0, &run.final_point).map_err(|e| anyhow!("{e}"))?;
    let _ = writeln!(
        summary,
        "final point   : {}",
        format_point(&run.final_point)
    );
    let _ = writeln!(summary, "final value   : {value:.4}");

    let body = want_trace.then(|| {
        let mut w = TraceWriter::new(problem.dimension);
        let mut iteration = 0;
        for stage in &run.stages {
            for r in &stage.records {
                iteration += 1;
                let base = nnqp::qp_penalized_value(qp, 0.0, &r.point).unwrap_or(f64::NAN);
                w.row(
                    iteration,
                    Some(stage.lambda),
                    base,
                    Some(r.penalized_value),
                    r.point.coords(),
                    if r.accelerated { "accelerated" } else { "mm" },
                );
            }
        }
        w.finish("schedule finished", &run.final_point, value)
    });
    Ok(RunOutput {
        summary,
        trace: body,
    })
}

/// Diagnostics report for a problem file's objective.
pub fn run_diagnose(problem: &ProblemFile) -> Result<String> {
    let objective = match &problem.objective {
        Objective::Signomial {
            plain,
            neg_log: None,
        } => CompositeObjective::plain(plain.clone()),
        Objective::Signomial { .. } => {
            return Ok("diagnostics apply to plain posynomial objectives only\n\
                       strictly convex: unknown\ncoercive: unknown\nbounded below: unknown\n"
                .to_string())
        }
        Objective::Quadratic(_) => {
            return Ok("diagnostics apply to signomial objectives only\n\
                       strictly convex: unknown\ncoercive: unknown\nbounded below: unknown\n"
                .to_string())
        }
    };
    let report = sigmm::diagnostics::diagnose(&objective);
    let mut out = String::new();
    if let Some(note) = &report.note {
        let _ = writeln!(out, "note: {note}");
    }
    let _ = writeln!(
        out,
        "strictly convex: {} (exponent rank {} of {})",
        if report.strictly_convex { "yes" } else { "no" },
        report.exponent_rank,
        report.dimension
    );
    match &report.coercive {
        sigmm::diagnostics::Coercivity::Yes => {
            let _ = writeln!(out, "coercive: yes");
        }
        sigmm::diagnostics::Coercivity::No { certificate } => {
            let cert: Vec<String> = certificate.iter().map(|v| format!("{v:.3}")).collect();
            let _ = writeln!(out, "coercive: no; certificate v = ({})", cert.join(", "));
        }
        sigmm::diagnostics::Coercivity::Unknown { reason } => {
            let _ = writeln!(out, "coercive: unknown ({reason})");
        }
    }
    match &report.bounded_below {
        sigmm::diagnostics::BoundedBelow::Yes => {
            let _ = writeln!(
                out,
                "infimum attained: yes (origin lies in the exponent hull)"
            );
        }
        sigmm::diagnostics::BoundedBelow::No { certificate } => {
            let cert: Vec<String> = certificate.iter().map(|v| format!("{v:.3}")).collect();
            let _ = writeln!(
                out,
                "infimum attained: no; separating direction v = ({})",
                cert.join(", ")
            );
        }
        sigmm::diagnostics::BoundedBelow::Unknown { reason } => {
            let _ = writeln!(out, "infimum attained: unknown ({reason})");
        }
    }
    Ok(out)
}

/// One pass/fail line per suite item; true when everything passed.
pub fn run_verify(suite: &str) -> Result<(String, bool)> {
    let report = sigmm::verify::run_suite(suite).map_err(|e| anyhow!("{e}"))?;
    let mut out = String::new();
    for item in &report.items {
        let _ = writeln!(
            out,
            "[{}] {} | measured {} | expected {}",
            if item.passed { "pass" } else { "FAIL" },
            item.name,
            item.measured,
            item.expected
        );
    }
    let ok = report.passed();
    let _ = writeln!(
        out,
        "{}: {} of {} checks passed",
        report.suite,
        report.items.iter().filter(|i| i.passed).count(),
        report.items.len()
    );
    Ok((out, ok))
}
