//! The line-oriented problem file format.
//!
//! A file defines either a signomial objective (term lines under an
//! `objective` header, optionally followed by a `neglog` posynomial block)
//! or a quadratic program (`qp` block with matrix rows), plus constraint
//! blocks, an initial point, and solver options. Lines starting with `#` and
//! blank lines are ignored.
//!
//! ```text
//! dimension 2
//! objective
//! term  1.0   -3 0
//! term  3.0   -1 -2
//! term  1.0    1 1
//! initial 1 2
//! epsilon 1e-9
//! ```
//!
//! Constraint blocks start with `constraint <kind>` where the kind is one of
//! `eq0` (`r(x) = 0`, nonnegative exponents), `eq1` (`h(x) = 1`, normalized
//! on load), `le0` (`s(x) <= 0`), or `le1` (`u(x) <= 1`, normalized on load).
//! Quadratic programs use row lines `q`, `a`, `e` and vector lines `c`, `b`,
//! `d` inside a `qp` block.

use anyhow::{anyhow, bail, Result};
use sigmm::nnqp::QpProblem;
use sigmm::{PositivePoint, Signomial, Term};

/// Solver options carried by a problem file; all optional, with the library
/// defaults applying otherwise.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Options {
    pub epsilon: Option<f64>,
    pub max_iters: Option<usize>,
    pub accel: Option<usize>,
    /// Penalty schedule exponent range: lambda = 2^k for k0 <= k <= k1.
    pub schedule: Option<(i32, i32)>,
    /// Per-stage relative-change tolerance for penalized runs.
    pub inner_eps: Option<f64>,
    pub eps_floor: Option<f64>,
}

/// One constraint, already normalized where the kind requires it.
#[derive(Debug, Clone, PartialEq)]
pub enum Constraint {
    /// `r(x) = 0` with nonnegative exponents.
    Equality(Signomial),
    /// `s(x) <= 0`.
    Inequality(Signomial),
}

/// The objective of a problem file.
#[derive(Debug, Clone, PartialEq)]
pub enum Objective {
    /// Signomial terms, optionally minus the log of a posynomial.
    Signomial {
        plain: Signomial,
        neg_log: Option<Signomial>,
    },
    Quadratic(QpProblem),
}

/// Parsed problem file.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemFile {
    pub dimension: usize,
    pub objective: Objective,
    pub constraints: Vec<Constraint>,
    pub initial: PositivePoint,
    pub options: Options,
}

/// Sections being accumulated during parsing.
enum Block {
    None,
    Objective,
    NegLog,
    Constraint,
}

struct RawTerms {
    terms: Vec<(f64, Vec<f64>)>,
}

pub fn parse(text: &str) -> Result<ProblemFile> {
    let mut dimension: Option<usize> = None;
    let mut block = Block::None;
    let mut objective: Vec<(f64, Vec<f64>)> = Vec::new();
    let mut neg_log: Vec<(f64, Vec<f64>)> = Vec::new();
    let mut constraints: Vec<(String, RawTerms)> = Vec::new();
    let mut qp_rows: Vec<(char, Vec<f64>)> = Vec::new();
    let mut qp_present = false;
    let mut initial: Option<Vec<f64>> = None;
    let mut options = Options::default();

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_whitespace();
        let key = parts.next().unwrap();
        let rest: Vec<&str> = parts.collect();
        // column of the first offending token, when the message names one
        let fail = |msg: &str| {
            let column = msg
                .split('`')
                .nth(1)
                .and_then(|token| raw.find(token))
                .map(|i| i + 1)
                .unwrap_or(1);
            anyhow!("line {lineno}, column {column}: {msg}")
        };
        match key {
            "dimension" => {
                let n: usize = rest
                    .first()
                    .ok_or_else(|| fail("missing dimension value"))?
                    .parse()
                    .map_err(|_| fail("dimension must be a positive integer"))?;
                dimension = Some(n);
            }
            "objective" => block = Block::Objective,
            "neglog" => block = Block::NegLog,
            "constraint" => {
                let kind = rest
                    .first()
                    .ok_or_else(|| fail("missing constraint kind"))?;
                if !["eq0", "eq1", "le0", "le1"].contains(kind) {
                    bail!(fail("constraint kind must be eq0, eq1, le0, or le1"));
                }
                constraints.push((kind.to_string(), RawTerms { terms: Vec::new() }));
                block = Block::Constraint;
            }
            "qp" => {
                qp_present = true;
                block = Block::None;
            }
            "term" => {
                let nums = parse_numbers(&rest).map_err(|m| fail(&m))?;
                if nums.len() < 2 {
                    bail!(fail("term needs a coefficient and at least one exponent"));
                }
                let entry = (nums[0], nums[1..].to_vec());
                match &block {
                    Block::Objective => objective.push(entry),
                    Block::NegLog => neg_log.push(entry),
                    Block::Constraint => constraints.last_mut().unwrap().1.terms.push(entry),
                    Block::None => bail!(fail("term outside of any block")),
                }
            }
            "q" | "a" | "e" | "c" | "b" | "d" => {
                if !qp_present {
                    bail!(fail("matrix rows must follow a `qp` line"));
                }
                let nums = parse_numbers(&rest).map_err(|m| fail(&m))?;
                qp_rows.push((key.chars().next().unwrap(), nums));
            }
            "initial" => {
                initial = Some(parse_numbers(&rest).map_err(|m| fail(&m))?);
            }
            "epsilon" => options.epsilon = Some(parse_one(&rest).map_err(|m| fail(&m))?),
            "max_iters" => {
                let v: f64 = parse_one(&rest).map_err(|m| fail(&m))?;
                options.max_iters = Some(v as usize);
            }
            "accel" => {
                let v: f64 = parse_one(&rest).map_err(|m| fail(&m))?;
                options.accel = Some(v as usize);
            }
            "schedule" => {
                let nums = parse_numbers(&rest).map_err(|m| fail(&m))?;
                if nums.len() != 2 {
                    bail!(fail("schedule needs two exponents: k0 k1"));
                }
                options.schedule = Some((nums[0] as i32, nums[1] as i32));
            }
            "inner_eps" => options.inner_eps = Some(parse_one(&rest).map_err(|m| fail(&m))?),
            "eps_floor" => options.eps_floor = Some(parse_one(&rest).map_err(|m| fail(&m))?),
            other => bail!(fail(&format!("unknown directive `{other}`"))),
        }
    }

    let dimension = dimension.ok_or_else(|| anyhow!("missing `dimension` line"))?;
    if dimension == 0 {
        bail!("dimension must be at least 1");
    }
    let initial = initial.ok_or_else(|| anyhow!("missing `initial` line"))?;
    if initial.len() != dimension {
        bail!(
            "initial point has {} coordinates, expected {dimension}",
            initial.len()
        );
    }
    let initial = PositivePoint::new(initial).map_err(|e| anyhow!("initial point invalid: {e}"))?;

    if qp_present == !objective.is_empty() {
        bail!("the file must contain exactly one of a signomial objective or a qp block");
    }
    if qp_present && !constraints.is_empty() {
        bail!("qp problems carry their constraints in the qp block (`a`/`b`, `e`/`d` rows)");
    }

    let objective = if qp_present {
        Objective::Quadratic(assemble_qp(dimension, &qp_rows)?)
    } else {
        let plain =
            build_signomial(dimension, &objective).map_err(|e| anyhow!("objective: {e}"))?;
        let neg_log = if neg_log.is_empty() {
            None
        } else {
            Some(build_signomial(dimension, &neg_log).map_err(|e| anyhow!("neglog: {e}"))?)
        };
        Objective::Signomial { plain, neg_log }
    };

    let mut built_constraints = Vec::new();
    for (kind, raw) in constraints {
        let s = build_signomial(dimension, &raw.terms).map_err(|e| anyhow!("constraint: {e}"))?;
        let c = match kind.as_str() {
            "eq0" => Constraint::Equality(s),
            "eq1" => Constraint::Equality(s.normalize_constraint()),
            "le0" => Constraint::Inequality(s),
            "le1" => Constraint::Inequality(s.normalize_constraint()),
            _ => unreachable!(),
        };
        built_constraints.push(c);
    }

    Ok(ProblemFile {
        dimension,
        objective,
        constraints: built_constraints,
        initial,
        options,
    })
}

fn parse_numbers(parts: &[&str]) -> std::result::Result<Vec<f64>, String> {
    parts
        .iter()
        .map(|p| {
            p.parse::<f64>()
                .map_err(|_| format!("`{p}` is not a number"))
        })
        .collect::<std::result::Result<Vec<f64>, String>>()
        .and_then(|v| {
            if v.iter().all(|x| x.is_finite()) {
                Ok(v)
            } else {
                Err("values must be finite".to_string())
            }
        })
}

fn parse_one(parts: &[&str]) -> std::result::Result<f64, String> {
    let nums = parse_numbers(parts)?;
    if nums.len() != 1 {
        return Err("expected exactly one value".to_string());
    }
    Ok(nums[0])
}

fn build_signomial(dimension: usize, raw: &[(f64, Vec<f64>)]) -> Result<Signomial> {
    let mut terms = Vec::new();
    for (c, a) in raw {
        if a.len() != dimension {
            bail!("term has {} exponents, expected {dimension}", a.len());
        }
        terms.push(Term::new(*c, a.clone()).map_err(|e| anyhow!("{e}"))?);
    }
    Signomial::new(dimension, terms).map_err(|e| anyhow!("{e}"))
}

fn assemble_qp(dimension: usize, rows: &[(char, Vec<f64>)]) -> Result<QpProblem> {
    use sigmm::nalgebra::{DMatrix, DVector};
    let collect = |tag: char| -> Vec<&Vec<f64>> {
        rows.iter()
            .filter(|(t, _)| *t == tag)
            .map(|(_, v)| v)
            .collect()
    };
    let q_rows = collect('q');
    if q_rows.len() != dimension {
        bail!(
            "qp block needs {dimension} `q` rows, found {}",
            q_rows.len()
        );
    }
    for r in &q_rows {
        if r.len() != dimension {
            bail!("each `q` row needs {dimension} entries");
        }
    }
    let q = DMatrix::from_fn(dimension, dimension, |i, j| q_rows[i][j]);
    let c_rows = collect('c');
    if c_rows.len() != 1 || c_rows[0].len() != dimension {
        bail!("qp block needs exactly one `c` line with {dimension} entries");
    }
    let c = DVector::from_row_slice(c_rows[0]);

    let a_rows = collect('a');
    let b_rows = collect('b');
    let inequalities = if a_rows.is_empty() && b_rows.is_empty() {
        None
    } else {
        if b_rows.len() != 1 || b_rows[0].len() != a_rows.len() {
            bail!("`b` must be one line with one entry per `a` row");
        }
        for r in &a_rows {
            if r.len() != dimension {
                bail!("each `a` row needs {dimension} entries");
            }
        }
        let a = DMatrix::from_fn(a_rows.len(), dimension, |i, j| a_rows[i][j]);
        Some((a, DVector::from_row_slice(b_rows[0])))
    };

    let e_rows = collect('e');
    let d_rows = collect('d');
    let equalities = if e_rows.is_empty() && d_rows.is_empty() {
        None
    } else {
        if d_rows.len() != 1 || d_rows[0].len() != e_rows.len() {
            bail!("`d` must be one line with one entry per `e` row");
        }
        for r in &e_rows {
            if r.len() != dimension {
                bail!("each `e` row needs {dimension} entries");
            }
        }
        let e = DMatrix::from_fn(e_rows.len(), dimension, |i, j| e_rows[i][j]);
        Some((e, DVector::from_row_slice(d_rows[0])))
    };

    QpProblem::new(q, c, inequalities, equalities).map_err(|e| anyhow!("{e}"))
}

/// Serialize a problem back into the text format. Parsing the output yields
/// an identical in-memory problem.
pub fn to_text(p: &ProblemFile, title: &str) -> String {
    let mut out = String::new();
    let push_num = |out: &mut String, v: f64| {
        out.push(' ');
        out.push_str(&format_number(v));
    };
    out.push_str(&format!("# {title}\n"));
    out.push_str(&format!("dimension {}\n", p.dimension));
    match &p.objective {
        Objective::Signomial { plain, neg_log } => {
            out.push_str("objective\n");
            for t in plain.terms() {
                out.push_str("term");
                push_num(&mut out, t.coefficient());
                for &e in t.exponents() {
                    push_num(&mut out, e);
                }
                out.push('\n');
            }
            if let Some(p) = neg_log {
                out.push_str("neglog\n");
                for t in p.terms() {
                    out.push_str("term");
                    push_num(&mut out, t.coefficient());
                    for &e in t.exponents() {
                        push_num(&mut out, e);
                    }
                    out.push('\n');
                }
            }
        }
        Objective::Quadratic(qp) => {
            out.push_str("qp\n");
            for i in 0..qp.dimension() {
                out.push('q');
                for j in 0..qp.dimension() {
                    push_num(&mut out, qp.q()[(i, j)]);
                }
                out.push('\n');
            }
            out.push('c');
            for v in qp.c().iter() {
                push_num(&mut out, *v);
            }
            out.push('\n');
            for i in 0..qp.a().nrows() {
                out.push('a');
                for j in 0..qp.dimension() {
                    push_num(&mut out, qp.a()[(i, j)]);
                }
                out.push('\n');
            }
            if qp.a().nrows() > 0 {
                out.push('b');
                for v in qp.b().iter() {
                    push_num(&mut out, *v);
                }
                out.push('\n');
            }
            for i in 0..qp.e().nrows() {
                out.push('e');
                for j in 0..qp.dimension() {
                    push_num(&mut out, qp.e()[(i, j)]);
                }
                out.push('\n');
            }
            if qp.e().nrows() > 0 {
                out.push('d');
                for v in qp.d().iter() {
                    push_num(&mut out, *v);
                }
                out.push('\n');
            }
        }
    }
    for c in &p.constraints {
        let (kind, s) = match c {
            Constraint::Equality(s) => ("eq0", s),
            Constraint::Inequality(s) => ("le0", s),
        };
        out.push_str(&format!("constraint {kind}\n"));
        for t in s.terms() {
            out.push_str("term");
            push_num(&mut out, t.coefficient());
            for &e in t.exponents() {
                push_num(&mut out, e);
            }
            out.push('\n');
        }
    }
    out.push_str("initial");
    for &v in p.initial.coords() {
        push_num(&mut out, v);
    }
    out.push('\n');
    let o = &p.options;
    if let Some(v) = o.epsilon {
        out.push_str(&format!("epsilon {}\n", format_number(v)));
    }
    if let Some(v) = o.max_iters {
        out.push_str(&format!("max_iters {v}\n"));
    }
    if let Some(v) = o.accel {
        out.push_str(&format!("accel {v}\n"));
    }
    if let Some((k0, k1)) = o.schedule {
        out.push_str(&format!("schedule {k0} {k1}\n"));
    }
    if let Some(v) = o.inner_eps {
        out.push_str(&format!("inner_eps {}\n", format_number(v)));
    }
    if let Some(v) = o.eps_floor {
        out.push_str(&format!("eps_floor {}\n", format_number(v)));
    }
    out
}

/// Shortest representation that round-trips through `f64` parsing;
/// scientific notation keeps tolerances readable.
pub(crate) fn format_number(v: f64) -> String {
    let s = if v != 0.0 && (v.abs() < 1e-3 || v.abs() >= 1e6) {
        format!("{v:e}")
    } else {
        format!("{v}")
    };
    debug_assert_eq!(s.parse::<f64>().unwrap(), v);
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    const F1: &str = "\
dimension 2
objective
term 1 -3 0
term 3 -1 -2
term 1 1 1
initial 1 2
epsilon 1e-9
";

    #[test]
    fn parses_a_signomial_problem() {
        let p = parse(F1).unwrap();
        assert_eq!(p.dimension, 2);
        assert_eq!(p.options.epsilon, Some(1e-9));
        match &p.objective {
            Objective::Signomial { plain, neg_log } => {
                assert_eq!(plain.terms().len(), 3);
                assert!(neg_log.is_none());
            }
            _ => panic!("expected signomial objective"),
        }
    }

    #[test]
    fn round_trips_through_text() {
        let p = parse(F1).unwrap();
        let text = to_text(&p, "test");
        let again = parse(&text).unwrap();
        assert_eq!(p, again);
    }

    #[test]
    fn parse_error_carries_line_number() {
        let err = parse("dimension 2\nobjective\nterm x 1 1\ninitial 1 1\n").unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
    }

    #[test]
    fn rejects_missing_objective() {
        let err = parse("dimension 2\ninitial 1 1\n").unwrap_err();
        assert!(err.to_string().contains("exactly one"), "{err}");
    }

    #[test]
    fn rejects_both_objectives() {
        let text = "dimension 1\nobjective\nterm 1 1\nqp\nq 1\nc 0\ninitial 1\n";
        assert!(parse(text).is_err());
    }

    #[test]
    fn normalizes_eq1_constraints() {
        let text = "\
dimension 2
objective
term 1 1 0
term 1 0 1
constraint eq1
term 1 -1 0
term 1 1 -2
initial 1 1
";
        let p = parse(text).unwrap();
        match &p.constraints[0] {
            Constraint::Equality(r) => {
                assert!(r
                    .terms()
                    .iter()
                    .all(|t| t.exponents().iter().all(|&e| e >= 0.0)));
            }
            _ => panic!("expected equality"),
        }
    }

    #[test]
    fn parses_a_qp_block() {
        let text = "\
dimension 2
qp
q 1 -1
q -1 2
c -2 -6
a 1 1
a -1 2
a 2 1
b 2 2 3
initial 1 1
schedule 0 17
inner_eps 1e-9
";
        let p = parse(text).unwrap();
        match &p.objective {
            Objective::Quadratic(qp) => {
                assert_eq!(qp.a().nrows(), 3);
                assert_eq!(p.options.schedule, Some((0, 17)));
            }
            _ => panic!("expected qp"),
        }
        let again = parse(&to_text(&p, "qp test")).unwrap();
        assert_eq!(p, again);
    }
}
