//! Subcommands. Each writes its report to `out` and returns the exit code
//! for a verdict; input errors are returned as `Err` (exit code 2).

use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Serialize;
use solp::arn::ArnSpec;
use solp::engine::{
    render_answer, render_partial, solve, Answer, ArnScheme, Check, EngineError, Limits, Partial, PexprScheme, Query, Scheme,
    Solution, Strategy,
};
use solp::ltl::{self, Ltl};
use solp::pexpr::{check_ground_property, Bounds, PSpec, Verdict};

use crate::format::{self, LoadedQuery, LoadedRepository};

pub const OK: i32 = 0;
pub const NEGATIVE: i32 = 1;

fn formula(s: &str) -> Result<Ltl> {
    s.parse().with_context(|| format!("formula `{s}`"))
}

pub fn arn_validate(out: &mut dyn Write, net: &Path) -> Result<i32> {
    let n = format::load_network(net)?;
    let vs = n.validate();
    if vs.is_empty() {
        writeln!(out, "OK")?;
        return Ok(OK);
    }
    for v in &vs {
        writeln!(out, "{v}")?;
    }
    Ok(NEGATIVE)
}

pub fn arn_check(out: &mut dyn Write, net: &Path, point: &str, f: &str) -> Result<i32> {
    let n = format::load_valid_network(net)?;
    let spec = ArnSpec::new(point, formula(f)?);
    match n.property_counterexample(&spec)? {
        None => {
            writeln!(out, "holds")?;
            Ok(OK)
        }
        Some(l) => {
            writeln!(out, "fails")?;
            writeln!(out, "counterexample at {point}: {l}")?;
            Ok(NEGATIVE)
        }
    }
}

pub fn ltl_sat(out: &mut dyn Write, f: &str) -> Result<i32> {
    match ltl::satisfying_lasso(&formula(f)?)? {
        Some(l) => {
            writeln!(out, "satisfiable")?;
            writeln!(out, "witness: {l}")?;
            Ok(OK)
        }
        None => {
            writeln!(out, "unsatisfiable")?;
            Ok(NEGATIVE)
        }
    }
}

pub fn ltl_entails(out: &mut dyn Write, f: &str, g: &str) -> Result<i32> {
    match ltl::entailment_counterexample(&formula(f)?, &formula(g)?)? {
        None => {
            writeln!(out, "yes")?;
            Ok(OK)
        }
        Some(l) => {
            writeln!(out, "no")?;
            writeln!(out, "counterexample: {l}")?;
            Ok(NEGATIVE)
        }
    }
}

pub struct PexprOptions {
    pub bounds: Bounds,
    pub fuel: u64,
}

impl PexprOptions {
    fn scheme(&self) -> PexprScheme {
        PexprScheme { bounds: self.bounds.clone(), fuel: self.fuel, ..Default::default() }
    }

    fn qualifier(&self) -> String {
        format!("bounded: {}, fuel {}", self.bounds, self.fuel)
    }
}

pub struct SolveOptions<'a> {
    pub script: Option<&'a Path>,
    pub limits: Limits,
    pub output: Option<&'a Path>,
    pub pexpr: PexprOptions,
}

#[derive(Serialize)]
struct StepTrace {
    clause: String,
    selected: String,
    provides: String,
    clause_requires: Vec<String>,
    requires_before: Vec<String>,
    requires_after: Vec<String>,
    orchestration: String,
    theta1: String,
    theta2: String,
}

#[derive(Serialize)]
struct AnswerTrace {
    steps: Vec<StepTrace>,
    orchestration: String,
    remaining: Vec<String>,
    psi: String,
    check: Option<String>,
}

#[derive(Serialize)]
struct PartialTrace {
    steps: Vec<StepTrace>,
    unresolved: Option<String>,
}

#[derive(Serialize)]
struct TraceFile {
    scheme: &'static str,
    bounded: bool,
    query: Vec<String>,
    answers: Vec<AnswerTrace>,
    partial: Option<PartialTrace>,
}

fn strings<T: ToString>(xs: &[T]) -> Vec<String> {
    xs.iter().map(ToString::to_string).collect()
}

fn step_traces<S: Scheme>(scheme: &S, steps: &[solp::engine::Step<S>]) -> Vec<StepTrace> {
    steps
        .iter()
        .map(|s| StepTrace {
            clause: s.clause.clone(),
            selected: s.selected.to_string(),
            provides: s.provides.to_string(),
            clause_requires: strings(&s.clause_requires),
            requires_before: strings(&s.before.requires),
            requires_after: strings(&s.derived.requires),
            orchestration: scheme.orc_label(&s.derived.orc),
            theta1: s.unifier.query_map.to_string(),
            theta2: s.unifier.clause_map.to_string(),
        })
        .collect()
}

/// The answer's properties checked on its final orchestration, when ground.
fn answer_check<S: Scheme>(scheme: &S, a: &Answer<S>) -> Result<Option<Check>> {
    if !scheme.is_ground(&a.fin.orc) {
        return Ok(None);
    }
    let mut verdict = Check::Holds;
    for s in &a.query.requires {
        let t = scheme.translate(&a.composed, s).map_err(|e| anyhow::anyhow!("{e}"))?;
        match scheme.is_property(&a.fin.orc, &t).map_err(|e| anyhow::anyhow!("{e}"))? {
            Check::Fails => return Ok(Some(Check::Fails)),
            Check::Unknown => verdict = Check::Unknown,
            Check::Holds => {}
        }
    }
    Ok(Some(verdict))
}

fn check_label(c: Option<Check>, qualifier: Option<&str>) -> String {
    let base = match c {
        None => "not ground, unchecked",
        Some(Check::Holds) => "holds",
        Some(Check::Fails) => "fails",
        Some(Check::Unknown) => "inconclusive",
    };
    match (c, qualifier) {
        (Some(_), Some(q)) => format!("{base} ({q})"),
        _ => base.to_string(),
    }
}

/// Renders a solution and returns the exit code: 0 iff there is an answer.
fn report<S: Scheme>(
    out: &mut dyn Write,
    scheme: &S,
    name: &'static str,
    q: &Query<S>,
    sol: &Solution<S>,
    qualifier: Option<&str>,
    output: Option<&Path>,
) -> Result<i32> {
    let mut answers = Vec::new();
    for (i, a) in sol.answers.iter().enumerate() {
        if i > 0 {
            writeln!(out)?;
        }
        write!(out, "{}", render_answer(scheme, a))?;
        let check = check_label(answer_check(scheme, a)?, qualifier);
        writeln!(out, "  check: {check}")?;
        answers.push(AnswerTrace {
            steps: step_traces(scheme, &a.steps),
            orchestration: scheme.orc_label(&a.fin.orc),
            remaining: strings(&a.fin.requires),
            psi: a.composed.to_string(),
            check: Some(check),
        });
    }
    let partial = match (&sol.partial, sol.answers.is_empty()) {
        (Some(p), true) => {
            write_partial(out, scheme, p)?;
            Some(PartialTrace { steps: step_traces(scheme, &p.steps), unresolved: p.unresolved.as_ref().map(ToString::to_string) })
        }
        (None, true) => {
            writeln!(out, "no answer within limits")?;
            None
        }
        _ => None,
    };
    if let Some(path) = output {
        let trace = TraceFile { scheme: name, bounded: scheme.bounded(), query: strings(&q.requires), answers, partial };
        fs::write(path, format::to_json(&trace)).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(if sol.answers.is_empty() { NEGATIVE } else { OK })
}

fn write_partial<S: Scheme>(out: &mut dyn Write, scheme: &S, p: &Partial<S>) -> Result<()> {
    writeln!(out, "no answer within limits; longest derivation:")?;
    write!(out, "{}", render_partial(scheme, p))?;
    Ok(())
}

pub fn solve_cmd(out: &mut dyn Write, query: &Path, repository: &Path, opts: &SolveOptions) -> Result<i32> {
    let q = format::load_query(query)?;
    let r = format::load_repository(repository)?;
    let script = opts.script.map(format::load_script).transpose()?;
    let result = match (q, r) {
        (LoadedQuery::Arn(q), LoadedRepository::Arn(r)) => {
            let scheme = ArnScheme::default();
            let strategy = script.as_ref().map_or(Strategy::Auto, |s| Strategy::Scripted(format::arn_script(s)));
            solve(&scheme, &q, &r, &strategy, opts.limits).map(|sol| report(out, &scheme, "arn", &q, &sol, None, opts.output))
        }
        (LoadedQuery::Pexpr(q), LoadedRepository::Pexpr(r)) => {
            let scheme = opts.pexpr.scheme();
            let strategy = match &script {
                Some(s) => Strategy::Scripted(format::pexpr_script(s)?),
                None => Strategy::Auto,
            };
            let qualifier = opts.pexpr.qualifier();
            solve(&scheme, &q, &r, &strategy, opts.limits).map(|sol| report(out, &scheme, "pexpr", &q, &sol, Some(&qualifier), opts.output))
        }
        _ => bail!("the query and the repository use different schemes"),
    };
    match result {
        Ok(code) => code,
        Err(e @ EngineError::Script { .. }) => {
            writeln!(out, "{e}")?;
            Ok(NEGATIVE)
        }
        Err(e) => Err(e.into()),
    }
}

/// Replays a derivation script over program clauses and checks the final
/// program against the query.
pub fn pexpr_derive(out: &mut dyn Write, script_path: &Path, opts: &PexprOptions) -> Result<i32> {
    let script = format::load_script(script_path)?;
    let (qp, rp) = format::script_inputs(script_path, &script)?;
    let (LoadedQuery::Pexpr(q), LoadedRepository::Pexpr(r)) = (format::load_query(&qp)?, format::load_repository(&rp)?) else {
        bail!("`pexpr derive` needs a program query and a program repository");
    };
    let scheme = opts.scheme();
    let steps = format::pexpr_script(&script)?;
    let sol = match solve(&scheme, &q, &r, &Strategy::Scripted(steps), Limits { max_depth: script.steps.len(), max_answers: 1 }) {
        Ok(sol) => sol,
        Err(e @ EngineError::Script { .. }) => {
            writeln!(out, "{e}")?;
            return Ok(NEGATIVE);
        }
        Err(e) => return Err(e.into()),
    };
    let Some(a) = sol.answers.first() else {
        if let Some(p) = &sol.partial {
            write_partial(out, &scheme, p)?;
        }
        return Ok(NEGATIVE);
    };
    write!(out, "{}", render_answer(&scheme, a))?;
    writeln!(out, "refinements validated ({})", opts.qualifier())?;
    writeln!(out, "program: {}", a.fin.orc)?;
    let check = answer_check(&scheme, a)?;
    writeln!(out, "check: {}", check_label(check, Some(&opts.qualifier())))?;
    Ok(if check == Some(Check::Holds) { OK } else { NEGATIVE })
}

pub fn pexpr_check(out: &mut dyn Write, program: &Path, spec: &str, opts: &PexprOptions) -> Result<i32> {
    let t = format::load_program(program)?;
    let s: PSpec = spec.parse().with_context(|| format!("spec `{spec}`"))?;
    let v = check_ground_property(&t, &s, &opts.bounds, opts.fuel)?;
    writeln!(out, "{v} ({})", opts.qualifier())?;
    Ok(if v == Verdict::Holds { OK } else { NEGATIVE })
}
