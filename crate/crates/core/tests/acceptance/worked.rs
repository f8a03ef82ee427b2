//! The two worked derivations, replayed end to end.

use std::time::{Duration, Instant};

use solp::corpus::{self, DIVISION, DIVISION_REFINEMENTS, DIVISION_SPECS};
use solp::engine::{check_solution, solve, ArnScheme, Limits, PexprScheme, Scheme, Strategy};
use solp::ltl;
use solp::pexpr::{check_ground_property, refines, Cond, Verdict};

fn cond(s: &str) -> Cond {
    s.parse().unwrap()
}

pub fn traveller() -> Result<String, String> {
    let start = Instant::now();
    let scheme = ArnScheme::default();
    let q = corpus::traveller_query();
    let sol = solve(&scheme, &q, &corpus::services_repository(), &Strategy::Auto, Limits::default()).map_err(|e| e.to_string())?;
    ensure!(sol.answers.len() == 1, "{} answers", sol.answers.len());
    let a = &sol.answers[0];
    let clauses: Vec<&str> = a.steps.iter().map(|s| s.clause.as_str()).collect();
    ensure!(clauses == ["JourneyPlanner", "MapServices", "TransportSystem"], "steps {clauses:?}");
    let open = a.fin.orc.classify_points().requires;
    ensure!(open.is_empty() && a.fin.requires.is_empty(), "requires-points left: {open:?}");
    let mut verified = 0;
    for s in &a.steps {
        let weak = scheme.translate(&s.unifier.query_map, &s.selected).map_err(|e| e.to_string())?;
        let strong = scheme.translate(&s.unifier.clause_map, &s.provides).map_err(|e| e.to_string())?;
        ensure!(weak.point == strong.point, "{}: {strong} and {weak} sit on different points", s.clause);
        ensure!(ltl::entails(&strong.formula, &weak.formula).unwrap(), "{}: {strong} does not entail {weak}", s.clause);
        verified += 1;
    }
    ensure!(check_solution(&scheme, &q, &a.composed, &Vec::new()).unwrap(), "the answer does not solve the query");
    let took = start.elapsed();
    ensure!(took < Duration::from_secs(30), "took {took:?}");
    Ok(format!("1 answer in 3 steps ({}), 0 requires-points, {verified}/3 entailments verified, {:.2}s", clauses.join(", "), took.as_secs_f64()))
}

pub fn division() -> Result<String, String> {
    let start = Instant::now();
    let scheme = PexprScheme::default();
    let q = corpus::division_query();
    let script = Strategy::Scripted(corpus::division_script());
    let sol = solve(&scheme, &q, &corpus::division_repository(), &script, Limits::default()).map_err(|e| e.to_string())?;
    let a = sol.answers.first().ok_or("the script yields no answer")?;
    ensure!(a.steps.len() == 8, "{} steps", a.steps.len());
    let program = a.fin.orc.to_string();
    ensure!(program == DIVISION, "derived `{program}`");
    let mut validated = 0;
    for (s, &(i, j)) in a.steps.iter().zip(&DIVISION_REFINEMENTS) {
        // The query strengthens the first pre-condition to 1 <= y.
        let pre_i = if i == 1 { "[1 <= y]" } else { DIVISION_SPECS[i - 1].0 };
        ensure!(s.selected.pre == cond(pre_i) && s.selected.post == cond(DIVISION_SPECS[i - 1].1), "{}: selected {}", s.clause, s.selected);
        let (pre_j, post_j) = DIVISION_SPECS[j - 1];
        ensure!(s.provides.pre == cond(pre_j) && s.provides.post == cond(post_j), "{}: provides {}", s.clause, s.provides);
        let ok = refines(&s.selected, &s.unifier.query_map, &s.provides, &s.unifier.clause_map, &scheme.bounds).map_err(|e| e.to_string())?;
        ensure!(ok, "{}: spec {j} does not refine spec {i}", s.clause);
        validated += 1;
    }
    let verdict = check_ground_property(&a.fin.orc, &q.requires[0], &scheme.bounds, scheme.fuel).map_err(|e| e.to_string())?;
    ensure!(verdict == Verdict::Holds, "ground check: {verdict}");
    let took = start.elapsed();
    ensure!(took < Duration::from_secs(10), "took {took:?}");
    Ok(format!(
        "program byte-identical, {validated}/8 refinements validated on {}, ground check {} holds, {:.2}s",
        scheme.bounds,
        q.requires[0],
        took.as_secs_f64()
    ))
}
