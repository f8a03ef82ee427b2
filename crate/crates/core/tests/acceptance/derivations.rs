//! Answers computed over the worked repositories and over random ones, and
//! the soundness check on each of them.

use solp::corpus;
use solp::engine::{check_solution, solve, Answer, ArnScheme, Limits, PexprScheme, Query, Scheme, Strategy};

use crate::gen;

pub const RANDOM_ARN: usize = 12;
pub const RANDOM_PEXPR: usize = 12;

pub struct Derived<S: Scheme> {
    pub label: String,
    pub random: bool,
    pub query: Query<S>,
    pub answers: Vec<Answer<S>>,
}

pub fn arn_derivations() -> Vec<Derived<ArnScheme>> {
    let scheme = ArnScheme::default();
    let q = corpus::traveller_query();
    let sol = solve(&scheme, &q, &corpus::services_repository(), &Strategy::Auto, Limits::default()).unwrap();
    let mut out = vec![Derived { label: "Traveller".into(), random: false, query: q, answers: sol.answers }];
    let mut rng = gen::rng(71);
    for i in 0..RANDOM_ARN {
        let inst = gen::random_arn_instance(&mut rng);
        let sol = solve(&scheme, &inst.query, &inst.repository, &Strategy::Auto, Limits { max_depth: 4, max_answers: 8 }).unwrap();
        out.push(Derived { label: format!("random network repository {i}"), random: true, query: inst.query, answers: sol.answers });
    }
    out
}

pub fn pexpr_scheme() -> PexprScheme {
    PexprScheme::default()
}

pub fn pexpr_derivations() -> Vec<Derived<PexprScheme>> {
    let scheme = pexpr_scheme();
    let q = corpus::division_query();
    let repo = corpus::division_repository();
    let scripted = solve(&scheme, &q, &repo, &Strategy::Scripted(corpus::division_script()), Limits::default()).unwrap();
    let auto = solve(&scheme, &q, &repo, &Strategy::Auto, Limits { max_depth: 8, max_answers: 4 }).unwrap();
    let mut out = vec![
        Derived { label: "division (scripted)".into(), random: false, query: q.clone(), answers: scripted.answers },
        Derived { label: "division (search)".into(), random: false, query: q, answers: auto.answers },
    ];
    let mut rng = gen::rng(72);
    for i in 0..RANDOM_PEXPR {
        let inst = gen::random_pexpr_instance(&mut rng);
        let sol = solve(&scheme, &inst.query, &inst.repository, &Strategy::Auto, Limits { max_depth: 6, max_answers: 8 }).unwrap();
        out.push(Derived { label: format!("random program repository {i}"), random: true, query: inst.query, answers: sol.answers });
    }
    out
}

/// Answers checked, and how many of them came from random repositories.
fn check_all<S: Scheme>(scheme: &S, pool: &S::Pool, ds: &[Derived<S>]) -> Result<(usize, usize), String> {
    let (mut total, mut random) = (0, 0);
    for d in ds {
        for (k, a) in d.answers.iter().enumerate() {
            let ok = check_solution(scheme, &d.query, &a.composed, pool).map_err(|e| e.to_string())?;
            ensure!(ok, "{}: answer {k} ({}) does not solve its query", d.label, a.composed);
            total += 1;
            random += usize::from(d.random);
        }
    }
    Ok((total, random))
}

pub fn soundness() -> Result<String, String> {
    let arn = arn_derivations();
    let pexpr = pexpr_derivations();
    let (arn_total, arn_random) = check_all(&ArnScheme::default(), &Vec::new(), &arn)?;
    let (p_total, p_random) = check_all(&pexpr_scheme(), &Vec::new(), &pexpr)?;
    let with_answers = arn.iter().filter(|d| d.random && !d.answers.is_empty()).count()
        + pexpr.iter().filter(|d| d.random && !d.answers.is_empty()).count();
    ensure!(RANDOM_ARN + RANDOM_PEXPR >= 20, "too few random repositories");
    ensure!(arn_random > 0 && p_random > 0, "a random family produced no answers");
    Ok(format!(
        "{} random repositories ({with_answers} with answers) plus the worked ones: {} answers, all solve their queries \
         ({arn_total} network answers, {arn_random} random; {p_total} program answers, {p_random} random)",
        RANDOM_ARN + RANDOM_PEXPR,
        arn_total + p_total
    ))
}
