//! Resolution over an arbitrary orchestration scheme.
//!
//! Clauses are service modules `orc : P ← R`, queries are client
//! applications `orc : Q`. A resolution step unifies a selected spec of the
//! query with the provides-spec of a clause through a cospan of morphisms and
//! replaces it by the clause's requires-specs, translated into the apex.

use std::fmt;

use thiserror::Error;

mod arn_scheme;
mod pexpr_scheme;
mod trace;

pub use arn_scheme::{ArnPool, ArnScheme};
pub use pexpr_scheme::PexprScheme;
pub use trace::{render_answer, render_partial, render_step};

/// Three-valued outcome of a property check. `Unknown` arises from bounded
/// oracles that ran out of fuel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Check {
    Holds,
    Fails,
    Unknown,
}

/// The operations an orchestration scheme supplies to the engine.
pub trait Scheme {
    type Orc: Clone + PartialEq;
    type Spec: Clone + PartialEq + fmt::Display;
    type Morphism: Clone + fmt::Display;
    type Hint: Clone;
    /// Material from which models of non-ground orchestrations are assembled.
    type Pool;
    type Error: std::error::Error;

    /// Whether property checks are bounded rather than exact.
    fn bounded(&self) -> bool;
    fn orc_label(&self, o: &Self::Orc) -> String;
    /// Key by which a derivation script selects a spec.
    fn spec_key(&self, s: &Self::Spec) -> String;

    fn identity(&self, o: &Self::Orc) -> Self::Morphism;
    fn compose(&self, f: &Self::Morphism, g: &Self::Morphism) -> Result<Self::Morphism, Self::Error>;
    fn target(&self, m: &Self::Morphism) -> Self::Orc;
    fn translate(&self, m: &Self::Morphism, s: &Self::Spec) -> Result<Self::Spec, Self::Error>;

    fn is_ground(&self, o: &Self::Orc) -> bool;
    /// Defined on ground orchestrations.
    fn is_property(&self, o: &Self::Orc, s: &Self::Spec) -> Result<Check, Self::Error>;
    /// Conservative: never true in case of doubt.
    fn is_trivial(&self, o: &Self::Orc, s: &Self::Spec) -> Result<bool, Self::Error>;
    /// `strong ⊨ weak`, both over `o`.
    fn spec_entails(&self, o: &Self::Orc, strong: &Self::Spec, weak: &Self::Spec) -> Result<bool, Self::Error>;

    /// Candidate cospans `q → apex ← c` aligning `qs` with `cs`. The clause
    /// side is renamed apart using `fresh`.
    fn bind(
        &self,
        q: &Self::Orc,
        qs: &Self::Spec,
        c: &Self::Orc,
        cs: &Self::Spec,
        hint: Option<&Self::Hint>,
        fresh: usize,
    ) -> Result<Vec<(Self::Morphism, Self::Morphism)>, Self::Error>;

    /// Morphisms from `o` into ground orchestrations built from the pool.
    fn models(&self, o: &Self::Orc, pool: &Self::Pool) -> Result<Vec<Self::Morphism>, Self::Error>;
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EngineError {
    #[error("{0}")]
    Scheme(String),
    #[error("spec {0} is not required by the query")]
    NotRequired(String),
    #[error("step {step}: {message}")]
    Script { step: usize, message: String },
}

fn scheme_err(e: impl std::error::Error) -> EngineError {
    EngineError::Scheme(e.to_string())
}

pub struct Clause<S: Scheme> {
    pub name: String,
    pub orc: S::Orc,
    pub provides: S::Spec,
    pub requires: Vec<S::Spec>,
}

impl<S: Scheme> Clone for Clause<S> {
    fn clone(&self) -> Self {
        Clause { name: self.name.clone(), orc: self.orc.clone(), provides: self.provides.clone(), requires: self.requires.clone() }
    }
}

pub struct Query<S: Scheme> {
    pub orc: S::Orc,
    pub requires: Vec<S::Spec>,
}

impl<S: Scheme> Clone for Query<S> {
    fn clone(&self) -> Self {
        Query { orc: self.orc.clone(), requires: self.requires.clone() }
    }
}

/// Clauses in declaration order, each with an optional binding hint.
pub struct Repository<S: Scheme> {
    pub entries: Vec<(Clause<S>, Option<S::Hint>)>,
}

impl<S: Scheme> Repository<S> {
    pub fn new() -> Self {
        Repository { entries: Vec::new() }
    }

    pub fn push(&mut self, clause: Clause<S>, hint: Option<S::Hint>) {
        self.entries.push((clause, hint));
    }

    pub fn get(&self, name: &str) -> Option<&(Clause<S>, Option<S::Hint>)> {
        self.entries.iter().find(|(c, _)| c.name == name)
    }
}

impl<S: Scheme> Default for Repository<S> {
    fn default() -> Self {
        Repository::new()
    }
}

/// `⟨θ1, θ2⟩` with `θ2(provides) ⊨ θ1(selected)` verified.
pub struct Unifier<S: Scheme> {
    pub query_map: S::Morphism,
    pub clause_map: S::Morphism,
}

impl<S: Scheme> Clone for Unifier<S> {
    fn clone(&self) -> Self {
        Unifier { query_map: self.query_map.clone(), clause_map: self.clause_map.clone() }
    }
}

pub struct Step<S: Scheme> {
    pub clause: String,
    pub before: Query<S>,
    pub selected: S::Spec,
    pub provides: S::Spec,
    pub clause_requires: Vec<S::Spec>,
    pub unifier: Unifier<S>,
    pub derived: Query<S>,
}

impl<S: Scheme> Clone for Step<S> {
    fn clone(&self) -> Self {
        Step {
            clause: self.clause.clone(),
            before: self.before.clone(),
            selected: self.selected.clone(),
            provides: self.provides.clone(),
            clause_requires: self.clause_requires.clone(),
            unifier: self.unifier.clone(),
            derived: self.derived.clone(),
        }
    }
}

pub struct Answer<S: Scheme> {
    pub query: Query<S>,
    pub steps: Vec<Step<S>>,
    /// The computed answer: the computed morphisms of the steps, composed.
    pub composed: S::Morphism,
    pub fin: Query<S>,
}

/// A derivation that could not be completed.
pub struct Partial<S: Scheme> {
    pub steps: Vec<Step<S>>,
    pub unresolved: Option<S::Spec>,
}

/// Unifiers of `selected` (over `q`) with the provides-spec of `c`.
pub fn unify<S: Scheme>(
    scheme: &S,
    q: &S::Orc,
    selected: &S::Spec,
    c: &Clause<S>,
    hint: Option<&S::Hint>,
    fresh: usize,
) -> Result<Vec<Unifier<S>>, EngineError> {
    let mut out = Vec::new();
    for (query_map, clause_map) in scheme.bind(q, selected, &c.orc, &c.provides, hint, fresh).map_err(scheme_err)? {
        let apex = scheme.target(&query_map);
        let weak = scheme.translate(&query_map, selected).map_err(scheme_err)?;
        let strong = scheme.translate(&clause_map, &c.provides).map_err(scheme_err)?;
        if scheme.spec_entails(&apex, &strong, &weak).map_err(scheme_err)? {
            out.push(Unifier { query_map, clause_map });
        }
    }
    Ok(out)
}

/// `θ1(Q \ {selected}) ∪ θ2(R)`, keeping the first of exact duplicates.
pub fn resolve<S: Scheme>(scheme: &S, q: &Query<S>, c: &Clause<S>, selected: &S::Spec, u: &Unifier<S>) -> Result<Query<S>, EngineError> {
    let at = q.requires.iter().position(|s| s == selected).ok_or_else(|| EngineError::NotRequired(selected.to_string()))?;
    let mut requires: Vec<S::Spec> = Vec::new();
    let rest = q.requires.iter().enumerate().filter(|(i, _)| *i != at).map(|(_, s)| (&u.query_map, s));
    for (m, s) in rest.chain(c.requires.iter().map(|s| (&u.clause_map, s))) {
        let t = scheme.translate(m, s).map_err(scheme_err)?;
        if !requires.contains(&t) {
            requires.push(t);
        }
    }
    Ok(Query { orc: scheme.target(&u.query_map), requires })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_depth: usize,
    pub max_answers: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_depth: 8, max_answers: 16 }
    }
}

/// One step of a derivation script: resolve the spec with the given key
/// against the named clause.
pub struct ScriptStep<S: Scheme> {
    pub select: String,
    pub clause: String,
    pub hint: Option<S::Hint>,
}

pub enum Strategy<S: Scheme> {
    /// Depth-first; the leftmost non-trivial spec is selected and clauses are
    /// tried in declaration order.
    Auto,
    Scripted(Vec<ScriptStep<S>>),
}

pub struct Solution<S: Scheme> {
    pub answers: Vec<Answer<S>>,
    /// The longest derivation that got stuck, when there is no answer.
    pub partial: Option<Partial<S>>,
}

fn first_nontrivial<S: Scheme>(scheme: &S, q: &Query<S>) -> Option<S::Spec> {
    q.requires.iter().find(|s| !scheme.is_trivial(&q.orc, s).unwrap_or(false)).cloned()
}

fn answer<S: Scheme>(scheme: &S, query: &Query<S>, steps: Vec<Step<S>>, fin: Query<S>) -> Result<Answer<S>, EngineError> {
    let mut composed = scheme.identity(&query.orc);
    for s in &steps {
        composed = scheme.compose(&composed, &s.unifier.query_map).map_err(scheme_err)?;
    }
    Ok(Answer { query: query.clone(), steps, composed, fin })
}

struct Search<'a, S: Scheme> {
    scheme: &'a S,
    repo: &'a Repository<S>,
    root: &'a Query<S>,
    limits: Limits,
    answers: Vec<Answer<S>>,
    partial: Option<Partial<S>>,
}

impl<S: Scheme> Search<'_, S> {
    fn stuck(&mut self, steps: &[Step<S>], unresolved: Option<S::Spec>) {
        if self.partial.as_ref().is_none_or(|p| p.steps.len() < steps.len()) {
            self.partial = Some(Partial { steps: steps.to_vec(), unresolved });
        }
    }

    fn run(&mut self, q: &Query<S>, steps: &mut Vec<Step<S>>) -> Result<(), EngineError> {
        if self.answers.len() >= self.limits.max_answers {
            return Ok(());
        }
        let Some(selected) = first_nontrivial(self.scheme, q) else {
            let a = answer(self.scheme, self.root, steps.clone(), q.clone())?;
            self.answers.push(a);
            return Ok(());
        };
        if steps.len() >= self.limits.max_depth {
            self.stuck(steps, Some(selected));
            return Ok(());
        }
        let mut progressed = false;
        for (c, hint) in &self.repo.entries {
            // A hint that does not fit this spec rules the clause out.
            let Ok(unifiers) = unify(self.scheme, &q.orc, &selected, c, hint.as_ref(), steps.len() + 1) else { continue };
            for u in unifiers {
                let derived = resolve(self.scheme, q, c, &selected, &u)?;
                progressed = true;
                steps.push(Step {
                    clause: c.name.clone(),
                    before: q.clone(),
                    selected: selected.clone(),
                    provides: c.provides.clone(),
                    clause_requires: c.requires.clone(),
                    unifier: u,
                    derived: derived.clone(),
                });
                self.run(&derived, steps)?;
                steps.pop();
                if self.answers.len() >= self.limits.max_answers {
                    return Ok(());
                }
            }
        }
        if !progressed {
            self.stuck(steps, Some(selected));
        }
        Ok(())
    }
}

pub fn solve<S: Scheme>(scheme: &S, q: &Query<S>, repo: &Repository<S>, strategy: &Strategy<S>, limits: Limits) -> Result<Solution<S>, EngineError> {
    match strategy {
        Strategy::Auto => {
            let mut search = Search { scheme, repo, root: q, limits, answers: Vec::new(), partial: None };
            search.run(q, &mut Vec::new())?;
            let partial = if search.answers.is_empty() { search.partial } else { None };
            Ok(Solution { answers: search.answers, partial })
        }
        Strategy::Scripted(script) => run_script(scheme, q, repo, script),
    }
}

fn run_script<S: Scheme>(scheme: &S, q: &Query<S>, repo: &Repository<S>, script: &[ScriptStep<S>]) -> Result<Solution<S>, EngineError> {
    let mut current = q.clone();
    let mut steps: Vec<Step<S>> = Vec::new();
    for (i, st) in script.iter().enumerate() {
        let fail = |message: String| EngineError::Script { step: i + 1, message };
        let selected = current
            .requires
            .iter()
            .find(|s| scheme.spec_key(s) == st.select)
            .cloned()
            .ok_or_else(|| fail(format!("no required spec is selected by `{}`", st.select)))?;
        let (c, repo_hint) = repo.get(&st.clause).ok_or_else(|| fail(format!("unknown clause `{}`", st.clause)))?;
        let hint = st.hint.as_ref().or(repo_hint.as_ref());
        let unifiers = unify(scheme, &current.orc, &selected, c, hint, i + 1).map_err(|e| fail(e.to_string()))?;
        let Some(u) = unifiers.into_iter().next() else {
            return Err(fail(format!("{} of `{}` does not refine {selected}", c.provides, c.name)));
        };
        let derived = resolve(scheme, &current, c, &selected, &u)?;
        steps.push(Step {
            clause: c.name.clone(),
            before: current.clone(),
            selected,
            provides: c.provides.clone(),
            clause_requires: c.requires.clone(),
            unifier: u,
            derived: derived.clone(),
        });
        current = derived;
    }
    match first_nontrivial(scheme, &current) {
        None => Ok(Solution { answers: vec![answer(scheme, q, steps, current)?], partial: None }),
        Some(s) => Ok(Solution { answers: Vec::new(), partial: Some(Partial { steps, unresolved: Some(s) }) }),
    }
}

/// Whether `psi` solves the query: every translated spec is a property of
/// the target if it is ground, or of every model assembled from the pool
/// otherwise. Unknown verdicts count as failures.
pub fn check_solution<S: Scheme>(scheme: &S, q: &Query<S>, psi: &S::Morphism, pool: &S::Pool) -> Result<bool, EngineError> {
    let target = scheme.target(psi);
    let specs: Vec<S::Spec> = q.requires.iter().map(|s| scheme.translate(psi, s)).collect::<Result<_, _>>().map_err(scheme_err)?;
    if scheme.is_ground(&target) {
        for s in &specs {
            if scheme.is_property(&target, s).map_err(scheme_err)? != Check::Holds {
                return Ok(false);
            }
        }
        return Ok(true);
    }
    for delta in scheme.models(&target, pool).map_err(scheme_err)? {
        let g = scheme.target(&delta);
        for s in &specs {
            let t = scheme.translate(&delta, s).map_err(scheme_err)?;
            if scheme.is_property(&g, &t).map_err(scheme_err)? != Check::Holds {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[derive(Debug, Clone)]
pub enum Correctness<M> {
    /// No model in the pool refutes the clause. Not a proof.
    NoCounterexample { models: usize },
    /// A model satisfying every requires-spec but not the provides-spec.
    Counterexample(M),
}

pub fn check_clause_correctness<S: Scheme>(scheme: &S, c: &Clause<S>, pool: &S::Pool) -> Result<Correctness<S::Morphism>, EngineError> {
    let models = scheme.models(&c.orc, pool).map_err(scheme_err)?;
    for delta in &models {
        let g = scheme.target(delta);
        let check = |s: &S::Spec| -> Result<Check, EngineError> {
            let t = scheme.translate(delta, s).map_err(scheme_err)?;
            scheme.is_property(&g, &t).map_err(scheme_err)
        };
        let mut premises = true;
        for r in &c.requires {
            premises &= check(r)? == Check::Holds;
        }
        if premises && check(&c.provides)? == Check::Fails {
            return Ok(Correctness::Counterexample(delta.clone()));
        }
    }
    Ok(Correctness::NoCounterexample { models: models.len() })
}
