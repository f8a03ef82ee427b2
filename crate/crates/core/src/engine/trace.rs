//! Two-line rendering of resolution steps:
//!
//! ```text
//! [n] Q × clause P ← R
//!     ⊢ Q′ over apex, θ1: computed morphism
//! ```

use super::{Answer, Partial, Scheme, Step};

fn specs<S: Scheme>(ss: &[S::Spec]) -> String {
    let parts: Vec<String> = ss.iter().map(ToString::to_string).collect();
    format!("{{{}}}", parts.join(", "))
}

pub fn render_step<S: Scheme>(scheme: &S, n: usize, s: &Step<S>) -> String {
    format!(
        "[{n}] {} × {} {} ← {}\n    ⊢ {} over {}, θ1: {}\n",
        specs::<S>(&s.before.requires),
        s.clause,
        s.provides,
        specs::<S>(&s.clause_requires),
        specs::<S>(&s.derived.requires),
        scheme.orc_label(&s.derived.orc),
        s.unifier.query_map,
    )
}

pub fn render_answer<S: Scheme>(scheme: &S, a: &Answer<S>) -> String {
    let mut out = format!("query {} over {}\n", specs::<S>(&a.query.requires), scheme.orc_label(&a.query.orc));
    for (i, s) in a.steps.iter().enumerate() {
        out.push_str(&render_step(scheme, i + 1, s));
    }
    let steps = if a.steps.len() == 1 { "step" } else { "steps" };
    out.push_str(&format!("answer in {} {steps}: {}\n", a.steps.len(), scheme.orc_label(&a.fin.orc)));
    out.push_str(&format!("  remaining {}\n", specs::<S>(&a.fin.requires)));
    out.push_str(&format!("  ψ: {}\n", a.composed));
    out
}

pub fn render_partial<S: Scheme>(scheme: &S, p: &Partial<S>) -> String {
    let mut out = String::new();
    for (i, s) in p.steps.iter().enumerate() {
        out.push_str(&render_step(scheme, i + 1, s));
    }
    if let Some(u) = &p.unresolved {
        out.push_str(&format!("unresolved {u}\n"));
    }
    out
}
