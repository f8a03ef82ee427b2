use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use super::{Arn, ArnError, ArnSpec, Violation};
use crate::ltl::Ltl;
use crate::muller::MullerAutomaton;
use crate::sigcat::Action;

/// A morphism of networks: injective maps on points and hyperedges, and for
/// each source point an injective, polarity-preserving map of its port
/// messages into the port of the image point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArnMorphism {
    pub source: Arc<Arn>,
    pub target: Arc<Arn>,
    pub points: BTreeMap<String, String>,
    pub edges: BTreeMap<String, String>,
    pub messages: BTreeMap<String, BTreeMap<String, String>>,
}

fn identity_map<'a>(keys: impl Iterator<Item = &'a String>) -> BTreeMap<String, String> {
    keys.map(|k| (k.clone(), k.clone())).collect()
}

impl ArnMorphism {
    pub fn identity(n: Arc<Arn>) -> Self {
        let points = identity_map(n.points.keys());
        let edges = identity_map(n.processes.keys().chain(n.connections.keys()));
        let messages = n.points.iter().map(|(x, p)| (x.clone(), identity_map(p.messages()))).collect();
        ArnMorphism { source: n.clone(), target: n, points, edges, messages }
    }

    pub fn point(&self, x: &str) -> Result<&str, ArnError> {
        self.points.get(x).map(String::as_str).ok_or_else(|| ArnError::UnknownPoint(x.to_string()))
    }

    fn rename_action(&self, x: &str, a: &Action) -> Option<Action> {
        Some(Action { name: self.messages.get(x)?.get(&a.name)?.clone(), ..a.clone() })
    }

    /// `θ(x) : θ^pt_x(ρ)`.
    pub fn translate_spec(&self, spec: &ArnSpec) -> Result<ArnSpec, ArnError> {
        let y = self.point(&spec.point)?;
        if let Some(a) = spec.formula.atoms().into_iter().find(|a| self.rename_action(&spec.point, a).is_none()) {
            return Err(ArnError::SpecOutsidePort { point: spec.point.clone(), atom: a.to_string() });
        }
        let formula = spec.formula.rename(&|a| self.rename_action(&spec.point, a).expect("checked"));
        Ok(ArnSpec { point: y.to_string(), formula })
    }

    pub fn translate_formula(&self, x: &str, f: &Ltl) -> Result<Ltl, ArnError> {
        Ok(self.translate_spec(&ArnSpec::new(x, f.clone()))?.formula)
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &ArnMorphism) -> Result<ArnMorphism, ArnError> {
        if *self.target != *next.source {
            return Err(ArnError::NotComposable);
        }
        let via = |m: &BTreeMap<String, String>, n: &BTreeMap<String, String>, k: &String| -> Result<String, ArnError> {
            let mid = m.get(k).ok_or_else(|| ArnError::UnknownEdge(k.clone()))?;
            n.get(mid).cloned().ok_or_else(|| ArnError::UnknownEdge(mid.clone()))
        };
        let points = self.points.keys().map(|x| Ok((x.clone(), via(&self.points, &next.points, x)?))).collect::<Result<_, ArnError>>()?;
        let edges = self.edges.keys().map(|e| Ok((e.clone(), via(&self.edges, &next.edges, e)?))).collect::<Result<_, ArnError>>()?;
        let mut messages = BTreeMap::new();
        for (x, mx) in &self.messages {
            let y = self.point(x)?;
            let my = next.messages.get(y).ok_or_else(|| ArnError::UnknownPoint(y.to_string()))?;
            let composed = mx.keys().map(|m| Ok((m.clone(), via(mx, my, m)?))).collect::<Result<_, ArnError>>()?;
            messages.insert(x.clone(), composed);
        }
        Ok(ArnMorphism { source: self.source.clone(), target: next.target.clone(), points, edges, messages })
    }

    /// Every violated morphism condition.
    pub fn check(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut report = |location: &str, message: String| {
            out.push(Violation { location: location.to_string(), message });
        };
        let (src, dst) = (&*self.source, &*self.target);

        let mut seen = BTreeSet::new();
        for x in src.points.keys() {
            match self.points.get(x) {
                None => report(x, "point is not mapped".into()),
                Some(y) if !dst.points.contains_key(y) => report(x, format!("image `{y}` is not a target point")),
                Some(y) if !seen.insert(y) => report(x, format!("point map is not injective at `{y}`")),
                _ => {}
            }
        }
        let mut seen = BTreeSet::new();
        for e in src.edge_names() {
            let Some(f) = self.edges.get(e) else {
                report(e, "hyperedge is not mapped".into());
                continue;
            };
            if !seen.insert(f) {
                report(e, format!("hyperedge map is not injective at `{f}`"));
            }
            let same_kind = (src.processes.contains_key(e) && dst.processes.contains_key(f))
                || (src.connections.contains_key(e) && dst.connections.contains_key(f));
            if !same_kind {
                report(e, format!("image `{f}` is not a target hyperedge of the same kind"));
                continue;
            }
            let (ge, gf) = (src.incidence(e).expect("edge"), dst.incidence(f).expect("edge"));
            for x in src.points.keys() {
                let Some(y) = self.points.get(x) else { continue };
                if ge.contains(x.as_str()) != gf.contains(y.as_str()) {
                    report(e, format!("incidence of `{x}` is not preserved"));
                }
            }
        }

        let computation: BTreeSet<&String> = src.processes.values().flat_map(|p| &p.points).collect();
        for (x, port) in &src.points {
            let Some(target_port) = self.points.get(x).and_then(|y| dst.points.get(y)) else { continue };
            let mx = self.messages.get(x).cloned().unwrap_or_default();
            let mut images = BTreeSet::new();
            for m in port.messages() {
                match mx.get(m) {
                    None => report(x, format!("message `{m}` is not mapped")),
                    Some(n) => {
                        if port.polarity(m) != target_port.polarity(n) {
                            report(x, format!("`{m}` ↦ `{n}` does not preserve polarity"));
                        }
                        if !images.insert(n) {
                            report(x, format!("message map is not injective at `{n}`"));
                        }
                    }
                }
            }
            if computation.contains(x) && (port != target_port || mx.iter().any(|(m, n)| m != n)) {
                report(x, "message map must be the identity at a point of a process".into());
            }
        }

        for (p, proc_) in &src.processes {
            let Some(q) = self.edges.get(p).and_then(|q| dst.processes.get(q)) else { continue };
            let renamed = proc_.automaton.rename_actions(q.automaton.signature().clone(), &|a| {
                let x = a.qualifier.as_deref().unwrap_or_default();
                a.unqualified().qualified(self.points.get(x).map(String::as_str).unwrap_or(x))
            });
            let same = renamed.map(|r| MullerAutomaton::is_isomorphic(&r, &q.automaton).unwrap_or(false)).unwrap_or(false);
            if !same {
                report(p, "process automaton is not preserved".into());
            }
        }
        for (c, conn) in &src.connections {
            let Some(d) = self.edges.get(c).and_then(|d| dst.connections.get(d)) else { continue };
            let same_channel = conn.messages == d.messages
                && MullerAutomaton::is_isomorphic(&conn.automaton, &d.automaton).unwrap_or(false);
            if !same_channel {
                report(c, "channel is not preserved".into());
            }
            for (x, mu) in &conn.attachments {
                let Some(y) = self.points.get(x) else { continue };
                let composed: Option<BTreeMap<String, String>> = mu
                    .iter()
                    .map(|(m, t)| Some((m.clone(), self.messages.get(x)?.get(t)?.clone())))
                    .collect();
                if composed.as_ref() != d.attachments.get(y) {
                    report(c, format!("attachment at `{x}` does not commute"));
                }
            }
        }
        out.sort();
        out.dedup();
        out
    }
}

impl fmt::Display for ArnMorphism {
    /// Lists the elements that are not mapped to themselves.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (x, y) in self.points.iter().chain(&self.edges).filter(|(x, y)| x != y) {
            parts.push(format!("{x} ↦ {y}"));
        }
        for mx in self.messages.values() {
            for (m, n) in mx.iter().filter(|(m, n)| m != n) {
                parts.push(format!("{m} ↦ {n}"));
            }
        }
        if parts.is_empty() {
            f.write_str("1")
        } else {
            f.write_str(&parts.join(", "))
        }
    }
}
