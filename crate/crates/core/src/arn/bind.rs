use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use super::{qualify, Arn, ArnError, ArnMorphism, Connection, ProcessEdge};
use crate::sigcat::ActionSignature;

/// The cospan `query → apex ← clause` produced by fusing a requires-point of
/// the query with a provides-point of the clause.
#[derive(Debug, Clone)]
pub struct Binding {
    pub apex: Arc<Arn>,
    pub query_map: ArnMorphism,
    pub clause_map: ArnMorphism,
}

/// The message correspondence from the port at `x` to the port at `y`.
///
/// An explicit hint must be total, injective and polarity-preserving. Without
/// a hint, messages correspond by name; `None` means they do not.
fn correspondence(
    query: &Arn,
    x: &str,
    clause: &Arn,
    y: &str,
    hint: Option<&BTreeMap<String, String>>,
) -> Result<Option<BTreeMap<String, String>>, ArnError> {
    let (px, py) = (query.port(x)?, clause.port(y)?);
    let Some(hint) = hint else {
        let matched = px.messages().all(|m| px.polarity(m) == py.polarity(m));
        return Ok(matched.then(|| px.messages().map(|m| (m.clone(), m.clone())).collect()));
    };
    let bad = |m: String| Err(ArnError::InvalidHint(m));
    if let Some(m) = px.messages().find(|m| !hint.contains_key(*m)) {
        return bad(format!("message `{m}` of `{x}` is not mapped"));
    }
    let mut images = BTreeSet::new();
    for (m, n) in hint {
        let Some(pol) = px.polarity(m) else {
            return bad(format!("`{m}` is not a message of `{x}`"));
        };
        if py.polarity(n) != Some(pol) {
            return bad(format!("`{m}` ↦ `{n}` does not preserve polarity at `{y}`"));
        }
        if !images.insert(n) {
            return bad(format!("two messages map to `{n}`"));
        }
    }
    Ok(Some(hint.clone()))
}

/// Fuses requires-point `x` of `query` with provides-point `y` of `clause`.
///
/// The fused point keeps the clause's name and port; connections of the query
/// attached to `x` are re-attached through the message correspondence. Clause
/// names that clash with query names get a `'` suffix.
pub fn bind(
    query: &Arc<Arn>,
    x: &str,
    clause: &Arc<Arn>,
    y: &str,
    hint: Option<&BTreeMap<String, String>>,
) -> Result<Option<Binding>, ArnError> {
    if !query.classify_points().requires.contains(x) {
        return Err(ArnError::NotRequiresPoint(x.to_string()));
    }
    if !clause.classify_points().provides.contains(y) {
        return Err(ArnError::NotProvidesPoint(y.to_string()));
    }
    let Some(h) = correspondence(query, x, clause, y, hint)? else {
        return Ok(None);
    };

    let mut used: BTreeSet<String> = query
        .points
        .keys()
        .filter(|p| *p != x)
        .cloned()
        .chain(query.edge_names().into_iter().map(str::to_string))
        .collect();
    let mut rename: BTreeMap<String, String> = BTreeMap::new();
    for name in clause.points.keys().map(String::as_str).chain(clause.edge_names()) {
        let mut fresh = name.to_string();
        while used.contains(&fresh) {
            fresh.push('\'');
        }
        used.insert(fresh.clone());
        rename.insert(name.to_string(), fresh);
    }
    let fused = rename[y].clone();

    let mut apex = Arn::new(format!("{}+{}", query.name, clause.name));
    for (p, port) in query.points.iter().filter(|(p, _)| *p != x) {
        apex.points.insert(p.clone(), port.clone());
    }
    for (p, port) in &clause.points {
        apex.points.insert(rename[p].clone(), port.clone());
    }
    apex.processes = query.processes.clone();
    for (p, proc_) in &clause.processes {
        let points: BTreeSet<String> = proc_.points.iter().map(|q| rename[q].clone()).collect();
        let sig: ActionSignature =
            points.iter().flat_map(|q| qualify(q, &apex.points[q].actions()).iter().cloned().collect::<Vec<_>>()).collect();
        let automaton = proc_.automaton.rename_actions(sig, &|a| {
            let q = a.qualifier.as_deref().unwrap_or_default();
            a.unqualified().qualified(&rename[q])
        })?;
        apex.processes.insert(rename[p].clone(), ProcessEdge { points, automaton });
    }
    for (c, conn) in &query.connections {
        let mut conn = conn.clone();
        if let Some(mu) = conn.attachments.remove(x) {
            let composed = mu.into_iter().map(|(m, t)| (m, h[&t].clone())).collect();
            conn.attachments.insert(fused.clone(), composed);
        }
        apex.connections.insert(c.clone(), conn);
    }
    for (c, conn) in &clause.connections {
        let attachments = conn.attachments.iter().map(|(q, mu)| (rename[q].clone(), mu.clone())).collect();
        apex.connections.insert(rename[c].clone(), Connection { attachments, ..conn.clone() });
    }
    let apex = Arc::new(apex);

    let identity = |ms: &mut dyn Iterator<Item = &String>| ms.map(|m| (m.clone(), m.clone())).collect::<BTreeMap<_, _>>();
    let mut query_map = ArnMorphism::identity(query.clone());
    query_map.target = apex.clone();
    query_map.points.insert(x.to_string(), fused.clone());
    query_map.messages.insert(x.to_string(), h);
    let clause_map = ArnMorphism {
        source: clause.clone(),
        target: apex.clone(),
        points: clause.points.keys().map(|p| (p.clone(), rename[p].clone())).collect(),
        edges: clause.edge_names().into_iter().map(|e| (e.to_string(), rename[e].clone())).collect(),
        messages: clause.points.iter().map(|(p, port)| (p.clone(), identity(&mut port.messages()))).collect(),
    };
    Ok(Some(Binding { apex, query_map, clause_map }))
}
