//! Asynchronous relational networks.
//!
//! A network is an edge-bipartite hypergraph: points carry ports, computation
//! hyperedges carry processes (automata over point-qualified actions `x.m!`,
//! `x.m?`), and communication hyperedges carry connections (a channel automaton
//! over bare `m!`, `m?` plus, per attached point, a partial injection of
//! channel messages into the point's port).

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::ltl::{self, Ltl, LtlError};
use crate::muller::{Lasso, MullerAutomaton, MullerError, Tabled};
use crate::sigcat::{colimit, is_identifier, Action, ActionSignature, Cocone, Diagram, Polarity, SigError, SignatureMorphism};

mod bind;
mod morphism;

pub use bind::{bind, Binding};
pub use morphism::ArnMorphism;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArnError {
    #[error("unknown point `{0}`")]
    UnknownPoint(String),
    #[error("unknown hyperedge `{0}`")]
    UnknownEdge(String),
    #[error("network is not ground; requires-points: {}", .0.join(", "))]
    NotGround(Vec<String>),
    #[error("invalid network:\n{}", render_violations(.0))]
    Invalid(Vec<Violation>),
    #[error("morphisms are not composable")]
    NotComposable,
    #[error("invalid hint: {0}")]
    InvalidHint(String),
    #[error("`{0}` is not a requires-point")]
    NotRequiresPoint(String),
    #[error("`{0}` is not a provides-point")]
    NotProvidesPoint(String),
    #[error("specification at `{point}` uses `{atom}`, which is not an action of its port")]
    SpecOutsidePort { point: String, atom: String },
    #[error(transparent)]
    Muller(#[from] MullerError),
    #[error(transparent)]
    Ltl(#[from] LtlError),
    #[error(transparent)]
    Sig(#[from] SigError),
}

/// One violated well-formedness condition.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Violation {
    pub location: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}

fn render_violations(vs: &[Violation]) -> String {
    vs.iter().map(|v| format!("  {v}")).collect::<Vec<_>>().join("\n")
}

/// Published messages `M⁻` and delivered messages `M⁺`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Port {
    pub published: BTreeSet<String>,
    pub delivered: BTreeSet<String>,
}

impl Port {
    pub fn new<'a>(published: impl IntoIterator<Item = &'a str>, delivered: impl IntoIterator<Item = &'a str>) -> Port {
        Port {
            published: published.into_iter().map(str::to_string).collect(),
            delivered: delivered.into_iter().map(str::to_string).collect(),
        }
    }

    pub fn polarity(&self, m: &str) -> Option<Polarity> {
        if self.published.contains(m) {
            Some(Polarity::Publish)
        } else if self.delivered.contains(m) {
            Some(Polarity::Deliver)
        } else {
            None
        }
    }

    pub fn messages(&self) -> impl Iterator<Item = &String> {
        self.published.iter().chain(&self.delivered)
    }

    /// `m!` for published and `m?` for delivered messages.
    pub fn actions(&self) -> ActionSignature {
        self.published
            .iter()
            .map(|m| Action::publish(m.as_str()))
            .chain(self.delivered.iter().map(|m| Action::deliver(m.as_str())))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProcessEdge {
    pub points: BTreeSet<String>,
    /// Over the point-qualified actions of the incident ports.
    pub automaton: MullerAutomaton,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Connection {
    pub messages: BTreeSet<String>,
    /// For each attached point, channel message to port message.
    pub attachments: BTreeMap<String, BTreeMap<String, String>>,
    /// Over `m!` and `m?` for every channel message `m`.
    pub automaton: MullerAutomaton,
}

impl Connection {
    pub fn channel_actions(messages: &BTreeSet<String>) -> ActionSignature {
        messages
            .iter()
            .flat_map(|m| [Action::publish(m.as_str()), Action::deliver(m.as_str())])
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arn {
    pub name: String,
    pub points: BTreeMap<String, Port>,
    pub processes: BTreeMap<String, ProcessEdge>,
    pub connections: BTreeMap<String, Connection>,
}

/// A specification `⟨x, ρ⟩`: formula `ρ` over the actions of point `x`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ArnSpec {
    pub point: String,
    pub formula: Ltl,
}

impl ArnSpec {
    pub fn new(point: impl Into<String>, formula: Ltl) -> Self {
        ArnSpec { point: point.into(), formula }
    }
}

impl fmt::Display for ArnSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "⟨{}, {}⟩", self.point, self.formula)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PointClasses {
    /// Incident only with a communication hyperedge.
    pub requires: BTreeSet<String>,
    /// Incident only with a computation hyperedge.
    pub provides: BTreeSet<String>,
    pub internal: BTreeSet<String>,
}

/// Qualifies every action of a port signature with its point.
pub fn qualify(point: &str, sig: &ActionSignature) -> ActionSignature {
    sig.iter().map(|a| a.qualified(point)).collect()
}

fn span_id(connection: &str, point: &str) -> String {
    format!("{connection}@{point}")
}

impl Arn {
    pub fn new(name: impl Into<String>) -> Self {
        Arn { name: name.into(), points: BTreeMap::new(), processes: BTreeMap::new(), connections: BTreeMap::new() }
    }

    /// Every violated well-formedness condition, sorted by location.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut report = |location: &str, message: String| {
            out.push(Violation { location: location.to_string(), message });
        };

        for (x, port) in &self.points {
            if !is_identifier(x) {
                report(x, "point name is not an identifier".into());
            }
            for m in port.messages() {
                if !is_identifier(m) {
                    report(x, format!("message `{m}` is not an identifier"));
                }
            }
            for m in port.published.intersection(&port.delivered) {
                report(x, format!("message `{m}` is both published and delivered"));
            }
            if self.processes.contains_key(x) || self.connections.contains_key(x) {
                report(x, "name is used by a point and a hyperedge".into());
            }
        }
        for name in self.processes.keys().filter(|p| self.connections.contains_key(*p)) {
            report(name, "name is used by a process and a connection".into());
        }

        let mut process_at: BTreeMap<&str, &str> = BTreeMap::new();
        for (p, proc_) in &self.processes {
            if proc_.points.is_empty() {
                report(p, "process is incident with no point".into());
            }
            let mut expected = Vec::new();
            for x in &proc_.points {
                match self.points.get(x) {
                    None => report(p, format!("unknown point `{x}`")),
                    Some(port) => expected.extend(qualify(x, &port.actions()).iter().cloned()),
                }
                if let Some(other) = process_at.insert(x, p) {
                    report(x, format!("incident with two processes, `{other}` and `{p}`"));
                }
            }
            let expected = ActionSignature::new(expected);
            if proc_.automaton.signature() != &expected {
                report(p, format!("automaton signature {} differs from the ports' {}", proc_.automaton.signature(), expected));
            }
        }

        let mut connection_at: BTreeMap<&str, &str> = BTreeMap::new();
        for (c, conn) in &self.connections {
            if conn.attachments.is_empty() {
                report(c, "connection is incident with no point".into());
            }
            for m in &conn.messages {
                if !is_identifier(m) {
                    report(c, format!("message `{m}` is not an identifier"));
                }
            }
            let expected = Connection::channel_actions(&conn.messages);
            if conn.automaton.signature() != &expected {
                report(c, format!("automaton signature {} differs from the channel's {}", conn.automaton.signature(), expected));
            }
            for (x, mu) in &conn.attachments {
                if let Some(other) = connection_at.insert(x, c) {
                    report(x, format!("incident with two connections, `{other}` and `{c}`"));
                }
                let Some(port) = self.points.get(x) else {
                    report(c, format!("unknown point `{x}`"));
                    continue;
                };
                let mut images = BTreeSet::new();
                for (m, target) in mu {
                    if !conn.messages.contains(m) {
                        report(c, format!("attachment at `{x}` maps `{m}`, which is not a channel message"));
                    }
                    if port.polarity(target).is_none() {
                        report(c, format!("attachment at `{x}` maps `{m}` to `{target}`, which is not in the port"));
                    }
                    if !images.insert(target) {
                        report(c, format!("attachment at `{x}` is not injective on `{target}`"));
                    }
                }
                if conn.attachments.len() == 2 && mu.len() != conn.messages.len() {
                    report(c, format!("binary connection has a partial attachment at `{x}`"));
                }
            }
            for m in &conn.messages {
                let sides: Vec<(&String, Option<Polarity>)> = conn
                    .attachments
                    .iter()
                    .filter_map(|(x, mu)| mu.get(m).map(|t| (x, self.points.get(x).and_then(|p| p.polarity(t)))))
                    .collect();
                if sides.is_empty() {
                    report(c, format!("message `{m}` is attached to no point"));
                }
                for (x, pol) in &sides {
                    let Some(pol) = pol else { continue };
                    let opposite = match pol {
                        Polarity::Publish => Polarity::Deliver,
                        Polarity::Deliver => Polarity::Publish,
                    };
                    if !sides.iter().any(|(y, q)| y != x && *q == Some(opposite)) {
                        let role = if *pol == Polarity::Publish { "published" } else { "delivered" };
                        report(c, format!("message `{m}` is {role} at `{x}` with no counterpart at another point"));
                    }
                }
            }
        }

        for x in self.points.keys() {
            if !process_at.contains_key(x.as_str()) && !connection_at.contains_key(x.as_str()) {
                report(x, "point is incident with no hyperedge".into());
            }
        }
        out.sort();
        out.dedup();
        out
    }

    pub fn check(&self) -> Result<(), ArnError> {
        let v = self.validate();
        if v.is_empty() {
            Ok(())
        } else {
            Err(ArnError::Invalid(v))
        }
    }

    pub fn port(&self, x: &str) -> Result<&Port, ArnError> {
        self.points.get(x).ok_or_else(|| ArnError::UnknownPoint(x.to_string()))
    }

    /// Names of the hyperedges incident with `x`, processes first.
    pub fn edges_at(&self, x: &str) -> Vec<&str> {
        let procs = self.processes.iter().filter(|(_, p)| p.points.contains(x)).map(|(n, _)| n.as_str());
        let conns = self.connections.iter().filter(|(_, c)| c.attachments.contains_key(x)).map(|(n, _)| n.as_str());
        procs.chain(conns).collect()
    }

    /// Points incident with the hyperedge `e`.
    pub fn incidence(&self, e: &str) -> Option<BTreeSet<&str>> {
        if let Some(p) = self.processes.get(e) {
            return Some(p.points.iter().map(String::as_str).collect());
        }
        self.connections.get(e).map(|c| c.attachments.keys().map(String::as_str).collect())
    }

    pub fn edge_names(&self) -> BTreeSet<&str> {
        self.processes.keys().chain(self.connections.keys()).map(String::as_str).collect()
    }

    /// Points incident with no hyperedge are classified as internal.
    pub fn classify_points(&self) -> PointClasses {
        let mut classes = PointClasses::default();
        for x in self.points.keys() {
            let computation = self.processes.values().any(|p| p.points.contains(x));
            let communication = self.connections.values().any(|c| c.attachments.contains_key(x));
            match (computation, communication) {
                (false, true) => classes.requires.insert(x.clone()),
                (true, false) => classes.provides.insert(x.clone()),
                _ => classes.internal.insert(x.clone()),
            };
        }
        classes
    }

    pub fn is_ground(&self) -> bool {
        self.classify_points().requires.is_empty()
    }

    /// The full sub-network on `x` and the points reachable from `x` by a
    /// path that starts with a computation hyperedge.
    pub fn subnet_at(&self, x: &str) -> Result<Arn, ArnError> {
        self.port(x)?;
        let mut closure: BTreeSet<&str> = BTreeSet::from([x]);
        let mut queue: VecDeque<&str> = VecDeque::new();
        for p in self.processes.values().filter(|p| p.points.contains(x)) {
            for y in &p.points {
                if closure.insert(y) {
                    queue.push_back(y);
                }
            }
        }
        while let Some(y) = queue.pop_front() {
            for e in self.edges_at(y) {
                for z in self.incidence(e).expect("listed edge") {
                    if closure.insert(z) {
                        queue.push_back(z);
                    }
                }
            }
        }
        let inside = |y: &String| closure.contains(y.as_str());
        Ok(Arn {
            name: format!("{}@{}", self.name, x),
            points: self.points.iter().filter(|(y, _)| closure.contains(y.as_str())).map(|(y, p)| (y.clone(), p.clone())).collect(),
            processes: self
                .processes
                .iter()
                .filter(|(_, p)| p.points.iter().all(inside))
                .map(|(n, p)| (n.clone(), p.clone()))
                .collect(),
            connections: self
                .connections
                .iter()
                .filter(|(_, c)| c.attachments.keys().all(inside))
                .map(|(n, c)| (n.clone(), c.clone()))
                .collect(),
        })
    }

    /// The diagram of the network's signatures: one node per point, process and
    /// connection, and one per attachment span `c@x`.
    pub fn diagram(&self) -> Result<Diagram, ArnError> {
        let mut d = Diagram::new();
        for (x, port) in &self.points {
            d.add_node(x.clone(), port.actions());
        }
        for (p, proc_) in &self.processes {
            d.add_node(p.clone(), proc_.automaton.signature().clone());
            for x in &proc_.points {
                let port = self.port(x)?.actions();
                let map = port.iter().map(|a| (a.clone(), a.qualified(x))).collect();
                d.add_arrow(x.clone(), p.clone(), SignatureMorphism::new(port, proc_.automaton.signature().clone(), map)?);
            }
        }
        for (c, conn) in &self.connections {
            let channel = Connection::channel_actions(&conn.messages);
            d.add_node(c.clone(), channel.clone());
            for (x, mu) in &conn.attachments {
                let port = self.port(x)?;
                let mut into_channel = BTreeMap::new();
                let mut into_port = BTreeMap::new();
                for (m, target) in mu {
                    let pol = port.polarity(target).ok_or_else(|| ArnError::UnknownPoint(format!("{x}.{target}")))?;
                    into_channel.insert(Action::message(m.as_str(), pol), Action::message(m.as_str(), pol));
                    into_port.insert(Action::message(m.as_str(), pol), Action::message(target.as_str(), pol));
                }
                let span: ActionSignature = into_channel.keys().cloned().collect();
                let id = span_id(c, x);
                d.add_node(id.clone(), span.clone());
                d.add_arrow(id.clone(), c.clone(), SignatureMorphism::new(span.clone(), channel.clone(), into_channel)?);
                d.add_arrow(id, x.clone(), SignatureMorphism::new(span, port.actions(), into_port)?);
            }
        }
        Ok(d)
    }

    /// The colimit `ξ` of the network's diagram.
    pub fn signature_of(&self) -> Result<Cocone, ArnError> {
        Ok(colimit(&self.diagram()?)?)
    }

    fn observed_tabled(&self, x: &str, reachable_only: bool) -> Result<(Tabled, SignatureMorphism), ArnError> {
        if !self.is_ground() {
            return Err(ArnError::NotGround(self.classify_points().requires.into_iter().collect()));
        }
        let sub = self.subnet_at(x)?;
        let xi = sub.signature_of()?;
        let mut parts = Vec::new();
        for e in sub.edge_names() {
            let automaton = match sub.processes.get(e) {
                Some(p) => &p.automaton,
                None => &sub.connections[e].automaton,
            };
            parts.push(Tabled::from_automaton(automaton)?.expand(xi.leg(e).expect("edge node"))?);
        }
        let leg = xi.leg(x).expect("point node").clone();
        let product = if parts.is_empty() {
            Tabled::trivial(xi.apex.clone())
        } else {
            let refs: Vec<&Tabled> = parts.iter().collect();
            Tabled::product(&refs, reachable_only).0
        };
        Ok((product.reduct(&leg), leg))
    }

    /// The automaton observed at `x`: the reduct along `ξ_x` of the product of
    /// the cofree expansions of all hyperedge automata of the sub-network at `x`.
    pub fn observed_automaton(&self, x: &str) -> Result<MullerAutomaton, ArnError> {
        Ok(self.observed_tabled(x, false)?.0.into_automaton()?)
    }

    pub fn check_spec(&self, spec: &ArnSpec) -> Result<(), ArnError> {
        let actions = self.port(&spec.point)?.actions();
        match spec.formula.atoms().into_iter().find(|a| !actions.contains(a)) {
            Some(a) => Err(ArnError::SpecOutsidePort { point: spec.point.clone(), atom: a.to_string() }),
            None => Ok(()),
        }
    }

    /// A trace observed at the spec's point that violates its formula.
    pub fn property_counterexample(&self, spec: &ArnSpec) -> Result<Option<Lasso>, ArnError> {
        self.check_spec(spec)?;
        let (observed, _) = self.observed_tabled(&spec.point, true)?;
        let negated = ltl::to_automaton(&Ltl::not(spec.formula.clone()), &observed.sig)?;
        let negated = Tabled::from_automaton(&negated)?;
        let (product, _) = Tabled::product(&[&observed, &negated], true);
        Ok(product.accepted_masks().map(|m| product.to_lasso(m)))
    }

    /// Whether the spec is a property of this ground network.
    pub fn is_property(&self, spec: &ArnSpec) -> Result<bool, ArnError> {
        Ok(self.property_counterexample(spec)?.is_none())
    }
}
