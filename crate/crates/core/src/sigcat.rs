//! Action signatures, their morphisms, and finite colimits of signature diagrams.
//!
//! An action is either opaque (`a`) or structured: an optional point qualifier,
//! a message name and a polarity, written `x.m!` (publication) or `x.m?`
//! (delivery). Signatures are finite sorted sets of actions.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SigError {
    #[error("malformed action `{0}`")]
    MalformedAction(String),
    #[error("action `{action}` is not in the {side} signature")]
    NotInSignature { action: String, side: &'static str },
    #[error("morphism is undefined on `{0}`")]
    Undefined(String),
    #[error("unknown diagram node `{0}`")]
    UnknownNode(String),
    #[error("arrow {from} -> {to} does not match the node signatures")]
    ArrowMismatch { from: String, to: String },
    #[error("morphisms are not composable")]
    NotComposable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Polarity {
    /// `m!`: the message is published.
    Publish,
    /// `m?`: the message is delivered.
    Deliver,
}

impl Polarity {
    pub fn symbol(self) -> char {
        match self {
            Polarity::Publish => '!',
            Polarity::Deliver => '?',
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Action {
    pub qualifier: Option<String>,
    pub name: String,
    pub polarity: Option<Polarity>,
}

impl Action {
    pub fn opaque(name: impl Into<String>) -> Self {
        Action { qualifier: None, name: name.into(), polarity: None }
    }

    pub fn publish(name: impl Into<String>) -> Self {
        Action { qualifier: None, name: name.into(), polarity: Some(Polarity::Publish) }
    }

    pub fn deliver(name: impl Into<String>) -> Self {
        Action { qualifier: None, name: name.into(), polarity: Some(Polarity::Deliver) }
    }

    pub fn message(name: impl Into<String>, polarity: Polarity) -> Self {
        Action { qualifier: None, name: name.into(), polarity: Some(polarity) }
    }

    /// Prefixes `point` to the qualifier, giving `point.q.m` for `q.m`.
    pub fn qualified(&self, point: &str) -> Self {
        let qualifier = match &self.qualifier {
            Some(q) => format!("{point}.{q}"),
            None => point.to_string(),
        };
        Action { qualifier: Some(qualifier), ..self.clone() }
    }

    /// Drops the qualifier.
    pub fn unqualified(&self) -> Self {
        Action { qualifier: None, ..self.clone() }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(q) = &self.qualifier {
            write!(f, "{q}.")?;
        }
        f.write_str(&self.name)?;
        if let Some(p) = self.polarity {
            write!(f, "{}", p.symbol())?;
        }
        Ok(())
    }
}

pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

impl FromStr for Action {
    type Err = SigError;

    fn from_str(s: &str) -> Result<Self, SigError> {
        let bad = || SigError::MalformedAction(s.to_string());
        let (body, polarity) = match s.chars().last() {
            Some('!') => (&s[..s.len() - 1], Some(Polarity::Publish)),
            Some('?') => (&s[..s.len() - 1], Some(Polarity::Deliver)),
            _ => (s, None),
        };
        let (qualifier, name) = match body.rfind('.') {
            Some(i) => (Some(&body[..i]), &body[i + 1..]),
            None => (None, body),
        };
        if !is_identifier(name) {
            return Err(bad());
        }
        if let Some(q) = qualifier {
            if !q.split('.').all(is_identifier) {
                return Err(bad());
            }
        }
        Ok(Action { qualifier: qualifier.map(str::to_string), name: name.to_string(), polarity })
    }
}

impl Serialize for Action {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Action {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A letter is the set of actions that happen in one execution step.
pub type Letter = BTreeSet<Action>;

/// A finite set of actions, kept sorted so that positions can serve as atom indices.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct ActionSignature {
    actions: Vec<Action>,
}

impl ActionSignature {
    pub fn new(actions: impl IntoIterator<Item = Action>) -> Self {
        let mut actions: Vec<Action> = actions.into_iter().collect();
        actions.sort();
        actions.dedup();
        ActionSignature { actions }
    }

    pub fn empty() -> Self {
        ActionSignature::default()
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    pub fn contains(&self, a: &Action) -> bool {
        self.index_of(a).is_some()
    }

    pub fn index_of(&self, a: &Action) -> Option<usize> {
        self.actions.binary_search(a).ok()
    }

    pub fn get(&self, i: usize) -> &Action {
        &self.actions[i]
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Action> {
        self.actions.iter()
    }

    pub fn is_subset(&self, other: &ActionSignature) -> bool {
        self.actions.iter().all(|a| other.contains(a))
    }

    pub fn union(&self, other: &ActionSignature) -> ActionSignature {
        ActionSignature::new(self.actions.iter().chain(other.actions.iter()).cloned())
    }

    /// Encodes a letter as a bit mask over atom indices.
    pub fn encode(&self, letter: &Letter) -> Result<u64, SigError> {
        let mut mask = 0u64;
        for a in letter {
            let i = self.index_of(a).ok_or_else(|| SigError::NotInSignature {
                action: a.to_string(),
                side: "automaton",
            })?;
            mask |= 1 << i;
        }
        Ok(mask)
    }

    pub fn decode(&self, mask: u64) -> Letter {
        self.actions
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, a)| a.clone())
            .collect()
    }
}

impl FromIterator<Action> for ActionSignature {
    fn from_iter<I: IntoIterator<Item = Action>>(iter: I) -> Self {
        ActionSignature::new(iter)
    }
}

impl<'a> IntoIterator for &'a ActionSignature {
    type Item = &'a Action;
    type IntoIter = std::slice::Iter<'a, Action>;

    fn into_iter(self) -> Self::IntoIter {
        self.actions.iter()
    }
}

impl fmt::Display for ActionSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, a) in self.actions.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str("}")
    }
}

/// A total map between signatures.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignatureMorphism {
    source: ActionSignature,
    target: ActionSignature,
    map: BTreeMap<Action, Action>,
}

impl SignatureMorphism {
    pub fn new(
        source: ActionSignature,
        target: ActionSignature,
        map: BTreeMap<Action, Action>,
    ) -> Result<Self, SigError> {
        for a in &source {
            let b = map.get(a).ok_or_else(|| SigError::Undefined(a.to_string()))?;
            if !target.contains(b) {
                return Err(SigError::NotInSignature { action: b.to_string(), side: "target" });
            }
        }
        if let Some(extra) = map.keys().find(|a| !source.contains(a)) {
            return Err(SigError::NotInSignature { action: extra.to_string(), side: "source" });
        }
        Ok(SignatureMorphism { source, target, map })
    }

    pub fn identity(sig: &ActionSignature) -> Self {
        let map = sig.iter().map(|a| (a.clone(), a.clone())).collect();
        SignatureMorphism { source: sig.clone(), target: sig.clone(), map }
    }

    /// The inclusion of `source` into a larger `target`.
    pub fn inclusion(source: &ActionSignature, target: &ActionSignature) -> Result<Self, SigError> {
        let map = source.iter().map(|a| (a.clone(), a.clone())).collect();
        SignatureMorphism::new(source.clone(), target.clone(), map)
    }

    pub fn source(&self) -> &ActionSignature {
        &self.source
    }

    pub fn target(&self) -> &ActionSignature {
        &self.target
    }

    pub fn apply(&self, a: &Action) -> Option<&Action> {
        self.map.get(a)
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&Action, &Action)> {
        self.map.iter()
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &SignatureMorphism) -> Result<SignatureMorphism, SigError> {
        if self.target != next.source {
            return Err(SigError::NotComposable);
        }
        let map = self.map.iter().map(|(a, b)| (a.clone(), next.map[b].clone())).collect();
        Ok(SignatureMorphism { source: self.source.clone(), target: next.target.clone(), map })
    }

    /// For each source atom index, the index of its image in the target.
    pub fn index_map(&self) -> Vec<usize> {
        self.source
            .iter()
            .map(|a| self.target.index_of(&self.map[a]).expect("image lies in target"))
            .collect()
    }

    /// `σ⁻¹(α')` as a bit mask over source atoms, given a target letter mask.
    pub fn preimage_mask(&self, index_map: &[usize], target_mask: u64) -> u64 {
        let mut mask = 0;
        for (i, &j) in index_map.iter().enumerate() {
            if target_mask >> j & 1 == 1 {
                mask |= 1 << i;
            }
        }
        mask
    }

    pub fn preimage(&self, letter: &Letter) -> Letter {
        self.map
            .iter()
            .filter(|(_, b)| letter.contains(b))
            .map(|(a, _)| a.clone())
            .collect()
    }

    pub fn is_injective(&self) -> bool {
        let images: BTreeSet<&Action> = self.map.values().collect();
        images.len() == self.map.len()
    }
}

/// A map defined on an explicit subset of the source signature.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialSignatureMorphism {
    source: ActionSignature,
    target: ActionSignature,
    map: BTreeMap<Action, Action>,
}

impl PartialSignatureMorphism {
    pub fn new(
        source: ActionSignature,
        target: ActionSignature,
        map: BTreeMap<Action, Action>,
    ) -> Result<Self, SigError> {
        for (a, b) in &map {
            if !source.contains(a) {
                return Err(SigError::NotInSignature { action: a.to_string(), side: "source" });
            }
            if !target.contains(b) {
                return Err(SigError::NotInSignature { action: b.to_string(), side: "target" });
            }
        }
        Ok(PartialSignatureMorphism { source, target, map })
    }

    pub fn domain(&self) -> ActionSignature {
        self.map.keys().cloned().collect()
    }

    pub fn apply(&self, a: &Action) -> Option<&Action> {
        self.map.get(a)
    }

    /// The restriction to the domain, as a total morphism.
    pub fn restrict(&self) -> SignatureMorphism {
        SignatureMorphism { source: self.domain(), target: self.target.clone(), map: self.map.clone() }
    }

    pub fn source(&self) -> &ActionSignature {
        &self.source
    }

    pub fn target(&self) -> &ActionSignature {
        &self.target
    }
}

#[derive(Debug, Clone)]
pub struct Arrow {
    pub from: String,
    pub to: String,
    pub morphism: SignatureMorphism,
}

/// A finite diagram of signatures indexed by node identifiers.
#[derive(Debug, Clone, Default)]
pub struct Diagram {
    pub nodes: BTreeMap<String, ActionSignature>,
    pub arrows: Vec<Arrow>,
}

impl Diagram {
    pub fn new() -> Self {
        Diagram::default()
    }

    pub fn add_node(&mut self, id: impl Into<String>, sig: ActionSignature) {
        self.nodes.insert(id.into(), sig);
    }

    pub fn add_arrow(&mut self, from: impl Into<String>, to: impl Into<String>, morphism: SignatureMorphism) {
        self.arrows.push(Arrow { from: from.into(), to: to.into(), morphism });
    }

    fn check(&self) -> Result<(), SigError> {
        for arrow in &self.arrows {
            let src = self.nodes.get(&arrow.from).ok_or_else(|| SigError::UnknownNode(arrow.from.clone()))?;
            let dst = self.nodes.get(&arrow.to).ok_or_else(|| SigError::UnknownNode(arrow.to.clone()))?;
            if arrow.morphism.source() != src || arrow.morphism.target() != dst {
                return Err(SigError::ArrowMismatch { from: arrow.from.clone(), to: arrow.to.clone() });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Cocone {
    pub apex: ActionSignature,
    pub legs: BTreeMap<String, SignatureMorphism>,
}

impl Cocone {
    pub fn leg(&self, node: &str) -> Option<&SignatureMorphism> {
        self.legs.get(node)
    }

    /// Whether every arrow's triangle commutes.
    pub fn commutes(&self, d: &Diagram) -> bool {
        d.arrows.iter().all(|arrow| {
            let (Some(from), Some(to)) = (self.legs.get(&arrow.from), self.legs.get(&arrow.to)) else {
                return false;
            };
            arrow.morphism.pairs().all(|(a, b)| from.apply(a) == to.apply(b))
        })
    }
}

/// The colimit of a finite diagram: the disjoint union of the node signatures
/// quotiented by the equivalence generated by the arrows.
///
/// Each apex action is named after the least `(node, action)` pair of its class,
/// qualified by that node.
pub fn colimit(d: &Diagram) -> Result<Cocone, SigError> {
    d.check()?;
    let mut elems: Vec<(&String, &Action)> = Vec::new();
    let mut offsets: BTreeMap<&String, usize> = BTreeMap::new();
    for (id, sig) in &d.nodes {
        offsets.insert(id, elems.len());
        elems.extend(sig.iter().map(|a| (id, a)));
    }
    let index = |node: &String, a: &Action| offsets[node] + d.nodes[node].index_of(a).expect("checked");

    let mut uf = UnionFind::<usize>::new(elems.len());
    for arrow in &d.arrows {
        for (a, b) in arrow.morphism.pairs() {
            uf.union(index(&arrow.from, a), index(&arrow.to, b));
        }
    }

    // Elements are enumerated in (node, action) order, so the first member
    // seen for each class is its least representative.
    let mut rep_of_root: BTreeMap<usize, Action> = BTreeMap::new();
    for (i, (node, a)) in elems.iter().enumerate() {
        rep_of_root.entry(uf.find(i)).or_insert_with(|| a.qualified(node));
    }
    let apex: ActionSignature = rep_of_root.values().cloned().collect();

    let mut legs = BTreeMap::new();
    for (id, sig) in &d.nodes {
        let map = sig.iter().map(|a| (a.clone(), rep_of_root[&uf.find(index(id, a))].clone())).collect();
        legs.insert(id.clone(), SignatureMorphism { source: sig.clone(), target: apex.clone(), map });
    }
    Ok(Cocone { apex, legs })
}
