//! Muller automata with symbolic guards.
//!
//! Transitions carry propositional guards over the automaton's signature; a
//! transition with guard `g` stands for every letter satisfying `g`. A run is
//! accepted when the set of states it visits infinitely often belongs to the
//! final family.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::sigcat::{Action, ActionSignature, Letter, SigError, SignatureMorphism};

pub mod family;
pub mod guard;
pub(crate) mod search;
pub(crate) mod table;

pub use family::{FinalFamily, Predicate, Projected};
pub use guard::Guard;
pub use table::MAX_TABLE_ATOMS;

use search::{find_accepting, Graph};
use table::Table;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MullerError {
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("duplicate state `{0}`")]
    DuplicateState(String),
    #[error("state index {0} out of range")]
    StateOutOfRange(usize),
    #[error("action `{0}` is outside the signature")]
    ActionOutsideSignature(String),
    #[error("signature of {0} actions is larger than supported")]
    SignatureTooLarge(usize),
    #[error("automata are over different signatures")]
    SignatureMismatch,
    #[error("a lasso needs a non-empty cycle")]
    EmptyCycle,
    #[error("{0}")]
    Syntax(String),
    #[error("enumerating final sets over {0} states is too large")]
    TooManyStates(usize),
    #[error(transparent)]
    Sig(#[from] SigError),
}

/// Signatures beyond this size cannot encode letters as bit masks.
pub const MAX_SIGNATURE: usize = 64;
const MAX_FAMILY_ENUMERATION: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transition {
    pub source: usize,
    pub guard: Guard,
    pub target: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MullerAutomaton {
    signature: ActionSignature,
    states: Vec<String>,
    initial: BTreeSet<usize>,
    transitions: Vec<Transition>,
    family: FinalFamily,
}

/// An ultimately periodic word `prefix · cycle^ω`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Lasso {
    pub prefix: Vec<Letter>,
    pub cycle: Vec<Letter>,
}

impl Lasso {
    pub fn new(prefix: Vec<Letter>, cycle: Vec<Letter>) -> Result<Self, MullerError> {
        if cycle.is_empty() {
            return Err(MullerError::EmptyCycle);
        }
        Ok(Lasso { prefix, cycle })
    }

    /// Number of distinct positions, `|prefix| + |cycle|`.
    pub fn positions(&self) -> usize {
        self.prefix.len() + self.cycle.len()
    }

    /// Successor position, folding the end of the cycle back to its start.
    pub fn next(&self, i: usize) -> usize {
        if i + 1 < self.positions() {
            i + 1
        } else {
            self.prefix.len()
        }
    }

    /// The letter at any position of the infinite word.
    pub fn at(&self, i: usize) -> &Letter {
        if i < self.prefix.len() {
            &self.prefix[i]
        } else {
            &self.cycle[(i - self.prefix.len()) % self.cycle.len()]
        }
    }
}

fn fmt_letter(l: &Letter, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    f.write_str("{")?;
    for (i, a) in l.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{a}")?;
    }
    f.write_str("}")
}

impl fmt::Display for Lasso {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.prefix {
            fmt_letter(l, f)?;
            f.write_str(" ")?;
        }
        f.write_str("(")?;
        for (i, l) in self.cycle.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            fmt_letter(l, f)?;
        }
        f.write_str(")^ω")
    }
}

impl FromStr for Lasso {
    type Err = MullerError;

    /// Parses `{a!, b} {} ({c?})^w`; `^ω` is accepted as well.
    fn from_str(s: &str) -> Result<Lasso, MullerError> {
        let bad = |m: &str| MullerError::Syntax(format!("lasso: {m}"));
        let s = s.trim();
        let body = s
            .strip_suffix("^w")
            .or_else(|| s.strip_suffix("^ω"))
            .ok_or_else(|| bad("expected a trailing `(...)^w`"))?
            .trim_end();
        let body = body.strip_suffix(')').ok_or_else(|| bad("expected `)` before `^w`"))?;
        let open = body.rfind('(').ok_or_else(|| bad("missing `(`"))?;
        let letters = |text: &str| -> Result<Vec<Letter>, MullerError> {
            let mut out = Vec::new();
            let mut rest = text.trim();
            while !rest.is_empty() {
                let inner = rest.strip_prefix('{').ok_or_else(|| bad("expected `{`"))?;
                let close = inner.find('}').ok_or_else(|| bad("missing `}`"))?;
                let letter = inner[..close]
                    .split(',')
                    .map(str::trim)
                    .filter(|t| !t.is_empty())
                    .map(|t| t.parse::<Action>())
                    .collect::<Result<Letter, _>>()?;
                out.push(letter);
                rest = inner[close + 1..].trim_start();
            }
            Ok(out)
        };
        Lasso::new(letters(&body[..open])?, letters(&body[open + 1..])?)
    }
}

impl MullerAutomaton {
    pub fn new(
        signature: ActionSignature,
        states: Vec<String>,
        initial: BTreeSet<usize>,
        transitions: Vec<Transition>,
        family: FinalFamily,
    ) -> Result<Self, MullerError> {
        if signature.len() > MAX_SIGNATURE {
            return Err(MullerError::SignatureTooLarge(signature.len()));
        }
        let mut seen = BTreeSet::new();
        for s in &states {
            if !seen.insert(s) {
                return Err(MullerError::DuplicateState(s.clone()));
            }
        }
        let n = states.len();
        if let Some(&q) = initial.iter().find(|&&q| q >= n) {
            return Err(MullerError::StateOutOfRange(q));
        }
        for t in &transitions {
            if t.source >= n || t.target >= n {
                return Err(MullerError::StateOutOfRange(t.source.max(t.target)));
            }
            if let Some(a) = t.guard.atoms().into_iter().find(|a| !signature.contains(a)) {
                return Err(MullerError::ActionOutsideSignature(a.to_string()));
            }
        }
        family.check_range(n).map_err(MullerError::StateOutOfRange)?;
        Ok(MullerAutomaton { signature, states, initial, transitions, family })
    }

    /// Builds an automaton from state names and guard strings.
    pub fn from_names(
        signature: ActionSignature,
        states: &[&str],
        initial: &[&str],
        transitions: &[(&str, &str, &str)],
        family: FinalFamily,
    ) -> Result<Self, MullerError> {
        let names: Vec<String> = states.iter().map(|s| s.to_string()).collect();
        let idx = |s: &str| names.iter().position(|n| n == s).ok_or_else(|| MullerError::UnknownState(s.into()));
        let initial = initial.iter().map(|s| idx(s)).collect::<Result<_, _>>()?;
        let transitions = transitions
            .iter()
            .map(|(p, g, q)| Ok(Transition { source: idx(p)?, guard: g.parse()?, target: idx(q)? }))
            .collect::<Result<_, MullerError>>()?;
        MullerAutomaton::new(signature, names, initial, transitions, family)
    }

    pub fn signature(&self) -> &ActionSignature {
        &self.signature
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    pub fn initial(&self) -> &BTreeSet<usize> {
        &self.initial
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn family(&self) -> &FinalFamily {
        &self.family
    }

    /// Renames every action along a bijection onto `signature`, keeping states.
    pub fn rename_actions(&self, signature: ActionSignature, f: &dyn Fn(&Action) -> Action) -> Result<Self, MullerError> {
        let transitions = self
            .transitions
            .iter()
            .map(|t| Transition { source: t.source, guard: t.guard.rename(f), target: t.target })
            .collect();
        MullerAutomaton::new(signature, self.states.clone(), self.initial.clone(), transitions, self.family.clone())
    }

    /// Whether the automaton accepts the lasso word.
    pub fn accepts(&self, lasso: &Lasso) -> Result<bool, MullerError> {
        for l in lasso.prefix.iter().chain(&lasso.cycle) {
            if let Some(a) = l.iter().find(|a| !self.signature.contains(a)) {
                return Err(MullerError::ActionOutsideSignature(a.to_string()));
            }
        }
        let width = lasso.positions();
        let nodes = self.states.len() * width;
        let mut succ: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); nodes];
        for t in &self.transitions {
            for i in 0..width {
                if t.guard.eval(lasso.at(i)) {
                    succ[t.source * width + i].insert(t.target * width + lasso.next(i));
                }
            }
        }
        let graph = Graph {
            succ: succ.into_iter().map(|s| s.into_iter().collect()).collect(),
            init: self.initial.iter().map(|&q| q * width).collect(),
        };
        let dnf = self.family.acceptance(nodes, &|v| v / width).dnf(nodes);
        Ok(find_accepting(&graph, &dnf).is_some())
    }

    /// An accepted lasso, if the language is non-empty.
    pub fn accepted_lasso(&self) -> Option<Lasso> {
        let n = self.states.len();
        let mut edge_letter: BTreeMap<(usize, usize), Letter> = BTreeMap::new();
        for t in &self.transitions {
            if edge_letter.contains_key(&(t.source, t.target)) {
                continue;
            }
            if let Some(l) = t.guard.witness() {
                edge_letter.insert((t.source, t.target), l);
            }
        }
        let mut succ = vec![Vec::new(); n];
        for &(p, q) in edge_letter.keys() {
            succ[p].push(q);
        }
        let graph = Graph { succ, init: self.initial.iter().copied().collect() };
        let dnf = self.family.acceptance(n, &|v| v).dnf(n);
        let w = find_accepting(&graph, &dnf)?;
        let letters = |nodes: &[usize], close: bool| -> Vec<Letter> {
            let mut out: Vec<Letter> = nodes.windows(2).map(|e| edge_letter[&(e[0], e[1])].clone()).collect();
            if close {
                out.push(edge_letter[&(*nodes.last().unwrap(), nodes[0])].clone());
            }
            out
        };
        Some(Lasso { prefix: letters(&w.stem, false), cycle: letters(&w.cycle, true) })
    }

    pub fn is_empty(&self) -> bool {
        self.accepted_lasso().is_none()
    }

    /// `Λ′|σ` for `σ: A → A′`, with `self` over `A′`: each guard is rewritten
    /// through `x ↔ σ(x)` and atoms outside the image of `σ` are eliminated
    /// existentially.
    pub fn reduct(&self, sigma: &SignatureMorphism) -> Result<Self, MullerError> {
        if sigma.target() != &self.signature {
            return Err(MullerError::SignatureMismatch);
        }
        let mut fibres: BTreeMap<&Action, Vec<&Action>> = BTreeMap::new();
        for (x, a) in sigma.pairs() {
            fibres.entry(a).or_default().push(x);
        }
        let rewrite = |g: &Guard| -> Guard {
            let mut g = g.clone();
            let mut constraints = Vec::new();
            for a in self.signature.iter() {
                match fibres.get(a) {
                    None => g = g.exists(a),
                    Some(xs) => {
                        let rep = Guard::Atom(xs[0].clone());
                        g = g.substitute(a, &rep);
                        for x in &xs[1..] {
                            let other = Guard::Atom((*x).clone());
                            constraints.push(Guard::or([
                                Guard::and([rep.clone(), other.clone()]),
                                Guard::and([Guard::not(rep.clone()), Guard::not(other)]),
                            ]));
                        }
                    }
                }
            }
            constraints.push(g);
            Guard::and(constraints)
        };
        let transitions = self
            .transitions
            .iter()
            .map(|t| Transition { source: t.source, guard: rewrite(&t.guard), target: t.target })
            .filter(|t| t.guard != Guard::False)
            .collect();
        MullerAutomaton::new(
            sigma.source().clone(),
            self.states.clone(),
            self.initial.clone(),
            transitions,
            self.family.clone(),
        )
    }

    /// `Λ^σ` for `σ: A → A′`, with `self` over `A`: every atom `x` becomes `σ(x)`.
    pub fn cofree_expansion(&self, sigma: &SignatureMorphism) -> Result<Self, MullerError> {
        if sigma.source() != &self.signature {
            return Err(MullerError::SignatureMismatch);
        }
        self.rename_actions(sigma.target().clone(), &|a| sigma.apply(a).expect("total").clone())
    }

    /// The synchronous product of automata over a common signature.
    pub fn product(parts: &[&MullerAutomaton]) -> Result<Self, MullerError> {
        let sig = match parts.first() {
            Some(a) => a.signature.clone(),
            None => return Err(MullerError::Syntax("product of no automata".into())),
        };
        if parts.iter().any(|a| a.signature != sig) {
            return Err(MullerError::SignatureMismatch);
        }
        let tabled = parts.iter().map(|a| Tabled::from_automaton(a)).collect::<Result<Vec<_>, _>>()?;
        let refs: Vec<&Tabled> = tabled.iter().collect();
        let (prod, sources) = Tabled::product(&refs, false);
        let transitions = prod
            .edges
            .iter()
            .zip(&sources)
            .map(|(e, src)| Transition {
                source: e.source,
                guard: Guard::and(src.iter().enumerate().map(|(k, &t)| parts[k].transitions[t].guard.clone())),
                target: e.target,
            })
            .collect();
        MullerAutomaton::new(sig, prod.states, prod.initial.into_iter().collect(), transitions, prod.family)
    }

    /// Whether `h: Q₁ → Q₂` is a homomorphism `a → b`: initial states map to
    /// initial states, each transition of `a` is covered by transitions of `b`
    /// between the image states, and final sets map to final sets.
    pub fn check_homomorphism(a: &MullerAutomaton, b: &MullerAutomaton, h: &[usize]) -> Result<bool, MullerError> {
        if a.signature != b.signature {
            return Err(MullerError::SignatureMismatch);
        }
        if h.len() != a.states.len() {
            return Err(MullerError::StateOutOfRange(h.len()));
        }
        if let Some(&q) = h.iter().find(|&&q| q >= b.states.len()) {
            return Err(MullerError::StateOutOfRange(q));
        }
        if a.states.len() > MAX_FAMILY_ENUMERATION {
            return Err(MullerError::TooManyStates(a.states.len()));
        }
        if !a.initial.iter().all(|q| b.initial.contains(&h[*q])) {
            return Ok(false);
        }
        for t in &a.transitions {
            let cover = Guard::or(
                b.transitions
                    .iter()
                    .filter(|u| u.source == h[t.source] && u.target == h[t.target])
                    .map(|u| u.guard.clone()),
            );
            if Guard::and([t.guard.clone(), Guard::not(cover)]).witness().is_some() {
                return Ok(false);
            }
        }
        let n = a.states.len();
        for mask in 1u64..1 << n {
            let set: BTreeSet<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
            if a.family.contains(&set) && !b.family.contains(&set.iter().map(|&q| h[q]).collect()) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Searches for a state bijection that is a homomorphism in both directions.
    pub fn is_isomorphic(a: &MullerAutomaton, b: &MullerAutomaton) -> Result<bool, MullerError> {
        if a.signature != b.signature {
            return Ok(false);
        }
        let n = a.states.len();
        if n != b.states.len() || a.initial.len() != b.initial.len() {
            return Ok(false);
        }
        if n > MAX_FAMILY_ENUMERATION {
            return Err(MullerError::TooManyStates(n));
        }
        let ta = Tabled::from_automaton(a)?.edge_tables();
        let tb = Tabled::from_automaton(b)?.edge_tables();
        let mut h = vec![usize::MAX; n];
        let mut used = vec![false; n];
        Ok(iso_search(a, b, &ta, &tb, 0, &mut h, &mut used))
    }

    /// Letter-level view: for each pair of states, the letters moving between them.
    pub fn edge_letters(&self) -> Result<BTreeMap<(usize, usize), Vec<Letter>>, MullerError> {
        let tables = Tabled::from_automaton(self)?.edge_tables();
        Ok(tables
            .into_iter()
            .map(|(k, t)| (k, t.letters().map(|l| self.signature.decode(l)).collect()))
            .collect())
    }
}

fn iso_search(
    a: &MullerAutomaton,
    b: &MullerAutomaton,
    ta: &BTreeMap<(usize, usize), Table>,
    tb: &BTreeMap<(usize, usize), Table>,
    next: usize,
    h: &mut Vec<usize>,
    used: &mut Vec<bool>,
) -> bool {
    let n = h.len();
    if next == n {
        return (1u64..1 << n).all(|mask| {
            let set: BTreeSet<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
            let image: BTreeSet<usize> = set.iter().map(|&q| h[q]).collect();
            a.family.contains(&set) == b.family.contains(&image)
        });
    }
    let empty = Table::empty(a.signature.len());
    let get = |m: &BTreeMap<(usize, usize), Table>, p, q| m.get(&(p, q)).unwrap_or(&empty).clone();
    for cand in 0..n {
        if used[cand] || a.initial.contains(&next) != b.initial.contains(&cand) {
            continue;
        }
        h[next] = cand;
        let consistent = (0..=next).all(|p| {
            get(ta, next, p) == get(tb, cand, h[p]) && get(ta, p, next) == get(tb, h[p], cand)
        });
        if consistent {
            used[cand] = true;
            if iso_search(a, b, ta, tb, next + 1, h, used) {
                return true;
            }
            used[cand] = false;
        }
        h[next] = usize::MAX;
    }
    false
}

/// An automaton whose guards are truth tables; used where guards over
/// signatures of up to [`MAX_TABLE_ATOMS`] atoms are combined at scale.
#[derive(Debug, Clone)]
pub(crate) struct Tabled {
    pub sig: ActionSignature,
    pub states: Vec<String>,
    pub initial: Vec<usize>,
    pub edges: Vec<Edge>,
    pub family: FinalFamily,
}

#[derive(Debug, Clone)]
pub(crate) struct Edge {
    pub source: usize,
    pub table: Table,
    pub target: usize,
}

impl Tabled {
    /// One edge per transition, in the same order.
    pub fn from_automaton(a: &MullerAutomaton) -> Result<Self, MullerError> {
        let edges = a
            .transitions
            .iter()
            .map(|t| Ok(Edge { source: t.source, table: t.guard.table(&a.signature)?, target: t.target }))
            .collect::<Result<_, MullerError>>()?;
        Ok(Tabled {
            sig: a.signature.clone(),
            states: a.states.clone(),
            initial: a.initial.iter().copied().collect(),
            edges,
            family: a.family.clone(),
        })
    }

    /// The one-state automaton accepting every word over `sig`.
    pub fn trivial(sig: ActionSignature) -> Self {
        let edges = vec![Edge { source: 0, table: Table::full(sig.len()), target: 0 }];
        Tabled { sig, states: vec!["()".into()], initial: vec![0], edges, family: FinalFamily::all_nonempty() }
    }

    /// Merges edges between the same states and rebuilds formula guards.
    pub fn into_automaton(self) -> Result<MullerAutomaton, MullerError> {
        let transitions = self
            .edge_tables()
            .into_iter()
            .map(|((p, q), t)| Transition { source: p, guard: Guard::from_table(&t, &self.sig), target: q })
            .collect();
        MullerAutomaton::new(self.sig, self.states, self.initial.into_iter().collect(), transitions, self.family)
    }

    pub fn edge_tables(&self) -> BTreeMap<(usize, usize), Table> {
        let mut out: BTreeMap<(usize, usize), Table> = BTreeMap::new();
        for e in &self.edges {
            if e.table.is_empty() {
                continue;
            }
            out.entry((e.source, e.target))
                .and_modify(|t| t.or_assign(&e.table))
                .or_insert_with(|| e.table.clone());
        }
        out
    }

    /// Cofree expansion along `sigma`, with `self` over `sigma.source()`.
    pub fn expand(&self, sigma: &SignatureMorphism) -> Result<Tabled, MullerError> {
        if sigma.target().len() > MAX_TABLE_ATOMS {
            return Err(MullerError::SignatureTooLarge(sigma.target().len()));
        }
        let idx = sigma.index_map();
        let n = sigma.target().len();
        let edges = self
            .edges
            .iter()
            .map(|e| Edge {
                source: e.source,
                table: e.table.preimage(n, |l| sigma.preimage_mask(&idx, l)),
                target: e.target,
            })
            .collect();
        Ok(Tabled { sig: sigma.target().clone(), edges, ..self.clone() })
    }

    /// Reduct along `sigma`, with `self` over `sigma.target()`.
    pub fn reduct(&self, sigma: &SignatureMorphism) -> Tabled {
        let idx = sigma.index_map();
        let n = sigma.source().len();
        let edges = self
            .edges
            .iter()
            .map(|e| Edge {
                source: e.source,
                table: e.table.image(n, |l| sigma.preimage_mask(&idx, l)),
                target: e.target,
            })
            .filter(|e| !e.table.is_empty())
            .collect();
        Tabled { sig: sigma.source().clone(), edges, ..self.clone() }
    }

    /// The synchronous product. With `reachable_only`, only states reachable
    /// from the initial tuples are built; otherwise the full cartesian product
    /// in lexicographic order. Also returns, per edge, the component edges it
    /// was built from.
    pub fn product(parts: &[&Tabled], reachable_only: bool) -> (Tabled, Vec<Vec<usize>>) {
        let k = parts.len();
        let sig = parts[0].sig.clone();
        let atoms = sig.len();
        let outgoing: Vec<Vec<Vec<usize>>> = parts
            .iter()
            .map(|p| {
                let mut out = vec![Vec::new(); p.states.len()];
                for (i, e) in p.edges.iter().enumerate() {
                    if !e.table.is_empty() {
                        out[e.source].push(i);
                    }
                }
                out
            })
            .collect();

        let mut index: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
        let mut tuples: Vec<Vec<usize>> = Vec::new();
        let mut queue: VecDeque<usize> = VecDeque::new();
        fn intern(t: Vec<usize>, index: &mut BTreeMap<Vec<usize>, usize>, tuples: &mut Vec<Vec<usize>>, queue: &mut VecDeque<usize>) -> usize {
            if let Some(&i) = index.get(&t) {
                return i;
            }
            let i = tuples.len();
            index.insert(t.clone(), i);
            tuples.push(t);
            queue.push_back(i);
            i
        }

        let mut initial_tuples = vec![Vec::new()];
        for p in parts {
            initial_tuples = initial_tuples
                .into_iter()
                .flat_map(|t| p.initial.iter().map(move |&q| [t.clone(), vec![q]].concat()))
                .collect();
        }
        if reachable_only {
            for t in initial_tuples.iter().cloned() {
                intern(t, &mut index, &mut tuples, &mut queue);
            }
        } else {
            let mut all = vec![Vec::new()];
            for p in parts {
                all = all
                    .into_iter()
                    .flat_map(|t| (0..p.states.len()).map(move |q| [t.clone(), vec![q]].concat()))
                    .collect();
            }
            for t in all {
                intern(t, &mut index, &mut tuples, &mut queue);
            }
        }

        let mut edges = Vec::new();
        let mut sources = Vec::new();
        while let Some(s) = queue.pop_front() {
            let tuple = tuples[s].clone();
            // Depth-first over component choices, pruning empty conjunctions.
            let mut stack: Vec<(usize, Table, Vec<usize>)> = vec![(0, Table::full(atoms), Vec::new())];
            while let Some((depth, table, chosen)) = stack.pop() {
                if depth == k {
                    let target: Vec<usize> = chosen.iter().enumerate().map(|(c, &e)| parts[c].edges[e].target).collect();
                    let t = intern(target, &mut index, &mut tuples, &mut queue);
                    edges.push(Edge { source: s, table, target: t });
                    sources.push(chosen);
                    continue;
                }
                for &e in outgoing[depth][tuple[depth]].iter().rev() {
                    let next = table.and(&parts[depth].edges[e].table);
                    if !next.is_empty() {
                        let mut c = chosen.clone();
                        c.push(e);
                        stack.push((depth + 1, next, c));
                    }
                }
            }
        }
        // Edges were produced per source in queue order; sort for a stable layout.
        let mut order: Vec<usize> = (0..edges.len()).collect();
        order.sort_by_key(|&i| (edges[i].source, edges[i].target, sources[i].clone()));
        let edges: Vec<Edge> = order.iter().map(|&i| edges[i].clone()).collect();
        let sources: Vec<Vec<usize>> = order.iter().map(|&i| sources[i].clone()).collect();

        let initial = initial_tuples.iter().map(|t| index[t]).collect::<BTreeSet<_>>().into_iter().collect();
        let states = tuples.iter().map(|t| {
            let names: Vec<&str> = t.iter().enumerate().map(|(c, &q)| parts[c].states[q].as_str()).collect();
            format!("({})", names.join(","))
        });
        let family = FinalFamily::Product(
            (0..k)
                .map(|c| Projected { projection: tuples.iter().map(|t| t[c]).collect(), family: parts[c].family.clone() })
                .collect(),
        );
        (Tabled { sig, states: states.collect(), initial, edges, family }, sources)
    }

    /// An accepted lasso as letter masks, if any.
    pub fn accepted_masks(&self) -> Option<(Vec<u64>, Vec<u64>)> {
        let n = self.states.len();
        let tables = self.edge_tables();
        let mut succ = vec![Vec::new(); n];
        for &(p, q) in tables.keys() {
            succ[p].push(q);
        }
        let graph = Graph { succ, init: self.initial.clone() };
        let dnf = self.family.acceptance(n, &|v| v).dnf(n);
        let w = find_accepting(&graph, &dnf)?;
        let letter = |p: usize, q: usize| tables[&(p, q)].first().expect("non-empty edge");
        let stem = w.stem.windows(2).map(|e| letter(e[0], e[1])).collect();
        let mut cycle: Vec<u64> = w.cycle.windows(2).map(|e| letter(e[0], e[1])).collect();
        cycle.push(letter(*w.cycle.last().unwrap(), w.cycle[0]));
        Some((stem, cycle))
    }

    pub fn to_lasso(&self, masks: (Vec<u64>, Vec<u64>)) -> Lasso {
        Lasso {
            prefix: masks.0.into_iter().map(|m| self.sig.decode(m)).collect(),
            cycle: masks.1.into_iter().map(|m| self.sig.decode(m)).collect(),
        }
    }
}
