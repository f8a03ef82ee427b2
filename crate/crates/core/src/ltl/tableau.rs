//! Tableau translation of a formula into a Muller automaton.
//!
//! A state fixes the truth of every atom and every `X`/`U` subformula at the
//! current position; the transition out of it reads a letter agreeing with its
//! atom bits. Until-eventualities are discharged by a generalized Büchi
//! condition.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use super::{Ltl, LtlError};
use crate::muller::{FinalFamily, Guard, MullerAutomaton, Predicate, Transition};
use crate::sigcat::ActionSignature;

/// Bits per state beyond which the translation refuses to enumerate.
const MAX_BITS: usize = 24;

struct Closure<'a> {
    /// Atoms first, then temporal subformulas, children before parents.
    elems: Vec<&'a Ltl>,
    index: BTreeMap<&'a Ltl, usize>,
    atoms: usize,
}

impl<'a> Closure<'a> {
    fn new(f: &'a Ltl) -> Self {
        let mut atoms = Vec::new();
        let mut temporal = Vec::new();
        collect(f, &mut atoms, &mut temporal);
        let mut elems: Vec<&Ltl> = Vec::new();
        let mut index = BTreeMap::new();
        for g in atoms.into_iter().chain(temporal) {
            if !index.contains_key(g) {
                index.insert(g, elems.len());
                elems.push(g);
            }
        }
        let atoms = elems.iter().filter(|g| matches!(g, Ltl::Atom(_))).count();
        Closure { elems, index, atoms }
    }

    fn eval(&self, f: &Ltl, s: u64) -> bool {
        match f {
            Ltl::Atom(_) | Ltl::Next(_) | Ltl::Until(..) => s >> self.index[f] & 1 == 1,
            Ltl::Not(g) => !self.eval(g, s),
            Ltl::Or(gs) => gs.iter().any(|g| self.eval(g, s)),
            Ltl::And(gs) => gs.iter().all(|g| self.eval(g, s)),
        }
    }

    /// All locally consistent states, built bit by bit in closure order.
    fn valid_states(&self) -> Vec<u64> {
        let mut states = vec![0u64];
        for (i, g) in self.elems.iter().enumerate() {
            let bit = 1u64 << i;
            let mut next = Vec::with_capacity(states.len() * 2);
            for s in states {
                match g {
                    Ltl::Until(lhs, rhs) => {
                        if self.eval(rhs, s) {
                            next.push(s | bit);
                        } else if self.eval(lhs, s) {
                            next.push(s);
                            next.push(s | bit);
                        } else {
                            next.push(s);
                        }
                    }
                    _ => {
                        next.push(s);
                        next.push(s | bit);
                    }
                }
            }
            states = next;
        }
        states
    }
}

fn collect<'a>(f: &'a Ltl, atoms: &mut Vec<&'a Ltl>, temporal: &mut Vec<&'a Ltl>) {
    match f {
        Ltl::Atom(_) => atoms.push(f),
        Ltl::Not(g) => collect(g, atoms, temporal),
        Ltl::Or(gs) | Ltl::And(gs) => gs.iter().for_each(|g| collect(g, atoms, temporal)),
        Ltl::Next(g) => {
            collect(g, atoms, temporal);
            temporal.push(f);
        }
        Ltl::Until(g, h) => {
            collect(g, atoms, temporal);
            collect(h, atoms, temporal);
            temporal.push(f);
        }
    }
}

pub(super) fn translate(f: &Ltl, sig: &ActionSignature) -> Result<MullerAutomaton, LtlError> {
    if let Some(a) = f.atoms().into_iter().find(|a| !sig.contains(a)) {
        return Err(LtlError::AtomOutsideSignature(a.to_string()));
    }
    let cl = Closure::new(f);
    if cl.elems.len() > MAX_BITS {
        return Err(LtlError::TooLarge(cl.elems.len()));
    }

    let nexts: Vec<(usize, &Ltl)> = cl
        .elems
        .iter()
        .enumerate()
        .filter_map(|(i, g)| match g {
            Ltl::Next(h) => Some((i, &**h)),
            _ => None,
        })
        .collect();
    let untils: Vec<(usize, &Ltl, &Ltl)> = cl
        .elems
        .iter()
        .enumerate()
        .filter_map(|(i, g)| match g {
            Ltl::Until(l, r) => Some((i, &**l, &**r)),
            _ => None,
        })
        .collect();

    // Successors are looked up by (values of X-operands, until bits).
    let key = |s: u64| -> (u64, u64) {
        let next = nexts.iter().enumerate().fold(0, |m, (k, (_, h))| m | (cl.eval(h, s) as u64) << k);
        let until = untils.iter().enumerate().fold(0, |m, (k, (i, _, _))| m | (s >> i & 1) << k);
        (next, until)
    };
    let valid = cl.valid_states();
    let mut groups: BTreeMap<(u64, u64), Vec<u64>> = BTreeMap::new();
    for &s in &valid {
        groups.entry(key(s)).or_default().push(s);
    }

    let mut index: BTreeMap<u64, usize> = BTreeMap::new();
    let mut order: Vec<u64> = Vec::new();
    let mut queue = VecDeque::new();
    let mut initial = BTreeSet::new();
    for &s in valid.iter().filter(|&&s| cl.eval(f, s)) {
        index.insert(s, order.len());
        initial.insert(order.len());
        order.push(s);
        queue.push_back(s);
    }
    let mut edges: Vec<(usize, usize)> = Vec::new();
    while let Some(s) = queue.pop_front() {
        let want_next = nexts.iter().enumerate().fold(0, |m, (k, (i, _))| m | (s >> i & 1) << k);
        let mut carry_mask = 0u64;
        let mut carry_val = 0u64;
        for (k, (i, l, r)) in untils.iter().enumerate() {
            if cl.eval(l, s) && !cl.eval(r, s) {
                carry_mask |= 1 << k;
                carry_val |= (s >> i & 1) << k;
            }
        }
        for (&(next, until), members) in &groups {
            if next != want_next || until & carry_mask != carry_val {
                continue;
            }
            for &t in members {
                let j = *index.entry(t).or_insert_with(|| {
                    order.push(t);
                    queue.push_back(t);
                    order.len() - 1
                });
                edges.push((index[&s], j));
            }
        }
    }

    let guard_of = |s: u64| {
        Guard::and((0..cl.atoms).map(|i| {
            let Ltl::Atom(a) = cl.elems[i] else { unreachable!("atoms come first") };
            let lit = Guard::Atom(a.clone());
            if s >> i & 1 == 1 {
                lit
            } else {
                Guard::not(lit)
            }
        }))
    };
    let transitions =
        edges.iter().map(|&(p, q)| Transition { source: p, guard: guard_of(order[p]), target: q }).collect();
    let family = if untils.is_empty() {
        FinalFamily::all_nonempty()
    } else {
        FinalFamily::Predicate(Predicate::MeetsAll(
            untils
                .iter()
                .map(|(i, _, r)| {
                    (0..order.len()).filter(|&q| order[q] >> i & 1 == 0 || cl.eval(r, order[q])).collect()
                })
                .collect(),
        ))
    };
    let states = (0..order.len()).map(|i| format!("s{i}")).collect();
    Ok(MullerAutomaton::new(sig.clone(), states, initial, transitions, family)?)
}
