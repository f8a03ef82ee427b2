//! Linear temporal logic over action atoms.
//!
//! `F f` abbreviates `true U f` and `G f` abbreviates `!(true U !f)`;
//! `true` and `false` are the empty conjunction and disjunction. Conjunctions
//! and disjunctions are finite sets, kept flattened and sorted.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::muller::{Lasso, MullerAutomaton, MullerError, Tabled};
use crate::sigcat::{Action, ActionSignature, SigError, SignatureMorphism};

pub mod parse;
mod tableau;

pub use parse::ParseError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LtlError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("atom `{0}` is not in the signature")]
    AtomOutsideSignature(String),
    #[error("formula has {0} elementary subformulas, more than the translation supports")]
    TooLarge(usize),
    #[error(transparent)]
    Automaton(#[from] MullerError),
    #[error(transparent)]
    Sig(#[from] SigError),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Ltl {
    Atom(Action),
    Not(Box<Ltl>),
    Or(Vec<Ltl>),
    And(Vec<Ltl>),
    Next(Box<Ltl>),
    Until(Box<Ltl>, Box<Ltl>),
}

fn normalize(items: impl IntoIterator<Item = Ltl>, conj: bool) -> Vec<Ltl> {
    let mut out = Vec::new();
    for f in items {
        match f {
            Ltl::And(inner) if conj => out.extend(inner),
            Ltl::Or(inner) if !conj => out.extend(inner),
            f => out.push(f),
        }
    }
    out.sort();
    out.dedup();
    out
}

impl Ltl {
    pub fn atom(a: Action) -> Ltl {
        Ltl::Atom(a)
    }

    pub fn tt() -> Ltl {
        Ltl::And(Vec::new())
    }

    pub fn ff() -> Ltl {
        Ltl::Or(Vec::new())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Ltl) -> Ltl {
        Ltl::Not(Box::new(f))
    }

    pub fn or(items: impl IntoIterator<Item = Ltl>) -> Ltl {
        let mut v = normalize(items, false);
        if v.len() == 1 {
            v.pop().unwrap()
        } else {
            Ltl::Or(v)
        }
    }

    pub fn and(items: impl IntoIterator<Item = Ltl>) -> Ltl {
        let mut v = normalize(items, true);
        if v.len() == 1 {
            v.pop().unwrap()
        } else {
            Ltl::And(v)
        }
    }

    pub fn next(f: Ltl) -> Ltl {
        Ltl::Next(Box::new(f))
    }

    pub fn until(f: Ltl, g: Ltl) -> Ltl {
        Ltl::Until(Box::new(f), Box::new(g))
    }

    pub fn implies(f: Ltl, g: Ltl) -> Ltl {
        Ltl::or([Ltl::not(f), g])
    }

    pub fn eventually(f: Ltl) -> Ltl {
        Ltl::until(Ltl::tt(), f)
    }

    pub fn always(f: Ltl) -> Ltl {
        Ltl::not(Ltl::eventually(Ltl::not(f)))
    }

    pub fn is_true(&self) -> bool {
        matches!(self, Ltl::And(v) if v.is_empty())
    }

    pub fn atoms(&self) -> BTreeSet<Action> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            if let Ltl::Atom(a) = f {
                out.insert(a.clone());
            }
        });
        out
    }

    pub fn signature(&self) -> ActionSignature {
        self.atoms().into_iter().collect()
    }

    /// Number of nodes in the syntax tree.
    pub fn size(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |_| n += 1);
        n
    }

    pub fn depth(&self) -> usize {
        match self {
            Ltl::Atom(_) => 0,
            Ltl::Not(f) | Ltl::Next(f) => 1 + f.depth(),
            Ltl::Or(fs) | Ltl::And(fs) => 1 + fs.iter().map(Ltl::depth).max().unwrap_or(0),
            Ltl::Until(f, g) => 1 + f.depth().max(g.depth()),
        }
    }

    fn visit(&self, f: &mut dyn FnMut(&Ltl)) {
        f(self);
        match self {
            Ltl::Atom(_) => {}
            Ltl::Not(g) | Ltl::Next(g) => g.visit(f),
            Ltl::Or(gs) | Ltl::And(gs) => gs.iter().for_each(|g| g.visit(f)),
            Ltl::Until(g, h) => {
                g.visit(f);
                h.visit(f);
            }
        }
    }

    /// Replaces every atom.
    pub fn rename(&self, f: &dyn Fn(&Action) -> Action) -> Ltl {
        match self {
            Ltl::Atom(a) => Ltl::Atom(f(a)),
            Ltl::Not(g) => Ltl::not(g.rename(f)),
            Ltl::Or(gs) => Ltl::or(gs.iter().map(|g| g.rename(f))),
            Ltl::And(gs) => Ltl::and(gs.iter().map(|g| g.rename(f))),
            Ltl::Next(g) => Ltl::next(g.rename(f)),
            Ltl::Until(g, h) => Ltl::until(g.rename(f), h.rename(f)),
        }
    }

    /// The translation along a signature morphism whose source covers the atoms.
    pub fn translate(&self, sigma: &SignatureMorphism) -> Result<Ltl, LtlError> {
        if let Some(a) = self.atoms().into_iter().find(|a| sigma.apply(a).is_none()) {
            return Err(LtlError::AtomOutsideSignature(a.to_string()));
        }
        Ok(self.rename(&|a| sigma.apply(a).expect("checked").clone()))
    }

    /// Truth value at every distinct position of the lasso.
    fn eval(&self, w: &Lasso) -> Vec<bool> {
        let n = w.positions();
        match self {
            Ltl::Atom(a) => (0..n).map(|i| w.at(i).contains(a)).collect(),
            Ltl::Not(f) => f.eval(w).into_iter().map(|b| !b).collect(),
            Ltl::Or(fs) => {
                let vals: Vec<Vec<bool>> = fs.iter().map(|f| f.eval(w)).collect();
                (0..n).map(|i| vals.iter().any(|v| v[i])).collect()
            }
            Ltl::And(fs) => {
                let vals: Vec<Vec<bool>> = fs.iter().map(|f| f.eval(w)).collect();
                (0..n).map(|i| vals.iter().all(|v| v[i])).collect()
            }
            Ltl::Next(f) => {
                let v = f.eval(w);
                (0..n).map(|i| v[w.next(i)]).collect()
            }
            Ltl::Until(f, g) => {
                let (vf, vg) = (f.eval(w), g.eval(w));
                // Least fixpoint of u = g ∨ (f ∧ X u).
                let mut u = vg.clone();
                loop {
                    let mut changed = false;
                    for i in (0..n).rev() {
                        if !u[i] && vf[i] && u[w.next(i)] {
                            u[i] = true;
                            changed = true;
                        }
                    }
                    if !changed {
                        break;
                    }
                }
                u
            }
        }
    }
}

/// Satisfaction of `f` by the lasso word at position 0.
pub fn sat_lasso(f: &Ltl, w: &Lasso) -> bool {
    f.eval(w)[0]
}

/// An automaton over `sig` accepting exactly the models of `f`.
pub fn to_automaton(f: &Ltl, sig: &ActionSignature) -> Result<MullerAutomaton, LtlError> {
    tableau::translate(f, sig)
}

/// A lasso satisfying `f`, if any.
pub fn satisfying_lasso(f: &Ltl) -> Result<Option<Lasso>, LtlError> {
    Ok(to_automaton(f, &f.signature())?.accepted_lasso())
}

pub fn is_satisfiable(f: &Ltl) -> Result<bool, LtlError> {
    Ok(satisfying_lasso(f)?.is_some())
}

/// A word satisfying `f` but not `g`, if any.
pub fn entailment_counterexample(f: &Ltl, g: &Ltl) -> Result<Option<Lasso>, LtlError> {
    satisfying_lasso(&Ltl::and([f.clone(), Ltl::not(g.clone())]))
}

/// Whether every model of `f` is a model of `g`.
pub fn entails(f: &Ltl, g: &Ltl) -> Result<bool, LtlError> {
    Ok(entailment_counterexample(f, g)?.is_none())
}

pub fn is_valid(f: &Ltl) -> Result<bool, LtlError> {
    entails(&Ltl::tt(), f)
}

/// A word accepted by `a` that violates `f`, if any.
pub fn counterexample(a: &MullerAutomaton, f: &Ltl) -> Result<Option<Lasso>, LtlError> {
    if let Some(x) = f.atoms().into_iter().find(|x| !a.signature().contains(x)) {
        return Err(LtlError::AtomOutsideSignature(x.to_string()));
    }
    let negated = to_automaton(&Ltl::not(f.clone()), a.signature())?;
    let left = Tabled::from_automaton(a)?;
    let right = Tabled::from_automaton(&negated)?;
    let (prod, _) = Tabled::product(&[&left, &right], true);
    Ok(prod.accepted_masks().map(|m| prod.to_lasso(m)))
}

/// Whether every word accepted by `a` satisfies `f`.
pub fn holds(a: &MullerAutomaton, f: &Ltl) -> Result<bool, LtlError> {
    Ok(counterexample(a, f)?.is_none())
}

impl FromStr for Ltl {
    type Err = LtlError;

    fn from_str(s: &str) -> Result<Ltl, LtlError> {
        Ok(parse::parse_ltl(s)?)
    }
}

// Printing levels, loosest first: `->` 0, `|` 1, `&` 2, `U` 3, unary 4, atomic 5.
fn implication_parts(f: &Ltl) -> Option<(&Ltl, &Ltl)> {
    if let Ltl::Or(v) = f {
        if v.len() == 2 {
            match (&v[0], &v[1]) {
                (Ltl::Not(a), b) if !matches!(b, Ltl::Not(_)) => return Some((a, b)),
                (b, Ltl::Not(a)) if !matches!(b, Ltl::Not(_)) => return Some((a, b)),
                _ => {}
            }
        }
    }
    None
}

fn eventually_part(f: &Ltl) -> Option<&Ltl> {
    match f {
        Ltl::Until(t, g) if t.is_true() => Some(g),
        _ => None,
    }
}

fn always_part(f: &Ltl) -> Option<&Ltl> {
    if let Ltl::Not(inner) = f {
        if let Some(Ltl::Not(g)) = eventually_part(inner) {
            return Some(g);
        }
    }
    None
}

fn level(f: &Ltl) -> u8 {
    match f {
        Ltl::Atom(_) => 5,
        Ltl::And(v) | Ltl::Or(v) if v.is_empty() => 5,
        Ltl::Or(_) if implication_parts(f).is_some() => 0,
        Ltl::Or(_) => 1,
        Ltl::And(_) => 2,
        Ltl::Until(..) if eventually_part(f).is_some() => 4,
        Ltl::Until(..) => 3,
        Ltl::Not(_) | Ltl::Next(_) => 4,
    }
}

fn write_unary(op: &str, g: &Ltl, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    f.write_str(op)?;
    if level(g) < 4 {
        f.write_str("(")?;
        write_at(g, 0, f)?;
        return f.write_str(")");
    }
    if op != "!" {
        f.write_str(" ")?;
    }
    write_at(g, 4, f)
}

fn write_at(x: &Ltl, min: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if level(x) < min {
        f.write_str("(")?;
        write_at(x, 0, f)?;
        return f.write_str(")");
    }
    if let Some(g) = always_part(x) {
        return write_unary("G", g, f);
    }
    if let Some(g) = eventually_part(x) {
        return write_unary("F", g, f);
    }
    if let Some((a, b)) = implication_parts(x) {
        write_at(a, 1, f)?;
        f.write_str(" -> ")?;
        return write_at(b, 0, f);
    }
    match x {
        Ltl::Atom(a) => write!(f, "{a}"),
        Ltl::And(v) if v.is_empty() => f.write_str("true"),
        Ltl::Or(v) if v.is_empty() => f.write_str("false"),
        Ltl::Or(v) | Ltl::And(v) => {
            let (sep, lvl) = if matches!(x, Ltl::Or(_)) { (" | ", 2) } else { (" & ", 3) };
            for (i, g) in v.iter().enumerate() {
                if i > 0 {
                    f.write_str(sep)?;
                }
                write_at(g, lvl, f)?;
            }
            Ok(())
        }
        Ltl::Not(g) => write_unary("!", g, f),
        Ltl::Next(g) => write_unary("X", g, f),
        Ltl::Until(g, h) => {
            write_at(g, 4, f)?;
            f.write_str(" U ")?;
            write_at(h, 3, f)
        }
    }
}

impl fmt::Display for Ltl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_at(self, 0, f)
    }
}
