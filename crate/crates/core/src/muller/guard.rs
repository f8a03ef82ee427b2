//! Propositional transition guards over action atoms.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use super::table::{Table, MAX_TABLE_ATOMS};
use super::MullerError;
use crate::ltl::{parse::parse_ltl, Ltl};
use crate::sigcat::{Action, ActionSignature, Letter};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Guard {
    True,
    False,
    Atom(Action),
    Not(Box<Guard>),
    And(Vec<Guard>),
    Or(Vec<Guard>),
}

impl Guard {
    pub fn atom(a: Action) -> Guard {
        Guard::Atom(a)
    }

    pub fn not(g: Guard) -> Guard {
        match g {
            Guard::True => Guard::False,
            Guard::False => Guard::True,
            Guard::Not(inner) => *inner,
            g => Guard::Not(Box::new(g)),
        }
    }

    pub fn and(items: impl IntoIterator<Item = Guard>) -> Guard {
        let mut out = Vec::new();
        for g in items {
            match g {
                Guard::True => {}
                Guard::False => return Guard::False,
                Guard::And(inner) => out.extend(inner),
                g => out.push(g),
            }
        }
        out.sort();
        out.dedup();
        match out.len() {
            0 => Guard::True,
            1 => out.pop().unwrap(),
            _ => Guard::And(out),
        }
    }

    pub fn or(items: impl IntoIterator<Item = Guard>) -> Guard {
        let mut out = Vec::new();
        for g in items {
            match g {
                Guard::False => {}
                Guard::True => return Guard::True,
                Guard::Or(inner) => out.extend(inner),
                g => out.push(g),
            }
        }
        out.sort();
        out.dedup();
        match out.len() {
            0 => Guard::False,
            1 => out.pop().unwrap(),
            _ => Guard::Or(out),
        }
    }

    pub fn eval(&self, letter: &Letter) -> bool {
        match self {
            Guard::True => true,
            Guard::False => false,
            Guard::Atom(a) => letter.contains(a),
            Guard::Not(g) => !g.eval(letter),
            Guard::And(gs) => gs.iter().all(|g| g.eval(letter)),
            Guard::Or(gs) => gs.iter().any(|g| g.eval(letter)),
        }
    }

    pub fn atoms(&self) -> BTreeSet<Action> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<Action>) {
        match self {
            Guard::Atom(a) => {
                out.insert(a.clone());
            }
            Guard::Not(g) => g.collect_atoms(out),
            Guard::And(gs) | Guard::Or(gs) => gs.iter().for_each(|g| g.collect_atoms(out)),
            Guard::True | Guard::False => {}
        }
    }

    /// Substitutes every atom.
    pub fn rename(&self, f: &dyn Fn(&Action) -> Action) -> Guard {
        match self {
            Guard::True | Guard::False => self.clone(),
            Guard::Atom(a) => Guard::Atom(f(a)),
            Guard::Not(g) => Guard::not(g.rename(f)),
            Guard::And(gs) => Guard::and(gs.iter().map(|g| g.rename(f))),
            Guard::Or(gs) => Guard::or(gs.iter().map(|g| g.rename(f))),
        }
    }

    /// Replaces atom `a` by `by`.
    pub fn substitute(&self, a: &Action, by: &Guard) -> Guard {
        match self {
            Guard::True | Guard::False => self.clone(),
            Guard::Atom(b) if b == a => by.clone(),
            Guard::Atom(_) => self.clone(),
            Guard::Not(g) => Guard::not(g.substitute(a, by)),
            Guard::And(gs) => Guard::and(gs.iter().map(|g| g.substitute(a, by))),
            Guard::Or(gs) => Guard::or(gs.iter().map(|g| g.substitute(a, by))),
        }
    }

    /// Shannon elimination: `g[a:=true] ∨ g[a:=false]`.
    pub fn exists(&self, a: &Action) -> Guard {
        Guard::or([self.substitute(a, &Guard::True), self.substitute(a, &Guard::False)])
    }

    /// A satisfying letter over the guard's own atoms, if there is one.
    pub fn witness(&self) -> Option<Letter> {
        match self {
            Guard::True => return Some(Letter::new()),
            Guard::False => return None,
            _ => {}
        }
        let a = self.atoms().into_iter().next().expect("non-constant guards have atoms");
        if let Some(mut l) = self.substitute(&a, &Guard::True).witness() {
            l.insert(a);
            return Some(l);
        }
        self.substitute(&a, &Guard::False).witness()
    }

    pub(crate) fn table(&self, sig: &ActionSignature) -> Result<Table, MullerError> {
        if sig.len() > MAX_TABLE_ATOMS {
            return Err(MullerError::SignatureTooLarge(sig.len()));
        }
        self.table_unchecked(sig)
    }

    fn table_unchecked(&self, sig: &ActionSignature) -> Result<Table, MullerError> {
        let n = sig.len();
        Ok(match self {
            Guard::True => Table::full(n),
            Guard::False => Table::empty(n),
            Guard::Atom(a) => {
                let i = sig.index_of(a).ok_or_else(|| MullerError::ActionOutsideSignature(a.to_string()))?;
                Table::atom(n, i)
            }
            Guard::Not(g) => g.table_unchecked(sig)?.negate(),
            Guard::And(gs) => {
                let mut t = Table::full(n);
                for g in gs {
                    t.and_assign(&g.table_unchecked(sig)?);
                }
                t
            }
            Guard::Or(gs) => {
                let mut t = Table::empty(n);
                for g in gs {
                    t.or_assign(&g.table_unchecked(sig)?);
                }
                t
            }
        })
    }

    /// A formula with the given truth table, built by Shannon decomposition
    /// on atoms in signature order.
    pub(crate) fn from_table(table: &Table, sig: &ActionSignature) -> Guard {
        let bits: Vec<bool> = (0..1u64 << sig.len()).map(|l| table.contains(l)).collect();
        shannon(&bits, 0, sig)
    }
}

/// `bits` is the truth table over atoms `var..`; letters are indexed by the
/// remaining atoms with `var` as the lowest bit.
fn shannon(bits: &[bool], var: usize, sig: &ActionSignature) -> Guard {
    if bits.iter().all(|&b| b) {
        return Guard::True;
    }
    if bits.iter().all(|&b| !b) {
        return Guard::False;
    }
    let hi: Vec<bool> = bits.iter().skip(1).step_by(2).copied().collect();
    let lo: Vec<bool> = bits.iter().step_by(2).copied().collect();
    if hi == lo {
        return shannon(&lo, var + 1, sig);
    }
    let x = Guard::Atom(sig.get(var).clone());
    let g1 = shannon(&hi, var + 1, sig);
    let g0 = shannon(&lo, var + 1, sig);
    match (&g1, &g0) {
        (Guard::True, _) => Guard::or([x, g0]),
        (_, Guard::True) => Guard::or([Guard::not(x), g1]),
        (Guard::False, _) => Guard::and([Guard::not(x), g0]),
        (_, Guard::False) => Guard::and([x, g1]),
        _ => Guard::or([Guard::and([x.clone(), g1]), Guard::and([Guard::not(x), g0])]),
    }
}

impl fmt::Display for Guard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_guard(self, 0, f)
    }
}

fn precedence(g: &Guard) -> u8 {
    match g {
        Guard::Or(_) => 1,
        Guard::And(_) => 2,
        Guard::Not(_) => 3,
        _ => 4,
    }
}

fn fmt_guard(g: &Guard, min: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if precedence(g) < min {
        f.write_str("(")?;
        fmt_guard(g, 0, f)?;
        return f.write_str(")");
    }
    match g {
        Guard::True => f.write_str("true"),
        Guard::False => f.write_str("false"),
        Guard::Atom(a) => write!(f, "{a}"),
        Guard::Not(inner) => {
            f.write_str("!")?;
            fmt_guard(inner, 3, f)
        }
        Guard::And(gs) | Guard::Or(gs) => {
            let (sep, level) = if matches!(g, Guard::And(_)) { (" & ", 3) } else { (" | ", 2) };
            for (i, x) in gs.iter().enumerate() {
                if i > 0 {
                    f.write_str(sep)?;
                }
                fmt_guard(x, level, f)?;
            }
            Ok(())
        }
    }
}

impl TryFrom<&Ltl> for Guard {
    type Error = MullerError;

    fn try_from(f: &Ltl) -> Result<Guard, MullerError> {
        Ok(match f {
            Ltl::Atom(a) => Guard::Atom(a.clone()),
            Ltl::Not(g) => Guard::not(Guard::try_from(&**g)?),
            Ltl::And(gs) => Guard::and(gs.iter().map(Guard::try_from).collect::<Result<Vec<_>, _>>()?),
            Ltl::Or(gs) => Guard::or(gs.iter().map(Guard::try_from).collect::<Result<Vec<_>, _>>()?),
            Ltl::Next(_) | Ltl::Until(..) => {
                return Err(MullerError::Syntax("temporal operator in a guard".into()))
            }
        })
    }
}

impl FromStr for Guard {
    type Err = MullerError;

    fn from_str(s: &str) -> Result<Guard, MullerError> {
        let f = parse_ltl(s).map_err(|e| MullerError::Syntax(e.to_string()))?;
        Guard::try_from(&f)
    }
}
