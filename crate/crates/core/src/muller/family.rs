//! Final-state families and their Emerson–Lei form.
//!
//! Every family is compiled into a positive combination of `Inf(X)` ("some
//! state of X recurs") and `Fin(X)` ("no state of X recurs") atoms. For a set
//! S of recurring states, S is in the family iff the condition holds of S.

use std::collections::BTreeSet;

/// A named membership rule with a closed form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Predicate {
    /// Every non-empty set.
    AllNonEmpty,
    /// Non-empty sets that contain `then` whenever they contain `when`.
    Implies { when: usize, then: usize },
    /// Non-empty sets meeting each listed set (generalized Büchi).
    MeetsAll(Vec<BTreeSet<usize>>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Projected {
    /// Component state for each state of the owning automaton.
    pub projection: Vec<usize>,
    pub family: FinalFamily,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FinalFamily {
    Explicit(Vec<BTreeSet<usize>>),
    Product(Vec<Projected>),
    Predicate(Predicate),
}

impl FinalFamily {
    pub fn all_nonempty() -> Self {
        FinalFamily::Predicate(Predicate::AllNonEmpty)
    }

    pub fn contains(&self, set: &BTreeSet<usize>) -> bool {
        if set.is_empty() {
            return false;
        }
        match self {
            FinalFamily::Explicit(sets) => sets.contains(set),
            FinalFamily::Product(parts) => parts.iter().all(|p| {
                let image: BTreeSet<usize> = set.iter().map(|&s| p.projection[s]).collect();
                p.family.contains(&image)
            }),
            FinalFamily::Predicate(Predicate::AllNonEmpty) => true,
            FinalFamily::Predicate(Predicate::Implies { when, then }) => {
                !set.contains(when) || set.contains(then)
            }
            FinalFamily::Predicate(Predicate::MeetsAll(sets)) => {
                sets.iter().all(|f| !f.is_disjoint(set))
            }
        }
    }

    /// The largest state index mentioned, checked against the owner's size.
    pub(crate) fn check_range(&self, states: usize) -> Result<(), usize> {
        let check = |s: usize| if s < states { Ok(()) } else { Err(s) };
        match self {
            FinalFamily::Explicit(sets) | FinalFamily::Predicate(Predicate::MeetsAll(sets)) => {
                sets.iter().flatten().try_for_each(|&s| check(s))
            }
            FinalFamily::Product(parts) => {
                for p in parts {
                    if p.projection.len() != states {
                        return Err(p.projection.len());
                    }
                }
                Ok(())
            }
            FinalFamily::Predicate(Predicate::Implies { when, then }) => {
                check(*when)?;
                check(*then)
            }
            FinalFamily::Predicate(Predicate::AllNonEmpty) => Ok(()),
        }
    }

    /// Relabels the family along a state bijection `old -> new`.
    #[cfg(test)]
    pub(crate) fn relabel(&self, new_of: &[usize]) -> FinalFamily {
        let set = |s: &BTreeSet<usize>| s.iter().map(|&q| new_of[q]).collect::<BTreeSet<_>>();
        match self {
            FinalFamily::Explicit(sets) => FinalFamily::Explicit(sets.iter().map(set).collect()),
            FinalFamily::Predicate(Predicate::MeetsAll(sets)) => {
                FinalFamily::Predicate(Predicate::MeetsAll(sets.iter().map(set).collect()))
            }
            FinalFamily::Predicate(Predicate::Implies { when, then }) => {
                FinalFamily::Predicate(Predicate::Implies { when: new_of[*when], then: new_of[*then] })
            }
            FinalFamily::Predicate(Predicate::AllNonEmpty) => self.clone(),
            FinalFamily::Product(parts) => {
                let mut old_of = vec![0; new_of.len()];
                for (old, &new) in new_of.iter().enumerate() {
                    old_of[new] = old;
                }
                FinalFamily::Product(
                    parts
                        .iter()
                        .map(|p| Projected {
                            projection: old_of.iter().map(|&o| p.projection[o]).collect(),
                            family: p.family.clone(),
                        })
                        .collect(),
                )
            }
        }
    }

    /// The Emerson–Lei condition over `n` outer states, where `view` maps an
    /// outer state to a state of the automaton owning this family.
    pub(crate) fn acceptance(&self, n: usize, view: &dyn Fn(usize) -> usize) -> Acc {
        let preimage = |pred: &dyn Fn(usize) -> bool| -> Vec<bool> { (0..n).map(|s| pred(view(s))).collect() };
        match self {
            FinalFamily::Explicit(sets) => Acc::Or(
                sets.iter()
                    .map(|t| {
                        let mut parts = vec![Acc::Fin(preimage(&|q| !t.contains(&q)))];
                        parts.extend(t.iter().map(|&x| Acc::Inf(preimage(&|q| q == x))));
                        Acc::And(parts)
                    })
                    .collect(),
            ),
            FinalFamily::Product(parts) => Acc::And(
                parts
                    .iter()
                    .map(|p| p.family.acceptance(n, &|s| p.projection[view(s)]))
                    .collect(),
            ),
            FinalFamily::Predicate(Predicate::AllNonEmpty) => Acc::True,
            FinalFamily::Predicate(Predicate::Implies { when, then }) => Acc::Or(vec![
                Acc::Fin(preimage(&|q| q == *when)),
                Acc::Inf(preimage(&|q| q == *then)),
            ]),
            FinalFamily::Predicate(Predicate::MeetsAll(sets)) => {
                Acc::And(sets.iter().map(|f| Acc::Inf(preimage(&|q| f.contains(&q)))).collect())
            }
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) enum Acc {
    True,
    Inf(Vec<bool>),
    Fin(Vec<bool>),
    And(Vec<Acc>),
    Or(Vec<Acc>),
}

/// One disjunct of the normal form: avoid `fin`, visit every set in `infs`.
#[derive(Debug, Clone)]
pub(crate) struct Conj {
    pub fin: Vec<bool>,
    pub infs: Vec<Vec<bool>>,
}

impl Conj {
    fn satisfiable(&self) -> bool {
        self.infs.iter().all(|inf| inf.iter().zip(&self.fin).any(|(&i, &f)| i && !f))
    }

    fn merge(&self, other: &Conj) -> Conj {
        let fin = self.fin.iter().zip(&other.fin).map(|(a, b)| *a || *b).collect();
        let mut infs = self.infs.clone();
        infs.extend(other.infs.iter().cloned());
        Conj { fin, infs }
    }
}

impl Acc {
    pub(crate) fn dnf(&self, n: usize) -> Vec<Conj> {
        let mut out = match self {
            Acc::True => vec![Conj { fin: vec![false; n], infs: vec![] }],
            Acc::Inf(x) => vec![Conj { fin: vec![false; n], infs: vec![x.clone()] }],
            Acc::Fin(x) => vec![Conj { fin: x.clone(), infs: vec![] }],
            Acc::Or(items) => items.iter().flat_map(|a| a.dnf(n)).collect(),
            Acc::And(items) => {
                let mut acc = vec![Conj { fin: vec![false; n], infs: vec![] }];
                for item in items {
                    let rhs = item.dnf(n);
                    acc = acc
                        .iter()
                        .flat_map(|l| rhs.iter().map(move |r| l.merge(r)))
                        .filter(Conj::satisfiable)
                        .collect();
                    if acc.is_empty() {
                        break;
                    }
                }
                acc
            }
        };
        out.retain(Conj::satisfiable);
        out
    }

    /// Direct evaluation on a set of recurring outer states.
    #[cfg(test)]
    pub(crate) fn holds_on(&self, set: &[bool]) -> bool {
        match self {
            Acc::True => true,
            Acc::Inf(x) => x.iter().zip(set).any(|(a, b)| *a && *b),
            Acc::Fin(x) => !x.iter().zip(set).any(|(a, b)| *a && *b),
            Acc::And(items) => items.iter().all(|a| a.holds_on(set)),
            Acc::Or(items) => items.iter().any(|a| a.holds_on(set)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn family_strategy(n: usize) -> impl Strategy<Value = FinalFamily> {
        let set = prop::collection::btree_set(0..n, 1..=n);
        prop_oneof![
            prop::collection::vec(set.clone(), 0..4).prop_map(FinalFamily::Explicit),
            Just(FinalFamily::all_nonempty()),
            (0..n, 0..n).prop_map(|(when, then)| FinalFamily::Predicate(Predicate::Implies { when, then })),
            prop::collection::vec(set, 0..3).prop_map(|s| FinalFamily::Predicate(Predicate::MeetsAll(s))),
        ]
    }

    fn subsets(n: usize) -> impl Iterator<Item = BTreeSet<usize>> {
        (1u32..1 << n).map(move |m| (0..n).filter(|i| m >> i & 1 == 1).collect())
    }

    proptest! {
        #[test]
        fn normal_form_agrees_with_membership(f in family_strategy(4)) {
            let acc = f.acceptance(4, &|s| s);
            let dnf = acc.dnf(4);
            for s in subsets(4) {
                let bits: Vec<bool> = (0..4).map(|i| s.contains(&i)).collect();
                prop_assert_eq!(acc.holds_on(&bits), f.contains(&s));
                let by_dnf = dnf.iter().any(|c| {
                    !c.fin.iter().zip(&bits).any(|(a, b)| *a && *b)
                        && c.infs.iter().all(|x| x.iter().zip(&bits).any(|(a, b)| *a && *b))
                });
                prop_assert_eq!(by_dnf, f.contains(&s));
            }
        }

        #[test]
        fn product_family_projects(f in family_strategy(2), g in family_strategy(3)) {
            let projection_a: Vec<usize> = (0..6).map(|s| s / 3).collect();
            let projection_b: Vec<usize> = (0..6).map(|s| s % 3).collect();
            let prod = FinalFamily::Product(vec![
                Projected { projection: projection_a.clone(), family: f.clone() },
                Projected { projection: projection_b.clone(), family: g.clone() },
            ]);
            let acc = prod.acceptance(6, &|s| s);
            for s in subsets(6) {
                let a: BTreeSet<usize> = s.iter().map(|&x| projection_a[x]).collect();
                let b: BTreeSet<usize> = s.iter().map(|&x| projection_b[x]).collect();
                prop_assert_eq!(prod.contains(&s), f.contains(&a) && g.contains(&b));
                let bits: Vec<bool> = (0..6).map(|i| s.contains(&i)).collect();
                prop_assert_eq!(acc.holds_on(&bits), prod.contains(&s));
            }
        }
    }

    #[test]
    fn relabel_preserves_membership() {
        let f = FinalFamily::Predicate(Predicate::Implies { when: 0, then: 2 });
        let g = f.relabel(&[2, 0, 1]);
        assert!(g.contains(&[2, 1].into()));
        assert!(!g.contains(&[2].into()));
    }
}
