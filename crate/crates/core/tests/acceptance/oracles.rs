//! Brute-force reference implementations, kept independent of the library's
//! acceptance and emptiness code: runs are explored over an explicit
//! (state, position) graph with bitset transitive closures.

use std::collections::BTreeMap;

use solp::muller::{Lasso, MullerAutomaton};
use solp::sigcat::{ActionSignature, Letter};

/// Every letter over `sig`, indexed by its bit mask.
pub fn all_letters(sig: &ActionSignature) -> Vec<Letter> {
    (0..1u64 << sig.len()).map(|m| sig.decode(m)).collect()
}

/// Transition relation of an automaton tabulated per letter: `step[l][q]`
/// is the set of successors of `q` on letter `l`, as a bit mask.
pub struct Table {
    pub states: usize,
    pub initial: u64,
    pub step: Vec<Vec<u64>>,
    /// Candidate recurrence sets: every non-empty state set in the family.
    pub finals: Vec<u64>,
    pub letters: Vec<Letter>,
}

impl Table {
    pub fn new(a: &MullerAutomaton) -> Table {
        let n = a.states().len();
        assert!(n <= 8, "oracle tables are for small automata");
        let letters = all_letters(a.signature());
        let step = letters
            .iter()
            .map(|l| {
                let mut row = vec![0u64; n];
                for t in a.transitions() {
                    if t.guard.eval(l) {
                        row[t.source] |= 1 << t.target;
                    }
                }
                row
            })
            .collect();
        let finals = (1u64..1 << n).filter(|&m| a.family().contains(&states_of(m))).collect();
        let initial = a.initial().iter().fold(0, |m, &q| m | 1 << q);
        Table { states: n, initial, step, finals, letters }
    }

    pub fn letter_index(&self, l: &Letter) -> usize {
        self.letters.iter().position(|x| x == l).expect("letter over the signature")
    }

    /// States reachable from `from` by reading `word`.
    pub fn image(&self, from: u64, word: &[usize]) -> u64 {
        word.iter().fold(from, |s, &l| (0..self.states).filter(|q| s >> q & 1 == 1).fold(0, |acc, q| acc | self.step[l][q]))
    }

    /// Whether some run from a state of `start` on `cycle^ω` has its set of
    /// recurring states in the family.
    pub fn accepts_cycle(&self, start: u64, cycle: &[usize]) -> bool {
        let (n, c) = (self.states, cycle.len());
        assert!(n * c <= 64, "run graph too large for the oracle");
        let node = |q: usize, j: usize| q * c + j;
        let mut succ = vec![0u64; n * c];
        for q in 0..n {
            for (j, &l) in cycle.iter().enumerate() {
                let targets = self.step[l][q];
                for r in (0..n).filter(|r| targets >> r & 1 == 1) {
                    succ[node(q, j)] |= 1 << node(r, (j + 1) % c);
                }
            }
        }
        let starts = (0..n).filter(|q| start >> q & 1 == 1).fold(0u64, |m, q| m | 1 << node(q, 0));
        let reach = closure(&succ);
        let reachable = (0..n * c).filter(|&v| starts >> v & 1 == 1).fold(starts, |m, v| m | reach[v]);
        self.finals.iter().any(|&f| {
            let inside = |v: usize| f >> (v / c) & 1 == 1;
            let restricted: Vec<u64> = (0..n * c)
                .map(|v| if inside(v) { (0..n * c).filter(|&w| inside(w) && succ[v] >> w & 1 == 1).fold(0, |m, w| m | 1 << w) } else { 0 })
                .collect();
            let r = closure(&restricted);
            (0..n * c).filter(|&v| reachable >> v & 1 == 1 && inside(v) && r[v] >> v & 1 == 1).any(|v| {
                let component = (0..n * c).filter(|&w| r[v] >> w & 1 == 1 && r[w] >> v & 1 == 1);
                component.fold(0u64, |m, w| m | 1 << (w / c)) == f
            })
        })
    }

    pub fn accepts(&self, lasso: &Lasso) -> bool {
        let prefix: Vec<usize> = lasso.prefix.iter().map(|l| self.letter_index(l)).collect();
        let cycle: Vec<usize> = lasso.cycle.iter().map(|l| self.letter_index(l)).collect();
        self.accepts_cycle(self.image(self.initial, &prefix), &cycle)
    }

    /// Exact emptiness: the language is non-empty iff some family member is
    /// reachable and strongly connected through transitions with a
    /// satisfiable guard.
    pub fn is_empty(&self) -> bool {
        let n = self.states;
        let succ: Vec<u64> = (0..n).map(|q| self.step.iter().fold(0, |m, row| m | row[q])).collect();
        let reach = closure(&succ);
        let reachable = (0..n).filter(|&q| self.initial >> q & 1 == 1).fold(self.initial, |m, q| m | reach[q]);
        !self.finals.iter().any(|&f| {
            let restricted: Vec<u64> = (0..n).map(|q| if f >> q & 1 == 1 { succ[q] & f } else { 0 }).collect();
            let r = closure(&restricted);
            f & reachable != 0 && (0..n).filter(|q| f >> q & 1 == 1).all(|q| r[q] & f == f)
        })
    }

    /// An accepted lasso with `|prefix| <= max_prefix` and
    /// `1 <= |cycle| <= max_cycle`, by exhaustive search. Prefixes are
    /// explored up to the set of states they reach.
    pub fn bounded_lasso(&self, max_prefix: usize, max_cycle: usize) -> Option<Lasso> {
        let mut reached: BTreeMap<u64, Vec<usize>> = BTreeMap::from([(self.initial, vec![])]);
        let mut frontier = vec![(self.initial, vec![])];
        for _ in 0..max_prefix {
            let mut next = Vec::new();
            for (s, word) in &frontier {
                for l in 0..self.letters.len() {
                    let t = self.image(*s, &[l]);
                    if !reached.contains_key(&t) {
                        let mut w: Vec<usize> = word.clone();
                        w.push(l);
                        reached.insert(t, w.clone());
                        next.push((t, w));
                    }
                }
            }
            frontier = next;
        }
        let k = self.letters.len();
        for len in 1..=max_cycle {
            for code in 0..k.pow(len as u32) {
                let cycle: Vec<usize> = (0..len).map(|i| code / k.pow(i as u32) % k).collect();
                for (&s, prefix) in &reached {
                    if self.accepts_cycle(s, &cycle) {
                        let word = |w: &[usize]| w.iter().map(|&l| self.letters[l].clone()).collect();
                        return Some(Lasso { prefix: word(prefix), cycle: word(&cycle) });
                    }
                }
            }
        }
        None
    }
}

fn states_of(mask: u64) -> std::collections::BTreeSet<usize> {
    (0..64).filter(|i| mask >> i & 1 == 1).collect()
}

/// Transitive (not reflexive) closure of a successor relation on bitsets.
pub fn closure(succ: &[u64]) -> Vec<u64> {
    let mut r = succ.to_vec();
    for k in 0..r.len() {
        for i in 0..r.len() {
            if r[i] >> k & 1 == 1 {
                r[i] |= r[k];
            }
        }
    }
    r
}
