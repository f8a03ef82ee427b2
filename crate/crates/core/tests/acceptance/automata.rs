//! Muller automata against brute-force oracles, the formula-to-automaton
//! translation against lasso semantics, and the universal properties of
//! cofree expansion and products.

use std::collections::BTreeSet;

use rand::Rng;
use solp::ltl::{sat_lasso, to_automaton};
use solp::muller::{FinalFamily, Guard, MullerAutomaton, Transition};
use solp::sigcat::{ActionSignature, SignatureMorphism};

use crate::gen::{self, guard_from_table, opaque};
use crate::oracles::Table;

pub fn muller_oracles() -> Result<String, String> {
    let mut rng = gen::rng(3);
    let names = ["a", "b", "c"];
    let (mut lassos, mut accepted, mut empty, mut beyond) = (0, 0, 0, 0);
    for i in 0..200 {
        let sig = opaque(&names[..rng.gen_range(1..=3)]);
        let a = gen::random_automaton(&mut rng, &sig, 4);
        let table = Table::new(&a);
        for _ in 0..20 {
            let w = gen::random_lasso(&mut rng, &sig, 4, 4);
            let got = a.accepts(&w).map_err(|e| e.to_string())?;
            let want = table.accepts(&w);
            ensure!(got == want, "automaton {i}: accepts({w}) = {got}, run oracle says {want}");
            lassos += 1;
            accepted += usize::from(want);
        }
        let lib_empty = a.is_empty();
        ensure!(lib_empty == table.is_empty(), "automaton {i}: is_empty = {lib_empty}, exact oracle disagrees");
        let bounded = table.bounded_lasso(4, 4);
        if let Some(w) = &bounded {
            ensure!(!lib_empty, "automaton {i}: is_empty, yet it accepts {w}");
        }
        if lib_empty {
            empty += 1;
        } else {
            let w = a.accepted_lasso().ok_or("non-empty automaton without a witness")?;
            ensure!(table.accepts(&w), "automaton {i}: witness {w} is not accepted");
            beyond += usize::from(bounded.is_none());
        }
    }
    Ok(format!(
        "200 automata x 20 lassos: {lassos} acceptance checks agree with the run oracle ({accepted} accepted); \
         emptiness agrees with the exact oracle on 200/200 ({empty} empty) and with bounded lasso search \
         (prefix, cycle <= 4) on {}/200; {beyond} non-empty automata have no accepted lasso within the bound, \
         their witnesses pass the run oracle",
        200 - beyond
    ))
}

pub fn ltl_translation() -> Result<String, String> {
    let mut rng = gen::rng(4);
    let sig = opaque(&["a", "b"]);
    let atoms: Vec<_> = sig.iter().cloned().collect();
    let (mut checks, mut satisfied, mut max_states) = (0, 0, 0);
    for _ in 0..300 {
        let f = gen::random_formula(&mut rng, &atoms, 4);
        let a = to_automaton(&f, &sig).map_err(|e| e.to_string())?;
        max_states = max_states.max(a.states().len());
        for _ in 0..20 {
            let w = gen::random_lasso(&mut rng, &sig, 4, 4);
            let (got, want) = (a.accepts(&w).map_err(|e| e.to_string())?, sat_lasso(&f, &w));
            ensure!(got == want, "{f} on {w}: automaton says {got}, semantics says {want}");
            checks += 1;
            satisfied += usize::from(want);
        }
    }
    Ok(format!("300 formulas x 20 lassos: {checks} verdicts agree ({satisfied} satisfied), automata up to {max_states} states"))
}

/// Every guard over `sig`, one per truth table.
fn all_guards(sig: &ActionSignature) -> Vec<Guard> {
    (0..1u64 << (1 << sig.len())).map(|t| guard_from_table(t, sig)).collect()
}

fn subsets(n: usize) -> Vec<BTreeSet<usize>> {
    (0..1u64 << n).map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect()).collect()
}

/// Every explicit family over `n` states.
fn families(n: usize) -> Vec<FinalFamily> {
    let sets: Vec<BTreeSet<usize>> = subsets(n).into_iter().filter(|s| !s.is_empty()).collect();
    (0..1u64 << sets.len())
        .map(|m| FinalFamily::Explicit(sets.iter().enumerate().filter(|(i, _)| m >> i & 1 == 1).map(|(_, s)| s.clone()).collect()))
        .collect()
}

fn maps(from: usize, to: usize) -> Vec<Vec<usize>> {
    (0..to.pow(from as u32)).map(|code| (0..from).map(|i| code / to.pow(i as u32) % to).collect()).collect()
}

fn automaton(sig: &ActionSignature, n: usize, initial: BTreeSet<usize>, transitions: Vec<Transition>, family: FinalFamily) -> MullerAutomaton {
    MullerAutomaton::new(sig.clone(), (0..n).map(|i| format!("s{i}")).collect(), initial, transitions, family).unwrap()
}

/// Automata over `sig` with `n` states, no initial states, an empty family
/// and at most one transition.
fn single_transitions(sig: &ActionSignature, n: usize) -> Vec<MullerAutomaton> {
    let mut out = vec![automaton(sig, n, BTreeSet::new(), vec![], FinalFamily::Explicit(vec![]))];
    for g in all_guards(sig) {
        for (p, q) in (0..n).flat_map(|p| (0..n).map(move |q| (p, q))) {
            let t = Transition { source: p, guard: g.clone(), target: q };
            out.push(automaton(sig, n, BTreeSet::new(), vec![t], FinalFamily::Explicit(vec![])));
        }
    }
    out
}

/// A single transition from the first to the last state, for each guard.
fn probes(sig: &ActionSignature, n: usize) -> Vec<MullerAutomaton> {
    all_guards(sig)
        .into_iter()
        .map(|g| automaton(sig, n, BTreeSet::new(), vec![Transition { source: 0, guard: g, target: n - 1 }], FinalFamily::Explicit(vec![])))
        .collect()
}

/// The homomorphism conditions are a conjunction of an initial-state
/// condition, one covering condition per transition of the source, and a
/// family condition, so each is enumerated on its own: source automata
/// paired with the target automata that exercise the same condition.
fn decomposed(sig_src: &ActionSignature, sig_tgt: &ActionSignature, n_src: usize, n_tgt: usize) -> Vec<(MullerAutomaton, Vec<MullerAutomaton>)> {
    let none = || FinalFamily::Explicit(vec![]);
    let mut out = Vec::new();
    for src in probes(sig_src, n_src) {
        out.push((src, single_transitions(sig_tgt, n_tgt)));
    }
    for i in subsets(n_src) {
        let targets = subsets(n_tgt).into_iter().map(|j| automaton(sig_tgt, n_tgt, j, vec![], none())).collect();
        out.push((automaton(sig_src, n_src, i, vec![], none()), targets));
    }
    for f in families(n_src) {
        let targets = families(n_tgt).into_iter().map(|g| automaton(sig_tgt, n_tgt, BTreeSet::new(), vec![], g)).collect();
        out.push((automaton(sig_src, n_src, BTreeSet::new(), vec![], f), targets));
    }
    out
}

fn hom(a: &MullerAutomaton, b: &MullerAutomaton, h: &[usize]) -> bool {
    MullerAutomaton::check_homomorphism(a, b, h).unwrap()
}

pub fn universality() -> Result<String, String> {
    let (mut arrows, mut counits, mut morphisms) = (0, 0, 0);
    for (k, k2) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
        let a = opaque(&["x", "y"][..k]);
        let b = opaque(&["u", "v"][..k2]);
        let targets: Vec<_> = b.iter().cloned().collect();
        for image in maps(k, k2) {
            let sigma = SignatureMorphism::new(a.clone(), b.clone(), a.iter().cloned().zip(image.iter().map(|&i| targets[i].clone())).collect())
                .map_err(|e| e.to_string())?;
            morphisms += 1;
            for (n_src, n_tgt) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
                // Λ′ over B against Λ over A: homomorphisms Λ′|σ → Λ are exactly
                // the homomorphisms Λ′ → Λ^σ with the same state map.
                for (lp, ls) in decomposed(&b, &a, n_src, n_tgt) {
                    let reduct = lp.reduct(&sigma).map_err(|e| e.to_string())?;
                    for l in &ls {
                        let expansion = l.cofree_expansion(&sigma).map_err(|e| e.to_string())?;
                        for h in maps(n_src, n_tgt) {
                            let (left, right) = (hom(&reduct, l, &h), hom(&lp, &expansion, &h));
                            ensure!(left == right, "σ = {image:?}, h = {h:?}: {left} for Λ′|σ → Λ, {right} for Λ′ → Λ^σ\n{lp:?}\n{l:?}");
                            arrows += 1;
                        }
                    }
                }
                for l in single_transitions(&a, n_tgt) {
                    let back = l.cofree_expansion(&sigma).and_then(|e| e.reduct(&sigma)).map_err(|e| e.to_string())?;
                    let id: Vec<usize> = (0..n_tgt).collect();
                    ensure!(hom(&back, &l, &id), "the counit is not a homomorphism for {l:?}");
                    counits += 1;
                }
            }
        }
    }
    let products = product_universality()?;
    Ok(format!(
        "{arrows} (Λ′, Λ, σ, h) cases of the cofree universal arrow over {morphisms} signature morphisms, \
         {counits} counits; {products} (Λ′, Λ1, Λ2, h1, h2) cases with a unique mediating morphism"
    ))
}

fn product_universality() -> Result<usize, String> {
    let mut cases = 0;
    for k in 1..=2 {
        let sig = opaque(&["a", "b"][..k]);
        for (n1, n2, np) in [(1, 1, 1), (1, 2, 2), (2, 1, 2), (2, 2, 1), (2, 2, 2)] {
            for ((lp, firsts), (_, seconds)) in decomposed(&sig, &sig, np, n1).into_iter().zip(decomposed(&sig, &sig, np, n2)) {
                for (l1, l2) in firsts.iter().flat_map(|l1| seconds.iter().map(move |l2| (l1, l2))) {
                    let p = MullerAutomaton::product(&[l1, l2]).map_err(|e| e.to_string())?;
                    let FinalFamily::Product(parts) = p.family() else { return Err("product without projections".into()) };
                    let (pi1, pi2) = (&parts[0].projection, &parts[1].projection);
                    ensure!(p.states().len() == n1 * n2, "product of {n1} and {n2} states has {}", p.states().len());
                    ensure!(hom(&p, l1, pi1) && hom(&p, l2, pi2), "a projection is not a homomorphism");
                    for h1 in maps(np, n1) {
                        let ok1 = hom(&lp, l1, &h1);
                        for h2 in maps(np, n2) {
                            let ok2 = hom(&lp, l2, &h2);
                            let mediating: Vec<Vec<usize>> = maps(np, p.states().len())
                                .into_iter()
                                .filter(|m| m.iter().zip(&h1).all(|(&s, &t)| pi1[s] == t) && m.iter().zip(&h2).all(|(&s, &t)| pi2[s] == t))
                                .collect();
                            ensure!(mediating.len() == 1, "{} maps mediate {h1:?}, {h2:?}", mediating.len());
                            let okm = hom(&lp, &p, &mediating[0]);
                            ensure!(okm == (ok1 && ok2), "⟨{h1:?}, {h2:?}⟩ is {okm}, components {ok1} and {ok2}\n{lp:?}\n{l1:?}\n{l2:?}");
                            cases += 1;
                        }
                    }
                }
            }
        }
    }
    Ok(cases)
}
