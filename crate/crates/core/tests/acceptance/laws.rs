//! The satisfaction condition, reflection of language inclusion along
//! automaton homomorphisms, and preservation of properties along morphisms
//! of ground orchestrations.

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;
use solp::arn::{Arn, ArnMorphism, ArnSpec};
use solp::corpus::{self, DIVISION, DIVISION_SPECS};
use solp::engine::{Answer, ArnScheme, Check, PexprScheme, Scheme};
use solp::ltl::{self, Ltl};
use solp::muller::{FinalFamily, Guard, MullerAutomaton, Transition};
use solp::pexpr::{PMorphism, PSpec, PSubstitution, PTerm, Position};
use solp::sigcat::{Action, SignatureMorphism};

use crate::derivations::{arn_derivations, pexpr_derivations, Derived};
use crate::gen::{self, opaque, Rng as GenRng};

pub fn laws() -> Result<String, String> {
    let arn = arn_derivations();
    let pexpr = pexpr_derivations();
    let sat = satisfaction(&arn, &pexpr)?;
    let refl = reflection()?;
    let pres = preservation(&arn, &pexpr)?;
    Ok(format!("satisfaction: {sat}; reflection: {refl}; preservation: {pres}"))
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// `θ1 ; θ2 ; ...` starting from `o`.
fn chain<S: Scheme>(scheme: &S, o: &S::Orc, ms: &[&S::Morphism]) -> S::Morphism {
    ms.iter().fold(scheme.identity(o), |acc, m| scheme.compose(&acc, m).expect("composable"))
}

fn query_maps<S: Scheme>(a: &Answer<S>) -> Vec<&S::Morphism> {
    a.steps.iter().map(|s| &s.unifier.query_map).collect()
}

/// The port map of `m` at `x`, as a signature morphism between port actions.
fn port_map(m: &ArnMorphism, x: &str) -> SignatureMorphism {
    let y = m.point(x).unwrap();
    let source = m.source.points[x].actions();
    let map = source.iter().map(|a| (a.clone(), Action { name: m.messages[x][&a.name].clone(), ..a.clone() })).collect();
    SignatureMorphism::new(source, m.target.points[y].actions(), map).unwrap()
}

/// `M|σ ⊨ ρ` for the model observed at `σ`'s image point.
fn model_satisfies(m: &ArnMorphism, x: &str, f: &Ltl) -> bool {
    let observed = m.target.observed_automaton(m.point(x).unwrap()).unwrap();
    ltl::holds(&observed.reduct(&port_map(m, x)).unwrap(), f).unwrap()
}

fn port_atoms(n: &Arn, x: &str) -> Vec<Action> {
    n.points[x].actions().iter().cloned().collect()
}

fn satisfaction(arn: &[Derived<ArnScheme>], pexpr: &[Derived<PexprScheme>]) -> Result<String, String> {
    let mut rng = gen::rng(51);

    // Automata: Λ|σ ⊨ ρ iff Λ ⊨ σ(ρ).
    let mut automata: Vec<MullerAutomaton> = vec![corpus::lambda_m("m"), corpus::channel_automaton(&["g", "r"])];
    for n in [corpus::journey_planner(), corpus::map_services(), corpus::transport_system(), corpus::traveller()] {
        automata.extend(n.processes.values().map(|p| p.automaton.clone()));
    }
    automata.push(corpus::journey_planner_net().observed_automaton("JP1").map_err(err)?);
    let sig2 = opaque(&["a", "b"]);
    automata.extend((0..8).map(|_| gen::random_automaton(&mut rng, &sig2, 3)));
    let mut institution = 0;
    for a in &automata {
        let targets: Vec<Action> = a.signature().iter().cloned().collect();
        for _ in 0..12 {
            let k = rng.gen_range(1..=3);
            let source: Vec<Action> = (0..k).map(|i| Action::opaque(format!("x{i}"))).collect();
            let map = source.iter().map(|x| (x.clone(), targets.choose(&mut rng).unwrap().clone())).collect();
            let sigma = SignatureMorphism::new(source.iter().cloned().collect(), a.signature().clone(), map).map_err(err)?;
            let rho = gen::random_formula(&mut rng, &source, 3);
            let left = ltl::holds(&a.reduct(&sigma).map_err(err)?, &rho).map_err(err)?;
            let right = ltl::holds(a, &rho.translate(&sigma).map_err(err)?).map_err(err)?;
            ensure!(left == right, "Λ|σ ⊨ {rho} is {left}, Λ ⊨ σ(ρ) is {right}");
            institution += 1;
        }
    }

    // Networks: for each derivation θ followed by δ into the final network,
    // δ ⊨ θ(ρ) iff θ;δ ⊨ ρ, with models read off the observed automata.
    let scheme = ArnScheme::default();
    let mut network_triples = 0;
    for d in arn {
        for a in &d.answers {
            let maps = query_maps(a);
            for k in 0..=maps.len() {
                let theta = chain(&scheme, &a.query.orc, &maps[..k]);
                let delta = chain(&scheme, &theta.target, &maps[k..]);
                let both = theta.then(&delta).map_err(err)?;
                for s in &a.query.requires {
                    let mut specs = vec![s.formula.clone()];
                    specs.extend((0..3).map(|_| gen::random_formula(&mut rng, &port_atoms(&a.query.orc, &s.point), 2)));
                    for f in specs {
                        let mid = theta.translate_spec(&ArnSpec::new(s.point.as_str(), f.clone())).map_err(err)?;
                        let left = model_satisfies(&delta, &mid.point, &mid.formula);
                        let right = model_satisfies(&both, &s.point, &f);
                        let direct = both.target.is_property(&both.translate_spec(&ArnSpec::new(s.point.as_str(), f.clone())).map_err(err)?).map_err(err)?;
                        ensure!(left == right && right == direct, "{}: ⟨{}, {f}⟩ split after {k} steps: {left}, {right}, {direct}", d.label, s.point);
                        network_triples += 1;
                    }
                }
            }
        }
    }

    // Programs: a spec holds of the subprogram that θ;δ points at iff its
    // translation holds of the final program.
    let pscheme = PexprScheme { fuel: 1000, ..Default::default() };
    let mut program_triples = 0;
    for d in pexpr {
        for a in &d.answers {
            let maps = query_maps(a);
            for k in 0..=maps.len() {
                let theta = chain(&pscheme, &a.query.orc, &maps[..k]);
                let delta = chain(&pscheme, &theta.target, &maps[k..]);
                let both = theta.then(&delta).map_err(err)?;
                for s in &a.query.requires {
                    let via_mid = delta.translate(&theta.translate(s).map_err(err)?).map_err(err)?;
                    let direct = both.translate(s).map_err(err)?;
                    ensure!(via_mid == direct, "{}: translations differ after {k} steps", d.label);
                    let sub = both.target.subterm_at(&direct.position).map_err(err)?.clone();
                    let local = pscheme.is_property(&sub, &PSpec::new(Position::root(), s.pre.clone(), s.post.clone())).map_err(err)?;
                    let global = pscheme.is_property(&both.target, &direct).map_err(err)?;
                    ensure!(local == global, "{}: {s} after {k} steps: {local:?} locally, {global:?} in place", d.label);
                    program_triples += 1;
                }
            }
        }
    }
    Ok(format!(
        "{institution} (Λ, σ, ρ) triples on {} automata, {network_triples} (θ, δ, ρ) network triples, {program_triples} program triples",
        automata.len()
    ))
}

/// An automaton with a homomorphism `h` into `a2`, built by pulling `a2`
/// back along a random state map and strengthening its guards.
fn pull_back(rng: &mut GenRng, a2: &MullerAutomaton) -> (MullerAutomaton, Vec<usize>) {
    let sig = a2.signature().clone();
    let n2 = a2.states().len();
    let n1 = rng.gen_range(1..=4);
    let h: Vec<usize> = (0..n1).map(|_| rng.gen_range(0..n2)).collect();
    let initial = (0..n1).filter(|q| a2.initial().contains(&h[*q]) && rng.gen_bool(0.8)).collect();
    let mut transitions = Vec::new();
    for u in a2.transitions() {
        for p in (0..n1).filter(|&p| h[p] == u.source) {
            for q in (0..n1).filter(|&q| h[q] == u.target) {
                if rng.gen_bool(0.8) {
                    let extra = if rng.gen_bool(0.7) { Guard::True } else { gen::random_guard(rng, &sig, 1) };
                    transitions.push(Transition { source: p, guard: Guard::and([u.guard.clone(), extra]), target: q });
                }
            }
        }
    }
    let family = (1u64..1 << n1)
        .map(|m| (0..n1).filter(|i| m >> i & 1 == 1).collect::<BTreeSet<usize>>())
        .filter(|f| a2.family().contains(&f.iter().map(|&q| h[q]).collect()) && rng.gen_bool(0.8))
        .collect();
    let states = (0..n1).map(|i| format!("p{i}")).collect();
    (MullerAutomaton::new(sig, states, initial, transitions, FinalFamily::Explicit(family)).unwrap(), h)
}

fn reflection() -> Result<String, String> {
    let mut rng = gen::rng(52);
    let (mut nonempty, mut included, mut properties) = (0, 0, 0);
    for i in 0..100 {
        let sig = opaque(&["a", "b"][..rng.gen_range(1..=2)]);
        let atoms: Vec<Action> = sig.iter().cloned().collect();
        // Inclusion is only informative when the target accepts something.
        let a2 = std::iter::repeat_with(|| gen::random_automaton(&mut rng, &sig, 3)).take(20).find(|a| !a.is_empty()).unwrap();
        let (a1, h) = pull_back(&mut rng, &a2);
        ensure!(MullerAutomaton::check_homomorphism(&a1, &a2, &h).map_err(err)?, "instance {i}: {h:?} is not a homomorphism");
        let mut words: Vec<_> = (0..20).map(|_| gen::random_lasso(&mut rng, &sig, 4, 4)).collect();
        if let Some(w) = a1.accepted_lasso() {
            nonempty += 1;
            words.push(w);
        }
        for w in words {
            if a1.accepts(&w).map_err(err)? {
                ensure!(a2.accepts(&w).map_err(err)?, "instance {i}: {w} is accepted by the source only");
                included += 1;
            }
        }
        for _ in 0..10 {
            let f = gen::random_formula(&mut rng, &atoms, 3);
            if ltl::holds(&a2, &f).map_err(err)? {
                ensure!(ltl::holds(&a1, &f).map_err(err)?, "instance {i}: {f} holds of the target only");
                properties += 1;
            }
        }
    }
    Ok(format!(
        "100 homomorphisms ({nonempty} with non-empty source), {included} accepted lassos included, {properties} target properties reflected"
    ))
}

fn preservation(arn: &[Derived<ArnScheme>], pexpr: &[Derived<PexprScheme>]) -> Result<String, String> {
    let mut rng = gen::rng(53);
    let scheme = ArnScheme::default();
    let (mut network_morphisms, mut network_specs) = (0, 0);
    // The morphism from each ground clause network into the final network.
    for d in arn {
        for a in &d.answers {
            let maps = query_maps(a);
            for (k, s) in a.steps.iter().enumerate() {
                let source = s.unifier.clause_map.source.clone();
                if !source.is_ground() {
                    continue;
                }
                let m = s.unifier.clause_map.then(&chain(&scheme, &s.unifier.clause_map.target, &maps[k + 1..])).map_err(err)?;
                ensure!(m.check().is_empty(), "{}: {} is not a morphism", d.label, m);
                let x = s.provides.point.as_str();
                let mut specs = vec![s.provides.formula.clone()];
                specs.extend((0..6).map(|_| gen::random_formula(&mut rng, &port_atoms(&source, x), 3)));
                for f in specs {
                    let spec = ArnSpec::new(x, f);
                    if source.is_property(&spec).map_err(err)? {
                        let image = m.translate_spec(&spec).map_err(err)?;
                        ensure!(m.target.is_property(&image).map_err(err)?, "{}: {spec} is not preserved as {image}", d.label);
                        network_specs += 1;
                    }
                }
                network_morphisms += 1;
            }
        }
    }
    // Identities on the ground networks of the corpus.
    for n in [corpus::map_services(), corpus::transport_system(), corpus::journey_planner_net()] {
        let id = ArnMorphism::identity(Arc::new(n));
        for (x, _) in id.source.points.iter().filter(|(x, _)| id.source.processes.values().any(|p| p.points.contains(*x))) {
            let f = gen::random_formula(&mut rng, &port_atoms(&id.source, x), 2);
            let spec = ArnSpec::new(x.as_str(), f);
            ensure!(id.source.is_property(&spec).map_err(err)? == id.target.is_property(&id.translate_spec(&spec).map_err(err)?).map_err(err)?, "identity");
        }
        network_morphisms += 1;
    }

    // Subprogram morphisms `t|π → t` of ground programs.
    let pscheme = PexprScheme { fuel: 1000, ..Default::default() };
    let division: PTerm = DIVISION.parse().unwrap();
    let mut programs: Vec<PTerm> = vec![division.clone()];
    programs.extend(pexpr.iter().flat_map(|d| d.answers.iter().map(|a| a.fin.orc.clone())).filter(|t| t.is_ground()));
    programs.dedup();
    let vars = ["x", "y", "z", "q", "r"];
    let (mut program_morphisms, mut program_specs, mut inconclusive) = (0, 0, 0);
    for t in &programs {
        for pi in t.positions() {
            let sub = t.subterm_at(&pi).map_err(err)?.clone();
            let m = PMorphism::new(PSubstitution::identity(), pi.clone(), sub.clone(), t.clone()).map_err(err)?;
            let mut specs: Vec<PSpec> = Vec::new();
            if *t == division {
                specs.extend(DIVISION_SPECS.iter().map(|(pre, post)| PSpec::new(Position::root(), pre.parse().unwrap(), post.parse().unwrap())));
            }
            specs.extend((0..6).map(|_| PSpec::new(Position::root(), gen::random_cond(&mut rng, &vars, 1), gen::random_cond(&mut rng, &vars, 1))));
            for s in specs {
                match pscheme.is_property(&sub, &s).map_err(err)? {
                    Check::Holds => {
                        let image = m.translate(&s).map_err(err)?;
                        let v = pscheme.is_property(t, &image).map_err(err)?;
                        ensure!(v == Check::Holds, "{s} holds of `{sub}` but is {v:?} as {image} in `{t}`");
                        program_specs += 1;
                    }
                    Check::Unknown => inconclusive += 1,
                    Check::Fails => {}
                }
            }
            program_morphisms += 1;
        }
    }
    Ok(format!(
        "{network_specs} properties preserved along {network_morphisms} network morphisms, \
         {program_specs} along {program_morphisms} subprogram morphisms ({inconclusive} inconclusive checks skipped)"
    ))
}
