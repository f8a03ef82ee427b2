//! Seeded random instances: automata, lassos, formulas, and small
//! repositories for both schemes.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha8Rng;
use solp::arn::{qualify, Arn, ArnSpec, Connection, Port, ProcessEdge};
use solp::corpus::channel_automaton;
use solp::engine::{ArnScheme, Clause, PexprScheme, Query, Repository};
use solp::ltl::{self, Ltl};
use solp::muller::{FinalFamily, Guard, Lasso, MullerAutomaton, Transition};
use solp::pexpr::{hoare_module, AExp, CmpOp, Cond, ModuleKind, ModuleParams, PSpec, Position};
use solp::sigcat::{Action, ActionSignature, Letter};

pub type Rng = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn opaque(names: &[&str]) -> ActionSignature {
    names.iter().map(|n| Action::opaque(*n)).collect()
}

/// The guard whose truth table over the letters of `sig` (indexed by mask)
/// is `table`.
pub fn guard_from_table(table: u64, sig: &ActionSignature) -> Guard {
    let minterm = |m: u64| {
        Guard::and(sig.iter().enumerate().map(|(i, a)| {
            let atom = Guard::Atom(a.clone());
            if m >> i & 1 == 1 {
                atom
            } else {
                Guard::not(atom)
            }
        }))
    };
    Guard::or((0..1u64 << sig.len()).filter(|m| table >> m & 1 == 1).map(minterm))
}

pub fn random_guard(rng: &mut Rng, sig: &ActionSignature, depth: usize) -> Guard {
    if sig.is_empty() {
        return if rng.gen_bool(0.8) { Guard::True } else { Guard::False };
    }
    if depth == 0 || rng.gen_bool(0.3) {
        return match rng.gen_range(0..10) {
            0 => Guard::True,
            1 => Guard::False,
            2..=5 => Guard::not(Guard::Atom(sig.get(rng.gen_range(0..sig.len())).clone())),
            _ => Guard::Atom(sig.get(rng.gen_range(0..sig.len())).clone()),
        };
    }
    if rng.gen_bool(0.3) {
        return guard_from_table(rng.gen_range(0..1u64 << (1 << sig.len())), sig);
    }
    let (l, r) = (random_guard(rng, sig, depth - 1), random_guard(rng, sig, depth - 1));
    match rng.gen_range(0..3) {
        0 => Guard::and([l, r]),
        1 => Guard::or([l, r]),
        _ => Guard::not(l),
    }
}

fn random_subset(rng: &mut Rng, n: usize) -> BTreeSet<usize> {
    let mask = rng.gen_range(1..1u64 << n);
    (0..n).filter(|i| mask >> i & 1 == 1).collect()
}

/// An automaton with `1..=max_states` states and an explicit family of up to
/// three sets.
pub fn random_automaton(rng: &mut Rng, sig: &ActionSignature, max_states: usize) -> MullerAutomaton {
    let n = rng.gen_range(1..=max_states);
    let initial = if rng.gen_bool(0.1) { BTreeSet::new() } else { random_subset(rng, n) };
    let mut transitions: Vec<Transition> = (0..rng.gen_range(0..=3 * n))
        .map(|_| Transition { source: rng.gen_range(0..n), guard: random_guard(rng, sig, 1), target: rng.gen_range(0..n) })
        .collect();
    // Self-loops and singleton sets make non-empty languages common.
    for q in 0..n {
        if rng.gen_bool(0.3) {
            transitions.push(Transition { source: q, guard: random_guard(rng, sig, 1), target: q });
        }
    }
    let family = (0..rng.gen_range(0..=3))
        .map(|_| if rng.gen_bool(0.4) { BTreeSet::from([rng.gen_range(0..n)]) } else { random_subset(rng, n) })
        .collect();
    let states = (0..n).map(|i| format!("q{i}")).collect();
    MullerAutomaton::new(sig.clone(), states, initial, transitions, FinalFamily::Explicit(family)).unwrap()
}

pub fn random_letter(rng: &mut Rng, sig: &ActionSignature) -> Letter {
    sig.decode(rng.gen_range(0..1u64 << sig.len()))
}

pub fn random_lasso(rng: &mut Rng, sig: &ActionSignature, max_prefix: usize, max_cycle: usize) -> Lasso {
    let prefix = (0..rng.gen_range(0..=max_prefix)).map(|_| random_letter(rng, sig)).collect();
    let cycle = (0..rng.gen_range(1..=max_cycle)).map(|_| random_letter(rng, sig)).collect();
    Lasso { prefix, cycle }
}

/// A formula of depth at most `depth` over `atoms`.
pub fn random_formula(rng: &mut Rng, atoms: &[Action], depth: usize) -> Ltl {
    if depth == 0 || rng.gen_bool(0.25) {
        return match rng.gen_range(0..12) {
            0 => Ltl::tt(),
            1 => Ltl::ff(),
            _ => Ltl::atom(atoms.choose(rng).unwrap().clone()),
        };
    }
    let mut sub = || random_formula(rng, atoms, depth - 1);
    let (f, g) = (sub(), sub());
    match rng.gen_range(0..8) {
        0 => Ltl::not(f),
        1 => Ltl::next(f),
        2 => Ltl::eventually(f),
        3 => Ltl::always(f),
        4 => Ltl::and([f, g]),
        5 => Ltl::or([f, g]),
        6 => Ltl::implies(f, g),
        _ => Ltl::until(f, g),
    }
}

fn formula(s: &str) -> Ltl {
    s.parse().unwrap()
}

// Random request/reply services. A service of type `t` answers `req{t}`
// with `rep{t}`; clients publish the request and receive the reply.

fn server_port(t: usize) -> Port {
    Port::new([format!("rep{t}").as_str()], [format!("req{t}").as_str()])
}

fn client_port(t: usize) -> Port {
    Port::new([format!("req{t}").as_str()], [format!("rep{t}").as_str()])
}

fn process(rng: &mut Rng, points: &BTreeMap<String, Port>, incident: &[&str]) -> ProcessEdge {
    let sig: ActionSignature = incident.iter().flat_map(|x| qualify(x, &points[*x].actions()).iter().cloned().collect::<Vec<_>>()).collect();
    let mut a = random_automaton(rng, &sig, 3);
    // Mostly live processes: let every state idle, and accept every recurrence set half of the time.
    let idle = Guard::and(sig.iter().map(|x| Guard::not(Guard::Atom(x.clone()))));
    let mut transitions = a.transitions().to_vec();
    transitions.extend((0..a.states().len()).map(|q| Transition { source: q, guard: idle.clone(), target: q }));
    let family = if rng.gen_bool(0.5) { FinalFamily::all_nonempty() } else { a.family().clone() };
    let initial = if a.initial().is_empty() { BTreeSet::from([0]) } else { a.initial().clone() };
    a = MullerAutomaton::new(sig, a.states().to_vec(), initial, transitions, family).unwrap();
    ProcessEdge { points: incident.iter().map(|x| x.to_string()).collect(), automaton: a }
}

fn link(t: usize, ends: [&str; 2]) -> Connection {
    let (req, rep) = (format!("req{t}"), format!("rep{t}"));
    let identity: BTreeMap<String, String> = [(req.clone(), req.clone()), (rep.clone(), rep.clone())].into();
    Connection {
        messages: [req.clone(), rep.clone()].into(),
        attachments: ends.iter().map(|x| (x.to_string(), identity.clone())).collect(),
        automaton: channel_automaton(&[&req, &rep]),
    }
}

/// Candidate interface formulas for a server of type `t`.
fn server_formula(rng: &mut Rng, t: usize) -> Ltl {
    let (req, rep) = (format!("req{t}?"), format!("rep{t}!"));
    let templates = [
        format!("G({req} -> F {rep})"),
        format!("G F {rep}"),
        format!("F G !{rep}"),
        format!("G({rep} -> X !{rep})"),
        format!("G !{rep}"),
        format!("G({rep} -> {req})"),
        format!("!{rep} U {req}"),
        format!("G({req} -> X F {rep})"),
    ];
    if rng.gen_bool(0.5) {
        formula(templates.choose(rng).unwrap())
    } else {
        random_formula(rng, &[req.parse().unwrap(), rep.parse().unwrap()], 3)
    }
}

/// A non-valid formula at `point` that is a property of `net`, if one turns
/// up among a few candidates.
fn provided(rng: &mut Rng, net: &Arn, point: &str, t: usize) -> Option<ArnSpec> {
    for _ in 0..40 {
        let spec = ArnSpec::new(point, server_formula(rng, t));
        if !ltl::is_valid(&spec.formula).unwrap() && net.is_property(&spec).unwrap() {
            return Some(spec);
        }
    }
    None
}

/// A formula entailed by `f`: `f` itself or a weakening.
fn weaken(rng: &mut Rng, f: &Ltl, t: usize) -> Ltl {
    let g = if rng.gen_bool(0.5) { f.clone() } else { Ltl::or([f.clone(), server_formula(rng, t)]) };
    if ltl::is_valid(&g).unwrap() {
        f.clone()
    } else {
        g
    }
}

pub struct ArnInstance {
    pub query: Query<ArnScheme>,
    pub repository: Repository<ArnScheme>,
}

/// A single-server network of type `t`.
fn leaf(rng: &mut Rng, name: &str, t: usize) -> Clause<ArnScheme> {
    loop {
        let mut n = Arn::new(name);
        n.points.insert("S1".into(), server_port(t));
        let p = process(rng, &n.points, &["S1"]);
        n.processes.insert("P".into(), p);
        assert!(n.validate().is_empty(), "{:?}", n.validate());
        if let Some(provides) = provided(rng, &n, "S1", t) {
            return Clause { name: name.into(), orc: Arc::new(n), provides, requires: vec![] };
        }
    }
}

/// A server of type `t` that delegates to a server of type `u` through a
/// requires-point `R`; its provides-spec holds of its own process.
fn relay(rng: &mut Rng, name: &str, t: usize, u: usize, requires: Ltl) -> Clause<ArnScheme> {
    loop {
        let mut own = Arn::new(name);
        own.points.insert("S1".into(), server_port(t));
        own.points.insert("S2".into(), client_port(u));
        let p = process(rng, &own.points, &["S1", "S2"]);
        own.processes.insert("P".into(), p);
        let Some(provides) = provided(rng, &own, "S1", t) else { continue };
        let mut n = own;
        n.points.insert("R".into(), server_port(u));
        n.connections.insert("L".into(), link(u, ["S2", "R"]));
        assert!(n.validate().is_empty(), "{:?}", n.validate());
        return Clause { name: name.into(), orc: Arc::new(n), provides, requires: vec![ArnSpec::new("R", requires)] };
    }
}

pub fn random_arn_instance(rng: &mut Rng) -> ArnInstance {
    let mut clauses = vec![leaf(rng, "Leaf0", 0)];
    if rng.gen_bool(0.5) {
        clauses.push(leaf(rng, "Leaf0b", 0));
    }
    if rng.gen_bool(0.7) {
        let l1 = leaf(rng, "Leaf1", 1);
        let wanted = weaken(rng, &l1.provides.formula, 1);
        clauses.push(l1);
        clauses.push(relay(rng, "Relay", 0, 1, wanted));
    }
    let servers: Vec<&Clause<ArnScheme>> = clauses.iter().filter(|c| c.name != "Leaf1").collect();
    let target = servers.choose(rng).unwrap().provides.formula.clone();
    let wanted = weaken(rng, &target, 0);

    let mut q = Arn::new("Client");
    q.points.insert("C1".into(), client_port(0));
    q.points.insert("R".into(), server_port(0));
    let p = process(rng, &q.points, &["C1"]);
    q.processes.insert("P".into(), p);
    q.connections.insert("L".into(), link(0, ["C1", "R"]));
    assert!(q.validate().is_empty(), "{:?}", q.validate());

    clauses.shuffle(rng);
    let mut repository = Repository::new();
    for c in clauses {
        repository.push(c, None);
    }
    ArnInstance { query: Query { orc: Arc::new(q), requires: vec![ArnSpec::new("R", wanted)] }, repository }
}

// Random straight-line program repositories. Values stay within the check
// bounds, so bounded reasoning is exact on every reachable state.

const VARS: [&str; 3] = ["x", "y", "z"];

fn operand(rng: &mut Rng, vars: &[&str]) -> AExp {
    if rng.gen_bool(0.6) {
        AExp::var(*vars.choose(rng).unwrap())
    } else {
        AExp::Num(rng.gen_range(0..=8))
    }
}

pub fn random_cond(rng: &mut Rng, vars: &[&str], depth: usize) -> Cond {
    if depth == 0 || rng.gen_bool(0.5) {
        let op = [CmpOp::Eq, CmpOp::Le, CmpOp::Lt].choose(rng).copied().unwrap();
        return Cond::cmp(op, AExp::var(*vars.choose(rng).unwrap()), operand(rng, vars));
    }
    let (l, r) = (random_cond(rng, vars, depth - 1), random_cond(rng, vars, depth - 1));
    match rng.gen_range(0..3) {
        0 => Cond::and(l, r),
        1 => Cond::or(l, r),
        _ => Cond::not(l),
    }
}

fn module(name: String, kind: ModuleKind, params: ModuleParams) -> Clause<PexprScheme> {
    let m = hoare_module(kind, &params).unwrap();
    Clause { name, orc: m.orc, provides: m.provides, requires: m.requires }
}

fn assign(name: String, x: &str, e: AExp, post: &Cond) -> Clause<PexprScheme> {
    let assertion = post.substitute(x, &AExp::var("v"));
    module(name, ModuleKind::Assign, ModuleParams { var: Some(x.into()), expr: Some(e), assertion: Some(assertion), ..Default::default() })
}

fn seq(name: String, pre: Cond, mid: Cond, post: Cond) -> Clause<PexprScheme> {
    module(name, ModuleKind::Seq, ModuleParams { pre: Some(pre), mid: Some(mid), post: Some(post), ..Default::default() })
}

pub struct PexprInstance {
    pub query: Query<PexprScheme>,
    pub repository: Repository<PexprScheme>,
}

/// A query for `x1 := e1 ; ... ; xk := ek` against its weakest precondition,
/// with the modules of that derivation mixed with distractor modules.
pub fn random_pexpr_instance(rng: &mut Rng) -> PexprInstance {
    let k = rng.gen_range(2..=3);
    let program: Vec<(&str, AExp)> = (0..k).map(|_| (*VARS.choose(rng).unwrap(), operand(rng, &VARS))).collect();
    let mut conds = vec![random_cond(rng, &VARS, 1)];
    for (x, e) in program.iter().rev() {
        let before = conds.last().unwrap().substitute(x, e);
        conds.push(before);
    }
    conds.reverse();
    let mut clauses = Vec::new();
    for (i, (x, e)) in program.iter().enumerate() {
        clauses.push(assign(format!("assign-{i}"), x, e.clone(), &conds[i + 1]));
    }
    clauses.push(seq("seq-0".into(), conds[0].clone(), conds[1].clone(), conds[k].clone()));
    if k == 3 {
        clauses.push(seq("seq-1".into(), conds[1].clone(), conds[2].clone(), conds[3].clone()));
    }
    for i in 0..rng.gen_range(1..=4) {
        let name = format!("extra-{i}");
        let c = match rng.gen_range(0..4) {
            0 => assign(name, VARS.choose(rng).unwrap(), operand(rng, &VARS), &random_cond(rng, &VARS, 1)),
            1 => seq(name, random_cond(rng, &VARS, 1), random_cond(rng, &VARS, 1), random_cond(rng, &VARS, 1)),
            2 => module(name, ModuleKind::Skip, ModuleParams { assertion: Some(random_cond(rng, &VARS, 1)), ..Default::default() }),
            _ => module(
                name,
                ModuleKind::If,
                ModuleParams {
                    guard: Some(random_cond(rng, &VARS, 0)),
                    pre: Some(random_cond(rng, &VARS, 1)),
                    post: Some(random_cond(rng, &VARS, 1)),
                    ..Default::default()
                },
            ),
        };
        clauses.push(c);
    }
    clauses.shuffle(rng);
    let mut repository = Repository::new();
    for c in clauses {
        repository.push(c, None);
    }
    let pre = if rng.gen_bool(0.5) { conds[0].clone() } else { Cond::and(conds[0].clone(), random_cond(rng, &VARS, 0)) };
    let query = Query { orc: solp::pexpr::PTerm::pvar("t"), requires: vec![PSpec::new(Position::root(), pre, conds[k].clone())] };
    PexprInstance { query, repository }
}
