//! Worked examples: the journey-planner networks and the integer-division
//! derivation.
//!
//! Λ_m, Λ_C, Λ_JP and the network shapes follow the worked examples. The Map
//! Services, Transport System and Traveller automata are fixtures of our own,
//! built to satisfy their interface formulas and to drive the Traveller query.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::arn::{qualify, Arn, ArnSpec, Connection, Port, ProcessEdge};
use crate::engine::{ArnScheme, Clause, PexprScheme, Query, Repository, ScriptStep};
use crate::ltl::Ltl;
use crate::muller::{FinalFamily, MullerAutomaton, Predicate};
use crate::pexpr::{hoare_module, Cond, ModuleKind, ModuleParams, PSpec, PTerm, Position};
use crate::sigcat::{ActionSignature, SignatureMorphism};

fn formula(s: &str) -> Ltl {
    s.parse().expect("corpus formula")
}

/// Request/reply channel for one message: a publication is delivered in the
/// very next step, and no new publication happens before that.
pub fn lambda_m(m: &str) -> MullerAutomaton {
    let sig: ActionSignature = [format!("{m}!"), format!("{m}?")].iter().map(|s| s.parse().unwrap()).collect();
    let (p, d) = (format!("{m}!"), format!("{m}?"));
    MullerAutomaton::from_names(
        sig,
        &["q0", "q1"],
        &["q0"],
        &[
            ("q0", &format!("!{p}"), "q0"),
            ("q0", &p, "q1"),
            ("q1", &format!("{p} & {d}"), "q1"),
            ("q1", &format!("!{p} & {d}"), "q0"),
        ],
        FinalFamily::all_nonempty(),
    )
    .expect("corpus automaton")
}

/// The channel automaton over `messages`: the product of one `lambda_m` per message.
pub fn channel_automaton(messages: &[&str]) -> MullerAutomaton {
    let set: BTreeSet<String> = messages.iter().map(|m| m.to_string()).collect();
    let sig = Connection::channel_actions(&set);
    let parts: Vec<MullerAutomaton> = messages
        .iter()
        .map(|m| {
            let a = lambda_m(m);
            let incl = SignatureMorphism::inclusion(a.signature(), &sig).expect("sub-signature");
            a.cofree_expansion(&incl).expect("expansion")
        })
        .collect();
    let refs: Vec<&MullerAutomaton> = parts.iter().collect();
    MullerAutomaton::product(&refs).expect("common signature")
}

fn process(
    points: &BTreeMap<String, Port>,
    incident: &[&str],
    states: &[&str],
    transitions: &[(&str, &str, &str)],
    family: FinalFamily,
) -> ProcessEdge {
    let sig: ActionSignature = incident.iter().flat_map(|x| qualify(x, &points[*x].actions()).iter().cloned().collect::<Vec<_>>()).collect();
    let automaton = MullerAutomaton::from_names(sig, states, &states[..1], transitions, family).expect("corpus automaton");
    ProcessEdge { points: incident.iter().map(|x| x.to_string()).collect(), automaton }
}

fn connection(messages: &[&str], attachments: &[(&str, &[(&str, &str)])]) -> Connection {
    Connection {
        messages: messages.iter().map(|m| m.to_string()).collect(),
        attachments: attachments
            .iter()
            .map(|(x, mu)| (x.to_string(), mu.iter().map(|(m, t)| (m.to_string(), t.to_string())).collect()))
            .collect(),
        automaton: channel_automaton(messages),
    }
}

fn implies(when: usize, then: usize) -> FinalFamily {
    FinalFamily::Predicate(Predicate::Implies { when, then })
}

/// Λ_JP: receive a request, ask for routes, collect routes and timetables in
/// either order, answer with directions.
fn journey_planner_process(points: &BTreeMap<String, Port>, jp1: &str, jp2: &str) -> ProcessEdge {
    let g = |s: &str| s.replace("JP1", jp1).replace("JP2", jp2);
    let t = [
        ("q0", g("!JP1.planJourney?"), "q0"),
        ("q0", g("JP1.planJourney?"), "q1"),
        ("q1", g("JP2.getRoutes!"), "q2"),
        ("q2", g("!JP2.routes? & !JP2.timetables?"), "q2"),
        ("q2", g("JP2.routes? & JP2.timetables?"), "q5"),
        ("q2", g("!JP2.routes? & JP2.timetables?"), "q4"),
        ("q2", g("JP2.routes? & !JP2.timetables?"), "q3"),
        ("q3", g("!JP2.timetables?"), "q3"),
        ("q3", g("JP2.timetables?"), "q5"),
        ("q4", g("!JP2.routes?"), "q4"),
        ("q4", g("JP2.routes?"), "q5"),
        ("q5", g("!JP1.directions!"), "q5"),
        ("q5", g("JP1.directions!"), "q0"),
    ];
    let t: Vec<(&str, &str, &str)> = t.iter().map(|(p, g, q)| (*p, g.as_str(), *q)).collect();
    // Final sets contain q0 whenever they contain q5.
    process(points, &[jp1, jp2], &["q0", "q1", "q2", "q3", "q4", "q5"], &t, implies(5, 0))
}

/// Answers every `getRoutes` request with `routes`, eventually.
fn map_services_process(points: &BTreeMap<String, Port>, x: &str) -> ProcessEdge {
    let t = [
        ("q0", format!("!{x}.getRoutes?"), "q0"),
        ("q0", format!("{x}.getRoutes?"), "q1"),
        ("q1", format!("!{x}.routes!"), "q1"),
        ("q1", format!("{x}.routes!"), "q0"),
    ];
    let t: Vec<(&str, &str, &str)> = t.iter().map(|(p, g, q)| (*p, g.as_str(), *q)).collect();
    process(points, &[x], &["q0", "q1"], &t, implies(1, 0))
}

/// Answers every delivery of `routes` with `timetables`, eventually.
fn transport_system_process(points: &BTreeMap<String, Port>, x: &str) -> ProcessEdge {
    let t = [
        ("q0", format!("!{x}.routes?"), "q0"),
        ("q0", format!("{x}.routes?"), "q1"),
        ("q1", format!("!{x}.timetables!"), "q1"),
        ("q1", format!("{x}.timetables!"), "q0"),
    ];
    let t: Vec<(&str, &str, &str)> = t.iter().map(|(p, g, q)| (*p, g.as_str(), *q)).collect();
    process(points, &[x], &["q0", "q1"], &t, implies(1, 0))
}

fn jp_ports() -> [(&'static str, Port); 2] {
    [
        ("JP1", Port::new(["directions"], ["planJourney"])),
        ("JP2", Port::new(["getRoutes"], ["routes", "timetables"])),
    ]
}

fn routes_port() -> Port {
    Port::new(["routes"], ["getRoutes"])
}

fn timetables_port() -> Port {
    Port::new(["timetables"], ["routes"])
}

fn jp_connection(r1: &str, r2: &str) -> Connection {
    connection(
        &["g", "r", "t"],
        &[
            ("JP2", &[("g", "getRoutes"), ("r", "routes"), ("t", "timetables")]),
            (r1, &[("g", "getRoutes"), ("r", "routes")]),
            (r2, &[("r", "routes"), ("t", "timetables")]),
        ],
    )
}

/// The JourneyPlanner network: process JP and connection C, with requires-points R1, R2.
pub fn journey_planner() -> Arn {
    let mut n = Arn::new("JourneyPlanner");
    n.points.extend(jp_ports().map(|(x, p)| (x.to_string(), p)));
    n.points.insert("R1".into(), routes_port());
    n.points.insert("R2".into(), timetables_port());
    n.processes.insert("JP".into(), journey_planner_process(&n.points, "JP1", "JP2"));
    n.connections.insert("C".into(), jp_connection("R1", "R2"));
    n
}

/// The Map Services network: process MS on its single provides-point MS1.
pub fn map_services() -> Arn {
    let mut n = Arn::new("MapServices");
    n.points.insert("MS1".into(), routes_port());
    n.processes.insert("MS".into(), map_services_process(&n.points, "MS1"));
    n
}

/// The Transport System network: process TS on its single provides-point TS1.
pub fn transport_system() -> Arn {
    let mut n = Arn::new("TransportSystem");
    n.points.insert("TS1".into(), timetables_port());
    n.processes.insert("TS".into(), transport_system_process(&n.points, "TS1"));
    n
}

/// JourneyPlanner with R1 and R2 bound to Map Services and Transport System.
pub fn journey_planner_net() -> Arn {
    let mut n = Arn::new("JourneyPlannerNet");
    n.points.extend(jp_ports().map(|(x, p)| (x.to_string(), p)));
    n.points.insert("MS1".into(), routes_port());
    n.points.insert("TS1".into(), timetables_port());
    n.processes.insert("JP".into(), journey_planner_process(&n.points, "JP1", "JP2"));
    n.processes.insert("MS".into(), map_services_process(&n.points, "MS1"));
    n.processes.insert("TS".into(), transport_system_process(&n.points, "TS1"));
    n.connections.insert("C".into(), jp_connection("MS1", "TS1"));
    n
}

/// The Traveller client: process T asks for a route and waits for it.
pub fn traveller() -> Arn {
    let mut n = Arn::new("Traveller");
    n.points.insert("T1".into(), Port::new(["getRoute"], ["route"]));
    n.points.insert("R1".into(), Port::new(["route"], ["getRoute"]));
    let t = [
        ("q0", "!T1.getRoute!", "q0"),
        ("q0", "T1.getRoute!", "q1"),
        ("q1", "!T1.route?", "q1"),
        ("q1", "T1.route?", "q0"),
    ];
    n.processes.insert("T".into(), process(&n.points, &["T1"], &["q0", "q1"], &t, FinalFamily::all_nonempty()));
    n.connections.insert(
        "C".into(),
        connection(
            &["getRoute", "route"],
            &[("T1", &[("getRoute", "getRoute"), ("route", "route")]), ("R1", &[("getRoute", "getRoute"), ("route", "route")])],
        ),
    );
    n
}

/// `G(planJourney? -> F directions!)`
pub fn rho_jp() -> Ltl {
    formula("G(planJourney? -> F directions!)")
}

/// `G(getRoutes? -> F routes!)`
pub fn rho_jp1() -> Ltl {
    formula("G(getRoutes? -> F routes!)")
}

/// `G(routes? -> F timetables!)`
pub fn rho_jp2() -> Ltl {
    formula("G(routes? -> F timetables!)")
}

/// `G(getRoute? -> F route!)`
pub fn rho_t1() -> Ltl {
    formula("G(getRoute? -> F route!)")
}

pub fn rho_ms() -> Ltl {
    rho_jp1()
}

pub fn rho_ts() -> Ltl {
    rho_jp2()
}

/// The message correspondence binding the Traveller's R1 to JP1.
pub fn traveller_hint() -> BTreeMap<String, String> {
    [("getRoute", "planJourney"), ("route", "directions")].iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()
}

pub fn jp_provides() -> ArnSpec {
    ArnSpec::new("JP1", rho_jp())
}

pub fn jp_requires() -> Vec<ArnSpec> {
    vec![ArnSpec::new("R1", rho_jp1()), ArnSpec::new("R2", rho_jp2())]
}

pub fn traveller_query() -> Query<ArnScheme> {
    Query { orc: Arc::new(traveller()), requires: vec![ArnSpec::new("R1", rho_t1())] }
}

pub fn journey_planner_clause() -> Clause<ArnScheme> {
    Clause { name: "JourneyPlanner".into(), orc: Arc::new(journey_planner()), provides: jp_provides(), requires: jp_requires() }
}

pub fn map_services_clause() -> Clause<ArnScheme> {
    Clause { name: "MapServices".into(), orc: Arc::new(map_services()), provides: ArnSpec::new("MS1", rho_ms()), requires: vec![] }
}

pub fn transport_system_clause() -> Clause<ArnScheme> {
    Clause { name: "TransportSystem".into(), orc: Arc::new(transport_system()), provides: ArnSpec::new("TS1", rho_ts()), requires: vec![] }
}

/// Journey Planner (with the Traveller correspondence as its hint), Map
/// Services and Transport System, in that order.
pub fn services_repository() -> Repository<ArnScheme> {
    let mut r = Repository::new();
    r.push(journey_planner_clause(), Some(traveller_hint()));
    r.push(map_services_clause(), None);
    r.push(transport_system_clause(), None);
    r
}

pub const DIVISION: &str = "q := 0 ; r := x ; while y <= r do q := q + 1 ; r := r - y done";

/// The sixteen specifications of the division derivation, as (pre, post).
pub const DIVISION_SPECS: [(&str, &str); 16] = [
    ("true", "[x = q * y + r] & [r < y]"),
    ("true", "[x = q * y + r] & [r < y]"),
    ("true", "[x = q * y + r]"),
    ("[x = q * y + r]", "[x = q * y + r] & [r < y]"),
    ("true", "[x = q * y + r]"),
    ("true", "[x = q * y + x]"),
    ("[x = q * y + x]", "[x = q * y + r]"),
    ("[x = 0 * y + x]", "[x = q * y + x]"),
    ("[x = q * y + x]", "[x = q * y + r]"),
    ("[x = q * y + r]", "[x = q * y + r] & ![y <= r]"),
    ("[x = q * y + r] & [y <= r]", "[x = q * y + r]"),
    ("[x = (q + 1) * y + (r - y)]", "[x = q * y + r]"),
    ("[x = (q + 1) * y + (r - y)]", "[x = q * y + (r - y)]"),
    ("[x = q * y + (r - y)]", "[x = q * y + r]"),
    ("[x = (q + 1) * y + (r - y)]", "[x = q * y + (r - y)]"),
    ("[x = q * y + (r - y)]", "[x = q * y + r]"),
];

/// Pairs `(i, j)` of 1-based indices into [`DIVISION_SPECS`] such that spec
/// `j` (a module's provides-spec) refines spec `i`.
pub const DIVISION_REFINEMENTS: [(usize, usize); 8] = [(1, 2), (3, 5), (6, 8), (7, 9), (4, 10), (11, 12), (13, 15), (14, 16)];

fn cond(s: &str) -> Cond {
    s.parse().expect("corpus condition")
}

/// The module instances of the division derivation, in script order:
/// clause name, selected position, kind and parameters.
pub fn division_modules() -> Vec<(&'static str, &'static str, ModuleKind, ModuleParams)> {
    let seq = |pre: &str, mid: &str, post: &str| ModuleParams { pre: Some(cond(pre)), mid: Some(cond(mid)), post: Some(cond(post)), ..Default::default() };
    let assign = |x: &str, e: &str, rho: &str| ModuleParams {
        var: Some(x.into()),
        expr: Some(e.parse().expect("corpus expression")),
        assertion: Some(cond(rho)),
        ..Default::default()
    };
    vec![
        ("split", "ε", ModuleKind::Seq, seq("true", "[x = q * y + r]", "[x = q * y + r] & [r < y]")),
        ("establish", "0", ModuleKind::Seq, seq("true", "[x = q * y + x]", "[x = q * y + r]")),
        ("init-q", "0.0", ModuleKind::Assign, assign("q", "0", "[x = v * y + x]")),
        ("init-r", "0.1", ModuleKind::Assign, assign("r", "x", "[x = q * y + v]")),
        (
            "loop",
            "1",
            ModuleKind::While,
            ModuleParams { guard: Some(cond("y <= r")), invariant: Some(cond("[x = q * y + r]")), ..Default::default() },
        ),
        ("body", "1.0", ModuleKind::Seq, seq("[x = (q + 1) * y + (r - y)]", "[x = q * y + (r - y)]", "[x = q * y + r]")),
        ("incr-q", "1.0.0", ModuleKind::Assign, assign("q", "q + 1", "[x = v * y + (r - y)]")),
        ("decr-r", "1.0.1", ModuleKind::Assign, assign("r", "r - y", "[x = q * y + v]")),
    ]
}

/// The division query: a single program variable required to satisfy the
/// first spec, with `1 <= y` as its pre-condition so that every run
/// terminates.
pub fn division_query() -> Query<PexprScheme> {
    let post = cond(DIVISION_SPECS[0].1);
    Query { orc: PTerm::pvar("t"), requires: vec![PSpec::new(Position::root(), cond("[1 <= y]"), post)] }
}

pub fn division_repository() -> Repository<PexprScheme> {
    let mut r = Repository::new();
    for (name, _, kind, params) in division_modules() {
        let m = hoare_module(kind, &params).expect("corpus module");
        r.push(Clause { name: name.into(), orc: m.orc, provides: m.provides, requires: m.requires }, None);
    }
    r
}

pub fn division_script() -> Vec<ScriptStep<PexprScheme>> {
    division_modules().into_iter().map(|(name, at, _, _)| ScriptStep { select: at.into(), clause: name.into(), hint: None }).collect()
}
