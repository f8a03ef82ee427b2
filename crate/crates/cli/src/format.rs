//! JSON file formats. Formulas, guards, programs, conditions and specs are
//! embedded as surface-syntax strings.
//!
//! Relative paths inside a repository, query or script file are resolved
//! against the directory of that file.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};
use solp::arn::{qualify, Arn, ArnSpec, Connection, Port, ProcessEdge};
use solp::corpus::channel_automaton;
use solp::engine::{ArnScheme, Clause, PexprScheme, Query, Repository, ScriptStep};
use solp::muller::{FinalFamily, MullerAutomaton, Predicate, Transition};
use solp::pexpr::{hoare_module, ModuleKind, ModuleParams, PSpec, PTerm};
use solp::sigcat::ActionSignature;

/// Families of more states than this are not expanded into explicit sets.
const MAX_EXPLICIT_STATES: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkFile {
    pub name: String,
    pub ports: BTreeMap<String, PortFile>,
    #[serde(default)]
    pub processes: BTreeMap<String, ProcessFile>,
    #[serde(default)]
    pub connections: BTreeMap<String, ConnectionFile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PortFile {
    #[serde(default)]
    pub published: BTreeSet<String>,
    #[serde(default)]
    pub delivered: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProcessFile {
    pub points: BTreeSet<String>,
    pub automaton: AutomatonFile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConnectionFile {
    pub messages: BTreeSet<String>,
    /// Point name to (channel message, port message) pairs.
    pub attachments: BTreeMap<String, BTreeMap<String, String>>,
    /// `"channel"` stands for the product of the one-message request/reply
    /// channels.
    pub automaton: ChannelAutomaton,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ChannelAutomaton {
    Keyword(String),
    Explicit(AutomatonFile),
}

/// An automaton whose signature is implied by where it sits in the network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AutomatonFile {
    pub states: Vec<String>,
    pub initial: Vec<String>,
    pub transitions: Vec<TransitionFile>,
    #[serde(rename = "final")]
    pub family: FamilyFile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionFile {
    pub from: String,
    pub guard: String,
    pub to: String,
}

/// `"all-nonempty"`, `"implies(q5->q0)"`, an explicit list of state sets, or
/// `{"meets-all": [...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FamilyFile {
    Keyword(String),
    Sets(Vec<Vec<String>>),
    MeetsAll {
        #[serde(rename = "meets-all")]
        meets_all: Vec<Vec<String>>,
    },
}

fn automaton_from_file(a: &AutomatonFile, sig: ActionSignature) -> Result<MullerAutomaton> {
    let idx = |s: &str| a.states.iter().position(|n| n == s).ok_or_else(|| anyhow!("unknown state `{s}`"));
    let sets = |ss: &[Vec<String>]| -> Result<Vec<BTreeSet<usize>>> {
        ss.iter().map(|s| s.iter().map(|q| idx(q)).collect()).collect()
    };
    let family = match &a.family {
        FamilyFile::Keyword(k) if k == "all-nonempty" => FinalFamily::all_nonempty(),
        FamilyFile::Keyword(k) => {
            let body = k
                .strip_prefix("implies(")
                .and_then(|r| r.strip_suffix(')'))
                .ok_or_else(|| anyhow!("unknown final family `{k}`"))?;
            let (when, then) = body.split_once("->").ok_or_else(|| anyhow!("expected `implies(p->q)`, found `{k}`"))?;
            FinalFamily::Predicate(Predicate::Implies { when: idx(when.trim())?, then: idx(then.trim())? })
        }
        FamilyFile::Sets(ss) => FinalFamily::Explicit(sets(ss)?),
        FamilyFile::MeetsAll { meets_all } => FinalFamily::Predicate(Predicate::MeetsAll(sets(meets_all)?)),
    };
    let initial = a.initial.iter().map(|s| idx(s)).collect::<Result<_>>()?;
    let transitions = a
        .transitions
        .iter()
        .map(|t| {
            let guard = t.guard.parse().with_context(|| format!("guard `{}`", t.guard))?;
            Ok(Transition { source: idx(&t.from)?, guard, target: idx(&t.to)? })
        })
        .collect::<Result<_>>()?;
    Ok(MullerAutomaton::new(sig, a.states.clone(), initial, transitions, family)?)
}

fn family_to_file(a: &MullerAutomaton) -> Result<FamilyFile> {
    let names = |set: &BTreeSet<usize>| set.iter().map(|&q| a.states()[q].clone()).collect::<Vec<_>>();
    Ok(match a.family() {
        FinalFamily::Predicate(Predicate::AllNonEmpty) => FamilyFile::Keyword("all-nonempty".into()),
        FinalFamily::Predicate(Predicate::Implies { when, then }) => {
            FamilyFile::Keyword(format!("implies({}->{})", a.states()[*when], a.states()[*then]))
        }
        FinalFamily::Predicate(Predicate::MeetsAll(sets)) => FamilyFile::MeetsAll { meets_all: sets.iter().map(names).collect() },
        FinalFamily::Explicit(sets) => FamilyFile::Sets(sets.iter().map(names).collect()),
        family @ FinalFamily::Product(_) => {
            let n = a.states().len();
            if n > MAX_EXPLICIT_STATES {
                bail!("product family over {n} states is too large to write out");
            }
            let members = (1u32..1 << n)
                .map(|mask| (0..n).filter(|q| mask >> q & 1 == 1).collect::<BTreeSet<usize>>())
                .filter(|s| family.contains(s));
            FamilyFile::Sets(members.map(|s| names(&s)).collect())
        }
    })
}

fn automaton_to_file(a: &MullerAutomaton) -> Result<AutomatonFile> {
    Ok(AutomatonFile {
        states: a.states().to_vec(),
        initial: a.initial().iter().map(|&q| a.states()[q].clone()).collect(),
        transitions: a
            .transitions()
            .iter()
            .map(|t| TransitionFile { from: a.states()[t.source].clone(), guard: t.guard.to_string(), to: a.states()[t.target].clone() })
            .collect(),
        family: family_to_file(a)?,
    })
}

fn channel_of(messages: &BTreeSet<String>) -> MullerAutomaton {
    let ms: Vec<&str> = messages.iter().map(String::as_str).collect();
    channel_automaton(&ms)
}

/// Builds the network without validating it.
pub fn network_from_file(f: &NetworkFile) -> Result<Arn> {
    let mut n = Arn::new(f.name.clone());
    for (x, p) in &f.ports {
        n.points.insert(x.clone(), Port { published: p.published.clone(), delivered: p.delivered.clone() });
    }
    for (e, p) in &f.processes {
        let mut sig = ActionSignature::empty();
        for x in &p.points {
            let port = n.points.get(x).ok_or_else(|| anyhow!("process `{e}` is attached to unknown point `{x}`"))?;
            sig = sig.union(&qualify(x, &port.actions()));
        }
        let automaton = automaton_from_file(&p.automaton, sig).with_context(|| format!("process `{e}`"))?;
        n.processes.insert(e.clone(), ProcessEdge { points: p.points.clone(), automaton });
    }
    for (e, c) in &f.connections {
        let automaton = match &c.automaton {
            ChannelAutomaton::Keyword(k) if k == "channel" => channel_of(&c.messages),
            ChannelAutomaton::Keyword(k) => bail!("connection `{e}`: unknown automaton `{k}`"),
            ChannelAutomaton::Explicit(a) => {
                automaton_from_file(a, Connection::channel_actions(&c.messages)).with_context(|| format!("connection `{e}`"))?
            }
        };
        n.connections.insert(e.clone(), Connection { messages: c.messages.clone(), attachments: c.attachments.clone(), automaton });
    }
    Ok(n)
}

pub fn network_to_file(n: &Arn) -> Result<NetworkFile> {
    Ok(NetworkFile {
        name: n.name.clone(),
        ports: n.points.iter().map(|(x, p)| (x.clone(), PortFile { published: p.published.clone(), delivered: p.delivered.clone() })).collect(),
        processes: n
            .processes
            .iter()
            .map(|(e, p)| Ok((e.clone(), ProcessFile { points: p.points.clone(), automaton: automaton_to_file(&p.automaton)? })))
            .collect::<Result<_>>()?,
        connections: n
            .connections
            .iter()
            .map(|(e, c)| {
                let automaton = if c.automaton == channel_of(&c.messages) {
                    ChannelAutomaton::Keyword("channel".into())
                } else {
                    ChannelAutomaton::Explicit(automaton_to_file(&c.automaton)?)
                };
                Ok((e.clone(), ConnectionFile { messages: c.messages.clone(), attachments: c.attachments.clone(), automaton }))
            })
            .collect::<Result<_>>()?,
    })
}

/// A network, either inline or as a path to a network file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NetworkRef {
    Path(String),
    Inline(Box<NetworkFile>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArnSpecFile {
    pub point: String,
    pub formula: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArnClauseFile {
    pub name: String,
    pub network: NetworkRef,
    pub provides: ArnSpecFile,
    #[serde(default)]
    pub requires: Vec<ArnSpecFile>,
    /// Query message to clause message.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hint: Option<BTreeMap<String, String>>,
}

/// A program clause, given either directly or as an instance of a module schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PexprClauseFile {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub program: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provides: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub requires: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub module: Option<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scheme", rename_all = "lowercase", deny_unknown_fields)]
pub enum RepositoryFile {
    Arn { clauses: Vec<ArnClauseFile> },
    Pexpr { clauses: Vec<PexprClauseFile> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scheme", rename_all = "lowercase", deny_unknown_fields)]
pub enum QueryFile {
    Arn { network: NetworkRef, requires: Vec<ArnSpecFile> },
    Pexpr { program: String, requires: Vec<String> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScriptStepFile {
    /// A point name (networks) or a position (programs).
    pub select: String,
    pub clause: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hint: Option<BTreeMap<String, String>>,
}

/// Ordered resolution steps, optionally naming the query and repository
/// they replay against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScriptFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub query: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub repository: Option<String>,
    pub steps: Vec<ScriptStepFile>,
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn relative(base: &Path, p: &str) -> PathBuf {
    base.parent().unwrap_or(Path::new(".")).join(p)
}

fn resolve_network(base: &Path, r: &NetworkRef) -> Result<Arn> {
    match r {
        NetworkRef::Path(p) => load_network(&relative(base, p)),
        NetworkRef::Inline(f) => network_from_file(f),
    }
}

/// Reads a network file; the network is not validated.
pub fn load_network(path: &Path) -> Result<Arn> {
    network_from_file(&read_json(path)?).with_context(|| format!("in {}", path.display()))
}

/// Reads a network file and rejects it unless it is well-formed.
pub fn load_valid_network(path: &Path) -> Result<Arn> {
    validated(load_network(path)?)
}

fn validated(n: Arn) -> Result<Arn> {
    let vs = n.validate();
    if let Some(v) = vs.first() {
        bail!("network `{}` is not well-formed: {v}", n.name);
    }
    Ok(n)
}

fn arn_spec(s: &ArnSpecFile) -> Result<ArnSpec> {
    Ok(ArnSpec::new(s.point.clone(), s.formula.parse().with_context(|| format!("formula `{}`", s.formula))?))
}

fn arn_spec_file(s: &ArnSpec) -> ArnSpecFile {
    ArnSpecFile { point: s.point.clone(), formula: s.formula.to_string() }
}

fn pspec(s: &str) -> Result<PSpec> {
    s.parse().with_context(|| format!("spec `{s}`"))
}

fn module_params(kind: ModuleKind, ps: &BTreeMap<String, String>) -> Result<ModuleParams> {
    let mut m = ModuleParams::default();
    for (k, v) in ps {
        let cond = || v.parse().with_context(|| format!("{kind} parameter `{k}`"));
        match k.as_str() {
            "assertion" => m.assertion = Some(cond()?),
            "pre" => m.pre = Some(cond()?),
            "mid" => m.mid = Some(cond()?),
            "post" => m.post = Some(cond()?),
            "guard" => m.guard = Some(cond()?),
            "invariant" => m.invariant = Some(cond()?),
            "var" => m.var = Some(v.clone()),
            "hole" => m.hole = Some(v.clone()),
            "expr" => m.expr = Some(v.parse().with_context(|| format!("{kind} parameter `expr`"))?),
            _ => bail!("unknown {kind} parameter `{k}`"),
        }
    }
    Ok(m)
}

fn pexpr_clause(c: &PexprClauseFile) -> Result<Clause<PexprScheme>> {
    let named = || format!("clause `{}`", c.name);
    if let Some(kind) = &c.module {
        if c.program.is_some() || c.provides.is_some() || !c.requires.is_empty() {
            bail!("{}: give either a module or a program with specs, not both", named());
        }
        let kind: ModuleKind = kind.parse().map_err(|e: String| anyhow!(e)).with_context(named)?;
        let m = hoare_module(kind, &module_params(kind, &c.params)?).with_context(named)?;
        return Ok(Clause { name: c.name.clone(), orc: m.orc, provides: m.provides, requires: m.requires });
    }
    let (Some(program), Some(provides)) = (&c.program, &c.provides) else {
        bail!("{} needs `program` and `provides`, or `module`", named());
    };
    Ok(Clause {
        name: c.name.clone(),
        orc: program.parse().with_context(named)?,
        provides: pspec(provides)?,
        requires: c.requires.iter().map(|s| pspec(s)).collect::<Result<_>>()?,
    })
}

pub enum LoadedRepository {
    Arn(Repository<ArnScheme>),
    Pexpr(Repository<PexprScheme>),
}

fn unique_names<'a>(names: impl Iterator<Item = &'a str>) -> Result<()> {
    let mut seen = BTreeSet::new();
    for n in names {
        if !seen.insert(n) {
            bail!("duplicate clause name `{n}`");
        }
    }
    Ok(())
}

pub fn load_repository(path: &Path) -> Result<LoadedRepository> {
    let f: RepositoryFile = read_json(path)?;
    repository_from_file(path, &f).with_context(|| format!("in {}", path.display()))
}

/// `base` is the path of the file the repository was read from.
pub fn repository_from_file(base: &Path, f: &RepositoryFile) -> Result<LoadedRepository> {
    Ok(match f {
        RepositoryFile::Arn { clauses } => {
            unique_names(clauses.iter().map(|c| c.name.as_str()))?;
            let mut r = Repository::new();
            for c in clauses {
                let named = || format!("clause `{}`", c.name);
                let orc = Arc::new(validated(resolve_network(base, &c.network).with_context(named)?).with_context(named)?);
                let clause = Clause {
                    name: c.name.clone(),
                    orc,
                    provides: arn_spec(&c.provides).with_context(named)?,
                    requires: c.requires.iter().map(arn_spec).collect::<Result<_>>().with_context(named)?,
                };
                r.push(clause, c.hint.clone());
            }
            LoadedRepository::Arn(r)
        }
        RepositoryFile::Pexpr { clauses } => {
            unique_names(clauses.iter().map(|c| c.name.as_str()))?;
            let mut r = Repository::new();
            for c in clauses {
                r.push(pexpr_clause(c)?, None);
            }
            LoadedRepository::Pexpr(r)
        }
    })
}

pub fn arn_repository_to_file(r: &Repository<ArnScheme>) -> Result<RepositoryFile> {
    let clauses = r
        .entries
        .iter()
        .map(|(c, hint)| {
            Ok(ArnClauseFile {
                name: c.name.clone(),
                network: NetworkRef::Inline(Box::new(network_to_file(&c.orc)?)),
                provides: arn_spec_file(&c.provides),
                requires: c.requires.iter().map(arn_spec_file).collect(),
                hint: hint.clone(),
            })
        })
        .collect::<Result<_>>()?;
    Ok(RepositoryFile::Arn { clauses })
}

pub fn pexpr_repository_to_file(r: &Repository<PexprScheme>) -> RepositoryFile {
    let clauses = r
        .entries
        .iter()
        .map(|(c, _)| PexprClauseFile {
            name: c.name.clone(),
            program: Some(c.orc.to_string()),
            provides: Some(c.provides.to_string()),
            requires: c.requires.iter().map(ToString::to_string).collect(),
            module: None,
            params: BTreeMap::new(),
        })
        .collect();
    RepositoryFile::Pexpr { clauses }
}

pub enum LoadedQuery {
    Arn(Query<ArnScheme>),
    Pexpr(Query<PexprScheme>),
}

pub fn load_query(path: &Path) -> Result<LoadedQuery> {
    let f: QueryFile = read_json(path)?;
    query_from_file(path, &f).with_context(|| format!("in {}", path.display()))
}

pub fn query_from_file(base: &Path, f: &QueryFile) -> Result<LoadedQuery> {
    Ok(match f {
        QueryFile::Arn { network, requires } => LoadedQuery::Arn(Query {
            orc: Arc::new(validated(resolve_network(base, network)?)?),
            requires: requires.iter().map(arn_spec).collect::<Result<_>>()?,
        }),
        QueryFile::Pexpr { program, requires } => LoadedQuery::Pexpr(Query {
            orc: program.parse().with_context(|| format!("program `{program}`"))?,
            requires: requires.iter().map(|s| pspec(s)).collect::<Result<_>>()?,
        }),
    })
}

pub fn arn_query_to_file(q: &Query<ArnScheme>) -> Result<QueryFile> {
    Ok(QueryFile::Arn {
        network: NetworkRef::Inline(Box::new(network_to_file(&q.orc)?)),
        requires: q.requires.iter().map(arn_spec_file).collect(),
    })
}

pub fn pexpr_query_to_file(q: &Query<PexprScheme>) -> QueryFile {
    QueryFile::Pexpr { program: q.orc.to_string(), requires: q.requires.iter().map(ToString::to_string).collect() }
}

pub fn load_script(path: &Path) -> Result<ScriptFile> {
    read_json(path)
}

/// The query and repository a script names, resolved against the script's path.
pub fn script_inputs(path: &Path, s: &ScriptFile) -> Result<(PathBuf, PathBuf)> {
    let (Some(q), Some(r)) = (&s.query, &s.repository) else {
        bail!("{} does not name a query and a repository", path.display());
    };
    Ok((relative(path, q), relative(path, r)))
}

pub fn arn_script(s: &ScriptFile) -> Vec<ScriptStep<ArnScheme>> {
    s.steps.iter().map(|st| ScriptStep { select: st.select.clone(), clause: st.clause.clone(), hint: st.hint.clone() }).collect()
}

pub fn pexpr_script(s: &ScriptFile) -> Result<Vec<ScriptStep<PexprScheme>>> {
    s.steps
        .iter()
        .map(|st| {
            if st.hint.is_some() {
                bail!("step `{}`: program clauses take no hint", st.clause);
            }
            Ok(ScriptStep { select: st.select.clone(), clause: st.clause.clone(), hint: None })
        })
        .collect()
}

pub fn load_program(path: &Path) -> Result<PTerm> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    text.trim().parse().with_context(|| format!("parsing {}", path.display()))
}
