use std::fmt;
use std::str::FromStr;

use super::{AExp, Cond, PSpec, PTerm, PexprError, Position};

/// The five Hoare-logic module schemas.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModuleKind {
    Skip,
    Assign,
    Seq,
    If,
    While,
}

impl ModuleKind {
    pub fn name(self) -> &'static str {
        match self {
            ModuleKind::Skip => "skip",
            ModuleKind::Assign => "assign",
            ModuleKind::Seq => "seq",
            ModuleKind::If => "if",
            ModuleKind::While => "while",
        }
    }
}

impl fmt::Display for ModuleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModuleKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "skip" => ModuleKind::Skip,
            "assign" => ModuleKind::Assign,
            "seq" => ModuleKind::Seq,
            "if" => ModuleKind::If,
            "while" => ModuleKind::While,
            _ => return Err(format!("unknown module kind `{s}`")),
        })
    }
}

/// Schema metavariables. Which ones are needed depends on the kind:
///
/// - skip: `assertion` (ρ)
/// - assign: `var` (x), `expr` (e), `assertion` (ρ, mentioning the hole)
/// - seq: `pre`, `mid`, `post` (ρ, ρ′, ρ″)
/// - if: `guard` (C), `pre`, `post`
/// - while: `guard` (C), `invariant` (ρ)
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ModuleParams {
    pub assertion: Option<Cond>,
    pub var: Option<String>,
    pub expr: Option<AExp>,
    pub pre: Option<Cond>,
    pub mid: Option<Cond>,
    pub post: Option<Cond>,
    pub guard: Option<Cond>,
    pub invariant: Option<Cond>,
    /// Placeholder identifier of the assignment schema; `v` when absent.
    pub hole: Option<String>,
}

/// A module instance: the orchestration, its provides-spec and its requires-specs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Module {
    pub kind: ModuleKind,
    pub orc: PTerm,
    pub provides: PSpec,
    pub requires: Vec<PSpec>,
}

fn need<T: Clone>(kind: ModuleKind, param: &'static str, v: &Option<T>) -> Result<T, PexprError> {
    v.clone().ok_or(PexprError::MissingParameter { kind: kind.name(), param })
}

fn at(i: &[usize], pre: Cond, post: Cond) -> PSpec {
    PSpec::new(Position(i.to_vec()), pre, post)
}

pub fn hoare_module(kind: ModuleKind, p: &ModuleParams) -> Result<Module, PexprError> {
    let root = |pre, post| PSpec::new(Position::root(), pre, post);
    let (orc, provides, requires) = match kind {
        ModuleKind::Skip => {
            let rho = need(kind, "assertion", &p.assertion)?;
            (PTerm::Skip, root(rho.clone(), rho), vec![])
        }
        ModuleKind::Assign => {
            let x = need(kind, "var", &p.var)?;
            let e = need(kind, "expr", &p.expr)?;
            let rho = need(kind, "assertion", &p.assertion)?;
            let hole = p.hole.clone().unwrap_or_else(|| "v".into());
            let provides = root(rho.substitute(&hole, &e), rho.substitute(&hole, &AExp::var(x.as_str())));
            (PTerm::assign(x, e), provides, vec![])
        }
        ModuleKind::Seq => {
            let (pre, mid, post) = (need(kind, "pre", &p.pre)?, need(kind, "mid", &p.mid)?, need(kind, "post", &p.post)?);
            let orc = PTerm::seq(PTerm::pvar("first"), PTerm::pvar("second"));
            (orc, root(pre.clone(), post.clone()), vec![at(&[0], pre, mid.clone()), at(&[1], mid, post)])
        }
        ModuleKind::If => {
            let c = need(kind, "guard", &p.guard)?;
            let (pre, post) = (need(kind, "pre", &p.pre)?, need(kind, "post", &p.post)?);
            let orc = PTerm::if_(c.clone(), PTerm::pvar("yes"), PTerm::pvar("no"));
            let requires = vec![
                at(&[0], Cond::and(pre.clone(), c.clone()), post.clone()),
                at(&[1], Cond::and(pre.clone(), Cond::not(c)), post.clone()),
            ];
            (orc, root(pre, post), requires)
        }
        ModuleKind::While => {
            let c = need(kind, "guard", &p.guard)?;
            let rho = need(kind, "invariant", &p.invariant)?;
            let orc = PTerm::while_(c.clone(), PTerm::pvar("body"));
            let provides = root(rho.clone(), Cond::and(rho.clone(), Cond::not(c.clone())));
            (orc, provides, vec![at(&[0], Cond::and(rho.clone(), c), rho)])
        }
    };
    Ok(Module { kind, orc, provides, requires })
}
