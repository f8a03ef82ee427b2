//! Program expressions over a small while-language.
//!
//! Orchestrations are program terms that may contain program variables
//! (`?p`) standing for code still to be procured. Specifications are
//! Hoare-style triples `⟨ι, ρ, ρ′⟩` attached to a position of a term, and
//! properties are checked by running the interpreter over a bounded box of
//! initial states.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

mod eval;
mod modules;
mod parse;

pub use eval::{
    check_ground_property, entails_conditions, eval_aexp, eval_cond, interpret, refines, render_state, Bounds, Outcome, State, Verdict,
};
pub use modules::{hoare_module, Module, ModuleKind, ModuleParams};
pub use parse::ParseError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PexprError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("position {position} does not address a subterm of `{term}`")]
    InvalidPosition { position: Position, term: PTerm },
    #[error("morphisms are not composable: `{0}` differs from `{1}`")]
    EndpointMismatch(PTerm, PTerm),
    #[error("substitution applied to the source gives `{image}`, not the subterm `{expected}` at {position}")]
    NotAMorphism { image: PTerm, expected: PTerm, position: Position },
    #[error("program variable `{0}` is not bound by the substitution")]
    UnboundProgramVariable(String),
    #[error("identifier `{0}` has no value")]
    UnboundIdentifier(String),
    #[error("arithmetic overflow")]
    Overflow,
    #[error("the term contains program variables")]
    NotGround,
    #[error("invalid bounds `{0}`")]
    Bounds(String),
    #[error("module `{kind}` needs parameter `{param}`")]
    MissingParameter { kind: &'static str, param: &'static str },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
        }
    }

    fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul => 2,
        }
    }
}

/// Integer expressions.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum AExp {
    Num(i64),
    Var(String),
    Bin(BinOp, Box<AExp>, Box<AExp>),
}

impl AExp {
    pub fn var(x: impl Into<String>) -> AExp {
        AExp::Var(x.into())
    }

    pub fn bin(op: BinOp, l: AExp, r: AExp) -> AExp {
        AExp::Bin(op, Box::new(l), Box::new(r))
    }

    pub fn vars(&self, out: &mut BTreeSet<String>) {
        match self {
            AExp::Num(_) => {}
            AExp::Var(x) => {
                out.insert(x.clone());
            }
            AExp::Bin(_, l, r) => {
                l.vars(out);
                r.vars(out);
            }
        }
    }

    pub fn substitute(&self, x: &str, by: &AExp) -> AExp {
        match self {
            AExp::Var(y) if y == x => by.clone(),
            AExp::Num(_) | AExp::Var(_) => self.clone(),
            AExp::Bin(op, l, r) => AExp::bin(*op, l.substitute(x, by), r.substitute(x, by)),
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        match self {
            AExp::Num(n) if *n < 0 => write!(f, "({n})"),
            AExp::Num(n) => write!(f, "{n}"),
            AExp::Var(x) => f.write_str(x),
            AExp::Bin(op, l, r) => {
                let p = op.precedence();
                if p < min {
                    f.write_str("(")?;
                }
                l.fmt_prec(f, p)?;
                write!(f, " {} ", op.symbol())?;
                // Operators associate to the left, so a right operand at the
                // same level needs parentheses.
                r.fmt_prec(f, p + 1)?;
                if p < min {
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for AExp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum CmpOp {
    Eq,
    Le,
    Lt,
}

impl CmpOp {
    fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::Le => "<=",
            CmpOp::Lt => "<",
        }
    }
}

/// Quantifier-free single-state predicates.
///
/// Displayed with Iverson brackets around comparisons (`[r < y] & true`);
/// inside programs the brackets are dropped.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Cond {
    True,
    False,
    Cmp(CmpOp, AExp, AExp),
    Not(Box<Cond>),
    And(Box<Cond>, Box<Cond>),
    Or(Box<Cond>, Box<Cond>),
}

impl Cond {
    pub fn cmp(op: CmpOp, l: AExp, r: AExp) -> Cond {
        Cond::Cmp(op, l, r)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(c: Cond) -> Cond {
        Cond::Not(Box::new(c))
    }

    pub fn and(l: Cond, r: Cond) -> Cond {
        Cond::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: Cond, r: Cond) -> Cond {
        Cond::Or(Box::new(l), Box::new(r))
    }

    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Cond::True | Cond::False => {}
            Cond::Cmp(_, l, r) => {
                l.vars(out);
                r.vars(out);
            }
            Cond::Not(c) => c.collect_vars(out),
            Cond::And(l, r) | Cond::Or(l, r) => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
        }
    }

    /// `ρ(e)`: replaces the identifier `x` by `e` throughout.
    pub fn substitute(&self, x: &str, by: &AExp) -> Cond {
        match self {
            Cond::True | Cond::False => self.clone(),
            Cond::Cmp(op, l, r) => Cond::Cmp(*op, l.substitute(x, by), r.substitute(x, by)),
            Cond::Not(c) => Cond::not(c.substitute(x, by)),
            Cond::And(l, r) => Cond::and(l.substitute(x, by), r.substitute(x, by)),
            Cond::Or(l, r) => Cond::or(l.substitute(x, by), r.substitute(x, by)),
        }
    }

    /// Precedence levels: `|` is 1, `&` is 2, `!` and atoms are 3.
    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min: u8, iverson: bool) -> fmt::Result {
        let level = match self {
            Cond::Or(..) => 1,
            Cond::And(..) => 2,
            _ => 3,
        };
        let paren = level < min;
        if paren {
            f.write_str("(")?;
        }
        match self {
            Cond::True => f.write_str("true")?,
            Cond::False => f.write_str("false")?,
            Cond::Cmp(op, l, r) if iverson => write!(f, "[{l} {} {r}]", op.symbol())?,
            Cond::Cmp(op, l, r) => write!(f, "{l} {} {r}", op.symbol())?,
            Cond::Not(c) => {
                f.write_str("!")?;
                if !iverson && matches!(**c, Cond::Cmp(..)) {
                    write!(f, "(")?;
                    c.fmt_prec(f, 0, iverson)?;
                    write!(f, ")")?;
                } else {
                    c.fmt_prec(f, 3, iverson)?;
                }
            }
            Cond::And(l, r) => {
                l.fmt_prec(f, 2, iverson)?;
                f.write_str(" & ")?;
                r.fmt_prec(f, 3, iverson)?;
            }
            Cond::Or(l, r) => {
                l.fmt_prec(f, 1, iverson)?;
                f.write_str(" | ")?;
                r.fmt_prec(f, 2, iverson)?;
            }
        }
        if paren {
            f.write_str(")")?;
        }
        Ok(())
    }

    /// The condition without Iverson brackets, as written inside programs.
    pub fn plain(&self) -> impl fmt::Display + '_ {
        struct Plain<'a>(&'a Cond);
        impl fmt::Display for Plain<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                self.0.fmt_prec(f, 0, false)
            }
        }
        Plain(self)
    }
}

impl fmt::Display for Cond {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0, true)
    }
}

/// Program terms. `PVar` is a program variable, a hole to be filled by
/// resolution.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum PTerm {
    Skip,
    Assign(String, AExp),
    Seq(Box<PTerm>, Box<PTerm>),
    If(Cond, Box<PTerm>, Box<PTerm>),
    While(Cond, Box<PTerm>),
    PVar(String),
}

impl PTerm {
    pub fn assign(x: impl Into<String>, e: AExp) -> PTerm {
        PTerm::Assign(x.into(), e)
    }

    pub fn seq(a: PTerm, b: PTerm) -> PTerm {
        PTerm::Seq(Box::new(a), Box::new(b))
    }

    pub fn if_(c: Cond, a: PTerm, b: PTerm) -> PTerm {
        PTerm::If(c, Box::new(a), Box::new(b))
    }

    pub fn while_(c: Cond, body: PTerm) -> PTerm {
        PTerm::While(c, Box::new(body))
    }

    pub fn pvar(p: impl Into<String>) -> PTerm {
        PTerm::PVar(p.into())
    }

    /// Program children, in position order. Conditions and expressions are
    /// not addressable.
    pub fn children(&self) -> Vec<&PTerm> {
        match self {
            PTerm::Skip | PTerm::Assign(..) | PTerm::PVar(_) => vec![],
            PTerm::Seq(a, b) | PTerm::If(_, a, b) => vec![a, b],
            PTerm::While(_, b) => vec![b],
        }
    }

    fn child_mut(&mut self, i: usize) -> Option<&mut PTerm> {
        match (self, i) {
            (PTerm::Seq(a, _) | PTerm::If(_, a, _), 0) => Some(a),
            (PTerm::Seq(_, b) | PTerm::If(_, _, b), 1) => Some(b),
            (PTerm::While(_, b), 0) => Some(b),
            _ => None,
        }
    }

    /// `t|π`.
    pub fn subterm_at(&self, p: &Position) -> Result<&PTerm, PexprError> {
        let mut t = self;
        for &i in &p.0 {
            t = t.children().get(i).copied().ok_or_else(|| self.bad_position(p))?;
        }
        Ok(t)
    }

    pub fn replace_at(&self, p: &Position, s: PTerm) -> Result<PTerm, PexprError> {
        let mut out = self.clone();
        let mut t = &mut out;
        for &i in &p.0 {
            t = t.child_mut(i).ok_or_else(|| self.bad_position(p))?;
        }
        *t = s;
        Ok(out)
    }

    fn bad_position(&self, p: &Position) -> PexprError {
        PexprError::InvalidPosition { position: p.clone(), term: self.clone() }
    }

    /// Every valid position, in preorder.
    pub fn positions(&self) -> Vec<Position> {
        let mut out = vec![Position::root()];
        for (i, c) in self.children().into_iter().enumerate() {
            out.extend(c.positions().into_iter().map(|p| Position::from(vec![i]).concat(&p)));
        }
        out
    }

    pub fn pvars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_pvars(&mut out);
        out
    }

    fn collect_pvars(&self, out: &mut BTreeSet<String>) {
        if let PTerm::PVar(p) = self {
            out.insert(p.clone());
        }
        for c in self.children() {
            c.collect_pvars(out);
        }
    }

    pub fn is_ground(&self) -> bool {
        self.pvars().is_empty()
    }

    /// Identifiers read or written by the program.
    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            PTerm::Assign(x, e) => {
                out.insert(x.clone());
                e.vars(out);
            }
            PTerm::If(c, ..) | PTerm::While(c, _) => out.extend(c.vars()),
            _ => {}
        }
        for c in self.children() {
            c.collect_vars(out);
        }
    }

    /// `ψ#(t)`: replaces every program variable bound by `psi`.
    pub fn apply(&self, psi: &PSubstitution) -> PTerm {
        match self {
            PTerm::PVar(p) => psi.0.get(p).cloned().unwrap_or_else(|| self.clone()),
            PTerm::Skip | PTerm::Assign(..) => self.clone(),
            PTerm::Seq(a, b) => PTerm::seq(a.apply(psi), b.apply(psi)),
            PTerm::If(c, a, b) => PTerm::if_(c.clone(), a.apply(psi), b.apply(psi)),
            PTerm::While(c, b) => PTerm::while_(c.clone(), b.apply(psi)),
        }
    }

    /// Renames program variables by appending `suffix`.
    pub fn freshen(&self, suffix: &str) -> (PTerm, PSubstitution) {
        let psi = PSubstitution(self.pvars().into_iter().map(|p| (p.clone(), PTerm::pvar(format!("{p}{suffix}")))).collect());
        (self.apply(&psi), psi)
    }
}

impl fmt::Display for PTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PTerm::Skip => f.write_str("skip"),
            PTerm::Assign(x, e) => write!(f, "{x} := {e}"),
            PTerm::Seq(a, b) => {
                write!(f, "{a} ; ")?;
                // `;` associates to the left.
                if matches!(**b, PTerm::Seq(..)) {
                    write!(f, "({b})")
                } else {
                    write!(f, "{b}")
                }
            }
            PTerm::If(c, a, b) => write!(f, "if {} then {a} else {b} endif", c.plain()),
            PTerm::While(c, b) => write!(f, "while {} do {b} done", c.plain()),
            PTerm::PVar(p) => write!(f, "?{p}"),
        }
    }
}

impl FromStr for PTerm {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse::program(s)
    }
}

impl FromStr for AExp {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse::aexp(s)
    }
}

impl FromStr for Cond {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse::cond(s)
    }
}

/// A sequence of child indices; the empty sequence `ε` is the root.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Position(pub Vec<usize>);

impl Position {
    pub fn root() -> Self {
        Position(Vec::new())
    }

    /// `self · other`.
    pub fn concat(&self, other: &Position) -> Position {
        Position(self.0.iter().chain(&other.0).copied().collect())
    }

    pub fn is_prefix_of(&self, other: &Position) -> bool {
        other.0.starts_with(&self.0)
    }
}

impl From<Vec<usize>> for Position {
    fn from(v: Vec<usize>) -> Self {
        Position(v)
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("ε");
        }
        let parts: Vec<String> = self.0.iter().map(usize::to_string).collect();
        f.write_str(&parts.join("."))
    }
}

impl FromStr for Position {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() || s == "ε" || s == "e" {
            return Ok(Position::root());
        }
        s.split('.')
            .map(|p| p.trim().parse::<usize>().map_err(|_| ParseError { offset: 0, message: format!("malformed position `{s}`") }))
            .collect::<Result<_, _>>()
            .map(Position)
    }
}

/// `ψ`: program variables to terms. Variables not listed are left alone.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PSubstitution(pub BTreeMap<String, PTerm>);

impl PSubstitution {
    pub fn identity() -> Self {
        PSubstitution::default()
    }

    pub fn single(p: impl Into<String>, t: PTerm) -> Self {
        PSubstitution(BTreeMap::from([(p.into(), t)]))
    }

    /// `self ; next`: first `self`, then `next`.
    pub fn then(&self, next: &PSubstitution) -> PSubstitution {
        let mut out: BTreeMap<String, PTerm> = self.0.iter().map(|(p, t)| (p.clone(), t.apply(next))).collect();
        for (p, t) in &next.0 {
            out.entry(p.clone()).or_insert_with(|| t.clone());
        }
        out.retain(|p, t| *t != PTerm::pvar(p.as_str()));
        PSubstitution(out)
    }
}

impl fmt::Display for PSubstitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|(p, t)| format!("?{p} ↦ {t}")).collect();
        f.write_str(&parts.join(", "))
    }
}

/// `⟨ψ, π⟩ : t1 → t2` with `ψ#(t1) = t2|π`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PMorphism {
    pub subst: PSubstitution,
    pub position: Position,
    pub source: PTerm,
    pub target: PTerm,
}

impl PMorphism {
    pub fn new(subst: PSubstitution, position: Position, source: PTerm, target: PTerm) -> Result<Self, PexprError> {
        let image = source.apply(&subst);
        let expected = target.subterm_at(&position)?;
        if image != *expected {
            return Err(PexprError::NotAMorphism { image, expected: expected.clone(), position });
        }
        Ok(PMorphism { subst, position, source, target })
    }

    pub fn identity(t: PTerm) -> Self {
        PMorphism { subst: PSubstitution::identity(), position: Position::root(), source: t.clone(), target: t }
    }

    /// `⟨ψ1 ; ψ2, π2 · π1⟩`.
    pub fn then(&self, next: &PMorphism) -> Result<PMorphism, PexprError> {
        if self.target != next.source {
            return Err(PexprError::EndpointMismatch(self.target.clone(), next.source.clone()));
        }
        Ok(PMorphism {
            subst: self.subst.then(&next.subst),
            position: next.position.concat(&self.position),
            source: self.source.clone(),
            target: next.target.clone(),
        })
    }

    /// `⟨π · ι, ψ(ρ), ψ(ρ′)⟩`. Conditions mention no program variables, so
    /// `ψ` leaves them unchanged.
    pub fn translate(&self, s: &PSpec) -> Result<PSpec, PexprError> {
        self.source.subterm_at(&s.position)?;
        Ok(PSpec { position: self.position.concat(&s.position), pre: s.pre.clone(), post: s.post.clone() })
    }

    /// A morphism whose substitution grounds every program variable of the source.
    pub fn is_ground_instance(&self) -> bool {
        self.target.is_ground()
    }
}

impl fmt::Display for PMorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.subst.0.is_empty(), self.position.0.is_empty()) {
            (true, true) => f.write_str("1"),
            (false, true) => write!(f, "{}", self.subst),
            (true, false) => write!(f, "@{}", self.position),
            (false, false) => write!(f, "{} @{}", self.subst, self.position),
        }
    }
}

/// `⟨ι, ρ, ρ′⟩`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct PSpec {
    pub position: Position,
    pub pre: Cond,
    pub post: Cond,
}

impl PSpec {
    pub fn new(position: Position, pre: Cond, post: Cond) -> Self {
        PSpec { position, pre, post }
    }
}

impl fmt::Display for PSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "⟨{}, {}, {}⟩", self.position, self.pre, self.post)
    }
}

impl FromStr for PSpec {
    type Err = ParseError;

    /// `(pre, post)` at the root, or `(ι, pre, post)`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse::spec(s)
    }
}
