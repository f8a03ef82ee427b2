use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use super::{AExp, BinOp, CmpOp, Cond, PMorphism, PSpec, PTerm, PexprError};

pub type State = BTreeMap<String, i64>;

/// Inclusive value ranges for the identifiers of a bounded check, with
/// per-identifier overrides: `0..8,y=1..8`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bounds {
    pub default: (i64, i64),
    pub overrides: BTreeMap<String, (i64, i64)>,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds { default: (0, 8), overrides: BTreeMap::new() }
    }
}

impl Bounds {
    pub fn range(lo: i64, hi: i64) -> Self {
        Bounds { default: (lo, hi), overrides: BTreeMap::new() }
    }

    pub fn with(mut self, x: impl Into<String>, lo: i64, hi: i64) -> Self {
        self.overrides.insert(x.into(), (lo, hi));
        self
    }

    fn of(&self, x: &str) -> (i64, i64) {
        self.overrides.get(x).copied().unwrap_or(self.default)
    }

    /// Every state over `vars` within the bounds, in lexicographic order.
    pub fn states<'a>(&'a self, vars: &BTreeSet<String>) -> impl Iterator<Item = State> + 'a {
        let vars: Vec<(String, (i64, i64))> = vars.iter().map(|x| (x.clone(), self.of(x))).collect();
        let empty = vars.iter().any(|(_, (lo, hi))| lo > hi);
        let mut next: Option<Vec<i64>> = if empty { None } else { Some(vars.iter().map(|(_, (lo, _))| *lo).collect()) };
        std::iter::from_fn(move || {
            let current = next.take()?;
            let state = vars.iter().zip(&current).map(|((x, _), v)| (x.clone(), *v)).collect();
            let mut bump = current;
            for i in (0..bump.len()).rev() {
                if bump[i] < vars[i].1 .1 {
                    bump[i] += 1;
                    next = Some(bump);
                    break;
                }
                bump[i] = vars[i].1 .0;
            }
            Some(state)
        })
    }
}

fn parse_range(s: &str) -> Option<(i64, i64)> {
    let (lo, hi) = s.trim().split_once("..")?;
    let r: (i64, i64) = (lo.trim().parse().ok()?, hi.trim().parse().ok()?);
    (r.0 <= r.1).then_some(r)
}

impl FromStr for Bounds {
    type Err = PexprError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || PexprError::Bounds(s.to_string());
        let mut out = Bounds::default();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            match part.split_once('=') {
                Some((x, r)) => {
                    out.overrides.insert(x.trim().to_string(), parse_range(r).ok_or_else(bad)?);
                }
                None => out.default = parse_range(part).ok_or_else(bad)?,
            }
        }
        Ok(out)
    }
}

impl fmt::Display for Bounds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.default.0, self.default.1)?;
        for (x, (lo, hi)) in &self.overrides {
            write!(f, ",{x}={lo}..{hi}")?;
        }
        Ok(())
    }
}

pub fn eval_aexp(e: &AExp, s: &State) -> Result<i64, PexprError> {
    match e {
        AExp::Num(n) => Ok(*n),
        AExp::Var(x) => s.get(x).copied().ok_or_else(|| PexprError::UnboundIdentifier(x.clone())),
        AExp::Bin(op, l, r) => {
            let (l, r) = (eval_aexp(l, s)?, eval_aexp(r, s)?);
            match op {
                BinOp::Add => l.checked_add(r),
                BinOp::Sub => l.checked_sub(r),
                BinOp::Mul => l.checked_mul(r),
            }
            .ok_or(PexprError::Overflow)
        }
    }
}

pub fn eval_cond(c: &Cond, s: &State) -> Result<bool, PexprError> {
    Ok(match c {
        Cond::True => true,
        Cond::False => false,
        Cond::Cmp(op, l, r) => {
            let (l, r) = (eval_aexp(l, s)?, eval_aexp(r, s)?);
            match op {
                CmpOp::Eq => l == r,
                CmpOp::Le => l <= r,
                CmpOp::Lt => l < r,
            }
        }
        Cond::Not(c) => !eval_cond(c, s)?,
        Cond::And(l, r) => eval_cond(l, s)? && eval_cond(r, s)?,
        Cond::Or(l, r) => eval_cond(l, s)? || eval_cond(r, s)?,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Terminated(State),
    /// A loop came back to a store it had already been in at its head, so
    /// the run never terminates.
    Diverges,
    OutOfFuel,
}

/// Big-step evaluation; `fuel` bounds the total number of loop iterations.
pub fn interpret(t: &PTerm, s: State, fuel: u64) -> Result<Outcome, PexprError> {
    let mut fuel = fuel;
    run(t, s, &mut fuel)
}

fn run(t: &PTerm, mut s: State, fuel: &mut u64) -> Result<Outcome, PexprError> {
    match t {
        PTerm::Skip => Ok(Outcome::Terminated(s)),
        PTerm::Assign(x, e) => {
            let v = eval_aexp(e, &s)?;
            s.insert(x.clone(), v);
            Ok(Outcome::Terminated(s))
        }
        PTerm::Seq(a, b) => match run(a, s, fuel)? {
            Outcome::Terminated(s) => run(b, s, fuel),
            other => Ok(other),
        },
        PTerm::If(c, a, b) => {
            if eval_cond(c, &s)? {
                run(a, s, fuel)
            } else {
                run(b, s, fuel)
            }
        }
        PTerm::While(c, body) => {
            // Brent's cycle detection on the stores seen at the loop head.
            let (mut saved, mut power, mut since) = (s.clone(), 1u64, 0u64);
            while eval_cond(c, &s)? {
                if *fuel == 0 {
                    return Ok(Outcome::OutOfFuel);
                }
                *fuel -= 1;
                match run(body, s, fuel)? {
                    Outcome::Terminated(next) => s = next,
                    other => return Ok(other),
                }
                if s == saved {
                    return Ok(Outcome::Diverges);
                }
                since += 1;
                if since == power {
                    saved = s.clone();
                    power *= 2;
                    since = 0;
                }
            }
            Ok(Outcome::Terminated(s))
        }
        PTerm::PVar(_) => Err(PexprError::NotGround),
    }
}

/// Outcome of a bounded check. `Fails` carries the initial state of a
/// violating run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Fails(State),
    Inconclusive,
}

impl Verdict {
    pub fn holds(&self) -> bool {
        *self == Verdict::Holds
    }
}

pub fn render_state(s: &State) -> String {
    let parts: Vec<String> = s.iter().map(|(x, v)| format!("{x}={v}")).collect();
    format!("{{{}}}", parts.join(", "))
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Holds => f.write_str("holds"),
            Verdict::Fails(s) => write!(f, "fails from {}", render_state(s)),
            Verdict::Inconclusive => f.write_str("inconclusive"),
        }
    }
}

/// Partial correctness of `t|ι` with respect to the spec, for every initial
/// state within `bounds`. Diverging runs satisfy any spec; a run that
/// exhausts its fuel turns `Holds` into `Inconclusive`.
pub fn check_ground_property(t: &PTerm, spec: &PSpec, bounds: &Bounds, fuel: u64) -> Result<Verdict, PexprError> {
    if !t.is_ground() {
        return Err(PexprError::NotGround);
    }
    let body = t.subterm_at(&spec.position)?;
    let mut vars = body.vars();
    vars.extend(spec.pre.vars());
    vars.extend(spec.post.vars());
    let mut verdict = Verdict::Holds;
    for s in bounds.states(&vars) {
        if !eval_cond(&spec.pre, &s)? {
            continue;
        }
        match interpret(body, s.clone(), fuel)? {
            Outcome::Terminated(end) => {
                if !eval_cond(&spec.post, &end)? {
                    return Ok(Verdict::Fails(s));
                }
            }
            Outcome::Diverges => {}
            Outcome::OutOfFuel => verdict = Verdict::Inconclusive,
        }
    }
    Ok(verdict)
}

/// Whether every state within `bounds` that satisfies `c1` satisfies `c2`.
pub fn entails_conditions(c1: &Cond, c2: &Cond, bounds: &Bounds) -> Result<bool, PexprError> {
    let mut vars = c1.vars();
    vars.extend(c2.vars());
    for s in bounds.states(&vars) {
        if eval_cond(c1, &s)? && !eval_cond(c2, &s)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `s1 ⊑ s2` up to the cospan `(m1, m2)`: both specs land on the same
/// position, the pre-condition is weakened and the post-condition strengthened.
pub fn refines(s1: &PSpec, m1: &PMorphism, s2: &PSpec, m2: &PMorphism, bounds: &Bounds) -> Result<bool, PexprError> {
    if m1.target != m2.target {
        return Err(PexprError::EndpointMismatch(m1.target.clone(), m2.target.clone()));
    }
    let (t1, t2) = (m1.translate(s1)?, m2.translate(s2)?);
    Ok(t1.position == t2.position
        && entails_conditions(&t1.pre, &t2.pre, bounds)?
        && entails_conditions(&t2.post, &t1.post, bounds)?)
}
