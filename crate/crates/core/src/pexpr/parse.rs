//! Surface syntax: `skip`, `x := e`, `p ; p`, `if C then p else p endif`,
//! `while C do p done`, `?p`. `;` associates to the left. Conditions accept
//! optional Iverson brackets: `[x = q * y + r] & !(y <= r)`.

use super::{AExp, BinOp, CmpOp, Cond, PSpec, PTerm, Position};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("syntax error at offset {offset}: {message}")]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Num(i64),
    Sym(&'static str),
}

const KEYWORDS: &[&str] = &["skip", "if", "then", "else", "endif", "while", "do", "done", "true", "false"];

const SYMBOLS: &[(&str, &str)] = &[
    (":=", ":="),
    ("<=", "<="),
    ("≤", "<="),
    ("<", "<"),
    ("=", "="),
    ("+", "+"),
    ("-", "-"),
    ("−", "-"),
    ("*", "*"),
    ("(", "("),
    (")", ")"),
    ("[", "["),
    ("]", "]"),
    ("!", "!"),
    ("¬", "!"),
    ("&", "&"),
    ("∧", "&"),
    ("|", "|"),
    ("∨", "|"),
    (";", ";"),
    ("?", "?"),
    ("⊤", "true"),
];

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let mut out = Vec::new();
    let mut rest = src;
    while let Some(c) = rest.chars().next() {
        let at = src.len() - rest.len();
        if c.is_whitespace() {
            rest = &rest[c.len_utf8()..];
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let end = rest.find(|c: char| !(c.is_ascii_alphanumeric() || c == '_' || c == '\'')).unwrap_or(rest.len());
            out.push((at, Tok::Ident(rest[..end].to_string())));
            rest = &rest[end..];
            continue;
        }
        if c.is_ascii_digit() {
            let end = rest.find(|c: char| !c.is_ascii_digit()).unwrap_or(rest.len());
            let n = rest[..end].parse().map_err(|_| ParseError { offset: at, message: "integer literal out of range".into() })?;
            out.push((at, Tok::Num(n)));
            rest = &rest[end..];
            continue;
        }
        let Some((text, sym)) = SYMBOLS.iter().find(|(text, _)| rest.starts_with(text)) else {
            return Err(ParseError { offset: at, message: format!("unexpected character `{c}`") });
        };
        out.push((at, if *sym == "true" { Tok::Ident("true".into()) } else { Tok::Sym(sym) }));
        rest = &rest[text.len()..];
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn new(src: &str) -> PResult<Self> {
        Ok(Parser { toks: lex(src)?, pos: 0, end: src.len() })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.1)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |t| t.0)
    }

    fn fail<T>(&self, message: impl Into<String>) -> PResult<T> {
        Err(ParseError { offset: self.offset(), message: message.into() })
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Sym(t)) if *t == s) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn eat_kw(&mut self, k: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Ident(t)) if t == k) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, s: &str) -> PResult<()> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            self.fail(format!("expected `{s}`"))
        }
    }

    fn expect_kw(&mut self, k: &str) -> PResult<()> {
        if self.eat_kw(k) {
            Ok(())
        } else {
            self.fail(format!("expected `{k}`"))
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek() {
            Some(Tok::Ident(x)) if !KEYWORDS.contains(&x.as_str()) => {
                let x = x.clone();
                self.pos += 1;
                Ok(x)
            }
            _ => self.fail("expected an identifier"),
        }
    }

    fn finish<T>(&self, v: T) -> PResult<T> {
        if self.pos == self.toks.len() {
            Ok(v)
        } else {
            self.fail("unexpected trailing input")
        }
    }

    fn program(&mut self) -> PResult<PTerm> {
        let mut t = self.statement()?;
        while self.eat_sym(";") {
            t = PTerm::seq(t, self.statement()?);
        }
        Ok(t)
    }

    fn statement(&mut self) -> PResult<PTerm> {
        if self.eat_kw("skip") {
            return Ok(PTerm::Skip);
        }
        if self.eat_kw("if") {
            let c = self.cond()?;
            self.expect_kw("then")?;
            let a = self.program()?;
            self.expect_kw("else")?;
            let b = self.program()?;
            self.expect_kw("endif")?;
            return Ok(PTerm::if_(c, a, b));
        }
        if self.eat_kw("while") {
            let c = self.cond()?;
            self.expect_kw("do")?;
            let b = self.program()?;
            self.expect_kw("done")?;
            return Ok(PTerm::while_(c, b));
        }
        if self.eat_sym("?") {
            return Ok(PTerm::PVar(self.ident()?));
        }
        if self.eat_sym("(") {
            let t = self.program()?;
            self.expect_sym(")")?;
            return Ok(t);
        }
        let x = self.ident()?;
        self.expect_sym(":=")?;
        Ok(PTerm::Assign(x, self.aexp()?))
    }

    fn cond(&mut self) -> PResult<Cond> {
        let mut c = self.conj()?;
        while self.eat_sym("|") {
            c = Cond::or(c, self.conj()?);
        }
        Ok(c)
    }

    fn conj(&mut self) -> PResult<Cond> {
        let mut c = self.unary()?;
        while self.eat_sym("&") {
            c = Cond::and(c, self.unary()?);
        }
        Ok(c)
    }

    fn unary(&mut self) -> PResult<Cond> {
        if self.eat_sym("!") {
            return Ok(Cond::not(self.unary()?));
        }
        if self.eat_kw("true") {
            return Ok(Cond::True);
        }
        if self.eat_kw("false") {
            return Ok(Cond::False);
        }
        if self.eat_sym("[") {
            let c = self.cond()?;
            self.expect_sym("]")?;
            return Ok(c);
        }
        let save = self.pos;
        match self.comparison() {
            Ok(c) => Ok(c),
            Err(e) => {
                self.pos = save;
                if !self.eat_sym("(") {
                    return Err(e);
                }
                let c = self.cond()?;
                self.expect_sym(")")?;
                Ok(c)
            }
        }
    }

    fn comparison(&mut self) -> PResult<Cond> {
        let l = self.aexp()?;
        let op = if self.eat_sym("<=") {
            CmpOp::Le
        } else if self.eat_sym("<") {
            CmpOp::Lt
        } else if self.eat_sym("=") {
            CmpOp::Eq
        } else {
            return self.fail("expected `=`, `<=` or `<`");
        };
        Ok(Cond::cmp(op, l, self.aexp()?))
    }

    fn aexp(&mut self) -> PResult<AExp> {
        let mut e = self.term()?;
        loop {
            let op = if self.eat_sym("+") {
                BinOp::Add
            } else if self.eat_sym("-") {
                BinOp::Sub
            } else {
                return Ok(e);
            };
            e = AExp::bin(op, e, self.term()?);
        }
    }

    fn term(&mut self) -> PResult<AExp> {
        let mut e = self.factor()?;
        while self.eat_sym("*") {
            e = AExp::bin(BinOp::Mul, e, self.factor()?);
        }
        Ok(e)
    }

    fn factor(&mut self) -> PResult<AExp> {
        if self.eat_sym("(") {
            let e = self.aexp()?;
            self.expect_sym(")")?;
            return Ok(e);
        }
        let negative = self.eat_sym("-");
        if let Some(Tok::Num(n)) = self.peek() {
            let n = *n;
            self.pos += 1;
            return Ok(AExp::Num(if negative { -n } else { n }));
        }
        if negative {
            return self.fail("expected an integer literal");
        }
        Ok(AExp::Var(self.ident()?))
    }
}

pub fn program(src: &str) -> PResult<PTerm> {
    let mut p = Parser::new(src)?;
    let t = p.program()?;
    p.finish(t)
}

pub fn cond(src: &str) -> PResult<Cond> {
    let mut p = Parser::new(src)?;
    let c = p.cond()?;
    p.finish(c)
}

pub fn aexp(src: &str) -> PResult<AExp> {
    let mut p = Parser::new(src)?;
    let e = p.aexp()?;
    p.finish(e)
}

/// Splits at commas outside brackets.
fn split_top(s: &str) -> Vec<(usize, &str)> {
    let mut parts = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (i, c) in s.char_indices() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            ',' if depth == 0 => {
                parts.push((start, &s[start..i]));
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push((start, &s[start..]));
    parts
}

pub fn spec(src: &str) -> PResult<PSpec> {
    let t = src.trim();
    let inner = t
        .strip_prefix('(')
        .and_then(|r| r.strip_suffix(')'))
        .or_else(|| t.strip_prefix('⟨').and_then(|r| r.strip_suffix('⟩')))
        .ok_or_else(|| ParseError { offset: 0, message: "expected `(pre, post)` or `(position, pre, post)`".into() })?;
    let shift = src.find(inner).unwrap_or(0);
    let located = |r: PResult<Cond>, at: usize| r.map_err(|e| ParseError { offset: e.offset + shift + at, ..e });
    match split_top(inner).as_slice() {
        [(a, pre), (b, post)] => Ok(PSpec::new(Position::root(), located(cond(pre), *a)?, located(cond(post), *b)?)),
        [(_, pos), (a, pre), (b, post)] => {
            let position = pos.parse().map_err(|e: ParseError| ParseError { offset: shift, ..e })?;
            Ok(PSpec::new(position, located(cond(pre), *a)?, located(cond(post), *b)?))
        }
        _ => Err(ParseError { offset: 0, message: "expected two or three comma-separated parts".into() }),
    }
}
