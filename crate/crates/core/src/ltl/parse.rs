//! Surface syntax shared by temporal formulas and transition guards.
//!
//! Precedence from tightest: unary `! X F G`, then `U`, `&`, `|`, `->`.
//! `U` and `->` associate to the right.

use super::Ltl;
use crate::sigcat::Action;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Word(String),
    Act(Action),
    LParen,
    RParen,
    Not,
    And,
    Or,
    Implies,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("syntax error at offset {offset}: {message}")]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

fn err<T>(offset: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError { offset, message: message.into() })
}

fn is_word_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '.' || c == '\''
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes: Vec<(usize, char)> = src.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let (at, c) = bytes[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let tok = match c {
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '!' | '¬' => Tok::Not,
            '&' | '∧' => Tok::And,
            '|' | '∨' => Tok::Or,
            '→' => Tok::Implies,
            '-' if bytes.get(i + 1).map(|p| p.1) == Some('>') => {
                i += 1;
                Tok::Implies
            }
            c if is_word_char(c) => {
                let mut j = i;
                while j < bytes.len() && is_word_char(bytes[j].1) {
                    j += 1;
                }
                let end = bytes.get(j).map_or(src.len(), |p| p.0);
                let mut word = src[at..end].to_string();
                let mut polar = false;
                if let Some(&(_, p)) = bytes.get(j) {
                    if p == '!' || p == '?' {
                        word.push(p);
                        polar = true;
                        j += 1;
                    }
                }
                i = j;
                let tok = if polar || !matches!(word.as_str(), "X" | "F" | "G" | "U" | "true" | "false") {
                    match word.parse::<Action>() {
                        Ok(a) => Tok::Act(a),
                        Err(_) => return err(at, format!("malformed action `{word}`")),
                    }
                } else {
                    Tok::Word(word)
                };
                out.push((at, tok));
                continue;
            }
            other => return err(at, format!("unexpected character `{other}`")),
        };
        out.push((at, tok));
        i += 1;
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.1)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |t| t.0)
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn eat_word(&mut self, w: &str) -> bool {
        self.eat(&Tok::Word(w.to_string()))
    }

    fn implies(&mut self) -> Result<Ltl, ParseError> {
        let lhs = self.or()?;
        if self.eat(&Tok::Implies) {
            let rhs = self.implies()?;
            return Ok(Ltl::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Ltl, ParseError> {
        let mut items = vec![self.and()?];
        while self.eat(&Tok::Or) {
            items.push(self.and()?);
        }
        Ok(if items.len() == 1 { items.pop().unwrap() } else { Ltl::or(items) })
    }

    fn and(&mut self) -> Result<Ltl, ParseError> {
        let mut items = vec![self.until()?];
        while self.eat(&Tok::And) {
            items.push(self.until()?);
        }
        Ok(if items.len() == 1 { items.pop().unwrap() } else { Ltl::and(items) })
    }

    fn until(&mut self) -> Result<Ltl, ParseError> {
        let lhs = self.unary()?;
        if self.eat_word("U") {
            let rhs = self.until()?;
            return Ok(Ltl::until(lhs, rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Ltl, ParseError> {
        if self.eat(&Tok::Not) {
            return Ok(Ltl::not(self.unary()?));
        }
        if self.eat_word("X") {
            return Ok(Ltl::next(self.unary()?));
        }
        if self.eat_word("F") {
            return Ok(Ltl::eventually(self.unary()?));
        }
        if self.eat_word("G") {
            return Ok(Ltl::always(self.unary()?));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Ltl, ParseError> {
        let at = self.offset();
        match self.peek().cloned() {
            Some(Tok::LParen) => {
                self.pos += 1;
                let f = self.implies()?;
                if !self.eat(&Tok::RParen) {
                    return err(self.offset(), "expected `)`");
                }
                Ok(f)
            }
            Some(Tok::Word(w)) if w == "true" => {
                self.pos += 1;
                Ok(Ltl::tt())
            }
            Some(Tok::Word(w)) if w == "false" => {
                self.pos += 1;
                Ok(Ltl::ff())
            }
            Some(Tok::Act(a)) => {
                self.pos += 1;
                Ok(Ltl::Atom(a))
            }
            Some(t) => err(at, format!("unexpected token {t:?}")),
            None => err(at, "unexpected end of input"),
        }
    }
}

pub fn parse_ltl(src: &str) -> Result<Ltl, ParseError> {
    let toks = lex(src)?;
    let mut p = Parser { toks, pos: 0, end: src.len() };
    let f = p.implies()?;
    if p.pos != p.toks.len() {
        return err(p.offset(), "trailing input");
    }
    Ok(f)
}
