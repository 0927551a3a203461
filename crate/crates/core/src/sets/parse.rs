//! Text descriptions of sets.
//!
//! ```text
//! set   := "all" | "empty"
//!        | "finite" "{" [word ("," word)*] "}"
//!        | "K_approx" "(" number ")" | "coK_cyl" "(" number ")"
//!        | ("joinhat") "(" set "," set ")"
//!        | ("interleave4" | "complement" | "cylinder") "(" set ")"
//! word  := "eps" | [01]+
//! ```

use thiserror::Error;

use super::{cylinderize, interleave4, join_hat, SetSpec};
use crate::strings::LexString;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("set description: {message} at offset {offset} (token {token:?})")]
pub struct SetParseError {
    pub offset: usize,
    pub token: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Word(String),
    Punct(char),
    End,
}

struct Parser<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while let Some(c) = self.text[self.pos..].chars().next() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&mut self) -> (usize, Tok) {
        self.skip_ws();
        let rest = &self.text[self.pos..];
        let Some(c) = rest.chars().next() else {
            return (self.pos, Tok::End);
        };
        if "{}(),".contains(c) {
            return (self.pos, Tok::Punct(c));
        }
        let len = rest
            .find(|ch: char| ch.is_whitespace() || "{}(),".contains(ch))
            .unwrap_or(rest.len());
        (self.pos, Tok::Word(rest[..len].to_string()))
    }

    fn bump(&mut self) -> (usize, Tok) {
        let (at, tok) = self.peek();
        self.pos += match &tok {
            Tok::Word(w) => w.len(),
            Tok::Punct(c) => c.len_utf8(),
            Tok::End => 0,
        };
        (at, tok)
    }

    fn error(&self, offset: usize, tok: &Tok, message: impl Into<String>) -> SetParseError {
        let token = match tok {
            Tok::Word(w) => w.clone(),
            Tok::Punct(c) => c.to_string(),
            Tok::End => "<end>".to_string(),
        };
        SetParseError {
            offset,
            token,
            message: message.into(),
        }
    }

    fn expect(&mut self, want: char) -> Result<(), SetParseError> {
        let (at, tok) = self.bump();
        if tok == Tok::Punct(want) {
            Ok(())
        } else {
            Err(self.error(at, &tok, format!("expected '{want}'")))
        }
    }

    fn number(&mut self) -> Result<u64, SetParseError> {
        let (at, tok) = self.bump();
        match &tok {
            Tok::Word(w) => w
                .parse()
                .map_err(|_| self.error(at, &tok, "expected a budget (natural number)")),
            _ => Err(self.error(at, &tok, "expected a budget (natural number)")),
        }
    }

    fn set(&mut self) -> Result<SetSpec, SetParseError> {
        let (at, tok) = self.bump();
        let Tok::Word(name) = &tok else {
            return Err(self.error(at, &tok, "expected a set"));
        };
        match name.as_str() {
            "all" => Ok(SetSpec::all()),
            "empty" => Ok(SetSpec::empty()),
            "finite" => {
                self.expect('{')?;
                let mut items = Vec::new();
                if self.peek().1 == Tok::Punct('}') {
                    self.bump();
                    return Ok(SetSpec::finite(items));
                }
                loop {
                    let (at, tok) = self.bump();
                    let word = match &tok {
                        Tok::Word(w) => w
                            .parse::<LexString>()
                            .map_err(|_| self.error(at, &tok, "expected a binary string or eps"))?,
                        _ => return Err(self.error(at, &tok, "expected a binary string or eps")),
                    };
                    items.push(word);
                    let (at, tok) = self.bump();
                    match tok {
                        Tok::Punct(',') => continue,
                        Tok::Punct('}') => break,
                        other => return Err(self.error(at, &other, "expected ',' or '}'")),
                    }
                }
                Ok(SetSpec::finite(items))
            }
            "K_approx" | "coK_cyl" => {
                self.expect('(')?;
                let budget = self.number()?;
                self.expect(')')?;
                Ok(if name == "K_approx" {
                    SetSpec::halting_approx(budget)
                } else {
                    super::co_k_cylinder_set(budget)
                })
            }
            "joinhat" => {
                self.expect('(')?;
                let a = self.set()?;
                self.expect(',')?;
                let b = self.set()?;
                self.expect(')')?;
                Ok(join_hat(&a, &b))
            }
            "interleave4" | "complement" | "cylinder" => {
                self.expect('(')?;
                let a = self.set()?;
                self.expect(')')?;
                Ok(match name.as_str() {
                    "interleave4" => interleave4(&a),
                    "complement" => a.complement(),
                    _ => cylinderize(&a),
                })
            }
            _ => Err(self.error(at, &tok, "unknown set constructor")),
        }
    }
}

pub fn parse_set(text: &str) -> Result<SetSpec, SetParseError> {
    let mut p = Parser { text, pos: 0 };
    let set = p.set()?;
    let (at, tok) = p.bump();
    if tok != Tok::End {
        return Err(p.error(at, &tok, "trailing input"));
    }
    Ok(set)
}
