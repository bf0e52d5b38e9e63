//! Tokenizer shared by the pomset and expression parsers.

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Token {
    Zero,
    One,
    Letter(String),
    Plus,
    Dot,
    Par,
    Star,
    Open,
    Close,
}

impl Token {
    pub(crate) fn describe(&self) -> String {
        match self {
            Token::Zero => "`0`".into(),
            Token::One => "`1`".into(),
            Token::Letter(l) => format!("letter `{l}`"),
            Token::Plus => "`+`".into(),
            Token::Dot => "`.`".into(),
            Token::Par => "`||`".into(),
            Token::Star => "`*`".into(),
            Token::Open => "`(`".into(),
            Token::Close => "`)`".into(),
        }
    }
}

pub(crate) fn is_letter(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some('a'..='z'))
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

pub(crate) fn tokenize(src: &str) -> Result<Vec<(usize, Token)>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'0' => Token::Zero,
            b'1' => Token::One,
            b'+' => Token::Plus,
            b'.' => Token::Dot,
            b'*' => Token::Star,
            b'(' => Token::Open,
            b')' => Token::Close,
            b'|' if bytes.get(i + 1) == Some(&b'|') => {
                i += 1;
                Token::Par
            }
            b'a'..=b'z' => {
                while i + 1 < bytes.len()
                    && (bytes[i + 1].is_ascii_alphanumeric() || bytes[i + 1] == b'_')
                {
                    i += 1;
                }
                Token::Letter(src[start..=i].to_string())
            }
            _ => {
                let ch = src[i..].chars().next().unwrap_or('?');
                return Err(Error::Syntax {
                    position: i,
                    message: format!("unexpected character `{ch}`"),
                });
            }
        };
        // A digit glued to more digits or letters is not a valid token.
        if matches!(tok, Token::Zero | Token::One)
            && bytes
                .get(i + 1)
                .is_some_and(|b| b.is_ascii_alphanumeric() || *b == b'_')
        {
            return Err(Error::Syntax {
                position: start,
                message: "letters must start with a lowercase letter".into(),
            });
        }
        i += 1;
        out.push((start, tok));
    }
    Ok(out)
}

/// Cursor over a token stream.
pub(crate) struct Cursor {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    end: usize,
}

impl Cursor {
    pub(crate) fn new(src: &str) -> Result<Self> {
        Ok(Cursor {
            tokens: tokenize(src)?,
            pos: 0,
            end: src.len(),
        })
    }

    pub(crate) fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    pub(crate) fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |(p, _)| *p)
    }

    pub(crate) fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    pub(crate) fn eat(&mut self, tok: &Token) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub(crate) fn error(&self, message: impl Into<String>) -> Error {
        Error::Syntax {
            position: self.offset(),
            message: message.into(),
        }
    }

    pub(crate) fn unexpected(&self, wanted: &str) -> Error {
        match self.peek() {
            Some(t) => self.error(format!("expected {wanted}, found {}", t.describe())),
            None => self.error(format!("expected {wanted}, found end of input")),
        }
    }

    pub(crate) fn expect_end(&self) -> Result<()> {
        match self.peek() {
            None => Ok(()),
            Some(t) => Err(self.error(format!("unexpected {}", t.describe()))),
        }
    }
}
