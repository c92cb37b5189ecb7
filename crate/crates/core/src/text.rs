//! Shared cursor for the small text grammars (groups, complexes, spaces,
//! presheaves). Whitespace is skipped between tokens.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at position {position}: expected {expected}, found {found}")]
pub struct ParseError {
    pub position: usize,
    pub expected: String,
    pub found: String,
}

pub(crate) struct Cursor<'a> {
    src: &'a str,
    pos: usize,
    /// Added to reported positions when parsing a fragment of a larger input.
    offset: usize,
}

impl<'a> Cursor<'a> {
    pub fn new(src: &'a str) -> Self {
        Cursor { src, pos: 0, offset: 0 }
    }

    pub fn with_offset(src: &'a str, offset: usize) -> Self {
        Cursor { src, pos: 0, offset }
    }

    pub fn position(&self) -> usize {
        self.offset + self.pos
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    pub fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    pub fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos == self.src.len()
    }

    pub fn peek_char(&mut self) -> Option<char> {
        self.skip_ws();
        self.rest().chars().next()
    }

    pub fn error(&mut self, expected: impl Into<String>) -> ParseError {
        self.skip_ws();
        let found = match self.rest().chars().next() {
            None => "end of input".to_string(),
            Some(_) => {
                let snippet: String = self.rest().chars().take(12).collect();
                format!("{snippet:?}")
            }
        };
        ParseError {
            position: self.position(),
            expected: expected.into(),
            found,
        }
    }

    /// Consumes `tok` if the input continues with it.
    pub fn eat(&mut self, tok: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(tok) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, tok: &str) -> Result<(), ParseError> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(self.error(format!("{tok:?}")))
        }
    }

    /// Consumes a keyword only when it is not followed by an identifier character.
    pub fn eat_keyword(&mut self, kw: &str) -> bool {
        self.skip_ws();
        let rest = self.rest();
        if let Some(after) = rest.strip_prefix(kw) {
            let next = after.chars().next();
            if !next.is_some_and(|c| c.is_alphanumeric() || c == '_') {
                self.pos += kw.len();
                return true;
            }
        }
        false
    }

    pub fn integer(&mut self) -> Result<i64, ParseError> {
        self.skip_ws();
        let rest = self.rest();
        let mut len = 0;
        for (i, c) in rest.char_indices() {
            if c.is_ascii_digit() || (i == 0 && (c == '-' || c == '+')) {
                len = i + c.len_utf8();
            } else {
                break;
            }
        }
        let text = &rest[..len];
        match text.parse::<i64>() {
            Ok(v) => {
                self.pos += len;
                Ok(v)
            }
            Err(_) => Err(self.error("integer")),
        }
    }

    pub fn count(&mut self) -> Result<u64, ParseError> {
        let start = self.pos;
        let v = self.integer()?;
        if v < 0 {
            self.pos = start;
            return Err(self.error("nonnegative integer"));
        }
        Ok(v as u64)
    }

    pub fn identifier(&mut self) -> Result<&'a str, ParseError> {
        self.skip_ws();
        let rest = self.rest();
        let len = rest
            .char_indices()
            .take_while(|&(i, c)| c.is_alphanumeric() || c == '_' || (i > 0 && c == '-'))
            .map(|(i, c)| i + c.len_utf8())
            .last()
            .unwrap_or(0);
        if len == 0 {
            return Err(self.error("identifier"));
        }
        self.pos += len;
        Ok(&rest[..len])
    }

    pub fn finish(&mut self) -> Result<(), ParseError> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.error("end of input"))
        }
    }
}
