use thiserror::Error;

use super::ast::LtlFormula;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("empty input")]
    Empty,
    #[error("unknown token {token:?} at byte {offset}")]
    UnknownToken { token: char, offset: usize },
    #[error("unexpected end of input at byte {offset}")]
    UnexpectedEnd { offset: usize },
    #[error("expected {expected} at byte {offset}")]
    Expected { expected: &'static str, offset: usize },
    #[error("trailing input at byte {offset}")]
    Trailing { offset: usize },
}

/// Parse an LTL formula.
///
/// Precedence tiers, loosest to tightest: `|` < `&` < {`U`,`R`,`W`,`M`} < unary
/// {`!`,`G`,`F`,`X`}. All binary operators are right-associative. `1` is true;
/// `0` and `N` are false. Whitespace is insignificant.
pub fn parse_ltl(text: &str) -> Result<LtlFormula, ParseError> {
    let mut p = Parser::new(text);
    if p.peek().is_none() {
        return Err(ParseError::Empty);
    }
    let f = p.parse_or()?;
    match p.peek() {
        None => Ok(f),
        Some((off, _)) => Err(ParseError::Trailing { offset: off }),
    }
}

struct Parser<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Parser { text, pos: 0 }
    }

    fn peek(&mut self) -> Option<(usize, char)> {
        let start = self.pos;
        for (i, c) in self.text[start..].char_indices() {
            if !c.is_whitespace() {
                self.pos = start + i;
                return Some((start + i, c));
            }
        }
        self.pos = self.text.len();
        None
    }

    fn bump(&mut self, c: char) {
        self.pos += c.len_utf8();
    }

    fn parse_or(&mut self) -> Result<LtlFormula, ParseError> {
        let left = self.parse_and()?;
        if let Some((_, '|')) = self.peek() {
            self.bump('|');
            let right = self.parse_or()?;
            return Ok(LtlFormula::or(left, right));
        }
        Ok(left)
    }

    fn parse_and(&mut self) -> Result<LtlFormula, ParseError> {
        let left = self.parse_temp()?;
        if let Some((_, '&')) = self.peek() {
            self.bump('&');
            let right = self.parse_and()?;
            return Ok(LtlFormula::and(left, right));
        }
        Ok(left)
    }

    fn parse_temp(&mut self) -> Result<LtlFormula, ParseError> {
        let left = self.parse_unary()?;
        if let Some((_, op @ ('U' | 'R' | 'W' | 'M'))) = self.peek() {
            self.bump(op);
            let right = self.parse_temp()?;
            return Ok(match op {
                'U' => LtlFormula::until(left, right),
                'R' => LtlFormula::release(left, right),
                'W' => LtlFormula::weak_until(left, right),
                _ => LtlFormula::strong_release(left, right),
            });
        }
        Ok(left)
    }

    fn parse_unary(&mut self) -> Result<LtlFormula, ParseError> {
        let (off, c) = self.peek().ok_or(ParseError::UnexpectedEnd {
            offset: self.text.len(),
        })?;
        match c {
            '!' | 'G' | 'F' | 'X' => {
                self.bump(c);
                let child = self.parse_unary()?;
                Ok(match c {
                    '!' => LtlFormula::not(child),
                    'G' => LtlFormula::globally(child),
                    'F' => LtlFormula::finally(child),
                    _ => LtlFormula::next(child),
                })
            }
            '(' => {
                self.bump(c);
                let inner = self.parse_or()?;
                match self.peek() {
                    Some((_, ')')) => {
                        self.bump(')');
                        Ok(inner)
                    }
                    Some((o, _)) => Err(ParseError::Expected {
                        expected: "')'",
                        offset: o,
                    }),
                    None => Err(ParseError::UnexpectedEnd {
                        offset: self.text.len(),
                    }),
                }
            }
            '1' => {
                self.bump(c);
                Ok(LtlFormula::True)
            }
            // Table 1 writes false as N; common tooling writes 0.
            '0' | 'N' => {
                self.bump(c);
                Ok(LtlFormula::False)
            }
            'a'..='z' => {
                self.bump(c);
                Ok(LtlFormula::Atom(c))
            }
            other => Err(ParseError::UnknownToken {
                token: other,
                offset: off,
            }),
        }
    }
}
