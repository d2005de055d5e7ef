use super::LtlFormula;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Ident(String),
    True,
    False,
    Not,
    And,
    Or,
    Implies,
    Next,
    Eventually,
    Globally,
    Until,
    LParen,
    RParen,
}

fn describe(token: &Token) -> String {
    match token {
        Token::Ident(name) => format!("`{name}`"),
        Token::True => "`true`".into(),
        Token::False => "`false`".into(),
        Token::Not => "`!`".into(),
        Token::And => "`&`".into(),
        Token::Or => "`|`".into(),
        Token::Implies => "`->`".into(),
        Token::Next => "`X`".into(),
        Token::Eventually => "`F`".into(),
        Token::Globally => "`G`".into(),
        Token::Until => "`U`".into(),
        Token::LParen => "`(`".into(),
        Token::RParen => "`)`".into(),
    }
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let token = match c {
            b'!' => Token::Not,
            b'&' => Token::And,
            b'|' => Token::Or,
            b'(' => Token::LParen,
            b')' => Token::RParen,
            b'-' if bytes.get(i + 1) == Some(&b'>') => {
                i += 1;
                Token::Implies
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i + 1 < bytes.len() && (bytes[i + 1].is_ascii_alphanumeric() || bytes[i + 1] == b'_') {
                    i += 1;
                }
                match &text[start..=i] {
                    "true" => Token::True,
                    "false" => Token::False,
                    "X" => Token::Next,
                    "F" => Token::Eventually,
                    "G" => Token::Globally,
                    "U" => Token::Until,
                    ident => Token::Ident(ident.to_string()),
                }
            }
            _ => {
                let ch = text[start..].chars().next().unwrap_or('?');
                return Err(Error::Syntax {
                    position: start,
                    message: format!("unexpected character `{ch}`"),
                });
            }
        };
        i += 1;
        tokens.push((start, token));
    }
    Ok(tokens)
}

struct Parser<'a, S> {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    end: usize,
    ap: &'a [S],
}

impl<S: AsRef<str>> Parser<'_, S> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |(o, _)| *o)
    }

    fn eat(&mut self, token: &Token) -> bool {
        if self.peek() == Some(token) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn error(&self, expected: &str) -> Error {
        let message = match self.peek() {
            Some(t) => format!("expected {expected}, found {}", describe(t)),
            None => format!("expected {expected}, found end of input"),
        };
        Error::Syntax {
            position: self.offset(),
            message,
        }
    }

    fn implication(&mut self) -> Result<LtlFormula> {
        let lhs = self.disjunction()?;
        if self.eat(&Token::Implies) {
            let rhs = self.implication()?;
            return Ok(LtlFormula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<LtlFormula> {
        let mut lhs = self.conjunction()?;
        while self.eat(&Token::Or) {
            let rhs = self.conjunction()?;
            lhs = LtlFormula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<LtlFormula> {
        let mut lhs = self.until()?;
        while self.eat(&Token::And) {
            let rhs = self.until()?;
            lhs = LtlFormula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn until(&mut self) -> Result<LtlFormula> {
        let lhs = self.unary()?;
        if self.eat(&Token::Until) {
            let rhs = self.until()?;
            return Ok(LtlFormula::until(lhs, rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<LtlFormula> {
        let op = match self.peek() {
            Some(Token::Not) => LtlFormula::not,
            Some(Token::Next) => LtlFormula::next,
            Some(Token::Eventually) => LtlFormula::eventually,
            Some(Token::Globally) => LtlFormula::globally,
            _ => return self.primary(),
        };
        self.pos += 1;
        Ok(op(self.unary()?))
    }

    fn primary(&mut self) -> Result<LtlFormula> {
        let offset = self.offset();
        match self.peek().cloned() {
            Some(Token::True) => {
                self.pos += 1;
                Ok(LtlFormula::True)
            }
            Some(Token::False) => {
                self.pos += 1;
                Ok(LtlFormula::False)
            }
            Some(Token::Ident(name)) => {
                if !self.ap.iter().any(|a| a.as_ref() == name) {
                    return Err(Error::UnknownAtom { name, position: offset });
                }
                self.pos += 1;
                Ok(LtlFormula::Atom(name))
            }
            Some(Token::LParen) => {
                self.pos += 1;
                let inner = self.implication()?;
                if !self.eat(&Token::RParen) {
                    return Err(self.error("`)`"));
                }
                Ok(inner)
            }
            _ => Err(self.error("a formula")),
        }
    }
}

/// Parses `text` into a formula whose atoms are all drawn from `ap`.
pub fn parse_ltl<S: AsRef<str>>(text: &str, ap: &[S]) -> Result<LtlFormula> {
    let tokens = tokenize(text)?;
    let mut parser = Parser {
        tokens,
        pos: 0,
        end: text.len(),
        ap,
    };
    let formula = parser.implication()?;
    if parser.peek().is_some() {
        return Err(parser.error("end of input"));
    }
    Ok(formula)
}
