//! Recursive-descent parser for terms and formulas.
//!
//! Grammar (precedence low to high):
//!
//! ```text
//! formula := quant | implies
//! quant   := ("forall" | "exists") ident ["in" "[" term "," term "]"] "." formula
//! implies := or ("=>" implies)?
//! or      := and ("\/" and)*
//! and     := unary ("/\" unary)*
//! unary   := "~" unary | "(" formula ")" | quant | comparison
//! comparison := term ("=" | "!=" | "<=" | "<" | ">=" | ">") term
//! term    := factor (("+" | "-") factor)*
//! factor  := power ("*" power)*
//! power   := atom ("^" power)?
//! atom    := int | "-" int | ident | "sum" "(" ident "," term "," term "," term ")" | "(" term ")"
//! ```
//!
//! `>=` and `>` are desugared to flipped `<=` / `<`. Parsing is
//! scoping-agnostic: unbound variables are not an error here.

use num_traits::Num;
use std::fmt;
use thiserror::Error;

use super::{Formula, Term};
use crate::Int;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("{line}:{col}: {message}")]
pub struct ParseError {
    pub line: u32,
    pub col: u32,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Int(Int),
    Ident(String),
    Forall,
    Exists,
    In,
    Sum,
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Dot,
    Eq,
    Neq,
    Le,
    Lt,
    Ge,
    Gt,
    AndOp,
    OrOp,
    ImpliesOp,
    Tilde,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Int(v) => return write!(f, "integer {v}"),
            Tok::Ident(v) => return write!(f, "identifier {v}"),
            Tok::Forall => "forall",
            Tok::Exists => "exists",
            Tok::In => "in",
            Tok::Sum => "sum",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Star => "*",
            Tok::Caret => "^",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBracket => "[",
            Tok::RBracket => "]",
            Tok::Comma => ",",
            Tok::Dot => ".",
            Tok::Eq => "=",
            Tok::Neq => "!=",
            Tok::Le => "<=",
            Tok::Lt => "<",
            Tok::Ge => ">=",
            Tok::Gt => ">",
            Tok::AndOp => "/\\",
            Tok::OrOp => "\\/",
            Tok::ImpliesOp => "=>",
            Tok::Tilde => "~",
        };
        write!(f, "{s}")
    }
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    line: u32,
    col: u32,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            src: src.as_bytes(),
            pos: 0,
            line: 1,
            col: 1,
        }
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError {
            line: self.line,
            col: self.col,
            message: message.into(),
        }
    }

    fn bump(&mut self) -> u8 {
        let c = self.src[self.pos];
        self.pos += 1;
        if c == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        c
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn peek2(&self) -> Option<u8> {
        self.src.get(self.pos + 1).copied()
    }

    fn tokens(mut self) -> Result<Vec<(Tok, u32, u32)>, ParseError> {
        let mut out = Vec::new();
        while let Some(c) = self.peek() {
            if c.is_ascii_whitespace() {
                self.bump();
                continue;
            }
            let (line, col) = (self.line, self.col);
            let tok = match c {
                b'0'..=b'9' => {
                    let start = self.pos;
                    while matches!(self.peek(), Some(b'0'..=b'9')) {
                        self.bump();
                    }
                    let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                    Tok::Int(Int::from_str_radix(text, 10).unwrap())
                }
                b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                    let start = self.pos;
                    while matches!(
                        self.peek(),
                        Some(b'a'..=b'z') | Some(b'A'..=b'Z') | Some(b'0'..=b'9') | Some(b'_')
                    ) {
                        self.bump();
                    }
                    let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                    match text {
                        "forall" => Tok::Forall,
                        "exists" => Tok::Exists,
                        "in" => Tok::In,
                        "sum" => Tok::Sum,
                        _ => Tok::Ident(text.to_string()),
                    }
                }
                b'+' => {
                    self.bump();
                    Tok::Plus
                }
                b'-' => {
                    self.bump();
                    Tok::Minus
                }
                b'*' => {
                    self.bump();
                    Tok::Star
                }
                b'^' => {
                    self.bump();
                    Tok::Caret
                }
                b'(' => {
                    self.bump();
                    Tok::LParen
                }
                b')' => {
                    self.bump();
                    Tok::RParen
                }
                b'[' => {
                    self.bump();
                    Tok::LBracket
                }
                b']' => {
                    self.bump();
                    Tok::RBracket
                }
                b',' => {
                    self.bump();
                    Tok::Comma
                }
                b'.' => {
                    self.bump();
                    Tok::Dot
                }
                b'~' => {
                    self.bump();
                    Tok::Tilde
                }
                b'=' => {
                    self.bump();
                    if self.peek() == Some(b'>') {
                        self.bump();
                        Tok::ImpliesOp
                    } else {
                        Tok::Eq
                    }
                }
                b'!' => {
                    self.bump();
                    if self.peek() == Some(b'=') {
                        self.bump();
                        Tok::Neq
                    } else {
                        return Err(self.error("expected '=' after '!'"));
                    }
                }
                b'<' => {
                    self.bump();
                    if self.peek() == Some(b'=') {
                        self.bump();
                        Tok::Le
                    } else {
                        Tok::Lt
                    }
                }
                b'>' => {
                    self.bump();
                    if self.peek() == Some(b'=') {
                        self.bump();
                        Tok::Ge
                    } else {
                        Tok::Gt
                    }
                }
                b'/' => {
                    if self.peek2() == Some(b'\\') {
                        self.bump();
                        self.bump();
                        Tok::AndOp
                    } else {
                        return Err(self.error("expected '\\' after '/'"));
                    }
                }
                b'\\' => {
                    if self.peek2() == Some(b'/') {
                        self.bump();
                        self.bump();
                        Tok::OrOp
                    } else {
                        return Err(self.error("expected '/' after '\\'"));
                    }
                }
                other => {
                    return Err(self.error(format!("unexpected character {:?}", other as char)))
                }
            };
            out.push((tok, line, col));
        }
        Ok(out)
    }
}

struct Parser {
    toks: Vec<(Tok, u32, u32)>,
    pos: usize,
    end: (u32, u32),
}

impl Parser {
    fn new(src: &str) -> Result<Self, ParseError> {
        let lexer = Lexer::new(src);
        let end_line = src.lines().count().max(1) as u32;
        let end_col = src.lines().last().map(|l| l.len() + 1).unwrap_or(1) as u32;
        Ok(Parser {
            toks: lexer.tokens()?,
            pos: 0,
            end: (end_line, end_col),
        })
    }

    fn here(&self) -> (u32, u32) {
        self.toks
            .get(self.pos)
            .map(|&(_, l, c)| (l, c))
            .unwrap_or(self.end)
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        let (line, col) = self.here();
        ParseError {
            line,
            col,
            message: message.into(),
        }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _, _)| t)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _, _)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, want: &Tok) -> Result<(), ParseError> {
        match self.peek() {
            Some(t) if t == want => {
                self.pos += 1;
                Ok(())
            }
            Some(t) => Err(self.error(format!("expected '{want}', found '{t}'"))),
            None => Err(self.error(format!("expected '{want}', found end of input"))),
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Ident(name)) => {
                let name = name.clone();
                self.pos += 1;
                Ok(name)
            }
            Some(t) => Err(self.error(format!("expected identifier, found '{t}'"))),
            None => Err(self.error("expected identifier, found end of input")),
        }
    }

    // term := factor (("+" | "-") factor)*
    fn term(&mut self) -> Result<Term, ParseError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    acc = acc + self.factor()?;
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    acc = acc - self.factor()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<Term, ParseError> {
        let mut acc = self.power()?;
        while self.peek() == Some(&Tok::Star) {
            self.pos += 1;
            acc = acc * self.power()?;
        }
        Ok(acc)
    }

    // right-associative
    fn power(&mut self) -> Result<Term, ParseError> {
        let base = self.atom()?;
        if self.peek() == Some(&Tok::Caret) {
            self.pos += 1;
            let exp = self.power()?;
            Ok(Term::pow(base, exp))
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Term, ParseError> {
        match self.bump() {
            Some(Tok::Int(v)) => Ok(Term::Int(v)),
            Some(Tok::Minus) => match self.bump() {
                Some(Tok::Int(v)) => Ok(Term::Int(-v)),
                _ => {
                    self.pos -= 1;
                    Err(self.error("expected integer literal after unary '-'"))
                }
            },
            Some(Tok::Ident(name)) => Ok(Term::Var(name)),
            Some(Tok::Sum) => {
                self.eat(&Tok::LParen)?;
                let index = self.ident()?;
                self.eat(&Tok::Comma)?;
                let lo = self.term()?;
                self.eat(&Tok::Comma)?;
                let hi = self.term()?;
                self.eat(&Tok::Comma)?;
                let body = self.term()?;
                self.eat(&Tok::RParen)?;
                Ok(Term::sum(&index, lo, hi, body))
            }
            Some(Tok::LParen) => {
                let t = self.term()?;
                self.eat(&Tok::RParen)?;
                Ok(t)
            }
            Some(t) => {
                self.pos -= 1;
                Err(self.error(format!("expected term, found '{t}'")))
            }
            None => Err(self.error("expected term, found end of input")),
        }
    }

    // formula := implies (quantifiers live at the unary level and
    // swallow everything to their right)
    fn formula(&mut self) -> Result<Formula, ParseError> {
        self.implies()
    }

    fn implies(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.or()?;
        if self.peek() == Some(&Tok::ImpliesOp) {
            self.pos += 1;
            let rhs = self.implies()?;
            Ok(Formula::implies(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn or(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.and()?;
        while self.peek() == Some(&Tok::OrOp) {
            self.pos += 1;
            acc = Formula::or(acc, self.and()?);
        }
        Ok(acc)
    }

    fn and(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.unary()?;
        while self.peek() == Some(&Tok::AndOp) {
            self.pos += 1;
            acc = Formula::and(acc, self.unary()?);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Some(Tok::Tilde) => {
                self.pos += 1;
                Ok(Formula::not(self.unary()?))
            }
            Some(Tok::Forall) | Some(Tok::Exists) => self.quantifier(),
            Some(Tok::LParen) => {
                // Either a parenthesized formula or a parenthesized term
                // opening a comparison; backtrack on the latter.
                let mark = self.pos;
                self.pos += 1;
                if let Ok(f) = self.formula() {
                    if self.peek() == Some(&Tok::RParen) {
                        self.pos += 1;
                        // A closed formula group must not be followed by
                        // a term operator; "(a + b) = c" needs the term
                        // route.
                        if !matches!(
                            self.peek(),
                            Some(Tok::Plus)
                                | Some(Tok::Minus)
                                | Some(Tok::Star)
                                | Some(Tok::Caret)
                                | Some(Tok::Eq)
                                | Some(Tok::Neq)
                                | Some(Tok::Le)
                                | Some(Tok::Lt)
                                | Some(Tok::Ge)
                                | Some(Tok::Gt)
                        ) {
                            return Ok(f);
                        }
                    }
                }
                self.pos = mark;
                self.comparison()
            }
            _ => self.comparison(),
        }
    }

    fn quantifier(&mut self) -> Result<Formula, ParseError> {
        let universal = match self.bump() {
            Some(Tok::Forall) => true,
            Some(Tok::Exists) => false,
            _ => unreachable!("caller checked"),
        };
        let var = self.ident()?;
        let range = if self.peek() == Some(&Tok::In) {
            self.pos += 1;
            self.eat(&Tok::LBracket)?;
            let lo = self.term()?;
            self.eat(&Tok::Comma)?;
            let hi = self.term()?;
            self.eat(&Tok::RBracket)?;
            Some((lo, hi))
        } else {
            None
        };
        self.eat(&Tok::Dot)?;
        let body = Box::new(self.formula()?);
        Ok(match (universal, range) {
            (true, None) => Formula::ForallNat(var, body),
            (true, Some((lo, hi))) => Formula::ForallRange(var, lo, hi, body),
            (false, None) => Formula::ExistsNat(var, body),
            (false, Some((lo, hi))) => Formula::ExistsRange(var, lo, hi, body),
        })
    }

    fn comparison(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.term()?;
        let op = match self.peek() {
            Some(Tok::Eq) => Tok::Eq,
            Some(Tok::Neq) => Tok::Neq,
            Some(Tok::Le) => Tok::Le,
            Some(Tok::Lt) => Tok::Lt,
            Some(Tok::Ge) => Tok::Ge,
            Some(Tok::Gt) => Tok::Gt,
            Some(t) => {
                let t = t.clone();
                return Err(self.error(format!("expected comparison operator, found '{t}'")));
            }
            None => return Err(self.error("expected comparison operator, found end of input")),
        };
        self.pos += 1;
        let rhs = self.term()?;
        Ok(match op {
            Tok::Eq => Formula::Eq(lhs, rhs),
            Tok::Neq => Formula::Neq(lhs, rhs),
            Tok::Le => Formula::Le(lhs, rhs),
            Tok::Lt => Formula::Lt(lhs, rhs),
            Tok::Ge => Formula::Le(rhs, lhs),
            Tok::Gt => Formula::Lt(rhs, lhs),
            _ => unreachable!(),
        })
    }

    fn finish<T>(self, value: T) -> Result<T, ParseError> {
        match self.peek() {
            None => Ok(value),
            Some(t) => {
                let t = t.clone();
                Err(self.error(format!("unexpected trailing '{t}'")))
            }
        }
    }
}

pub fn parse_term(text: &str) -> Result<Term, ParseError> {
    let mut p = Parser::new(text)?;
    let t = p.term()?;
    p.finish(t)
}

pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let mut p = Parser::new(text)?;
    let f = p.formula()?;
    p.finish(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn errors_carry_position() {
        let err = parse_formula("1 = )").unwrap_err();
        assert_eq!((err.line, err.col), (1, 5));
        let err = parse_formula("1 =\n= 2").unwrap_err();
        assert_eq!(err.line, 2);
        assert!(parse_term("sum(1, 0, 1, i)").is_err());
        assert!(parse_term("a +").is_err());
        assert!(parse_formula("a = b c").is_err());
    }

    #[test]
    fn parenthesized_term_starting_formula() {
        let f = parse_formula("(a + b) * c = d").unwrap();
        assert!(matches!(f, Formula::Eq(..)));
        let f = parse_formula("(a = b) /\\ (c = d)").unwrap();
        assert!(matches!(f, Formula::And(..)));
        let f = parse_formula("(sum(i, 0, 8, (8 - i) * 10^i) + 1) * (10 - 1) = x").unwrap();
        assert!(matches!(f, Formula::Eq(..)));
    }

    #[test]
    fn round_trip_fuzz() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1234);
        for _ in 0..1000 {
            let f = random_formula(&mut rng, 3);
            let printed = f.to_string();
            let reparsed = parse_formula(&printed)
                .unwrap_or_else(|e| panic!("failed to reparse {printed}: {e}"));
            assert_eq!(reparsed, f, "print: {printed}");
        }
    }

    pub(crate) fn random_formula(rng: &mut rand_chacha::ChaCha8Rng, depth: u32) -> Formula {
        use rand::Rng;
        let vars = ["x", "y", "n"];
        if depth == 0 || rng.gen_bool(0.35) {
            let l = crate::lang::tests::random_term(rng, 2, &vars);
            let r = crate::lang::tests::random_term(rng, 2, &vars);
            return match rng.gen_range(0..4) {
                0 => Formula::Eq(l, r),
                1 => Formula::Neq(l, r),
                2 => Formula::Le(l, r),
                _ => Formula::Lt(l, r),
            };
        }
        match rng.gen_range(0..7) {
            0 => Formula::and(
                random_formula(rng, depth - 1),
                random_formula(rng, depth - 1),
            ),
            1 => Formula::or(
                random_formula(rng, depth - 1),
                random_formula(rng, depth - 1),
            ),
            2 => Formula::not(random_formula(rng, depth - 1)),
            3 => Formula::implies(
                random_formula(rng, depth - 1),
                random_formula(rng, depth - 1),
            ),
            4 => Formula::forall_nat(
                vars[rng.gen_range(0..vars.len())],
                random_formula(rng, depth - 1),
            ),
            5 => Formula::forall_range(
                vars[rng.gen_range(0..vars.len())],
                crate::lang::tests::random_term(rng, 1, &vars),
                crate::lang::tests::random_term(rng, 1, &vars),
                random_formula(rng, depth - 1),
            ),
            _ => Formula::ExistsRange(
                vars[rng.gen_range(0..vars.len())].to_string(),
                crate::lang::tests::random_term(rng, 1, &vars),
                crate::lang::tests::random_term(rng, 1, &vars),
                Box::new(random_formula(rng, depth - 1)),
            ),
        }
    }
}
