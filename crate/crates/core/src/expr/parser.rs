use serde::Serialize;
use thiserror::Error;

use super::lexer::{tokenize, Token, TokenKind};
use super::{BinaryOp, Constant, Expr, Function};

const MAX_NESTING: usize = 256;

#[derive(Debug, Clone, PartialEq, Error, Serialize)]
#[serde(tag = "error", rename_all = "snake_case")]
pub enum ParseError {
    #[error("syntax error at offset {offset}: expected {}, found {found}", expected.join(" or "))]
    Syntax {
        offset: usize,
        expected: Vec<String>,
        found: String,
    },
    #[error("unknown identifier `{name}` at offset {offset}")]
    UnknownIdentifier { offset: usize, name: String },
    #[error("invalid number `{text}` at offset {offset}")]
    InvalidNumber { offset: usize, text: String },
    #[error("unexpected character {ch:?} at offset {offset}")]
    UnexpectedCharacter { offset: usize, ch: char },
    #[error("expression nested deeper than {MAX_NESTING} levels at offset {offset}")]
    TooDeep { offset: usize },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. }
            | ParseError::UnknownIdentifier { offset, .. }
            | ParseError::InvalidNumber { offset, .. }
            | ParseError::UnexpectedCharacter { offset, .. }
            | ParseError::TooDeep { offset } => *offset,
        }
    }
}

/// Parses `source` into an [`Expr`].
pub fn parse(source: &str) -> Result<Expr, ParseError> {
    let tokens = tokenize(source)?;
    let mut parser = Parser {
        tokens,
        pos: 0,
        depth: 0,
    };
    let expr = parser.expr()?;
    match parser.peek().kind {
        TokenKind::End => Ok(expr),
        _ => Err(parser.unexpected(&["operator", "end of input"])),
    }
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    depth: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn bump(&mut self) -> Token {
        let tok = self.tokens[self.pos].clone();
        if !matches!(tok.kind, TokenKind::End) {
            self.pos += 1;
        }
        tok
    }

    fn unexpected(&self, expected: &[&str]) -> ParseError {
        let tok = self.peek();
        ParseError::Syntax {
            offset: tok.offset,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: tok.kind.describe(),
        }
    }

    fn enter(&mut self) -> Result<(), ParseError> {
        self.depth += 1;
        if self.depth > MAX_NESTING {
            return Err(ParseError::TooDeep {
                offset: self.peek().offset,
            });
        }
        Ok(())
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek().kind {
                TokenKind::Plus => BinaryOp::Add,
                TokenKind::Minus => BinaryOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek().kind {
                TokenKind::Star => BinaryOp::Mul,
                TokenKind::Slash => BinaryOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        self.enter()?;
        let out = if matches!(self.peek().kind, TokenKind::Minus) {
            self.bump();
            self.unary().map(Expr::neg)
        } else {
            self.power()
        };
        self.depth -= 1;
        out
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if matches!(self.peek().kind, TokenKind::Caret) {
            self.bump();
            let exponent = self.unary()?;
            return Ok(Expr::pow(base, exponent));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let tok = self.peek().clone();
        match tok.kind {
            TokenKind::Number(value) => {
                self.bump();
                Ok(Expr::Number { value })
            }
            TokenKind::LParen => {
                self.bump();
                self.enter()?;
                let inner = self.expr()?;
                self.depth -= 1;
                self.expect_rparen()?;
                Ok(inner)
            }
            TokenKind::Ident(name) => {
                self.bump();
                match name.as_str() {
                    "x" => Ok(Expr::Variable),
                    "e" => Ok(Expr::constant(Constant::E)),
                    "pi" => Ok(Expr::constant(Constant::Pi)),
                    other => {
                        let func = Function::from_name(other).ok_or_else(|| {
                            ParseError::UnknownIdentifier {
                                offset: tok.offset,
                                name: other.to_string(),
                            }
                        })?;
                        if !matches!(self.peek().kind, TokenKind::LParen) {
                            return Err(self.unexpected(&["`(`"]));
                        }
                        self.bump();
                        self.enter()?;
                        let arg = self.expr()?;
                        self.depth -= 1;
                        self.expect_rparen()?;
                        Ok(Expr::call(func, arg))
                    }
                }
            }
            _ => Err(self.unexpected(&["expression"])),
        }
    }

    fn expect_rparen(&mut self) -> Result<(), ParseError> {
        if matches!(self.peek().kind, TokenKind::RParen) {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(&["operator", "`)`"]))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(v: f64) -> Expr {
        Expr::Number { value: v }
    }

    #[test]
    fn linear_expression() {
        assert_eq!(
            parse("2*x+1").unwrap(),
            Expr::add(Expr::mul(n(2.0), Expr::var()), n(1.0))
        );
    }

    #[test]
    fn call_with_power() {
        assert_eq!(
            parse("exp(x^2)").unwrap(),
            Expr::call(Function::Exp, Expr::pow(Expr::var(), n(2.0)))
        );
    }

    #[test]
    fn unbalanced_call_reports_offset() {
        let err = parse("log(").unwrap_err();
        assert_eq!(err.offset(), 4);
        match err {
            ParseError::Syntax { expected, .. } => assert_eq!(expected, vec!["expression"]),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn trailing_operator() {
        let err = parse("2*x+").unwrap_err();
        assert_eq!(err.offset(), 4);
    }

    #[test]
    fn implicit_multiplication_is_rejected() {
        let err = parse("2x").unwrap_err();
        assert_eq!(err.offset(), 1);
        assert!(matches!(err, ParseError::Syntax { .. }));
    }

    #[test]
    fn unknown_identifiers() {
        assert_eq!(
            parse("sin(x)").unwrap_err(),
            ParseError::UnknownIdentifier {
                offset: 0,
                name: "sin".into()
            }
        );
        assert!(matches!(
            parse("x + y").unwrap_err(),
            ParseError::UnknownIdentifier { offset: 4, .. }
        ));
    }

    #[test]
    fn function_name_needs_parenthesis() {
        let err = parse("exp x").unwrap_err();
        assert_eq!(err.offset(), 4);
    }

    #[test]
    fn subtraction_is_left_associative() {
        assert_eq!(parse("5-2-1").unwrap().eval(0.0), Ok(2.0));
        assert_eq!(parse("8/4/2").unwrap().eval(0.0), Ok(1.0));
    }

    #[test]
    fn power_accepts_negative_exponent() {
        assert_eq!(parse("2^-1").unwrap().eval(0.0), Ok(0.5));
    }

    #[test]
    fn deep_nesting_is_bounded() {
        let src = format!("{}x{}", "(".repeat(1000), ")".repeat(1000));
        assert!(matches!(parse(&src), Err(ParseError::TooDeep { .. })));
        let ok = format!("{}x{}", "(".repeat(50), ")".repeat(50));
        assert_eq!(parse(&ok).unwrap(), Expr::var());
    }
}
