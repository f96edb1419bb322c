//! A small deterministic expression language for scalar functions of `x`.
//!
//! Grammar (EBNF), in order of increasing precedence:
//!
//! ```text
//! expr    = term , { ( "+" | "-" ) , term } ;
//! term    = unary , { ( "*" | "/" ) , unary } ;
//! unary   = "-" , unary | power ;
//! power   = primary , [ "^" , unary ] ;          (* right-associative *)
//! primary = number | "x" | "e" | "pi"
//!         | func , "(" , expr , ")"
//!         | "(" , expr , ")" ;
//! func    = "exp" | "log" | "sqrt" | "abs" ;
//! number  = digits , [ "." , [ digits ] ] , [ exponent ]
//!         | "." , digits , [ exponent ] ;
//! exponent = ( "e" | "E" ) , [ "+" | "-" ] , digits ;
//! ```
//!
//! `^` binds tighter than unary minus, so `-x^2` is `-(x^2)`, and `2^3^2`
//! is `2^(3^2)`. Implicit multiplication (`2x`) is rejected.

mod compiled;
mod lexer;
mod parser;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use compiled::CompiledExpr;
pub use parser::{parse, ParseError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnaryOp {
    Neg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinaryOp {
    pub fn symbol(self) -> char {
        match self {
            BinaryOp::Add => '+',
            BinaryOp::Sub => '-',
            BinaryOp::Mul => '*',
            BinaryOp::Div => '/',
            BinaryOp::Pow => '^',
        }
    }
}

/// The closed set of callable functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Function {
    Exp,
    Log,
    Sqrt,
    Abs,
}

impl Function {
    pub fn name(self) -> &'static str {
        match self {
            Function::Exp => "exp",
            Function::Log => "log",
            Function::Sqrt => "sqrt",
            Function::Abs => "abs",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "exp" => Some(Function::Exp),
            "log" => Some(Function::Log),
            "sqrt" => Some(Function::Sqrt),
            "abs" => Some(Function::Abs),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Constant {
    E,
    Pi,
}

impl Constant {
    pub fn name(self) -> &'static str {
        match self {
            Constant::E => "e",
            Constant::Pi => "pi",
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Constant::E => std::f64::consts::E,
            Constant::Pi => std::f64::consts::PI,
        }
    }
}

/// Immutable expression tree for a real function of the single variable `x`.
///
/// Number literals produced by the parser are always non-negative; negation
/// is a separate [`UnaryOp::Neg`] node. Use [`Expr::number`] when building
/// trees by hand so that the pretty-printed form re-parses to the same tree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum Expr {
    Number {
        value: f64,
    },
    Variable,
    Constant {
        name: Constant,
    },
    Unary {
        op: UnaryOp,
        operand: Box<Expr>,
    },
    Binary {
        op: BinaryOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    Call {
        func: Function,
        arg: Box<Expr>,
    },
}

/// Why an expression could not be evaluated at a point.
#[derive(Debug, Clone, Copy, PartialEq, Error, Serialize, Deserialize)]
#[serde(tag = "fault", rename_all = "snake_case")]
pub enum DomainFault {
    #[error("log of non-positive argument {arg}")]
    LogOfNonPositive { arg: f64 },
    #[error("sqrt of negative argument {arg}")]
    SqrtOfNegative { arg: f64 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("negative base {base} raised to non-integer power {exponent}")]
    NegativeBaseFractionalPower { base: f64, exponent: f64 },
    #[error("non-finite result")]
    NonFinite,
}

/// Value of an expression at a point, or the fault that prevented it.
pub type EvalOutcome = Result<f64, DomainFault>;

impl Expr {
    /// A literal; negative values become `Unary(neg, Number(|v|))`.
    pub fn number(value: f64) -> Expr {
        if value.is_sign_negative() && value != 0.0 {
            Expr::neg(Expr::Number { value: -value })
        } else {
            Expr::Number { value: value.abs() }
        }
    }

    pub fn var() -> Expr {
        Expr::Variable
    }

    pub fn constant(name: Constant) -> Expr {
        Expr::Constant { name }
    }

    pub fn neg(operand: Expr) -> Expr {
        Expr::Unary {
            op: UnaryOp::Neg,
            operand: Box::new(operand),
        }
    }

    pub fn binary(op: BinaryOp, lhs: Expr, rhs: Expr) -> Expr {
        Expr::Binary {
            op,
            lhs: Box::new(lhs),
            rhs: Box::new(rhs),
        }
    }

    pub fn call(func: Function, arg: Expr) -> Expr {
        Expr::Call {
            func,
            arg: Box::new(arg),
        }
    }

    pub fn add(lhs: Expr, rhs: Expr) -> Expr {
        Expr::binary(BinaryOp::Add, lhs, rhs)
    }

    pub fn sub(lhs: Expr, rhs: Expr) -> Expr {
        Expr::binary(BinaryOp::Sub, lhs, rhs)
    }

    pub fn mul(lhs: Expr, rhs: Expr) -> Expr {
        Expr::binary(BinaryOp::Mul, lhs, rhs)
    }

    pub fn div(lhs: Expr, rhs: Expr) -> Expr {
        Expr::binary(BinaryOp::Div, lhs, rhs)
    }

    pub fn pow(lhs: Expr, rhs: Expr) -> Expr {
        Expr::binary(BinaryOp::Pow, lhs, rhs)
    }

    /// Product of a non-empty list of factors, folded left.
    pub fn product(factors: &[Expr]) -> Option<Expr> {
        let (first, rest) = factors.split_first()?;
        Some(
            rest.iter()
                .fold(first.clone(), |acc, f| Expr::mul(acc, f.clone())),
        )
    }

    /// Evaluates the expression at `x` in binary64 arithmetic.
    pub fn eval(&self, x: f64) -> EvalOutcome {
        let v = match self {
            Expr::Number { value } => *value,
            Expr::Variable => x,
            Expr::Constant { name } => name.value(),
            Expr::Unary { op: UnaryOp::Neg, operand } => -operand.eval(x)?,
            Expr::Binary { op, lhs, rhs } => {
                let l = lhs.eval(x)?;
                let r = rhs.eval(x)?;
                match op {
                    BinaryOp::Add => l + r,
                    BinaryOp::Sub => l - r,
                    BinaryOp::Mul => l * r,
                    BinaryOp::Div => {
                        if r == 0.0 {
                            return Err(DomainFault::DivisionByZero);
                        }
                        l / r
                    }
                    BinaryOp::Pow => pow(l, r)?,
                }
            }
            Expr::Call { func, arg } => {
                let a = arg.eval(x)?;
                match func {
                    Function::Exp => a.exp(),
                    Function::Log => {
                        if a <= 0.0 {
                            return Err(DomainFault::LogOfNonPositive { arg: a });
                        }
                        a.ln()
                    }
                    Function::Sqrt => {
                        if a < 0.0 {
                            return Err(DomainFault::SqrtOfNegative { arg: a });
                        }
                        a.sqrt()
                    }
                    Function::Abs => a.abs(),
                }
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(DomainFault::NonFinite)
        }
    }

    /// Flattens the tree for repeated evaluation.
    pub fn compile(&self) -> CompiledExpr {
        CompiledExpr::new(self)
    }

    /// Fully parenthesized canonical text; `parse(&e.pretty())` equals `e`.
    pub fn pretty(&self) -> String {
        let mut out = String::new();
        self.write_pretty(&mut out);
        out
    }

    fn write_pretty(&self, out: &mut String) {
        match self {
            Expr::Number { value } => {
                if value.is_sign_negative() {
                    out.push_str("(-");
                    out.push_str(&format_number(-value));
                    out.push(')');
                } else {
                    out.push_str(&format_number(*value));
                }
            }
            Expr::Variable => out.push('x'),
            Expr::Constant { name } => out.push_str(name.name()),
            Expr::Unary { op: UnaryOp::Neg, operand } => {
                out.push_str("(-");
                operand.write_pretty(out);
                out.push(')');
            }
            Expr::Binary { op, lhs, rhs } => {
                out.push('(');
                lhs.write_pretty(out);
                out.push(op.symbol());
                rhs.write_pretty(out);
                out.push(')');
            }
            Expr::Call { func, arg } => {
                out.push_str(func.name());
                out.push('(');
                arg.write_pretty(out);
                out.push(')');
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.pretty())
    }
}

impl std::str::FromStr for Expr {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

/// Anything that can be sampled as a real function of one variable.
pub trait Evaluable {
    fn value_at(&self, x: f64) -> EvalOutcome;
}

impl Evaluable for Expr {
    fn value_at(&self, x: f64) -> EvalOutcome {
        self.eval(x)
    }
}

impl<F> Evaluable for F
where
    F: Fn(f64) -> EvalOutcome,
{
    fn value_at(&self, x: f64) -> EvalOutcome {
        self(x)
    }
}

/// Free-function form of [`Expr::eval`].
pub fn evaluate(e: &Expr, x: f64) -> EvalOutcome {
    e.eval(x)
}

/// Free-function form of [`Expr::pretty`].
pub fn pretty(e: &Expr) -> String {
    e.pretty()
}

fn pow(base: f64, exponent: f64) -> EvalOutcome {
    if base < 0.0 && exponent.fract() != 0.0 {
        return Err(DomainFault::NegativeBaseFractionalPower { base, exponent });
    }
    if base == 0.0 && exponent < 0.0 {
        return Err(DomainFault::DivisionByZero);
    }
    if exponent == 2.0 {
        return Ok(base * base);
    }
    if exponent.fract() == 0.0 && exponent.abs() <= 64.0 {
        return Ok(base.powi(exponent as i32));
    }
    Ok(base.powf(exponent))
}

// Shortest representation that round-trips through the lexer.
fn format_number(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || (1e-5..1e15).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Expr {
        parse(s).unwrap()
    }

    #[test]
    fn evaluates_simple_arithmetic() {
        assert_eq!(p("2*x+1").eval(3.0), Ok(7.0));
        assert_eq!(p("exp(x)").eval(1.0), Ok(std::f64::consts::E));
    }

    #[test]
    fn log_of_zero_is_a_fault() {
        assert!(matches!(
            p("log(x)").eval(0.0),
            Err(DomainFault::LogOfNonPositive { .. })
        ));
    }

    #[test]
    fn power_is_right_associative() {
        assert_eq!(p("2^3^2").eval(0.0), Ok(512.0));
    }

    #[test]
    fn unary_minus_binds_looser_than_power() {
        assert_eq!(p("-x^2").eval(3.0), Ok(-9.0));
        assert_eq!(p("-x^2"), Expr::neg(Expr::pow(Expr::var(), Expr::number(2.0))));
    }

    #[test]
    fn fractional_power_of_negative_faults() {
        assert!(matches!(
            p("x^0.5").eval(-4.0),
            Err(DomainFault::NegativeBaseFractionalPower { .. })
        ));
        assert_eq!(p("x^3").eval(-2.0), Ok(-8.0));
    }

    #[test]
    fn other_faults() {
        assert_eq!(p("1/x").eval(0.0), Err(DomainFault::DivisionByZero));
        assert_eq!(p("x^(-1)").eval(0.0), Err(DomainFault::DivisionByZero));
        assert!(matches!(
            p("sqrt(x)").eval(-1.0),
            Err(DomainFault::SqrtOfNegative { .. })
        ));
        assert_eq!(p("exp(x)").eval(1000.0), Err(DomainFault::NonFinite));
    }

    #[test]
    fn pretty_is_fully_parenthesized() {
        assert_eq!(p("2*x+1").pretty(), "((2*x)+1)");
        assert_eq!(Expr::call(Function::Exp, Expr::var()).pretty(), "exp(x)");
        assert_eq!(p("-x^2").pretty(), "(-(x^2))");
        assert_eq!(p("pi*e").pretty(), "(pi*e)");
    }

    #[test]
    fn pretty_round_trips_nested_power() {
        let e = p("x^2^3");
        assert_eq!(parse(&e.pretty()).unwrap(), e);
    }

    #[test]
    fn built_negative_literals_round_trip() {
        let e = Expr::add(Expr::number(-0.25), Expr::mul(Expr::number(1e-9), Expr::var()));
        assert_eq!(parse(&e.pretty()).unwrap(), e);
        let big = Expr::number(6.02e23);
        assert_eq!(parse(&big.pretty()).unwrap(), big);
    }

    #[test]
    fn evaluation_is_deterministic() {
        let e = p("exp(0.7*x^2+0.1*x)/sqrt(abs(x)+1)");
        let first = e.eval(0.3).unwrap();
        for _ in 0..10 {
            assert_eq!(e.eval(0.3).unwrap().to_bits(), first.to_bits());
        }
    }
}
