//! Postfix form of an [`Expr`] for hot evaluation loops.

use super::{pow, BinaryOp, DomainFault, EvalOutcome, Evaluable, Expr, Function, UnaryOp};

const INLINE_STACK: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Op {
    Push(f64),
    X,
    Neg,
    Binary(BinaryOp),
    Call(Function),
}

/// An expression flattened to postfix order. Evaluates to the same bits and
/// the same faults as [`Expr::eval`].
#[derive(Debug, Clone, PartialEq)]
pub struct CompiledExpr {
    ops: Vec<Op>,
    depth: usize,
}

fn emit(e: &Expr, ops: &mut Vec<Op>, height: usize, depth: &mut usize) {
    *depth = (*depth).max(height + 1);
    match e {
        Expr::Number { value } => ops.push(Op::Push(*value)),
        Expr::Variable => ops.push(Op::X),
        Expr::Constant { name } => ops.push(Op::Push(name.value())),
        Expr::Unary { op: UnaryOp::Neg, operand } => {
            emit(operand, ops, height, depth);
            ops.push(Op::Neg);
        }
        Expr::Binary { op, lhs, rhs } => {
            emit(lhs, ops, height, depth);
            emit(rhs, ops, height + 1, depth);
            ops.push(Op::Binary(*op));
        }
        Expr::Call { func, arg } => {
            emit(arg, ops, height, depth);
            ops.push(Op::Call(*func));
        }
    }
}

impl CompiledExpr {
    pub fn new(e: &Expr) -> Self {
        let mut ops = Vec::new();
        let mut depth = 0;
        emit(e, &mut ops, 0, &mut depth);
        CompiledExpr { ops, depth }
    }

    pub fn eval(&self, x: f64) -> EvalOutcome {
        if self.depth <= INLINE_STACK {
            let mut stack = [0.0; INLINE_STACK];
            self.run(x, &mut stack)
        } else {
            let mut stack = vec![0.0; self.depth];
            self.run(x, &mut stack)
        }
    }

    fn run(&self, x: f64, stack: &mut [f64]) -> EvalOutcome {
        let mut top = 0;
        for op in &self.ops {
            let v = match *op {
                Op::Push(v) => {
                    top += 1;
                    v
                }
                Op::X => {
                    top += 1;
                    x
                }
                Op::Neg => -stack[top - 1],
                Op::Binary(b) => {
                    top -= 1;
                    let (l, r) = (stack[top - 1], stack[top]);
                    match b {
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
                Op::Call(func) => {
                    let a = stack[top - 1];
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
            if !v.is_finite() {
                return Err(DomainFault::NonFinite);
            }
            stack[top - 1] = v;
        }
        Ok(stack[0])
    }
}

impl Evaluable for CompiledExpr {
    fn value_at(&self, x: f64) -> EvalOutcome {
        self.eval(x)
    }
}

impl From<&Expr> for CompiledExpr {
    fn from(e: &Expr) -> Self {
        CompiledExpr::new(e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use proptest::prelude::*;

    const SOURCES: &[&str] = &[
        "x",
        "-x^2",
        "2^3^2",
        "exp(0.7*x^2 + 0.1*x)",
        "(2-x)^4 * sqrt(abs(x)) / (1 + x^2)",
        "log(x) - pi*e",
        "x^0.5",
        "1/x",
        "((((((((((x+1)*(x+2))+(x+3))*(x+4))-x)/(x+5))^2)+x)*x)+log(x+9))",
    ];

    #[test]
    fn matches_tree_evaluation() {
        for src in SOURCES {
            let e = parse(src).unwrap();
            let c = CompiledExpr::new(&e);
            for &x in &[-3.0, -1.0, -0.5, 0.0, 0.25, 1.0, 2.5, 1e300, f64::NAN] {
                let (tree, flat) = (e.eval(x), c.eval(x));
                match (tree, flat) {
                    (Ok(a), Ok(b)) => assert_eq!(a.to_bits(), b.to_bits(), "{src} at {x}"),
                    (a, b) => assert_eq!(a, b, "{src} at {x}"),
                }
            }
        }
    }

    #[test]
    fn deep_expressions_use_heap_stack() {
        let mut src = String::from("x");
        for _ in 0..40 {
            src = format!("(1+({src}))");
        }
        // right-nested sums keep every left operand on the stack
        let mut right = String::from("x");
        for i in 0..40 {
            right = format!("{i}+({right})");
        }
        for s in [src, right] {
            let e = parse(&s).unwrap();
            assert_eq!(CompiledExpr::new(&e).eval(0.5), e.eval(0.5));
        }
    }

    proptest! {
        #[test]
        fn agrees_on_random_points(x in -10.0f64..10.0, k in 0usize..9) {
            let e = parse(SOURCES[k]).unwrap();
            prop_assert_eq!(format!("{:?}", e.eval(x)), format!("{:?}", CompiledExpr::new(&e).eval(x)));
        }
    }
}
