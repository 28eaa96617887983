//! Closed-form coordinate expressions.
//!
//! Expressions are parsed once against a list of coordinate names, after which
//! every coordinate is a bound index. Evaluation runs either over plain `f64`
//! (used by finite-difference oracles) or over [`Jet2`] arithmetic.

mod parser;
mod structure_def;

use std::fmt::Write as _;

use thiserror::Error;

use crate::jet::{BinaryOp, Jet2, JetError, Point, UnaryOp};

pub use parser::{parse, ParseError, ParseErrorKind};
pub use structure_def::{load_structure_def, Domain, StructureDef, StructureDoc, StructureError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Sqrt,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Sqrt => "sqrt",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "sin" => Some(Func::Sin),
            "cos" => Some(Func::Cos),
            "exp" => Some(Func::Exp),
            "sqrt" => Some(Func::Sqrt),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Lit(f64),
    Coord(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Call(Func, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("point has dimension {got}, expression needs coordinate {index}")]
    DimensionMismatch { got: usize, index: usize },
    #[error(transparent)]
    Jet(#[from] JetError),
}

impl Expr {
    pub fn zero() -> Self {
        Expr::Lit(0.0)
    }

    /// True for the literal `0`, which structure files use for empty entries.
    pub fn is_zero_literal(&self) -> bool {
        matches!(self, Expr::Lit(v) if *v == 0.0)
    }

    /// Largest coordinate index referenced, if any.
    pub fn max_coord(&self) -> Option<usize> {
        match self {
            Expr::Lit(_) => None,
            Expr::Coord(i) => Some(*i),
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => a.max_coord(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                match (a.max_coord(), b.max_coord()) {
                    (Some(x), Some(y)) => Some(x.max(y)),
                    (x, y) => x.or(y),
                }
            }
        }
    }

    fn check_dim(&self, dim: usize) -> Result<(), EvalError> {
        match self.max_coord() {
            Some(index) if index >= dim => Err(EvalError::DimensionMismatch { got: dim, index }),
            _ => Ok(()),
        }
    }

    /// Plain floating-point evaluation.
    pub fn eval(&self, x: &[f64]) -> Result<f64, EvalError> {
        self.check_dim(x.len())?;
        self.eval_f64(x)
    }

    fn eval_f64(&self, x: &[f64]) -> Result<f64, EvalError> {
        Ok(match self {
            Expr::Lit(v) => *v,
            Expr::Coord(i) => x[*i],
            Expr::Neg(a) => -a.eval_f64(x)?,
            Expr::Add(a, b) => a.eval_f64(x)? + b.eval_f64(x)?,
            Expr::Sub(a, b) => a.eval_f64(x)? - b.eval_f64(x)?,
            Expr::Mul(a, b) => a.eval_f64(x)? * b.eval_f64(x)?,
            Expr::Div(a, b) => {
                let d = b.eval_f64(x)?;
                if d == 0.0 {
                    return Err(JetError::DivisionByZero.into());
                }
                a.eval_f64(x)? / d
            }
            Expr::Pow(a, k) => {
                let v = a.eval_f64(x)?;
                if *k < 0 && v == 0.0 {
                    return Err(JetError::DivisionByZero.into());
                }
                v.powi(*k)
            }
            Expr::Call(f, a) => {
                let v = a.eval_f64(x)?;
                match f {
                    Func::Sin => v.sin(),
                    Func::Cos => v.cos(),
                    Func::Exp => v.exp(),
                    Func::Sqrt => {
                        if v <= 0.0 {
                            return Err(JetError::SqrtNonPositive(v).into());
                        }
                        v.sqrt()
                    }
                }
            }
        })
    }

    /// Evaluate over jet arithmetic, giving value, gradient and Hessian at `p`.
    pub fn eval_jet(&self, p: &Point) -> Result<Jet2, EvalError> {
        self.check_dim(p.dim())?;
        self.jet(p)
    }

    fn jet(&self, p: &Point) -> Result<Jet2, EvalError> {
        let d = p.dim();
        Ok(match self {
            Expr::Lit(v) => Jet2::constant(d, *v),
            Expr::Coord(i) => Jet2::coordinate(p, *i)?,
            Expr::Neg(a) => -&a.jet(p)?,
            Expr::Add(a, b) => Jet2::binary(BinaryOp::Add, &a.jet(p)?, &b.jet(p)?)?,
            Expr::Sub(a, b) => Jet2::binary(BinaryOp::Sub, &a.jet(p)?, &b.jet(p)?)?,
            Expr::Mul(a, b) => Jet2::binary(BinaryOp::Mul, &a.jet(p)?, &b.jet(p)?)?,
            Expr::Div(a, b) => Jet2::binary(BinaryOp::Div, &a.jet(p)?, &b.jet(p)?)?,
            Expr::Pow(a, k) => {
                let base = a.jet(p)?;
                if *k < 0 && base.value() == 0.0 {
                    return Err(JetError::DivisionByZero.into());
                }
                Jet2::unary(UnaryOp::Powi(*k), &base)?
            }
            Expr::Call(f, a) => {
                let op = match f {
                    Func::Sin => UnaryOp::Sin,
                    Func::Cos => UnaryOp::Cos,
                    Func::Exp => UnaryOp::Exp,
                    Func::Sqrt => UnaryOp::Sqrt,
                };
                Jet2::unary(op, &a.jet(p)?)?
            }
        })
    }

    /// Render as source text that parses back to the same tree. Binary nodes
    /// are always parenthesised.
    pub fn to_source(&self, coords: &[String]) -> String {
        let mut out = String::new();
        self.write_source(coords, &mut out);
        out
    }

    fn write_source(&self, coords: &[String], out: &mut String) {
        match self {
            Expr::Lit(v) => {
                if *v < 0.0 || (*v == 0.0 && v.is_sign_negative()) {
                    let _ = write!(out, "(-{})", -v);
                } else {
                    let _ = write!(out, "{v}");
                }
            }
            Expr::Coord(i) => out.push_str(&coords[*i]),
            Expr::Neg(a) => {
                out.push_str("(-");
                a.write_source(coords, out);
                out.push(')');
            }
            Expr::Add(a, b) => binary(coords, out, a, " + ", b),
            Expr::Sub(a, b) => binary(coords, out, a, " - ", b),
            Expr::Mul(a, b) => binary(coords, out, a, " * ", b),
            Expr::Div(a, b) => binary(coords, out, a, " / ", b),
            Expr::Pow(a, k) => {
                out.push('(');
                a.write_source(coords, out);
                if *k < 0 {
                    let _ = write!(out, ")^(-{})", k.unsigned_abs());
                } else {
                    let _ = write!(out, ")^{k}");
                }
            }
            Expr::Call(f, a) => {
                out.push_str(f.name());
                out.push('(');
                a.write_source(coords, out);
                out.push(')');
            }
        }
    }
}

fn binary(coords: &[String], out: &mut String, a: &Expr, op: &str, b: &Expr) {
    out.push('(');
    a.write_source(coords, out);
    out.push_str(op);
    b.write_source(coords, out);
    out.push(')');
}
