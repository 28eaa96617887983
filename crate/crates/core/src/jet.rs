//! Second-order forward-mode differentiation.
//!
//! A [`Jet2`] carries the value, gradient and Hessian of a scalar function of
//! the chart coordinates at one point. All tensor derivatives in the crate are
//! read off jets, so every residual stays at rounding level instead of picking
//! up finite-difference truncation error.
//!
//! The Hessian is stored as a packed upper triangle, so symmetry holds by
//! construction rather than by convention.

use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum JetError {
    #[error("coordinate index {index} out of range for chart dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("jet dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("division by a jet with zero value")]
    DivisionByZero,
    #[error("sqrt of non-positive value {0}")]
    SqrtNonPositive(f64),
}

/// Coordinates of a point in a chart of dimension `2n+1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    coords: Vec<f64>,
}

impl Point {
    pub fn new(coords: Vec<f64>) -> Self {
        Self { coords }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn coord(&self, i: usize) -> f64 {
        self.coords[i]
    }
}

impl From<Vec<f64>> for Point {
    fn from(coords: Vec<f64>) -> Self {
        Self::new(coords)
    }
}

/// How to seed a jet at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Seed {
    Constant(f64),
    Coordinate(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOp {
    Neg,
    Sin,
    Cos,
    Exp,
    Sqrt,
    Powi(i32),
}

#[inline]
fn packed_len(dim: usize) -> usize {
    dim * (dim + 1) / 2
}

// Row `i` of the packed upper triangle starts at `i*dim - i*(i-1)/2`.
#[inline]
fn packed_index(dim: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * dim - i * i.saturating_sub(1) / 2 + (j - i)
}

/// Value, gradient and Hessian of a scalar at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet2 {
    value: f64,
    grad: Vec<f64>,
    hess: Vec<f64>,
}

impl Jet2 {
    pub fn constant(dim: usize, c: f64) -> Self {
        Self {
            value: c,
            grad: vec![0.0; dim],
            hess: vec![0.0; packed_len(dim)],
        }
    }

    pub fn zero(dim: usize) -> Self {
        Self::constant(dim, 0.0)
    }

    /// The coordinate function `x^i` expanded at `p`.
    pub fn coordinate(p: &Point, i: usize) -> Result<Self, JetError> {
        let dim = p.dim();
        if i >= dim {
            return Err(JetError::IndexOutOfRange { index: i, dim });
        }
        let mut jet = Self::constant(dim, p.coord(i));
        jet.grad[i] = 1.0;
        Ok(jet)
    }

    pub fn seed(p: &Point, seed: Seed) -> Result<Self, JetError> {
        match seed {
            Seed::Constant(c) => Ok(Self::constant(p.dim(), c)),
            Seed::Coordinate(i) => Self::coordinate(p, i),
        }
    }

    /// Assemble a jet from explicit parts. The Hessian is read from its upper
    /// triangle only.
    pub fn from_parts(value: f64, grad: Vec<f64>, hessian: &[Vec<f64>]) -> Self {
        let dim = grad.len();
        let mut hess = vec![0.0; packed_len(dim)];
        for i in 0..dim {
            for j in i..dim {
                hess[packed_index(dim, i, j)] = hessian[i][j];
            }
        }
        Self { value, grad, hess }
    }

    pub fn dim(&self) -> usize {
        self.grad.len()
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn gradient(&self) -> &[f64] {
        &self.grad
    }

    pub fn hessian(&self, i: usize, j: usize) -> f64 {
        self.hess[packed_index(self.dim(), i, j)]
    }

    pub fn hessian_rows(&self) -> Vec<Vec<f64>> {
        let d = self.dim();
        (0..d)
            .map(|i| (0..d).map(|j| self.hessian(i, j)).collect())
            .collect()
    }

    /// First partial `∂_k` as a first-order jet.
    pub fn partial(&self, k: usize) -> Jet1 {
        let d = self.dim();
        Jet1 {
            value: self.grad[k],
            grad: (0..d).map(|l| self.hessian(k, l)).collect(),
        }
    }

    /// Drop the second-order part.
    pub fn truncate(&self) -> Jet1 {
        Jet1 {
            value: self.value,
            grad: self.grad.clone(),
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            value: self.value * s,
            grad: self.grad.iter().map(|g| g * s).collect(),
            hess: self.hess.iter().map(|h| h * s).collect(),
        }
    }

    fn check_dim(&self, other: &Self) -> Result<(), JetError> {
        if self.dim() != other.dim() {
            return Err(JetError::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(())
    }

    pub fn binary(op: BinaryOp, a: &Self, b: &Self) -> Result<Self, JetError> {
        a.check_dim(b)?;
        Ok(match op {
            BinaryOp::Add => a.zip(b, |x, y| x + y),
            BinaryOp::Sub => a.zip(b, |x, y| x - y),
            BinaryOp::Mul => a.mul_unchecked(b),
            BinaryOp::Div => {
                if b.value == 0.0 {
                    return Err(JetError::DivisionByZero);
                }
                a.div_unchecked(b)
            }
        })
    }

    pub fn unary(op: UnaryOp, a: &Self) -> Result<Self, JetError> {
        let v = a.value;
        // (f, f', f'') of the elementary function at v
        let (f0, f1, f2) = match op {
            UnaryOp::Neg => return Ok(-a),
            UnaryOp::Sin => (v.sin(), v.cos(), -v.sin()),
            UnaryOp::Cos => (v.cos(), -v.sin(), -v.cos()),
            UnaryOp::Exp => {
                let e = v.exp();
                (e, e, e)
            }
            UnaryOp::Sqrt => {
                if v <= 0.0 {
                    return Err(JetError::SqrtNonPositive(v));
                }
                let s = v.sqrt();
                (s, 0.5 / s, -0.25 / (s * v))
            }
            UnaryOp::Powi(k) => return Ok(a.powi(k)),
        };
        Ok(a.chain(f0, f1, f2))
    }

    /// Compose with a scalar function given its value and first two derivatives.
    fn chain(&self, f0: f64, f1: f64, f2: f64) -> Self {
        let d = self.dim();
        let mut hess = vec![0.0; packed_len(d)];
        for i in 0..d {
            for j in i..d {
                let idx = packed_index(d, i, j);
                hess[idx] = f1 * self.hess[idx] + f2 * self.grad[i] * self.grad[j];
            }
        }
        Self {
            value: f0,
            grad: self.grad.iter().map(|g| f1 * g).collect(),
            hess,
        }
    }

    /// Integer power. Negative exponents are only meaningful away from zero.
    pub fn powi(&self, k: i32) -> Self {
        match k {
            0 => Self::constant(self.dim(), 1.0),
            1 => self.clone(),
            _ => {
                let v = self.value;
                let kf = f64::from(k);
                let f0 = v.powi(k);
                let f1 = kf * v.powi(k - 1);
                let f2 = kf * (kf - 1.0) * v.powi(k - 2);
                self.chain(f0, f1, f2)
            }
        }
    }

    fn zip(&self, other: &Self, op: impl Fn(f64, f64) -> f64) -> Self {
        Self {
            value: op(self.value, other.value),
            grad: self
                .grad
                .iter()
                .zip(&other.grad)
                .map(|(x, y)| op(*x, *y))
                .collect(),
            hess: self
                .hess
                .iter()
                .zip(&other.hess)
                .map(|(x, y)| op(*x, *y))
                .collect(),
        }
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        let d = self.dim();
        let (a, b) = (self, other);
        let mut hess = vec![0.0; packed_len(d)];
        for i in 0..d {
            for j in i..d {
                let idx = packed_index(d, i, j);
                hess[idx] = a.value * b.hess[idx]
                    + b.value * a.hess[idx]
                    + (a.grad[i] * b.grad[j] + a.grad[j] * b.grad[i]);
            }
        }
        Self {
            value: a.value * b.value,
            grad: a
                .grad
                .iter()
                .zip(&b.grad)
                .map(|(ga, gb)| a.value * gb + b.value * ga)
                .collect(),
            hess,
        }
    }

    fn div_unchecked(&self, other: &Self) -> Self {
        let d = self.dim();
        let (a, b) = (self, other);
        let q = a.value / b.value;
        let grad: Vec<f64> = (0..d)
            .map(|i| (a.grad[i] - q * b.grad[i]) / b.value)
            .collect();
        // a = q b differentiated twice, solved for the Hessian of q
        let mut hess = vec![0.0; packed_len(d)];
        for i in 0..d {
            for j in i..d {
                let idx = packed_index(d, i, j);
                hess[idx] = (a.hess[idx]
                    - q * b.hess[idx]
                    - (grad[i] * b.grad[j] + grad[j] * b.grad[i]))
                    / b.value;
            }
        }
        Self {
            value: q,
            grad,
            hess,
        }
    }
}

impl Add for &Jet2 {
    type Output = Jet2;
    fn add(self, rhs: &Jet2) -> Jet2 {
        assert_eq!(self.dim(), rhs.dim(), "jet dimension mismatch");
        self.zip(rhs, |x, y| x + y)
    }
}

impl Sub for &Jet2 {
    type Output = Jet2;
    fn sub(self, rhs: &Jet2) -> Jet2 {
        assert_eq!(self.dim(), rhs.dim(), "jet dimension mismatch");
        self.zip(rhs, |x, y| x - y)
    }
}

impl Mul for &Jet2 {
    type Output = Jet2;
    fn mul(self, rhs: &Jet2) -> Jet2 {
        assert_eq!(self.dim(), rhs.dim(), "jet dimension mismatch");
        self.mul_unchecked(rhs)
    }
}

impl Neg for &Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        Jet2 {
            value: -self.value,
            grad: self.grad.iter().map(|g| -g).collect(),
            hess: self.hess.iter().map(|h| -h).collect(),
        }
    }
}

/// Value and gradient only. Produced by differentiating a [`Jet2`] once, and
/// used for fields that are themselves built from first derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet1 {
    pub value: f64,
    pub grad: Vec<f64>,
}

impl Jet1 {
    pub fn constant(dim: usize, c: f64) -> Self {
        Self {
            value: c,
            grad: vec![0.0; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.grad.len()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            value: self.value * s,
            grad: self.grad.iter().map(|g| g * s).collect(),
        }
    }

    /// `self += a * b`, the workhorse of index contractions.
    pub fn add_product(&mut self, a: &Jet1, b: &Jet1) {
        for ((g, ga), gb) in self.grad.iter_mut().zip(&a.grad).zip(&b.grad) {
            *g += a.value * gb + b.value * ga;
        }
        self.value += a.value * b.value;
    }
}

impl Add for &Jet1 {
    type Output = Jet1;
    fn add(self, rhs: &Jet1) -> Jet1 {
        Jet1 {
            value: self.value + rhs.value,
            grad: self.grad.iter().zip(&rhs.grad).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &Jet1 {
    type Output = Jet1;
    fn sub(self, rhs: &Jet1) -> Jet1 {
        Jet1 {
            value: self.value - rhs.value,
            grad: self.grad.iter().zip(&rhs.grad).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &Jet1 {
    type Output = Jet1;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: &Jet1) -> Jet1 {
        Jet1 {
            value: self.value * rhs.value,
            grad: self
                .grad
                .iter()
                .zip(&rhs.grad)
                .map(|(ga, gb)| self.value * gb + rhs.value * ga)
                .collect(),
        }
    }
}

impl Neg for &Jet1 {
    type Output = Jet1;
    fn neg(self) -> Jet1 {
        self.scale(-1.0)
    }
}
