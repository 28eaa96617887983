//! Levi-Civita machinery on a chart, evaluated at one point.
//!
//! Conventions:
//! - `Γ^k_ij = ½ g^{kl}(∂_i g_jl + ∂_j g_il − ∂_l g_ij)`
//! - `R_{X,Y}Z = ∇_X∇_Y Z − ∇_Y∇_X Z − ∇_{[X,Y]}Z`
//! - `dη(X,Y) = ½(X(η(Y)) − Y(η(X)) − η([X,Y]))`
//! - `dΦ(X,Y,Z)` carries a factor ⅓ in front of the six-term formula.
//! - `K(X,Y) = g(R_{X,Y}Y, X) / (|X|²|Y|² − g(X,Y)²)`, positive on round spheres.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::jet::{Jet1, Jet2};
use crate::linalg::{gram_schmidt, inner};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("metric is singular or not positive definite at this point")]
    SingularMetric,
    #[error("degenerate plane: |X|²|Y|² − g(X,Y)² = {0:e}")]
    DegeneratePlane(f64),
    #[error("second derivatives were not supplied for this field")]
    MissingDerivatives,
}

/// Pivot tolerance for orthonormalizing coordinate frames.
pub const FRAME_PIVOT_TOL: f64 = 1e-12;

/// Metric components and their first two partial derivatives at a point.
#[derive(Debug, Clone)]
pub struct MetricEval {
    pub g: DMatrix<f64>,
    pub g_inv: DMatrix<f64>,
    /// `dg[k] = ∂_k g`
    pub dg: Vec<DMatrix<f64>>,
    /// `ddg[k][l] = ∂_k ∂_l g`
    pub ddg: Vec<Vec<DMatrix<f64>>>,
}

impl MetricEval {
    /// Build from a full matrix of component jets. Fails unless the value is
    /// positive definite.
    pub fn from_jets(jets: &[Vec<Jet2>]) -> Result<Self, GeometryError> {
        let d = jets.len();
        let g = DMatrix::from_fn(d, d, |i, j| jets[i][j].value());
        let dg = (0..d)
            .map(|k| DMatrix::from_fn(d, d, |i, j| jets[i][j].gradient()[k]))
            .collect();
        let ddg = (0..d)
            .map(|k| {
                (0..d)
                    .map(|l| DMatrix::from_fn(d, d, |i, j| jets[i][j].hessian(k, l)))
                    .collect()
            })
            .collect();
        Self::new(g, dg, ddg)
    }

    pub fn new(
        g: DMatrix<f64>,
        dg: Vec<DMatrix<f64>>,
        ddg: Vec<Vec<DMatrix<f64>>>,
    ) -> Result<Self, GeometryError> {
        let chol = g.clone().cholesky().ok_or(GeometryError::SingularMetric)?;
        let g_inv = chol.inverse();
        Ok(Self { g, g_inv, dg, ddg })
    }

    /// Flat metric of the given dimension.
    pub fn euclidean(dim: usize) -> Self {
        let z = DMatrix::zeros(dim, dim);
        Self {
            g: DMatrix::identity(dim, dim),
            g_inv: DMatrix::identity(dim, dim),
            dg: vec![z.clone(); dim],
            ddg: vec![vec![z; dim]; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.g.nrows()
    }

    pub fn inner(&self, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
        inner(&self.g, u, v)
    }

    pub fn norm(&self, v: &DVector<f64>) -> f64 {
        self.inner(v, v).max(0.0).sqrt()
    }

    /// Index lowering: `v ↦ g(v, ·)`.
    pub fn flat(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.g * v
    }

    /// g-orthonormal frame from the coordinate frame by modified Gram–Schmidt,
    /// in coordinate order.
    pub fn orthonormal_frame(&self) -> Vec<DVector<f64>> {
        let d = self.dim();
        gram_schmidt(
            &self.g,
            (0..d).map(|i| DVector::from_fn(d, |r, _| if r == i { 1.0 } else { 0.0 })),
            FRAME_PIVOT_TOL,
        )
    }

    /// Matrix of the g-adjoint of an endomorphism: `g⁻¹ Aᵀ g`.
    pub fn adjoint(&self, a: &DMatrix<f64>) -> DMatrix<f64> {
        &self.g_inv * a.transpose() * &self.g
    }

    /// Operator norm of `a` in the g-inner product.
    pub fn operator_norm(&self, a: &DMatrix<f64>) -> f64 {
        // |A|_g = sqrt(λ_max(A* A))
        let ata = self.adjoint(a) * a;
        // symmetric in the g-orthonormal frame
        let frame = self.orthonormal_frame();
        let d = frame.len();
        let m = DMatrix::from_fn(d, d, |i, j| self.inner(&frame[i], &(&ata * &frame[j])));
        let m = (&m + m.transpose()) * 0.5;
        m.symmetric_eigenvalues().max().max(0.0).sqrt()
    }
}

/// Christoffel symbols and their first partials.
#[derive(Debug, Clone)]
pub struct Connection {
    /// `gamma[k][(i, j)] = Γ^k_ij`
    pub gamma: Vec<DMatrix<f64>>,
    /// `dgamma[l][k][(i, j)] = ∂_l Γ^k_ij`
    pub dgamma: Vec<Vec<DMatrix<f64>>>,
}

pub fn christoffel(m: &MetricEval) -> Connection {
    let d = m.dim();
    // first-kind symbols [ij, l] = ½(∂_i g_jl + ∂_j g_il − ∂_l g_ij)
    let first = |i: usize, j: usize, l: usize| {
        0.5 * (m.dg[i][(j, l)] + m.dg[j][(i, l)] - m.dg[l][(i, j)])
    };
    let dfirst = |s: usize, i: usize, j: usize, l: usize| {
        0.5 * (m.ddg[s][i][(j, l)] + m.ddg[s][j][(i, l)] - m.ddg[s][l][(i, j)])
    };
    let gamma: Vec<DMatrix<f64>> = (0..d)
        .map(|k| {
            DMatrix::from_fn(d, d, |i, j| {
                (0..d).map(|l| m.g_inv[(k, l)] * first(i, j, l)).sum()
            })
        })
        .collect();
    let dgamma = (0..d)
        .map(|s| {
            // ∂_s g⁻¹ = −g⁻¹ (∂_s g) g⁻¹
            let dginv = -(&m.g_inv * &m.dg[s] * &m.g_inv);
            (0..d)
                .map(|k| {
                    DMatrix::from_fn(d, d, |i, j| {
                        (0..d)
                            .map(|l| {
                                dginv[(k, l)] * first(i, j, l)
                                    + m.g_inv[(k, l)] * dfirst(s, i, j, l)
                            })
                            .sum()
                    })
                })
                .collect()
        })
        .collect();
    Connection { gamma, dgamma }
}

impl Connection {
    pub fn dim(&self) -> usize {
        self.gamma.len()
    }

    /// `Γ(X, Y)^k = Γ^k_ij X^i Y^j`
    pub fn contract(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        DVector::from_fn(self.dim(), |k, _| (x.transpose() * &self.gamma[k] * y)[(0, 0)])
    }

    /// Matrix of `Y ↦ Γ(X, Y)`.
    pub fn along(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let d = self.dim();
        DMatrix::from_fn(d, d, |k, j| (0..d).map(|i| x[i] * self.gamma[k][(i, j)]).sum())
    }
}

/// A vector field's components and first partials at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorEval {
    pub value: DVector<f64>,
    /// `partials[k] = ∂_k V`
    pub partials: Vec<DVector<f64>>,
}

/// A 1-form's components, first partials and optionally second partials.
#[derive(Debug, Clone, PartialEq)]
pub struct OneFormEval {
    pub value: DVector<f64>,
    pub partials: Vec<DVector<f64>>,
    /// `second[k][l] = ∂_k ∂_l ω`
    pub second: Option<Vec<Vec<DVector<f64>>>>,
}

/// A (1,1)-tensor: `value[(i, j)] = T^i_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor11Eval {
    pub value: DMatrix<f64>,
    pub partials: Vec<DMatrix<f64>>,
}

/// An antisymmetric (0,2)-tensor with its first partials (empty when unknown).
#[derive(Debug, Clone, PartialEq)]
pub struct TwoFormEval {
    pub value: DMatrix<f64>,
    pub partials: Vec<DMatrix<f64>>,
}

/// Components `ω_ijk` of a 3-form.
#[derive(Debug, Clone, PartialEq)]
pub struct ThreeFormEval {
    dim: usize,
    comps: Vec<f64>,
}

impl VectorEval {
    /// A field with constant chart components.
    pub fn constant(value: DVector<f64>) -> Self {
        let d = value.len();
        Self {
            value,
            partials: vec![DVector::zeros(d); d],
        }
    }

    pub fn from_jets(jets: &[Jet2]) -> Self {
        let d = jets.len();
        Self {
            value: DVector::from_iterator(d, jets.iter().map(Jet2::value)),
            partials: (0..d)
                .map(|k| DVector::from_iterator(d, jets.iter().map(|j| j.gradient()[k])))
                .collect(),
        }
    }

    /// The field `x ↦ T(x) V(x)`.
    pub fn apply(t: &Tensor11Eval, v: &VectorEval) -> Self {
        Self {
            value: &t.value * &v.value,
            partials: t
                .partials
                .iter()
                .zip(&v.partials)
                .map(|(dt, dv)| dt * &v.value + &t.value * dv)
                .collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.value.len()
    }

    /// Jacobian `J[(i, k)] = ∂_k V^i`.
    pub fn jacobian(&self) -> DMatrix<f64> {
        let d = self.dim();
        DMatrix::from_fn(d, d, |i, k| self.partials[k][i])
    }

    /// Directional derivative of the components, `X^k ∂_k V`.
    pub fn derivative_along(&self, x: &DVector<f64>) -> DVector<f64> {
        self.jacobian() * x
    }
}

impl OneFormEval {
    pub fn constant(value: DVector<f64>) -> Self {
        let d = value.len();
        Self {
            value,
            partials: vec![DVector::zeros(d); d],
            second: Some(vec![vec![DVector::zeros(d); d]; d]),
        }
    }

    pub fn from_jets(jets: &[Jet2]) -> Self {
        let d = jets.len();
        Self {
            value: DVector::from_iterator(d, jets.iter().map(Jet2::value)),
            partials: (0..d)
                .map(|k| DVector::from_iterator(d, jets.iter().map(|j| j.gradient()[k])))
                .collect(),
            second: Some(
                (0..d)
                    .map(|k| {
                        (0..d)
                            .map(|l| DVector::from_iterator(d, jets.iter().map(|j| j.hessian(k, l))))
                            .collect()
                    })
                    .collect(),
            ),
        }
    }

    pub fn dim(&self) -> usize {
        self.value.len()
    }

    pub fn apply(&self, v: &DVector<f64>) -> f64 {
        self.value.dot(v)
    }
}

impl Tensor11Eval {
    pub fn constant(value: DMatrix<f64>) -> Self {
        let d = value.nrows();
        Self {
            value,
            partials: vec![DMatrix::zeros(d, d); d],
        }
    }

    pub fn from_jets(jets: &[Vec<Jet2>]) -> Self {
        let d = jets.len();
        Self {
            value: DMatrix::from_fn(d, d, |i, j| jets[i][j].value()),
            partials: (0..d)
                .map(|k| DMatrix::from_fn(d, d, |i, j| jets[i][j].gradient()[k]))
                .collect(),
        }
    }

    pub fn from_jets1(jets: &[Vec<Jet1>]) -> Self {
        let d = jets.len();
        Self {
            value: DMatrix::from_fn(d, d, |i, j| jets[i][j].value),
            partials: (0..d)
                .map(|k| DMatrix::from_fn(d, d, |i, j| jets[i][j].grad[k]))
                .collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.value.nrows()
    }
}

impl TwoFormEval {
    pub fn from_jets(jets: &[Vec<Jet2>]) -> Self {
        let d = jets.len();
        Self {
            value: DMatrix::from_fn(d, d, |i, j| jets[i][j].value()),
            partials: (0..d)
                .map(|k| DMatrix::from_fn(d, d, |i, j| jets[i][j].gradient()[k]))
                .collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.value.nrows()
    }

    pub fn apply(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        (x.transpose() * &self.value * y)[(0, 0)]
    }

    /// Largest `|ω_ij + ω_ji|`.
    pub fn antisymmetry_defect(&self) -> f64 {
        (&self.value + self.value.transpose()).amax()
    }
}

impl ThreeFormEval {
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.comps[(i * self.dim + j) * self.dim + k]
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn max_abs(&self) -> f64 {
        self.comps.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn apply(&self, x: &DVector<f64>, y: &DVector<f64>, z: &DVector<f64>) -> f64 {
        let d = self.dim;
        let mut s = 0.0;
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    s += self.get(i, j, k) * x[i] * y[j] * z[k];
                }
            }
        }
        s
    }
}

/// `∇_X` of a field, contracted with the direction.
pub trait Covariant {
    type Output;
    fn covariant(&self, conn: &Connection, x: &DVector<f64>) -> Self::Output;
}

impl Covariant for VectorEval {
    type Output = DVector<f64>;
    fn covariant(&self, conn: &Connection, x: &DVector<f64>) -> DVector<f64> {
        self.derivative_along(x) + conn.contract(x, &self.value)
    }
}

impl Covariant for OneFormEval {
    type Output = DVector<f64>;
    fn covariant(&self, conn: &Connection, x: &DVector<f64>) -> DVector<f64> {
        // (∇_X ω)_j = X^l ∂_l ω_j − Γ^k_{lj} X^l ω_k
        let d = self.dim();
        let mut out = DVector::zeros(d);
        for l in 0..d {
            out += &self.partials[l] * x[l];
        }
        out - conn.along(x).transpose() * &self.value
    }
}

impl Covariant for Tensor11Eval {
    type Output = DMatrix<f64>;
    fn covariant(&self, conn: &Connection, x: &DVector<f64>) -> DMatrix<f64> {
        // (∇_X T)^i_j = X^l ∂_l T^i_j + Γ(X)^i_k T^k_j − T^i_k Γ(X)^k_j
        let d = self.dim();
        let mut out = DMatrix::zeros(d, d);
        for l in 0..d {
            out += &self.partials[l] * x[l];
        }
        let gx = conn.along(x);
        out + &gx * &self.value - &self.value * &gx
    }
}

/// `∇_X V` for each coordinate direction, as the (1,1)-tensor `X ↦ ∇_X V`.
pub fn nabla_vector(conn: &Connection, v: &VectorEval) -> DMatrix<f64> {
    let d = v.dim();
    let mut out = DMatrix::zeros(d, d);
    for l in 0..d {
        let e = unit(d, l);
        out.set_column(l, &v.covariant(conn, &e));
    }
    out
}

/// `nabla[l] = ∇_{∂_l} T`.
pub fn nabla_tensor11(conn: &Connection, t: &Tensor11Eval) -> Vec<DMatrix<f64>> {
    let d = t.dim();
    (0..d).map(|l| t.covariant(conn, &unit(d, l))).collect()
}

/// `nabla[(l, j)] = (∇_{∂_l} ω)_j`.
pub fn nabla_one_form(conn: &Connection, w: &OneFormEval) -> DMatrix<f64> {
    let d = w.dim();
    let mut out = DMatrix::zeros(d, d);
    for l in 0..d {
        out.set_row(l, &w.covariant(conn, &unit(d, l)).transpose());
    }
    out
}

/// Contract a stack of coordinate-direction slices with a direction.
pub fn contract_direction(slices: &[DMatrix<f64>], x: &DVector<f64>) -> DMatrix<f64> {
    let (r, c) = slices[0].shape();
    let mut out = DMatrix::zeros(r, c);
    for (s, xl) in slices.iter().zip(x.iter()) {
        out += s * *xl;
    }
    out
}

pub fn unit(d: usize, i: usize) -> DVector<f64> {
    DVector::from_fn(d, |r, _| if r == i { 1.0 } else { 0.0 })
}

/// `(∇_k g)_ij`, whose largest entry is the metric-compatibility residual.
pub fn metric_compatibility_residual(m: &MetricEval, conn: &Connection) -> f64 {
    let d = m.dim();
    let mut worst: f64 = 0.0;
    for k in 0..d {
        let gk = conn.along(&unit(d, k));
        let r = &m.dg[k] - gk.transpose() * &m.g - &m.g * &gk;
        worst = worst.max(r.amax());
    }
    worst
}

/// `[X, Y]^i = X^j ∂_j Y^i − Y^j ∂_j X^i`
pub fn lie_bracket(x: &VectorEval, y: &VectorEval) -> DVector<f64> {
    y.derivative_along(&x.value) - x.derivative_along(&y.value)
}

/// `∇_X Y − ∇_Y X − [X, Y]`, zero for a torsion-free connection.
pub fn torsion(conn: &Connection, x: &VectorEval, y: &VectorEval) -> DVector<f64> {
    y.covariant(conn, &x.value) - x.covariant(conn, &y.value) - lie_bracket(x, y)
}

/// `(£_X T)^i_j = X^k ∂_k T^i_j − T^k_j ∂_k X^i + T^i_k ∂_j X^k`, which is
/// `(£_X T)Y = [X, TY] − T[X, Y]` on coordinate fields.
pub fn lie_derivative_tensor11(x: &VectorEval, t: &Tensor11Eval) -> DMatrix<f64> {
    let jx = x.jacobian();
    let mut out = contract_direction(&t.partials, &x.value);
    out -= &jx * &t.value;
    out += &t.value * &jx;
    out
}

/// `(£_X g)_ij = X^k ∂_k g_ij + g_kj ∂_i X^k + g_ik ∂_j X^k`.
pub fn lie_derivative_metric(x: &VectorEval, m: &MetricEval) -> DMatrix<f64> {
    let jx = x.jacobian();
    contract_direction(&m.dg, &x.value) + jx.transpose() * &m.g + &m.g * &jx
}

/// `(£_X g)(Y, Z) = g(∇_Y X, Z) + g(∇_Z X, Y)`, the same tensor through the
/// connection.
pub fn lie_derivative_metric_via_connection(
    x: &VectorEval,
    m: &MetricEval,
    conn: &Connection,
) -> DMatrix<f64> {
    let nx = nabla_vector(conn, x);
    let a = &m.g * nx;
    &a + a.transpose()
}

/// `dη` with the ½ normalization, componentwise on coordinate fields.
/// Partials of the result are filled when second partials of `η` are known.
pub fn exterior_derivative_1form(eta: &OneFormEval) -> TwoFormEval {
    let d = eta.dim();
    let value = DMatrix::from_fn(d, d, |i, j| {
        0.5 * (eta.partials[i][j] - eta.partials[j][i])
    });
    let partials = match &eta.second {
        Some(second) => (0..d)
            .map(|k| {
                DMatrix::from_fn(d, d, |i, j| 0.5 * (second[k][i][j] - second[k][j][i]))
            })
            .collect(),
        None => Vec::new(),
    };
    TwoFormEval { value, partials }
}

/// `½(X(η(Y)) − Y(η(X)) − η([X,Y]))` on fields with known first partials.
pub fn exterior_derivative_1form_on(eta: &OneFormEval, x: &VectorEval, y: &VectorEval) -> f64 {
    // X(η(Y)) = X^k (∂_k η_j Y^j + η_j ∂_k Y^j)
    let along = |a: &VectorEval, b: &VectorEval| -> f64 {
        let d = a.dim();
        (0..d)
            .map(|k| a.value[k] * (eta.partials[k].dot(&b.value) + eta.value.dot(&b.partials[k])))
            .sum()
    };
    0.5 * (along(x, y) - along(y, x) - eta.apply(&lie_bracket(x, y)))
}

/// `dΦ_ijk = ⅓(∂_i Φ_jk + ∂_j Φ_ki + ∂_k Φ_ij)`.
pub fn exterior_derivative_2form(phi: &TwoFormEval) -> Result<ThreeFormEval, GeometryError> {
    let d = phi.dim();
    if phi.partials.len() != d {
        return Err(GeometryError::MissingDerivatives);
    }
    let mut comps = vec![0.0; d * d * d];
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                comps[(i * d + j) * d + k] = (phi.partials[i][(j, k)]
                    + phi.partials[j][(k, i)]
                    + phi.partials[k][(i, j)])
                    / 3.0;
            }
        }
    }
    Ok(ThreeFormEval { dim: d, comps })
}

/// The six-term invariant formula for `dΦ(X, Y, Z)` with the ⅓ factor.
pub fn exterior_derivative_2form_on(
    phi: &TwoFormEval,
    x: &VectorEval,
    y: &VectorEval,
    z: &VectorEval,
) -> Result<f64, GeometryError> {
    if phi.partials.len() != phi.dim() {
        return Err(GeometryError::MissingDerivatives);
    }
    // A(Φ(B, C)) = A^k (∂_k Φ(B, C) + Φ(∂_k B, C) + Φ(B, ∂_k C))
    let along = |a: &VectorEval, b: &VectorEval, c: &VectorEval| -> f64 {
        (0..a.dim())
            .map(|k| {
                let dphi = (b.value.transpose() * &phi.partials[k] * &c.value)[(0, 0)];
                a.value[k]
                    * (dphi + phi.apply(&b.partials[k], &c.value) + phi.apply(&b.value, &c.partials[k]))
            })
            .sum()
    };
    let s = along(x, y, z) + along(y, z, x) + along(z, x, y)
        - phi.apply(&lie_bracket(x, y), &z.value)
        - phi.apply(&lie_bracket(z, x), &y.value)
        - phi.apply(&lie_bracket(y, z), &x.value);
    Ok(s / 3.0)
}

/// Riemann tensor at a point: `riemann[i][j]` is the matrix of `R_{∂_i, ∂_j}`.
#[derive(Debug, Clone)]
pub struct Curvature {
    riemann: Vec<Vec<DMatrix<f64>>>,
}

impl Curvature {
    pub fn new(conn: &Connection) -> Self {
        let d = conn.dim();
        // R^l_{kij} = ∂_i Γ^l_{jk} − ∂_j Γ^l_{ik} + Γ^l_{im} Γ^m_{jk} − Γ^l_{jm} Γ^m_{ik}
        let riemann = (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| {
                        DMatrix::from_fn(d, d, |l, k| {
                            let mut r = conn.dgamma[i][l][(j, k)] - conn.dgamma[j][l][(i, k)];
                            for m in 0..d {
                                r += conn.gamma[l][(i, m)] * conn.gamma[m][(j, k)]
                                    - conn.gamma[l][(j, m)] * conn.gamma[m][(i, k)];
                            }
                            r
                        })
                    })
                    .collect()
            })
            .collect();
        Self { riemann }
    }

    pub fn dim(&self) -> usize {
        self.riemann.len()
    }

    /// Matrix of the endomorphism `Z ↦ R_{X,Y} Z`.
    pub fn operator(&self, x: &DVector<f64>, y: &DVector<f64>) -> DMatrix<f64> {
        let d = self.dim();
        let mut out = DMatrix::zeros(d, d);
        for i in 0..d {
            if x[i] == 0.0 {
                continue;
            }
            for j in 0..d {
                if y[j] == 0.0 {
                    continue;
                }
                out += &self.riemann[i][j] * (x[i] * y[j]);
            }
        }
        out
    }

    /// `R_{X,Y} Z`
    pub fn apply(&self, x: &DVector<f64>, y: &DVector<f64>, z: &DVector<f64>) -> DVector<f64> {
        self.operator(x, y) * z
    }
}

pub fn curvature(
    curv: &Curvature,
    x: &DVector<f64>,
    y: &DVector<f64>,
    z: &DVector<f64>,
) -> DVector<f64> {
    curv.apply(x, y, z)
}

/// Denominator below which a plane counts as degenerate.
pub const PLANE_TOL: f64 = 1e-12;

pub fn sectional(
    m: &MetricEval,
    curv: &Curvature,
    x: &DVector<f64>,
    y: &DVector<f64>,
) -> Result<f64, GeometryError> {
    let denom = m.inner(x, x) * m.inner(y, y) - m.inner(x, y).powi(2);
    if denom < PLANE_TOL {
        return Err(GeometryError::DegeneratePlane(denom));
    }
    Ok(m.inner(&curv.apply(x, y, y), x) / denom)
}

/// `Ric(X, Y)`: trace of `Z ↦ R_{Z,X} Y` over the given g-orthonormal frame.
pub fn ricci_in_frame(
    m: &MetricEval,
    curv: &Curvature,
    frame: &[DVector<f64>],
    x: &DVector<f64>,
    y: &DVector<f64>,
) -> f64 {
    frame
        .iter()
        .map(|e| m.inner(&curv.apply(e, x, y), e))
        .sum()
}

pub fn ricci(m: &MetricEval, curv: &Curvature, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
    ricci_in_frame(m, curv, &m.orthonormal_frame(), x, y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::jet::Point;

    fn metric_at(entries: &[&str], coords: &[&str], p: &[f64]) -> MetricEval {
        let names: Vec<String> = coords.iter().map(|s| s.to_string()).collect();
        let d = names.len();
        let pt = Point::new(p.to_vec());
        let jets: Vec<Vec<Jet2>> = (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| parse(entries[i * d + j], &names).unwrap().eval_jet(&pt).unwrap())
                    .collect()
            })
            .collect();
        MetricEval::from_jets(&jets).unwrap()
    }

    #[test]
    fn flat_space_has_no_connection_or_curvature() {
        let m = MetricEval::euclidean(3);
        let conn = christoffel(&m);
        assert!(conn.gamma.iter().all(|g| g.amax() == 0.0));
        let curv = Curvature::new(&conn);
        let (x, y) = (unit(3, 0), unit(3, 1));
        assert_eq!(curv.apply(&x, &y, &y).amax(), 0.0);
        assert_eq!(sectional(&m, &curv, &x, &y).unwrap(), 0.0);
        assert_eq!(ricci(&m, &curv, &x, &x), 0.0);
        let v = VectorEval::constant(DVector::from_vec(vec![1.0, -2.0, 0.5]));
        assert_eq!(v.covariant(&conn, &x).amax(), 0.0);
    }

    #[test]
    fn round_sphere_chart() {
        // coordinates (θ, φ), g = diag(1, sin²θ)
        let theta: f64 = 0.7;
        let m = metric_at(&["1", "0", "0", "sin(t)^2"], &["t", "p"], &[theta, 0.3]);
        let conn = christoffel(&m);
        let expected = -theta.sin() * theta.cos();
        assert!((conn.gamma[0][(1, 1)] - expected).abs() < 1e-15);
        // Γ^φ_θφ = cot θ
        assert!((conn.gamma[1][(0, 1)] - theta.cos() / theta.sin()).abs() < 1e-14);
        assert!((conn.gamma[1][(1, 0)] - conn.gamma[1][(0, 1)]).abs() == 0.0);
        let curv = Curvature::new(&conn);
        let k = sectional(&m, &curv, &unit(2, 0), &unit(2, 1)).unwrap();
        assert!((k - 1.0).abs() < 1e-13, "K = {k}");
        let ric = ricci(&m, &curv, &unit(2, 0), &unit(2, 0));
        assert!((ric - 1.0).abs() < 1e-13);
    }

    #[test]
    fn sphere_christoffel_against_finite_differences() {
        // independent route: difference the metric numerically
        let theta: f64 = 1.1;
        let h = 1e-5;
        let g11 = |t: f64| t.sin().powi(2);
        let dg11 = (g11(theta + h) - g11(theta - h)) / (2.0 * h);
        let fd_gamma = -0.5 * dg11;
        let m = metric_at(&["1", "0", "0", "sin(t)^2"], &["t", "p"], &[theta, 0.0]);
        let conn = christoffel(&m);
        assert!((conn.gamma[0][(1, 1)] - fd_gamma).abs() < 1e-9);
    }

    #[test]
    fn coordinate_brackets() {
        let d = 3;
        let names: Vec<String> = ["x", "y", "z"].iter().map(|s| s.to_string()).collect();
        let p = Point::new(vec![0.4, -0.2, 0.9]);
        let field = |comps: [&str; 3]| {
            let jets: Vec<Jet2> = comps
                .iter()
                .map(|c| parse(c, &names).unwrap().eval_jet(&p).unwrap())
                .collect();
            VectorEval::from_jets(&jets)
        };
        let dx = VectorEval::constant(unit(d, 0));
        let dy = VectorEval::constant(unit(d, 1));
        assert_eq!(lie_bracket(&dx, &dy).amax(), 0.0);
        let x_dy = field(["0", "x", "0"]);
        assert_eq!(lie_bracket(&x_dy, &dx), -unit(d, 1));
    }

    #[test]
    fn exterior_derivative_conventions() {
        let names: Vec<String> = ["x", "y", "z"].iter().map(|s| s.to_string()).collect();
        let p = Point::new(vec![0.3, 0.6, -0.1]);
        let form = |comps: [&str; 3]| {
            let jets: Vec<Jet2> = comps
                .iter()
                .map(|c| parse(c, &names).unwrap().eval_jet(&p).unwrap())
                .collect();
            OneFormEval::from_jets(&jets)
        };
        let dz = form(["0", "0", "1"]);
        assert_eq!(exterior_derivative_1form(&dz).value.amax(), 0.0);

        // η = ½(dz − y dx): dη(∂x, ∂y) = ½(∂x η_y − ∂y η_x) = ¼
        let eta = form(["-y/2", "0", "1/2"]);
        let deta = exterior_derivative_1form(&eta);
        assert_eq!(deta.value[(0, 1)], 0.25);
        assert_eq!(deta.value[(1, 0)], -0.25);
        let via_fields = exterior_derivative_1form_on(
            &eta,
            &VectorEval::constant(unit(3, 0)),
            &VectorEval::constant(unit(3, 1)),
        );
        assert_eq!(via_fields, 0.25);

        // exact form d(x y z) has vanishing dη
        let exact = form(["y*z", "x*z", "x*y"]);
        assert!(exterior_derivative_1form(&exact).value.amax() < 1e-15);

        // d² = 0
        let w = form(["sin(y)*z", "x^2*exp(z)", "x*y*z"]);
        let dw = exterior_derivative_1form(&w);
        let ddw = exterior_derivative_2form(&dw).unwrap();
        assert!(ddw.max_abs() < 1e-14);
    }
}
