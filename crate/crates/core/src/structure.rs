//! Weak almost-contact metric structures and their derived tensors.
//!
//! From `(g, f, ξ)` we derive `η = g(ξ, ·)`, `Q = −f² + η⊗ξ`, `Q̃ = Q − id`
//! and `Φ(X, Y) = g(X, fY)`. Everything is evaluated pointwise through jets;
//! [`StructureEval`] holds one point's worth of values, partials, the
//! connection and the curvature.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::expr::{EvalError, StructureDef};
use crate::geometry::{
    christoffel, exterior_derivative_1form, lie_bracket, nabla_one_form, nabla_tensor11,
    nabla_vector, Connection, Covariant, Curvature, GeometryError, MetricEval, OneFormEval,
    Tensor11Eval, TwoFormEval, VectorEval,
};
use crate::jet::{Jet1, Jet2, Point};

#[derive(Debug, Error)]
pub enum StructureEvalError {
    #[error("point {0:?} lies outside the chart domain")]
    OutsideDomain(Vec<f64>),
    #[error("point has dimension {got}, chart has {expected}")]
    Dimension { expected: usize, got: usize },
    #[error("expression evaluation failed: {0}")]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("Q is singular at {0:?}")]
    SingularQ(Vec<f64>),
}

/// Determinant magnitude below which `Q` counts as singular.
pub const Q_SINGULAR_TOL: f64 = 1e-12;

/// A weak almost-contact metric structure on a chart.
#[derive(Debug, Clone)]
pub struct WeakAcm {
    def: StructureDef,
}

impl WeakAcm {
    pub fn new(def: StructureDef) -> Self {
        Self { def }
    }

    pub fn def(&self) -> &StructureDef {
        &self.def
    }

    pub fn name(&self) -> &str {
        &self.def.name
    }

    pub fn n(&self) -> usize {
        self.def.n
    }

    pub fn dim(&self) -> usize {
        self.def.dim()
    }

    /// Evaluate everything at `p`, which must lie in the chart domain.
    pub fn at(&self, p: &Point) -> Result<StructureEval, StructureEvalError> {
        let d = self.dim();
        if p.dim() != d {
            return Err(StructureEvalError::Dimension {
                expected: d,
                got: p.dim(),
            });
        }
        if !self.def.domain.contains(p) {
            return Err(StructureEvalError::OutsideDomain(p.coords().to_vec()));
        }
        let matrix = |m: &[Vec<crate::expr::Expr>]| -> Result<Vec<Vec<Jet2>>, EvalError> {
            m.iter()
                .map(|row| row.iter().map(|e| e.eval_jet(p)).collect())
                .collect()
        };
        let g = matrix(&self.def.metric)?;
        let f = matrix(&self.def.f)?;
        let xi: Vec<Jet2> = self
            .def
            .xi
            .iter()
            .map(|e| e.eval_jet(p))
            .collect::<Result<_, _>>()?;
        let q_explicit = match &self.def.q {
            Some(q) => {
                let q = matrix(q)?;
                Some(DMatrix::from_fn(d, d, |i, j| q[i][j].value()))
            }
            None => None,
        };

        let zero = Jet2::zero(d);
        let dot = |terms: &mut dyn Iterator<Item = Jet2>| {
            terms.fold(zero.clone(), |acc, t| &acc + &t)
        };
        // η_i = g_ij ξ^j
        let eta: Vec<Jet2> = (0..d)
            .map(|i| dot(&mut (0..d).map(|j| &g[i][j] * &xi[j])))
            .collect();
        // Q^i_j = −f^i_k f^k_j + ξ^i η_j
        let q: Vec<Vec<Jet2>> = (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| {
                        let ff = dot(&mut (0..d).map(|k| &f[i][k] * &f[k][j]));
                        &(&xi[i] * &eta[j]) - &ff
                    })
                    .collect()
            })
            .collect();
        // Φ_ij = g_ik f^k_j
        let phi: Vec<Vec<Jet2>> = (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| dot(&mut (0..d).map(|k| &g[i][k] * &f[k][j])))
                    .collect()
            })
            .collect();
        // h = ½ £_ξ f, built at first order so its partials are available
        let h: Vec<Vec<Jet1>> = (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| {
                        let mut acc = Jet1::constant(d, 0.0);
                        for k in 0..d {
                            acc.add_product(&xi[k].truncate(), &f[i][j].partial(k));
                            acc.add_product(&(-&f[k][j].truncate()), &xi[i].partial(k));
                            acc.add_product(&f[i][k].truncate(), &xi[k].partial(j));
                        }
                        acc.scale(0.5)
                    })
                    .collect()
            })
            .collect();

        let metric = MetricEval::from_jets(&g)?;
        let conn = christoffel(&metric);
        let curvature = Curvature::new(&conn);
        let f = Tensor11Eval::from_jets(&f);
        let xi = VectorEval::from_jets(&xi);
        let eta = OneFormEval::from_jets(&eta);
        let q = Tensor11Eval::from_jets(&q);
        let phi = TwoFormEval::from_jets(&phi);
        let h = Tensor11Eval::from_jets1(&h);
        let deta = exterior_derivative_1form(&eta);

        let q_inv = q
            .value
            .clone()
            .try_inverse()
            .filter(|_| q.value.determinant().abs() > Q_SINGULAR_TOL)
            .ok_or_else(|| StructureEvalError::SingularQ(p.coords().to_vec()))?;

        let nabla_f = nabla_tensor11(&conn, &f);
        let nabla_q = nabla_tensor11(&conn, &q);
        let nabla_h = nabla_tensor11(&conn, &h);
        let nabla_xi = nabla_vector(&conn, &xi);
        let nabla_eta = nabla_one_form(&conn, &eta);

        Ok(StructureEval {
            point: p.clone(),
            n: self.n(),
            metric,
            conn,
            curvature,
            f,
            xi,
            eta,
            q,
            q_inv,
            q_explicit,
            phi,
            deta,
            h,
            nabla_f,
            nabla_q,
            nabla_h,
            nabla_xi,
            nabla_eta,
        })
    }
}

/// Wrap a definition; components are derived lazily per point by [`WeakAcm::at`].
pub fn derive_components(def: StructureDef) -> WeakAcm {
    WeakAcm::new(def)
}

/// `h = ½ £_ξ f` with its adjoint and symmetric/skew parts at `p`.
pub fn h_tensor(s: &WeakAcm, p: &Point) -> Result<HParts, StructureEvalError> {
    Ok(s.at(p)?.h_parts())
}

pub fn n_tensors(
    s: &WeakAcm,
    x: &DVector<f64>,
    y: &DVector<f64>,
    p: &Point,
) -> Result<NTensors, StructureEvalError> {
    Ok(s.at(p)?.n_tensors(x, y))
}

pub fn build_cone(s: &WeakAcm, p: &Point, t: f64) -> Result<ConeEval, StructureEvalError> {
    Ok(s.at(p)?.cone(t))
}

/// One point's evaluation of a [`WeakAcm`].
#[derive(Debug, Clone)]
pub struct StructureEval {
    pub point: Point,
    pub n: usize,
    pub metric: MetricEval,
    pub conn: Connection,
    pub curvature: Curvature,
    pub f: Tensor11Eval,
    pub xi: VectorEval,
    pub eta: OneFormEval,
    pub q: Tensor11Eval,
    pub q_inv: DMatrix<f64>,
    pub q_explicit: Option<DMatrix<f64>>,
    pub phi: TwoFormEval,
    pub deta: TwoFormEval,
    pub h: Tensor11Eval,
    /// `nabla_f[l] = ∇_{∂_l} f`
    pub nabla_f: Vec<DMatrix<f64>>,
    pub nabla_q: Vec<DMatrix<f64>>,
    pub nabla_h: Vec<DMatrix<f64>>,
    /// `X ↦ ∇_X ξ`
    pub nabla_xi: DMatrix<f64>,
    /// `nabla_eta[(l, j)] = (∇_{∂_l} η)_j`
    pub nabla_eta: DMatrix<f64>,
}

/// The four structure tensors and the Nijenhuis torsion on a pair of directions.
#[derive(Debug, Clone)]
pub struct NTensors {
    pub n1: DVector<f64>,
    pub n2: f64,
    pub n3: DVector<f64>,
    pub n4: f64,
    pub nijenhuis: DVector<f64>,
}

/// The four blocks of the symmetric and antisymmetric split of `h`.
#[derive(Debug, Clone)]
pub struct HParts {
    pub h: DMatrix<f64>,
    pub h_adjoint: DMatrix<f64>,
    pub sym: DMatrix<f64>,
    pub skew: DMatrix<f64>,
}

/// `J`, `P` and `ḡ` on the product `M × ℝ` at `(p, t)`; the last index is `∂_t`.
#[derive(Debug, Clone)]
pub struct ConeEval {
    pub t: f64,
    pub j: DMatrix<f64>,
    pub p: DMatrix<f64>,
    pub gbar: DMatrix<f64>,
    /// Largest entry of `J² + P`.
    pub residual: f64,
}

impl StructureEval {
    pub fn dim(&self) -> usize {
        self.metric.dim()
    }

    pub fn g(&self) -> &DMatrix<f64> {
        &self.metric.g
    }

    pub fn f(&self) -> &DMatrix<f64> {
        &self.f.value
    }

    pub fn xi(&self) -> &DVector<f64> {
        &self.xi.value
    }

    pub fn eta(&self) -> &DVector<f64> {
        &self.eta.value
    }

    pub fn q(&self) -> &DMatrix<f64> {
        &self.q.value
    }

    pub fn h(&self) -> &DMatrix<f64> {
        &self.h.value
    }

    pub fn identity(&self) -> DMatrix<f64> {
        DMatrix::identity(self.dim(), self.dim())
    }

    pub fn q_tilde(&self) -> DMatrix<f64> {
        self.q() - self.identity()
    }

    pub fn inner(&self, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
        self.metric.inner(u, v)
    }

    pub fn norm(&self, v: &DVector<f64>) -> f64 {
        self.metric.norm(v)
    }

    pub fn eta_of(&self, v: &DVector<f64>) -> f64 {
        self.eta().dot(v)
    }

    /// `(∇_X f)`
    pub fn nabla_f_along(&self, x: &DVector<f64>) -> DMatrix<f64> {
        crate::geometry::contract_direction(&self.nabla_f, x)
    }

    /// `(∇_X η)(Y)`
    pub fn nabla_eta_xy(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        (x.transpose() * &self.nabla_eta * y)[(0, 0)]
    }

    /// `∇_X ξ`
    pub fn nabla_xi_along(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.nabla_xi * x
    }

    pub fn deta_xy(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        self.deta.apply(x, y)
    }

    pub fn phi_xy(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        self.phi.apply(x, y)
    }

    /// `R_{X,Y} Z`
    pub fn riemann(&self, x: &DVector<f64>, y: &DVector<f64>, z: &DVector<f64>) -> DVector<f64> {
        self.curvature.apply(x, y, z)
    }

    /// `ℓX = R_{ξ,X} ξ`
    pub fn ell(&self, x: &DVector<f64>) -> DVector<f64> {
        self.riemann(self.xi(), x, self.xi())
    }

    pub fn sectional(&self, x: &DVector<f64>, y: &DVector<f64>) -> Result<f64, GeometryError> {
        crate::geometry::sectional(&self.metric, &self.curvature, x, y)
    }

    pub fn ricci(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        crate::geometry::ricci(&self.metric, &self.curvature, x, y)
    }

    /// `tr h²`
    pub fn trace_h2(&self) -> f64 {
        (self.h() * self.h()).trace()
    }

    /// The field `x ↦ f(x) V` for a direction with constant chart components.
    fn f_field(&self, v: &DVector<f64>) -> VectorEval {
        VectorEval::apply(&self.f, &VectorEval::constant(v.clone()))
    }

    /// `£_ξ g`
    pub fn lie_xi_metric(&self) -> DMatrix<f64> {
        crate::geometry::lie_derivative_metric(&self.xi, &self.metric)
    }

    /// `£_ξ Q`
    pub fn lie_xi_q(&self) -> DMatrix<f64> {
        crate::geometry::lie_derivative_tensor11(&self.xi, &self.q)
    }

    /// `h`, its g-adjoint `g⁻¹ hᵀ g`, and the self-adjoint and skew parts.
    pub fn h_parts(&self) -> HParts {
        let h = self.h().clone();
        let h_adjoint = self.metric.adjoint(&h);
        let sym = (&h + &h_adjoint) * 0.5;
        let skew = (&h - &h_adjoint) * 0.5;
        HParts {
            h,
            h_adjoint,
            sym,
            skew,
        }
    }

    /// `[f, f](X, Y) = f²[X,Y] + [fX, fY] − f[fX, Y] − f[X, fY]` on
    /// constant-coefficient extensions of `X` and `Y`.
    pub fn nijenhuis(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        let (fx, fy) = (self.f_field(x), self.f_field(y));
        let (cx, cy) = (VectorEval::constant(x.clone()), VectorEval::constant(y.clone()));
        let f = self.f();
        f * f * lie_bracket(&cx, &cy) + lie_bracket(&fx, &fy)
            - f * lie_bracket(&fx, &cy)
            - f * lie_bracket(&cx, &fy)
    }

    pub fn n_tensors(&self, x: &DVector<f64>, y: &DVector<f64>) -> NTensors {
        let nijenhuis = self.nijenhuis(x, y);
        let n1 = &nijenhuis + self.xi() * (2.0 * self.deta_xy(x, y));
        let (fx, fy) = (self.f() * x, self.f() * y);
        let n2 = 2.0 * self.deta_xy(&fx, y) - 2.0 * self.deta_xy(&fy, x);
        let cx = VectorEval::constant(x.clone());
        let n3 = lie_bracket(&self.xi, &self.f_field(x)) - self.f() * lie_bracket(&self.xi, &cx);
        let n4 = 2.0 * self.deta_xy(self.xi(), x);
        NTensors {
            n1,
            n2,
            n3,
            n4,
            nijenhuis,
        }
    }

    /// `(∇_{fX} η)(Y) − (∇_Y η)(fX) − (∇_{fY} η)(X) + (∇_X η)(fY)`
    pub fn n2_via_connection(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        let (fx, fy) = (self.f() * x, self.f() * y);
        self.nabla_eta_xy(&fx, y) - self.nabla_eta_xy(y, &fx) - self.nabla_eta_xy(&fy, x)
            + self.nabla_eta_xy(x, &fy)
    }

    /// `∇_X T` for the field `T` given with partials.
    pub fn covariant(&self, t: &Tensor11Eval, x: &DVector<f64>) -> DMatrix<f64> {
        t.covariant(&self.conn, x)
    }

    /// `J`, `P` and `ḡ` at `(p, t)`.
    pub fn cone(&self, t: f64) -> ConeEval {
        let d = self.dim();
        let mut j = DMatrix::zeros(d + 1, d + 1);
        j.view_mut((0, 0), (d, d)).copy_from(self.f());
        j.view_mut((0, d), (d, 1)).copy_from(self.xi());
        j.view_mut((d, 0), (1, d)).copy_from(&(-self.eta().transpose()));
        let mut p = DMatrix::zeros(d + 1, d + 1);
        p.view_mut((0, 0), (d, d)).copy_from(self.q());
        p[(d, d)] = 1.0;
        let scale = (-2.0 * t).exp();
        let mut gbar = DMatrix::zeros(d + 1, d + 1);
        gbar.view_mut((0, 0), (d, d)).copy_from(&(self.g() * scale));
        gbar[(d, d)] = scale;
        let residual = (&j * &j + &p).amax();
        ConeEval {
            t,
            j,
            p,
            gbar,
            residual,
        }
    }
}
