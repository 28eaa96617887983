//! Class membership residuals, axiom validation, f-bases and the contact
//! volume.
//!
//! Residuals are reported twice: the absolute size of the defect and the
//! same value divided by `1 + m`, where `m` is the magnitude of the largest
//! term entering the identity. Verdicts compare the normalized value.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::jet::Point;
use crate::linalg::{gram_schmidt, jacobi_eigen, pfaffian, LinalgError};
use crate::structure::{StructureEval, StructureEvalError, WeakAcm};

#[derive(Debug, Error)]
pub enum ClassifyError {
    #[error(transparent)]
    Eval(#[from] StructureEvalError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("Q is not positive definite on ker η at {point:?} (eigenvalue {lambda:e})")]
    QNotPositive { point: Vec<f64>, lambda: f64 },
    #[error("could not complete an f-basis at {0:?}")]
    DegenerateBasis(Vec<f64>),
}

/// Tolerance tiers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    pub algebraic: f64,
    pub deriv: f64,
    pub curvature: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            algebraic: 1e-10,
            deriv: 1e-9,
            curvature: 1e-8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tier {
    Algebraic,
    Deriv,
    Curvature,
}

impl Tolerances {
    pub fn get(&self, tier: Tier) -> f64 {
        match tier {
            Tier::Algebraic => self.algebraic,
            Tier::Deriv => self.deriv,
            Tier::Curvature => self.curvature,
        }
    }
}

/// A residual in absolute and normalized form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residual {
    pub raw: f64,
    pub normalized: f64,
}

fn nan_max(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}

impl Residual {
    pub const ZERO: Residual = Residual {
        raw: 0.0,
        normalized: 0.0,
    };

    pub fn new(raw: f64, scale: f64) -> Self {
        let raw = raw.abs();
        Self {
            raw,
            normalized: raw / (1.0 + scale.abs()),
        }
    }

    /// `|lhs − rhs|` for scalars, scaled by the larger side.
    pub fn scalar(lhs: f64, rhs: f64) -> Self {
        Self::new(lhs - rhs, lhs.abs().max(rhs.abs()))
    }

    /// g-norm of `Σ terms`, scaled by the largest term's g-norm.
    pub fn vectors(s: &StructureEval, terms: &[DVector<f64>]) -> Self {
        let d = s.dim();
        let mut sum = DVector::zeros(d);
        let mut scale = 0.0f64;
        for t in terms {
            sum += t;
            scale = nan_max(scale, s.norm(t));
        }
        Self::new(s.norm(&sum), scale)
    }

    /// Largest entry of `Σ terms`, scaled by the largest entry of any term.
    pub fn entries(terms: &[DMatrix<f64>]) -> Self {
        let mut sum = DMatrix::zeros(terms[0].nrows(), terms[0].ncols());
        let mut scale = 0.0f64;
        for t in terms {
            sum += t;
            scale = nan_max(scale, t.amax());
        }
        Self::new(sum.amax(), scale)
    }

    pub fn merge(self, other: Residual) -> Residual {
        Residual {
            raw: nan_max(self.raw, other.raw),
            normalized: nan_max(self.normalized, other.normalized),
        }
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.normalized <= tol
    }
}

impl Default for Residual {
    fn default() -> Self {
        Self::ZERO
    }
}

impl FromIterator<Residual> for Residual {
    fn from_iter<I: IntoIterator<Item = Residual>>(iter: I) -> Self {
        iter.into_iter().fold(Residual::ZERO, Residual::merge)
    }
}

/// Seeded random directions per point, in addition to the orthonormal frame.
pub const RANDOM_DIRECTIONS: usize = 8;

/// The g-orthonormal frame followed by [`RANDOM_DIRECTIONS`] seeded g-unit
/// vectors.
pub fn directions(s: &StructureEval, seed: u64, point_index: usize) -> Vec<DVector<f64>> {
    let frame = s.metric.orthonormal_frame();
    let mut rng = ChaCha8Rng::seed_from_u64(
        seed ^ (point_index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15),
    );
    let d = s.dim();
    let mut out = frame.clone();
    while out.len() < frame.len() + RANDOM_DIRECTIONS {
        let c: Vec<f64> = (0..d).map(|_| StandardNormal.sample(&mut rng)).collect();
        let len = c.iter().map(|x| x * x).sum::<f64>().sqrt();
        if len < 1e-8 {
            continue;
        }
        let mut v = DVector::zeros(d);
        for (b, ci) in frame.iter().zip(&c) {
            v += b * (ci / len);
        }
        out.push(v);
    }
    out
}

/// Per-direction quantities reused across pairs.
#[derive(Debug, Clone)]
pub struct Probe {
    pub v: DVector<f64>,
    pub fv: DVector<f64>,
    pub eta: f64,
    pub hv: DVector<f64>,
    /// `∇_v f`
    pub nabla_f: DMatrix<f64>,
    /// `∇_{fv} f`
    pub nabla_f_fv: DMatrix<f64>,
    /// `∇_v ξ`
    pub nabla_xi: DVector<f64>,
}

pub fn probes(s: &StructureEval, dirs: &[DVector<f64>]) -> Vec<Probe> {
    dirs.iter()
        .map(|v| {
            let fv = s.f() * v;
            Probe {
                eta: s.eta_of(v),
                hv: s.h() * v,
                nabla_f: s.nabla_f_along(v),
                nabla_f_fv: s.nabla_f_along(&fv),
                nabla_xi: s.nabla_xi_along(v),
                fv,
                v: v.clone(),
            }
        })
        .collect()
}

fn over_pairs(ps: &[Probe], mut f: impl FnMut(&Probe, &Probe) -> Residual) -> Residual {
    let mut r = Residual::ZERO;
    for x in ps {
        for y in ps {
            r = r.merge(f(x, y));
        }
    }
    r
}

/// The quasi-contact identity on one pair:
/// `(∇_X f)Y + (∇_{fX} f)fY − 2g(X,Y)ξ + η(Y)(X + hX + η(X)ξ)`.
pub fn quasi_pair(s: &StructureEval, x: &Probe, y: &Probe) -> Residual {
    let a = &x.nabla_f * &y.v;
    let b = &x.nabla_f_fv * &y.fv;
    let c = s.xi() * (-2.0 * s.inner(&x.v, &y.v));
    let e = (&x.v + &x.hv + s.xi() * x.eta) * y.eta;
    Residual::vectors(s, &[a, b, c, e])
}

pub fn quasi_residual(s: &StructureEval, ps: &[Probe]) -> Residual {
    over_pairs(ps, |x, y| quasi_pair(s, x, y))
}

/// `dη = Φ`
pub fn contact_metric_residual(s: &StructureEval, ps: &[Probe]) -> Residual {
    over_pairs(ps, |x, y| {
        Residual::scalar(s.deta_xy(&x.v, &y.v), s.phi_xy(&x.v, &y.v))
    })
}

/// `N⁽¹⁾ = [f, f] + 2dη ⊗ ξ = 0`
pub fn normal_residual(s: &StructureEval, ps: &[Probe]) -> Residual {
    over_pairs(ps, |x, y| {
        let nij = s.nijenhuis(&x.v, &y.v);
        let t = s.xi() * (2.0 * s.deta_xy(&x.v, &y.v));
        Residual::vectors(s, &[nij, t])
    })
}

/// `(∇_X f)Y = g(X,Y)ξ − η(Y)X`
pub fn sasakian_residual(s: &StructureEval, ps: &[Probe]) -> Residual {
    over_pairs(ps, |x, y| {
        let a = &x.nabla_f * &y.v;
        let b = s.xi() * (-s.inner(&x.v, &y.v));
        let c = &x.v * y.eta;
        Residual::vectors(s, &[a, b, c])
    })
}

/// `(∇_Y f)Y = g(Y,Y)ξ − η(Y)Y`
pub fn nearly_sasakian_residual(s: &StructureEval, ps: &[Probe]) -> Residual {
    ps.iter()
        .map(|y| {
            let a = &y.nabla_f * &y.v;
            let b = s.xi() * (-s.inner(&y.v, &y.v));
            let c = &y.v * y.eta;
            Residual::vectors(s, &[a, b, c])
        })
        .collect()
}

/// `(£_ξ g)(X, Y) = g(∇_X ξ, Y) + g(∇_Y ξ, X) = 0`
pub fn killing_residual(s: &StructureEval, ps: &[Probe]) -> Residual {
    over_pairs(ps, |x, y| {
        let a = s.inner(&x.nabla_xi, &y.v);
        let b = s.inner(&y.nabla_xi, &x.v);
        Residual::scalar(a, -b)
    })
}

/// Matrix of `f` in the g-orthonormal frame.
fn in_frame(s: &StructureEval, a: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let frame = s.metric.orthonormal_frame();
    let b = DMatrix::from_columns(&frame);
    b.clone().try_inverse().map(|bi| bi * a * b)
}

/// Singular values of `f` below which rank is lost.
pub const RANK_GAP: f64 = 1e-6;

/// Named residuals of the weak a.c.m. axioms at one point.
pub fn axiom_residuals(s: &StructureEval) -> Vec<(&'static str, Residual)> {
    let d = s.dim();
    let (f, q, g) = (s.f(), s.q(), s.g());
    let xi = DMatrix::from_column_slice(d, 1, s.xi().as_slice());
    let eta = DMatrix::from_row_slice(1, d, s.eta().as_slice());
    let id = s.identity();
    let phi = g * f;
    let gq = g * q;
    let neg = |m: DMatrix<f64>| -m;
    let mut out = vec![
        ("eta-xi", Residual::scalar(s.eta_of(s.xi()), 1.0)),
        (
            "f-squared",
            Residual::entries(&[f * f, q.clone(), neg(&xi * &eta)]),
        ),
        (
            "metric-compat",
            Residual::entries(&[f.transpose() * g * f, neg(gq.clone()), eta.transpose() * &eta]),
        ),
        ("f-xi", {
            let r = (f * &xi).amax();
            Residual::new(r, f.amax() * xi.amax())
        }),
        ("eta-f", {
            let r = (&eta * f).amax();
            Residual::new(r, f.amax() * eta.amax())
        }),
        ("eta-Q", Residual::entries(&[&eta * q, neg(eta.clone())])),
        ("Qtilde-xi", Residual::entries(&[q * &xi, neg(xi.clone())])),
        (
            "eta-Qtilde",
            Residual::entries(&[&eta * q, neg(&eta * &id)]),
        ),
        ("Q-f-commute", Residual::entries(&[q * f, neg(f * q)])),
        ("f-skew", Residual::entries(&[phi.clone(), phi.transpose()])),
        ("Q-self-adjoint", Residual::entries(&[gq.clone(), neg(gq.transpose())])),
    ];
    let positive = match in_frame(s, q) {
        Some(m) => match jacobi_eigen(&m) {
            Ok(e) => Residual::new((-e.values[0]).max(0.0), e.values[d - 1]),
            Err(_) => Residual::new(f64::NAN, 0.0),
        },
        None => Residual::new(f64::NAN, 0.0),
    };
    out.push(("Q-positive", positive));
    let rank = match in_frame(s, f) {
        Some(m) => {
            let mut sv: Vec<f64> = m.singular_values().iter().copied().collect();
            sv.sort_by(f64::total_cmp);
            let lost = if sv.len() > 1 && sv[1] <= RANK_GAP { 1.0 } else { 0.0 };
            Residual::new(sv[0] + lost, sv[d - 1])
        }
        None => Residual::new(f64::NAN, 0.0),
    };
    out.push(("rank-f", rank));
    if let Some(qe) = &s.q_explicit {
        out.push(("Q-consistency", Residual::entries(&[qe.clone(), neg(q.clone())])));
    }
    out
}

/// One named check in a validation or classification report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub name: String,
    pub max_residual: f64,
    pub max_abs_residual: f64,
    pub tol: f64,
    pub pass: bool,
}

impl Verdict {
    fn new(name: impl Into<String>, r: Residual, tol: f64) -> Self {
        Self {
            name: name.into(),
            max_residual: r.normalized,
            max_abs_residual: r.raw,
            tol,
            pass: r.passes(tol),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomReport {
    pub structure: String,
    pub points: usize,
    pub checks: Vec<Verdict>,
}

impl AxiomReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn get(&self, name: &str) -> Option<&Verdict> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Largest normalized residual over all checks.
    pub fn max_residual(&self) -> Residual {
        self.checks
            .iter()
            .map(|c| Residual {
                raw: c.max_abs_residual,
                normalized: c.max_residual,
            })
            .collect()
    }
}

fn merge_named(
    acc: &mut Vec<(&'static str, Residual)>,
    point: Vec<(&'static str, Residual)>,
) {
    for (name, r) in point {
        match acc.iter_mut().find(|(n, _)| *n == name) {
            Some((_, a)) => *a = a.merge(r),
            None => acc.push((name, r)),
        }
    }
}

/// Check the weak a.c.m. axioms at every point.
pub fn validate_axioms(
    acm: &WeakAcm,
    points: &[Point],
    tol: &Tolerances,
) -> Result<AxiomReport, ClassifyError> {
    let per_point: Vec<_> = points
        .par_iter()
        .map(|p| acm.at(p).map(|s| axiom_residuals(&s)))
        .collect::<Result<_, _>>()?;
    let mut acc = Vec::new();
    for r in per_point {
        merge_named(&mut acc, r);
    }
    Ok(AxiomReport {
        structure: acm.name().to_string(),
        points: points.len(),
        checks: acc
            .into_iter()
            .map(|(n, r)| Verdict::new(n, r, tol.algebraic))
            .collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StructureClass {
    WeakAcmAxioms,
    ContactMetric,
    Quasi,
    Normal,
    Sasakian,
    NearlySasakian,
    KillingXi,
    KContact,
}

impl StructureClass {
    pub const ALL: [StructureClass; 8] = [
        StructureClass::WeakAcmAxioms,
        StructureClass::ContactMetric,
        StructureClass::Quasi,
        StructureClass::Normal,
        StructureClass::Sasakian,
        StructureClass::NearlySasakian,
        StructureClass::KillingXi,
        StructureClass::KContact,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StructureClass::WeakAcmAxioms => "weak-acm-axioms",
            StructureClass::ContactMetric => "contact-metric",
            StructureClass::Quasi => "quasi",
            StructureClass::Normal => "normal",
            StructureClass::Sasakian => "sasakian",
            StructureClass::NearlySasakian => "nearly-sasakian",
            StructureClass::KillingXi => "killing-xi",
            StructureClass::KContact => "k-contact",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassVerdict {
    pub class: StructureClass,
    pub max_residual: f64,
    pub max_abs_residual: f64,
    pub tol: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassReport {
    pub structure: String,
    pub points: usize,
    pub classes: Vec<ClassVerdict>,
    /// Absolute quasi-contact defect at `X = Y = e₁` of the f-basis,
    /// maximized over points.
    pub quasi_canonical: Option<f64>,
}

impl ClassReport {
    pub fn get(&self, class: StructureClass) -> &ClassVerdict {
        self.classes
            .iter()
            .find(|c| c.class == class)
            .expect("every class is reported")
    }

    pub fn is(&self, class: StructureClass) -> bool {
        self.get(class).pass
    }
}

/// Class residuals at one point, in [`StructureClass::ALL`] order minus
/// K-contact, plus the canonical quasi defect.
fn class_point(
    s: &StructureEval,
    seed: u64,
    index: usize,
) -> ([Residual; 7], Option<f64>) {
    let ps = probes(s, &directions(s, seed, index));
    let axioms: Residual = axiom_residuals(s).into_iter().map(|(_, r)| r).collect();
    let canonical = f_basis(s).ok().map(|b| {
        let e = probes(s, &[b.e[0].clone()]);
        quasi_pair(s, &e[0], &e[0]).raw
    });
    (
        [
            axioms,
            contact_metric_residual(s, &ps),
            quasi_residual(s, &ps),
            normal_residual(s, &ps),
            sasakian_residual(s, &ps),
            nearly_sasakian_residual(s, &ps),
            killing_residual(s, &ps),
        ],
        canonical,
    )
}

/// Max residual of every class over the points; directions are derived
/// from `seed`.
pub fn class_residuals(
    acm: &WeakAcm,
    points: &[Point],
    seed: u64,
    tol: &Tolerances,
) -> Result<ClassReport, ClassifyError> {
    let per_point: Vec<_> = points
        .par_iter()
        .enumerate()
        .map(|(i, p)| acm.at(p).map(|s| class_point(&s, seed, i)))
        .collect::<Result<_, _>>()?;
    let mut acc = [Residual::ZERO; 7];
    let mut canonical: Option<f64> = None;
    for (r, c) in per_point {
        for (a, b) in acc.iter_mut().zip(r) {
            *a = a.merge(b);
        }
        canonical = match (canonical, c) {
            (Some(a), Some(b)) => Some(nan_max(a, b)),
            (a, b) => a.or(b),
        };
    }
    let mut classes = Vec::new();
    for (class, r) in StructureClass::ALL.iter().zip(acc) {
        let t = if *class == StructureClass::WeakAcmAxioms {
            tol.algebraic
        } else {
            tol.deriv
        };
        classes.push(ClassVerdict {
            class: *class,
            max_residual: r.normalized,
            max_abs_residual: r.raw,
            tol: t,
            pass: r.passes(t),
        });
    }
    let contact = classes[1].clone();
    let killing = classes[6].clone();
    classes.push(ClassVerdict {
        class: StructureClass::KContact,
        max_residual: nan_max(contact.max_residual, killing.max_residual),
        max_abs_residual: nan_max(contact.max_abs_residual, killing.max_abs_residual),
        tol: tol.deriv,
        pass: contact.pass && killing.pass,
    });
    Ok(ClassReport {
        structure: acm.name().to_string(),
        points: points.len(),
        classes,
        quasi_canonical: canonical,
    })
}

/// The adapted basis `{ξ, e₁, fe₁, …, eₙ, feₙ}` at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct FBasis {
    pub point: Point,
    pub xi: DVector<f64>,
    pub e: Vec<DVector<f64>>,
    pub fe: Vec<DVector<f64>>,
    /// Ascending.
    pub lambda: Vec<f64>,
}

/// Eigenvalues this close to the minimum count as tied.
pub const EIGEN_TIE_TOL: f64 = 1e-9;

const BASIS_PIVOT_TOL: f64 = 1e-10;

/// Index of the largest-magnitude component; earlier indices win ties.
fn dominant_index(v: &DVector<f64>) -> usize {
    let mut best = 0;
    for i in 1..v.len() {
        if v[i].abs() > v[best].abs() + 1e-12 {
            best = i;
        }
    }
    best
}

/// Build an f-basis: repeatedly take a lowest-eigenvalue unit eigenvector
/// of `Q` on the remaining part of `ker η`, adjoin its image under `f`, and
/// deflate.
pub fn f_basis(s: &StructureEval) -> Result<FBasis, ClassifyError> {
    let d = s.dim();
    let g = s.g();
    let here = || s.point.coords().to_vec();
    let xi = s.xi() / s.norm(s.xi());
    let seeds = std::iter::once(xi.clone()).chain((0..d).map(|k| crate::geometry::unit(d, k)));
    let mut rest: Vec<DVector<f64>> = gram_schmidt(g, seeds, BASIS_PIVOT_TOL)
        .into_iter()
        .skip(1)
        .collect();
    let (mut e, mut fe, mut lambda) = (Vec::new(), Vec::new(), Vec::new());
    for _ in 0..s.n {
        let m = rest.len();
        if m < 2 {
            return Err(ClassifyError::DegenerateBasis(here()));
        }
        let qw: Vec<DVector<f64>> = rest.iter().map(|w| s.q() * w).collect();
        let a = DMatrix::from_fn(m, m, |i, j| s.inner(&rest[i], &qw[j]));
        let eig = jacobi_eigen(&a)?;
        let low = eig.values[0];
        if low <= 0.0 {
            return Err(ClassifyError::QNotPositive {
                point: here(),
                lambda: low,
            });
        }
        let tie = EIGEN_TIE_TOL * low.abs().max(1.0);
        let mut choice: Option<(usize, DVector<f64>)> = None;
        for k in 0..m {
            if eig.values[k] > low + tie {
                break;
            }
            let mut v = DVector::zeros(d);
            for (w, c) in rest.iter().zip(eig.vectors.column(k).iter()) {
                v += w * *c;
            }
            let idx = dominant_index(&v);
            if v[idx] < 0.0 {
                v = -v;
            }
            if choice.as_ref().is_none_or(|(best, _)| idx < *best) {
                choice = Some((idx, v));
            }
        }
        let (_, v) = choice.expect("at least one eigenvector");
        let v = &v / s.norm(&v);
        let fv = s.f() * &v;
        let fv_norm = s.norm(&fv);
        if fv_norm <= BASIS_PIVOT_TOL {
            return Err(ClassifyError::DegenerateBasis(here()));
        }
        let lam = s.inner(&v, &(s.q() * &v));
        let candidates = [v.clone(), &fv / fv_norm].into_iter().chain(rest);
        rest = gram_schmidt(g, candidates, BASIS_PIVOT_TOL)
            .into_iter()
            .skip(2)
            .collect();
        e.push(v);
        fe.push(fv);
        lambda.push(lam);
    }
    Ok(FBasis {
        point: s.point.clone(),
        xi,
        e,
        fe,
        lambda,
    })
}

/// Absolute defects of the f-basis invariants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FBasisResiduals {
    pub orthogonality: f64,
    pub unit: f64,
    pub eigen: f64,
    pub fe_norm: f64,
    pub trace: f64,
}

impl FBasisResiduals {
    pub fn max(&self) -> f64 {
        [self.orthogonality, self.unit, self.eigen, self.fe_norm, self.trace]
            .into_iter()
            .fold(0.0, nan_max)
    }
}

impl FBasis {
    /// `(ξ, e₁, fe₁, …, eₙ, feₙ)`
    pub fn vectors(&self) -> Vec<DVector<f64>> {
        let mut out = vec![self.xi.clone()];
        for (e, fe) in self.e.iter().zip(&self.fe) {
            out.push(e.clone());
            out.push(fe.clone());
        }
        out
    }

    pub fn residuals(&self, s: &StructureEval) -> FBasisResiduals {
        let vs = self.vectors();
        let mut orthogonality = 0.0f64;
        for i in 0..vs.len() {
            for j in (i + 1)..vs.len() {
                orthogonality = nan_max(orthogonality, s.inner(&vs[i], &vs[j]).abs());
            }
        }
        let mut unit = (s.norm(&self.xi) - 1.0).abs();
        let mut eigen = 0.0f64;
        let mut fe_norm = 0.0f64;
        for ((e, fe), lam) in self.e.iter().zip(&self.fe).zip(&self.lambda) {
            unit = nan_max(unit, (s.norm(e) - 1.0).abs());
            eigen = nan_max(eigen, s.norm(&(s.q() * e - e * *lam)));
            eigen = nan_max(eigen, s.norm(&(s.q() * fe - fe * *lam)));
            fe_norm = nan_max(fe_norm, (s.inner(fe, fe) - lam).abs());
        }
        let trace = (s.q().trace() - 1.0 - 2.0 * self.lambda.iter().sum::<f64>()).abs();
        FBasisResiduals {
            orthogonality,
            unit,
            eigen,
            fe_norm,
            trace,
        }
    }
}

/// `η ∧ (dη)ⁿ` on `(ξ, e₁, fe₁, …, eₙ, feₙ)`, expanded along the `η` slot
/// into Pfaffians of `dη`.
pub fn contact_volume(s: &StructureEval, basis: &FBasis) -> f64 {
    let vs = basis.vectors();
    let m = vs.len();
    let a = DMatrix::from_fn(m, m, |i, j| s.deta_xy(&vs[i], &vs[j]));
    let mut total = 0.0;
    for i in 0..m {
        let eta_i = s.eta_of(&vs[i]);
        if eta_i == 0.0 {
            continue;
        }
        let keep: Vec<usize> = (0..m).filter(|&k| k != i).collect();
        let minor = DMatrix::from_fn(m - 1, m - 1, |r, c| a[(keep[r], keep[c])]);
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        total += sign * eta_i * pfaffian(&minor);
    }
    total
}
