//! Pointwise hypothesis residuals used to gate checks.

use nalgebra::DVector;

use super::{over_dirs, over_pairs, PointCtx};
use crate::classify::{
    contact_metric_residual, killing_residual, quasi_residual, sasakian_residual, Residual, Tier,
};
use crate::structure::StructureEval;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HypothesisDef {
    pub id: &'static str,
    pub paper: &'static str,
    pub tier: Tier,
}

const TABLE: &[HypothesisDef] = &[
    HypothesisDef { id: "quasi", paper: "Eq. (1)", tier: Tier::Deriv },
    HypothesisDef { id: "contact-metric", paper: "§1 dη = Φ", tier: Tier::Deriv },
    HypothesisDef { id: "nabla-xi-f", paper: "Eq. (6)", tier: Tier::Deriv },
    HypothesisDef { id: "nabla-xi-minus-f", paper: "Eq. (18)", tier: Tier::Deriv },
    HypothesisDef { id: "sasakian-condition", paper: "Eq. (17)", tier: Tier::Deriv },
    HypothesisDef { id: "ell-minus-id", paper: "Eq. (20), Thm 3.4 proof", tier: Tier::Curvature },
    HypothesisDef { id: "ell-as-printed", paper: "Eq. (20) as printed", tier: Tier::Curvature },
    HypothesisDef { id: "killing-xi", paper: "§1 ξ Killing", tier: Tier::Deriv },
    HypothesisDef { id: "tr-h2-nonpositive", paper: "Thm 3.5 tr h² ≤ 0", tier: Tier::Deriv },
    HypothesisDef { id: "curvature-xi", paper: "Eq. (23)", tier: Tier::Curvature },
    HypothesisDef { id: "k-xi-nonnegative", paper: "Thm 3.2 K(ξ,X)+K(ξ,fX) ≥ 0", tier: Tier::Curvature },
    HypothesisDef { id: "tr-qtilde-zero", paper: "Thm 3.2 tr Q̃ = 0", tier: Tier::Algebraic },
    HypothesisDef { id: "lambda-equality", paper: "Eq. (21) equality", tier: Tier::Curvature },
    HypothesisDef { id: "ker-eta-integrable", paper: "Prop 3.3 ker η integrable", tier: Tier::Deriv },
    HypothesisDef { id: "nabla-q-ker-eta", paper: "Eq. (19)", tier: Tier::Deriv },
    HypothesisDef { id: "h-self-adjoint", paper: "Prop 3.4 h self-adjoint", tier: Tier::Deriv },
];

pub fn hypothesis_def(id: &str) -> HypothesisDef {
    *TABLE
        .iter()
        .find(|h| h.id == id)
        .unwrap_or_else(|| panic!("unknown hypothesis {id}"))
}

pub(crate) fn evaluate(id: &str, ctx: &PointCtx) -> Residual {
    let s = ctx.s;
    let ps = &ctx.probes;
    match id {
        "quasi" => quasi_residual(s, ps),
        "contact-metric" => contact_metric_residual(s, ps),
        "nabla-xi-f" => nabla_xi_f(s, ctx),
        "nabla-xi-minus-f" => over_dirs(ps, |x| Residual::vectors(s, &[x.nabla_xi.clone(), x.fv.clone()])),
        "sasakian-condition" => sasakian_residual(s, ps),
        "ell-minus-id" => over_dirs(ps, |x| {
            let ell = s.ell(&x.v);
            Residual::vectors(s, &[ell, x.v.clone(), s.xi() * -x.eta])
        }),
        "ell-as-printed" => over_dirs(ps, |x| {
            let r = s.riemann(&x.v, s.xi(), s.xi());
            Residual::vectors(s, &[r, x.v.clone(), s.xi() * x.eta])
        }),
        "killing-xi" => killing_residual(s, ps),
        "tr-h2-nonpositive" => {
            let t = s.trace_h2();
            Residual::new(t.max(0.0), t.abs())
        }
        "curvature-xi" => over_pairs(ps, |x, y| {
            let r = s.riemann(&x.v, &y.v, s.xi());
            Residual::vectors(s, &[r, &x.v * -y.eta, &y.v * x.eta])
        }),
        "k-xi-nonnegative" => k_xi_nonnegative(s, ctx),
        "tr-qtilde-zero" => Residual::new(s.q_tilde().trace(), s.q().trace()),
        "lambda-equality" => match lambda_inequality(s, ctx) {
            Some((lhs, rhs)) => Residual::scalar(lhs, rhs),
            None => Residual::new(f64::NAN, 0.0),
        },
        "ker-eta-integrable" => over_pairs(ps, |x, y| {
            let (a, b) = (horizontal(s, &x.v), horizontal(s, &y.v));
            Residual::new(s.deta_xy(&a, &b), s.norm(&a) * s.norm(&b))
        }),
        "nabla-q-ker-eta" => over_pairs(ps, |x, y| {
            let (a, b) = (horizontal(s, &x.v), horizontal(s, &y.v));
            let nq = crate::geometry::contract_direction(&s.nabla_q, &a);
            Residual::vectors(s, &[nq * b])
        }),
        "h-self-adjoint" => {
            let p = s.h_parts();
            crate::classify::Residual::entries(&[p.h.clone(), -p.h_adjoint])
        }
        other => panic!("unknown hypothesis {other}"),
    }
}

/// `X − η(X)ξ`
pub(crate) fn horizontal(s: &StructureEval, v: &DVector<f64>) -> DVector<f64> {
    v - s.xi() * s.eta_of(v)
}

/// `(∇_ξ f)X = 0` over the directions.
pub(crate) fn nabla_xi_f(s: &StructureEval, ctx: &PointCtx) -> Residual {
    let n = s.nabla_f_along(s.xi());
    over_dirs(&ctx.probes, |x| Residual::vectors(s, &[&n * &x.v]))
}

/// Horizontal test vectors for plane-curvature hypotheses: the f-basis
/// vectors and the horizontal parts of the sampled directions.
pub(crate) fn horizontal_tests(s: &StructureEval, ctx: &PointCtx) -> Vec<DVector<f64>> {
    let mut out = Vec::new();
    if let Some(b) = &ctx.basis {
        out.extend(b.e.iter().cloned());
        out.extend(b.fe.iter().cloned());
    }
    for p in &ctx.probes {
        let h = horizontal(s, &p.v);
        let n = s.norm(&h);
        if n > 1e-6 {
            out.push(h / n);
        }
    }
    out
}

fn k_xi_nonnegative(s: &StructureEval, ctx: &PointCtx) -> Residual {
    horizontal_tests(s, ctx)
        .iter()
        .map(|x| {
            let fx = s.f() * x;
            match (s.sectional(s.xi(), x), s.sectional(s.xi(), &fx)) {
                (Ok(a), Ok(b)) => Residual::new((-(a + b)).max(0.0), a.abs().max(b.abs())),
                _ => Residual::new(f64::NAN, 0.0),
            }
        })
        .collect()
}

/// Both sides of `max λᵢ · Ric(ξ,ξ) ≥ n − tr h² + (tr Q − 1)²/(4n)`.
pub(crate) fn lambda_inequality(s: &StructureEval, ctx: &PointCtx) -> Option<(f64, f64)> {
    let b = ctx.basis.as_ref()?;
    let n = s.n as f64;
    let lmax = b.lambda.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let ric = s.ricci(s.xi(), s.xi());
    let trq = s.q().trace();
    let lhs = lmax * ric;
    let rhs = n - s.trace_h2() + (trq - 1.0).powi(2) / (4.0 * n);
    Some((lhs, rhs))
}

/// Both sides of `Σ λᵢ (K(ξ,eᵢ) + K(ξ,feᵢ)) = n − tr h² + Σ λᵢ²`.
pub(crate) fn k_sum(s: &StructureEval, ctx: &PointCtx) -> Option<(f64, f64)> {
    let b = ctx.basis.as_ref()?;
    let mut lhs = 0.0;
    for ((e, fe), lam) in b.e.iter().zip(&b.fe).zip(&b.lambda) {
        lhs += lam * (s.sectional(s.xi(), e).ok()? + s.sectional(s.xi(), fe).ok()?);
    }
    let rhs = s.n as f64 - s.trace_h2() + b.lambda.iter().map(|l| l * l).sum::<f64>();
    Some((lhs, rhs))
}
