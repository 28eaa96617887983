//! Structure identities: the axioms, the general weak a.c.m. identities and
//! the consequences of the quasi-contact condition.

use super::hypotheses::nabla_xi_f;
use super::{over_dirs, over_pairs, run_suite, scalar_sum, CheckDef, CheckReport, PointCtx, SamplePlan, SuiteError};
use crate::classify::{axiom_residuals, Residual, Tier, Tolerances};
use crate::geometry::{
    exterior_derivative_2form, metric_compatibility_residual, torsion, VectorEval,
};
use crate::structure::WeakAcm;

const Q: &[&str] = &["quasi"];
const NXF: &[&str] = &["nabla-xi-f"];

fn axiom_label(name: &str) -> &'static str {
    match name {
        "eta-xi" | "f-squared" | "metric-compat" | "Q-consistency" => "Eq. (2)",
        "f-skew" => "§2 f skew-symmetric",
        "Q-self-adjoint" | "Q-positive" => "§2 Q self-adjoint, Q > 0",
        "rank-f" => "§2 rank f = 2n",
        _ => "Eq. (3)",
    }
}

fn checks(ctx: &PointCtx) -> Vec<(CheckDef, Residual)> {
    let s = ctx.s;
    let ps = &ctx.probes;
    let xi = s.xi();
    let mut out = axiom_checks(ctx);

    out.push((
        CheckDef::plain("levi-civita-metric", "plumbing", Tier::Algebraic),
        Residual::new(metric_compatibility_residual(&s.metric, &s.conn), s.g().amax()),
    ));
    let torsion_r = over_dirs(ps, |x| {
        let fx = VectorEval::apply(&s.f, &VectorEval::constant(x.v.clone()));
        Residual::vectors(s, &[torsion(&s.conn, &s.xi, &fx)])
    });
    out.push((CheckDef::plain("levi-civita-torsion", "plumbing", Tier::Algebraic), torsion_r));
    let dd = match exterior_derivative_2form(&s.deta) {
        Ok(w) => {
            let scale = s.deta.partials.iter().map(|m| m.amax()).fold(0.0, f64::max);
            Residual::new(w.max_abs(), scale)
        }
        Err(_) => Residual::new(f64::NAN, 0.0),
    };
    out.push((CheckDef::plain("dd-eta", "plumbing", Tier::Deriv), dd));
    out.push((
        CheckDef::plain("h-xi", "Prop. 3.2 proof", Tier::Deriv),
        Residual::vectors(s, &[s.h() * xi]),
    ));
    out.push((
        CheckDef::plain("n3-xi", "Prop. 3.2 proof", Tier::Deriv),
        Residual::vectors(s, &[s.n_tensors(xi, xi).n3]),
    ));
    let t = if ctx.count > 1 {
        -1.0 + 2.0 * ctx.index as f64 / (ctx.count - 1) as f64
    } else {
        0.0
    };
    let cone = s.cone(t);
    out.push((
        CheckDef::plain("cone-j2", "§2 J² = −P", Tier::Algebraic),
        Residual::new(cone.residual, cone.p.amax()),
    ));
    out.push((
        CheckDef::plain("n2-connection", "Eq. (4)", Tier::Deriv),
        over_pairs(ps, |x, y| {
            let n2 = 2.0 * s.deta_xy(&x.fv, &y.v) - 2.0 * s.deta_xy(&y.fv, &x.v);
            Residual::scalar(n2, s.n2_via_connection(&x.v, &y.v))
        }),
    ));

    // consequences of the quasi-contact condition
    out.push((
        CheckDef::gated("nabla-eta-q", "Eq. (5)", Tier::Deriv, Q),
        over_pairs(ps, |x, y| {
            let qy = s.q() * &y.v;
            scalar_sum(&[
                s.nabla_eta_xy(&x.v, &qy),
                s.nabla_eta_xy(&x.fv, &y.fv),
                2.0 * s.inner(&x.fv, &y.v),
            ])
        }),
    ));
    out.push((CheckDef::gated("nabla-xi-f", "Eq. (6)", Tier::Deriv, Q), nabla_xi_f(s, ctx)));
    let nxx = s.nabla_xi_along(xi);
    let geodesic = Residual::vectors(s, &[nxx]).merge(over_dirs(ps, |x| {
        Residual::new(s.nabla_eta_xy(xi, &x.v), 0.0)
    }));
    out.push((CheckDef::gated("nabla-xi-xi", "Eq. (7)", Tier::Deriv, Q), geodesic));
    out.push((
        CheckDef::gated("q-nabla-xi", "Eq. (8)", Tier::Deriv, Q),
        over_dirs(ps, |x| {
            let target = &x.fv + s.f() * &x.hv;
            let a = Residual::vectors(s, &[s.q() * &x.nabla_xi, target.clone()]);
            let qx = s.q() * &x.v;
            let b = Residual::vectors(s, &[s.nabla_xi_along(&qx), target]);
            a.merge(b)
        }),
    ));
    let lie_q = s.lie_xi_q();
    let nabla_q_xi = crate::geometry::contract_direction(&s.nabla_q, xi);
    out.push((
        CheckDef::gated("lie-xi-q", "Eq. (9)", Tier::Deriv, Q),
        over_dirs(ps, |x| {
            Residual::vectors(s, &[&lie_q * &x.v]).merge(Residual::vectors(s, &[&nabla_q_xi * &x.v]))
        }),
    ));
    out.push((
        CheckDef::gated("hf-anticommute", "Eq. (10)", Tier::Deriv, Q),
        over_dirs(ps, |x| Residual::vectors(s, &[s.h() * &x.fv, s.f() * &x.hv])),
    ));
    out.push((
        CheckDef::gated("hq-commute", "Eq. (11)", Tier::Deriv, Q),
        over_dirs(ps, |x| {
            let qx = s.q() * &x.v;
            Residual::vectors(s, &[s.h() * qx, -(s.q() * &x.hv)])
        }),
    ));
    out.push((
        CheckDef::gated("h-via-nabla-xi", "Eq. (13)", Tier::Deriv, Q),
        over_dirs(ps, |x| {
            Residual::vectors(
                s,
                &[&x.hv * 2.0, -(s.f() * &x.nabla_xi), s.nabla_xi_along(&x.fv)],
            )
        }),
    ));
    out.push((
        CheckDef::gated("h-asymmetry-n2", "Eq. (16)", Tier::Deriv, NXF),
        over_pairs(ps, |x, y| {
            let n2 = 2.0 * s.deta_xy(&x.fv, &y.v) - 2.0 * s.deta_xy(&y.fv, &x.v);
            scalar_sum(&[s.inner(&x.hv, &y.v), -s.inner(&y.hv, &x.v), 0.5 * n2])
        }),
    ));
    out
}

/// Axioms, general identities, and the quasi-contact consequences gated on
/// their hypotheses.
pub fn run_identity_suite(
    acm: &WeakAcm,
    plan: &SamplePlan,
    tol: &Tolerances,
) -> Result<CheckReport, SuiteError> {
    run_suite("identity", acm, plan, tol, &["quasi", "nabla-xi-f"], checks)
}

fn axiom_checks(ctx: &PointCtx) -> Vec<(CheckDef, Residual)> {
    axiom_residuals(ctx.s)
        .into_iter()
        .map(|(name, r)| (CheckDef::plain(name, axiom_label(name), Tier::Algebraic), r))
        .collect()
}

/// The weak a.c.m. axioms alone.
pub fn run_validate_suite(
    acm: &WeakAcm,
    plan: &SamplePlan,
    tol: &Tolerances,
) -> Result<CheckReport, SuiteError> {
    run_suite("validate", acm, plan, tol, &[], axiom_checks)
}
