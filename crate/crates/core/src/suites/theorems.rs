//! Theorems and propositions as pointwise material implications.

use super::hypotheses::{horizontal, lambda_inequality};
use super::{over_pairs, run_suite, CheckDef, CheckReport, PointCtx, SamplePlan, SuiteError};
use crate::classify::{
    contact_metric_residual, contact_volume, killing_residual, normal_residual, Residual, Tier,
    Tolerances,
};
use crate::geometry::exterior_derivative_2form;
use crate::structure::WeakAcm;

/// Smallest contact volume accepted as non-vanishing.
pub const CONTACT_VOLUME_MIN: f64 = 1e-6;

const HYPS: &[&str] = &[
    "quasi",
    "nabla-xi-minus-f",
    "sasakian-condition",
    "ell-minus-id",
    "ell-as-printed",
    "killing-xi",
    "tr-h2-nonpositive",
    "curvature-xi",
    "k-xi-nonnegative",
    "tr-qtilde-zero",
    "lambda-equality",
    "ker-eta-integrable",
    "nabla-q-ker-eta",
    "h-self-adjoint",
];

const T31: &[&str] = &["quasi", "nabla-xi-minus-f"];
const T32: &[&str] = &["quasi", "k-xi-nonnegative"];
const T32_EQ: &[&str] = &["quasi", "k-xi-nonnegative", "tr-qtilde-zero", "lambda-equality"];
const T32_KILLING: &[&str] = &[
    "quasi",
    "k-xi-nonnegative",
    "tr-qtilde-zero",
    "lambda-equality",
    "killing-xi",
];
const T33: &[&str] = &["quasi", "sasakian-condition"];
const T34: &[&str] = &["quasi", "ell-minus-id", "killing-xi"];
const T35: &[&str] = &["quasi", "tr-h2-nonpositive", "curvature-xi"];
const P33A: &[&str] = &["quasi", "killing-xi"];
const P33B: &[&str] = &["quasi", "ker-eta-integrable"];
const P34: &[&str] = &["quasi", "nabla-q-ker-eta", "h-self-adjoint"];

fn checks(ctx: &PointCtx) -> Vec<(CheckDef, Residual)> {
    let s = ctx.s;
    let ps = &ctx.probes;
    let qt = s.q_tilde();
    let qtilde = Residual::entries(&[s.q().clone(), -s.identity()]);
    let contact = contact_metric_residual(s, ps);
    let killing = killing_residual(s, ps);
    let normal = normal_residual(s, ps);
    let k_contact = contact.merge(killing);
    let sasakian = contact.merge(normal);
    let h2_qt2 = Residual::entries(&[s.h() * s.h() * 2.0, -(&qt * &qt)]);
    let conc = CheckDef::conclusion;
    let (d, c, a) = (Tier::Deriv, Tier::Curvature, Tier::Algebraic);

    let mut out = vec![
        (conc("t31-qtilde", "Thm 3.1 Q = id", a, T31), qtilde),
        (conc("t31-k-contact", "Thm 3.1 K-contact", d, T31), k_contact),
    ];

    let ineq = lambda_inequality(s, ctx);
    out.push((
        conc("t32-inequality", "Thm 3.2 Eq. (21)", c, T32),
        match ineq {
            Some((l, r)) => Residual::new((r - l).max(0.0), l.abs().max(r.abs())),
            None => Residual::new(f64::NAN, 0.0),
        },
    ));
    out.push((conc("t32-equality-qtilde", "Thm 3.2 Q̃ = 0", a, T32_EQ), qtilde));
    let lambda_one = match &ctx.basis {
        Some(b) => b
            .lambda
            .iter()
            .map(|l| Residual::scalar(*l, 1.0))
            .collect(),
        None => Residual::new(f64::NAN, 0.0),
    };
    out.push((conc("t32-equality-lambda", "Thm 3.2 λᵢ = 1", a, T32_EQ), lambda_one));
    let ric = s.ricci(s.xi(), s.xi());
    out.push((
        conc("t32-equality-ricci", "Thm 3.2 Ric(ξ,ξ) = 2n − tr h²", c, T32_EQ),
        Residual::scalar(ric, 2.0 * s.n as f64 - s.trace_h2()),
    ));
    out.push((conc("t32-k-contact", "Thm 3.2 K-contact", d, T32_KILLING), k_contact));

    out.push((conc("t33-qtilde", "Thm 3.3 Q = id", a, T33), qtilde));
    out.push((conc("t33-sasakian", "Thm 3.3 Sasakian", d, T33), sasakian));

    out.push((conc("t34-h2-qtilde2", "Thm 3.4 2h² = Q̃²", d, T34), h2_qt2));
    out.push((conc("t34-qtilde", "Thm 3.4 Q = id", a, T34), qtilde));
    out.push((conc("t34-k-contact", "Thm 3.4 K-contact", d, T34), k_contact));

    out.push((conc("t35-h2-qtilde2", "Thm 3.5 2h² = Q̃²", d, T35), h2_qt2));
    out.push((conc("t35-qtilde", "Thm 3.5 Q = id", a, T35), qtilde));
    out.push((conc("t35-sasakian", "Thm 3.5 Sasakian", d, T35), sasakian));

    let parts = s.h_parts();
    out.push((
        conc("p33-h-skew", "Prop 3.3 h + h* = 0", d, P33A),
        Residual::entries(&[parts.h.clone(), parts.h_adjoint.clone()]),
    ));
    out.push((
        conc("p33-h-self-adjoint", "Prop 3.3 h = h*", d, P33B),
        Residual::entries(&[parts.h.clone(), -parts.h_adjoint.clone()]),
    ));

    let dphi = match exterior_derivative_2form(&s.phi) {
        Ok(w) => {
            let scale = s.phi.partials.iter().map(|m| m.amax()).fold(0.0, f64::max);
            Residual::new(w.max_abs(), scale)
        }
        Err(_) => Residual::new(f64::NAN, 0.0),
    };
    out.push((conc("p34-dphi", "Prop 3.4 dΦ = 0", d, P34), dphi));
    let volume = match &ctx.basis {
        Some(b) => {
            let v = contact_volume(s, b).abs();
            Residual::new((CONTACT_VOLUME_MIN - v).max(0.0), v)
        }
        None => Residual::new(f64::NAN, 0.0),
    };
    out.push((conc("p34-contact", "Prop 3.4 η ∧ (dη)ⁿ ≠ 0", d, P34), volume));
    let half_qt = &qt * 0.5;
    out.push((
        conc("p34-deta-phi", "Prop 3.4 proof", d, P34),
        over_pairs(ps, |x, y| {
            let (xh, yh) = (horizontal(s, &x.v), horizontal(s, &y.v));
            let shifted = &xh + &half_qt * &xh;
            Residual::scalar(s.deta_xy(&shifted, &yh), s.phi_xy(&xh, &yh))
        }),
    ));
    out
}

/// Rigidity theorems and propositions, each asserted where its hypotheses hold.
pub fn run_theorem_suite(
    acm: &WeakAcm,
    plan: &SamplePlan,
    tol: &Tolerances,
) -> Result<CheckReport, SuiteError> {
    run_suite("theorems", acm, plan, tol, HYPS, checks)
}
