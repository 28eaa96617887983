//! Curvature identities along `ξ`.

use super::hypotheses::{k_sum, lambda_inequality};
use super::{over_dirs, run_suite, CheckDef, CheckReport, PointCtx, SamplePlan, SuiteError};
use crate::classify::{Residual, Tier, Tolerances};
use crate::structure::WeakAcm;

const Q: &[&str] = &["quasi"];

fn checks(ctx: &PointCtx) -> Vec<(CheckDef, Residual)> {
    let s = ctx.s;
    let ps = &ctx.probes;
    let m = ps.len();
    let xi = s.xi();
    let mut out = Vec::new();

    let mut antisym = Residual::ZERO;
    let mut bianchi = Residual::ZERO;
    let mut pair = Residual::ZERO;
    for i in 0..m {
        for j in 0..m {
            let (x, y) = (&ps[i].v, &ps[j].v);
            let z = &ps[(i + j) % m].v;
            let w = &ps[(i + 2 * j + 1) % m].v;
            let rxy = s.riemann(x, y, z);
            antisym = antisym.merge(Residual::vectors(s, &[rxy.clone(), s.riemann(y, x, z)]));
            bianchi = bianchi.merge(Residual::vectors(
                s,
                &[rxy.clone(), s.riemann(y, z, x), s.riemann(z, x, y)],
            ));
            let a = s.inner(&rxy, w);
            let b = s.inner(&s.riemann(z, w, x), y);
            pair = pair.merge(Residual::scalar(a, b));
        }
    }
    out.push((CheckDef::plain("curvature-antisymmetry", "plumbing", Tier::Curvature), antisym));
    out.push((CheckDef::plain("curvature-bianchi", "plumbing", Tier::Curvature), bianchi));
    out.push((CheckDef::plain("curvature-pair-symmetry", "plumbing", Tier::Curvature), pair));

    let nabla_xi_h = crate::geometry::contract_direction(&s.nabla_h, xi);
    let h2 = s.h() * s.h();
    out.push((
        CheckDef::gated("nabla-xi-h", "Eq. (14)", Tier::Curvature, Q),
        over_dirs(ps, |x| {
            let lhs = &nabla_xi_h * &x.v;
            let a = &s.q_inv * &x.fv;
            let b = &s.q_inv * (&h2 * &x.fv);
            let c = s.f() * s.riemann(&x.v, xi, xi);
            Residual::vectors(s, &[lhs, -a, b, c])
        }),
    ));
    let q_plus = s.q() + &s.q_inv;
    out.push((
        CheckDef::gated("ell-q-f", "Eq. (15)", Tier::Curvature, Q),
        over_dirs(ps, |x| {
            let a = s.q() * s.ell(&x.v);
            let b = s.f() * s.ell(&x.fv);
            let c = &h2 * &x.v * 2.0;
            let d = &q_plus * (s.f() * &x.fv);
            Residual::vectors(s, &[a, -b, -c, -d])
        }),
    ));
    out.push((
        CheckDef::gated("k-sum", "Eq. (22)", Tier::Curvature, Q),
        match k_sum(s, ctx) {
            Some((l, r)) => Residual::scalar(l, r),
            None => Residual::new(f64::NAN, 0.0),
        },
    ));
    let ric = s.ricci(xi, xi);
    let target = 2.0 * s.n as f64 - s.trace_h2();
    out.push((
        CheckDef::gated("ricci-xi", "§3 Ric(ξ,ξ) = 2n − tr h²", Tier::Curvature, &["contact-metric"]),
        Residual::scalar(ric, target),
    ));
    out.push((
        CheckDef::gated("lambda-ricci", "Eq. (21)", Tier::Curvature, &["quasi", "k-xi-nonnegative"]),
        match lambda_inequality(s, ctx) {
            Some((l, r)) => Residual::new((r - l).max(0.0), l.abs().max(r.abs())),
            None => Residual::new(f64::NAN, 0.0),
        },
    ));
    out
}

/// Curvature identities for weak quasi-contact structures.
pub fn run_curvature_suite(
    acm: &WeakAcm,
    plan: &SamplePlan,
    tol: &Tolerances,
) -> Result<CheckReport, SuiteError> {
    run_suite(
        "curvature",
        acm,
        plan,
        tol,
        &["quasi", "contact-metric", "k-xi-nonnegative"],
        checks,
    )
}
