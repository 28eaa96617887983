//! Executable identity, curvature and theorem checks over sampled points.
//!
//! A suite evaluates, at every sample point, a set of hypothesis residuals
//! and a set of check residuals. A check is asserted at a point only when
//! every hypothesis it is gated on holds there; a check with no asserting
//! point is `skipped`.

mod curvature;
mod hypotheses;
mod identity;
mod report;
mod sampling;
mod theorems;

pub use curvature::run_curvature_suite;
pub use hypotheses::{hypothesis_def, HypothesisDef};
pub use identity::{run_identity_suite, run_validate_suite};
pub use report::{emit_report, CheckRecord, CheckReport, HypothesisRecord, ReportFormat, Verdict};
pub use sampling::{sample_points, SamplePlan, Strategy, MARGIN};
pub use theorems::run_theorem_suite;

use rayon::prelude::*;
use thiserror::Error;

use crate::classify::{directions, f_basis, probes, FBasis, Probe, Residual, Tier, Tolerances};
use crate::structure::{StructureEval, StructureEvalError, WeakAcm};

#[derive(Debug, Error)]
pub enum SuiteError {
    #[error("sample domain is empty")]
    EmptyDomain,
    #[error(transparent)]
    Eval(#[from] StructureEvalError),
}

/// A check's static description.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckDef {
    pub id: &'static str,
    pub paper: &'static str,
    pub tier: Tier,
    /// Conclusions are asserted at ten times the tier tolerance.
    pub conclusion: bool,
    pub gates: &'static [&'static str],
}

impl CheckDef {
    pub const fn plain(id: &'static str, paper: &'static str, tier: Tier) -> Self {
        Self {
            id,
            paper,
            tier,
            conclusion: false,
            gates: &[],
        }
    }

    pub const fn gated(
        id: &'static str,
        paper: &'static str,
        tier: Tier,
        gates: &'static [&'static str],
    ) -> Self {
        Self {
            id,
            paper,
            tier,
            conclusion: false,
            gates,
        }
    }

    pub const fn conclusion(
        id: &'static str,
        paper: &'static str,
        tier: Tier,
        gates: &'static [&'static str],
    ) -> Self {
        Self {
            id,
            paper,
            tier,
            conclusion: true,
            gates,
        }
    }

    fn tol(&self, tol: &Tolerances) -> f64 {
        let t = tol.get(self.tier);
        if self.conclusion {
            10.0 * t
        } else {
            t
        }
    }
}

/// Everything a suite needs at one point.
pub struct PointCtx<'a> {
    pub s: &'a StructureEval,
    pub probes: Vec<Probe>,
    pub basis: Option<FBasis>,
    pub index: usize,
    pub count: usize,
}

struct PointResult {
    hyps: Vec<Residual>,
    canonical: Option<f64>,
    checks: Vec<(CheckDef, Residual)>,
}

#[derive(Debug, Default)]
struct CheckAcc {
    residual: Residual,
    points: usize,
}

/// Evaluate `checks` and the hypotheses `hyps` at every point of the plan
/// and gate the results.
fn run_suite(
    suite: &str,
    acm: &WeakAcm,
    plan: &SamplePlan,
    tol: &Tolerances,
    hyps: &[&'static str],
    checks: impl Fn(&PointCtx) -> Vec<(CheckDef, Residual)> + Sync,
) -> Result<CheckReport, SuiteError> {
    let points = sample_points(plan, &acm.def().domain)?;
    let count = points.len();
    let results: Vec<PointResult> = points
        .par_iter()
        .enumerate()
        .map(|(index, p)| {
            let s = acm.at(p)?;
            let ctx = PointCtx {
                probes: probes(&s, &directions(&s, plan.seed, index)),
                basis: f_basis(&s).ok(),
                s: &s,
                index,
                count,
            };
            let hyp_values = hyps.iter().map(|h| hypotheses::evaluate(h, &ctx)).collect();
            let canonical = ctx.basis.as_ref().map(|b| {
                let e = probes(&s, &[b.e[0].clone()]);
                crate::classify::quasi_pair(&s, &e[0], &e[0]).raw
            });
            Ok(PointResult {
                hyps: hyp_values,
                canonical,
                checks: checks(&ctx),
            })
        })
        .collect::<Result<_, SuiteError>>()?;

    let hyp_tol: Vec<f64> = hyps.iter().map(|h| tol.get(hypothesis_def(h).tier)).collect();
    let mut hyp_acc: Vec<CheckAcc> = hyps.iter().map(|_| CheckAcc::default()).collect();
    let mut canonical: Option<f64> = None;
    let mut order: Vec<CheckDef> = Vec::new();
    let mut acc: Vec<CheckAcc> = Vec::new();
    for r in &results {
        let met: Vec<bool> = r
            .hyps
            .iter()
            .zip(&hyp_tol)
            .map(|(h, t)| h.passes(*t))
            .collect();
        for ((a, h), m) in hyp_acc.iter_mut().zip(&r.hyps).zip(&met) {
            a.residual = a.residual.merge(*h);
            a.points += usize::from(*m);
        }
        if let Some(c) = r.canonical {
            canonical = Some(canonical.map_or(c, |a: f64| a.max(c)));
        }
        for (def, res) in &r.checks {
            let k = match order.iter().position(|d| d.id == def.id) {
                Some(k) => k,
                None => {
                    order.push(*def);
                    acc.push(CheckAcc::default());
                    order.len() - 1
                }
            };
            let gated_ok = def.gates.iter().all(|g| {
                let i = hyps
                    .iter()
                    .position(|h| h == g)
                    .unwrap_or_else(|| panic!("check {} gated on unknown hypothesis {g}", def.id));
                met[i]
            });
            if gated_ok {
                acc[k].residual = acc[k].residual.merge(*res);
                acc[k].points += 1;
            }
        }
    }

    let checks = order
        .iter()
        .zip(acc)
        .map(|(def, a)| {
            let t = def.tol(tol);
            let verdict = if a.points == 0 {
                Verdict::Skipped
            } else if a.residual.passes(t) {
                Verdict::Pass
            } else {
                Verdict::Fail
            };
            CheckRecord {
                id: def.id.to_string(),
                paper: def.paper.to_string(),
                max_residual: a.residual.normalized,
                tol: t,
                verdict,
                points: a.points,
                max_abs_residual: a.residual.raw,
                gated_on: def.gates.iter().map(|g| g.to_string()).collect(),
            }
        })
        .collect();
    let hypotheses = hyps
        .iter()
        .zip(hyp_acc)
        .zip(hyp_tol)
        .map(|((h, a), t)| {
            let def = hypothesis_def(h);
            HypothesisRecord {
                id: def.id.to_string(),
                paper: def.paper.to_string(),
                max_residual: a.residual.normalized,
                max_abs_residual: a.residual.raw,
                tol: t,
                met_points: a.points,
                points: count,
                canonical_abs_residual: if def.id == "quasi" { canonical } else { None },
            }
        })
        .collect();
    Ok(CheckReport {
        suite: suite.to_string(),
        structure: acm.name().to_string(),
        seed: plan.seed,
        tol: *tol,
        checks,
        hypotheses,
        timestamp: None,
    })
}

/// Run the identity, curvature and theorem suites and merge them into one
/// report.
pub fn run_all_suites(
    acm: &WeakAcm,
    plan: &SamplePlan,
    tol: &Tolerances,
) -> Result<CheckReport, SuiteError> {
    let mut all = run_identity_suite(acm, plan, tol)?;
    all.suite = "all".into();
    for r in [run_curvature_suite(acm, plan, tol)?, run_theorem_suite(acm, plan, tol)?] {
        all.merge(r);
    }
    Ok(all)
}

/// Helpers shared by the suites.
pub(crate) fn over_pairs(
    ps: &[Probe],
    mut f: impl FnMut(&Probe, &Probe) -> Residual,
) -> Residual {
    let mut r = Residual::ZERO;
    for x in ps {
        for y in ps {
            r = r.merge(f(x, y));
        }
    }
    r
}

pub(crate) fn over_dirs(ps: &[Probe], f: impl FnMut(&Probe) -> Residual) -> Residual {
    ps.iter().map(f).collect()
}

/// `|Σ terms|` scaled by the largest term.
pub(crate) fn scalar_sum(terms: &[f64]) -> Residual {
    let sum: f64 = terms.iter().sum();
    let scale = terms.iter().fold(0.0f64, |m, t| m.max(t.abs()));
    Residual::new(sum, scale)
}
