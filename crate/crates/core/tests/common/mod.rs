#![allow(dead_code)]

use wqcm::catalog::catalog;
use wqcm::classify::Tolerances;
use wqcm::jet::Point;
use wqcm::structure::{StructureEval, WeakAcm};
use wqcm::suites::{sample_points, SamplePlan};

pub const SASAKIAN: &[&str] = &["sasakian-r3", "sasakian-r5"];

/// Every catalog structure exercised by the tests.
pub const FIXTURES: &[&str] = &[
    "sasakian-r3",
    "sasakian-r5",
    "sasakian-r7",
    "scaled?s=2",
    "scaled?n=2,s=0.5",
    "graded?n=2,s1=1,s2=4",
    "flat-const",
];

pub fn acm(key: &str) -> WeakAcm {
    WeakAcm::new(catalog(key).unwrap_or_else(|e| panic!("{key}: {e}")))
}

pub fn plan() -> SamplePlan {
    SamplePlan::default()
}

pub fn tol() -> Tolerances {
    Tolerances::default()
}

pub fn points(acm: &WeakAcm) -> Vec<Point> {
    sample_points(&plan(), &acm.def().domain).unwrap()
}

pub fn evals(acm: &WeakAcm) -> Vec<StructureEval> {
    points(acm).iter().map(|p| acm.at(p).unwrap()).collect()
}
