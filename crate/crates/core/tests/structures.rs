mod common;

use nalgebra::DMatrix;

use common::{acm, evals, points, tol};
use wqcm::catalog::{catalog, CatalogError, CatalogKey};
use wqcm::classify::{class_residuals, contact_volume, f_basis, validate_axioms, StructureClass};
use wqcm::suites::{run_all_suites, Verdict};
use wqcm::expr::load_structure_def;
use wqcm::structure::WeakAcm;

fn classes(key: &str) -> wqcm::classify::ClassReport {
    let a = acm(key);
    class_residuals(&a, &points(&a), 7, &tol()).unwrap()
}

#[test]
fn scaled_q_has_closed_form() {
    for (key, s) in [("scaled?s=2", 2.0), ("scaled?n=2,s=0.5", 0.5)] {
        for e in evals(&acm(key)) {
            let d = e.dim();
            let want = DMatrix::identity(d, d) * (s * s) + e.xi() * e.eta().transpose() * (1.0 - s * s);
            assert!((e.q() - want).amax() < 1e-12, "{key}");
        }
    }
}

#[test]
fn canonical_quasi_defect_matches_closed_form() {
    for s in [0.5, 2.0, 3.0] {
        let r = classes(&format!("scaled?s={s}"));
        let want = (s + s * s * s - 2.0f64).abs();
        assert!((r.quasi_canonical.unwrap() - want).abs() < 1e-9, "s = {s}");
    }
    let unit = classes("scaled?s=1");
    assert!(unit.is(StructureClass::Sasakian));
}

#[test]
fn flat_const_verdicts() {
    let r = classes("flat-const");
    assert!(r.is(StructureClass::WeakAcmAxioms));
    assert!(!r.is(StructureClass::ContactMetric));
    assert!(!r.is(StructureClass::Quasi));
    assert!(r.is(StructureClass::Normal));
    assert!((r.quasi_canonical.unwrap() - 2.0).abs() < 1e-12);
    for e in evals(&acm("flat-const")) {
        assert!(e.conn.gamma.iter().all(|m| m.amax() == 0.0));
    }
}

#[test]
fn graded_legs_have_separate_eigenvalues() {
    let key = "graded?n=2,s1=1,s2=4";
    let r = classes(key);
    assert!(r.is(StructureClass::WeakAcmAxioms));
    assert!(!r.is(StructureClass::Quasi));
    for e in evals(&acm(key)) {
        let b = f_basis(&e).unwrap();
        assert!((b.lambda[0] - 1.0).abs() < 1e-9 && (b.lambda[1] - 16.0).abs() < 1e-9);
        assert!(b.residuals(&e).max() < 1e-9);
    }
}

#[test]
fn sasakian_r7_is_sasakian() {
    let r = classes("sasakian-r7");
    for c in StructureClass::ALL {
        assert!(r.is(c), "{}", c.name());
    }
}

#[test]
fn catalog_keys() {
    assert_eq!(CatalogKey::parse("builtin:sasakian-r5").unwrap(), CatalogKey::Sasakian { n: 2 });
    assert_eq!(CatalogKey::parse("sasakian?n=3").unwrap(), CatalogKey::Sasakian { n: 3 });
    assert_eq!(
        CatalogKey::parse("scaled?s=2").unwrap(),
        CatalogKey::Scaled { n: 1, s: 2.0 }
    );
    assert_eq!(
        CatalogKey::parse("builtin:graded?n=2&s2=3").unwrap(),
        CatalogKey::Graded { s: vec![1.0, 3.0] }
    );
    assert!(matches!(CatalogKey::parse("scaled"), Err(CatalogError::InvalidParameter(_))));
    assert!(matches!(CatalogKey::parse("scaled?s=-1"), Err(CatalogError::InvalidParameter(_))));
    assert!(matches!(CatalogKey::parse("sasakian-r3?n=2"), Err(CatalogError::InvalidParameter(_))));
    assert!(matches!(CatalogKey::parse("sasakian?n=9"), Err(CatalogError::InvalidParameter(_))));
    assert!(matches!(CatalogKey::parse("flat-const?s=1"), Err(CatalogError::InvalidParameter(_))));
    assert!(matches!(CatalogKey::parse("torus"), Err(CatalogError::UnknownKey(_))));
}

#[test]
fn documents_round_trip() {
    for key in common::FIXTURES {
        let def = catalog(key).unwrap();
        let back = load_structure_def(def.to_json().as_bytes()).unwrap();
        assert_eq!(def, back, "{key}");
    }
}

#[test]
fn perturbed_explicit_q_is_flagged() {
    let def = catalog("sasakian-r3").unwrap();
    let mut doc = def.to_doc();
    doc.q = Some(vec![
        vec!["1.1".into(), "0".into(), "0".into()],
        vec!["0".into(), "1".into(), "0".into()],
        vec!["0".into(), "0".into(), "1".into()],
    ]);
    let a = WeakAcm::new(load_structure_def(serde_json::to_string(&doc).unwrap().as_bytes()).unwrap());
    let ax = validate_axioms(&a, &points(&a), &tol()).unwrap();
    let qc = ax.get("Q-consistency").unwrap();
    assert!(!qc.pass);
    assert!((qc.max_abs_residual - 0.1).abs() < 1e-12);
    assert!(!ax.pass());
}

#[test]
fn invalid_documents_are_rejected() {
    let good = catalog("sasakian-r3").unwrap().to_doc();
    let mut bad = Vec::new();
    let mut d = good.clone();
    d.n = 2;
    bad.push(serde_json::to_string(&d).unwrap());
    let mut d = good.clone();
    d.metric[0][0] = "y*y/4 +".into();
    bad.push(serde_json::to_string(&d).unwrap());
    let mut d = good.clone();
    d.metric[1][0] = "7".into();
    bad.push(serde_json::to_string(&d).unwrap());
    let mut d = good.clone();
    d.xi[2] = "w".into();
    bad.push(serde_json::to_string(&d).unwrap());
    bad.push(serde_json::to_string(&good).unwrap().replace("\"name\"", "\"nom\""));
    bad.push("{".into());
    for b in bad {
        assert!(load_structure_def(b.as_bytes()).is_err(), "{b}");
    }
}

#[test]
fn cone_residual_vanishes_off_sasakian() {
    for key in ["scaled?s=2", "graded?n=2,s1=1,s2=4", "flat-const"] {
        for e in evals(&acm(key)) {
            let c = e.cone(0.3);
            assert!(c.residual < 1e-12, "{key}");
        }
    }
}

#[test]
fn class_inclusions_hold_on_every_fixture() {
    for key in common::FIXTURES {
        let r = classes(key);
        let t = tol().deriv;
        if r.is(StructureClass::Sasakian) {
            assert!(r.get(StructureClass::ContactMetric).max_residual < 10.0 * t, "{key}");
            assert!(r.get(StructureClass::Normal).max_residual < 10.0 * t, "{key}");
        }
        if r.is(StructureClass::ContactMetric) {
            assert!(r.get(StructureClass::Quasi).max_residual < 10.0 * t, "{key}");
        }
    }
}

#[test]
fn contact_volume_scales_with_s_to_the_n() {
    for (n, s) in [(1usize, 2.0f64), (2, 0.5)] {
        let base = acm(&format!("sasakian?n={n}"));
        let scaled = acm(&format!("scaled?n={n},s={s}"));
        for p in points(&base) {
            let (eb, es) = (base.at(&p).unwrap(), scaled.at(&p).unwrap());
            let vb = contact_volume(&eb, &f_basis(&eb).unwrap()).abs();
            let vs = contact_volume(&es, &f_basis(&es).unwrap()).abs();
            assert!((vs - s.powi(n as i32) * vb).abs() < 1e-10, "n = {n}: {vs} vs {vb}");
        }
    }
}

#[test]
fn no_asserted_check_fails_on_the_catalog() {
    for key in common::FIXTURES {
        let r = run_all_suites(&acm(key), &common::plan(), &tol()).unwrap();
        let failed: Vec<&str> = r
            .checks
            .iter()
            .filter(|c| c.verdict == Verdict::Fail)
            .map(|c| c.id.as_str())
            .collect();
        assert!(failed.is_empty(), "{key}: {failed:?}");
    }
}
