use proptest::prelude::*;

use wqcm::expr::parse;
use wqcm::jet::Point;

fn coords() -> Vec<String> {
    vec!["x".into(), "y".into()]
}

proptest! {
    #[test]
    fn product_of_sin_and_exp(x in -2.0f64..2.0, y in -2.0f64..2.0) {
        let e = parse("sin(x)*exp(y)", &coords()).unwrap();
        let j = e.eval_jet(&Point::new(vec![x, y])).unwrap();
        let (s, c, ey) = (x.sin(), x.cos(), y.exp());
        prop_assert!((j.value() - s * ey).abs() < 1e-12);
        prop_assert!((j.gradient()[0] - c * ey).abs() < 1e-12);
        prop_assert!((j.gradient()[1] - s * ey).abs() < 1e-12);
        prop_assert!((j.hessian(0, 0) + s * ey).abs() < 1e-12);
        prop_assert!((j.hessian(0, 1) - c * ey).abs() < 1e-12);
        prop_assert!((j.hessian(1, 1) - s * ey).abs() < 1e-12);
    }

    #[test]
    fn quotient_and_sqrt(x in 0.1f64..3.0, y in -1.0f64..1.0) {
        let e = parse("sqrt(x)/(2 + y)", &coords()).unwrap();
        let j = e.eval_jet(&Point::new(vec![x, y])).unwrap();
        let (r, w) = (x.sqrt(), 2.0 + y);
        prop_assert!((j.gradient()[0] - 0.5 / (r * w)).abs() < 1e-12);
        prop_assert!((j.gradient()[1] + r / (w * w)).abs() < 1e-12);
        prop_assert!((j.hessian(0, 0) + 0.25 / (x * r * w)).abs() < 1e-11);
        prop_assert!((j.hessian(1, 1) - 2.0 * r / (w * w * w)).abs() < 1e-11);
        prop_assert!((j.hessian(0, 1) - j.hessian(1, 0)).abs() == 0.0);
    }

    #[test]
    fn integer_powers(x in 0.2f64..2.0, k in -4i32..5) {
        let e = parse(&format!("x^({k})"), &coords()).unwrap();
        let j = e.eval_jet(&Point::new(vec![x, 0.0])).unwrap();
        let kf = k as f64;
        prop_assert!((j.value() - x.powi(k)).abs() < 1e-12 * x.powi(k).abs().max(1.0));
        prop_assert!((j.gradient()[0] - kf * x.powi(k - 1)).abs() < 1e-10 * x.powi(k - 1).abs().max(1.0));
        let h = kf * (kf - 1.0) * x.powi(k - 2);
        prop_assert!((j.hessian(0, 0) - h).abs() < 1e-9 * h.abs().max(1.0));
    }
}

#[test]
fn domain_errors_surface() {
    let e = parse("sqrt(x)", &coords()).unwrap();
    assert!(e.eval_jet(&Point::new(vec![-1.0, 0.0])).is_err());
    let e = parse("1/x", &coords()).unwrap();
    assert!(e.eval_jet(&Point::new(vec![0.0, 0.0])).is_err());
}
