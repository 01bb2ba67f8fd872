use foldreg::regularize::CATALOG;
use foldreg::scenario;
use foldreg::{Error, Exact, PlanarField, Regularized64, Transition, Transition64};
use proptest::prelude::*;

fn catalog() -> Vec<Transition64> {
    CATALOG.iter().map(|l| Transition::catalog(l).unwrap()).collect()
}

#[test]
fn catalog_polynomials() {
    let v: f64 = 0.4;
    let want = [v, -v.powi(3) / 2.0 + 1.5 * v, -v.powi(5) + 1.5 * v.powi(3) + 0.5 * v, -2.5 * v.powi(7) + 4.5 * v.powi(5) - 2.0 * v.powi(3) + v];
    for (p, w) in catalog().iter().zip(want) {
        assert!((p.value(&v) - w).abs() < 1e-15, "{}", p.label());
        assert!(p.validate().is_ok());
    }
}

#[test]
fn smooth_members_are_flat_at_the_ends() {
    for p in catalog().iter().filter(|p| p.label() != "linear") {
        assert_eq!(p.d1(&1.0), 0.0, "{}", p.label());
        assert_eq!(p.d1(&-1.0), 0.0, "{}", p.label());
    }
    let lin = Transition64::catalog("linear").unwrap();
    assert_eq!(lin.d1(&1.0), 1.0);
}

#[test]
fn exact_catalog_values() {
    let p = Transition::<Exact>::catalog("cubic").unwrap();
    assert_eq!(p.value(&Exact::new(1, 2)), Exact::new(11, 16));
    assert_eq!(p.d1(&Exact::new(0, 1)), Exact::new(3, 2));
}

#[test]
fn rejected_transitions() {
    assert!(matches!(Transition64::catalog("quintic-b"), Err(Error::Domain(_))));
    assert!(matches!(Transition64::catalog("sigmoid"), Err(Error::Usage(_))));
    // phi(1) = 2
    assert!(Transition64::from_odd_checked("x", &[2.0]).is_err());
    // not monotone
    assert!(Transition64::from_odd_checked("x", &[-1.0, 2.0]).is_err());
}

#[test]
fn regularized_field_interpolates_the_two_sides() {
    let fam = scenario::vi_basic::<f64>();
    let phi = Transition64::catalog("cubic").unwrap();
    let r = Regularized64::new(fam.clone(), phi.clone(), 0.03, 0.01).unwrap();
    let (x, y) = (0.2, 0.004);
    let a = fam.x_at(&0.03).eval(x, y);
    let b = fam.y_at(&0.03).eval(x, y);
    let p = phi.value(&(y / 0.01));
    let g = r.g(x, y);
    assert!((g.0 - (a.0 + b.0 + p * (a.0 - b.0))).abs() < 1e-14);
    assert!((g.1 - (a.1 + b.1 + p * (a.1 - b.1))).abs() < 1e-14);
    // outside the band the regularized field is 2X or 2Y
    let above = r.g(x, 0.05);
    let xa = fam.x_at(&0.03).eval(x, 0.05);
    assert!((above.0 - 2.0 * xa.0).abs() < 1e-14 && (above.1 - 2.0 * xa.1).abs() < 1e-14);
    assert!(Regularized64::new(fam, phi, 0.0, 0.0).is_err());
}

#[test]
fn slow_chart_jacobian_matches_differences() {
    let r = Regularized64::new(scenario::bfield(), Transition64::catalog("septic").unwrap(), 0.01, 0.02).unwrap();
    let (x, v) = (0.1, 0.3);
    let j = r.f_jet(x, v).jac;
    let h = 1e-6;
    let fx = |x, v| r.f(x, v);
    let dx = ((fx(x + h, v).0 - fx(x - h, v).0) / (2.0 * h), (fx(x + h, v).1 - fx(x - h, v).1) / (2.0 * h));
    let dv = ((fx(x, v + h).0 - fx(x, v - h).0) / (2.0 * h), (fx(x, v + h).1 - fx(x, v - h).1) / (2.0 * h));
    for (a, b) in [(j[0][0], dx.0), (j[1][0], dx.1), (j[0][1], dv.0), (j[1][1], dv.1)] {
        assert!((a - b).abs() < 1e-7, "{a} vs {b}");
    }
}

proptest! {
    #[test]
    fn catalog_is_odd_bounded_and_monotone(v in -1.5f64..1.5, k in 0usize..4) {
        let p = &catalog()[k];
        prop_assert!(p.value(&v).abs() <= 1.0 + 1e-15);
        prop_assert!((p.value(&-v) + p.value(&v)).abs() < 1e-15);
        if v.abs() < 1.0 {
            prop_assert!(p.d1(&v) > 0.0);
        }
    }

    #[test]
    fn derivative_matches_difference_quotient(v in -0.99f64..0.99, k in 0usize..4) {
        let p = &catalog()[k];
        let h = 1e-6;
        let n = (p.value(&(v + h)) - p.value(&(v - h))) / (2.0 * h);
        prop_assert!((p.d1(&v) - n).abs() < 1e-7);
        let n2 = (p.d1(&(v + h)) - p.d1(&(v - h))) / (2.0 * h);
        prop_assert!((p.d2(&v) - n2).abs() < 1e-6);
    }

    #[test]
    fn inverse_round_trips(y in -0.999f64..0.999, k in 0usize..4) {
        let p = &catalog()[k];
        let v = p.inverse(y).unwrap();
        prop_assert!((p.value(&v) - y).abs() < 1e-12);
    }
}
