use foldreg::fields::{eval_jet, FnField};
use foldreg::scenario;
use foldreg::{Exact, Family64, Partial, PlanarField, Poly, PolyField};
use proptest::prelude::*;

fn builtins() -> Vec<(&'static str, Family64)> {
    vec![
        ("ii-basic", scenario::ii_basic()),
        ("vi-basic", scenario::vi_basic()),
        ("bfield", scenario::bfield()),
        ("ex1", scenario::ex1(0.5)),
    ]
}

// central differences on the raw evaluator; second derivatives use a wider step
fn fd(f: &PolyField<f64>, which: Partial, x: f64, y: f64) -> f64 {
    let e = |x: f64, y: f64, c: usize| {
        let v = f.eval(x, y);
        if c == 0 {
            v.0
        } else {
            v.1
        }
    };
    let (h, k) = (1e-5, 1e-4);
    let d1x = |c, x, y| (e(x + h, y, c) - e(x - h, y, c)) / (2.0 * h);
    let d1y = |c, x, y| (e(x, y + h, c) - e(x, y - h, c)) / (2.0 * h);
    match which {
        Partial::C1 => e(x, y, 0),
        Partial::C2 => e(x, y, 1),
        Partial::C1x => d1x(0, x, y),
        Partial::C1y => d1y(0, x, y),
        Partial::C2x => d1x(1, x, y),
        Partial::C2y => d1y(1, x, y),
        Partial::C1xx => (e(x + k, y, 0) - 2.0 * e(x, y, 0) + e(x - k, y, 0)) / (k * k),
        Partial::C2xx => (e(x + k, y, 1) - 2.0 * e(x, y, 1) + e(x - k, y, 1)) / (k * k),
        Partial::C2yy => (e(x, y + k, 1) - 2.0 * e(x, y, 1) + e(x, y - k, 1)) / (k * k),
        Partial::C2xy => {
            (e(x + k, y + k, 1) - e(x + k, y - k, 1) - e(x - k, y + k, 1) + e(x - k, y - k, 1)) / (4.0 * k * k)
        }
    }
}

#[test]
fn closed_partials_match_finite_differences_on_grid() {
    for (name, fam) in builtins() {
        for a in [0.0, 0.1] {
            for f in [fam.x_at(&a), fam.y_at(&a)] {
                for i in 0..5 {
                    for j in 0..5 {
                        let (x, y) = (-0.5 + 0.25 * i as f64, -0.5 + 0.25 * j as f64);
                        for w in Partial::ALL {
                            let c = f.partial(w, &x, &y);
                            let n = fd(&f, w, x, y);
                            assert!((c - n).abs() <= 1e-6 * c.abs().max(1.0), "{name} {w:?} at ({x}, {y}): {c} vs {n}");
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn closure_fields_fall_back_to_finite_differences() {
    let f = FnField(|x: f64, y: f64| (x.sin() * y, x * x + y.exp()));
    let p = (0.3, -0.2);
    assert!((eval_jet(&f, p, Partial::C1x).unwrap() - 0.3f64.cos() * -0.2).abs() < 1e-6);
    assert!((eval_jet(&f, p, Partial::C2x).unwrap() - 0.6).abs() < 1e-6);
    assert!((eval_jet(&f, p, Partial::C2yy).unwrap() - (-0.2f64).exp()).abs() < 1e-5);
    assert!((eval_jet(&f, p, Partial::C2xy).unwrap()).abs() < 1e-5);
}

#[test]
fn origin_jets_of_the_basic_families() {
    let j = scenario::ii_basic::<f64>().origin_jet();
    assert_eq!((j.x.c1, j.x.c2_x, j.y.c1, j.y.c2_x), (1.0, -1.0, -1.0, -1.0));
    assert_eq!(j.det_x(), -2.0);
    let j = scenario::vi_basic::<f64>().origin_jet();
    assert_eq!((j.x.c2_y, j.x.c2_a, j.det_y()), (3.5, -1.0, 3.5));
}

#[test]
fn exact_and_float_jets_agree() {
    let fe = scenario::bfield::<Exact>().origin_jet();
    let ff = scenario::bfield::<f64>().origin_jet();
    let to = |r: Exact| *r.numer() as f64 / *r.denom() as f64;
    for (a, b) in [(fe.det_x(), ff.det_x()), (fe.det_xx(), ff.det_xx()), (fe.x.c1_x, ff.x.c1_x)] {
        approx::assert_relative_eq!(to(a), b, max_relative = 1e-15);
    }
}

#[test]
fn reflection_orients_the_family() {
    let fam = scenario::ex1::<f64>(0.5);
    assert!(fam.origin_jet().x.c1 < 0.0);
    let (o, reflected) = fam.oriented();
    assert!(reflected);
    assert!(o.origin_jet().x.c1 > 0.0);
    assert_eq!(o.reflected().reflected(), o);
}

#[test]
fn monomial_tables_round_trip() {
    let p = Poly::<f64>::parse_table([("x^2 y", 2.0), ("a", -1.0), ("1", 0.5)]).unwrap();
    let back = Poly::parse_table(p.to_table().iter().map(|(k, c)| (k.as_str(), *c))).unwrap();
    assert_eq!(p, back);
    assert!(Poly::<f64>::parse_table([("z^2", 1.0)]).is_err());
}

proptest! {
    #[test]
    fn polynomial_derivative_matches_difference_quotient(
        c in prop::collection::vec(-3.0f64..3.0, 6),
        x in -1.0f64..1.0,
        y in -1.0f64..1.0,
    ) {
        let p = Poly::from_terms([((0, 0, 0), c[0]), ((1, 0, 0), c[1]), ((0, 1, 0), c[2]), ((2, 0, 0), c[3]), ((1, 1, 0), c[4]), ((3, 0, 0), c[5])]);
        let f = PolyField::new(p.clone(), p);
        let h = 1e-6;
        let n = (f.eval(x + h, y).0 - f.eval(x - h, y).0) / (2.0 * h);
        prop_assert!((f.partial(Partial::C1x, &x, &y) - n).abs() < 1e-6);
    }
}
