use foldreg::equilibria::{self, PointKind};
use foldreg::scenario;
use foldreg::{Exact, Family64, Regularized64, Transition, Transition64};

fn phi(l: &str) -> Transition64 {
    Transition::catalog(l).unwrap()
}

fn focus_cases() -> Vec<(Family64, Transition64)> {
    vec![
        (scenario::ii_basic(), phi("cubic")),
        (scenario::ii_basic(), phi("quintic")),
        (scenario::vi_basic(), phi("cubic")),
        (scenario::vi_basic(), phi("quintic")),
        (scenario::bfield(), phi("septic")),
        (scenario::bfield(), phi("cubic")),
    ]
}

#[test]
fn exact_chart_of_the_invisible_family() {
    let fam = scenario::ii_basic::<Exact>();
    for (l, d, dh) in [("cubic", Exact::new(3, 32), Exact::new(4, 3)), ("quintic", Exact::new(1, 32), Exact::new(4, 1))] {
        let c = equilibria::exact_chart(&fam, &Transition::<Exact>::catalog(l).unwrap()).unwrap();
        assert_eq!((c.d_coeff, c.delta_h), (d, dh), "{l}");
        // D = -N^2 / (8 phi'(v*) (det Z)_x), delta_H = -M/N
        let hand_d = -c.n * c.n / (Exact::from(8) * c.dphi_vstar * c.det_x);
        assert_eq!(hand_d, d);
        assert_eq!(-c.m / c.n, dh);
    }
}

#[test]
fn exact_and_float_charts_agree() {
    let e = equilibria::exact_chart(&scenario::vi_basic::<Exact>(), &Transition::catalog("cubic").unwrap()).unwrap();
    let f = equilibria::closed_chart_real(&scenario::vi_basic::<f64>(), &phi("cubic")).unwrap();
    assert_eq!(e.delta_h, Exact::new(11, 9));
    assert_eq!(e.d_coeff, Exact::new(27, 32));
    assert!((f.delta_h - 11.0 / 9.0).abs() < 1e-15 && (f.d_coeff - 27.0 / 32.0).abs() < 1e-15);
}

#[test]
fn single_precision_chart() {
    let c = equilibria::closed_chart_real(&scenario::bfield::<f32>(), &Transition::<f32>::catalog("septic").unwrap()).unwrap();
    assert!((c.delta_h + 19.0 / 15.0).abs() < 1e-5);
    assert!((c.d_coeff - 0.5625).abs() < 1e-6);
}

#[test]
fn hopf_curve_is_tangent_to_the_slope_line() {
    for (fam, p) in focus_cases() {
        let chart = equilibria::chart(&fam, &p).unwrap();
        let dh = chart.closed.delta_h;
        // the quintic families carry a large eps^3 term, so the ratio test stops at 3e-3
        let c: Vec<f64> = [1e-4, 3e-4, 1e-3, 3e-3]
            .iter()
            .map(|&e| (equilibria::hopf_alpha(&fam, &p, e, dh).unwrap() - dh * e) / (e * e))
            .collect();
        let (lo, hi) = c.iter().fold((f64::MAX, f64::MIN), |(a, b), &x| (a.min(x.abs()), b.max(x.abs())));
        assert!(hi <= 2.0 * lo, "{}: C(eps) = {c:?}", p.label());
        for &(e, a) in &chart.numeric_h {
            let r = Regularized64::new(fam.clone(), p.clone(), a, e).unwrap();
            let cp = equilibria::find_critical_point(&r).unwrap();
            assert!(cp.trace_scaled.abs() < 1e-8);
            assert!(cp.det_scaled > 0.0);
        }
    }
}

#[test]
fn determinant_sign_at_alpha_zero() {
    for (fam, p) in focus_cases() {
        let det_x = fam.oriented().0.origin_jet().det_x();
        for eps in [1e-4, 1e-3, 1e-2] {
            let r = Regularized64::new(fam.clone(), p.clone(), 0.0, eps).unwrap();
            let cp = equilibria::find_critical_point(&r).unwrap();
            assert_eq!(cp.det_scaled.signum(), -det_x.signum());
        }
    }
}

#[test]
fn critical_point_solves_the_field() {
    for (fam, p) in focus_cases() {
        for alpha in [-0.02, 0.0, 0.015] {
            let r = Regularized64::new(fam.clone(), p.clone(), alpha, 0.005).unwrap();
            let cp = equilibria::find_critical_point(&r).unwrap();
            let (a, b) = r.f(cp.x, cp.v);
            assert!(a.abs() < 1e-10 && b.abs() < 1e-10, "{alpha}: residual ({a}, {b})");
            // scaled jacobian from a direct difference of the fast field
            let h = 1e-7;
            let fx = |x: f64, v: f64| r.fast(x, v);
            let j = [
                [(fx(cp.x + h, cp.v)[0] - fx(cp.x - h, cp.v)[0]) / (2.0 * h), (fx(cp.x, cp.v + h)[0] - fx(cp.x, cp.v - h)[0]) / (2.0 * h)],
                [(fx(cp.x + h, cp.v)[1] - fx(cp.x - h, cp.v)[1]) / (2.0 * h), (fx(cp.x, cp.v + h)[1] - fx(cp.x, cp.v - h)[1]) / (2.0 * h)],
            ];
            // the fast field is (eps F1, F2) in (x, v); in (x, y) the Jacobian of Z has det F / eps
            let det = (j[0][0] * j[1][1] - j[0][1] * j[1][0]) / 0.005;
            let tr = j[0][0] + j[1][1];
            assert!((tr - cp.trace_scaled).abs() < 1e-6);
            assert!((det - cp.det_scaled).abs() < 1e-6 * cp.det_scaled.abs().max(1.0), "{det} vs {}", cp.det_scaled);
        }
    }
}

#[test]
fn kinds_along_the_invisible_unfolding() {
    let fam = scenario::ii_basic::<f64>();
    let p = phi("cubic");
    let kind = |a: f64| equilibria::classify_region(&Regularized64::new(fam.clone(), p.clone(), a, 0.006).unwrap()).unwrap();
    assert_eq!(kind(-0.3), PointKind::StableNode);
    assert_eq!(kind(0.006), PointKind::StableFocus);
    assert_eq!(kind(0.01), PointKind::UnstableFocus);
    assert_eq!(kind(0.4), PointKind::UnstableNode);
}

#[test]
fn degenerate_curve_satisfies_eps_equals_d_alpha_squared() {
    let c = equilibria::closed_chart_real(&scenario::ii_basic::<f64>(), &phi("cubic")).unwrap();
    let (lo, hi) = equilibria::d_curve(&c, 0.004).unwrap();
    assert!((c.d_coeff * hi * hi - 0.004).abs() < 1e-15 && (lo + hi).abs() < 1e-15);
}

#[test]
fn focus_without_alpha_dependence_is_not_versal() {
    let fam = scenario::ex1::<f64>(0.5);
    assert!(equilibria::closed_chart_real(&fam, &phi("cubic")).is_err());
    let r = Regularized64::new(fam, phi("cubic"), 0.0, 1e-3).unwrap();
    let cp = equilibria::find_critical_point(&r).unwrap();
    assert!((cp.det_scaled - 9.0).abs() < 1e-9 && (cp.trace_scaled / 1e-3 - 0.5).abs() < 1e-9);
}
