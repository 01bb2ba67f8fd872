use foldreg::ode::{Dopri, Event};
use foldreg::slowfast::{self, Ordering, Stability};
use foldreg::{scenario, PlanarField};
use foldreg::{Family64, Regularized64, Transition64};

fn cases() -> Vec<(Family64, &'static str)> {
    vec![(scenario::vi_basic(), "cubic"), (scenario::vi_basic(), "quintic"), (scenario::bfield(), "septic"), (scenario::bfield(), "cubic")]
}

fn reg(fam: &Family64, l: &str, alpha: f64, eps: f64) -> Regularized64 {
    Regularized64::new(fam.oriented().0, Transition64::catalog(l).unwrap(), alpha, eps).unwrap()
}

fn seconds(r: &Regularized64, x: f64) -> (f64, f64) {
    (r.x_field().eval(x, 0.0).1, r.y_field().eval(x, 0.0).1)
}

#[test]
fn defining_relation_residual() {
    for (fam, l) in cases() {
        for alpha in [0.0, 0.01] {
            let r = reg(&fam, l, alpha, 1.0);
            let samples = slowfast::sample_manifold(&r, -0.5, 0.5, 200);
            assert!(samples.len() > 150, "{l}: only {} samples", samples.len());
            for (x, v, _) in samples {
                let (a, b) = seconds(&r, x);
                let res = a + b + r.phi.value(&v) * (a - b);
                assert!(res.abs() <= 1e-10, "{l} x = {x}: {res}");
            }
        }
    }
}

#[test]
fn slope_sign_formula() {
    for (fam, l) in cases() {
        let r = reg(&fam, l, 0.005, 1.0);
        for i in 1..40 {
            let x = -0.4 + 0.8 * i as f64 / 40.0;
            let h = 1e-6;
            let (Ok(a), Ok(b)) = (slowfast::m0_alpha_eval(&r, x - h), slowfast::m0_alpha_eval(&r, x + h)) else { continue };
            let fd = (b - a) / (2.0 * h);
            let (p, q) = seconds(&r, x);
            let dp = (seconds(&r, x + h).0 - seconds(&r, x - h).0) / (2.0 * h);
            let dq = (seconds(&r, x + h).1 - seconds(&r, x - h).1) / (2.0 * h);
            let s = dp * q - dq * p;
            if fd.abs() > 1e-6 && s.abs() > 1e-9 {
                assert_eq!(fd.signum(), s.signum(), "{l} x = {x}");
            }
        }
    }
}

#[test]
fn induced_speed_is_twice_the_sliding_field() {
    for (fam, l) in cases() {
        let r = reg(&fam, l, 0.0, 1.0);
        for x in [-0.3, -0.1, -0.01, 0.02, 0.2] {
            let a = slowfast::induced_speed(&r, x).unwrap();
            let b = slowfast::induced_speed_reference(&r, x).unwrap();
            assert!((a - b).abs() < 1e-9 * b.abs().max(1.0), "{l} x = {x}: {a} vs {b}");
        }
    }
}

#[test]
fn sliding_side_attracts() {
    let r = reg(&scenario::vi_basic(), "cubic", 0.0, 1.0);
    assert_eq!(slowfast::stability(&r, -0.2).unwrap(), Stability::Attracting);
    assert_eq!(slowfast::stability(&r, 0.2).unwrap(), Stability::Repelling);
    // crossing region of the invisible family has no critical manifold
    let ii = reg(&scenario::ii_basic(), "cubic", 0.0, 1.0);
    assert!(slowfast::m0_alpha_eval(&ii, 0.2).is_err());
}

#[test]
fn fold_limit_geometry_of_the_visible_family() {
    let fam = scenario::vi_basic::<f64>();
    let p = Transition64::catalog("cubic").unwrap();
    let g = slowfast::fold_limit_geometry(&fam, &p).unwrap();
    // phi(vbar) = (X2x + Y2x)/(Y2x - X2x) = 1/2 at the origin
    assert!((p.value(&g.vbar) - 0.5).abs() < 1e-12);
    assert!((g.vbar - 0.347_296_355_333_860_7).abs() < 1e-12);
    assert_eq!(g.vstar, 0.0);
    assert_eq!(g.ordering, Ordering::VstarBelow);
    let det_x = fam.origin_jet().det_x();
    assert!((p.value(&g.vstar) - p.value(&g.vbar) - g.c_relation * det_x).abs() < 1e-12);
    let r = reg(&fam, "cubic", 0.0, 1.0);
    let h = 1e-5;
    let fd = (slowfast::m0_alpha_eval(&r, h).unwrap() - slowfast::m0_alpha_eval(&r, -h).unwrap()) / (2.0 * h);
    assert!((fd - g.m0_slope_at_0).abs() < 1e-5, "{fd} vs {}", g.m0_slope_at_0);
    assert!(slowfast::fold_limit_geometry(&scenario::ii_basic::<f64>(), &p).is_err());
}

#[test]
fn first_order_manifold_correction_balances_the_orbit_equation() {
    let fam = scenario::vi_basic::<f64>();
    let r0 = reg(&fam, "cubic", 0.0, 1.0);
    let delta = 1.2;
    for x in [-0.3, 0.3] {
        let m0 = slowfast::m0_alpha_eval(&r0, x).unwrap();
        let m1 = slowfast::m1_correction(&r0, x, delta).unwrap();
        let h = 1e-6;
        let dm0 = (slowfast::m0_alpha_eval(&r0, x + h).unwrap() - slowfast::m0_alpha_eval(&r0, x - h).unwrap()) / (2.0 * h);
        // invariance residual eps F1 m' - F2 along v = m0 + eps m1 is O(eps^2)
        let res = |eps: f64| {
            let r = reg(&fam, "cubic", delta * eps, eps);
            let v = m0 + eps * m1;
            let (f1, f2) = r.f(x, v);
            eps * f1 * dm0 - f2
        };
        let (a, b) = (res(1e-3), res(5e-4));
        assert!((a / b - 4.0).abs() < 0.5, "x = {x}: ratio {}", a / b);
    }
}

#[test]
fn fenichel_band_is_kept_until_the_inner_zone() {
    let fam = scenario::vi_basic::<f64>();
    let big_m = 20.0;
    for eps in [1e-3, 1e-4] {
        let r = reg(&fam, "cubic", 0.0, eps);
        let r0 = reg(&fam, "cubic", 0.0, 1.0);
        let x0 = -0.3;
        let stop = -eps.powf(0.45);
        for sgn in [-1.0, 1.0] {
            let m = slowfast::m0_alpha_eval(&r0, x0).unwrap();
            let start = (x0, m + sgn * big_m * eps / x0.abs());
            let ev = [Event::new(move |_t: f64, y: &[f64; 2]| y[0] - stop, 1, true)];
            let sol = Dopri::default()
                .recording()
                .solve(|_t, y: &[f64; 2]| r.fast(y[0], y[1]), 0.0, [start.0, start.1], 10.0 / eps, &ev, |y| y[1].abs() > 1e3)
                .unwrap();
            let reached = sol.terminated.is_some();
            for (_, y) in &sol.samples {
                let (x, v) = (y[0], y[1]);
                let m = slowfast::m0_alpha_eval(&r0, x).unwrap();
                assert!((v - m).abs() <= 2.0 * big_m * eps / x.abs(), "eps {eps}: left the band at x = {x}");
            }
            assert!(reached, "eps {eps}: never reached x = {stop}");
        }
    }
}
