use foldreg::equilibria;
use foldreg::melnikov::{Criticality, FoldClass, Profile};
use foldreg::scenario;
use foldreg::{Family64, Transition, Transition64};
use proptest::prelude::*;

fn cases() -> Vec<(&'static str, Family64, Transition64, Criticality)> {
    let p = |l| Transition::catalog(l).unwrap();
    vec![
        ("ii+cubic", scenario::ii_basic(), p("cubic"), Criticality::Supercritical),
        ("ii+quintic", scenario::ii_basic(), p("quintic"), Criticality::Subcritical),
        ("vi+quintic", scenario::vi_basic(), p("quintic"), Criticality::Supercritical),
        ("vi+cubic", scenario::vi_basic(), p("cubic"), Criticality::Subcritical),
        ("bf+septic", scenario::bfield(), p("septic"), Criticality::Supercritical),
        ("bf+cubic", scenario::bfield(), p("cubic"), Criticality::Supercritical),
    ]
}

fn profile(fam: &Family64, p: &Transition64) -> (Profile<f64>, f64) {
    (Profile::new(fam, p).unwrap(), equilibria::closed_chart_real(fam, p).unwrap().delta_h)
}

#[test]
fn vanishes_at_the_critical_level() {
    for (name, fam, p, _) in cases() {
        let (pr, dh) = profile(&fam, &p);
        for d in [dh - 1.0, dh, dh + 2.0] {
            assert_eq!(pr.melnikov(pr.vstar, d).unwrap(), 0.0, "{name}");
        }
        assert!(pr.kernel_at_vstar(dh).abs() < 1e-12, "{name}");
        assert!(pr.dmelnikov_at_vstar(dh).abs() < 1e-12, "{name}");
    }
}

#[test]
fn slope_at_the_critical_level_matches_extrapolated_difference() {
    for (name, fam, p, _) in cases() {
        let (pr, dh) = profile(&fam, &p);
        let d = dh + 0.3;
        let h = 1e-4;
        let m = |h: f64| pr.melnikov(pr.vstar + h, d).unwrap() / h;
        let num = 2.0 * m(h) - m(2.0 * h);
        let ana = pr.dmelnikov_at_vstar(d);
        assert!((num - ana).abs() < 1e-4 * ana.abs().max(1.0), "{name}: {num} vs {ana}");
    }
}

#[test]
fn cross_derivative_sign_by_fold_class() {
    for (name, fam, p, _) in cases() {
        let (pr, _) = profile(&fam, &p);
        let c = pr.cross_derivative_at_vstar().unwrap();
        // the analytic slope is affine in delta, so its delta-increment is the cross derivative
        let ana = pr.dmelnikov_at_vstar(1.0) - pr.dmelnikov_at_vstar(0.0);
        assert!((c - ana).abs() < 1e-4 * ana.abs(), "{name}: {c} vs {ana}");
        let want = match pr.class {
            FoldClass::InvisibleInvisible => 1.0,
            FoldClass::VisibleInvisible => -1.0,
        };
        assert_eq!(c.signum(), want, "{name}");
    }
}

#[test]
fn criticality_of_each_example() {
    for (name, fam, p, want) in cases() {
        let (pr, dh) = profile(&fam, &p);
        assert_eq!(pr.hopf_criticality(dh).unwrap(), want, "{name}");
    }
}

#[test]
fn domain_of_the_profile() {
    let (pr, _) = profile(&scenario::vi_basic(), &Transition::catalog("cubic").unwrap());
    let vbar = pr.vbar.unwrap();
    assert!(pr.domain_top < vbar && pr.domain_top > pr.vstar);
    assert!(pr.melnikov(pr.domain_top + 0.05, 1.0).is_err());
    let (ii, _) = profile(&scenario::ii_basic(), &Transition::catalog("cubic").unwrap());
    assert_eq!(ii.vbar, None);
    assert!((ii.domain_top - 0.999).abs() < 1e-12);
}

#[test]
fn frozen_profile_values() {
    let (pr, dh) = profile(&scenario::ii_basic(), &Transition::catalog("cubic").unwrap());
    let v = pr.vstar + 0.3 * (pr.domain_top - pr.vstar);
    assert!((pr.melnikov(v, dh + 0.5).unwrap() - 0.270_196_368_497_372_5).abs() < 1e-8);
    let (pr, dh) = profile(&scenario::bfield(), &Transition::catalog("septic").unwrap());
    let v = pr.vstar + 0.3 * (pr.domain_top - pr.vstar);
    assert!((pr.melnikov(v, dh + 0.5).unwrap() + 0.336_166_786_727_622_6).abs() < 1e-8);
}

#[test]
fn supercritical_cycle_appears_above_the_hopf_slope() {
    let (pr, dh) = profile(&scenario::ii_basic(), &Transition::catalog("cubic").unwrap());
    let z = pr.cycle_zeros(dh + 0.3).unwrap();
    assert_eq!(z.len(), 1);
    assert_eq!(z[0].1, -1);
    assert!(pr.melnikov(z[0].0, dh + 0.3).unwrap().abs() < 1e-9);
    assert!(pr.cycle_zeros(dh - 0.3).unwrap().is_empty());
    assert!(pr.saddle_node().is_err());
    assert!(pr.concavity_certificate(dh + 0.3).unwrap() < 0.0);
}

#[test]
fn subcritical_saddle_node_of_the_quintic_profile() {
    let (pr, dh) = profile(&scenario::ii_basic(), &Transition::catalog("quintic").unwrap());
    let (vs, ds) = pr.saddle_node().unwrap();
    assert!((ds - 1.970_17).abs() < 1e-4, "{ds}");
    assert!(ds < dh);
    assert!(pr.melnikov(vs, ds).unwrap().abs() < 1e-9);
    // two cycles just above delta_S, none below it
    let d_top = pr.delta_of_v(pr.domain_top).unwrap();
    let d = ds + 0.25 * (d_top.min(dh) - ds);
    let z = pr.cycle_zeros(d).unwrap();
    assert_eq!(z.len(), 2, "delta {d}: {z:?}");
    assert_eq!((z[0].1, z[1].1), (1, -1));
    assert!(pr.cycle_zeros(ds - 0.2).unwrap().is_empty());
}

#[test]
fn single_precision_profile() {
    let fam = scenario::ii_basic::<f32>();
    let p = Transition::<f32>::catalog("cubic").unwrap();
    let pr = Profile::new(&fam, &p).unwrap();
    let m = pr.melnikov(0.3, 4.0 / 3.0 + 0.5).unwrap();
    let (pr64, dh) = profile(&scenario::ii_basic(), &Transition::catalog("cubic").unwrap());
    assert!((m as f64 - pr64.melnikov(0.3, dh + 0.5).unwrap()).abs() < 1e-4);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn affine_in_delta(k in 0usize..6, d1 in -3.0f64..3.0, step in 0.2f64..2.0) {
        let (_, fam, p, _) = cases().swap_remove(k);
        let (pr, _) = profile(&fam, &p);
        let (d2, d3) = (d1 + step, d1 + 2.5 * step);
        for i in 1..=20 {
            let v = pr.vstar + (pr.domain_top - pr.vstar) * i as f64 / 21.0;
            let (a, b, c) = (pr.melnikov(v, d1).unwrap(), pr.melnikov(v, d2).unwrap(), pr.melnikov(v, d3).unwrap());
            let interp = a + (c - a) * (d2 - d1) / (d3 - d1);
            prop_assert!((b - interp).abs() <= 1e-10, "v = {}: {} vs {}", v, b, interp);
        }
    }
}
