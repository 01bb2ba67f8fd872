//! Maximal Canard: closed-form slope delta_C, inner solutions, numeric shooting and the
//! linear-regularization reduction.

use crate::equilibria;
use crate::error::{Error, Result};
use crate::fields::{Family, OriginJet};
use crate::filippov::{self, Visibility};
use crate::ode::{Dopri, Event};
use crate::regularize::{Regularized, Transition};
use crate::roots;
use crate::scalar::Real;
use crate::slowfast::{self, Stability};
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct CanardReport<T> {
    pub vbar: T,
    #[serde(rename = "M")]
    pub m: [T; 5],
    #[serde(rename = "N")]
    pub n: [T; 5],
    pub delta_c: T,
    /// m0'(0) = -M3/M4
    pub m0_slope: T,
    /// d(gap)/d(delta) of the inner solutions at r = 0
    pub gap_slope_c: T,
    pub numeric_delta_c: Vec<(T, T)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Minus,
    Plus,
}

fn require_vi_focus<T: Real>(family: &Family<T>) -> Result<(Family<T>, OriginJet<T>)> {
    let diag = filippov::diagnose(family)?;
    let vi = matches!(
        (diag.vis_x, diag.vis_y),
        (Visibility::Visible, Visibility::Invisible) | (Visibility::Invisible, Visibility::Visible)
    );
    if !vi {
        return Err(Error::Domain("the Canard analysis needs a visible-invisible fold-fold".into()));
    }
    let (fam, _) = family.oriented();
    let j = fam.origin_jet();
    if j.det_x() >= T::zero() {
        return Err(Error::Domain("the Canard analysis needs (det Z)_x(0) < 0".into()));
    }
    Ok((fam, j))
}

pub fn canard_constants<T: Real>(family: &Family<T>, phi: &Transition<T>) -> Result<CanardReport<T>> {
    let (_, j) = require_vi_focus(family)?;
    let (x, y) = (&j.x, &j.y);
    let vbar = phi.inverse((x.c2_x + y.c2_x) / (y.c2_x - x.c2_x))?;
    let p = phi.value(&vbar);
    let mix = |a: T, b: T| a + b + p * (a - b);
    let m0 = mix(x.c1, y.c1);
    let m1 = vbar * mix(x.c2_y, y.c2_y);
    let m2 = mix(x.c2_a, y.c2_a);
    let m3 = T::lit(0.5) * mix(x.c2_xx, y.c2_xx);
    let m4 = phi.d1(&vbar) * (x.c2_x - y.c2_x);
    if m2 * m4 == T::zero() {
        return Err(Error::NotVersal("M2 M4 = 0".into()));
    }
    let m = [m0, m1, m2, m3, m4];
    let n = m.map(|mi| mi / m0);
    let delta_c = -(m0 * m3 + m1 * m4) / (m2 * m4);
    let gap_slope_c = (T::lit(2.0) * T::PI() / n[4]).sqrt() * n[2];
    Ok(CanardReport { vbar, m, n, delta_c, m0_slope: -m3 / m4, gap_slope_c, numeric_delta_c: Vec::new() })
}

/// Scaled complementary error function exp(z^2) erfc(z).
pub fn erfcx(z: f64) -> f64 {
    if z > 26.0 {
        let z2 = z * z;
        (1.0 - 0.5 / z2 + 0.75 / (z2 * z2) - 1.875 / (z2 * z2 * z2)) / (z * std::f64::consts::PI.sqrt())
    } else {
        (z * z).exp() * statrs::function::erf::erfc(z)
    }
}

/// Bracket N1 + N2 delta + N3/N4 of the inner equation.
pub fn inner_bracket<T: Real>(report: &CanardReport<T>, delta: T) -> T {
    let n = &report.n;
    n[1] + n[2] * delta + n[3] / n[4]
}

/// s0^-(r) (decays as r -> -inf) and s0^+(r) (decays as r -> +inf).
pub fn inner_solution<T: Real>(report: &CanardReport<T>, branch: Branch, delta: T, r: T) -> Result<T> {
    let n4 = report.n[4];
    if n4 <= T::zero() {
        return Err(Error::Domain(format!("N4 = {n4} must be positive")));
    }
    let b = inner_bracket(report, delta);
    let scale = (T::PI() / (T::lit(2.0) * n4)).sqrt();
    let k = (n4 / T::lit(2.0)).sqrt();
    let tail = match branch {
        Branch::Minus => b * scale * T::lit(erfcx((-r * k).f64())),
        Branch::Plus => -b * scale * T::lit(erfcx((r * k).f64())),
    };
    Ok(report.m0_slope * r + tail)
}

/// Fenichel manifolds at x = 0 for alpha = delta eps.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ManifoldTrace<T> {
    pub v_attracting: T,
    pub v_repelling: T,
}

impl<T: Real> ManifoldTrace<T> {
    pub fn gap(&self) -> T {
        self.v_attracting - self.v_repelling
    }
}

pub const EXTENSION_X0: f64 = 0.3;

fn extend<T: Real>(reg: &Regularized<T>, x0: T, v0: T, forward: bool) -> Result<T> {
    let eps = reg.eps;
    let f = |_t: T, y: &[T; 2]| reg.fast(y[0], y[1]);
    let hit = [Event::new(|_t: T, y: &[T; 2]| y[0], 0, true)];
    let t_end = T::lit(50.0) / eps * if forward { T::one() } else { -T::one() };
    let sol = Dopri::default()
        .with_tol(1e-12, 1e-13)
        .solve(f, T::zero(), [x0, v0], t_end, &hit, |y| y[1].abs() > T::lit(10.0))
        .map_err(|e| match e {
            Error::Escape { x, v, .. } => Error::Extension { x, msg: format!("manifold left the band region (v = {v})") },
            other => other,
        })?;
    if sol.terminated.is_none() {
        return Err(Error::Extension { x: sol.y[0].f64(), msg: "did not reach x = 0".into() });
    }
    Ok(sol.y[1])
}

/// Extend both Fenichel manifolds to the section x = 0.
pub fn trace_manifolds<T: Real>(family: &Family<T>, phi: &Transition<T>, eps: T, delta: T) -> Result<ManifoldTrace<T>> {
    let (fam, _) = family.oriented();
    let reg0 = Regularized::new(fam.clone(), phi.clone(), T::zero(), eps)?;
    let reg = reg0.with_params(delta * eps, eps)?;
    let x0 = T::lit(EXTENSION_X0);
    let mut out = (None, None);
    for side in [-x0, x0] {
        let st = slowfast::stability(&reg0, side)?;
        let v = slowfast::m0_alpha_eval(&reg0, side)? + eps * slowfast::m1_correction(&reg0, side, delta)?;
        let forward = st == Stability::Attracting;
        // the integration has to move towards x = 0
        let dx = reg.fast(side, v)[0] * if forward { T::one() } else { -T::one() };
        if dx * side >= T::zero() {
            return Err(Error::Extension { x: side.f64(), msg: "the slow flow does not point towards the fold".into() });
        }
        let v0 = extend(&reg, side, v, forward)?;
        if forward {
            out.0 = Some(v0);
        } else {
            out.1 = Some(v0);
        }
    }
    match out {
        (Some(a), Some(r)) => Ok(ManifoldTrace { v_attracting: a, v_repelling: r }),
        _ => Err(Error::Domain("both sides of the critical manifold have the same stability".into())),
    }
}

/// delta_C(eps) by a secant iteration on the gap at x = 0.
pub fn numeric_canard<T: Real>(family: &Family<T>, phi: &Transition<T>, eps: T) -> Result<T> {
    let report = canard_constants(family, phi)?;
    let h = T::lit(0.5);
    roots::secant(
        |d| trace_manifolds(family, phi, eps, d).map(|t| t.gap()),
        report.delta_c - h,
        report.delta_c + h,
        T::tol(1e-10),
        T::tol(1e-12),
        60,
    )
}

/// Constants of the linear-regularization reduction to the Krupa-Szmolyan normal form.
#[derive(Clone, Debug, Serialize)]
pub struct LinearCanardCoefficients<T> {
    #[serde(rename = "A")]
    pub a: [T; 10],
    /// gamma_1..gamma_5, with gamma_5 (and so gamma_4) taken at delta_H
    pub gamma: [T; 5],
    pub kappa_h: T,
    pub kappa_c: T,
    pub a_ks: T,
    pub abar: T,
    pub delta_h: T,
    pub delta_c: T,
    /// delta_H from the reduction minus -M(Z)/N(Z, Zt)
    pub delta_h_mismatch: T,
}

pub fn linear_ks_reduction<T: Real>(family: &Family<T>) -> Result<LinearCanardCoefficients<T>> {
    let (_, j) = require_vi_focus(family)?;
    let (x, y) = (&j.x, &j.y);
    let vs = -(x.c1 + y.c1) / (x.c1 - y.c1);
    let d1 = x.c1 - y.c1;
    let two = T::lit(2.0);
    let half = T::lit(0.5);
    let a1 = (x.c1_x + y.c1_x) + vs * (x.c1_x - y.c1_x);
    let a2 = (x.c1_x + y.c1_x) / d1;
    let a3 = two * j.det_x();
    let a4 = two * j.det_y() * vs;
    let a5 = two * (y.c2_a * x.c1 - x.c2_a * y.c1);
    let a6 = x.c2_x - y.c2_x;
    let a7 = two * j.det_y() / d1 + (x.c2_y - y.c2_y) * vs;
    let a8 = x.c2_a - y.c2_a;
    let a9 = half * d1 * ((x.c2_xx + y.c2_xx) + vs * (x.c2_xx - y.c2_xx));
    let a10 = half * (x.c2_xx - y.c2_xx);
    let s = (-a3).sqrt();
    let delta_h = (a1 + a7 - a4 * a6 / a3) / (a5 * a6 / a3 - a8);
    let g1 = a1 / s;
    let g2 = two * a2 * s / a6;
    let g5 = (a7 + a8 * delta_h) / s;
    let g4 = -two * a9 / (a6 * s) - g5 + two * g1;
    let g3 = (T::lit(4.0) * a10 * s / (a6 * a6) + g2) / T::lit(3.0);
    let core = -a10 * a3 / (a6 * a6) + a9 / a6 - a1;
    let a_ks = T::lit(4.0) / s * core;
    let lin = Transition::from_odd("linear", &[T::one()]);
    let chart = equilibria::closed_chart(&j, &lin, vs)?;
    let abar = -core / chart.n;
    let delta_c = delta_h + abar;
    let g5c = (a7 + a8 * delta_c) / s;
    Ok(LinearCanardCoefficients {
        a: [a1, a2, a3, a4, a5, a6, a7, a8, a9, a10],
        gamma: [g1, g2, g3, g4, g5],
        kappa_h: -(g1 + g5) / two,
        kappa_c: -((g1 + g5c) / two + a_ks / T::lit(8.0)),
        a_ks,
        abar,
        delta_h,
        delta_c,
        delta_h_mismatch: delta_h - chart.delta_h,
    })
}
