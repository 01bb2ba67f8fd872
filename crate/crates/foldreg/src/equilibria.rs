//! Critical point P(alpha, eps) of the regularized system, the constants M(Z), N(Z, Zt)
//! and the curves D and H.

use crate::error::{Error, Result};
use crate::fields::{Family, OriginJet};
use crate::melnikov::{Criticality, Profile};
use crate::regularize::{Regularized, Transition};
use crate::roots;
use crate::scalar::{Coef, Real};
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PointKind {
    Saddle,
    StableNode,
    UnstableNode,
    StableFocus,
    UnstableFocus,
    Degenerate,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriticalPointReport<T> {
    pub x: T,
    pub v: T,
    /// eps * det of the Jacobian of Z^a_eps at P
    pub det_scaled: T,
    /// eps * trace
    pub trace_scaled: T,
    pub kind: PointKind,
}

/// Closed-form leading coefficients at the origin; valid over any coefficient type.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClosedChart<T> {
    pub vstar: T,
    pub xstar: T,
    pub xbar: T,
    pub det_x: T,
    pub det_y: T,
    pub phi_vstar: T,
    pub dphi_vstar: T,
    #[serde(rename = "M_of_Z")]
    pub m: T,
    #[serde(rename = "N_of_ZZt")]
    pub n: T,
    #[serde(rename = "D_coeff")]
    pub d_coeff: T,
    pub delta_h: T,
}

/// phi(v*) = -(X^1 + Y^1)/(X^1 - Y^1) at the origin.
pub fn vstar_argument<T: Coef>(jet: &OriginJet<T>) -> T {
    -(jet.x.c1.clone() + jet.y.c1.clone()) / (jet.x.c1.clone() - jet.y.c1.clone())
}

/// Evaluate the chart given v*. The jet must come from an oriented family (X^1(0) > 0).
pub fn closed_chart<T: Coef>(jet: &OriginJet<T>, phi: &Transition<T>, vstar: T) -> Result<ClosedChart<T>> {
    let z = T::zero();
    if jet.x.c1.clone() * jet.y.c1.clone() >= z {
        return Err(Error::NoEquilibrium("X^1 Y^1(0) >= 0: the regularized system has no critical point".into()));
    }
    let det_x = jet.det_x();
    if det_x == z {
        return Err(Error::Degenerate("(det Z)_x(0) = 0".into()));
    }
    let det_y = jet.det_y();
    let (x, y) = (&jet.x, &jet.y);
    let pv = phi.value(&vstar);
    let dp = phi.d1(&vstar);
    let xstar = -det_y.clone() / det_x.clone() * vstar.clone();
    let xbar = (y.c1.clone() * x.c2_a.clone() - x.c1.clone() * y.c2_a.clone()) / det_x.clone();
    let (s1x, d1x) = jet.sd(|s| s.c1_x.clone());
    let (s2y, d2y) = jet.sd(|s| s.c2_y.clone());
    let (_, d2x) = jet.sd(|s| s.c2_x.clone());
    let m = s1x + pv.clone() * d1x + s2y + pv.clone() * d2y.clone()
        + dp.clone() * (d2x * xstar.clone() + d2y * vstar.clone());
    let n = dp.clone() * (x.c1.clone() - y.c1.clone()) * (y.c2_x.clone() * x.c2_a.clone() - x.c2_x.clone() * y.c2_a.clone())
        / det_x.clone();
    if n == z {
        return Err(Error::NotVersal("N(Z, Zt) = 0".into()));
    }
    let eight = T::from_u32(8).unwrap();
    let d_coeff = -(n.clone() * n.clone()) / (eight * dp.clone() * det_x.clone());
    let delta_h = -m.clone() / n.clone();
    Ok(ClosedChart { vstar, xstar, xbar, det_x, det_y, phi_vstar: pv, dphi_vstar: dp, m, n, d_coeff, delta_h })
}

/// Exact chart: requires phi(v*) = 0, which an odd phi resolves to v* = 0 without root finding.
pub fn exact_chart<T: Coef>(family: &Family<T>, phi: &Transition<T>) -> Result<ClosedChart<T>> {
    let (fam, _) = family.oriented();
    let jet = fam.origin_jet();
    let arg = vstar_argument(&jet);
    if arg != T::zero() {
        return Err(Error::Domain("an exact chart needs phi(v*) = 0 (X^1(0) = -Y^1(0))".into()));
    }
    if phi.value(&T::zero()) != T::zero() {
        return Err(Error::Domain("phi(0) != 0".into()));
    }
    closed_chart(&jet, phi, T::zero())
}

pub fn closed_chart_real<T: Real>(family: &Family<T>, phi: &Transition<T>) -> Result<ClosedChart<T>> {
    let (fam, _) = family.oriented();
    let jet = fam.origin_jet();
    let vstar = phi.inverse(vstar_argument(&jet))?;
    closed_chart(&jet, phi, vstar)
}

#[derive(Clone, Debug, Serialize)]
pub struct BifurcationChart<T> {
    #[serde(flatten)]
    pub closed: ClosedChart<T>,
    pub hopf_criticality: Option<Criticality>,
    #[serde(rename = "numeric_H")]
    pub numeric_h: Vec<(T, T)>,
}

pub const NUMERIC_H_EPS: [f64; 4] = [1e-3, 3e-3, 6e-3, 1e-2];

pub fn chart<T: Real>(family: &Family<T>, phi: &Transition<T>) -> Result<BifurcationChart<T>> {
    let closed = closed_chart_real(family, phi)?;
    let focus = closed.det_x < T::zero();
    let hopf_criticality = if focus {
        let prof = Profile::new(family, phi)?;
        match prof.hopf_criticality(closed.delta_h) {
            Ok(c) => Some(c),
            Err(Error::Indeterminate(_)) => None,
            Err(e) => return Err(e),
        }
    } else {
        None
    };
    let mut numeric_h = Vec::new();
    if focus {
        for e in NUMERIC_H_EPS {
            let eps = T::lit(e);
            numeric_h.push((eps, hopf_alpha(family, phi, eps, closed.delta_h)?));
        }
    }
    Ok(BifurcationChart { closed, hopf_criticality, numeric_h })
}

/// alpha_H(eps): zero of the trace at P(alpha, eps), seeded at delta_H eps.
pub fn hopf_alpha<T: Real>(family: &Family<T>, phi: &Transition<T>, eps: T, delta_h: T) -> Result<T> {
    let base = Regularized::new(family.clone(), phi.clone(), T::zero(), eps)?;
    let trace = |a: T| -> T {
        base.with_params(a, eps)
            .and_then(|r| find_critical_point(&r))
            .map(|p| p.trace_scaled)
            .unwrap_or(T::nan())
    };
    let a0 = delta_h * eps;
    let mut w = eps * T::lit(0.25) * (T::one() + delta_h.abs());
    for _ in 0..12 {
        let (lo, hi) = (a0 - w, a0 + w);
        let (fl, fh) = (trace(lo), trace(hi));
        if fl.is_finite() && fh.is_finite() && (fl > T::zero()) != (fh > T::zero()) {
            return roots::brent(trace, lo, hi, T::tol(1e-15));
        }
        w = w * T::lit(1.6);
    }
    Err(Error::Numerical(format!("could not bracket the Hopf value at eps = {eps}")))
}

fn kind_of<T: Real>(det_s: T, tr_s: T, eps: T) -> PointKind {
    if det_s == T::zero() {
        return PointKind::Degenerate;
    }
    if det_s < T::zero() {
        return PointKind::Saddle;
    }
    let disc = tr_s * tr_s - T::lit(4.0) * eps * det_s;
    if tr_s == T::zero() {
        return PointKind::Degenerate;
    }
    match (disc >= T::zero(), tr_s < T::zero()) {
        (true, true) => PointKind::StableNode,
        (true, false) => PointKind::UnstableNode,
        (false, true) => PointKind::StableFocus,
        (false, false) => PointKind::UnstableFocus,
    }
}

/// Scaled determinant and trace from the slow-chart Jacobian of F.
pub fn jacobian_scaled<T: Real>(reg: &Regularized<T>, x: T, v: T) -> (T, T) {
    let j = reg.f_jet(x, v).jac;
    (j[0][0] * j[1][1] - j[0][1] * j[1][0], reg.eps * j[0][0] + j[1][1])
}

pub fn find_critical_point<T: Real>(reg: &Regularized<T>) -> Result<CriticalPointReport<T>> {
    let jet = reg.family.origin_jet();
    if jet.x.c1 * jet.y.c1 >= T::zero() {
        return Err(Error::NoEquilibrium("X^1 Y^1(0) >= 0: the regularized system has no critical point".into()));
    }
    // the seed uses the unoriented jet directly; x-reflection does not move v*
    let seed = match closed_chart_for_seed(&jet, &reg.phi) {
        Some(c) => (c.xbar * reg.alpha + c.xstar * reg.eps, c.vstar),
        None => (T::zero(), T::zero()),
    };
    let newton = |x0: T, v0: T| {
        roots::newton2(
            |x, v| {
                let fj = reg.f_jet(x, v);
                (fj.f, fj.jac)
            },
            x0,
            v0,
            T::tol(1e-14),
            50,
        )
    };
    let inside = |v: T| v.abs() < T::one();
    let mut sol = newton(seed.0, seed.1).ok().filter(|s| inside(s.1));
    if sol.is_none() {
        for i in 0..=99 {
            let v0 = T::lit(-0.99 + 1.98 * i as f64 / 99.0);
            if let Ok(s) = newton(seed.0, v0) {
                if inside(s.1) {
                    sol = Some(s);
                    break;
                }
            }
        }
    }
    let (x, v) = sol.ok_or_else(|| Error::Numerical("Newton failed to locate P(alpha, eps)".into()))?;
    let (det_s, tr_s) = jacobian_scaled(reg, x, v);
    Ok(CriticalPointReport { x, v, det_scaled: det_s, trace_scaled: tr_s, kind: kind_of(det_s, tr_s, reg.eps) })
}

fn closed_chart_for_seed<T: Real>(jet: &OriginJet<T>, phi: &Transition<T>) -> Option<ClosedChart<T>> {
    let vstar = phi.inverse(vstar_argument(jet)).ok()?;
    let mut c = closed_chart(jet, phi, vstar).ok()?;
    if !c.xbar.is_finite() {
        c.xbar = T::zero();
    }
    Some(c)
}

/// Topological type of P(alpha, eps) from the actual critical point.
pub fn classify_region<T: Real>(reg: &Regularized<T>) -> Result<PointKind> {
    Ok(find_critical_point(reg)?.kind)
}

/// Leading-order D curve: eps = D_coeff alpha^2, i.e. alpha_D^{-,+}(eps) = -+ sqrt(eps / D_coeff).
pub fn d_curve<T: Real>(chart: &ClosedChart<T>, eps: T) -> Option<(T, T)> {
    if chart.d_coeff <= T::zero() {
        return None;
    }
    let w = (eps / chart.d_coeff).sqrt();
    Some((-w, w))
}
