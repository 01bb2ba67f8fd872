//! Critical manifolds of the slow-fast system and the fold-fold limit geometry.

use crate::error::{Error, Result};
use crate::fields::{Family, Partial};
use crate::filippov::{self, Filippov, Visibility};
use crate::regularize::{Regularized, Transition};
use crate::scalar::Real;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Stability {
    Attracting,
    Repelling,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Ordering {
    #[serde(rename = "vbar<vstar")]
    VbarBelow,
    #[serde(rename = "vstar<vbar")]
    VstarBelow,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FoldLimitGeometry<T> {
    pub vbar: T,
    pub vstar: T,
    pub m0_slope_at_0: T,
    pub ordering: Ordering,
    /// C in phi(v*) - phi(vbar) = C (det Z)_x(0)
    pub c_relation: T,
}

fn second_components<T: Real>(reg: &Regularized<T>, x: T) -> (T, T) {
    let z = T::zero();
    (reg.x_field().partial(Partial::C2, &x, &z), reg.y_field().partial(Partial::C2, &x, &z))
}

/// Right-hand side of phi(m0) = (X^2 + Y^2)/(Y^2 - X^2) at (x, 0).
pub fn m0_rhs<T: Real>(reg: &Regularized<T>, x: T) -> T {
    let (a, b) = second_components(reg, x);
    (a + b) / (b - a)
}

/// Monotone bisection, 40 halvings.
fn phi_solve<T: Real>(phi: &Transition<T>, y: T) -> T {
    let (mut lo, mut hi) = (-T::one(), T::one());
    for _ in 0..40 {
        let m = T::lit(0.5) * (lo + hi);
        if phi.value(&m) < y {
            lo = m;
        } else {
            hi = m;
        }
    }
    T::lit(0.5) * (lo + hi)
}

/// m0^alpha(x): the v-coordinate of the critical manifold over x.
pub fn m0_alpha_eval<T: Real>(reg: &Regularized<T>, x: T) -> Result<T> {
    let r = m0_rhs(reg, x);
    if !(r.abs() <= T::one()) {
        return Err(Error::Domain(format!("x = {x} is in the crossing region (rhs = {r})")));
    }
    if r == T::zero() {
        return Ok(T::zero());
    }
    if r.abs() == T::one() {
        return Ok(r);
    }
    Ok(phi_solve(&reg.phi, r))
}

/// Sign of F^2_v = phi'(m0)(X^2 - Y^2); negative is attracting in fast time.
pub fn stability<T: Real>(reg: &Regularized<T>, x: T) -> Result<Stability> {
    let v = m0_alpha_eval(reg, x)?;
    let (a, b) = second_components(reg, x);
    let s = reg.phi.d1(&v) * (a - b);
    if s < T::zero() {
        Ok(Stability::Attracting)
    } else if s > T::zero() {
        Ok(Stability::Repelling)
    } else {
        Err(Error::Degenerate(format!("normal hyperbolicity is lost at x = {x}")))
    }
}

/// F^1(x, m0(x); alpha, 0), which equals twice the sliding field.
pub fn induced_speed<T: Real>(reg: &Regularized<T>, x: T) -> Result<T> {
    let v = m0_alpha_eval(reg, x)?;
    let z = T::zero();
    let a = reg.x_field().partial(Partial::C1, &x, &z);
    let b = reg.y_field().partial(Partial::C1, &x, &z);
    let p = reg.phi.value(&v);
    Ok(a + b + p * (a - b))
}

/// Twice the Filippov sliding value, for the cross-module identity.
pub fn induced_speed_reference<T: Real>(reg: &Regularized<T>, x: T) -> Result<T> {
    let f = Filippov::new(reg.x_field(), reg.y_field());
    Ok(T::lit(2.0) * f.sliding_value(x)?)
}

/// Samples (x, m0, stability) on the sliding/escaping part of [lo, hi].
pub fn sample_manifold<T: Real>(reg: &Regularized<T>, lo: T, hi: T, n: usize) -> Vec<(T, T, Stability)> {
    (0..n)
        .filter_map(|i| {
            let x = lo + (hi - lo) * T::from_usize(i).unwrap() / T::from_usize(n.max(2) - 1).unwrap();
            let v = m0_alpha_eval(reg, x).ok()?;
            let s = stability(reg, x).ok()?;
            Some((x, v, s))
        })
        .collect()
}

/// Slope of m0 at 0 from the jets: differentiate phi(m0) (Y^2 - X^2) = X^2 + Y^2.
fn m0_slope<T: Real>(family: &Family<T>, phi: &Transition<T>, v: T) -> T {
    let j = family.origin_jet();
    let (xx, yx) = (j.x.c2_x, j.y.c2_x);
    let (xxx, yxx) = (j.x.c2_xx, j.y.c2_xx);
    // first x-derivatives vanish at the fold, so expand to second order: phi(m0) = (X2x+Y2x)/(Y2x-X2x) + c x
    let num = (xxx + yxx) * (yx - xx) - (xx + yx) * (yxx - xxx);
    let rhs_slope = num / (T::lit(2.0) * (yx - xx) * (yx - xx));
    rhs_slope / phi.d1(&v)
}

pub fn fold_limit_geometry<T: Real>(family: &Family<T>, phi: &Transition<T>) -> Result<FoldLimitGeometry<T>> {
    let diag = filippov::diagnose(family)?;
    let vi = matches!(
        (diag.vis_x, diag.vis_y),
        (Visibility::Visible, Visibility::Invisible) | (Visibility::Invisible, Visibility::Visible)
    );
    if !vi {
        return Err(Error::Domain("fold-limit geometry needs a visible-invisible fold-fold".into()));
    }
    let (fam, _) = family.oriented();
    let j = fam.origin_jet();
    let vbar = phi.inverse((j.x.c2_x + j.y.c2_x) / (j.y.c2_x - j.x.c2_x))?;
    let vstar = phi.inverse(-(j.x.c1 + j.y.c1) / (j.x.c1 - j.y.c1))?;
    let c_relation = T::lit(2.0) / ((j.x.c1 - j.y.c1) * (j.x.c2_x - j.y.c2_x));
    let ordering = if vbar < vstar { Ordering::VbarBelow } else { Ordering::VstarBelow };
    Ok(FoldLimitGeometry { vbar, vstar, m0_slope_at_0: m0_slope(&fam, phi, vbar), ordering, c_relation })
}

/// First-order correction m1(x) of the slow manifold at alpha = delta eps.
pub fn m1_correction<T: Real>(reg0: &Regularized<T>, x: T, delta: T) -> Result<T> {
    let h = T::lit(1e-6);
    let v = m0_alpha_eval(reg0, x)?;
    let dm0 = (m0_alpha_eval(reg0, x + h)? - m0_alpha_eval(reg0, x - h)?) / (T::lit(2.0) * h);
    let z = T::zero();
    let a1 = reg0.x_field().partial(Partial::C1, &x, &z);
    let b1 = reg0.y_field().partial(Partial::C1, &x, &z);
    let p = reg0.phi.value(&v);
    let f1 = a1 + b1 + p * (a1 - b1);
    let (a2, b2) = second_components(reg0, x);
    let f2v = reg0.phi.d1(&v) * (a2 - b2);
    let (f2e, f2a) = reg0.f2_eps_alpha(x, v);
    Ok((dm0 * f1 - f2e - delta * f2a) / f2v)
}
