//! Potential V, the Melnikov function M(v, delta) of the rescaled regularized system,
//! Hopf criticality and saddle-node of cycles.

use crate::error::{Error, Result};
use crate::fields::{Family, OriginJet};
use crate::filippov::{self, Visibility};
use crate::quad;
use crate::regularize::Transition;
use crate::roots;
use crate::scalar::Real;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Criticality {
    Supercritical,
    Subcritical,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FoldClass {
    InvisibleInvisible,
    VisibleInvisible,
}

/// Pair (q_X, q_Y) of a quantity at the origin; mixed with phi(v) as (qX + qY) + phi(v)(qX - qY).
#[derive(Clone, Copy, Debug)]
struct Mix<T> {
    s: T,
    d: T,
}

impl<T: Real> Mix<T> {
    fn new(a: T, b: T) -> Self {
        Mix { s: a + b, d: a - b }
    }
}

/// Melnikov data of a focus-type fold-fold (X^1 Y^1(0) < 0, (det Z)_x(0) < 0), oriented so X^1(0) > 0.
#[derive(Clone, Debug)]
pub struct Profile<T> {
    phi: Transition<T>,
    pub class: FoldClass,
    pub vstar: T,
    /// zero of F^2_x(0, v; 0, 0) in the visible-invisible case
    pub vbar: Option<T>,
    pub domain_top: T,
    pub v2: T,
    f1: Mix<T>,
    f1x: Mix<T>,
    r: Mix<T>,
    p: Mix<T>,
    qy: Mix<T>,
    qa: Mix<T>,
}

/// Integrand pieces at one v for a fixed level.
struct Pieces<T> {
    f0: T,
    f1: T,
}

impl<T: Real> Profile<T> {
    pub fn new(family: &Family<T>, phi: &Transition<T>) -> Result<Self> {
        let diag = filippov::diagnose(family)?;
        let (fam, _) = family.oriented();
        let j: OriginJet<T> = fam.origin_jet();
        if j.x.c1 * j.y.c1 >= T::zero() {
            return Err(Error::NoEquilibrium("X^1 Y^1(0) >= 0".into()));
        }
        let det_x = j.det_x();
        if det_x >= T::zero() {
            return Err(Error::Domain("the Melnikov analysis needs (det Z)_x(0) < 0 (focus case)".into()));
        }
        let class = match (diag.vis_x, diag.vis_y) {
            (Visibility::Invisible, Visibility::Invisible) => FoldClass::InvisibleInvisible,
            (Visibility::Visible, Visibility::Visible) => {
                return Err(Error::Domain("visible-visible fold-fold has no center".into()))
            }
            _ => FoldClass::VisibleInvisible,
        };
        let vstar = phi.inverse(-(j.x.c1 + j.y.c1) / (j.x.c1 - j.y.c1))?;
        let r = Mix::new(j.x.c2_x, j.y.c2_x);
        let vbar = match class {
            FoldClass::VisibleInvisible => Some(phi.inverse(-r.s / r.d)?),
            FoldClass::InvisibleInvisible => None,
        };
        let v2 = -phi.d1(&vstar) * (j.x.c1 - j.y.c1).powi(2) / (T::lit(2.0) * det_x);
        let mut prof = Profile {
            phi: phi.clone(),
            class,
            vstar,
            vbar,
            domain_top: T::zero(),
            v2,
            f1: Mix::new(j.x.c1, j.y.c1),
            f1x: Mix::new(j.x.c1_x, j.y.c1_x),
            r,
            p: Mix::new(j.x.c2_xx, j.y.c2_xx),
            qy: Mix::new(j.x.c2_y, j.y.c2_y),
            qa: Mix::new(j.x.c2_a, j.y.c2_a),
        };
        prof.domain_top = prof.compute_top()?;
        Ok(prof)
    }

    fn mix(&self, m: Mix<T>, v: T) -> T {
        m.s + self.phi.value(&v) * m.d
    }

    fn dmix(&self, m: Mix<T>, v: T) -> T {
        self.phi.d1(&v) * m.d
    }

    /// V'(v) = -F^1(0, v)/F^2_x(0, v).
    pub fn dpotential(&self, v: T) -> T {
        -self.mix(self.f1, v) / self.mix(self.r, v)
    }

    fn integral_of_dv(&self, a: T, b: T) -> Result<T> {
        if let Some(vb) = self.vbar {
            let (lo, hi) = (a.min(b), a.max(b));
            if lo <= vb && vb <= hi {
                return Err(Error::Domain(format!("F^2_x(0, r) vanishes at r = {vb} on the path")));
            }
        }
        quad::integrate(|s| self.dpotential(s), a, b, T::tol(1e-15), T::tol(1e-13))
    }

    /// V(v) = -int_{v*}^{v} F^1/F^2_x.
    pub fn potential(&self, v: T) -> Result<T> {
        self.integral_of_dv(self.vstar, v)
    }

    fn compute_top(&self) -> Result<T> {
        let margin = T::lit(1e-3);
        let upper = match self.vbar {
            Some(vb) => vb - margin,
            None => T::one() - margin,
        };
        let bottom = -T::one() + T::lit(1e-9);
        let vmin = self.potential(bottom)?;
        if self.potential(upper)? <= vmin {
            return Ok(upper);
        }
        let lim = roots::bisect(|v| self.potential(v).unwrap_or(T::nan()) - vmin, self.vstar, upper, T::tol(1e-13))?;
        Ok(lim - margin)
    }

    /// Point below v* on the level set of V through v0.
    pub fn conjugate(&self, v0: T) -> Result<T> {
        if v0 == self.vstar {
            return Ok(self.vstar);
        }
        if v0 < self.vstar {
            return Err(Error::Domain(format!("v0 = {v0} is below v* = {}", self.vstar)));
        }
        let level = self.potential(v0)?;
        let bottom = -T::one() + T::lit(1e-9);
        let g = |v: T| self.integral_of_dv(v0, v).unwrap_or(T::nan());
        if g(bottom) < T::zero() {
            return Err(Error::Domain(format!("no level match for V = {level} above v = -1")));
        }
        roots::bisect(g, bottom, self.vstar, T::zero())
    }

    fn pieces(&self, v: T, w: T) -> Pieces<T> {
        let r = self.mix(self.r, v);
        let dr = self.dmix(self.r, v);
        let f1 = self.mix(self.f1, v);
        let dw = f1 / r;
        let p = self.mix(self.p, v);
        let dp = self.dmix(self.p, v);
        let qy = self.mix(self.qy, v);
        let q0 = v * qy;
        let dq0 = qy + v * self.dmix(self.qy, v);
        let qa = self.mix(self.qa, v);
        let dqa = self.dmix(self.qa, v);
        let f1x = self.mix(self.f1x, v);
        let f0 = f1x / r + (dp * w + p * dw + dq0) / r - (p * w + q0) * dr / (r * r);
        let fd = dqa / r - qa * dr / (r * r);
        Pieces { f0, f1: fd }
    }

    /// Affine parts (M_0(v0), M_1(v0)) with M(v0, delta) = M_0 + delta M_1.
    pub fn parts(&self, v0: T) -> Result<(T, T)> {
        if v0 < self.vstar {
            return Err(Error::Domain(format!("v0 = {v0} is below v* = {}", self.vstar)));
        }
        if v0 > self.domain_top {
            return Err(Error::Domain(format!("v0 = {v0} is above the domain top {}", self.domain_top)));
        }
        if v0 == self.vstar {
            return Ok((T::zero(), T::zero()));
        }
        let vs = self.vstar;
        let vb0 = self.conjugate(v0)?;
        let two = T::lit(2.0);
        let half_pi = T::FRAC_PI_2();
        // one side of the split at v*: v = v* + (end - v*) sin(theta)
        let side = |end: T| -> Result<(T, T)> {
            let h = end - vs;
            let mut out = [T::zero(); 2];
            for (k, o) in out.iter_mut().enumerate() {
                let val = quad::integrate(
                    |th: T| {
                        let v = vs + h * th.sin();
                        let w = self.integral_of_dv(v, end).unwrap_or(T::nan());
                        let w = w.max(T::zero());
                        let pc = self.pieces(v, w);
                        let f = if k == 0 { pc.f0 } else { pc.f1 };
                        f * (two * w).sqrt() * h * th.cos()
                    },
                    T::zero(),
                    half_pi,
                    T::tol(1e-16),
                    T::tol(1e-11),
                )?;
                *o = val;
            }
            Ok((out[0], out[1]))
        };
        // W(v) = V(v0) - V(v) equals int_v^{v0} V' above v* and int_v^{vbar0} V' below it
        let (a0, a1) = side(v0)?;
        let (b0, b1) = side(vb0)?;
        // the lower side runs from v* down to vbar0, so its orientation flips
        let i0 = a0 - b0;
        let i1 = a1 - b1;
        let scale = -two / self.dpotential(v0);
        Ok((scale * i0, scale * i1))
    }

    pub fn melnikov(&self, v0: T, delta: T) -> Result<T> {
        let (m0, m1) = self.parts(v0)?;
        Ok(m0 + delta * m1)
    }

    /// dM/dv by central difference (one-sided at v*).
    pub fn dmelnikov(&self, v0: T, delta: T, h: T) -> Result<T> {
        let lo = (v0 - h).max(self.vstar);
        let hi = (v0 + h).min(self.domain_top);
        Ok((self.melnikov(hi, delta)? - self.melnikov(lo, delta)?) / (hi - lo))
    }

    /// Value of the integrand kernel f(v*, v*, delta); fixes dM/dv at v*.
    pub fn kernel_at_vstar(&self, delta: T) -> T {
        let pc = self.pieces(self.vstar, T::zero());
        pc.f0 + delta * pc.f1
    }

    /// dM/dv(v*, delta) = -pi f(v*, v*, delta)/sqrt(V''(v*)).
    pub fn dmelnikov_at_vstar(&self, delta: T) -> T {
        -T::PI() / self.v2.sqrt() * self.kernel_at_vstar(delta)
    }

    /// Second v-derivative of M at v* from m(h) = 2 M(v*+h)/h^2 with Richardson extrapolation.
    pub fn second_derivative_at_vstar(&self, delta: T) -> Result<T> {
        let h = T::lit(1e-3);
        let m = |h: T| -> Result<T> { Ok(T::lit(2.0) * self.melnikov(self.vstar + h, delta)? / (h * h)) };
        let (m1, m2) = (m(h)?, m(T::lit(2.0) * h)?);
        Ok(T::lit(2.0) * m1 - m2)
    }

    /// Leading one-sided coefficient c with M(v* + h, delta_H) = c h^3 + O(h^4).
    ///
    /// At delta_H the quadratic term vanishes together with the linear one, so the sign of
    /// M just above v* is carried by the cubic term.
    pub fn cubic_coefficient_at_vstar(&self, delta_h: T) -> Result<T> {
        let h = T::lit(4e-3);
        let c = |h: T| -> Result<T> { Ok(self.melnikov(self.vstar + h, delta_h)? / (h * h * h)) };
        let (c1, c2) = (c(h)?, c(T::lit(2.0) * h)?);
        Ok(T::lit(2.0) * c1 - c2)
    }

    /// Subcritical when v* is a one-sided minimum of M(., delta_H), supercritical when a maximum.
    pub fn hopf_criticality(&self, delta_h: T) -> Result<Criticality> {
        let c = self.cubic_coefficient_at_vstar(delta_h)?;
        if c.abs() < T::lit(1e-6) {
            return Err(Error::Indeterminate(format!("M(v* + h, delta_H) / h^3 -> {c}")));
        }
        Ok(if c > T::zero() { Criticality::Subcritical } else { Criticality::Supercritical })
    }

    /// d2M/dv d delta at v*, i.e. the slope of M_1 there.
    pub fn cross_derivative_at_vstar(&self) -> Result<T> {
        let h = T::lit(1e-3);
        let s = |h: T| -> Result<T> { Ok(self.parts(self.vstar + h)?.1 / h) };
        Ok(T::lit(2.0) * s(h)? - s(T::lit(2.0) * h)?)
    }

    fn grid(&self, n: usize, start: T) -> Vec<T> {
        let lo = self.vstar + start;
        let hi = self.domain_top;
        (0..n).map(|i| lo + (hi - lo) * T::from_usize(i).unwrap() / T::from_usize(n - 1).unwrap()).collect()
    }

    /// Zeros of M(., delta) in (v* + 1e-4, domain_top) with the sign of dM/dv at each.
    pub fn cycle_zeros(&self, delta: T) -> Result<Vec<(T, i8)>> {
        let grid = self.grid(400, T::lit(1e-4));
        let parts: Vec<(T, T)> = grid.iter().map(|&v| self.parts(v)).collect::<Result<_>>()?;
        let vals: Vec<T> = parts.iter().map(|(a, b)| *a + delta * *b).collect();
        let mut out = Vec::new();
        for i in 0..grid.len() - 1 {
            if (vals[i] > T::zero()) != (vals[i + 1] > T::zero()) {
                let z = roots::brent(
                    |v| self.melnikov(v, delta).unwrap_or(T::nan()),
                    grid[i],
                    grid[i + 1],
                    T::tol(1e-10),
                )?;
                let s = self.dmelnikov(z, delta, T::lit(1e-5))?;
                out.push((z, if s > T::zero() { 1 } else if s < T::zero() { -1 } else { 0 }));
            }
        }
        Ok(out)
    }

    /// delta(v) solving M(v, delta) = 0.
    pub fn delta_of_v(&self, v: T) -> Result<T> {
        let (m0, m1) = self.parts(v)?;
        if m1 == T::zero() {
            return Err(Error::Degenerate(format!("M is independent of delta at v = {v}")));
        }
        Ok(-m0 / m1)
    }

    /// Saddle-node of cycles: interior extremum (v_S, delta_S) of delta(v).
    pub fn saddle_node(&self) -> Result<(T, T)> {
        let grid = self.grid(120, T::lit(2e-3));
        let d: Vec<T> = grid.iter().map(|&v| self.delta_of_v(v)).collect::<Result<_>>()?;
        // first interior index where the discrete slope changes sign
        let mut k = None;
        for i in 1..d.len() - 1 {
            let a = d[i] - d[i - 1];
            let b = d[i + 1] - d[i];
            if (a > T::zero()) != (b > T::zero()) && a != T::zero() && b != T::zero() {
                k = Some(i);
                break;
            }
        }
        let i = k.ok_or_else(|| Error::NoSaddleNode("delta(v) has no interior stationary point".into()))?;
        let maximum = d[i] > d[i - 1];
        // golden-section search on [grid[i-1], grid[i+1]]
        let sgn = if maximum { -T::one() } else { T::one() };
        let obj = |v: T| sgn * self.delta_of_v(v).unwrap_or(T::nan());
        let (mut a, mut b) = (grid[i - 1], grid[i + 1]);
        let gr = T::lit(0.618_033_988_749_894_8);
        let mut c = b - gr * (b - a);
        let mut e = a + gr * (b - a);
        let (mut fc, mut fe) = (obj(c), obj(e));
        for _ in 0..80 {
            if (b - a).abs() < T::tol(1e-9) {
                break;
            }
            if fc < fe {
                b = e;
                e = c;
                fe = fc;
                c = b - gr * (b - a);
                fc = obj(c);
            } else {
                a = c;
                c = e;
                fc = fe;
                e = a + gr * (b - a);
                fe = obj(e);
            }
        }
        let vs = T::lit(0.5) * (a + b);
        let ds = self.delta_of_v(vs)?;
        Ok((vs, ds))
    }

    /// Smallest second difference of M(., delta) over the scan grid (concavity certificate).
    pub fn concavity_certificate(&self, delta: T) -> Result<T> {
        let grid = self.grid(60, T::lit(1e-3));
        let m: Vec<T> = grid.iter().map(|&v| self.melnikov(v, delta)).collect::<Result<_>>()?;
        let h = grid[1] - grid[0];
        let mut worst = T::neg_infinity();
        for i in 1..m.len() - 1 {
            worst = worst.max((m[i + 1] - T::lit(2.0) * m[i] + m[i - 1]) / (h * h));
        }
        Ok(worst)
    }
}
