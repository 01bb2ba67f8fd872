//! Trajectories of the regularized system in the fast chart, return maps, periodic
//! orbits and the way-in/way-out diagnostics.

use crate::equilibria;
use crate::error::{Error, Result};
use crate::fields::{Family, Partial, PlanarField, PolyField};
use crate::filippov::{self, Visibility};
use crate::ode::{Dopri, Event};
use crate::quad;
use crate::regularize::{Regularized, Transition};
use crate::roots;
use crate::scalar::Real;
use crate::slowfast;
use serde::Serialize;

/// Working box; states with |x| or |eps v| beyond ESCAPE_FACTOR * BOX escape.
pub const BOX: f64 = 1.0;
pub const ESCAPE_FACTOR: f64 = 10.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BandEvent<T> {
    pub t: T,
    pub x: T,
    pub v: T,
    /// +1 for the edge v = 1, -1 for v = -1
    pub edge: i8,
    /// +1 when v increases through the edge
    pub direction: i8,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SectionEvent<T> {
    pub section: usize,
    pub t: T,
    pub x: T,
    pub v: T,
    pub rising: bool,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Trajectory<T> {
    pub samples: Vec<(T, T, T)>,
    pub events: Vec<BandEvent<T>>,
    pub sections: Vec<SectionEvent<T>>,
}

/// Affine section a x + b v = c.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Line<T> {
    pub a: T,
    pub b: T,
    pub c: T,
}

impl<T: Real> Line<T> {
    pub fn x_eq(x: T) -> Self {
        Line { a: T::one(), b: T::zero(), c: x }
    }

    pub fn v_eq(v: T) -> Self {
        Line { a: T::zero(), b: T::one(), c: v }
    }

    fn eval(&self, x: T, v: T) -> T {
        self.a * x + self.b * v - self.c
    }
}

fn escaped<T: Real>(eps: T, x: T, v: T) -> bool {
    let lim = T::lit(BOX * ESCAPE_FACTOR);
    !(x.abs() <= lim && (eps * v).abs() <= lim)
}

/// Integrate the fast system from `start` for fast time `t_end` (negative runs backward).
pub fn integrate<T: Real>(reg: &Regularized<T>, start: (T, T), t_end: T, sections: &[Line<T>]) -> Result<Trajectory<T>> {
    let mut events = vec![
        Event::new(|_t: T, y: &[T; 2]| y[1] - T::one(), 0, false),
        Event::new(|_t: T, y: &[T; 2]| y[1] + T::one(), 0, false),
    ];
    for s in sections {
        let s = *s;
        events.push(Event::new(move |_t: T, y: &[T; 2]| s.eval(y[0], y[1]), 0, false));
    }
    let eps = reg.eps;
    let sol = Dopri::default().recording().solve(
        |_t, y| reg.fast(y[0], y[1]),
        T::zero(),
        [start.0, start.1],
        t_end,
        &events,
        |y| escaped(eps, y[0], y[1]),
    )?;
    let mut tr = Trajectory { samples: sol.samples.iter().map(|(t, y)| (*t, y[0], y[1])).collect(), ..Default::default() };
    for h in &sol.hits {
        if h.index < 2 {
            tr.events.push(BandEvent {
                t: h.t,
                x: h.y[0],
                v: h.y[1],
                edge: if h.index == 0 { 1 } else { -1 },
                direction: if h.rising { 1 } else { -1 },
            });
        } else {
            tr.sections.push(SectionEvent { section: h.index - 2, t: h.t, x: h.y[0], v: h.y[1], rising: h.rising });
        }
    }
    Ok(tr)
}

/// F(x, v) at eps = 0.
fn f_frozen<T: Real>(reg: &Regularized<T>, x: T, v: T) -> (T, T) {
    let z = T::zero();
    let (a, b) = (reg.x_field(), reg.y_field());
    let p = reg.phi.value(&v);
    let c = |w: Partial| (a.partial(w, &x, &z), b.partial(w, &x, &z));
    let (a1, b1) = c(Partial::C1);
    let (a2, b2) = c(Partial::C2);
    (a1 + b1 + p * (a1 - b1), a2 + b2 + p * (a2 - b2))
}

/// Edge at which an orbit through x enters the band: -1 if it moves up, +1 if down.
pub fn entry_edge<T: Real>(reg: &Regularized<T>, x: T) -> Result<i8> {
    let up = f_frozen(reg, x, -T::one()).1;
    let down = f_frozen(reg, x, T::one()).1;
    if up > T::zero() && down > T::zero() {
        Ok(-1)
    } else if up < T::zero() && down < T::zero() {
        Ok(1)
    } else {
        Err(Error::Domain(format!("F^2 changes sign inside the band at x = {x}")))
    }
}

fn check_no_sign_change<T: Real>(mut f2: impl FnMut(T) -> T) -> Result<()> {
    let s0 = f2(-T::one());
    for i in 1..=200 {
        let v = T::lit(-1.0 + 2.0 * i as f64 / 200.0);
        if f2(v) * s0 <= T::zero() {
            return Err(Error::Domain(format!("F^2 changes sign inside the band near v = {v}")));
        }
    }
    Ok(())
}

/// Exit x of the band crossing that enters at (x, edge), from the orbit equation dx/dv = eps F^1/F^2.
pub fn band_crossing_map<T: Real>(reg: &Regularized<T>, x: T, edge: i8) -> Result<T> {
    let eps = reg.eps;
    check_no_sign_change(|v| reg.f(x, v).1)?;
    let v0 = if edge > 0 { T::one() } else { -T::one() };
    let sol = Dopri::default().with_tol(1e-13, 1e-15).solve(
        |v, y: &[T; 1]| {
            let (a, b) = reg.f(y[0], v);
            [eps * a / b]
        },
        v0,
        [x],
        -v0,
        &[],
        |y| !y[0].is_finite(),
    )?;
    Ok(sol.y[0])
}

/// g(x) = int from the entry edge to the exit edge of F^1/F^2 at eps = 0.
pub fn first_order_g<T: Real>(reg: &Regularized<T>, x: T, edge: i8) -> Result<T> {
    check_no_sign_change(|v| f_frozen(reg, x, v).1)?;
    let v0 = if edge > 0 { T::one() } else { -T::one() };
    quad::integrate(
        |v| {
            let (a, b) = f_frozen(reg, x, v);
            a / b
        },
        v0,
        -v0,
        T::tol(1e-15),
        T::tol(1e-13),
    )
}

/// Poincare section: a line crossed in a fixed direction, parametrized by one coordinate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Section<T> {
    /// {x = x0}, crossed with x increasing; coordinate v
    X(T),
    /// {v = v0}, crossed with v increasing; coordinate x
    V(T),
}

impl<T: Real> Section<T> {
    fn point(&self, s: T) -> [T; 2] {
        match *self {
            Section::X(x0) => [x0, s],
            Section::V(v0) => [s, v0],
        }
    }

    fn coord(&self, y: &[T; 3]) -> T {
        match self {
            Section::X(_) => y[1],
            Section::V(_) => y[0],
        }
    }

    fn g(&self, y: &[T; 3]) -> T {
        match *self {
            Section::X(x0) => y[0] - x0,
            Section::V(v0) => y[1] - v0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ReturnHit<T> {
    pub coord: T,
    pub time: T,
    /// integral of the divergence of the fast field along the arc
    pub divergence: T,
}

/// Next crossing of the section in its positive direction.
pub fn return_map<T: Real>(reg: &Regularized<T>, section: Section<T>, s0: T) -> Result<ReturnHit<T>> {
    let p = section.point(s0);
    let eps = reg.eps;
    let ev = [Event::new(move |_t: T, y: &[T; 3]| section.g(y), 1, true)];
    let sol = Dopri::default().solve(
        |_t, y: &[T; 3]| {
            let [a, b] = reg.fast(y[0], y[1]);
            [a, b, reg.divergence_fast(y[0], y[1])]
        },
        T::zero(),
        [p[0], p[1], T::zero()],
        T::lit(2000.0) / eps,
        &ev,
        |y| escaped(eps, y[0], y[1]),
    )?;
    if sol.terminated.is_none() {
        return Err(Error::NoReturn(format!("no return to the section from {s0}")));
    }
    Ok(ReturnHit { coord: section.coord(&sol.y), time: sol.t, divergence: sol.y[2] })
}

pub fn displacement<T: Real>(reg: &Regularized<T>, section: Section<T>, s0: T) -> Result<T> {
    Ok(return_map(reg, section, s0)?.coord - s0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OrbitStability {
    Attracting,
    Repelling,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OrbitCertificate<T> {
    pub section_point: (T, T),
    pub period: T,
    pub stability: OrbitStability,
    pub floquet_log: T,
    pub residual: T,
}

fn certify<T: Real>(reg: &Regularized<T>, section: Section<T>, s: T) -> Result<OrbitCertificate<T>> {
    let hit = return_map(reg, section, s)?;
    let p = section.point(s);
    Ok(OrbitCertificate {
        section_point: (p[0], p[1]),
        period: hit.time,
        stability: if hit.divergence < T::zero() { OrbitStability::Attracting } else { OrbitStability::Repelling },
        floquet_log: hit.divergence,
        residual: (hit.coord - s).abs(),
    })
}

/// Root of the displacement inside [lo, hi]; `n` sub-intervals are scanned for a sign change.
pub fn orbit_in_bracket<T: Real>(reg: &Regularized<T>, section: Section<T>, lo: T, hi: T, n: usize) -> Result<OrbitCertificate<T>> {
    let d = |s: T| displacement(reg, section, s).unwrap_or(T::nan());
    let grid: Vec<T> = (0..=n).map(|i| lo + (hi - lo) * T::from_usize(i).unwrap() / T::from_usize(n).unwrap()).collect();
    let mut prev = (grid[0], d(grid[0]));
    for &s in &grid[1..] {
        let ds = d(s);
        if prev.1.is_finite() && ds.is_finite() && (prev.1 > T::zero()) != (ds > T::zero()) {
            let root = roots::brent(d, prev.0, s, T::tol(1e-13))?;
            return certify(reg, section, root);
        }
        prev = (s, ds);
    }
    Err(Error::NoOrbit(format!("no sign change of the return displacement on [{lo}, {hi}]")))
}

/// All orbits crossing the section inside [lo, hi], located from an n-point scan.
pub fn scan_orbits<T: Real>(reg: &Regularized<T>, section: Section<T>, lo: T, hi: T, n: usize) -> Result<Vec<OrbitCertificate<T>>> {
    let d = |s: T| displacement(reg, section, s).unwrap_or(T::nan());
    let grid: Vec<T> = (0..n).map(|i| lo + (hi - lo) * T::from_usize(i).unwrap() / T::from_usize(n - 1).unwrap()).collect();
    let vals: Vec<T> = grid.iter().map(|&s| d(s)).collect();
    let mut out = Vec::new();
    for i in 0..n - 1 {
        if vals[i].is_finite() && vals[i + 1].is_finite() && (vals[i] > T::zero()) != (vals[i + 1] > T::zero()) {
            let root = roots::brent(d, grid[i], grid[i + 1], T::tol(1e-13))?;
            out.push(certify(reg, section, root)?);
        }
    }
    Ok(out)
}

/// Section {x = x_P, v > v_P} through the critical point.
pub fn critical_section<T: Real>(reg: &Regularized<T>) -> Result<(Section<T>, T)> {
    let p = equilibria::find_critical_point(reg)?;
    Ok((Section::X(p.x), p.v))
}

/// Periodic orbit through {x = x_P, v > v_P}, searched for in v in (v_P + lo, v_P + hi).
pub fn find_periodic_orbit<T: Real>(reg: &Regularized<T>, lo: T, hi: T) -> Result<OrbitCertificate<T>> {
    let (sec, vp) = critical_section(reg)?;
    orbit_in_bracket(reg, sec, vp + lo, vp + hi, 16)
}

/// Band-entry point x at v = 1 of the crossing cycle near F(alpha) for each eps.
pub fn fixed_alpha_limit<T: Real>(
    family: &Family<T>,
    phi: &Transition<T>,
    alpha: T,
    eps: &[T],
) -> Result<(T, Vec<OrbitCertificate<T>>)> {
    let diag = filippov::diagnose(family)?;
    if !(diag.vis_x == Visibility::Invisible && diag.vis_y == Visibility::Invisible) {
        return Err(Error::Domain("the fixed-alpha limit needs an invisible-invisible fold-fold".into()));
    }
    let (fam, _) = family.oriented();
    let xf = filippov::unfolding_return_fixed_point(&fam, alpha)?
        .ok_or_else(|| Error::NoOrbit(format!("the nonsmooth return map has no fixed point at alpha = {alpha}")))?;
    let (tx, _) = filippov::unfolding_tangencies(&fam, alpha)?;
    let mut out = Vec::new();
    for &e in eps {
        let reg = Regularized::new(fam.clone(), phi.clone(), alpha, e)?;
        let w = (tx - xf).abs();
        let lo = xf - T::lit(0.5) * w;
        let hi = (xf + T::lit(0.5) * w).min(tx - T::lit(1e-6));
        out.push(orbit_in_bracket(&reg, Section::V(T::one()), lo, hi, 12)?);
    }
    Ok((xf, out))
}

/// Invisible field of a visible-invisible fold-fold (in the oriented frame), and its name.
fn invisible_field<T: Real>(fam: &Family<T>) -> Result<(PolyField<T>, char)> {
    let d = filippov::diagnose(fam)?;
    match (d.vis_x, d.vis_y) {
        (Visibility::Visible, Visibility::Invisible) => Ok((fam.y_at(&T::zero()), 'Y')),
        (Visibility::Invisible, Visibility::Visible) => Ok((fam.x_at(&T::zero()), 'X')),
        _ => Err(Error::Domain("way-in/way-out needs a visible-invisible fold-fold".into())),
    }
}

/// G(s) = (X^2 - Y^2)^2 / (2 det Z)(s, 0).
fn g_ratio<T: Real>(x: &PolyField<T>, y: &PolyField<T>, s: T) -> T {
    let z = T::zero();
    let (x1, x2) = x.eval(s, z);
    let (y1, y2) = y.eval(s, z);
    let det = x1 * y2 - x2 * y1;
    (x2 - y2) * (x2 - y2) / (T::lit(2.0) * det)
}

/// Way-in/way-out function R(x) along the canard piece.
pub fn way_in_way_out<T: Real>(family: &Family<T>, phi: &Transition<T>, x: T) -> Result<T> {
    if x == T::zero() {
        return Ok(T::zero());
    }
    let (fam, _) = family.oriented();
    let (inv, _) = invisible_field(&fam)?;
    let xs = fam.x_at(&T::zero());
    let ys = fam.y_at(&T::zero());
    let reg0 = Regularized::new(fam.clone(), phi.clone(), T::zero(), T::one())?;
    let xbar = filippov::half_return_numeric(&inv, x, T::zero())?;
    let integrand = |s: T| {
        let m0 = slowfast::m0_alpha_eval(&reg0, s).unwrap_or(T::nan());
        phi.d1(&m0) * g_ratio(&xs, &ys, s)
    };
    let tol = (T::tol(1e-14), T::tol(1e-11));
    // split at the removable zero s = 0
    let lo = quad::integrate(integrand, xbar, T::zero(), tol.0, tol.1)?;
    let hi = quad::integrate(integrand, T::zero(), x, tol.0, tol.1)?;
    Ok(-(lo + hi))
}

/// G'(0) = (X^2_x - Y^2_x)^2 / (2 (det Z)_x)(0).
pub fn g_prime_at_0<T: Real>(family: &Family<T>) -> T {
    let j = family.oriented().0.origin_jet();
    let d = j.x.c2_x - j.y.c2_x;
    d * d / (T::lit(2.0) * j.det_x())
}

/// Sign coefficient B of the big orbit born at the Canard explosion; negative is stable.
pub fn b_coefficient<T: Real>(family: &Family<T>, phi: &Transition<T>) -> Result<T> {
    let (fam, _) = family.oriented();
    let (inv, _) = invisible_field(&fam)?;
    let beta = filippov::beta_coefficient(&inv, (T::zero(), T::zero()))?;
    let j = fam.origin_jet();
    let (x, y) = (&j.x, &j.y);
    let vbar = phi.inverse((x.c2_x + y.c2_x) / (y.c2_x - x.c2_x))?;
    let (d1, d2) = (phi.d1(&vbar), phi.d2(&vbar));
    let two = T::lit(2.0);
    let inner = T::lit(3.0) * beta
        + two * ((x.c2_xx - y.c2_xx) / (x.c2_x - y.c2_x) - j.det_xx() / (two * j.det_x()));
    let cross = (x.c2_xx * y.c2_x - y.c2_xx * x.c2_x) / ((y.c2_x - x.c2_x) * (y.c2_x - x.c2_x));
    Ok(d1 * inner + two * d2 / d1 * cross)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BigOrbitSide {
    #[serde(rename = "right-of-C")]
    RightOfC,
    #[serde(rename = "left-of-C")]
    LeftOfC,
}

pub fn side_from_b<T: Real>(b: T) -> Result<BigOrbitSide> {
    if b.abs() < T::lit(1e-6) {
        return Err(Error::Indeterminate(format!("B = {b}")));
    }
    Ok(if b < T::zero() { BigOrbitSide::RightOfC } else { BigOrbitSide::LeftOfC })
}

pub fn big_orbit_side<T: Real>(family: &Family<T>, phi: &Transition<T>) -> Result<BigOrbitSide> {
    side_from_b(b_coefficient(family, phi)?)
}

/// Largest return displacement on the critical section over v in (v_P, top), where top is
/// the last scanned point whose orbit still returns.
pub fn max_displacement<T: Real>(reg: &Regularized<T>, span: T, n: usize) -> Result<(T, T)> {
    let (sec, vp) = critical_section(reg)?;
    let d = |v: T| displacement(reg, sec, v).unwrap_or(T::nan());
    let lo = vp + T::lit(1e-3);
    let grid: Vec<T> = (0..n).map(|i| lo + span * T::from_usize(i).unwrap() / T::from_usize(n - 1).unwrap()).collect();
    let vals: Vec<T> = grid.iter().map(|&v| d(v)).collect();
    let (k, _) = vals
        .iter()
        .enumerate()
        .filter(|(_, x)| x.is_finite())
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .ok_or_else(|| Error::NoReturn("no orbit on the scan returns to the section".into()))?;
    let (mut a, mut b) = (grid[k.saturating_sub(1)], grid[(k + 1).min(n - 1)]);
    let gr = T::lit(0.618_033_988_749_894_8);
    let neg = |v: T| {
        let x = d(v);
        if x.is_finite() {
            -x
        } else {
            T::infinity()
        }
    };
    let mut c = b - gr * (b - a);
    let mut e = a + gr * (b - a);
    let (mut fc, mut fe) = (neg(c), neg(e));
    for _ in 0..40 {
        if fc < fe {
            b = e;
            e = c;
            fe = fc;
            c = b - gr * (b - a);
            fc = neg(c);
        } else {
            a = c;
            c = e;
            fc = fe;
            e = a + gr * (b - a);
            fe = neg(e);
        }
    }
    let v = T::lit(0.5) * (a + b);
    Ok((v, d(v).max(vals[k])))
}

/// Saddle-node of cycles in alpha at fixed eps: the alpha in [lo, hi] where the largest
/// return displacement on the critical section reaches zero.
pub fn saddle_node_of_cycles<T: Real>(family: &Family<T>, phi: &Transition<T>, eps: T, lo: T, hi: T) -> Result<(T, T)> {
    let (fam, _) = family.oriented();
    let base = Regularized::new(fam, phi.clone(), lo, eps)?;
    let span = T::lit(2.0);
    let dmax = |a: T| -> Result<(T, T)> { max_displacement(&base.with_params(a, eps)?, span, 80) };
    let (fl, fh) = (dmax(lo)?.1, dmax(hi)?.1);
    if (fl > T::zero()) == (fh > T::zero()) {
        return Err(Error::NoSaddleNode(format!("the largest displacement keeps its sign on alpha in [{lo}, {hi}]")));
    }
    let a = roots::bisect(|a| dmax(a).map(|r| r.1).unwrap_or(T::nan()), lo, hi, T::tol(1e-7))?;
    Ok((a, dmax(a)?.0))
}
