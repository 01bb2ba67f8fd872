//! Dormand-Prince 5(4) with dense output and event location.

use crate::error::{Error, Result};
use crate::scalar::Real;

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

/// Event function g(t, y); a hit is a sign change of g.
pub struct Event<'a, T, const N: usize> {
    pub g: Box<dyn Fn(T, &[T; N]) -> T + 'a>,
    /// +1: only negative-to-positive, -1: only positive-to-negative, 0: both
    pub direction: i8,
    pub terminal: bool,
}

impl<'a, T, const N: usize> Event<'a, T, N> {
    pub fn new(g: impl Fn(T, &[T; N]) -> T + 'a, direction: i8, terminal: bool) -> Self {
        Event { g: Box::new(g), direction, terminal }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Hit<T, const N: usize> {
    pub index: usize,
    pub t: T,
    pub y: [T; N],
    pub rising: bool,
}

#[derive(Clone, Debug)]
pub struct Solution<T, const N: usize> {
    pub t: T,
    pub y: [T; N],
    pub samples: Vec<(T, [T; N])>,
    pub hits: Vec<Hit<T, N>>,
    /// index of the terminal event that stopped the run
    pub terminated: Option<usize>,
    pub steps: usize,
}

/// Dense interpolant of one accepted step.
struct Dense<T, const N: usize> {
    t0: T,
    h: T,
    r: [[T; N]; 5],
}

impl<T: Real, const N: usize> Dense<T, N> {
    fn at(&self, t: T) -> [T; N] {
        let th = (t - self.t0) / self.h;
        let th1 = T::one() - th;
        let mut y = [T::zero(); N];
        for i in 0..N {
            let r = &self.r;
            y[i] = r[0][i] + th * (r[1][i] + th1 * (r[2][i] + th * (r[3][i] + th1 * r[4][i])));
        }
        y
    }
}

#[derive(Clone, Debug)]
pub struct Dopri<T> {
    pub rtol: T,
    pub atol: T,
    pub hmax: T,
    pub max_steps: usize,
    /// keep every accepted step in `Solution::samples`
    pub record: bool,
}

impl<T: Real> Default for Dopri<T> {
    fn default() -> Self {
        Dopri {
            rtol: T::tol(1e-10),
            atol: T::tol(1e-12),
            hmax: T::infinity(),
            max_steps: 2_000_000,
            record: false,
        }
    }
}

impl<T: Real> Dopri<T> {
    pub fn recording(mut self) -> Self {
        self.record = true;
        self
    }

    pub fn with_hmax(mut self, hmax: T) -> Self {
        self.hmax = hmax;
        self
    }

    pub fn with_tol(mut self, rtol: f64, atol: f64) -> Self {
        self.rtol = T::tol(rtol);
        self.atol = T::tol(atol);
        self
    }

    fn norm<const N: usize>(&self, e: &[T; N], y0: &[T; N], y1: &[T; N]) -> T {
        let mut s = T::zero();
        for i in 0..N {
            let sc = self.atol + self.rtol * y0[i].abs().max(y1[i].abs());
            let q = e[i] / sc;
            s = s + q * q;
        }
        (s / T::from_usize(N).unwrap()).sqrt()
    }

    /// Integrate from t0 to t_end (either direction). `escape` ends the run with an
    /// `Escape` error.
    pub fn solve<const N: usize>(
        &self,
        mut f: impl FnMut(T, &[T; N]) -> [T; N],
        t0: T,
        y0: [T; N],
        t_end: T,
        events: &[Event<'_, T, N>],
        escape: impl Fn(&[T; N]) -> bool,
    ) -> Result<Solution<T, N>> {
        let dir = if t_end >= t0 { T::one() } else { -T::one() };
        let span = (t_end - t0).abs();
        let mut sol = Solution { t: t0, y: y0, samples: Vec::new(), hits: Vec::new(), terminated: None, steps: 0 };
        if self.record {
            sol.samples.push((t0, y0));
        }
        if span == T::zero() {
            return Ok(sol);
        }
        let tiny = T::lit(1e-12);
        let mut prev_g: Vec<Option<T>> = events
            .iter()
            .map(|e| {
                let g = (e.g)(t0, &y0);
                if g.abs() <= tiny {
                    None
                } else {
                    Some(g)
                }
            })
            .collect();

        let mut t = t0;
        let mut y = y0;
        let mut k1 = f(t, &y);
        let mut h = {
            let d0 = self.norm(&y, &y, &y);
            let d1 = self.norm(&k1, &y, &y);
            let h0 = if d0 < T::lit(1e-5) || d1 < T::lit(1e-5) { T::lit(1e-6) } else { T::lit(0.01) * d0 / d1 };
            h0.min(span).min(self.hmax)
        };
        let mut reject = false;
        let lit = |x: f64| T::lit(x);
        loop {
            if sol.steps >= self.max_steps {
                return Err(Error::Numerical(format!("step limit reached at t = {t}")));
            }
            let remaining = (t_end - t) * dir;
            if remaining <= T::zero() {
                break;
            }
            let last = h >= remaining;
            if last {
                h = remaining;
            }
            let hs = h * dir;
            let mut k = [[T::zero(); N]; 7];
            k[0] = k1;
            for s in 1..7 {
                let mut ys = y;
                for i in 0..N {
                    let mut acc = T::zero();
                    for j in 0..s {
                        if A[s][j] != 0.0 {
                            acc = acc + lit(A[s][j]) * k[j][i];
                        }
                    }
                    ys[i] = y[i] + hs * acc;
                }
                // the last row equals the 5th-order weights, so k[6] is f at y1 (FSAL)
                k[s] = f(t + lit(C[s]) * hs, &ys);
            }
            let mut y1 = [T::zero(); N];
            for i in 0..N {
                let mut acc = T::zero();
                for j in 0..6 {
                    acc = acc + lit(A[6][j]) * k[j][i];
                }
                y1[i] = y[i] + hs * acc;
            }
            let mut err = [T::zero(); N];
            for i in 0..N {
                let mut acc = T::zero();
                for j in 0..7 {
                    if E[j] != 0.0 {
                        acc = acc + lit(E[j]) * k[j][i];
                    }
                }
                err[i] = hs * acc;
            }
            let en = self.norm(&err, &y, &y1);
            sol.steps += 1;
            if !en.is_finite() || y1.iter().any(|v| !v.is_finite()) {
                h = h * lit(0.1);
                reject = true;
                if h < T::epsilon() * (T::one() + t.abs()) {
                    return Err(Error::Numerical(format!("step size underflow at t = {t}")));
                }
                continue;
            }
            if en > T::one() {
                let fac = (lit(0.9) * en.powf(lit(-0.2))).max(lit(0.2));
                h = h * fac;
                reject = true;
                if h < T::epsilon() * lit(16.0) * (T::one() + t.abs()) {
                    return Err(Error::Numerical(format!("step size underflow at t = {t}")));
                }
                continue;
            }
            // accepted
            let t1 = if last { t_end } else { t + hs };
            let mut r = [[T::zero(); N]; 5];
            for i in 0..N {
                let dy = y1[i] - y[i];
                let bspl = hs * k[0][i] - dy;
                r[0][i] = y[i];
                r[1][i] = dy;
                r[2][i] = bspl;
                r[3][i] = dy - hs * k[6][i] - bspl;
                let mut acc = T::zero();
                for j in 0..7 {
                    if D[j] != 0.0 {
                        acc = acc + lit(D[j]) * k[j][i];
                    }
                }
                r[4][i] = hs * acc;
            }
            let dense = Dense { t0: t, h: hs, r };

            // events in this step
            let mut first_terminal: Option<Hit<T, N>> = None;
            let mut step_hits = Vec::new();
            for (idx, ev) in events.iter().enumerate() {
                let g1 = (ev.g)(t1, &y1);
                let g0 = match prev_g[idx] {
                    Some(g0) => g0,
                    None => {
                        if g1.abs() > tiny {
                            prev_g[idx] = Some(g1);
                        }
                        continue;
                    }
                };
                let crossed = (g0 < T::zero() && g1 >= T::zero()) || (g0 > T::zero() && g1 <= T::zero());
                if g1 != T::zero() {
                    prev_g[idx] = Some(g1);
                } else {
                    prev_g[idx] = None;
                }
                if !crossed {
                    continue;
                }
                let rising = g0 < T::zero();
                if (ev.direction > 0 && !rising) || (ev.direction < 0 && rising) {
                    continue;
                }
                let th = locate(|tt| (ev.g)(tt, &dense.at(tt)), t, t1, g0, g1);
                let hit = Hit { index: idx, t: th, y: dense.at(th), rising };
                if ev.terminal {
                    let earlier = match &first_terminal {
                        Some(h0) => (th - h0.t) * dir < T::zero(),
                        None => true,
                    };
                    if earlier {
                        first_terminal = Some(hit.clone());
                    }
                }
                step_hits.push(hit);
            }
            step_hits.sort_by(|a, b| ((a.t - b.t) * dir).partial_cmp(&T::zero()).unwrap_or(std::cmp::Ordering::Equal));
            if let Some(term) = first_terminal {
                for hit in step_hits {
                    if (hit.t - term.t) * dir <= T::zero() {
                        sol.hits.push(hit);
                    }
                }
                sol.t = term.t;
                sol.y = term.y;
                sol.terminated = Some(term.index);
                if self.record {
                    sol.samples.push((term.t, term.y));
                }
                return Ok(sol);
            }
            sol.hits.extend(step_hits);

            t = t1;
            y = y1;
            k1 = k[6];
            if self.record {
                sol.samples.push((t, y));
            }
            if escape(&y) {
                let v = if N > 1 { y[1] } else { y[0] };
                return Err(Error::Escape { t: t.f64(), x: y[0].f64(), v: v.f64() });
            }
            if last {
                break;
            }
            let mut fac = lit(0.9) * en.max(lit(1e-10)).powf(lit(-0.2));
            fac = fac.min(lit(10.0)).max(lit(0.2));
            if reject {
                fac = fac.min(T::one());
            }
            reject = false;
            h = (h * fac).min(self.hmax);
        }
        sol.t = t;
        sol.y = y;
        Ok(sol)
    }
}

/// Illinois false position for g on [a, b] with g(a)=ga, g(b)=gb of opposite sign.
fn locate<T: Real>(g: impl Fn(T) -> T, a: T, b: T, ga: T, gb: T) -> T {
    let (mut a, mut b, mut ga, mut gb) = (a, b, ga, gb);
    if gb == T::zero() {
        return b;
    }
    let tol = T::lit(1e-13) * (T::one() + a.abs().max(b.abs()));
    let mut side = 0i8;
    for _ in 0..200 {
        if (b - a).abs() <= tol {
            break;
        }
        let mut c = (a * gb - b * ga) / (gb - ga);
        if !(c.is_finite()) || (c - a) * (c - b) > T::zero() {
            c = T::lit(0.5) * (a + b);
        }
        let gc = g(c);
        if gc == T::zero() {
            return c;
        }
        if (gc > T::zero()) == (gb > T::zero()) {
            b = c;
            gb = gc;
            if side == 1 {
                ga = ga * T::lit(0.5);
            }
            side = 1;
        } else {
            a = c;
            ga = gc;
            if side == -1 {
                gb = gb * T::lit(0.5);
            }
            side = -1;
        }
    }
    // return the endpoint on the far side of the crossing so callers see the new sign
    b
}

/// Classic fixed-step RK4, used as an independent oracle in tests.
pub fn rk4<T: Real, const N: usize>(
    mut f: impl FnMut(T, &[T; N]) -> [T; N],
    t0: T,
    y0: [T; N],
    t_end: T,
    dt: T,
) -> [T; N] {
    let n = ((t_end - t0).abs() / dt).ceil().to_usize().unwrap().max(1);
    let h = (t_end - t0) / T::from_usize(n).unwrap();
    let mut y = y0;
    let mut t = t0;
    let two = T::lit(2.0);
    let six = T::lit(6.0);
    for _ in 0..n {
        let add = |y: &[T; N], k: &[T; N], s: T| {
            let mut o = *y;
            for i in 0..N {
                o[i] = y[i] + s * k[i];
            }
            o
        };
        let k1 = f(t, &y);
        let k2 = f(t + h / two, &add(&y, &k1, h / two));
        let k3 = f(t + h / two, &add(&y, &k2, h / two));
        let k4 = f(t + h, &add(&y, &k3, h));
        for i in 0..N {
            y[i] = y[i] + h / six * (k1[i] + two * k2[i] + two * k3[i] + k4[i]);
        }
        t = t + h;
    }
    y
}
