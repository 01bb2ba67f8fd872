//! Sigma-regions, sliding dynamics, fold diagnosis and the unfolding of a fold-fold.

use crate::error::{Error, Result};
use crate::fields::{eval_jet, Family, Partial, PlanarField, PolyField};
use crate::ode::{Dopri, Event};
use crate::roots;
use crate::scalar::{sign, Coef, Real};
use serde::Serialize;

pub const TANGENCY_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SigmaRegion {
    Crossing,
    Sliding,
    Escaping,
    TangencyX,
    TangencyY,
    FoldFold,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Visibility {
    Visible,
    Invisible,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PseudoKind {
    PseudoNode,
    PseudoSaddle,
}

/// A Filippov pair: X above Sigma = {y = 0}, Y below.
#[derive(Clone, Copy)]
pub struct Filippov<'a, T> {
    pub x: &'a dyn PlanarField<T>,
    pub y: &'a dyn PlanarField<T>,
}

impl<'a, T: Real> Filippov<'a, T> {
    pub fn new(x: &'a dyn PlanarField<T>, y: &'a dyn PlanarField<T>) -> Self {
        Filippov { x, y }
    }

    fn seconds(&self, x: T) -> (T, T) {
        (self.x.eval(x, T::zero()).1, self.y.eval(x, T::zero()).1)
    }

    /// det Z = X^1 Y^2 - X^2 Y^1 on Sigma.
    pub fn det(&self, x: T) -> T {
        let a = self.x.eval(x, T::zero());
        let b = self.y.eval(x, T::zero());
        a.0 * b.1 - a.1 * b.0
    }

    pub fn det_x(&self, x: T) -> Result<T> {
        let p = (x, T::zero());
        let (a, b) = (self.x.eval(x, T::zero()), self.y.eval(x, T::zero()));
        let ax = (eval_jet(self.x, p, Partial::C1x)?, eval_jet(self.x, p, Partial::C2x)?);
        let bx = (eval_jet(self.y, p, Partial::C1x)?, eval_jet(self.y, p, Partial::C2x)?);
        Ok(ax.0 * b.1 + a.0 * bx.1 - ax.1 * b.0 - a.1 * bx.0)
    }

    pub fn classify_sigma(&self, x: T) -> SigmaRegion {
        let tol = T::lit(TANGENCY_TOL);
        let (a, b) = self.seconds(x);
        let ta = a.abs() <= tol;
        let tb = b.abs() <= tol;
        match (ta, tb) {
            (true, true) => SigmaRegion::FoldFold,
            (true, false) => SigmaRegion::TangencyX,
            (false, true) => SigmaRegion::TangencyY,
            _ if a * b > tol * tol => SigmaRegion::Crossing,
            _ if a < T::zero() => SigmaRegion::Sliding,
            _ => SigmaRegion::Escaping,
        }
    }

    /// Z^s(x); at a fold-fold the L'Hopital limit gamma.
    pub fn sliding_value(&self, x: T) -> Result<T> {
        let (a, b) = self.seconds(x);
        match self.classify_sigma(x) {
            SigmaRegion::Crossing => Err(Error::Domain(format!("x = {x} lies in the crossing region"))),
            SigmaRegion::FoldFold => {
                let p = (x, T::zero());
                let den = eval_jet(self.y, p, Partial::C2x)? - eval_jet(self.x, p, Partial::C2x)?;
                if den == T::zero() {
                    return Err(Error::Degenerate("no sliding region at the fold-fold".into()));
                }
                Ok(self.det_x(x)? / den)
            }
            _ => {
                let (xa, ya) = (self.x.eval(x, T::zero()).0, self.y.eval(x, T::zero()).0);
                Ok((b * xa - a * ya) / (b - a))
            }
        }
    }

    /// (Z^s)'(x_p) at a pseudo-equilibrium, with its type.
    pub fn sliding_slope(&self, xp: T) -> Result<(T, PseudoKind)> {
        if self.det(xp).abs() > T::lit(TANGENCY_TOL) {
            return Err(Error::Domain(format!("x = {xp} is not a pseudo-equilibrium")));
        }
        let (a, b) = self.seconds(xp);
        if b == a {
            return Err(Error::Degenerate("Y^2 = X^2 at the pseudo-equilibrium".into()));
        }
        let region = self.classify_sigma(xp);
        let slope = self.det_x(xp)? / (b - a);
        let kind = match region {
            SigmaRegion::Sliding if slope < T::zero() => PseudoKind::PseudoNode,
            SigmaRegion::Sliding => PseudoKind::PseudoSaddle,
            SigmaRegion::Escaping if slope > T::zero() => PseudoKind::PseudoNode,
            SigmaRegion::Escaping => PseudoKind::PseudoSaddle,
            _ => return Err(Error::Domain(format!("x = {xp} is not in a sliding or escaping region"))),
        };
        Ok((slope, kind))
    }

    /// Root of det Z(., 0) in [a, b].
    pub fn pseudo_equilibrium(&self, a: T, b: T) -> Result<T> {
        roots::bisect(|x| self.det(x), a, b, T::tol(1e-15))
    }
}

/// Fold coefficient (1/3)[-c2_xx/c2_x + 2 c1_x/c1 + 2 c2_y/c1] at p0.
pub fn beta_coefficient<T: Real>(field: &dyn PlanarField<T>, p0: (T, T)) -> Result<T> {
    let (c1, c2) = field.eval(p0.0, p0.1);
    let c2x = eval_jet(field, p0, Partial::C2x)?;
    if c2.abs() > T::lit(TANGENCY_TOL) || c1 == T::zero() || c2x == T::zero() {
        return Err(Error::Domain(format!("({}, {}) is not a fold", p0.0, p0.1)));
    }
    let c1x = eval_jet(field, p0, Partial::C1x)?;
    let c2y = eval_jet(field, p0, Partial::C2y)?;
    let c2xx = eval_jet(field, p0, Partial::C2xx)?;
    let two = T::lit(2.0);
    Ok((-c2xx / c2x + two * c1x / c1 + two * c2y / c1) / T::lit(3.0))
}

/// Land point of the orbit through (x0, h) on its next crossing of y = h.
pub fn half_return_numeric<T: Real>(field: &dyn PlanarField<T>, x0: T, h: T) -> Result<T> {
    let budget = T::lit(50.0);
    let box_ = T::lit(10.0);
    let rhs = |_: T, s: &[T; 2]| {
        let (a, b) = field.eval(s[0], s[1]);
        [a, b]
    };
    let ev = [Event::new(move |_, s: &[T; 2]| s[1] - h, 0, true)];
    let solver = Dopri::default().with_tol(1e-12, 1e-14).with_hmax(T::lit(0.05));
    for dir in [T::one(), -T::one()] {
        let out = solver.solve(rhs, T::zero(), [x0, h], dir * budget, &ev, |s| s[0].abs() > box_ || s[1].abs() > box_);
        if let Ok(sol) = out {
            if sol.terminated.is_some() {
                return Ok(sol.y[0]);
            }
        }
    }
    Err(Error::NoReturn(format!("no return to y = {h} from x = {x0}")))
}

/// Least-squares estimate of beta from numeric half returns around the fold x_f: a quartic
/// in the offset s fitted to (landing + s)/s^2, read off at s = 0.
pub fn beta_fit<T: Real>(field: &dyn PlanarField<T>, x_f: T) -> Result<T> {
    let offsets = [-0.04, -0.02, -0.01, 0.01, 0.02, 0.04];
    let mut ata = [[0.0f64; 5]; 5];
    let mut atb = [0.0f64; 5];
    for s in offsets {
        let land = half_return_numeric(field, x_f + T::lit(s), T::zero())?.f64() - x_f.f64();
        let yv = (land + s) / (s * s);
        let row: [f64; 5] = std::array::from_fn(|k| s.powi(k as i32));
        for i in 0..5 {
            for j in 0..5 {
                ata[i][j] += row[i] * row[j];
            }
            atb[i] += row[i] * yv;
        }
    }
    Ok(T::lit(solve(ata, atb)[0]))
}

fn solve<const N: usize>(mut a: [[f64; N]; N], mut b: [f64; N]) -> [f64; N] {
    for k in 0..N {
        let p = (k..N).max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs())).unwrap();
        a.swap(k, p);
        b.swap(k, p);
        for i in k + 1..N {
            let m = a[i][k] / a[k][k];
            for j in k..N {
                a[i][j] -= m * a[k][j];
            }
            b[i] -= m * b[k];
        }
    }
    let mut x = [0.0; N];
    for k in (0..N).rev() {
        let s: f64 = (k + 1..N).map(|j| a[k][j] * x[j]).sum();
        x[k] = (b[k] - s) / a[k][k];
    }
    x
}

/// Classification record of a fold-fold at the origin (alpha = 0).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FoldFoldDiagnosis<T> {
    pub case: char,
    pub vis_x: Visibility,
    pub vis_y: Visibility,
    pub sign_x1y1: i8,
    #[serde(rename = "detZx0")]
    pub det_zx0: T,
    pub gamma: Option<T>,
    #[serde(rename = "muZ")]
    pub mu_z: Option<T>,
    pub beta_x: T,
    pub beta_y: T,
    pub versal_margin: T,
    pub versal: bool,
    /// x was reflected to reach X^1(0) > 0
    pub reflected: bool,
}

fn visibility_x<T: Coef>(c1: &T, c2x: &T) -> Visibility {
    if sign(&(c2x.clone() * c1.clone())) > 0 {
        Visibility::Visible
    } else {
        Visibility::Invisible
    }
}

fn visibility_y<T: Coef>(c1: &T, c2x: &T) -> Visibility {
    if sign(&(c2x.clone() * c1.clone())) < 0 {
        Visibility::Visible
    } else {
        Visibility::Invisible
    }
}

fn beta_of<T: Coef>(s: &crate::fields::SideJet<T>) -> T {
    let two = T::one() + T::one();
    let three = two.clone() + T::one();
    (-s.c2_xx.clone() / s.c2_x.clone() + two.clone() * s.c1_x.clone() / s.c1.clone() + two * s.c2_y.clone() / s.c1.clone())
        / three
}

/// Ytilde^2/Y^2_x - Xtilde^2/X^2_x at the origin.
pub fn check_versal<T: Coef>(family: &Family<T>) -> T {
    let j = family.origin_jet();
    j.y.c2_a.clone() / j.y.c2_x.clone() - j.x.c2_a.clone() / j.x.c2_x.clone()
}

fn require_fold_fold<T: Real>(family: &Family<T>) -> Result<()> {
    let j = family.origin_jet();
    let tol = T::lit(TANGENCY_TOL);
    if j.x.c2.abs() > tol || j.y.c2.abs() > tol {
        return Err(Error::Domain("the origin is not a fold-fold point".into()));
    }
    if j.x.c1 == T::zero() || j.y.c1 == T::zero() || j.x.c2_x == T::zero() || j.y.c2_x == T::zero() {
        return Err(Error::Degenerate("a fold at the origin is degenerate".into()));
    }
    Ok(())
}

pub fn diagnose<T: Real>(family: &Family<T>) -> Result<FoldFoldDiagnosis<T>> {
    require_fold_fold(family)?;
    let (fam, reflected) = family.oriented();
    let j = fam.origin_jet();
    let vis_x = visibility_x(&j.x.c1, &j.x.c2_x);
    let vis_y = visibility_y(&j.y.c1, &j.y.c2_x);
    let det_zx0 = j.det_x();
    let gamma = if j.x.c2_x * j.y.c2_x < T::zero() {
        Some(det_zx0 / (j.y.c2_x - j.x.c2_x))
    } else {
        None
    };
    let beta_x = beta_of(&j.x);
    let beta_y = beta_of(&j.y);
    let both_invisible = vis_x == Visibility::Invisible && vis_y == Visibility::Invisible;
    let mu_z = if both_invisible { Some(beta_y - beta_x) } else { None };
    let margin = check_versal(&fam);
    let case = match (vis_x, vis_y) {
        (Visibility::Visible, Visibility::Visible) => 'A',
        (Visibility::Invisible, Visibility::Invisible) => 'B',
        _ => 'C',
    };
    // results are reported in the caller's frame: gamma is a velocity along x
    let back = |v: T| if reflected { -v } else { v };
    Ok(FoldFoldDiagnosis {
        case,
        vis_x,
        vis_y,
        sign_x1y1: sign(&(j.x.c1 * j.y.c1)),
        det_zx0,
        gamma: gamma.map(back),
        mu_z,
        beta_x: back(beta_x),
        beta_y: back(beta_y),
        versal_margin: margin,
        versal: margin.abs() > T::lit(1e-10),
        reflected,
    })
}

/// beta_Y - beta_X in the X^1(0) > 0 frame.
pub fn mu_z<T: Real>(family: &Family<T>) -> Result<T> {
    let d = diagnose(family)?;
    d.mu_z.ok_or_else(|| Error::Domain("mu_Z needs an invisible-invisible fold-fold".into()))
}

/// Roots (T_X, T_Y) of X^{a,2}(., 0) and Y^{a,2}(., 0) near the origin.
pub fn unfolding_tangencies<T: Real>(family: &Family<T>, alpha: T) -> Result<(T, T)> {
    require_fold_fold(family)?;
    let j = family.origin_jet();
    let seed_x = -j.x.c2_a / j.x.c2_x * alpha;
    let seed_y = -j.y.c2_a / j.y.c2_x * alpha;
    let fx = family.x_at(&alpha);
    let fy = family.y_at(&alpha);
    let root = |f: &PolyField<T>, seed: T| {
        roots::newton(
            |x| (f.partial(Partial::C2, &x, &T::zero()), f.partial(Partial::C2x, &x, &T::zero())),
            seed,
            T::tol(1e-15),
            60,
        )
    };
    Ok((root(&fx, seed_x)?, root(&fy, seed_y)?))
}

/// Fixed point F(alpha) of the nonsmooth return map phi_Y o phi_X, or None on the
/// side of alpha where no crossing cycle exists.
pub fn unfolding_return_fixed_point<T: Real>(family: &Family<T>, alpha: T) -> Result<Option<T>> {
    let mu = mu_z(family)?;
    let (fam, reflected) = family.oriented();
    let (tx, ty) = unfolding_tangencies(&fam, alpha)?;
    let gap = tx - ty;
    if gap * mu <= T::zero() {
        return Ok(None);
    }
    let lead = -(T::lit(2.0) * gap / mu).sqrt();
    let xf = fam.x_at(&alpha);
    let yf = fam.y_at(&alpha);
    let phi = |x0: T| -> T {
        half_return_numeric(&xf, x0, T::zero())
            .and_then(|x1| half_return_numeric(&yf, x1, T::zero()))
            .map(|x2| x2 - x0)
            .unwrap_or(T::nan())
    };
    let grid: Vec<T> = (0..=40).map(|i| lead * (T::lit(3.0) - T::lit(2.7 * i as f64 / 40.0))).collect();
    let found = roots::all_roots(phi, &grid, T::tol(1e-13));
    let best = found
        .into_iter()
        .min_by(|a, b| (*a - lead).abs().partial_cmp(&(*b - lead).abs()).unwrap_or(std::cmp::Ordering::Equal));
    match best {
        Some(x) => Ok(Some(if reflected { -x } else { x })),
        None => Err(Error::Numerical("could not bracket the return-map fixed point".into())),
    }
}
