//! Smooth planar fields, alpha-families and their jets.

use crate::error::{Error, Result};
use crate::poly::{Poly, Var};
use crate::scalar::{Coef, Real};
use serde::{Deserialize, Serialize};

/// The partial derivatives the formulas of this crate use. Nothing else is exposed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Partial {
    C1,
    C2,
    C1x,
    C1y,
    C1xx,
    C2x,
    C2y,
    C2xx,
    C2xy,
    C2yy,
}

impl Partial {
    pub const ALL: [Partial; 10] = [
        Partial::C1,
        Partial::C2,
        Partial::C1x,
        Partial::C1y,
        Partial::C1xx,
        Partial::C2x,
        Partial::C2y,
        Partial::C2xx,
        Partial::C2xy,
        Partial::C2yy,
    ];

    fn component(self) -> usize {
        match self {
            Partial::C1 | Partial::C1x | Partial::C1y | Partial::C1xx => 0,
            _ => 1,
        }
    }

    fn vars(self) -> &'static [Var] {
        match self {
            Partial::C1 | Partial::C2 => &[],
            Partial::C1x | Partial::C2x => &[Var::X],
            Partial::C1y | Partial::C2y => &[Var::Y],
            Partial::C1xx | Partial::C2xx => &[Var::X, Var::X],
            Partial::C2xy => &[Var::X, Var::Y],
            Partial::C2yy => &[Var::Y, Var::Y],
        }
    }
}

pub trait PlanarField<T: Real> {
    fn eval(&self, x: T, y: T) -> (T, T);

    /// Closed-form partial, when the field knows it.
    fn closed_jet(&self, _which: Partial, _x: T, _y: T) -> Option<T> {
        None
    }
}

/// Partial derivative at `p`: closed form when available, finite differences otherwise.
pub fn eval_jet<T: Real, F: PlanarField<T> + ?Sized>(field: &F, p: (T, T), which: Partial) -> Result<T> {
    let v = match field.closed_jet(which, p.0, p.1) {
        Some(v) => v,
        None => finite_difference(field, p, which),
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Numerical(format!("non-finite {which:?} at ({}, {})", p.0, p.1)))
    }
}

fn finite_difference<T: Real, F: PlanarField<T> + ?Sized>(field: &F, p: (T, T), which: Partial) -> T {
    let c = which.component();
    let g = |x: T, y: T| {
        let v = field.eval(x, y);
        if c == 0 {
            v.0
        } else {
            v.1
        }
    };
    let (x, y) = p;
    let one = T::one();
    let two = T::lit(2.0);
    let eps = T::epsilon();
    let step = |coord: T, power: f64| one.max(coord.abs()) * eps.powf(T::lit(power));
    match which.vars() {
        [] => g(x, y),
        [Var::X] => {
            let h = step(x, 1.0 / 3.0);
            (g(x + h, y) - g(x - h, y)) / (two * h)
        }
        [Var::Y] => {
            let h = step(y, 1.0 / 3.0);
            (g(x, y + h) - g(x, y - h)) / (two * h)
        }
        [Var::X, Var::X] => {
            let h = step(x, 1.0 / 6.0);
            five_point(|s| g(x + s, y), h)
        }
        [Var::Y, Var::Y] => {
            let h = step(y, 1.0 / 6.0);
            five_point(|s| g(x, y + s), h)
        }
        _ => {
            let hx = step(x, 0.25);
            let hy = step(y, 0.25);
            (g(x + hx, y + hy) - g(x + hx, y - hy) - g(x - hx, y + hy) + g(x - hx, y - hy))
                / (T::lit(4.0) * hx * hy)
        }
    }
}

fn five_point<T: Real>(g: impl Fn(T) -> T, h: T) -> T {
    let two = T::lit(2.0);
    (-g(two * h) + T::lit(16.0) * g(h) - T::lit(30.0) * g(T::zero()) + T::lit(16.0) * g(-h) - g(-two * h))
        / (T::lit(12.0) * h * h)
}

/// Field given by two polynomials in (x, y).
#[derive(Clone, Debug, PartialEq)]
pub struct PolyField<T> {
    pub c1: Poly<T>,
    pub c2: Poly<T>,
}

impl<T: Coef> PolyField<T> {
    pub fn new(c1: Poly<T>, c2: Poly<T>) -> Self {
        PolyField { c1, c2 }
    }

    /// Exact partial (works for any coefficient type).
    pub fn partial(&self, which: Partial, x: &T, y: &T) -> T {
        let mut p = if which.component() == 0 { self.c1.clone() } else { self.c2.clone() };
        for v in which.vars() {
            p = p.derive(*v);
        }
        p.eval(x, y, &T::zero())
    }
}

impl<T: Real> PlanarField<T> for PolyField<T> {
    fn eval(&self, x: T, y: T) -> (T, T) {
        let z = T::zero();
        (self.c1.eval(&x, &y, &z), self.c2.eval(&x, &y, &z))
    }

    fn closed_jet(&self, which: Partial, x: T, y: T) -> Option<T> {
        Some(self.partial(which, &x, &y))
    }
}

/// Field given by a closure; partials come from finite differences.
pub struct FnField<F>(pub F);

impl<T: Real, F: Fn(T, T) -> (T, T)> PlanarField<T> for FnField<F> {
    fn eval(&self, x: T, y: T) -> (T, T) {
        (self.0)(x, y)
    }
}

/// Which second component an alpha-derivative refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    X,
    Y,
}

/// Filippov pair (X^a, Y^a) with polynomial components in (x, y, a).
/// X acts on y > 0 and Y on y < 0.
#[derive(Clone, Debug, PartialEq)]
pub struct Family<T> {
    pub x: [Poly<T>; 2],
    pub y: [Poly<T>; 2],
}

impl<T: Coef> Family<T> {
    pub fn new(x: [Poly<T>; 2], y: [Poly<T>; 2]) -> Self {
        Family { x, y }
    }

    pub fn x_at(&self, a: &T) -> PolyField<T> {
        PolyField::new(self.x[0].at_alpha(a), self.x[1].at_alpha(a))
    }

    pub fn y_at(&self, a: &T) -> PolyField<T> {
        PolyField::new(self.y[0].at_alpha(a), self.y[1].at_alpha(a))
    }

    /// d/da of X^a at a = 0.
    pub fn x_tilde(&self) -> PolyField<T> {
        let z = T::zero();
        PolyField::new(self.x[0].derive(Var::A).at_alpha(&z), self.x[1].derive(Var::A).at_alpha(&z))
    }

    pub fn y_tilde(&self) -> PolyField<T> {
        let z = T::zero();
        PolyField::new(self.y[0].derive(Var::A).at_alpha(&z), self.y[1].derive(Var::A).at_alpha(&z))
    }

    /// Second component of the alpha-derivative field at `p`.
    pub fn alpha_derivative(&self, side: Side, p: (&T, &T)) -> T {
        let f = match side {
            Side::X => self.x_tilde(),
            Side::Y => self.y_tilde(),
        };
        f.partial(Partial::C2, p.0, p.1)
    }

    /// The family seen through x -> -x. Components transform as (-c1, c2).
    pub fn reflected(&self) -> Self {
        let r = |p: &[Poly<T>; 2]| [p[0].reflect_x().scale(&-T::one()), p[1].reflect_x()];
        Family { x: r(&self.x), y: r(&self.y) }
    }

    /// Reflect when needed so that X^1(0) > 0; the flag says whether a reflection happened.
    pub fn oriented(&self) -> (Self, bool) {
        let z = T::zero();
        if self.x[0].eval(&z, &z, &z) < z {
            (self.reflected(), true)
        } else {
            (self.clone(), false)
        }
    }

    pub fn map<U: Coef>(&self, f: impl Fn(&T) -> U + Copy) -> Family<U> {
        Family {
            x: [self.x[0].map(f), self.x[1].map(f)],
            y: [self.y[0].map(f), self.y[1].map(f)],
        }
    }

    /// Every quantity at the origin the closed-form formulas need.
    pub fn origin_jet(&self) -> OriginJet<T> {
        let z = T::zero();
        let side = |f: PolyField<T>, t: PolyField<T>| SideJet {
            c1: f.partial(Partial::C1, &z, &z),
            c2: f.partial(Partial::C2, &z, &z),
            c1_x: f.partial(Partial::C1x, &z, &z),
            c1_y: f.partial(Partial::C1y, &z, &z),
            c1_xx: f.partial(Partial::C1xx, &z, &z),
            c2_x: f.partial(Partial::C2x, &z, &z),
            c2_y: f.partial(Partial::C2y, &z, &z),
            c2_xx: f.partial(Partial::C2xx, &z, &z),
            c2_xy: f.partial(Partial::C2xy, &z, &z),
            c2_yy: f.partial(Partial::C2yy, &z, &z),
            c2_a: t.partial(Partial::C2, &z, &z),
        };
        OriginJet { x: side(self.x_at(&z), self.x_tilde()), y: side(self.y_at(&z), self.y_tilde()) }
    }
}

/// Central difference in alpha of the second component, for families given as closures.
pub fn alpha_derivative_fd<T: Real, F: PlanarField<T>>(field_at: impl Fn(T) -> F, p: (T, T)) -> Result<T> {
    let h = T::lit(1e-5);
    let up = field_at(h).eval(p.0, p.1).1;
    let dn = field_at(-h).eval(p.0, p.1).1;
    let d = (up - dn) / (T::lit(2.0) * h);
    if d.is_finite() {
        Ok(d)
    } else {
        Err(Error::Numerical("non-finite alpha derivative".into()))
    }
}

/// Values of one side's field and derivatives at the origin (alpha = 0).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SideJet<T> {
    pub c1: T,
    pub c2: T,
    pub c1_x: T,
    pub c1_y: T,
    pub c1_xx: T,
    pub c2_x: T,
    pub c2_y: T,
    pub c2_xx: T,
    pub c2_xy: T,
    pub c2_yy: T,
    /// second component of the alpha-derivative field
    pub c2_a: T,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OriginJet<T> {
    pub x: SideJet<T>,
    pub y: SideJet<T>,
}

impl<T: Coef> OriginJet<T> {
    /// (det Z)_x(0) = (X^1 Y^2_x - Y^1 X^2_x)(0)
    pub fn det_x(&self) -> T {
        self.x.c1.clone() * self.y.c2_x.clone() - self.y.c1.clone() * self.x.c2_x.clone()
    }

    pub fn det_y(&self) -> T {
        self.x.c1.clone() * self.y.c2_y.clone() - self.y.c1.clone() * self.x.c2_y.clone()
    }

    pub fn det_xx(&self) -> T {
        let two = T::one() + T::one();
        let (x, y) = (&self.x, &self.y);
        two.clone() * x.c1_x.clone() * y.c2_x.clone() + x.c1.clone() * y.c2_xx.clone()
            - two * x.c2_x.clone() * y.c1_x.clone()
            - x.c2_xx.clone() * y.c1.clone()
    }

    /// Sum and difference X +/- Y of a quantity.
    pub fn sd(&self, f: impl Fn(&SideJet<T>) -> T) -> (T, T) {
        let a = f(&self.x);
        let b = f(&self.y);
        (a.clone() + b.clone(), a - b)
    }
}
