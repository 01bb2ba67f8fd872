//! Transition functions and the regularized field in (x, y) and (x, v) charts.

use crate::error::{Error, Result};
use crate::fields::{Family, Partial, PolyField};
use crate::roots;
use crate::scalar::{q, Coef, Real};

/// Odd polynomial transition phi on [-1, 1], extended by sign(v) outside.
#[derive(Clone, Debug, PartialEq)]
pub struct Transition<T> {
    label: String,
    // coefficient of v^k
    coeffs: Vec<T>,
}

pub const CATALOG: [&str; 4] = ["linear", "cubic", "quintic", "septic"];

impl<T: Coef> Transition<T> {
    /// Build from the odd coefficients [a1, a3, a5, ...] without validation.
    pub fn from_odd(label: impl Into<String>, odd: &[T]) -> Self {
        let mut coeffs = vec![T::zero(); 2 * odd.len()];
        for (i, a) in odd.iter().enumerate() {
            coeffs[2 * i + 1] = a.clone();
        }
        Transition { label: label.into(), coeffs }
    }

    pub fn catalog(label: &str) -> Result<Self> {
        let odd: Vec<T> = match label {
            "linear" => vec![q(1, 1)],
            "cubic" => vec![q(3, 2), q(-1, 2)],
            "quintic" => vec![q(1, 2), q(3, 2), q(-1, 1)],
            "septic" => vec![q(1, 1), q(-2, 1), q(9, 2), q(-5, 2)],
            "quintic-b" => {
                return Err(Error::Domain(
                    "quintic-b (v^5 + 3v^3/2 + v/2) has phi(1) = 3 and is not a transition function".into(),
                ))
            }
            _ => return Err(Error::Usage(format!("unknown transition function '{label}'"))),
        };
        Ok(Self::from_odd(label, &odd))
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    fn raw(&self, v: &T, order: usize) -> T {
        let mut s = T::zero();
        for k in (order..self.coeffs.len()).rev() {
            let mut c = self.coeffs[k].clone();
            for m in 0..order {
                c = c * T::from_usize(k - m).unwrap();
            }
            s = s * v.clone() + c;
        }
        s
    }

    fn outside(v: &T) -> bool {
        *v > T::one() || *v < -T::one()
    }

    pub fn value(&self, v: &T) -> T {
        if *v > T::one() {
            T::one()
        } else if *v < -T::one() {
            -T::one()
        } else {
            self.raw(v, 0)
        }
    }

    pub fn d1(&self, v: &T) -> T {
        if Self::outside(v) {
            T::zero()
        } else {
            self.raw(v, 1)
        }
    }

    pub fn d2(&self, v: &T) -> T {
        if Self::outside(v) {
            T::zero()
        } else {
            self.raw(v, 2)
        }
    }

    pub fn map<U: Coef>(&self, f: impl Fn(&T) -> U) -> Transition<U> {
        Transition { label: self.label.clone(), coeffs: self.coeffs.iter().map(f).collect() }
    }
}

impl<T: Real> Transition<T> {
    /// Check phi(+-1) = +-1, oddness and d1 > 0 on the interior 1e-3 grid.
    pub fn validate(&self) -> Result<()> {
        let tol = T::tol(1e-12);
        let one = T::one();
        if (self.raw(&one, 0) - one).abs() > tol || (self.raw(&-one, 0) + one).abs() > tol {
            return Err(Error::Domain(format!(
                "transition '{}' has phi(1) = {}, expected 1",
                self.label,
                self.raw(&one, 0)
            )));
        }
        if self.coeffs.iter().step_by(2).any(|c| *c != T::zero()) {
            return Err(Error::Domain(format!("transition '{}' is not odd", self.label)));
        }
        for i in 1..2000 {
            let v = T::lit(-1.0 + i as f64 * 1e-3);
            if self.raw(&v, 1) <= T::zero() {
                return Err(Error::Domain(format!("transition '{}' is not increasing at v = {v}", self.label)));
            }
        }
        Ok(())
    }

    /// Odd polynomial supplied by its odd coefficients, validated.
    pub fn from_odd_checked(label: impl Into<String>, odd: &[T]) -> Result<Self> {
        let t = Self::from_odd(label, odd);
        t.validate()?;
        Ok(t)
    }

    /// phi^{-1}(y) on [-1, 1]; y = 0 maps to 0 exactly.
    pub fn inverse(&self, y: T) -> Result<T> {
        if y == T::zero() {
            return Ok(T::zero());
        }
        if y.abs() >= T::one() {
            return Err(Error::Domain(format!("phi^-1({y}) is outside (-1, 1)")));
        }
        roots::bisect(|v| self.value(&v) - y, -T::one(), T::one(), T::zero())
    }
}

/// Sotomayor-Teixeira regularization Z^a_eps of a family at fixed (alpha, eps).
#[derive(Clone, Debug)]
pub struct Regularized<T> {
    pub family: Family<T>,
    pub phi: Transition<T>,
    pub alpha: T,
    pub eps: T,
    x: PolyField<T>,
    y: PolyField<T>,
    xt: PolyField<T>,
    yt: PolyField<T>,
}

/// Values of F and its first partials at a point of the slow chart.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FJet<T> {
    pub f: (T, T),
    /// [[F1_x, F1_v], [F2_x, F2_v]]
    pub jac: [[T; 2]; 2],
}

impl<T: Real> Regularized<T> {
    pub fn new(family: Family<T>, phi: Transition<T>, alpha: T, eps: T) -> Result<Self> {
        if !(eps > T::zero()) {
            return Err(Error::Domain(format!("epsilon must be positive, got {eps}")));
        }
        let x = family.x_at(&alpha);
        let y = family.y_at(&alpha);
        let xt = family.x_tilde();
        let yt = family.y_tilde();
        Ok(Regularized { family, phi, alpha, eps, x, y, xt, yt })
    }

    pub fn with_params(&self, alpha: T, eps: T) -> Result<Self> {
        Self::new(self.family.clone(), self.phi.clone(), alpha, eps)
    }

    pub fn x_field(&self) -> &PolyField<T> {
        &self.x
    }

    pub fn y_field(&self) -> &PolyField<T> {
        &self.y
    }

    fn comp(f: &PolyField<T>, which: Partial, x: T, y: T) -> T {
        f.partial(which, &x, &y)
    }

    /// G^i = (X^i + Y^i) + phi(y/eps)(X^i - Y^i).
    pub fn g(&self, x: T, y: T) -> (T, T) {
        let p = self.phi.value(&(y / self.eps));
        let a = crate::fields::PlanarField::eval(&self.x, x, y);
        let b = crate::fields::PlanarField::eval(&self.y, x, y);
        (a.0 + b.0 + p * (a.0 - b.0), a.1 + b.1 + p * (a.1 - b.1))
    }

    /// F(x, v) = G(x, eps v).
    pub fn f(&self, x: T, v: T) -> (T, T) {
        self.g(x, self.eps * v)
    }

    pub fn f_jet(&self, x: T, v: T) -> FJet<T> {
        let y = self.eps * v;
        let (p, dp) = (self.phi.value(&v), self.phi.d1(&v));
        let e = self.eps;
        let part = |which: Partial| (Self::comp(&self.x, which, x, y), Self::comp(&self.y, which, x, y));
        let mut f = [T::zero(); 2];
        let mut jac = [[T::zero(); 2]; 2];
        for (i, (c, cx, cy)) in [
            (Partial::C1, Partial::C1x, Partial::C1y),
            (Partial::C2, Partial::C2x, Partial::C2y),
        ]
        .into_iter()
        .enumerate()
        {
            let (a, b) = part(c);
            let (ax, bx) = part(cx);
            let (ay, by) = part(cy);
            f[i] = a + b + p * (a - b);
            jac[i][0] = ax + bx + p * (ax - bx);
            jac[i][1] = e * (ay + by) + dp * (a - b) + e * p * (ay - by);
        }
        FJet { f: (f[0], f[1]), jac }
    }

    /// Fast-time vector field (x', v') = (eps F^1, F^2).
    pub fn fast(&self, x: T, v: T) -> [T; 2] {
        let (a, b) = self.f(x, v);
        [self.eps * a, b]
    }

    /// Divergence of the fast-time field.
    pub fn divergence_fast(&self, x: T, v: T) -> T {
        let j = self.f_jet(x, v).jac;
        self.eps * j[0][0] + j[1][1]
    }

    /// dF^2/d eps and dF^2/d alpha at (x, v; alpha, 0), using this system's alpha.
    pub fn f2_eps_alpha(&self, x: T, v: T) -> (T, T) {
        let z = T::zero();
        let p = self.phi.value(&v);
        let (ay, by) = (Self::comp(&self.x, Partial::C2y, x, z), Self::comp(&self.y, Partial::C2y, x, z));
        let (at, bt) = (Self::comp(&self.xt, Partial::C2, x, z), Self::comp(&self.yt, Partial::C2, x, z));
        (v * (ay + by + p * (ay - by)), at + bt + p * (at - bt))
    }

    /// Roots of X^{a,2}(x, eps) and Y^{a,2}(x, -eps) near the origin.
    pub fn tangency_eps(&self) -> Result<(T, T)> {
        let j = self.family.origin_jet();
        let (a, e) = (self.alpha, self.eps);
        let seed_x = -(j.x.c2_a * a + j.x.c2_y * e) / j.x.c2_x;
        let seed_y = -(j.y.c2_a * a - j.y.c2_y * e) / j.y.c2_x;
        let root = |f: &PolyField<T>, y: T, seed: T| {
            roots::newton(
                |x| (f.partial(Partial::C2, &x, &y), f.partial(Partial::C2x, &x, &y)),
                seed,
                T::tol(1e-15),
                60,
            )
        };
        Ok((root(&self.x, e, seed_x)?, root(&self.y, -e, seed_y)?))
    }
}
