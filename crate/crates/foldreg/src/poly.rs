//! Sparse polynomials in (x, y, a), where `a` is the unfolding parameter.

use crate::error::{Error, Result};
use crate::scalar::Coef;
use std::collections::BTreeMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    X,
    Y,
    A,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Poly<T> {
    // exponents (i, j, k) of x^i y^j a^k -> coefficient; kept sorted and nonzero
    terms: BTreeMap<(u32, u32, u32), T>,
}

impl<T: Coef> Default for Poly<T> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<T: Coef> Poly<T> {
    pub fn zero() -> Self {
        Poly { terms: BTreeMap::new() }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = ((u32, u32, u32), T)>) -> Self {
        let mut p = Self::zero();
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    pub fn add_term(&mut self, e: (u32, u32, u32), c: T) {
        let entry = self.terms.entry(e).or_insert_with(T::zero);
        *entry = entry.clone() + c;
        if entry.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32, u32), &T)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn eval(&self, x: &T, y: &T, a: &T) -> T {
        let mut s = T::zero();
        for (&(i, j, k), c) in &self.terms {
            s = s + c.clone() * pow(x, i) * pow(y, j) * pow(a, k);
        }
        s
    }

    pub fn derive(&self, var: Var) -> Self {
        let mut out = Self::zero();
        for (&(i, j, k), c) in &self.terms {
            let (n, e) = match var {
                Var::X => (i, (i.saturating_sub(1), j, k)),
                Var::Y => (j, (i, j.saturating_sub(1), k)),
                Var::A => (k, (i, j, k.saturating_sub(1))),
            };
            if n > 0 {
                out.add_term(e, c.clone() * T::from_u32(n).unwrap());
            }
        }
        out
    }

    /// Substitute a = value, leaving a polynomial in (x, y).
    pub fn at_alpha(&self, a: &T) -> Self {
        let mut out = Self::zero();
        for (&(i, j, k), c) in &self.terms {
            out.add_term((i, j, 0), c.clone() * pow(a, k));
        }
        out
    }

    /// Reflect x -> -x.
    pub fn reflect_x(&self) -> Self {
        let mut out = Self::zero();
        for (&(i, j, k), c) in &self.terms {
            let c = if i % 2 == 1 { -c.clone() } else { c.clone() };
            out.add_term((i, j, k), c);
        }
        out
    }

    pub fn scale(&self, s: &T) -> Self {
        Self::from_terms(self.terms.iter().map(|(e, c)| (*e, c.clone() * s.clone())))
    }

    pub fn map<U: Coef>(&self, f: impl Fn(&T) -> U) -> Poly<U> {
        Poly::from_terms(self.terms.iter().map(|(e, c)| (*e, f(c))))
    }

    /// Parse a coefficient table keyed by monomials such as "x^2 y a", "1" or "".
    pub fn parse_table<'a>(table: impl IntoIterator<Item = (&'a str, T)>) -> Result<Self> {
        let mut p = Self::zero();
        for (key, c) in table {
            p.add_term(parse_monomial(key)?, c);
        }
        Ok(p)
    }

    pub fn to_table(&self) -> Vec<(String, T)> {
        self.terms
            .iter()
            .map(|(&(i, j, k), c)| (monomial_key(i, j, k), c.clone()))
            .collect()
    }
}

fn pow<T: Coef>(x: &T, n: u32) -> T {
    let mut r = T::one();
    for _ in 0..n {
        r = r * x.clone();
    }
    r
}

pub fn parse_monomial(key: &str) -> Result<(u32, u32, u32)> {
    let mut e = (0u32, 0u32, 0u32);
    for tok in key.split(|c: char| c.is_whitespace() || c == '*').filter(|t| !t.is_empty()) {
        if tok == "1" {
            continue;
        }
        let (base, exp) = match tok.split_once('^') {
            Some((b, n)) => (
                b,
                n.parse::<u32>()
                    .map_err(|_| Error::Usage(format!("bad exponent in monomial '{key}'")))?,
            ),
            None => (tok, 1),
        };
        match base {
            "x" => e.0 += exp,
            "y" => e.1 += exp,
            "a" => e.2 += exp,
            _ => return Err(Error::Usage(format!("unknown variable '{base}' in monomial '{key}'"))),
        }
    }
    Ok(e)
}

pub fn monomial_key(i: u32, j: u32, k: u32) -> String {
    let mut parts = Vec::new();
    for (name, n) in [("x", i), ("y", j), ("a", k)] {
        match n {
            0 => {}
            1 => parts.push(name.to_string()),
            _ => parts.push(format!("{name}^{n}")),
        }
    }
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join(" ")
    }
}
