//! Built-in scenarios and the JSON scenario format.

use crate::error::{Error, Result};
use crate::fields::Family;
use crate::filippov;
use crate::poly::Poly;
use crate::regularize::Transition;
use crate::scalar::{q, Coef, Real};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

pub const BUILTIN: [&str; 4] = ["ii-basic", "vi-basic", "bfield", "ex1"];

fn poly<T: Coef>(terms: &[(&str, T)]) -> Poly<T> {
    Poly::parse_table(terms.iter().map(|(k, c)| (*k, c.clone()))).expect("built-in monomials parse")
}

/// X = (1 - 2x, -x + a), Y = (-1, -x): invisible-invisible.
pub fn ii_basic<T: Coef>() -> Family<T> {
    Family::new(
        [poly(&[("1", q(1, 1)), ("x", q(-2, 1))]), poly(&[("x", q(-1, 1)), ("a", q(1, 1))])],
        [poly(&[("1", q(-1, 1))]), poly(&[("x", q(-1, 1))])],
    )
}

/// X = (1 + 2x, x + 7y/2 - a), Y = (-1, -3x): visible-invisible.
pub fn vi_basic<T: Coef>() -> Family<T> {
    Family::new(
        [poly(&[("1", q(1, 1)), ("x", q(2, 1))]), poly(&[("x", q(1, 1)), ("y", q(7, 2)), ("a", q(-1, 1))])],
        [poly(&[("1", q(-1, 1))]), poly(&[("x", q(-3, 1))])],
    )
}

/// X = (1 + x/5, -a + x(8x^2 + 3x + 1) - 4y), Y = (-1, -x(8x^2 + 3x + 3)).
pub fn bfield<T: Coef>() -> Family<T> {
    Family::new(
        [
            poly(&[("1", q(1, 1)), ("x", q(1, 5))]),
            poly(&[("a", q(-1, 1)), ("x^3", q(8, 1)), ("x^2", q(3, 1)), ("x", q(1, 1)), ("y", q(-4, 1))]),
        ],
        [poly(&[("1", q(-1, 1))]), poly(&[("x^3", q(-8, 1)), ("x^2", q(-3, 1)), ("x", q(-3, 1))])],
    )
}

/// X = (-1 + eta x, x), Y = (1, 2x + x^2); alpha does not enter.
pub fn ex1<T: Coef>(eta: T) -> Family<T> {
    Family::new(
        [poly(&[("1", q(-1, 1)), ("x", eta)]), poly(&[("x", q(1, 1))])],
        [poly(&[("1", q(1, 1))]), poly(&[("x", q(2, 1)), ("x^2", q(1, 1))])],
    )
}

/// A registered scenario: family, default transition and its published reference values.
#[derive(Clone, Debug)]
pub struct Scenario<T> {
    pub id: String,
    pub family: Family<T>,
    pub phi: String,
    pub reference: BTreeMap<String, f64>,
}

impl<T: Real> Scenario<T> {
    pub fn builtin(id: &str) -> Result<Self> {
        let (family, phi) = match id {
            "ii-basic" => (ii_basic(), "cubic"),
            "vi-basic" => (vi_basic(), "cubic"),
            "bfield" => (bfield(), "septic"),
            "ex1" => (ex1(T::lit(0.5)), "cubic"),
            _ => {
                if let Some(eta) = id.strip_prefix("ex1:") {
                    let eta: f64 = eta.parse().map_err(|_| Error::Usage(format!("bad eta in '{id}'")))?;
                    (ex1(T::lit(eta)), "cubic")
                } else {
                    return Err(Error::Usage(format!("unknown scenario '{id}' (known: {})", BUILTIN.join(", "))));
                }
            }
        };
        let s = Scenario { id: id.to_string(), family, phi: phi.to_string(), reference: BTreeMap::new() };
        s.check()?;
        Ok(s)
    }

    /// Load-time invariant: the family must have a fold-fold at the origin.
    pub fn check(&self) -> Result<()> {
        filippov::diagnose(&self.family).map(|_| ())
    }

    pub fn transition(&self, label: Option<&str>) -> Result<Transition<T>> {
        transition_from_label(label.unwrap_or(&self.phi))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let parsed: ScenarioJson = serde_json::from_str(text).map_err(|e| Error::Usage(format!("scenario JSON: {e}")))?;
        let table = |t: &BTreeMap<String, f64>| Poly::parse_table(t.iter().map(|(k, c)| (k.as_str(), T::lit(*c))));
        let family = Family::new(
            [table(&parsed.x.c1)?, table(&parsed.x.c2)?],
            [table(&parsed.y.c1)?, table(&parsed.y.c2)?],
        );
        let phi = match parsed.phi {
            PhiJson::Label(l) => l,
            PhiJson::Odd { odd } => {
                let odd: Vec<T> = odd.iter().map(|c| T::lit(*c)).collect();
                Transition::from_odd_checked("custom", &odd)?;
                format!("odd:{}", odd.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(","))
            }
        };
        let s = Scenario { id: parsed.id, family, phi, reference: parsed.reference };
        s.check()?;
        Ok(s)
    }
}

/// Resolve a transition label, including the `odd:a1,a3,...` form produced by JSON scenarios.
pub fn transition_from_label<T: Real>(label: &str) -> Result<Transition<T>> {
    match label.strip_prefix("odd:") {
        Some(list) => {
            let odd = list
                .split(',')
                .map(|s| s.trim().parse::<f64>().map(T::lit))
                .collect::<std::result::Result<Vec<T>, _>>()
                .map_err(|_| Error::Usage(format!("bad coefficient list '{list}'")))?;
            Transition::from_odd_checked("custom", &odd)
        }
        None => Transition::catalog(label),
    }
}

#[derive(Serialize, Deserialize)]
struct FieldJson {
    c1: BTreeMap<String, f64>,
    c2: BTreeMap<String, f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum PhiJson {
    Label(String),
    Odd { odd: Vec<f64> },
}

#[derive(Serialize, Deserialize)]
struct ScenarioJson {
    id: String,
    #[serde(rename = "X")]
    x: FieldJson,
    #[serde(rename = "Y")]
    y: FieldJson,
    phi: PhiJson,
    #[serde(default)]
    reference: BTreeMap<String, f64>,
}
