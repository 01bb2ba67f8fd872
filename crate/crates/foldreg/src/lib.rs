//! Planar Filippov fold-fold singularities and their Sotomayor-Teixeira regularizations.
//!
//! The closed-form chart works over any [`Coef`] (floats or exact rationals); the
//! numerical layers (integration, quadrature, shooting) over any [`Real`].

pub mod canard;
pub mod equilibria;
pub mod dynamics;
pub mod error;
pub mod fields;
pub mod filippov;
pub mod melnikov;
pub mod ode;
pub mod poly;
pub mod quad;
pub mod regularize;
pub mod reproduce;
pub mod roots;
pub mod scenario;
pub mod slowfast;
pub mod scalar;

pub use error::{Error, Result};
pub use fields::{Family, Partial, PlanarField, PolyField};
pub use poly::Poly;
pub use regularize::{Regularized, Transition};
pub use scalar::{Coef, Real};

/// Exact rational scalar used for the closed-form chart.
pub type Exact = num_rational::Ratio<i64>;

pub type Family64 = Family<f64>;
pub type Transition64 = Transition<f64>;
pub type Regularized64 = Regularized<f64>;
pub type FamilyExact = Family<Exact>;
pub type TransitionExact = Transition<Exact>;
