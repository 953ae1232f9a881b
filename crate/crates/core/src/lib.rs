//! Ergodic optimization of Lyapunov exponents for dominated 2x2 cocycles.
//!
//! The pipeline goes: search an invariant multicone ([`multicone`]), turn it
//! into a domination certificate ([`splitting`]), solve the Barabanov
//! fixed-point problem on it ([`barabanov`]), then read off the optimal
//! language and check its geometry ([`mather`]). [`spectral`] brackets the
//! extremal exponents independently, [`entropy_pos`] builds bounded-product
//! subshifts, and [`corpus`] holds the named test cocycles.

pub mod barabanov;
pub mod cocycle;
pub mod corpus;
pub mod entropy_pos;
pub mod error;
pub mod geom2;
pub mod mather;
pub mod multicone;
pub mod spectral;
pub mod splitting;

pub use cocycle::{Cocycle, Mode, Word};
pub use error::{CocycleError, Result};
pub use geom2::{Mat2, Vec2};
