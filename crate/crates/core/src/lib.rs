//! Roots of polynomial congruences f(x) ≡ 0 mod n, their correspondence with
//! degree-one ideals, and the exponential-sum, discrepancy, and digit
//! statistics used to study how the ratios v/n distribute.

pub mod equidist;
pub mod error;
pub mod ideals;
pub mod numcore;
pub mod padic;
pub mod roots;
pub mod systems;

pub use error::{AdmissibilityReport, Error, Result};
pub use numcore::{IntPolynomial, SpfSieve};
pub use roots::{ModulusFilter, RootSet};
