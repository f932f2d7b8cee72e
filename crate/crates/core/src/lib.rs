//! Exact computer algebra for phase-space quantization: the Weyl algebra,
//! s-ordered operator products, star products and Moyal brackets, Bopp
//! differential operators, and the W∞ structure constants.

pub mod boppdiff;
pub mod coeffring;
pub mod combinatorics;
pub mod exprio;
pub mod ordering;
pub mod symcalc;
pub mod verify;
pub mod winf;
pub mod weylcore;

pub use coeffring::{Coefficient, GaussianRational};
pub use ordering::OrderParameter;
pub use symcalc::{Symbol, VarPair};
pub use weylcore::{AlgebraSignature, CanonicalElement};
