//! Quantum SU(2), the Podles sphere, quantum Berezin transforms and
//! quantum fuzzy spheres, with numerical bounds on quantum metric distances.

pub mod error;
pub mod harness;
pub mod hopf;
pub mod pbw;
pub mod peter_weyl;
pub mod podles;
pub mod precise;
pub mod qmetric;
pub mod qscalar;
pub mod testing;

pub use error::{Error, Result};
pub use pbw::{AlgebraElement, Bidegree, Generator, Monomial};
pub use peter_weyl::{UIndex, UVector};
pub use qscalar::{Coeff, Mode, QParam, Scalar};
