//! Multilabeled Sperner and Fan lemma solvers over exact rational
//! triangulations, with fair-division and consensus-halving applications.

pub mod complexes;
pub mod error;
pub mod fairdiv;
pub mod fan;
pub mod labelings;
pub mod linalg;
pub mod matching;
pub mod multisperner;
pub mod rational;

pub use error::{Error, Result};
pub use rational::Rational;
