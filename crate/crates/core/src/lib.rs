//! Affine integration logic: formulas with the Lipschitz/bound calculus,
//! exact evaluation over finite charged metric structures, ultrameans, a
//! proof kernel, mixture solving and type analysis.

pub mod analysis;
pub mod gen;
pub mod parser;
pub mod proof;
pub mod rational;
pub mod semantics;
pub mod syntax;
pub mod ultramean;

pub use rational::{q, Q};
