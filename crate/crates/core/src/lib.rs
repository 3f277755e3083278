//! Numerical library for displacement metrics on compact group actions.
//!
//! A compact group acting on a compact metric space assigns each element g a
//! displacement φ(g), the farthest it moves any point. This crate computes φ
//! on the unitary groups U(N) (through one Hermitian eigensolve per element),
//! on tori under translation (in closed form), and on finite groups acting on
//! finite metric spaces (in exact rational arithmetic). On top of φ it
//! estimates the Haar distribution function Φ(t) = μ{g : φ(g) < t} by Monte
//! Carlo and by eigen-angle quadrature, and runs the Dirichlet-type
//! minimizations δ(𝒜), δ_N(a), δ_{J,K}(A,B) and δ_{J,K,L}(A,B,C) against
//! their pigeonhole bounds.

pub mod dirichlet;
pub mod displacement;
pub mod error;
pub mod finite;
pub mod haar;
pub mod io;
pub mod linalg;
pub mod quad;
pub mod rng;
pub mod search;
pub mod torus;

pub use error::{Error, Result};
