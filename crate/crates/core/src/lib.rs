//! Exact exterior calculus on `R^n` and on tangent-diffeological spaces.

pub mod expr;
pub mod linalg;
pub mod scalar;
pub mod exterior;
pub mod forms;
pub mod diffeology;
pub mod spaces;
pub mod plaque_forms;
pub mod verify;
pub mod cli;
