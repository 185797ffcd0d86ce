//! Weyl functions, Dirichlet-to-Neumann maps and spectral classification.

pub mod classifier;
pub mod dtn;
pub mod exec;
pub mod linalg;
pub mod nevanlinna;
pub mod ode;
pub mod provider;
pub mod quadrature;
pub mod special;
pub mod sturm;
pub mod triple;
