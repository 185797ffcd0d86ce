//! The interface between models and the classifier.

use crate::linalg::CMatrix;
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("evaluation at λ = {lambda} failed: {message}")]
pub struct ProviderError {
    pub lambda: Complex64,
    pub message: String,
}

impl ProviderError {
    pub fn new(lambda: Complex64, message: impl Into<String>) -> Self {
        Self {
            lambda,
            message: message.into(),
        }
    }
}

/// An evaluator of `M(λ)` for a fixed discretisation.
pub type Evaluator<'a> = Box<dyn Fn(Complex64) -> Result<CMatrix, ProviderError> + Send + Sync + 'a>;

/// A matrix-valued Weyl (Herglotz) function `λ ↦ M(λ) ∈ ℂ^{d×d}`.
pub trait WeylProvider: Send + Sync {
    fn dim(&self) -> usize;

    /// Short human-readable identifier, recorded in report provenance.
    fn id(&self) -> String;

    fn eval(&self, lambda: Complex64) -> Result<CMatrix, ProviderError>;

    /// Evaluator whose discretisation is frozen around the real point `anchor`.
    ///
    /// Providers backed by adaptive ODE solves return an evaluator that replays
    /// one mesh for every λ, which keeps the numerical `M` analytic along a
    /// ladder. Exact providers just forward to [`WeylProvider::eval`].
    fn anchored(&self, anchor: f64) -> Result<Evaluator<'_>, ProviderError> {
        let _ = anchor;
        Ok(Box::new(move |z| self.eval(z)))
    }
}

/// Wraps a closure as a provider; handy for closed-form test functions.
pub struct FnProvider<F> {
    id: String,
    dim: usize,
    f: F,
}

impl<F> FnProvider<F>
where
    F: Fn(Complex64) -> CMatrix + Send + Sync,
{
    pub fn new(id: impl Into<String>, dim: usize, f: F) -> Self {
        Self {
            id: id.into(),
            dim,
            f,
        }
    }
}

impl<F> WeylProvider for FnProvider<F>
where
    F: Fn(Complex64) -> CMatrix + Send + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn id(&self) -> String {
        self.id.clone()
    }

    fn eval(&self, lambda: Complex64) -> Result<CMatrix, ProviderError> {
        let m = (self.f)(lambda);
        if m.iter().all(|z| z.is_finite()) {
            Ok(m)
        } else {
            Err(ProviderError::new(lambda, "non-finite value"))
        }
    }
}

/// Scalar closure as a 1×1 provider.
pub fn scalar_provider<F>(id: &str, f: F) -> FnProvider<impl Fn(Complex64) -> CMatrix + Send + Sync>
where
    F: Fn(Complex64) -> Complex64 + Send + Sync,
{
    FnProvider::new(id, 1, move |z| CMatrix::from_element(1, 1, f(z)))
}
