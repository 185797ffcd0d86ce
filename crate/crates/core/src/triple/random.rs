//! Random model generators with a known spectrum, for tests, oracle suites and benches.

use super::{TripleError, TripleModel};
use crate::linalg::{complex_gaussian, random_hermitian, random_unitary, CMatrix};
use num_complex::Complex64;
use rand::Rng;

#[derive(Debug, Clone, PartialEq)]
pub struct RandomModelOptions {
    pub n: usize,
    pub d: usize,
    /// Eigenvalues are drawn from `[-spread, spread]`.
    pub spread: f64,
    /// Minimum distance between distinct eigenvalues.
    pub min_gap: f64,
    /// Largest eigenvalue multiplicity (capped at `d` so the model stays cyclic).
    pub max_multiplicity: usize,
    /// Number of simple eigenvalues whose eigenvector is made orthogonal to `ran gamma0`.
    pub hidden: usize,
}

impl RandomModelOptions {
    pub fn cyclic(n: usize, d: usize) -> Self {
        Self {
            n,
            d,
            spread: 3.0,
            min_gap: 0.1,
            max_multiplicity: 1,
            hidden: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct GeneratedModel {
    pub model: TripleModel,
    /// Distinct eigenvalues with multiplicities, ascending.
    pub eigenvalues: Vec<(f64, usize)>,
    /// Eigenvalues invisible to the γ-span (ascending).
    pub hidden: Vec<f64>,
}

fn distinct_values<R: Rng + ?Sized>(rng: &mut R, count: usize, spread: f64, gap: f64) -> Vec<f64> {
    assert!(
        (count as f64 - 1.0) * gap < 2.0 * spread,
        "cannot place {count} eigenvalues with gap {gap} in [-{spread}, {spread}]"
    );
    // Sorted uniforms on a shortened interval, shifted by i·gap: uniform over
    // all admissible configurations, without rejection.
    let room = 2.0 * spread - count.saturating_sub(1) as f64 * gap;
    let mut v: Vec<f64> = (0..count).map(|_| rng.random_range(0.0..room)).collect();
    v.sort_by(f64::total_cmp);
    for (i, x) in v.iter_mut().enumerate() {
        *x += i as f64 * gap - spread;
    }
    v
}

/// Draw a model `A0 = U diag(λ) U*`, `gamma0 = U G` where `G` has Gaussian rows
/// on visible eigenvectors and zero rows on hidden ones.
pub fn generate<R: Rng + ?Sized>(rng: &mut R, opts: &RandomModelOptions) -> Result<GeneratedModel, TripleError> {
    let RandomModelOptions {
        n,
        d,
        spread,
        min_gap,
        max_multiplicity,
        hidden,
    } = opts.clone();
    if d == 0 || d > n || hidden + d > n {
        return Err(TripleError::InvalidArgument(format!(
            "need 1 ≤ d ≤ n - hidden (n={n}, d={d}, hidden={hidden})"
        )));
    }
    let max_mult = max_multiplicity.clamp(1, d);
    for _attempt in 0..100 {
        // Multiplicities: hidden eigenvalues are simple.
        let mut mults = vec![1usize; hidden];
        let mut left = n - hidden;
        while left > 0 {
            let m = rng.random_range(1..=max_mult.min(left));
            mults.push(m);
            left -= m;
        }
        let values = distinct_values(rng, mults.len(), spread, min_gap);
        // Shuffle which values get which multiplicity / hidden status.
        let mut idx: Vec<usize> = (0..mults.len()).collect();
        for i in (1..idx.len()).rev() {
            let j = rng.random_range(0..=i);
            idx.swap(i, j);
        }
        let mut diag = Vec::with_capacity(n);
        let mut hidden_rows = Vec::new();
        let mut spectrum = Vec::new();
        let mut hidden_vals = Vec::new();
        for (slot, &m) in mults.iter().enumerate() {
            let v = values[idx[slot]];
            if slot < hidden {
                hidden_rows.push(diag.len());
                hidden_vals.push(v);
            }
            for _ in 0..m {
                diag.push(v);
            }
            spectrum.push((v, m));
        }
        spectrum.sort_by(|a, b| a.0.total_cmp(&b.0));
        hidden_vals.sort_by(f64::total_cmp);

        let u = random_unitary(rng, n);
        let lam = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            n,
            diag.iter().map(|v| Complex64::from(*v)),
        ));
        let a0 = &u * lam * u.adjoint();
        let mut g = CMatrix::from_fn(n, d, |_, _| complex_gaussian(rng));
        for &r in &hidden_rows {
            g.row_mut(r).fill(Complex64::new(0.0, 0.0));
        }
        let gamma0 = &u * g;
        let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let mu0 = Complex64::new(rng.random_range(-1.0..1.0), sign * rng.random_range(0.5..2.0));
        let re_m0 = random_hermitian(rng, d);
        match TripleModel::new(a0, gamma0, mu0, re_m0) {
            Ok(model) => {
                return Ok(GeneratedModel {
                    model,
                    eigenvalues: spectrum,
                    hidden: hidden_vals,
                })
            }
            Err(TripleError::RankDeficient { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(TripleError::InvalidArgument("could not draw a full-rank gamma0".into()))
}
