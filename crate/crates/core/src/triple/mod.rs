//! Finite-dimensional boundary-triple models.
//!
//! A model is a Hermitian `A0` (the extension `A₀ = T ↾ ker Γ₀`), the value
//! `γ(μ₀) = gamma0 ∈ ℂ^{n×d}` of the γ-field at a non-real `μ₀`, and
//! `Re M(μ₀)`. In finite dimensions quasi boundary triples are ordinary ones,
//! so full rank of `gamma0` and Hermiticity of `A0` are the only validity
//! conditions checked. The symmetric restriction `S` is never built: its
//! eigenvectors are the eigenvectors of `A0` orthogonal to `ran gamma0`
//! ("hidden" eigenvectors).
//!
//! Everything is evaluated through one Hermitian eigendecomposition
//! `A0 = V Λ V*` computed at construction.

pub mod random;

use crate::linalg::{column_basis, hermitian_deviation, max_abs, numerical_rank, CMatrix};
use crate::nevanlinna::{matrix_residue, LadderConfig};
use crate::provider::{ProviderError, WeylProvider};
use crate::quadrature::{composite, gauss_legendre};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

type C = Complex64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TripleError {
    #[error("A0 must be square, got {rows}×{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("A0 is not Hermitian: max |A0 − A0*| = {deviation:e}")]
    NotHermitian { deviation: f64 },
    #[error("reM0 is not Hermitian: max |reM0 − reM0*| = {deviation:e}")]
    ReM0NotHermitian { deviation: f64 },
    #[error("gamma0 must be {n}×d with 1 ≤ d ≤ {n}, got {rows}×{cols}")]
    GammaShape { n: usize, rows: usize, cols: usize },
    #[error("reM0 must be {d}×{d}, got {rows}×{cols}")]
    ReM0Shape { d: usize, rows: usize, cols: usize },
    #[error("gamma0 is rank deficient: rank {rank} < d = {d}")]
    RankDeficient { rank: usize, d: usize },
    #[error("mu0 must have non-zero imaginary part, got {0}")]
    RealMu0(C),
    #[error("non-finite entry in {0}")]
    NonFinite(&'static str),
    #[error("λ = {0} lies in the spectrum of A0 (singular resolvent)")]
    SingularResolvent(C),
    #[error("x = {0} is not an eigenvalue of A0")]
    NotAnEigenvalue(f64),
    #[error("interval endpoint {0} is an eigenvalue of A0")]
    EndpointEigenvalue(f64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("model JSON: {0}")]
    Json(String),
}

/// One distinct eigenvalue with its index range in the sorted eigenbasis.
#[derive(Debug, Clone, PartialEq)]
struct Cluster {
    value: f64,
    start: usize,
    end: usize,
}

impl Cluster {
    fn multiplicity(&self) -> usize {
        self.end - self.start
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "TripleModelFile", into = "TripleModelFile")]
pub struct TripleModel {
    a0: CMatrix,
    gamma0: CMatrix,
    mu0: C,
    re_m0: CMatrix,
    eigenvalues: Vec<f64>,
    /// Columns: orthonormal eigenvectors, sorted by eigenvalue.
    eigenvectors: CMatrix,
    /// `V* gamma0` (row k = coefficients of the k-th eigenvector).
    w: CMatrix,
    /// `gamma0* gamma0`.
    gram: CMatrix,
    clusters: Vec<Cluster>,
    eig_tol: f64,
}

/// JSON shape: matrices as nested arrays of `[re, im]` pairs.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TripleModelFile {
    #[serde(rename = "A0")]
    pub a0: Vec<Vec<[f64; 2]>>,
    pub gamma0: Vec<Vec<[f64; 2]>>,
    pub mu0: [f64; 2],
    #[serde(rename = "reM0")]
    pub re_m0: Vec<Vec<[f64; 2]>>,
}

fn to_nested(m: &CMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

fn from_nested(rows: &[Vec<[f64; 2]>], what: &str) -> Result<CMatrix, TripleError> {
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|row| row.len() != c) {
        return Err(TripleError::Json(format!("{what}: ragged rows")));
    }
    Ok(CMatrix::from_fn(r, c, |i, j| C::new(rows[i][j][0], rows[i][j][1])))
}

impl TryFrom<TripleModelFile> for TripleModel {
    type Error = TripleError;
    fn try_from(f: TripleModelFile) -> Result<Self, TripleError> {
        TripleModel::new(
            from_nested(&f.a0, "A0")?,
            from_nested(&f.gamma0, "gamma0")?,
            C::new(f.mu0[0], f.mu0[1]),
            from_nested(&f.re_m0, "reM0")?,
        )
    }
}

impl From<TripleModel> for TripleModelFile {
    fn from(m: TripleModel) -> Self {
        TripleModelFile {
            a0: to_nested(&m.a0),
            gamma0: to_nested(&m.gamma0),
            mu0: [m.mu0.re, m.mu0.im],
            re_m0: to_nested(&m.re_m0),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    /// Distinct eigenvalues, ascending.
    pub eigenvalues: Vec<f64>,
    pub multiplicities: Vec<usize>,
    /// Orthogonal projections onto the eigenspaces.
    pub eigenprojections: Vec<CMatrix>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LocalSimplicity {
    pub simple: bool,
    /// Rank of the stacked vectors `E(Δ)γ(ν)e_j`.
    pub stacked_rank: usize,
    /// `dim ran E(Δ)`.
    pub spectral_rank: usize,
}

impl TripleModel {
    pub fn new(a0: CMatrix, gamma0: CMatrix, mu0: C, re_m0: CMatrix) -> Result<Self, TripleError> {
        let n = a0.nrows();
        if a0.ncols() != n || n == 0 {
            return Err(TripleError::NotSquare {
                rows: n,
                cols: a0.ncols(),
            });
        }
        for (m, what) in [(&a0, "A0"), (&gamma0, "gamma0"), (&re_m0, "reM0")] {
            if m.iter().any(|z| !z.is_finite()) {
                return Err(TripleError::NonFinite(what));
            }
        }
        if !(mu0.re.is_finite() && mu0.im.is_finite()) {
            return Err(TripleError::NonFinite("mu0"));
        }
        let a_scale = max_abs(&a0).max(1.0);
        let dev = hermitian_deviation(&a0);
        if dev > 1e-12 * a_scale {
            return Err(TripleError::NotHermitian { deviation: dev });
        }
        let d = gamma0.ncols();
        if gamma0.nrows() != n || d == 0 || d > n {
            return Err(TripleError::GammaShape {
                n,
                rows: gamma0.nrows(),
                cols: d,
            });
        }
        if re_m0.nrows() != d || re_m0.ncols() != d {
            return Err(TripleError::ReM0Shape {
                d,
                rows: re_m0.nrows(),
                cols: re_m0.ncols(),
            });
        }
        let dev = hermitian_deviation(&re_m0);
        if dev > 1e-12 * max_abs(&re_m0).max(1.0) {
            return Err(TripleError::ReM0NotHermitian { deviation: dev });
        }
        if mu0.im == 0.0 {
            return Err(TripleError::RealMu0(mu0));
        }
        let rank = numerical_rank(&gamma0, 1e-12 * max_abs(&gamma0).max(f64::MIN_POSITIVE) * n as f64);
        if rank < d {
            return Err(TripleError::RankDeficient { rank, d });
        }

        // Exact Hermitian symmetrisation before the eigensolver.
        let a0 = (&a0 + a0.adjoint()) * C::new(0.5, 0.0);
        let re_m0 = (&re_m0 + re_m0.adjoint()) * C::new(0.5, 0.0);
        let eig = a0.clone().symmetric_eigen();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
        let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let eigenvectors = CMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
        let w = eigenvectors.adjoint() * &gamma0;
        let gram = gamma0.adjoint() * &gamma0;

        let radius = eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let eig_tol = 1e-10 * radius.max(1.0);
        let mut clusters: Vec<Cluster> = Vec::new();
        for (k, &v) in eigenvalues.iter().enumerate() {
            match clusters.last_mut() {
                Some(c) if v - eigenvalues[c.end - 1] <= eig_tol => c.end = k + 1,
                _ => clusters.push(Cluster {
                    value: v,
                    start: k,
                    end: k + 1,
                }),
            }
        }
        for c in &mut clusters {
            c.value = eigenvalues[c.start..c.end].iter().sum::<f64>() / c.multiplicity() as f64;
        }

        Ok(Self {
            a0,
            gamma0,
            mu0,
            re_m0,
            eigenvalues,
            eigenvectors,
            w,
            gram,
            clusters,
            eig_tol,
        })
    }

    pub fn from_json(text: &str) -> Result<Self, TripleError> {
        let file: TripleModelFile =
            serde_json::from_str(text).map_err(|e| TripleError::Json(e.to_string()))?;
        TripleModel::try_from(file)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&TripleModelFile::from(self.clone())).expect("plain data serialises")
    }

    pub fn n(&self) -> usize {
        self.a0.nrows()
    }

    pub fn d(&self) -> usize {
        self.gamma0.ncols()
    }

    pub fn a0(&self) -> &CMatrix {
        &self.a0
    }

    pub fn gamma0(&self) -> &CMatrix {
        &self.gamma0
    }

    pub fn mu0(&self) -> C {
        self.mu0
    }

    pub fn re_m0(&self) -> &CMatrix {
        &self.re_m0
    }

    /// All eigenvalues of `A0` (with repetition), ascending.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Distinct eigenvalues with multiplicities.
    pub fn distinct_eigenvalues(&self) -> Vec<(f64, usize)> {
        self.clusters.iter().map(|c| (c.value, c.multiplicity())).collect()
    }

    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Tolerance used to decide `x ∈ σ(A0)`.
    pub fn eigenvalue_tolerance(&self) -> f64 {
        self.eig_tol
    }

    fn cluster_at(&self, x: f64) -> Option<&Cluster> {
        self.clusters.iter().find(|c| (c.value - x).abs() <= self.eig_tol)
    }

    pub fn is_eigenvalue(&self, x: f64) -> bool {
        self.cluster_at(x).is_some()
    }

    pub fn spectral_decomposition(&self) -> SpectralDecomposition {
        let mut eigenprojections = Vec::with_capacity(self.clusters.len());
        for c in &self.clusters {
            let v = self.eigenvectors.columns(c.start, c.multiplicity());
            eigenprojections.push(v * v.adjoint());
        }
        SpectralDecomposition {
            eigenvalues: self.clusters.iter().map(|c| c.value).collect(),
            multiplicities: self.clusters.iter().map(Cluster::multiplicity).collect(),
            eigenprojections,
        }
    }

    fn check_resolvent(&self, z: C) -> Result<(), TripleError> {
        let tiny = 1e-14 * self.spectral_radius().max(1.0);
        if self.eigenvalues.iter().any(|l| (C::from(*l) - z).norm() <= tiny) {
            Err(TripleError::SingularResolvent(z))
        } else {
            Ok(())
        }
    }

    /// `V diag(c_k) W` for per-eigenvector coefficients `c_k`.
    fn scaled_rows(&self, coef: impl Fn(f64) -> C) -> CMatrix {
        let mut out = self.w.clone();
        for (k, l) in self.eigenvalues.iter().enumerate() {
            let c = coef(*l);
            out.row_mut(k).iter_mut().for_each(|z| *z *= c);
        }
        out
    }

    /// `(A0 − z)⁻¹`.
    pub fn resolvent(&self, z: C) -> Result<CMatrix, TripleError> {
        self.check_resolvent(z)?;
        let n = self.n();
        let mut scaled = self.eigenvectors.clone();
        for (k, l) in self.eigenvalues.iter().enumerate() {
            let c = C::from(1.0) / (C::from(*l) - z);
            scaled.column_mut(k).iter_mut().for_each(|v| *v *= c);
        }
        let r = scaled * self.eigenvectors.adjoint();
        debug_assert_eq!(r.nrows(), n);
        Ok(r)
    }

    /// `γ(ν) = (I + (ν − μ₀)(A0 − ν)⁻¹) gamma0`.
    pub fn gamma_field(&self, nu: C) -> Result<CMatrix, TripleError> {
        self.check_resolvent(nu)?;
        let mu0 = self.mu0;
        Ok(&self.eigenvectors * self.scaled_rows(|l| (C::from(l) - mu0) / (C::from(l) - nu)))
    }

    /// `M(λ) = Re M(μ₀) + γ₀*[(λ − Re μ₀) + (λ − μ₀)(λ − μ̄₀)(A0 − λ)⁻¹]γ₀`.
    pub fn weyl(&self, lambda: C) -> Result<CMatrix, TripleError> {
        self.check_resolvent(lambda)?;
        let f = (lambda - self.mu0) * (lambda - self.mu0.conj());
        let core = self.w.adjoint() * self.scaled_rows(|l| f / (C::from(l) - lambda));
        Ok(&self.re_m0 + &self.gram * (lambda - self.mu0.re) + core)
    }

    /// Exact `lim_{η↘0} iη M(x + iη) = −|x − μ₀|²·γ₀* E({x}) γ₀` (zero off the spectrum).
    pub fn residue(&self, x: f64) -> CMatrix {
        let d = self.d();
        match self.cluster_at(x) {
            None => CMatrix::zeros(d, d),
            Some(c) => {
                let wc = self.w.rows(c.start, c.multiplicity());
                let f = (C::from(x) - self.mu0) * (C::from(x) - self.mu0.conj());
                -(wc.adjoint() * wc) * f
            }
        }
    }

    /// Ladder/Richardson estimate of the residue, for cross-validation.
    pub fn residue_estimate(&self, x: f64, cfg: &LadderConfig) -> Result<CMatrix, TripleError> {
        cfg.validate().map_err(|e| TripleError::InvalidArgument(e.to_string()))?;
        let ladder = cfg
            .heights()
            .into_iter()
            .map(|y| Ok((y, self.weyl(C::new(x, y))?)))
            .collect::<Result<Vec<_>, TripleError>>()?;
        Ok(matrix_residue(&ladder, cfg.ratio))
    }

    fn rank_tol(&self) -> f64 {
        1e-10 * max_abs(&self.w).max(1e-300)
    }

    /// Orthonormal basis of `Γ₁K` (the range of the trace map on eigenvectors at `x`).
    pub fn trace_map_range(&self, x: f64) -> Result<CMatrix, TripleError> {
        let c = self.cluster_at(x).ok_or(TripleError::NotAnEigenvalue(x))?;
        let wc = self.w.rows(c.start, c.multiplicity()).adjoint();
        Ok(column_basis(&wc, self.rank_tol()))
    }

    /// `(multiplicity, visible rank)` of the eigenvalue `x`; the difference is
    /// the dimension of the hidden subspace `ker(A0 − x) ∩ (ran γ)^⊥`.
    pub fn eigen_visibility(&self, x: f64) -> Result<(usize, usize), TripleError> {
        let c = self.cluster_at(x).ok_or(TripleError::NotAnEigenvalue(x))?;
        let wc = self.w.rows(c.start, c.multiplicity()).clone_owned();
        Ok((c.multiplicity(), numerical_rank(&wc, self.rank_tol())))
    }

    /// `{±i, 1±i, −1±i, 2±2i}` scaled by `max(1, spectral radius)`, extended
    /// with further distinct points until there are at least `n`.
    pub fn default_probe_points(&self) -> Vec<C> {
        let s = self.spectral_radius().max(1.0);
        let mut pts: Vec<C> = [
            (0.0, 1.0),
            (0.0, -1.0),
            (1.0, 1.0),
            (1.0, -1.0),
            (-1.0, 1.0),
            (-1.0, -1.0),
            (2.0, 2.0),
            (2.0, -2.0),
        ]
        .iter()
        .map(|(a, b)| C::new(*a, *b) * s)
        .collect();
        let mut k = 1;
        while pts.len() < self.n() {
            let re = 0.37 * k as f64 - 1.5;
            let im = 1.0 + 0.29 * k as f64;
            pts.push(C::new(re, im) * s);
            pts.push(C::new(re, -im) * s);
            k += 1;
        }
        pts
    }

    /// Local simplicity of `A0` on the open interval `(a, b)` w.r.t. the γ-span.
    pub fn local_simplicity(&self, a: f64, b: f64, probes: &[C]) -> Result<LocalSimplicity, TripleError> {
        if !(a < b) {
            return Err(TripleError::InvalidArgument(format!("interval ({a}, {b}) is empty")));
        }
        if probes.len() < self.n() {
            return Err(TripleError::InvalidArgument(format!(
                "need at least n = {} probe points, got {}",
                self.n(),
                probes.len()
            )));
        }
        for p in probes {
            self.check_resolvent(*p)?;
        }
        let inside: Vec<usize> = (0..self.n())
            .filter(|&k| self.eigenvalues[k] > a && self.eigenvalues[k] < b)
            .collect();
        let m = inside.len();
        if m == 0 {
            return Ok(LocalSimplicity {
                simple: true,
                stacked_rank: 0,
                spectral_rank: 0,
            });
        }
        // Coordinates of E(Δ)γ(ν)e_j in the eigenbasis of ran E(Δ).
        let d = self.d();
        let mut stacked = CMatrix::zeros(m, d * probes.len());
        let mut c_max = 0.0f64;
        for (p, nu) in probes.iter().enumerate() {
            for (row, &k) in inside.iter().enumerate() {
                let l = C::from(self.eigenvalues[k]);
                let c = (l - self.mu0) / (l - nu);
                c_max = c_max.max(c.norm());
                for j in 0..d {
                    stacked[(row, p * d + j)] = self.w[(k, j)] * c;
                }
            }
        }
        // Relative to the whole of `gamma0`, not the block: a block made of
        // round-off (a hidden eigenvector) must count as rank zero.
        let tol = self.rank_tol() * c_max;
        let stacked_rank = numerical_rank(&stacked, tol);
        Ok(LocalSimplicity {
            simple: stacked_rank == m,
            stacked_rank,
            spectral_rank: m,
        })
    }

    /// Exact `E((a, b))`.
    pub fn spectral_projection(&self, a: f64, b: f64) -> CMatrix {
        let n = self.n();
        let mut e = CMatrix::zeros(n, n);
        for k in 0..n {
            let l = self.eigenvalues[k];
            if l > a && l < b {
                let v = self.eigenvectors.column(k);
                e += v * v.adjoint();
            }
        }
        e
    }

    /// Stone's formula `(1/2πi)∫_a^b [(A0 − t − iε)⁻¹ − (A0 − t + iε)⁻¹] dt`, by
    /// composite Gauss–Legendre with `quadrature_n` nodes per panel and panels
    /// graded geometrically (`λ_k ± ε·2^j`) around every eigenvalue.
    pub fn stone_projection(&self, a: f64, b: f64, eps: f64, quadrature_n: usize) -> Result<CMatrix, TripleError> {
        if !(a < b) || !(eps > 0.0) || quadrature_n == 0 {
            return Err(TripleError::InvalidArgument(format!(
                "need a < b, ε > 0, quadrature_n ≥ 1 (got a={a}, b={b}, ε={eps}, n={quadrature_n})"
            )));
        }
        for end in [a, b] {
            if self.is_eigenvalue(end) {
                return Err(TripleError::EndpointEigenvalue(end));
            }
        }
        let mut breaks = vec![a, b];
        let uniform = 16;
        breaks.extend((1..uniform).map(|i| a + (b - a) * i as f64 / uniform as f64));
        for c in &self.clusters {
            let l = c.value;
            breaks.push(l);
            let mut h = eps;
            while h < 2.0 * (b - a) {
                breaks.push(l - h);
                breaks.push(l + h);
                h *= 2.0;
            }
        }
        breaks.retain(|t| *t >= a && *t <= b);
        breaks.sort_by(f64::total_cmp);
        breaks.dedup_by(|x, y| (*x - *y).abs() <= 1e-15 * (b - a));

        // In the eigenbasis the integrand is diagonal: ε/(π((λ−t)² + ε²)).
        let rule = gauss_legendre(quadrature_n);
        let n = self.n();
        let mut scaled = self.eigenvectors.clone();
        for k in 0..n {
            let l = self.eigenvalues[k];
            let wk = composite(&breaks, &rule, |t| eps / (std::f64::consts::PI * ((l - t) * (l - t) + eps * eps)));
            scaled.column_mut(k).iter_mut().for_each(|v| *v *= C::from(wk));
        }
        Ok(scaled * self.eigenvectors.adjoint())
    }
}

impl WeylProvider for TripleModel {
    fn dim(&self) -> usize {
        self.d()
    }

    fn id(&self) -> String {
        format!("matrix-model(n={}, d={})", self.n(), self.d())
    }

    fn eval(&self, lambda: C) -> Result<CMatrix, ProviderError> {
        self.weyl(lambda).map_err(|e| ProviderError::new(lambda, e.to_string()))
    }
}
