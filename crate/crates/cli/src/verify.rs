//! Verification suites: each check reports a residual against a tolerance.

use crate::CliError;
use num_complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::path::Path;
use weylspec::classifier::{find_eigenvalues, ClassifierConfig, Probe};
use weylspec::dtn::{dtn_exterior_mode, dtn_interior_mode, M_mode, RadialOperator};
use weylspec::linalg::CMatrix;
use weylspec::special::{bessel_i, bessel_j_with_derivative, bessel_k, hankel1_with_derivative};
use weylspec::sturm::{sqrt_upper, CoupledMTildeProvider, CoupledSolver, Potential};
use weylspec::triple::random::{generate, RandomModelOptions};

pub const SUITES: [&str; 4] = ["lemma24", "bessel-free", "square-well", "empty"];

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    pub suite: String,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Number of random models (lemma24) or test points (bessel-free).
    #[serde(default)]
    pub samples: Option<usize>,
}

fn default_seed() -> u64 {
    1
}

impl VerifyConfig {
    pub fn named(suite: &str) -> Self {
        Self {
            suite: suite.into(),
            seed: default_seed(),
            samples: None,
        }
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))?;
        let parsed = if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
            serde_json::from_str(&text).map_err(|e| e.to_string())
        } else {
            toml::from_str(&text).map_err(|e| e.to_string())
        };
        parsed.map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.residual <= self.tolerance
    }
}

pub fn run(cfg: &VerifyConfig) -> Result<Vec<Check>, CliError> {
    match cfg.suite.as_str() {
        "lemma24" => lemma24(cfg.seed, cfg.samples.unwrap_or(20)),
        "bessel-free" => bessel_free(cfg.seed, cfg.samples.unwrap_or(20)),
        "square-well" => square_well(),
        "empty" => Ok(Vec::new()),
        other => Err(CliError::Validation(format!(
            "unknown suite {other:?}; available: {}",
            SUITES.join(", ")
        ))),
    }
}

fn max_entry(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn rel_defect(lhs: &CMatrix, rhs: &CMatrix) -> f64 {
    max_entry(&(lhs - rhs)) / max_entry(rhs).max(1.0)
}

fn random_point(rng: &mut ChaCha8Rng) -> C {
    let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
    C::new(rng.random_range(-4.0..4.0), sign * rng.random_range(0.05..4.0))
}

/// Green identity, partial fractions, Herglotz positivity and symmetry of the
/// Weyl function of random finite models, against an LU resolvent.
fn lemma24(seed: u64, models: usize) -> Result<Vec<Check>, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = Vec::new();
    let num = |e: weylspec::triple::TripleError| CliError::Numerical(e.to_string());
    for i in 0..models {
        let n = rng.random_range(1..=8);
        let d = rng.random_range(1..=n.min(3));
        let g = generate(&mut rng, &RandomModelOptions::cyclic(n, d)).map_err(num)?;
        let m = &g.model;
        let (mut green, mut partial, mut herglotz, mut sym) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
        for _ in 0..50 {
            let (lam, mu, nu) = (random_point(&mut rng), random_point(&mut rng), random_point(&mut rng));
            let gm = m.gamma_field(mu).map_err(num)?;
            let lhs = gm.adjoint() * m.gamma_field(lam).map_err(num)? * (lam - mu.conj());
            let rhs = m.weyl(lam).map_err(num)? - m.weyl(mu).map_err(num)?.adjoint();
            green = green.max(rel_defect(&lhs, &rhs));

            let res = (m.a0() - CMatrix::identity(n, n) * lam)
                .lu()
                .try_inverse()
                .ok_or_else(|| CliError::Numerical(format!("singular resolvent at {lam}")))?;
            let lhs = gm.adjoint() * res * m.gamma_field(nu).map_err(num)?;
            let mb = mu.conj();
            let rhs = m.weyl(lam).map_err(num)? / ((lam - nu) * (lam - mb))
                + m.weyl(mb).map_err(num)? / ((lam - mb) * (nu - mb))
                + m.weyl(nu).map_err(num)? / ((nu - lam) * (nu - mb));
            partial = partial.max(rel_defect(&lhs, &rhs));

            let z = C::new(lam.re, lam.im.abs());
            let mz = m.weyl(z).map_err(num)?;
            let im = (&mz - mz.adjoint()) / C::new(0.0, 2.0);
            // Positive when the smallest eigenvalue of Im M is > 0.
            herglotz = herglotz.max(-im.symmetric_eigenvalues().min());
            sym = sym.max(rel_defect(&m.weyl(z.conj()).map_err(num)?, &mz.adjoint()));
        }
        let tag = format!("model {i:02} (n={n}, d={d})");
        checks.push(Check { name: format!("{tag} green identity"), residual: green, tolerance: 1e-10 });
        checks.push(Check { name: format!("{tag} partial fractions"), residual: partial, tolerance: 1e-10 });
        checks.push(Check { name: format!("{tag} -min eig Im M"), residual: herglotz, tolerance: 0.0 });
        checks.push(Check { name: format!("{tag} conjugate symmetry"), residual: sym, tolerance: 1e-10 });
    }
    Ok(checks)
}

/// Free-disk DtN maps against Bessel/Hankel ratios, and `M⁽⁰⁾(−1) = I₀K₀`.
fn bessel_free(seed: u64, points: usize) -> Result<Vec<Check>, CliError> {
    let op = RadialOperator::free(1.0, 8).map_err(|e| CliError::Numerical(e.to_string()))?;
    let num = |e: weylspec::dtn::DtnError| CliError::Numerical(e.to_string());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lams: Vec<C> = (0..points)
        .map(|_| {
            let s = C::new(rng.random_range(0.2..4.0), rng.random_range(0.5..3.0));
            s * s
        })
        .collect();
    let mut checks = Vec::new();
    for k in 0..=8u32 {
        let (mut ei, mut ee) = (0.0f64, 0.0f64);
        for &lam in &lams {
            let s = sqrt_upper(lam);
            let (j, dj) = bessel_j_with_derivative(k, s);
            let (h, dh) = hankel1_with_derivative(k, s);
            let li = dtn_interior_mode(&op, k, lam).map_err(num)?.finite();
            let le = dtn_exterior_mode(&op, k, lam).map_err(num)?.finite();
            let want_i = s * dj / j;
            let want_e = -s * dh / h;
            ei = ei.max(li.map_or(f64::INFINITY, |v| (v - want_i).norm() / want_i.norm()));
            ee = ee.max(le.map_or(f64::INFINITY, |v| (v - want_e).norm() / want_e.norm()));
        }
        checks.push(Check { name: format!("mode {k} interior DtN"), residual: ei, tolerance: 1e-6 });
        checks.push(Check { name: format!("mode {k} exterior DtN"), residual: ee, tolerance: 1e-6 });
    }
    let one = C::new(1.0, 0.0);
    let m = M_mode(&op, 0, -one).map_err(num)?;
    let want = bessel_i(0, one) * bessel_k(0, one);
    checks.push(Check { name: "M(0)(-1) = I0(1) K0(1)".into(), residual: (m - want).norm(), tolerance: 1e-8 });
    Ok(checks)
}

fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let mut fa = f(a);
    while b - a > 4.0 * f64::EPSILON * a.abs().max(b.abs()) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fa * fm <= 0.0 {
            b = m;
        } else {
            a = m;
            fa = fm;
        }
    }
    0.5 * (a + b)
}

/// Bound states of `q = −10·1_{[−1,1]}` from `m̃` against the even/odd
/// transcendental equations.
fn square_well() -> Result<Vec<Check>, CliError> {
    let (v0, a) = (10.0f64, 1.0f64);
    let even = |e: f64| {
        let (k, kap) = ((v0 + e).sqrt(), (-e).sqrt());
        k * (k * a).sin() - kap * (k * a).cos()
    };
    let odd = |e: f64| {
        let (k, kap) = ((v0 + e).sqrt(), (-e).sqrt());
        k * (k * a).cos() + kap * (k * a).sin()
    };
    let samples = 20_000;
    let xs: Vec<f64> = (0..=samples).map(|i| -v0 + 1e-9 + (v0 - 2e-9) * i as f64 / samples as f64).collect();
    let mut oracle = Vec::new();
    for f in [&even as &dyn Fn(f64) -> f64, &odd] {
        for w in xs.windows(2) {
            if f(w[0]) * f(w[1]) < 0.0 {
                oracle.push(bisect(f, w[0], w[1]));
            }
        }
    }
    oracle.sort_by(f64::total_cmp);

    let well = Potential::square_well(v0, a).map_err(|e| CliError::Numerical(e.to_string()))?;
    let p = CoupledMTildeProvider(CoupledSolver::new(well));
    let found = find_eigenvalues(&p, -v0, 0.0, 0.01, &Probe::basis(2), &ClassifierConfig::default())
        .map_err(|e| CliError::Numerical(e.to_string()))?;
    let mut checks = vec![Check {
        name: format!("count ({} oracle states)", oracle.len()),
        residual: (found.len() as f64 - oracle.len() as f64).abs(),
        tolerance: 0.0,
    }];
    for e in &oracle {
        let err = found.iter().map(|r| (r.x - e).abs()).fold(f64::INFINITY, f64::min);
        checks.push(Check { name: format!("state {e:.10}"), residual: err, tolerance: 1e-8 });
    }
    Ok(checks)
}
