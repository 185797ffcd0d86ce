//! Boundary values `f(x + i0)` of Herglotz functions by a geometric y-ladder,
//! log-log divergence fits and order-2 Richardson extrapolation.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LadderConfig {
    /// Top rung height.
    pub y0: f64,
    /// Geometric ratio between consecutive rungs, in (0, 1).
    pub ratio: f64,
    /// Number of halvings; heights are `y0·ratio^j` for `j = 0..=rungs`.
    pub rungs: usize,
    /// Rungs used by the divergence regression.
    pub fit_points: usize,
    /// Fitted growth exponent at or above which `Im f` is declared `+∞`.
    pub p_min: f64,
    /// Relative tolerance between successive extrapolants.
    pub rtol: f64,
}

impl Default for LadderConfig {
    fn default() -> Self {
        Self {
            y0: 0.1,
            ratio: 0.5,
            rungs: 24,
            fit_points: 6,
            p_min: 0.5,
            rtol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LimitError {
    #[error("invalid ladder configuration: {0}")]
    Config(String),
    #[error("evaluation failed at rung {rung} (y = {y:e}): {message}")]
    Evaluation { rung: usize, y: f64, message: String },
}

impl LadderConfig {
    pub fn validate(&self) -> Result<(), LimitError> {
        let bad = |m: &str| Err(LimitError::Config(m.to_string()));
        if !(self.y0 > 0.0 && self.y0.is_finite()) {
            return bad("ladder.y0 must be positive and finite");
        }
        if !(self.ratio > 0.0 && self.ratio < 1.0) {
            return bad("ladder.ratio must lie in (0, 1) so that the ladder is strictly decreasing");
        }
        if self.rungs < 3 {
            return bad("ladder.rungs must be at least 3");
        }
        if self.fit_points < 3 || self.fit_points > self.rungs + 1 {
            return bad("ladder.fit_points must lie in [3, rungs + 1]");
        }
        if !(self.rtol > 0.0 && self.rtol.is_finite()) {
            return bad("ladder.rtol must be positive");
        }
        if !self.p_min.is_finite() {
            return bad("ladder.p_min must be finite");
        }
        if self.heights().last().copied().unwrap_or(0.0) <= 0.0 {
            return bad("ladder underflows to zero");
        }
        Ok(())
    }

    pub fn heights(&self) -> Vec<f64> {
        (0..=self.rungs)
            .map(|j| self.y0 * self.ratio.powi(j as i32))
            .collect()
    }

    /// Index of the rung closest (in log scale) to `y`.
    pub fn nearest_rung(&self, y: f64) -> usize {
        let j = ((y / self.y0).ln() / self.ratio.ln()).round();
        (j.max(0.0) as usize).min(self.rungs)
    }
}

/// `Im f(x + i0)`: a finite number or a detected divergence to `+∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ImLimit {
    Finite(f64),
    PlusInfinity,
}

impl ImLimit {
    pub fn is_infinite(&self) -> bool {
        matches!(self, ImLimit::PlusInfinity)
    }

    pub fn finite(&self) -> Option<f64> {
        match self {
            ImLimit::Finite(v) => Some(*v),
            ImLimit::PlusInfinity => None,
        }
    }
}

impl std::fmt::Display for ImLimit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ImLimit::Finite(v) => write!(f, "{v:.16e}"),
            ImLimit::PlusInfinity => f.write_str("+inf"),
        }
    }
}

impl Serialize for ImLimit {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            ImLimit::Finite(v) => s.serialize_f64(*v),
            ImLimit::PlusInfinity => s.serialize_str("+inf"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryLimit {
    pub x: f64,
    pub im_value: ImLimit,
    /// Fitted `p` in `Im f(x+iy) ≈ C·y^{−p}` over the last `fit_points` rungs.
    pub divergence_exponent: f64,
    /// Extrapolated `lim i·y·f(x+iy)`.
    #[serde(serialize_with = "ser_complex")]
    pub residue: Complex64,
    pub residue_norm: f64,
    /// Extrapolated `Re f(x + i0)` (meaningful only when `converged`).
    pub re_value: f64,
    /// `|f(x + i·y0)|`, the reference magnitude for all relative thresholds.
    pub scale: f64,
    #[serde(skip)]
    pub ladder: Vec<(f64, Complex64)>,
    pub converged: bool,
}

pub(crate) fn ser_complex<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
    [z.re, z.im].serialize(s)
}

/// Order-2 Richardson on three geometric samples `g(y), g(ry), g(r²y)`.
pub fn richardson2<T>(g: [T; 3], r: f64) -> T
where
    T: Clone + std::ops::Sub<Output = T> + std::ops::Mul<f64, Output = T>,
{
    let [g0, g1, g2] = g;
    let a = (g1.clone() - g0 * r) * (1.0 / (1.0 - r));
    let b = (g2 - g1 * r) * (1.0 / (1.0 - r));
    let r2 = r * r;
    (b - a * r2) * (1.0 / (1.0 - r2))
}

/// Extrapolants from the last two overlapping triples of `values`.
fn last_two<T>(values: &[T], r: f64) -> (T, T)
where
    T: Clone + std::ops::Sub<Output = T> + std::ops::Mul<f64, Output = T>,
{
    let n = values.len();
    let tri = |end: usize| {
        [
            values[end - 2].clone(),
            values[end - 1].clone(),
            values[end].clone(),
        ]
    };
    (richardson2(tri(n - 1), r), richardson2(tri(n - 2), r))
}

/// Least-squares slope of `ln|v|` against `ln y`.
fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|(y, _)| y.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|(_, v)| v.abs().max(1e-300).ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Imaginary parts below this multiple of the scale are treated as exact zeros
/// in the divergence fit.
const IM_NOISE: f64 = 1e-12;

/// Analyse precomputed ladder samples `(y_j, f(x + i y_j))`, `y_j` as produced
/// by `cfg.heights()`.
pub fn boundary_limit_from_ladder(
    x: f64,
    ladder: Vec<(f64, Complex64)>,
    cfg: &LadderConfig,
) -> Result<BoundaryLimit, LimitError> {
    cfg.validate()?;
    if ladder.len() != cfg.rungs + 1 {
        return Err(LimitError::Config(format!(
            "expected {} ladder samples, got {}",
            cfg.rungs + 1,
            ladder.len()
        )));
    }
    if ladder.windows(2).any(|w| w[1].0 >= w[0].0) {
        return Err(LimitError::Config("ladder heights must be strictly decreasing".into()));
    }
    let r = cfg.ratio;
    let scale = ladder[0].1.norm();
    let n = ladder.len();

    let fit: Vec<(f64, f64)> = ladder[n - cfg.fit_points..]
        .iter()
        .map(|(y, f)| (*y, f.im))
        .collect();
    let im_max = fit.iter().map(|(_, v)| v.abs()).fold(0.0, f64::max);
    let exponent = if im_max <= IM_NOISE * scale {
        0.0
    } else {
        -log_log_slope(&fit)
    };

    let ims: Vec<f64> = ladder.iter().map(|(_, f)| f.im).collect();
    let res: Vec<Complex64> = ladder
        .iter()
        .map(|(y, f)| Complex64::new(0.0, *y) * f)
        .collect();
    let (residue, res_prev) = last_two(&res, r);
    let res_diff = (residue - res_prev).norm();

    let infinite = exponent >= cfg.p_min;
    let (im_value, im_ok) = if infinite {
        (ImLimit::PlusInfinity, true)
    } else {
        let (a, b) = last_two(&ims, r);
        (ImLimit::Finite(a), (a - b).abs() <= cfg.rtol * a.abs().max(scale))
    };
    let res_ok = res_diff <= cfg.rtol * residue.norm().max(scale);

    let res_re: Vec<f64> = ladder.iter().map(|(_, f)| f.re).collect();
    let (re_a, re_b) = last_two(&res_re, r);
    let re_ok = (re_a - re_b).abs() <= cfg.rtol * re_a.abs().max(scale);

    Ok(BoundaryLimit {
        x,
        im_value,
        divergence_exponent: exponent,
        residue,
        residue_norm: residue.norm(),
        re_value: re_a,
        scale,
        ladder,
        converged: im_ok && res_ok && (re_ok || infinite),
    })
}

/// Evaluate `f` on the ladder above `x` and analyse the result.
pub fn boundary_limit<F, E>(mut f: F, x: f64, cfg: &LadderConfig) -> Result<BoundaryLimit, LimitError>
where
    F: FnMut(Complex64) -> Result<Complex64, E>,
    E: std::fmt::Display,
{
    cfg.validate()?;
    let mut ladder = Vec::with_capacity(cfg.rungs + 1);
    for (rung, y) in cfg.heights().into_iter().enumerate() {
        let v = f(Complex64::new(x, y)).map_err(|e| LimitError::Evaluation {
            rung,
            y,
            message: e.to_string(),
        })?;
        ladder.push((y, v));
    }
    boundary_limit_from_ladder(x, ladder, cfg)
}

/// Entrywise Richardson estimate of `lim i·y·M(x+iy)` from matrix ladder samples.
pub fn matrix_residue(ladder: &[(f64, DMatrix<Complex64>)], ratio: f64) -> DMatrix<Complex64> {
    let scaled: Vec<DMatrix<Complex64>> = ladder
        .iter()
        .map(|(y, m)| m * Complex64::new(0.0, *y))
        .collect();
    let n = scaled.len();
    let r = ratio;
    let a = (&scaled[n - 2] - &scaled[n - 3] * Complex64::from(r)) / Complex64::from(1.0 - r);
    let b = (&scaled[n - 1] - &scaled[n - 2] * Complex64::from(r)) / Complex64::from(1.0 - r);
    (b - a * Complex64::from(r * r)) / Complex64::from(1.0 - r * r)
}
