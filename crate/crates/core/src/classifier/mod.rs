//! Spectral classification from boundary values of a Weyl function.
//!
//! Every grid point `x` is probed along the ladder `x + i·y_j`; each probe
//! vector `g` gives a scalar Herglotz function `⟨M(λ)g, g⟩` whose boundary
//! limit is analysed by [`boundary_limit_from_ladder`]. The per-point decision
//! tree is:
//!
//! 1. some probe has a residue above threshold and a divergence exponent of at
//!    least `eigen_exponent` → `Eigenvalue` (the exponent guard rejects
//!    square-root branch points, where `y·f → 0` only like `√y`);
//! 2. some probe has a finite positive imaginary limit → `AbsolutelyContinuous`;
//! 3. some probe diverges (`Im → +∞`) with vanishing residue →
//!    `SingularContinuousCandidate`;
//! 4. all imaginary limits vanish and the ladder converged → `Resolvent`;
//! 5. otherwise `ContinuousUnresolved`; evaluation failures give `Undetermined`.
//!
//! A scan then applies the closures: ac := clac(raw ac points),
//! sc := clc(raw sc points), and keeps `Resolvent` only on runs of at least
//! `resolvent_run` points. Eigenvalues are located off-grid by maximising
//! `y·Im⟨M(x+iy)g, g⟩` at shrinking heights, verified with a full ladder, and
//! reported at their grid-nearest point. All sets are inner approximations
//! limited by the probe family.

use crate::exec::Exec;
use crate::linalg::{numerical_rank, CMatrix};
use crate::nevanlinna::{
    boundary_limit_from_ladder, clac, clc, matrix_residue, runs, BoundaryLimit, ClosureConfig, GridSet,
    ImLimit, LadderConfig,
};
use crate::provider::{Evaluator, WeylProvider};
use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

type C = Complex64;


#[derive(Debug, Clone, Error, PartialEq)]
pub enum ClassifierError {
    #[error("invalid scan: {0}")]
    Scan(String),
    #[error("invalid probe {id}: {message}")]
    Probe { id: String, message: String },
    #[error("invalid configuration: {0}")]
    Config(String),
}

/// Decision thresholds; all relative ones are multiples of the probe scale
/// `|⟨M(x + i·y0)g, g⟩|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Thresholds {
    pub residue: f64,
    pub im_zero: f64,
    /// Minimum divergence exponent for an eigenvalue (a simple pole gives 1).
    pub eigen_exponent: f64,
    /// Minimum run length of raw resolvent points.
    pub resolvent_run: usize,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            residue: 1e-6,
            im_zero: 1e-6,
            eigen_exponent: 0.75,
            resolvent_run: 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifierConfig {
    pub ladder: LadderConfig,
    pub thresholds: Thresholds,
    pub closure: ClosureConfig,
    #[serde(skip)]
    pub exec: Exec,
}

impl ClassifierConfig {
    pub fn validate(&self) -> Result<(), ClassifierError> {
        self.ladder.validate().map_err(|e| ClassifierError::Config(e.to_string()))?;
        let t = &self.thresholds;
        for (name, v) in [
            ("thresholds.residue", t.residue),
            ("thresholds.im_zero", t.im_zero),
            ("thresholds.eigen_exponent", t.eigen_exponent),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(ClassifierError::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if t.resolvent_run == 0 {
            return Err(ClassifierError::Config("thresholds.resolvent_run must be ≥ 1".into()));
        }
        let c = &self.closure;
        if c.window == 0 || !(c.density_floor > 0.0 && c.density_floor < 1.0) || c.count_floor == 0 {
            return Err(ClassifierError::Config(format!(
                "closure needs window ≥ 1, 0 < density_floor < 1, count_floor ≥ 1, got {c:?}"
            )));
        }
        Ok(())
    }
}

/// A probe vector `g` in the boundary space.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Probe {
    pub id: String,
    #[serde(serialize_with = "ser_cvec")]
    pub vector: DVector<C>,
}

fn ser_cvec<S: serde::Serializer>(v: &DVector<C>, s: S) -> Result<S::Ok, S::Error> {
    let pairs: Vec<[f64; 2]> = v.iter().map(|z| [z.re, z.im]).collect();
    pairs.serialize(s)
}

impl Probe {
    pub fn new(id: impl Into<String>, vector: DVector<C>) -> Self {
        Self { id: id.into(), vector }
    }

    /// Standard basis `e0, …, e{d−1}`: enough to see every nonzero residue and
    /// every nonzero `Im M`, both of which are semidefinite.
    pub fn basis(d: usize) -> Vec<Probe> {
        (0..d)
            .map(|j| {
                let mut v = DVector::zeros(d);
                v[j] = C::new(1.0, 0.0);
                Probe::new(format!("e{j}"), v)
            })
            .collect()
    }

    fn form(&self, m: &CMatrix) -> C {
        self.vector.dotc(&(m * &self.vector))
    }
}

fn validate_probes(probes: &[Probe], dim: usize) -> Result<(), ClassifierError> {
    if probes.is_empty() {
        return Err(ClassifierError::Probe {
            id: "-".into(),
            message: "the probe family is empty".into(),
        });
    }
    for p in probes {
        let bad = |message: String| ClassifierError::Probe {
            id: p.id.clone(),
            message,
        };
        if p.vector.len() != dim {
            return Err(bad(format!("length {} does not match dimension {dim}", p.vector.len())));
        }
        if p.vector.iter().any(|z| !z.is_finite()) {
            return Err(bad("non-finite entry".into()));
        }
        if p.vector.norm() == 0.0 {
            return Err(bad("zero vector".into()));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SpectralTag {
    Resolvent,
    Eigenvalue,
    AbsolutelyContinuous,
    SingularContinuousCandidate,
    ContinuousUnresolved,
    Undetermined,
}

impl SpectralTag {
    pub fn as_str(self) -> &'static str {
        match self {
            SpectralTag::Resolvent => "Resolvent",
            SpectralTag::Eigenvalue => "Eigenvalue",
            SpectralTag::AbsolutelyContinuous => "AbsolutelyContinuous",
            SpectralTag::SingularContinuousCandidate => "SingularContinuousCandidate",
            SpectralTag::ContinuousUnresolved => "ContinuousUnresolved",
            SpectralTag::Undetermined => "Undetermined",
        }
    }
}

impl std::fmt::Display for SpectralTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Boundary-limit summary of one probe.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeEvidence {
    pub probe_id: String,
    pub residue_norm: f64,
    pub im_limit: ImLimit,
    pub divergence_exponent: f64,
    pub re_limit: f64,
    pub scale: f64,
    pub converged: bool,
}

impl ProbeEvidence {
    fn from_limit(id: &str, b: &BoundaryLimit) -> Self {
        Self {
            probe_id: id.to_string(),
            residue_norm: b.residue_norm,
            im_limit: b.im_value,
            divergence_exponent: b.divergence_exponent,
            re_limit: b.re_value,
            scale: b.scale,
            converged: b.converged,
        }
    }

    fn is_pole(&self, t: &Thresholds) -> bool {
        self.residue_norm > t.residue * self.scale && self.divergence_exponent >= t.eigen_exponent
    }

    fn is_ac(&self, t: &Thresholds) -> bool {
        matches!(self.im_limit, ImLimit::Finite(v) if v > t.im_zero * self.scale)
    }

    fn im_vanishes(&self, t: &Thresholds) -> bool {
        matches!(self.im_limit, ImLimit::Finite(v) if v.abs() <= t.im_zero * self.scale)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralClass {
    pub tag: SpectralTag,
    pub evidence: Vec<ProbeEvidence>,
    /// Rank of the probe Gram matrix of the residue (eigenvalues only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residue_rank: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cause: Option<String>,
}

impl SpectralClass {
    fn undetermined(cause: String) -> Self {
        Self {
            tag: SpectralTag::Undetermined,
            evidence: Vec::new(),
            residue_rank: None,
            cause: Some(cause),
        }
    }
}

/// Ladder samples of `M` above `x`.
fn matrix_ladder(ev: &Evaluator<'_>, x: f64, cfg: &LadderConfig) -> Result<Vec<(f64, CMatrix)>, String> {
    cfg.heights()
        .into_iter()
        .map(|y| ev(C::new(x, y)).map(|m| (y, m)).map_err(|e| e.to_string()))
        .collect()
}

/// Rank of the Gram matrix `G_ij = g_i* R g_j`.
fn residue_rank(residue: &CMatrix, probes: &[Probe], tol: f64) -> usize {
    let n = probes.len();
    let gram = CMatrix::from_fn(n, n, |i, j| probes[i].vector.dotc(&(residue * &probes[j].vector)));
    numerical_rank(&gram, tol)
}

/// Everything the scan needs from one grid point.
struct PointData {
    class: SpectralClass,
    /// `Σ_g y_h Im⟨M(x+iy_h)g, g⟩` at the rung used for candidate search.
    peak_signal: f64,
    scale: f64,
    raw_pole: bool,
    raw_ac: bool,
    raw_sc: bool,
}

fn analyse(
    ev: &Evaluator<'_>,
    x: f64,
    probes: &[Probe],
    cfg: &ClassifierConfig,
    signal_rung: Option<usize>,
) -> PointData {
    let fail = |cause: String| PointData {
        class: SpectralClass::undetermined(cause),
        peak_signal: 0.0,
        scale: 0.0,
        raw_pole: false,
        raw_ac: false,
        raw_sc: false,
    };
    let ladder = match matrix_ladder(ev, x, &cfg.ladder) {
        Ok(l) => l,
        Err(e) => return fail(e),
    };
    let t = &cfg.thresholds;
    let mut evidence = Vec::with_capacity(probes.len());
    for p in probes {
        let scalar: Vec<(f64, C)> = ladder.iter().map(|(y, m)| (*y, p.form(m))).collect();
        match boundary_limit_from_ladder(x, scalar, &cfg.ladder) {
            Ok(b) => evidence.push(ProbeEvidence::from_limit(&p.id, &b)),
            Err(e) => return fail(e.to_string()),
        }
    }
    let scale = evidence.iter().map(|e| e.scale).fold(0.0, f64::max);
    let peak_signal = signal_rung.map_or(0.0, |h| {
        let (y, m) = &ladder[h];
        probes.iter().map(|p| y * p.form(m).im).sum()
    });
    let pole = evidence.iter().any(|e| e.is_pole(t));
    let ac = !pole && evidence.iter().any(|e| e.is_ac(t));
    let sc = !pole && evidence.iter().any(|e| e.im_limit.is_infinite());
    let resolvent = !pole && evidence.iter().all(|e| e.im_vanishes(t) && e.converged);
    let (tag, rank) = if pole {
        let r = matrix_residue(&ladder, cfg.ladder.ratio);
        (SpectralTag::Eigenvalue, Some(residue_rank(&r, probes, t.residue * scale)))
    } else if ac {
        (SpectralTag::AbsolutelyContinuous, None)
    } else if sc {
        (SpectralTag::SingularContinuousCandidate, None)
    } else if resolvent {
        (SpectralTag::Resolvent, None)
    } else {
        (SpectralTag::ContinuousUnresolved, None)
    };
    PointData {
        class: SpectralClass {
            tag,
            evidence,
            residue_rank: rank,
            cause: None,
        },
        peak_signal,
        scale,
        raw_pole: pole,
        raw_ac: ac,
        raw_sc: sc,
    }
}

/// Classify a single point (no closures, no run-length rule).
pub fn classify_point(provider: &dyn WeylProvider, x: f64, probes: &[Probe], cfg: &ClassifierConfig) -> SpectralClass {
    if let Err(e) = cfg.validate() {
        return SpectralClass::undetermined(e.to_string());
    }
    if let Err(e) = validate_probes(probes, provider.dim()) {
        return SpectralClass::undetermined(e.to_string());
    }
    match provider.anchored(x) {
        Ok(ev) => analyse(&ev, x, probes, cfg, None).class,
        Err(e) => SpectralClass::undetermined(e.to_string()),
    }
}

/// Uniform grid `start + i·step`, `i < count`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub start: f64,
    pub step: f64,
    pub count: usize,
}

pub const MAX_GRID_POINTS: usize = 10_000_000;

impl Grid {
    /// Points `a, a + step, …` up to `b` (inclusive within rounding).
    pub fn new(a: f64, b: f64, step: f64) -> Result<Self, ClassifierError> {
        if !(a.is_finite() && b.is_finite() && a <= b) {
            return Err(ClassifierError::Scan(format!("need finite a ≤ b, got a = {a}, b = {b}")));
        }
        if !(step.is_finite() && step > 0.0) {
            return Err(ClassifierError::Scan(format!("step must be positive, got {step}")));
        }
        let n = ((b - a) / step + 1e-9).floor() + 1.0;
        if n > MAX_GRID_POINTS as f64 {
            return Err(ClassifierError::Scan(format!("{n} grid points exceed the limit {MAX_GRID_POINTS}")));
        }
        Ok(Self {
            start: a,
            step,
            count: n as usize,
        })
    }

    pub fn point(&self, i: usize) -> f64 {
        self.start + i as f64 * self.step
    }

    pub fn end(&self) -> f64 {
        self.point(self.count.saturating_sub(1))
    }

    /// Grid-nearest index; ties go to the lower index.
    pub fn nearest(&self, x: f64) -> usize {
        let t = (x - self.start) / self.step;
        let i = if t - t.floor() <= 0.5 { t.floor() } else { t.ceil() };
        (i.max(0.0) as usize).min(self.count - 1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointReport {
    pub x: f64,
    #[serde(flatten)]
    pub class: SpectralClass,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenvalueRecord {
    /// Refined position.
    pub x: f64,
    pub grid_index: usize,
    /// Largest probe residue norm at the refined position.
    pub residue_norm: f64,
    pub residue_rank: usize,
    /// Probe attaining `residue_norm`.
    pub probe_id: String,
    pub divergence_exponent: f64,
    #[serde(serialize_with = "ser_cmat")]
    pub residue: CMatrix,
}

fn ser_cmat<S: serde::Serializer>(m: &CMatrix, s: S) -> Result<S::Ok, S::Error> {
    let rows: Vec<Vec<[f64; 2]>> = (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect();
    rows.serialize(s)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub provider_id: String,
    pub dim: usize,
    pub probes: Vec<Probe>,
    pub ladder: LadderConfig,
    pub thresholds: Thresholds,
    pub closure: ClosureConfig,
    pub interval: [f64; 2],
    pub step: f64,
    /// Interval sets are inner approximations limited by the probe family.
    pub probe_limited: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralReport {
    pub provenance: Provenance,
    pub grid: Grid,
    pub points: Vec<PointReport>,
    pub eigenvalues: Vec<EigenvalueRecord>,
    pub resolvent_intervals: Vec<(f64, f64)>,
    pub ac_intervals: Vec<(f64, f64)>,
    pub sc_candidate_intervals: Vec<(f64, f64)>,
    /// Raw points with `Im → +∞` (before clc), used by the purity check.
    pub divergent_points: usize,
    pub undetermined_points: usize,
}

impl SpectralReport {
    pub fn tags(&self) -> Vec<SpectralTag> {
        self.points.iter().map(|p| p.class.tag).collect()
    }

    pub fn count(&self, tag: SpectralTag) -> usize {
        self.points.iter().filter(|p| p.class.tag == tag).count()
    }
}

const GOLDEN: f64 = 0.618_033_988_749_894_8;

/// Maximise `f` on `[lo, hi]` to absolute tolerance `tol`.
fn golden_max<F: FnMut(f64) -> Option<f64>>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> Option<f64> {
    let mut x1 = hi - GOLDEN * (hi - lo);
    let mut x2 = lo + GOLDEN * (hi - lo);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    while hi - lo > tol {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - GOLDEN * (hi - lo);
            f1 = f(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + GOLDEN * (hi - lo);
            f2 = f(x2)?;
        }
        if hi - lo <= 4.0 * f64::EPSILON * lo.abs().max(hi.abs()) {
            break;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Locate a pole near `c` by maximising `y·Σ_g Im⟨M(x+iy)g, g⟩` at heights
/// `step/2, step/32, …` down to `1e-7·max(1, |c|)`.
fn refine_pole(ev: &Evaluator<'_>, c: f64, step: f64, probes: &[Probe]) -> Option<f64> {
    let unit = c.abs().max(1.0);
    let y_final = 1e-7 * unit;
    let signal = |x: f64, y: f64| -> Option<f64> {
        let m = ev(C::new(x, y)).ok()?;
        Some(probes.iter().map(|p| y * p.form(&m).im).sum())
    };
    let mut x = c;
    let mut y = 0.5 * step;
    loop {
        let last = y <= y_final;
        let y_eff = y.max(y_final);
        let half = (8.0 * y_eff).min(step);
        let tol = if last { 1e-12 * unit } else { y_eff / 32.0 };
        x = golden_max(|t| signal(t, y_eff), x - half, x + half, tol)?;
        if last {
            return Some(x);
        }
        y /= 16.0;
    }
}

/// Verify a refined position with a full ladder; returns the record if some
/// probe shows a pole there.
fn verify_pole(
    ev: &Evaluator<'_>,
    x: f64,
    grid: &Grid,
    probes: &[Probe],
    cfg: &ClassifierConfig,
) -> Option<EigenvalueRecord> {
    let d = analyse(ev, x, probes, cfg, None);
    if !d.raw_pole {
        return None;
    }
    let t = &cfg.thresholds;
    let best = d
        .class
        .evidence
        .iter()
        .filter(|e| e.is_pole(t))
        .max_by(|a, b| a.residue_norm.total_cmp(&b.residue_norm))?;
    let ladder = matrix_ladder(ev, x, &cfg.ladder).ok()?;
    let residue = matrix_residue(&ladder, cfg.ladder.ratio);
    Some(EigenvalueRecord {
        x,
        grid_index: grid.nearest(x),
        residue_norm: best.residue_norm,
        residue_rank: d.class.residue_rank.unwrap_or(0),
        probe_id: best.probe_id.clone(),
        divergence_exponent: best.divergence_exponent,
        residue,
    })
}

/// Refine candidates, verify, deduplicate within `step/2` and drop positions
/// outside `[a − step/2, b + step/2]`.
fn locate_eigenvalues(
    provider: &dyn WeylProvider,
    grid: &Grid,
    candidates: &[usize],
    probes: &[Probe],
    cfg: &ClassifierConfig,
) -> Vec<EigenvalueRecord> {
    let step = grid.step;
    let found: Vec<Option<EigenvalueRecord>> = cfg.exec.map(candidates.len(), |j| {
        let c = grid.point(candidates[j]);
        let ev = provider.anchored(c).ok()?;
        let x = refine_pole(&ev, c, step, probes)?;
        if x < grid.start - 0.5 * step || x > grid.end() + 0.5 * step {
            return None;
        }
        verify_pole(&ev, x, grid, probes, cfg)
    });
    let mut recs: Vec<EigenvalueRecord> = found.into_iter().flatten().collect();
    recs.sort_by(|a, b| a.x.total_cmp(&b.x));
    let mut out: Vec<EigenvalueRecord> = Vec::with_capacity(recs.len());
    for r in recs {
        match out.last_mut() {
            Some(prev) if r.x - prev.x < 0.5 * step => {
                if r.residue_norm > prev.residue_norm {
                    *prev = r;
                }
            }
            _ => out.push(r),
        }
    }
    out
}

/// Strict local maxima of `signal` with prominence above `floor[i]`.
fn peak_candidates(signal: &[f64], floor: &[f64]) -> Vec<usize> {
    let n = signal.len();
    (0..n)
        .filter(|&i| {
            let left = if i > 0 { Some(signal[i - 1]) } else { None };
            let right = signal.get(i + 1).copied();
            let s = signal[i];
            let ge = left.is_none_or(|l| s >= l) && right.is_none_or(|r| s >= r);
            let gt = left.is_some_and(|l| s > l) || right.is_some_and(|r| s > r);
            let lowest = [left, right].into_iter().flatten().fold(f64::INFINITY, f64::min);
            ge && gt && s - lowest > floor[i]
        })
        .collect()
}

fn check_scan(a: f64, b: f64, step: f64, probes: &[Probe], dim: usize, cfg: &ClassifierConfig) -> Result<Grid, ClassifierError> {
    cfg.validate()?;
    validate_probes(probes, dim)?;
    Grid::new(a, b, step)
}

/// Classify every point of the grid on `[a, b]` and post-process with the
/// closure rules.
pub fn scan_interval(
    provider: &dyn WeylProvider,
    a: f64,
    b: f64,
    step: f64,
    probes: &[Probe],
    cfg: &ClassifierConfig,
) -> Result<SpectralReport, ClassifierError> {
    let grid = check_scan(a, b, step, probes, provider.dim(), cfg)?;
    let rung = cfg.ladder.nearest_rung(0.5 * step);
    let data: Vec<PointData> = cfg.exec.map(grid.count, |i| {
        let x = grid.point(i);
        match provider.anchored(x) {
            Ok(ev) => analyse(&ev, x, probes, cfg, Some(rung)),
            Err(e) => PointData {
                class: SpectralClass::undetermined(e.to_string()),
                peak_signal: 0.0,
                scale: 0.0,
                raw_pole: false,
                raw_ac: false,
                raw_sc: false,
            },
        }
    });

    let signal: Vec<f64> = data.iter().map(|d| d.peak_signal).collect();
    let floor: Vec<f64> = data.iter().map(|d| cfg.thresholds.residue * d.scale).collect();
    let mut candidates = peak_candidates(&signal, &floor);
    candidates.extend(data.iter().enumerate().filter(|(_, d)| d.raw_pole).map(|(i, _)| i));
    candidates.sort_unstable();
    candidates.dedup();
    let eigenvalues = locate_eigenvalues(provider, &grid, &candidates, probes, cfg);

    let n = grid.count;
    let mut eigen = vec![false; n];
    for e in &eigenvalues {
        eigen[e.grid_index] = true;
    }
    for (i, d) in data.iter().enumerate() {
        if d.raw_pole {
            eigen[i] = true;
        }
    }
    let eigen_set = GridSet::new(grid.start, grid.step, eigen.clone());
    let raw_ac = GridSet::new(grid.start, grid.step, data.iter().map(|d| d.raw_ac).collect());
    let raw_sc = GridSet::new(grid.start, grid.step, data.iter().map(|d| d.raw_sc).collect());
    let ac = clac(&raw_ac, &cfg.closure).minus(&eigen_set);
    let sc = clc(&raw_sc, &cfg.closure).minus(&eigen_set);

    let raw_res: Vec<bool> = data
        .iter()
        .enumerate()
        .map(|(i, d)| d.class.tag == SpectralTag::Resolvent && !eigen[i] && !ac.flags[i] && !sc.flags[i])
        .collect();
    let mut resolvent = vec![false; n];
    for (s, e) in runs(&raw_res) {
        if e + 1 - s >= cfg.thresholds.resolvent_run {
            resolvent[s..=e].iter_mut().for_each(|f| *f = true);
        }
    }

    let mut points = Vec::with_capacity(n);
    for (i, d) in data.into_iter().enumerate() {
        let mut class = d.class;
        let tag = if eigen[i] {
            SpectralTag::Eigenvalue
        } else if ac.flags[i] {
            SpectralTag::AbsolutelyContinuous
        } else if sc.flags[i] {
            SpectralTag::SingularContinuousCandidate
        } else if resolvent[i] {
            SpectralTag::Resolvent
        } else if class.tag == SpectralTag::Undetermined {
            SpectralTag::Undetermined
        } else {
            SpectralTag::ContinuousUnresolved
        };
        if tag == SpectralTag::Eigenvalue {
            if let Some(e) = eigenvalues.iter().find(|e| e.grid_index == i) {
                class.residue_rank = Some(e.residue_rank);
            }
        } else {
            class.residue_rank = None;
        }
        class.tag = tag;
        points.push(PointReport { x: grid.point(i), class });
    }

    let resolvent_intervals = GridSet::new(grid.start, grid.step, resolvent).intervals();
    let undetermined_points = points.iter().filter(|p| p.class.tag == SpectralTag::Undetermined).count();
    Ok(SpectralReport {
        provenance: Provenance {
            provider_id: provider.id(),
            dim: provider.dim(),
            probes: probes.to_vec(),
            ladder: cfg.ladder,
            thresholds: cfg.thresholds,
            closure: cfg.closure,
            interval: [a, b],
            step,
            probe_limited: true,
        },
        grid,
        points,
        eigenvalues,
        resolvent_intervals,
        ac_intervals: ac.intervals(),
        sc_candidate_intervals: sc.intervals(),
        divergent_points: raw_sc.count(),
        undetermined_points,
    })
}

/// Eigenvalues in `[a, b]` by residue refinement alone: candidates are peaks
/// of `y·Σ Im⟨M g, g⟩` at `y ≈ step/2` on the grid.
pub fn find_eigenvalues(
    provider: &dyn WeylProvider,
    a: f64,
    b: f64,
    step: f64,
    probes: &[Probe],
    cfg: &ClassifierConfig,
) -> Result<Vec<EigenvalueRecord>, ClassifierError> {
    let grid = check_scan(a, b, step, probes, provider.dim(), cfg)?;
    let heights = cfg.ladder.heights();
    let y = heights[cfg.ladder.nearest_rung(0.5 * step)];
    let y0 = heights[0];
    let samples: Vec<(f64, f64)> = cfg.exec.map(grid.count, |i| {
        let x = grid.point(i);
        let Ok(ev) = provider.anchored(x) else {
            return (0.0, 0.0);
        };
        let sig = ev(C::new(x, y)).map_or(0.0, |m| probes.iter().map(|p| y * p.form(&m).im).sum());
        let scale = ev(C::new(x, y0)).map_or(0.0, |m| probes.iter().map(|p| p.form(&m).norm()).fold(0.0, f64::max));
        (sig, scale)
    });
    let signal: Vec<f64> = samples.iter().map(|s| s.0).collect();
    let floor: Vec<f64> = samples.iter().map(|s| cfg.thresholds.residue * s.1).collect();
    let candidates = peak_candidates(&signal, &floor);
    Ok(locate_eigenvalues(provider, &grid, &candidates, probes, cfg))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Purity {
    PurelyAc,
    PurelySc,
    Mixed,
    Empty,
}

/// Purity of the spectrum in the scanned interval: no residues and only
/// sparsely many divergent points → purely ac; no residues and no ac set but
/// an sc-candidate set → purely sc.
pub fn purity_check(report: &SpectralReport) -> Purity {
    let eigen = !report.eigenvalues.is_empty() || report.count(SpectralTag::Eigenvalue) > 0;
    let ac = !report.ac_intervals.is_empty();
    let sc = !report.sc_candidate_intervals.is_empty();
    let sparse_divergence = report.divergent_points < report.provenance.closure.count_floor;
    match (eigen, ac, sc) {
        (false, false, false) => Purity::Empty,
        (false, true, false) if sparse_divergence => Purity::PurelyAc,
        (false, false, true) => Purity::PurelySc,
        _ => Purity::Mixed,
    }
}
