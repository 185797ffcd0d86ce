//! Half-line Titchmarsh–Weyl functions of `−d²/dx² + q` and the coupled
//! full-line functions `m` and `m̃`.
//!
//! Conventions. On each half-line the square-integrable solution is taken as
//! `e^{i√λ|x|}` beyond the support of `q` (branch `Im √λ > 0`, limits onto the
//! cut from above) and integrated inward to 0. With `f₊` the solution on
//! `[0, ∞)` and `g(x) = f₋(−x)` the reflected solution on `(−∞, 0]`,
//!
//! ```text
//! m₊ = f₊′(0)/f₊(0),   m₋ = g′(0)/g(0),
//! m  = −(m₊ + m₋)⁻¹,   m̃ = [[−m₊, 1], [1, 1/m₋]]⁻¹.
//! ```
//!
//! Both coupled functions are evaluated pole-free from the boundary states
//! `(v±, p±)`: with `D = p₊v₋ + p₋v₊`,
//! `m = −v₊v₋/D` and `m̃ = D⁻¹ [[−v₊v₋, p₋v₊], [p₋v₊, p₊p₋]]`.
//! `D` vanishes exactly at eigenvalues; at an eigenvalue whose eigenfunction
//! vanishes at 0 (`v₊ = v₋ = 0`) the numerator of `m` vanishes to second order
//! and `m` is regular there, while the `(2,2)` entry of `m̃` keeps the pole.

use crate::linalg::CMatrix;
use crate::ode::{integrate_adaptive, integrate_on_mesh, OdeConfig, OdeError, Scaled, State};
use crate::provider::{Evaluator, ProviderError, WeylProvider};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

type C = Complex64;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum SturmError {
    #[error("invalid potential: {0}")]
    InvalidPotential(String),
    #[error("degenerate trace: f(0) vanishes at λ = {0}")]
    DegenerateTrace(C),
    #[error("pole of m at λ = {0}: m₊ + m₋ vanishes")]
    PoleOfM(C),
    #[error("m̃ undefined at λ = {0}: m₋ vanishes")]
    MMinusZero(C),
    #[error("m̃ undefined at λ = {0}: the 2×2 matrix is singular")]
    SingularMatrix(C),
    #[error(transparent)]
    Ode(#[from] OdeError),
}

/// Shape of `q` on one piece.
#[derive(Clone)]
pub enum PieceProfile {
    /// `q(x) = Σ c_j x^j`.
    Polynomial(Vec<f64>),
    /// A bounded real function; evaluated only inside its piece.
    Function(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl PieceProfile {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            PieceProfile::Polynomial(c) => c.iter().rev().fold(0.0, |acc, &cj| acc * x + cj),
            PieceProfile::Function(f) => f(x),
        }
    }
}

impl fmt::Debug for PieceProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PieceProfile::Polynomial(c) => f.debug_tuple("Polynomial").field(c).finish(),
            PieceProfile::Function(_) => f.write_str("Function(..)"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct PotentialPiece {
    pub a: f64,
    pub b: f64,
    pub profile: PieceProfile,
}

/// Compactly supported bounded potential: `q ≡ 0` for `|x| > support_radius`
/// and outside every piece.
#[derive(Debug, Clone)]
pub struct Potential {
    pieces: Vec<PotentialPiece>,
    support_radius: f64,
    sup_abs: f64,
}

/// Serializable description of a potential made of polynomial pieces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialSpec {
    /// Defaults to the largest `|endpoint|` of the pieces.
    #[serde(default)]
    pub support_radius: Option<f64>,
    #[serde(default)]
    pub pieces: Vec<PieceSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceSpec {
    pub interval: [f64; 2],
    /// Polynomial coefficients in powers of `x`, constant term first.
    pub coeffs: Vec<f64>,
}

const SUP_SAMPLES: usize = 257;

impl Potential {
    pub fn new(mut pieces: Vec<PotentialPiece>, support_radius: f64) -> Result<Self, SturmError> {
        if !(support_radius.is_finite() && support_radius >= 0.0) {
            return Err(SturmError::InvalidPotential(format!(
                "support_radius must be finite and ≥ 0, got {support_radius}"
            )));
        }
        pieces.sort_by(|p, q| p.a.total_cmp(&q.a));
        let mut sup: f64 = 0.0;
        for (i, p) in pieces.iter().enumerate() {
            if !(p.a.is_finite() && p.b.is_finite() && p.a < p.b) {
                return Err(SturmError::InvalidPotential(format!(
                    "piece {i}: interval [{}, {}] must be finite with a < b",
                    p.a, p.b
                )));
            }
            if p.a < -support_radius || p.b > support_radius {
                return Err(SturmError::InvalidPotential(format!(
                    "piece {i}: [{}, {}] exceeds support radius {support_radius}",
                    p.a, p.b
                )));
            }
            if i > 0 && p.a < pieces[i - 1].b {
                return Err(SturmError::InvalidPotential(format!("pieces {} and {i} overlap", i - 1)));
            }
            if let PieceProfile::Polynomial(c) = &p.profile {
                if c.iter().any(|v| !v.is_finite()) {
                    return Err(SturmError::InvalidPotential(format!("piece {i}: non-finite coefficient")));
                }
            }
            for s in 0..SUP_SAMPLES {
                let x = p.a + (p.b - p.a) * s as f64 / (SUP_SAMPLES - 1) as f64;
                let v = p.profile.eval(x);
                if !v.is_finite() {
                    return Err(SturmError::InvalidPotential(format!(
                        "piece {i}: q({x}) is not finite"
                    )));
                }
                sup = sup.max(v.abs());
            }
        }
        Ok(Self {
            pieces,
            support_radius,
            sup_abs: sup,
        })
    }

    pub fn zero() -> Self {
        Self {
            pieces: Vec::new(),
            support_radius: 0.0,
            sup_abs: 0.0,
        }
    }

    /// `q = −v0` on `[−a, a]`.
    pub fn square_well(v0: f64, a: f64) -> Result<Self, SturmError> {
        Self::constant(-v0, -a, a)
    }

    /// `q = c` on `[a, b]`, zero elsewhere.
    pub fn constant(c: f64, a: f64, b: f64) -> Result<Self, SturmError> {
        let piece = PotentialPiece {
            a,
            b,
            profile: PieceProfile::Polynomial(vec![c]),
        };
        Self::new(vec![piece], a.abs().max(b.abs()))
    }

    pub fn from_spec(spec: &PotentialSpec) -> Result<Self, SturmError> {
        let pieces: Vec<PotentialPiece> = spec
            .pieces
            .iter()
            .map(|p| PotentialPiece {
                a: p.interval[0],
                b: p.interval[1],
                profile: PieceProfile::Polynomial(p.coeffs.clone()),
            })
            .collect();
        let extent = pieces.iter().fold(0.0f64, |m, p| m.max(p.a.abs()).max(p.b.abs()));
        Self::new(pieces, spec.support_radius.unwrap_or(extent))
    }

    pub fn pieces(&self) -> &[PotentialPiece] {
        &self.pieces
    }

    pub fn support_radius(&self) -> f64 {
        self.support_radius
    }

    /// Sampled estimate of `sup |q|`.
    pub fn sup_abs(&self) -> f64 {
        self.sup_abs
    }

    /// Same potential with a larger (or smaller) support radius.
    pub fn with_support_radius(&self, radius: f64) -> Result<Self, SturmError> {
        Self::new(self.pieces.clone(), radius)
    }

    pub fn value(&self, x: f64) -> f64 {
        self.pieces
            .iter()
            .find(|p| p.a <= x && x <= p.b)
            .map_or(0.0, |p| p.profile.eval(x))
    }

    /// Segments of `[0, X]` in the coordinate `t = ±x` of the given side, each
    /// carrying the piece that covers it (if any).
    fn half_segments(&self, side: Side) -> Vec<(f64, f64, Option<usize>)> {
        let s = side.sign();
        let x = self.support_radius;
        let mut cuts = vec![0.0, x];
        for p in &self.pieces {
            for e in [p.a * s, p.b * s] {
                if e > 0.0 && e < x {
                    cuts.push(e);
                }
            }
        }
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        cuts.windows(2)
            .filter(|w| w[1] > w[0])
            .map(|w| {
                let mid = 0.5 * (w[0] + w[1]) * s;
                let piece = self.pieces.iter().position(|p| p.a < mid && mid < p.b);
                (w[0], w[1], piece)
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Plus,
    Minus,
}

impl Side {
    fn sign(self) -> f64 {
        match self {
            Side::Plus => 1.0,
            Side::Minus => -1.0,
        }
    }
}

/// `√λ` on the branch `Im √λ ≥ 0`; real `λ > 0` maps to the positive root
/// (the boundary value from the upper half-plane).
pub fn sqrt_upper(lambda: C) -> C {
    let k = lambda.sqrt();
    if k.im < 0.0 {
        -k
    } else {
        k
    }
}

/// Meshes of one half-line solve, one per segment (outermost first).
type Meshes = Vec<Vec<f64>>;

#[derive(Debug, Clone)]
pub struct HalfLineM {
    pub side: Side,
    pub potential: Potential,
    pub ode: OdeConfig,
}

impl HalfLineM {
    pub fn new(side: Side, potential: Potential) -> Self {
        Self {
            side,
            potential,
            ode: OdeConfig::default(),
        }
    }

    /// Boundary state `(f(0), f′(0))` (reflected coordinate on the minus side).
    fn boundary_state(&self, lambda: C, replay: Option<&Meshes>) -> Result<(State, Meshes), SturmError> {
        boundary_state(&self.potential, self.side, &self.ode, lambda, replay)
    }

    pub fn eval(&self, lambda: C) -> Result<C, SturmError> {
        let ([v, p], _) = self.boundary_state(lambda, None)?;
        if v.norm() < 1e-300 {
            return Err(SturmError::DegenerateTrace(lambda));
        }
        Ok(p / v)
    }
}

fn boundary_state(
    pot: &Potential,
    side: Side,
    ode: &OdeConfig,
    lambda: C,
    replay: Option<&Meshes>,
) -> Result<(State, Meshes), SturmError> {
    ode.validate()?;
    let k = sqrt_upper(lambda);
    let mut y = Scaled::new([C::new(1.0, 0.0), C::new(0.0, 1.0) * k]);
    let segs = pot.half_segments(side);
    let s = side.sign();
    let mut meshes = Vec::with_capacity(segs.len());
    for (i, &(a, b, piece)) in segs.iter().rev().enumerate() {
        let rhs = |t: f64, st: &State| -> State {
            let q = piece.map_or(0.0, |j| pot.pieces[j].profile.eval(s * t));
            [st[1], (q - lambda) * st[0]]
        };
        match replay {
            Some(m) => {
                y = integrate_on_mesh(rhs, &m[i], y)?;
            }
            None => {
                let (end, mesh) = integrate_adaptive(rhs, b, a, y, ode)?;
                y = end;
                meshes.push(mesh);
            }
        }
    }
    Ok((y.state, meshes))
}

/// `m₊` or `m₋` at `λ`.
pub fn m_half(h: &HalfLineM, lambda: C) -> Result<C, SturmError> {
    h.eval(lambda)
}

/// Both boundary states, from which `m` and `m̃` are formed.
#[derive(Debug, Clone, Copy)]
struct Traces {
    v_plus: C,
    p_plus: C,
    v_minus: C,
    p_minus: C,
}

impl Traces {
    fn denominator(&self, lambda: C) -> Result<C, SturmError> {
        let a = self.p_plus * self.v_minus;
        let b = self.p_minus * self.v_plus;
        let d = a + b;
        if d.norm() <= 4.0 * f64::EPSILON * (a.norm() + b.norm()) || d.norm() < 1e-300 {
            return Err(SturmError::PoleOfM(lambda));
        }
        Ok(d)
    }

    fn m(&self, lambda: C) -> Result<C, SturmError> {
        let d = self.denominator(lambda)?;
        Ok(-self.v_plus * self.v_minus / d)
    }

    fn m_tilde(&self, lambda: C) -> Result<CMatrix, SturmError> {
        if self.p_minus.norm() <= 4.0 * f64::EPSILON * self.v_minus.norm() {
            return Err(SturmError::MMinusZero(lambda));
        }
        let d = self.denominator(lambda).map_err(|_| SturmError::SingularMatrix(lambda))?;
        let off = self.p_minus * self.v_plus / d;
        Ok(CMatrix::from_row_slice(
            2,
            2,
            &[-self.v_plus * self.v_minus / d, off, off, self.p_plus * self.p_minus / d],
        ))
    }
}

/// Solver for the coupled functions of one potential. The meshes of an
/// anchored evaluator are frozen, so every λ on a ladder sees the same
/// discretisation.
#[derive(Debug, Clone)]
pub struct CoupledSolver {
    pub potential: Potential,
    pub ode: OdeConfig,
}

/// Imaginary offset of the pilot solve that fixes an anchored mesh.
const PILOT_HEIGHT: f64 = 0.1;

impl CoupledSolver {
    pub fn new(potential: Potential) -> Self {
        Self {
            potential,
            ode: OdeConfig::default(),
        }
    }

    fn traces(&self, lambda: C, replay: Option<&(Meshes, Meshes)>) -> Result<Traces, SturmError> {
        let ([vp, pp], _) = boundary_state(&self.potential, Side::Plus, &self.ode, lambda, replay.map(|m| &m.0))?;
        let ([vm, pm], _) = boundary_state(&self.potential, Side::Minus, &self.ode, lambda, replay.map(|m| &m.1))?;
        Ok(Traces {
            v_plus: vp,
            p_plus: pp,
            v_minus: vm,
            p_minus: pm,
        })
    }

    fn pilot(&self, anchor: f64) -> Result<(Meshes, Meshes), SturmError> {
        let lambda = C::new(anchor, PILOT_HEIGHT);
        let (_, plus) = boundary_state(&self.potential, Side::Plus, &self.ode, lambda, None)?;
        let (_, minus) = boundary_state(&self.potential, Side::Minus, &self.ode, lambda, None)?;
        Ok((plus, minus))
    }

    pub fn m_plus(&self, lambda: C) -> Result<C, SturmError> {
        m_half(&self.half(Side::Plus), lambda)
    }

    pub fn m_minus(&self, lambda: C) -> Result<C, SturmError> {
        m_half(&self.half(Side::Minus), lambda)
    }

    fn half(&self, side: Side) -> HalfLineM {
        HalfLineM {
            side,
            potential: self.potential.clone(),
            ode: self.ode,
        }
    }

    pub fn m(&self, lambda: C) -> Result<C, SturmError> {
        self.traces(lambda, None)?.m(lambda)
    }

    pub fn m_tilde(&self, lambda: C) -> Result<CMatrix, SturmError> {
        self.traces(lambda, None)?.m_tilde(lambda)
    }
}

/// `m(λ) = −(m₊(λ) + m₋(λ))⁻¹`.
pub fn coupled_m(p: &Potential, lambda: C) -> Result<C, SturmError> {
    CoupledSolver::new(p.clone()).m(lambda)
}

/// `m̃(λ) = [[−m₊, 1], [1, 1/m₋]]⁻¹`.
pub fn coupled_m_tilde(p: &Potential, lambda: C) -> Result<CMatrix, SturmError> {
    CoupledSolver::new(p.clone()).m_tilde(lambda)
}

fn provider_err(lambda: C) -> impl Fn(SturmError) -> ProviderError {
    move |e| ProviderError::new(lambda, e.to_string())
}

/// The scalar coupled function `m` as a classifier input.
#[derive(Debug, Clone)]
pub struct CoupledMProvider(pub CoupledSolver);

/// The 2×2 block function `m̃` as a classifier input.
#[derive(Debug, Clone)]
pub struct CoupledMTildeProvider(pub CoupledSolver);

fn anchored_with<'a>(
    solver: &'a CoupledSolver,
    anchor: f64,
    finish: fn(&Traces, C) -> Result<CMatrix, SturmError>,
) -> Result<Evaluator<'a>, ProviderError> {
    let meshes = solver.pilot(anchor).map_err(provider_err(C::new(anchor, PILOT_HEIGHT)))?;
    Ok(Box::new(move |z| {
        let t = solver.traces(z, Some(&meshes)).map_err(provider_err(z))?;
        finish(&t, z).map_err(provider_err(z))
    }))
}

fn finish_m(t: &Traces, z: C) -> Result<CMatrix, SturmError> {
    Ok(CMatrix::from_element(1, 1, t.m(z)?))
}

fn finish_m_tilde(t: &Traces, z: C) -> Result<CMatrix, SturmError> {
    t.m_tilde(z)
}

impl WeylProvider for CoupledMProvider {
    fn dim(&self) -> usize {
        1
    }

    fn id(&self) -> String {
        format!("coupled-m(X={})", self.0.potential.support_radius())
    }

    fn eval(&self, lambda: C) -> Result<CMatrix, ProviderError> {
        self.0
            .traces(lambda, None)
            .and_then(|t| finish_m(&t, lambda))
            .map_err(provider_err(lambda))
    }

    fn anchored(&self, anchor: f64) -> Result<Evaluator<'_>, ProviderError> {
        anchored_with(&self.0, anchor, finish_m)
    }
}

impl WeylProvider for CoupledMTildeProvider {
    fn dim(&self) -> usize {
        2
    }

    fn id(&self) -> String {
        format!("coupled-m-tilde(X={})", self.0.potential.support_radius())
    }

    fn eval(&self, lambda: C) -> Result<CMatrix, ProviderError> {
        self.0
            .traces(lambda, None)
            .and_then(|t| finish_m_tilde(&t, lambda))
            .map_err(provider_err(lambda))
    }

    fn anchored(&self, anchor: f64) -> Result<Evaluator<'_>, ProviderError> {
        anchored_with(&self.0, anchor, finish_m_tilde)
    }
}
