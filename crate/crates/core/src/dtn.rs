//! Dirichlet-to-Neumann maps of `−Δ + q(r)` on ℝ² across the circle `r = R`,
//! one angular Fourier mode at a time.
//!
//! For mode `k` the radial equation is
//! `−v″ − v′/r + (k²/r² + q − λ) v = 0`. The interior solution `v` is regular
//! at 0; the exterior solution `u` equals `H_k⁽¹⁾(√λ r)` beyond the support of
//! `q`. With `W = v u′ − v′ u` at `r = R`:
//!
//! ```text
//! Λᵢ = v′/v,   Λₑ = −u′/u,   M = (Λᵢ + Λₑ)⁻¹ = −v u / W,
//! M̃ = W⁻¹ [[−v u, v u′], [v u′, −v′ u′]].
//! ```
//!
//! `M` and `M̃` are computed from the Wronskian form, which has no poles at
//! interior Dirichlet eigenvalues.
//!
//! Near `r = 0` the regular solution is summed as a Frobenius series
//! `v = r^k Σ c_N r^N` (exact recurrence for polynomial `q`), then continued by
//! Runge–Kutta; the series radius is capped so that `√(|λ| + sup|q|)·r ≤ 8`.

use crate::linalg::CMatrix;
use crate::ode::{integrate_adaptive, integrate_on_mesh, OdeConfig, OdeError, Scaled, State};
use crate::provider::{Evaluator, ProviderError, WeylProvider};
use crate::special::hankel1_with_derivative;
use crate::sturm::{sqrt_upper, PieceProfile, Potential};
use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

type C = Complex64;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum DtnError {
    #[error("invalid radial operator: {0}")]
    InvalidOperator(String),
    #[error("mode {k} exceeds the truncation K = {k_max}")]
    ModeOutOfRange { k: u32, k_max: u32 },
    #[error("eigenvalue candidate at λ = {lambda} in mode {k}: the Wronskian vanishes")]
    EigenvalueCandidate { k: u32, lambda: C },
    #[error("M̃ undefined at λ = {lambda} in mode {k}: Λₑ vanishes")]
    ExteriorDtnZero { k: u32, lambda: C },
    #[error("Frobenius series did not converge at λ = {lambda} in mode {k}")]
    Series { k: u32, lambda: C },
    #[error("Hankel matching overflowed at λ = {lambda} in mode {k}")]
    Overflow { k: u32, lambda: C },
    #[error("modes flagged: {}", .0.iter().map(|(k, m)| format!("k={k}: {m}")).collect::<Vec<_>>().join("; "))]
    Flagged(Vec<(i64, String)>),
    #[error(transparent)]
    Ode(#[from] OdeError),
}

/// `−Δ + q(|x|)` with interface circle of radius `r_interface` and Fourier
/// truncation `k_max`.
#[derive(Debug, Clone)]
pub struct RadialOperator {
    q: Potential,
    r_interface: f64,
    k_max: u32,
    pub ode: OdeConfig,
}

impl RadialOperator {
    /// `q` is given on `r ≥ 0`: every piece must lie in `[0, support_radius]`.
    pub fn new(q: Potential, r_interface: f64, k_max: u32) -> Result<Self, DtnError> {
        if !(r_interface.is_finite() && r_interface > 0.0) {
            return Err(DtnError::InvalidOperator(format!(
                "interface radius must be positive, got {r_interface}"
            )));
        }
        if let Some(p) = q.pieces().iter().find(|p| p.a < 0.0) {
            return Err(DtnError::InvalidOperator(format!(
                "radial potential piece [{}, {}] extends below r = 0",
                p.a, p.b
            )));
        }
        Ok(Self {
            q,
            r_interface,
            k_max,
            ode: OdeConfig::default(),
        })
    }

    pub fn free(r_interface: f64, k_max: u32) -> Result<Self, DtnError> {
        Self::new(Potential::zero(), r_interface, k_max)
    }

    /// `q = −v0` for `r < r0`.
    pub fn well(v0: f64, r0: f64, r_interface: f64, k_max: u32) -> Result<Self, DtnError> {
        let q = Potential::constant(-v0, 0.0, r0).map_err(|e| DtnError::InvalidOperator(e.to_string()))?;
        Self::new(q, r_interface, k_max)
    }

    pub fn potential(&self) -> &Potential {
        &self.q
    }

    pub fn r_interface(&self) -> f64 {
        self.r_interface
    }

    pub fn k_max(&self) -> u32 {
        self.k_max
    }

    /// Radius beyond which `u` is an exact Hankel function.
    pub fn matching_radius(&self) -> f64 {
        self.q.support_radius().max(self.r_interface)
    }

    fn check_mode(&self, k: u32) -> Result<(), DtnError> {
        if k > self.k_max {
            Err(DtnError::ModeOutOfRange { k, k_max: self.k_max })
        } else {
            Ok(())
        }
    }

    fn q_at(&self, piece: Option<usize>, r: f64) -> f64 {
        piece.map_or(0.0, |j| self.q.pieces()[j].profile.eval(r))
    }

    /// Segments of `[lo, hi]` split at potential breakpoints, with covering piece.
    fn segments(&self, lo: f64, hi: f64) -> Vec<(f64, f64, Option<usize>)> {
        let mut cuts = vec![lo, hi];
        for p in self.q.pieces() {
            for e in [p.a, p.b] {
                if e > lo && e < hi {
                    cuts.push(e);
                }
            }
        }
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        cuts.windows(2)
            .filter(|w| w[1] > w[0])
            .map(|w| {
                let mid = 0.5 * (w[0] + w[1]);
                (w[0], w[1], self.q.pieces().iter().position(|p| p.a < mid && mid < p.b))
            })
            .collect()
    }

    /// Polynomial coefficients of `q` near 0 and the radius up to which they hold.
    fn origin_profile(&self) -> (Vec<f64>, f64, bool) {
        let pieces = self.q.pieces();
        match pieces.iter().find(|p| p.a <= 0.0) {
            Some(p) => match &p.profile {
                PieceProfile::Polynomial(c) => (c.clone(), p.b, true),
                PieceProfile::Function(f) => (vec![f(0.0)], p.b, false),
            },
            None => (vec![], pieces.first().map_or(f64::INFINITY, |p| p.a), true),
        }
    }

    fn series_radius(&self, lambda: C, rho: f64) -> f64 {
        let (_, valid, exact) = self.origin_profile();
        let mut rs = rho.min(valid).min(8.0 / (lambda.norm() + self.q.sup_abs()).sqrt());
        if !exact {
            rs = rs.min(1e-4 * rho);
        }
        rs
    }
}

fn radial_rhs<'a>(op: &'a RadialOperator, k: u32, lambda: C, piece: Option<usize>) -> impl Fn(f64, &State) -> State + 'a {
    let k2 = (k * k) as f64;
    move |r: f64, y: &State| {
        let q = op.q_at(piece, r);
        [y[1], -y[1] / r + (k2 / (r * r) + q - lambda) * y[0]]
    }
}

/// Frozen discretisation for one mode: series radius and ODE meshes.
#[derive(Debug, Clone)]
struct ModePlan {
    r_series: f64,
    interior: Vec<Vec<f64>>,
    exterior: Vec<Vec<f64>>,
}

const SERIES_MAX_TERMS: usize = 2000;

/// Regular state `(v, v′)` at `r`, `v = r^k Σ c_N r^N`, `c_0 = 1`.
fn frobenius(op: &RadialOperator, k: u32, lambda: C, r: f64) -> Result<Scaled, DtnError> {
    let (qc, _, _) = op.origin_profile();
    let deg = qc.len().max(1);
    // p_m r^m for p = q − λ.
    let mut pr: Vec<C> = (0..deg)
        .map(|m| C::from(qc.get(m).copied().unwrap_or(0.0) * r.powi(m as i32)))
        .collect();
    pr[0] -= lambda;
    let kf = k as f64;
    let r2 = r * r;
    let mut t: Vec<C> = vec![C::new(1.0, 0.0), C::new(0.0, 0.0)];
    let mut s = t[0];
    let mut ds = C::new(0.0, 0.0);
    let mut small = 0;
    for n in 2..SERIES_MAX_TERMS {
        let mut acc = C::new(0.0, 0.0);
        for (m, p) in pr.iter().enumerate() {
            if m + 2 > n {
                break;
            }
            acc += p * t[n - 2 - m];
        }
        let nf = n as f64;
        let tn = acc * (r2 / (nf * (nf + 2.0 * kf)));
        t.push(tn);
        s += tn;
        ds += tn * nf;
        let mag = tn.norm();
        if mag <= 1e-17 * s.norm().max(ds.norm()) {
            small += 1;
            if small >= deg + 2 && n > 8 {
                let mut st = Scaled::new([s, s * (kf / r) + ds / r]);
                st.log_scale += kf * r.ln();
                return Ok(st);
            }
        } else {
            small = 0;
        }
    }
    Err(DtnError::Series { k, lambda })
}

impl RadialOperator {
    /// Regular interior state at radius `rho` (scale tracked in `log_scale`).
    fn regular_state(&self, k: u32, lambda: C, rho: f64, plan: Option<&ModePlan>) -> Result<(Scaled, f64, Vec<Vec<f64>>), DtnError> {
        self.ode.validate()?;
        let rs = plan.map_or_else(|| self.series_radius(lambda, rho), |p| p.r_series);
        let mut y = frobenius(self, k, lambda, rs)?;
        let mut meshes = Vec::new();
        for (i, (a, b, piece)) in self.segments(rs, rho).into_iter().enumerate() {
            let f = radial_rhs(self, k, lambda, piece);
            match plan {
                Some(p) => y = integrate_on_mesh(f, &p.interior[i], y)?,
                None => {
                    let (end, mesh) = integrate_adaptive(f, a, b, y, &self.ode)?;
                    y = end;
                    meshes.push(mesh);
                }
            }
        }
        Ok((y, rs, meshes))
    }

    /// Outgoing exterior state at radius `rho`.
    fn outgoing_state(&self, k: u32, lambda: C, rho: f64, plan: Option<&ModePlan>) -> Result<(Scaled, Vec<Vec<f64>>), DtnError> {
        let sq = sqrt_upper(lambda);
        let xe = self.matching_radius().max(rho);
        let (h, dh) = hankel1_with_derivative(k, sq * xe);
        let start = [h, dh * sq];
        if !(start[0].is_finite() && start[1].is_finite()) || start[0].norm() == 0.0 {
            return Err(DtnError::Overflow { k, lambda });
        }
        let mut y = Scaled::new(start);
        let mut meshes = Vec::new();
        for (i, (a, b, piece)) in self.segments(rho, xe).into_iter().rev().enumerate() {
            let f = radial_rhs(self, k, lambda, piece);
            match plan {
                Some(p) => y = integrate_on_mesh(f, &p.exterior[i], y)?,
                None => {
                    let (end, mesh) = integrate_adaptive(f, b, a, y, &self.ode)?;
                    y = end;
                    meshes.push(mesh);
                }
            }
        }
        Ok((y, meshes))
    }

    fn pilot(&self, k: u32, anchor: f64) -> Result<ModePlan, DtnError> {
        let lambda = C::new(anchor, PILOT_HEIGHT);
        let r = self.r_interface;
        let (_, rs, interior) = self.regular_state(k, lambda, r, None)?;
        let (_, exterior) = self.outgoing_state(k, lambda, r, None)?;
        Ok(ModePlan {
            r_series: rs,
            interior,
            exterior,
        })
    }

    fn interface_states(&self, k: u32, lambda: C, plan: Option<&ModePlan>) -> Result<Interface, DtnError> {
        self.check_mode(k)?;
        let r = self.r_interface;
        let (v, _, _) = self.regular_state(k, lambda, r, plan)?;
        let (u, _) = self.outgoing_state(k, lambda, r, plan)?;
        Ok(Interface { k, lambda, v, u })
    }
}

const PILOT_HEIGHT: f64 = 0.1;
const POLE_TOL: f64 = 1e-12;

/// A DtN eigenvalue, or a flag at one of its poles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "lowercase")]
pub enum DtnValue {
    Finite(#[serde(serialize_with = "ser_c")] C),
    Pole,
}

fn ser_c<S: serde::Serializer>(z: &C, s: S) -> Result<S::Ok, S::Error> {
    use serde::Serialize;
    [z.re, z.im].serialize(s)
}

impl DtnValue {
    pub fn finite(self) -> Option<C> {
        match self {
            DtnValue::Finite(z) => Some(z),
            DtnValue::Pole => None,
        }
    }
}

/// Interior and exterior states at the interface.
#[derive(Debug, Clone, Copy)]
struct Interface {
    k: u32,
    lambda: C,
    v: Scaled,
    u: Scaled,
}

impl Interface {
    fn wronskian_scaled(&self) -> (C, f64) {
        let [v, dv] = self.v.state;
        let [u, du] = self.u.state;
        (v * du - dv * u, (v * du).norm() + (dv * u).norm())
    }

    fn lambda_i(&self, r: f64) -> DtnValue {
        let [v, dv] = self.v.state;
        if v.norm() <= POLE_TOL * v.norm().max(r * dv.norm()) {
            DtnValue::Pole
        } else {
            DtnValue::Finite(dv / v)
        }
    }

    fn lambda_e(&self, r: f64) -> DtnValue {
        let [u, du] = self.u.state;
        if u.norm() <= POLE_TOL * u.norm().max(r * du.norm()) {
            DtnValue::Pole
        } else {
            DtnValue::Finite(-du / u)
        }
    }

    fn checked_w(&self) -> Result<C, DtnError> {
        let (w, size) = self.wronskian_scaled();
        if w.norm() <= 4.0 * f64::EPSILON * size || w.norm() < 1e-300 {
            Err(DtnError::EigenvalueCandidate {
                k: self.k,
                lambda: self.lambda,
            })
        } else {
            Ok(w)
        }
    }

    fn m(&self) -> Result<C, DtnError> {
        let w = self.checked_w()?;
        Ok(-self.v.state[0] * self.u.state[0] / w)
    }

    fn m_tilde(&self) -> Result<CMatrix, DtnError> {
        let [v, dv] = self.v.state;
        let [u, du] = self.u.state;
        if du.norm() <= 4.0 * f64::EPSILON * u.norm() {
            return Err(DtnError::ExteriorDtnZero {
                k: self.k,
                lambda: self.lambda,
            });
        }
        let w = self.checked_w()?;
        let off = v * du / w;
        Ok(CMatrix::from_row_slice(2, 2, &[-v * u / w, off, off, -dv * du / w]))
    }
}

/// Per-mode record for tables.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeDtN {
    pub k: u32,
    pub lambda_i: DtnValue,
    pub lambda_e: DtnValue,
    /// `W = v u′ − v′ u` at `R` for `v = r^k(1 + O(r²))` and `u = H_k⁽¹⁾(√λ r)`.
    #[serde(serialize_with = "ser_c")]
    pub wronskian: C,
}

/// `Λᵢ^{(k)}(λ) = v′(R)/v(R)`, or a pole flag at an interior Dirichlet eigenvalue.
pub fn dtn_interior_mode(op: &RadialOperator, k: u32, lambda: C) -> Result<DtnValue, DtnError> {
    op.check_mode(k)?;
    let (v, _, _) = op.regular_state(k, lambda, op.r_interface, None)?;
    Ok(Interface {
        k,
        lambda,
        v,
        u: v,
    }
    .lambda_i(op.r_interface))
}

/// `Λₑ^{(k)}(λ) = −u′(R)/u(R)`.
pub fn dtn_exterior_mode(op: &RadialOperator, k: u32, lambda: C) -> Result<DtnValue, DtnError> {
    op.check_mode(k)?;
    let (u, _) = op.outgoing_state(k, lambda, op.r_interface, None)?;
    Ok(Interface {
        k,
        lambda,
        v: u,
        u,
    }
    .lambda_e(op.r_interface))
}

pub fn mode_dtn(op: &RadialOperator, k: u32, lambda: C) -> Result<ModeDtN, DtnError> {
    let s = op.interface_states(k, lambda, None)?;
    let (w, _) = s.wronskian_scaled();
    let r = op.r_interface;
    Ok(ModeDtN {
        k,
        lambda_i: s.lambda_i(r),
        lambda_e: s.lambda_e(r),
        wronskian: w * (s.v.log_scale + s.u.log_scale).exp(),
    })
}

/// `M^{(k)}(λ) = (Λᵢ + Λₑ)⁻¹`, computed as `−v u / W`.
#[allow(non_snake_case)]
pub fn M_mode(op: &RadialOperator, k: u32, lambda: C) -> Result<C, DtnError> {
    op.interface_states(k, lambda, None)?.m()
}

/// `M̃^{(k)}(λ) = [[Λᵢ, 1], [1, −Λₑ⁻¹]]⁻¹`.
#[allow(non_snake_case)]
pub fn Mtilde_mode(op: &RadialOperator, k: u32, lambda: C) -> Result<CMatrix, DtnError> {
    op.interface_states(k, lambda, None)?.m_tilde()
}

/// Apply `M(λ)` to a trigonometric polynomial with coefficients `g[j]` for
/// modes `j − K′`, `2K′ + 1 = g.len()`.
#[allow(non_snake_case)]
pub fn assemble_M(op: &RadialOperator, lambda: C, g: &[C]) -> Result<Vec<C>, DtnError> {
    if g.len().is_multiple_of(2) {
        return Err(DtnError::InvalidOperator(format!(
            "coefficient vector must have odd length 2K+1, got {}",
            g.len()
        )));
    }
    if let Some(j) = g.iter().position(|z| !z.is_finite()) {
        return Err(DtnError::InvalidOperator(format!("coefficient {j} is not finite")));
    }
    let kk = (g.len() / 2) as i64;
    let mut flags = Vec::new();
    let mut out = Vec::with_capacity(g.len());
    let mut cache: Vec<Option<C>> = vec![None; kk as usize + 1];
    for (j, gj) in g.iter().enumerate() {
        let mode = j as i64 - kk;
        let a = mode.unsigned_abs() as usize;
        if cache[a].is_none() {
            match M_mode(op, a as u32, lambda) {
                Ok(m) => cache[a] = Some(m),
                Err(e) => {
                    flags.push((mode, e.to_string()));
                    out.push(C::new(f64::NAN, f64::NAN));
                    continue;
                }
            }
        }
        out.push(cache[a].unwrap() * gj);
    }
    if flags.is_empty() {
        Ok(out)
    } else {
        Err(DtnError::Flagged(flags))
    }
}

/// `r·W(r)` at each radius, from the regular and outgoing solutions continued
/// across the whole radial range; constant for an exact solver.
pub fn scaled_wronskians(op: &RadialOperator, k: u32, lambda: C, radii: &[f64]) -> Result<Vec<C>, DtnError> {
    op.check_mode(k)?;
    radii
        .iter()
        .map(|&r| {
            let (v, _, _) = op.regular_state(k, lambda, r, None)?;
            let (u, _) = op.outgoing_state(k, lambda, r, None)?;
            let s = Interface { k, lambda, v, u };
            let (w, _) = s.wronskian_scaled();
            Ok(w * (v.log_scale + u.log_scale).exp() * r)
        })
        .collect()
}

/// Negative eigenvalues of mode `k` in `[lo, hi]` (`hi < 0`), located as
/// sign changes of the phase-normalised Wronskian `i^{k+1}·W`.
///
/// For real λ < 0 the outgoing solution is `H_k⁽¹⁾(iκr) = (2/πi)·i^{−k}·K_k(κr)`,
/// a real function times the constant phase `(−i)^{k+1}`, so `i^{k+1}·W` is real
/// and has no poles even where `u(R) = 0`.
pub fn bound_states(op: &RadialOperator, k: u32, lo: f64, hi: f64, samples: usize) -> Result<Vec<f64>, DtnError> {
    op.check_mode(k)?;
    if !(lo < hi && hi < 0.0) || samples < 2 {
        return Err(DtnError::InvalidOperator(format!(
            "bound-state search needs lo < hi < 0 and ≥ 2 samples, got [{lo}, {hi}], {samples}"
        )));
    }
    let plan = op.pilot(k, 0.5 * (lo + hi))?;
    let phase = C::i().powu(k + 1);
    let f = |x: f64| -> Result<f64, DtnError> {
        let s = op.interface_states(k, C::from(x), Some(&plan))?;
        let (w, _) = s.wronskian_scaled();
        Ok((w * phase).re)
    };
    let xs: Vec<f64> = (0..samples)
        .map(|i| lo + (hi - lo) * i as f64 / (samples - 1) as f64)
        .collect();
    let mut vals = Vec::with_capacity(samples);
    for &x in &xs {
        vals.push(f(x)?);
    }
    let mut roots = Vec::new();
    for i in 0..samples - 1 {
        let (mut a, mut b) = (xs[i], xs[i + 1]);
        let (mut fa, fb) = (vals[i], vals[i + 1]);
        if fa == 0.0 {
            roots.push(a);
            continue;
        }
        if fa * fb > 0.0 {
            continue;
        }
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            let fm = f(m)?;
            if fm == 0.0 {
                a = m;
                b = m;
                break;
            }
            if fa * fm < 0.0 {
                b = m;
            } else {
                a = m;
                fa = fm;
            }
        }
        roots.push(0.5 * (a + b));
    }
    Ok(roots)
}

/// Which function of a radial problem feeds the classifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DtnKind {
    /// `M^{(k)}` per mode (block size 1).
    M,
    /// `M̃^{(k)}` per mode (block size 2).
    MTilde,
}

/// Block-diagonal Weyl function over a set of modes.
#[derive(Debug, Clone)]
pub struct DtnProvider {
    pub op: RadialOperator,
    pub modes: Vec<u32>,
    pub kind: DtnKind,
}

impl DtnProvider {
    pub fn new(op: RadialOperator, modes: Vec<u32>, kind: DtnKind) -> Result<Self, DtnError> {
        if modes.is_empty() {
            return Err(DtnError::InvalidOperator("at least one mode is required".into()));
        }
        for &k in &modes {
            op.check_mode(k)?;
        }
        Ok(Self { op, modes, kind })
    }

    /// Modes `0..=K`.
    pub fn all_modes(op: RadialOperator, kind: DtnKind) -> Self {
        let modes = (0..=op.k_max).collect();
        Self { op, modes, kind }
    }

    fn block(&self) -> usize {
        match self.kind {
            DtnKind::M => 1,
            DtnKind::MTilde => 2,
        }
    }

    fn assemble(&self, lambda: C, plans: Option<&[ModePlan]>) -> Result<CMatrix, ProviderError> {
        let b = self.block();
        let mut out = CMatrix::zeros(b * self.modes.len(), b * self.modes.len());
        for (i, &k) in self.modes.iter().enumerate() {
            let s = self
                .op
                .interface_states(k, lambda, plans.map(|p| &p[i]))
                .map_err(|e| ProviderError::new(lambda, e.to_string()))?;
            let blk = match self.kind {
                DtnKind::M => s.m().map(|m| CMatrix::from_element(1, 1, m)),
                DtnKind::MTilde => s.m_tilde(),
            }
            .map_err(|e| ProviderError::new(lambda, e.to_string()))?;
            out.view_mut((b * i, b * i), (b, b)).copy_from(&blk);
        }
        Ok(out)
    }
}

impl WeylProvider for DtnProvider {
    fn dim(&self) -> usize {
        self.block() * self.modes.len()
    }

    fn id(&self) -> String {
        let name = match self.kind {
            DtnKind::M => "dtn-M",
            DtnKind::MTilde => "dtn-M-tilde",
        };
        let modes = match (self.modes.first(), self.modes.last()) {
            (Some(a), Some(b)) if self.modes.len() == (b - a + 1) as usize => format!("{a}..={b}"),
            _ => format!("{:?}", self.modes),
        };
        format!("{name}(R={}, modes {modes})", self.op.r_interface)
    }

    fn eval(&self, lambda: C) -> Result<CMatrix, ProviderError> {
        self.assemble(lambda, None)
    }

    fn anchored(&self, anchor: f64) -> Result<Evaluator<'_>, ProviderError> {
        let plans = self
            .modes
            .iter()
            .map(|&k| self.op.pilot(k, anchor))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| ProviderError::new(C::new(anchor, PILOT_HEIGHT), e.to_string()))?;
        Ok(Box::new(move |z| self.assemble(z, Some(&plans))))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::{bessel_i, bessel_j, bessel_j_with_derivative, bessel_k};

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    fn rel(a: C, b: C) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn free_disk_modified_bessel_examples() {
        let op = RadialOperator::free(1.0, 4).unwrap();
        let lam = c(-1.0, 0.0);
        let li = dtn_interior_mode(&op, 0, lam).unwrap().finite().unwrap();
        let le = dtn_exterior_mode(&op, 0, lam).unwrap().finite().unwrap();
        let one = c(1.0, 0.0);
        assert!(rel(li, bessel_i(1, one) / bessel_i(0, one)) < 1e-10);
        assert!(rel(le, bessel_k(1, one) / bessel_k(0, one)) < 1e-10);
        let m = M_mode(&op, 0, lam).unwrap();
        assert!(rel(m, bessel_i(0, one) * bessel_k(0, one)) < 1e-10);
        assert!(m.im.abs() < 1e-14);
    }

    #[test]
    fn interior_matches_bessel_ratio_across_regimes() {
        // Exercises the series-only and series+RK paths.
        for r in [0.5, 1.0, 3.0] {
            let op = RadialOperator::free(r, 8).unwrap();
            for lam in [c(2.0, 0.3), c(40.0, 1.0), c(-30.0, 0.5)] {
                for k in [0, 3, 8] {
                    let sq = sqrt_upper(lam);
                    let (j, dj) = bessel_j_with_derivative(k, sq * r);
                    let want = sq * dj / j;
                    let got = dtn_interior_mode(&op, k, lam).unwrap().finite().unwrap();
                    assert!(rel(got, want) < 1e-8, "R={r} λ={lam} k={k}: {got} vs {want}");
                }
            }
        }
    }

    #[test]
    fn dirichlet_pole_is_flagged_and_cancels_in_m() {
        let op = RadialOperator::free(1.0, 0).unwrap();
        let j01: f64 = 2.404_825_557_695_773;
        let lam = c(j01 * j01, 0.0);
        assert_eq!(dtn_interior_mode(&op, 0, lam).unwrap(), DtnValue::Pole);
        let m = M_mode(&op, 0, lam).unwrap();
        assert!(m.norm() < 1e-12, "{m}");
    }

    #[test]
    fn free_boundary_value_formula() {
        let op = RadialOperator::free(1.3, 5).unwrap();
        for x in [0.5f64, 7.0] {
            for k in [0, 2, 5] {
                let z = c(x.sqrt() * 1.3, 0.0);
                let want = c(0.0, std::f64::consts::PI * 1.3 / 2.0)
                    * bessel_j(k, z)
                    * crate::special::hankel1(k, z);
                let got = M_mode(&op, k, c(x, 0.0)).unwrap();
                assert!(rel(got, want) < 1e-9, "x={x} k={k}");
            }
        }
    }

    #[test]
    fn mode_consistency_and_block_form() {
        let op = RadialOperator::well(6.0, 0.8, 1.0, 3).unwrap();
        for lam in [c(-2.0, 0.7), c(5.0, 0.2), c(1.0, -1.0)] {
            for k in 0..=3 {
                let li = dtn_interior_mode(&op, k, lam).unwrap().finite().unwrap();
                let le = dtn_exterior_mode(&op, k, lam).unwrap().finite().unwrap();
                let m = M_mode(&op, k, lam).unwrap();
                assert!(rel(1.0 / (li + le), m) < 1e-8);
                let mt = Mtilde_mode(&op, k, lam).unwrap();
                let closed = [m, le * m, le * m, -li * le * m];
                for (got, want) in mt.iter().zip(closed.iter()) {
                    assert!((got - want).norm() < 1e-8 * m.norm().max(want.norm()));
                }
                let rec = mode_dtn(&op, k, lam).unwrap();
                let v_over_u = rec.lambda_i.finite().unwrap() + rec.lambda_e.finite().unwrap();
                assert!(rel(v_over_u, li + le) < 1e-12);
            }
        }
    }

    #[test]
    fn herglotz_and_symmetry() {
        let op = RadialOperator::well(6.0, 0.8, 1.0, 2).unwrap();
        for lam in [c(-4.0, 0.3), c(3.0, 0.01), c(12.0, 2.0)] {
            for k in 0..=2 {
                let m = M_mode(&op, k, lam).unwrap();
                assert!(m.im > 0.0);
                assert!(rel(M_mode(&op, k, lam.conj()).unwrap(), m.conj()) < 1e-9);
                let mt = Mtilde_mode(&op, k, lam).unwrap();
                let im = (&mt - mt.adjoint()) / c(0.0, 2.0);
                assert!(im.symmetric_eigenvalues().iter().all(|e| *e > 0.0));
            }
        }
    }

    #[test]
    fn wronskian_is_conserved() {
        let op = RadialOperator::well(6.0, 0.8, 1.0, 3).unwrap();
        for k in [0, 3] {
            let w = scaled_wronskians(&op, k, c(2.0, 0.5), &[0.2, 0.5, 0.8, 1.0, 2.5]).unwrap();
            for x in &w[1..] {
                assert!(rel(*x, w[0]) < 1e-8, "{w:?}");
            }
        }
        // Free case: r·W(v, H_k) with v = 2^k k! λ^{−k/2} J_k gives 2^{k+1} k! λ^{−k/2} i/π.
        let op = RadialOperator::free(1.0, 2).unwrap();
        let lam = c(2.0, 0.5);
        let w = scaled_wronskians(&op, 2, lam, &[0.7]).unwrap()[0];
        let want = c(0.0, 2.0 / std::f64::consts::PI) * 8.0 / lam;
        assert!(rel(w, want) < 1e-8, "{w} vs {want}");
    }

    #[test]
    fn assemble_examples() {
        let op = RadialOperator::free(1.0, 3).unwrap();
        let lam = c(-2.0, 0.0);
        let g = vec![c(1.0, 0.0), c(0.0, 0.0), c(2.0, 0.0), c(0.0, 0.0), c(0.0, 1.0)];
        let out = assemble_M(&op, lam, &g).unwrap();
        assert!((out[2] - M_mode(&op, 0, lam).unwrap() * 2.0).norm() < 1e-14);
        assert!((out[0] - M_mode(&op, 2, lam).unwrap()).norm() < 1e-14);
        assert!(out.iter().all(|z| z.im.abs() < 1e-14 || *z == out[4]));
        assert!(assemble_M(&op, lam, &[c(1.0, 0.0); 9]).is_err());
        assert!(assemble_M(&op, lam, &[c(1.0, 0.0); 4]).is_err());
    }

    #[test]
    fn anchored_provider_matches_direct() {
        let op = RadialOperator::well(6.0, 0.8, 1.0, 2).unwrap();
        let p = DtnProvider::all_modes(op, DtnKind::MTilde);
        assert_eq!(p.dim(), 6);
        let ev = p.anchored(3.0).unwrap();
        let z = c(3.0, 1e-6);
        let a = ev(z).unwrap();
        let b = p.eval(z).unwrap();
        assert!(crate::linalg::max_abs(&(a - &b)) < 1e-8 * crate::linalg::max_abs(&b));
    }
}
