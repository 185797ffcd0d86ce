//! Dormand–Prince 5(4) integration of linear second-order systems written as
//! complex 2-vectors.
//!
//! Only logarithmic derivatives are ever needed downstream, so the state is
//! rescaled to unit max-norm after every step; the discarded scale is tracked
//! in `log_scale` for the few callers (Wronskian checks) that need it.
//!
//! An adaptive solve records its accepted mesh. Replaying that mesh at a
//! nearby spectral parameter gives a discretisation that is *the same map* for
//! every λ, so the discrete Weyl function stays analytic in λ — essential when
//! boundary values are extracted from a ladder of 24 nearly-real λ.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type State = [Complex64; 2];

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OdeConfig {
    pub rtol: f64,
    pub atol: f64,
    /// Largest permitted step; also the step used when an interval is shorter.
    pub max_step: f64,
    pub max_steps: usize,
}

impl Default for OdeConfig {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-12,
            max_step: 0.25,
            max_steps: 200_000,
        }
    }
}

impl OdeConfig {
    pub fn validate(&self) -> Result<(), OdeError> {
        let ok = self.rtol > 0.0
            && self.rtol.is_finite()
            && self.atol >= 0.0
            && self.atol.is_finite()
            && self.max_step > 0.0
            && self.max_steps > 0;
        if ok {
            Ok(())
        } else {
            Err(OdeError::Config(format!("{self:?}")))
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum OdeError {
    #[error("invalid ODE configuration: {0}")]
    Config(String),
    #[error("step budget of {steps} exhausted at t = {t}")]
    TooManySteps { steps: usize, t: f64 },
    #[error("step size underflow at t = {t}")]
    StepUnderflow { t: f64 },
    #[error("non-finite state at t = {t}")]
    NonFinite { t: f64 },
}

/// State rescaled to unit max-norm; the true state is `state · exp(log_scale)`.
#[derive(Clone, Copy, Debug)]
pub struct Scaled {
    pub state: State,
    pub log_scale: f64,
}

impl Scaled {
    pub fn new(state: State) -> Self {
        let mut s = Scaled {
            state,
            log_scale: 0.0,
        };
        s.renormalise();
        s
    }

    fn renormalise(&mut self) {
        let n = norm(&self.state);
        if n > 0.0 && n.is_finite() {
            self.state[0] /= n;
            self.state[1] /= n;
            self.log_scale += n.ln();
        }
    }
}

fn norm(y: &State) -> f64 {
    y[0].norm().max(y[1].norm())
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn axpy(y: &State, terms: &[(f64, &State)], h: f64) -> State {
    let mut out = *y;
    for (c, k) in terms {
        out[0] += k[0] * (c * h);
        out[1] += k[1] * (c * h);
    }
    out
}

/// One Dormand–Prince step; returns (5th-order solution, error estimate).
fn dp_step<F>(f: &F, t: f64, y: &State, h: f64) -> (State, State)
where
    F: Fn(f64, &State) -> State,
{
    let k1 = f(t, y);
    let k2 = f(t + C2 * h, &axpy(y, &[(A21, &k1)], h));
    let k3 = f(t + C3 * h, &axpy(y, &[(A31, &k1), (A32, &k2)], h));
    let k4 = f(t + C4 * h, &axpy(y, &[(A41, &k1), (A42, &k2), (A43, &k3)], h));
    let k5 = f(
        t + C5 * h,
        &axpy(y, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)], h),
    );
    let k6 = f(
        t + h,
        &axpy(
            y,
            &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
            h,
        ),
    );
    let y5 = axpy(
        y,
        &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)],
        h,
    );
    let k7 = f(t + h, &y5);
    let zero = [Complex64::new(0.0, 0.0); 2];
    let err = axpy(
        &zero,
        &[
            (E1, &k1),
            (E3, &k3),
            (E4, &k4),
            (E5, &k5),
            (E6, &k6),
            (E7, &k7),
        ],
        h,
    );
    (y5, err)
}

/// Adaptive integration from `t0` to `t1` (either direction). Returns the end
/// state and the accepted mesh `t0 = s_0, s_1, …, s_m = t1`.
pub fn integrate_adaptive<F>(
    f: F,
    t0: f64,
    t1: f64,
    y0: Scaled,
    cfg: &OdeConfig,
) -> Result<(Scaled, Vec<f64>), OdeError>
where
    F: Fn(f64, &State) -> State,
{
    let mut mesh = vec![t0];
    let span = t1 - t0;
    if span == 0.0 {
        return Ok((y0, mesh));
    }
    let dir = span.signum();
    let mut y = y0;
    let mut t = t0;
    let deriv = f(t0, &y.state);
    let rate = norm(&deriv) / norm(&y.state).max(1e-300);
    let mut h = (0.1 / rate.max(1e-300))
        .min(cfg.max_step)
        .min(span.abs())
        .max(span.abs() * 1e-6);
    let tiny = 1e-14 * (t0.abs().max(t1.abs()).max(1.0));
    let mut steps = 0;
    while (t1 - t) * dir > 0.0 {
        steps += 1;
        if steps > cfg.max_steps {
            return Err(OdeError::TooManySteps { steps, t });
        }
        let remaining = (t1 - t).abs();
        let last = h >= remaining * (1.0 - 1e-12);
        let step = if last { remaining } else { h };
        let (ynew, err) = dp_step(&f, t, &y.state, dir * step);
        let scale = cfg.atol + cfg.rtol * norm(&y.state).max(norm(&ynew));
        let en = norm(&err) / scale;
        if !en.is_finite() {
            if step <= tiny {
                return Err(OdeError::NonFinite { t });
            }
            h = step * 0.25;
            continue;
        }
        if en <= 1.0 {
            t = if last { t1 } else { t + dir * step };
            y.state = ynew;
            y.renormalise();
            mesh.push(t);
            let grow = if en == 0.0 {
                5.0
            } else {
                (0.9 * en.powf(-0.2)).clamp(0.2, 5.0)
            };
            h = (step * grow).min(cfg.max_step);
        } else {
            h = step * (0.9 * en.powf(-0.25)).clamp(0.1, 0.9);
            if h <= tiny {
                return Err(OdeError::StepUnderflow { t });
            }
        }
    }
    Ok((y, mesh))
}

/// Fixed-mesh replay with the 5th-order Dormand–Prince weights.
pub fn integrate_on_mesh<F>(f: F, mesh: &[f64], y0: Scaled) -> Result<Scaled, OdeError>
where
    F: Fn(f64, &State) -> State,
{
    let mut y = y0;
    for w in mesh.windows(2) {
        let (ynew, _) = dp_step(&f, w[0], &y.state, w[1] - w[0]);
        y.state = ynew;
        y.renormalise();
        if !(y.state[0].is_finite() && y.state[1].is_finite()) {
            return Err(OdeError::NonFinite { t: w[1] });
        }
    }
    Ok(y)
}
