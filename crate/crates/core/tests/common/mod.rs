//! Independent reference values for integration tests: Bessel functions from
//! their integral representations and bisection solvers for bound states.
#![allow(dead_code)]

use num_complex::Complex64 as C;
use std::f64::consts::PI;

/// `J_k(z) = (1/2π) ∫₀^{2π} cos(kτ − z sin τ) dτ`, periodic trapezoid rule.
pub fn bessel_j(k: i32, z: C) -> C {
    let n = 512;
    let mut s = C::new(0.0, 0.0);
    for m in 0..n {
        let t = 2.0 * PI * m as f64 / n as f64;
        s += (C::from(k as f64 * t) - z * t.sin()).cos();
    }
    s / n as f64
}

pub fn bessel_j_prime(k: i32, z: C) -> C {
    (bessel_j(k - 1, z) - bessel_j(k + 1, z)) * 0.5
}

/// `I_k(x) = (1/π) ∫₀^π e^{x cos τ} cos(kτ) dτ` for real `x`.
pub fn bessel_i_real(k: i32, x: f64) -> f64 {
    let n = 512;
    let mut s = 0.0;
    for m in 0..n {
        let t = 2.0 * PI * m as f64 / n as f64;
        s += (x * t.cos()).exp() * (k as f64 * t).cos();
    }
    s / n as f64
}

/// `K_ν(w) = ∫₀^∞ e^{−w cosh t} cosh(νt) dt`, `Re w > 0`, trapezoid rule with
/// a step small against both the decay rate and the oscillation.
pub fn bessel_k(nu: i32, w: C) -> C {
    assert!(w.re > 0.0, "integral representation needs Re w > 0");
    let nu = nu.abs() as f64;
    let h = (0.02 * w.re / w.norm()).min(0.002);
    let mut s = C::new(0.5, 0.0) * (-w).exp();
    let mut t = h;
    loop {
        let f = (-w * t.cosh()).exp() * (nu * t).cosh();
        s += f;
        if w.re * t.cosh() - nu * t > 80.0 {
            break;
        }
        t += h;
    }
    s * h
}

pub fn bessel_k_prime(nu: i32, w: C) -> C {
    -(bessel_k(nu - 1, w) + bessel_k(nu + 1, w)) * 0.5
}

/// Root of a real function on a bracket with a sign change.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> f64 {
    let mut fa = f(a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if fa * fm < 0.0 {
            b = m;
        } else {
            a = m;
            fa = fm;
        }
    }
    0.5 * (a + b)
}

/// All sign-change roots of `f` on `[lo, hi]` from `samples` uniform samples.
pub fn all_roots<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, samples: usize) -> Vec<f64> {
    let xs: Vec<f64> = (0..samples)
        .map(|i| lo + (hi - lo) * i as f64 / (samples - 1) as f64)
        .collect();
    let vals: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    (0..samples - 1)
        .filter(|&i| vals[i] * vals[i + 1] < 0.0)
        .map(|i| bisect(&f, xs[i], xs[i + 1]))
        .collect()
}

/// Square well `q = −v0·1_{[−a,a]}` on the line: even states solve
/// `k tan(ka) = κ`, odd states `−k cot(ka) = κ`, with `k = √(v0+E)`, `κ = √(−E)`.
/// Returns `(even, odd)` energies.
pub fn square_well_states(v0: f64, a: f64) -> (Vec<f64>, Vec<f64>) {
    let k = |e: f64| (v0 + e).sqrt();
    let kap = |e: f64| (-e).sqrt();
    // Pole-free forms: k sin(ka) − κ cos(ka) and k cos(ka) + κ sin(ka).
    let even = |e: f64| k(e) * (k(e) * a).sin() - kap(e) * (k(e) * a).cos();
    let odd = |e: f64| k(e) * (k(e) * a).cos() + kap(e) * (k(e) * a).sin();
    let lo = -v0 + 1e-12;
    let hi = -1e-12;
    (all_roots(even, lo, hi, 20_001), all_roots(odd, lo, hi, 20_001))
}

/// Disk well `q = −v0·1_{r<r0}` in the plane, mode `k`: zeros of
/// `k_in J_k′(k_in r0) K_k(κ r0) − κ K_k′(κ r0) J_k(k_in r0)`.
pub fn disk_well_states(v0: f64, r0: f64, k: i32) -> Vec<f64> {
    let f = |e: f64| {
        let kin = (v0 + e).sqrt();
        let kap = (-e).sqrt();
        let j = bessel_j(k, C::from(kin * r0)).re;
        let dj = bessel_j_prime(k, C::from(kin * r0)).re;
        let kk = bessel_k(k, C::from(kap * r0)).re;
        let dk = bessel_k_prime(k, C::from(kap * r0)).re;
        kin * dj * kk - kap * dk * j
    };
    // Closer to the well bottom `J_k(k_in r0) ~ k_in^k` drops below the
    // quadrature round-off and the sign of `f` is noise.
    all_roots(f, -v0 + 1e-4, -1e-6, 4001)
}

pub fn rel(a: C, b: C) -> f64 {
    (a - b).norm() / b.norm()
}
