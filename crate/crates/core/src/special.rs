//! Integer-order Bessel, Hankel and modified Bessel functions of complex argument.
//!
//! Accuracy is aimed at ~1e-12 relative over the argument range used by the
//! radial DtN code (|z| up to a few tens). Three regimes are stitched together:
//! power series for |z| < 12, the Hankel asymptotic expansion beyond, and
//! Steed's continued fraction for `K` (which gives `H⁽¹⁾` deep in the upper
//! half-plane without cancellation).

use num_complex::Complex64;
use std::f64::consts::PI;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const SERIES_RADIUS: f64 = 12.0;
/// Above this imaginary part (and inside the series disc) `H⁽¹⁾` is computed from `K`.
const HANKEL_VIA_K_IM: f64 = 1.5;
const K_SERIES_RADIUS: f64 = 2.0;
const MAX_TERMS: usize = 400;

type C = Complex64;

fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

/// `(-i)^n`.
fn minus_i_pow(n: u32) -> C {
    match n % 4 {
        0 => c(1.0, 0.0),
        1 => c(0.0, -1.0),
        2 => c(-1.0, 0.0),
        _ => c(0.0, 1.0),
    }
}

fn harmonic(k: usize) -> f64 {
    (1..=k).map(|j| 1.0 / j as f64).sum()
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// Power series of `J_n`.
fn j_series(n: u32, z: C) -> C {
    let half = z * 0.5;
    let q = -half * half;
    let mut term = half.powu(n) / factorial(n);
    let mut sum = term;
    for m in 1..MAX_TERMS {
        term *= q / (m as f64 * (m as f64 + n as f64));
        sum += term;
        if term.norm() <= 1e-17 * sum.norm() && m > 2 {
            break;
        }
    }
    sum
}

/// Series for `Y_0` and `Y_1` (needs `J_0`, `J_1` at the same argument).
fn y01_series(z: C, j0: C, j1: C) -> (C, C) {
    let half = z * 0.5;
    let q = -half * half;
    let log_term = half.ln();

    // Y0 = (2/π)(ln(z/2)+γ)J0 − (2/π) Σ_{k≥1} H_k q^k/(k!)²
    let mut term = c(1.0, 0.0);
    let mut s0 = c(0.0, 0.0);
    for k in 1..MAX_TERMS {
        term *= q / ((k * k) as f64);
        let t = term * harmonic(k);
        s0 += t;
        if t.norm() <= 1e-17 * s0.norm() && k > 2 {
            break;
        }
    }
    let y0 = (log_term + EULER_GAMMA) * j0 * (2.0 / PI) - s0 * (2.0 / PI);

    // Y1 = −2/(πz) + (2/π)ln(z/2)J1 − (z/(2π)) Σ_{k≥0} (ψ(k+1)+ψ(k+2)) q^k/(k!(k+1)!)
    let mut term = c(1.0, 0.0);
    let mut s1 = c(0.0, 0.0);
    for k in 0..MAX_TERMS {
        if k > 0 {
            term *= q / ((k * (k + 1)) as f64);
        }
        let psi = -2.0 * EULER_GAMMA + harmonic(k) + harmonic(k + 1);
        let t = term * psi;
        s1 += t;
        if k > 2 && t.norm() <= 1e-17 * s1.norm() {
            break;
        }
    }
    let y1 = -2.0 / (PI * z) + log_term * j1 * (2.0 / PI) - half * s1 / PI;
    (y0, y1)
}

/// Hankel asymptotic expansion of `H⁽¹⁾_ν` for ν ∈ {0, 1}, truncated at the smallest term.
fn hankel1_asymptotic(nu: u32, z: C) -> C {
    let mu = 4.0 * f64::from(nu * nu);
    let mut term = c(1.0, 0.0);
    let mut sum = term;
    let mut last = f64::INFINITY;
    for k in 1..MAX_TERMS {
        let odd = (2 * k - 1) as f64;
        term *= c(0.0, 1.0) * (mu - odd * odd) / (k as f64 * 8.0 * z);
        let size = term.norm();
        if size > last {
            break;
        }
        sum += term;
        last = size;
        if size <= 1e-17 * sum.norm() {
            break;
        }
    }
    let omega = z - (f64::from(nu) * 0.5 + 0.25) * PI;
    (2.0 / (PI * z)).sqrt() * (c(0.0, 1.0) * omega).exp() * sum
}

/// `K_0`, `K_1` for |w| ≤ 2 by power series.
fn k01_series(w: C) -> (C, C) {
    let half = w * 0.5;
    let q = half * half;
    let log_term = half.ln();
    let i0 = bessel_i_series(0, w);
    let i1 = bessel_i_series(1, w);

    let mut term = c(1.0, 0.0);
    let mut s0 = c(0.0, 0.0);
    for k in 1..MAX_TERMS {
        term *= q / ((k * k) as f64);
        let t = term * harmonic(k);
        s0 += t;
        if t.norm() <= 1e-17 * s0.norm() && k > 2 {
            break;
        }
    }
    let k0 = -(log_term + EULER_GAMMA) * i0 + s0;

    let mut term = c(1.0, 0.0);
    let mut s1 = c(0.0, 0.0);
    for k in 0..MAX_TERMS {
        if k > 0 {
            term *= q / ((k * (k + 1)) as f64);
        }
        let psi = -2.0 * EULER_GAMMA + harmonic(k) + harmonic(k + 1);
        let t = term * psi;
        s1 += t;
        if k > 2 && t.norm() <= 1e-17 * s1.norm() {
            break;
        }
    }
    let k1 = 1.0 / w + log_term * i1 - half * s1 * 0.5;
    (k0, k1)
}

/// `K_0`, `K_1` by Steed's continued fraction (CF2), valid for Re w > 0, |w| ≳ 1.
fn k01_steed(w: C) -> (C, C) {
    let one = c(1.0, 0.0);
    let mut b = (one + w) * 2.0;
    let mut d = one / b;
    let mut delh = d;
    let mut h = d;
    let mut q1 = c(0.0, 0.0);
    let mut q2 = one;
    let a1 = 0.25;
    let mut q = c(a1, 0.0);
    let mut cc = c(a1, 0.0);
    let mut a = -a1;
    let mut s = one + q * delh;
    for i in 1..10_000 {
        let fi = i as f64;
        a -= 2.0 * fi;
        cc = -cc * a / (fi + 1.0);
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += cc * qnew;
        b += 2.0;
        d = one / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).norm() < 1e-17 {
            break;
        }
    }
    h *= a1;
    let k0 = (PI / (2.0 * w)).sqrt() * (-w).exp() / s;
    let k1 = k0 * (w + 0.5 - h) / w;
    (k0, k1)
}

fn bessel_i_series(n: u32, w: C) -> C {
    let half = w * 0.5;
    let q = half * half;
    let mut term = half.powu(n) / factorial(n);
    let mut sum = term;
    for m in 1..MAX_TERMS {
        term *= q / (m as f64 * (m as f64 + n as f64));
        sum += term;
        if term.norm() <= 1e-17 * sum.norm() && m > 2 {
            break;
        }
    }
    sum
}

/// `K_0 .. K_nmax` for Re w > 0 (forward recurrence is stable for `K`).
pub fn bessel_k_orders(nmax: u32, w: C) -> Vec<C> {
    let (k0, k1) = if w.norm() <= K_SERIES_RADIUS {
        k01_series(w)
    } else {
        k01_steed(w)
    };
    let mut out = vec![k0, k1];
    for k in 1..nmax as usize {
        let next = out[k - 1] + out[k] * (2.0 * k as f64) / w;
        out.push(next);
    }
    out.truncate(nmax as usize + 1);
    out
}

/// Modified Bessel function `K_n(w)`, principal branch, Re w > 0 recommended.
pub fn bessel_k(n: u32, w: C) -> C {
    bessel_k_orders(n, w)[n as usize]
}

/// Modified Bessel function `I_n(w) = i^{-n} J_n(iw)`.
pub fn bessel_i(n: u32, w: C) -> C {
    if w.norm() < SERIES_RADIUS {
        bessel_i_series(n, w)
    } else {
        minus_i_pow(n) * bessel_j(n, c(0.0, 1.0) * w)
    }
}

/// `H⁽¹⁾_0 .. H⁽¹⁾_nmax`.
pub fn hankel1_orders(nmax: u32, z: C) -> Vec<C> {
    let r = z.norm();
    let (h0, h1) = if r < SERIES_RADIUS && z.im >= HANKEL_VIA_K_IM {
        let w = c(0.0, -1.0) * z;
        let k = bessel_k_orders(1, w);
        let pref = 2.0 / (PI * c(0.0, 1.0));
        (pref * k[0], pref * minus_i_pow(1) * k[1])
    } else if r < SERIES_RADIUS {
        let j0 = j_series(0, z);
        let j1 = j_series(1, z);
        let (y0, y1) = y01_series(z, j0, j1);
        (j0 + c(0.0, 1.0) * y0, j1 + c(0.0, 1.0) * y1)
    } else {
        (hankel1_asymptotic(0, z), hankel1_asymptotic(1, z))
    };
    let mut out = vec![h0, h1];
    for k in 1..nmax as usize {
        let next = out[k] * (2.0 * k as f64) / z - out[k - 1];
        out.push(next);
    }
    out.truncate(nmax as usize + 1);
    out
}

/// Hankel function of the first kind `H⁽¹⁾_n(z)`.
pub fn hankel1(n: u32, z: C) -> C {
    hankel1_orders(n, z)[n as usize]
}

/// `(H⁽¹⁾_n(z), d/dz H⁽¹⁾_n(z))`.
pub fn hankel1_with_derivative(n: u32, z: C) -> (C, C) {
    let h = hankel1_orders(n + 1, z);
    let n_us = n as usize;
    (h[n_us], derivative_from_orders(n, z, &h))
}

fn derivative_from_orders(n: u32, z: C, f: &[C]) -> C {
    if n == 0 {
        -f[1]
    } else {
        f[n as usize - 1] - f[n as usize] * f64::from(n) / z
    }
}

/// Bessel function of the first kind `J_n(z)`.
pub fn bessel_j(n: u32, z: C) -> C {
    let r = z.norm();
    if r < SERIES_RADIUS {
        return j_series(n, z);
    }
    if f64::from(n) <= r {
        let h1 = hankel1_orders(n, z);
        let h2 = hankel2_orders(n, z);
        return (h1[n as usize] + h2[n as usize]) * 0.5;
    }
    j_miller(n, z)
}

/// `(J_n(z), J_n'(z))`.
pub fn bessel_j_with_derivative(n: u32, z: C) -> (C, C) {
    let j = bessel_j(n, z);
    let jp = if n == 0 {
        -bessel_j(1, z)
    } else {
        bessel_j(n - 1, z) - j * f64::from(n) / z
    };
    (j, jp)
}

/// Bessel function of the second kind `Y_n(z)`.
pub fn bessel_y(n: u32, z: C) -> C {
    let r = z.norm();
    if r < SERIES_RADIUS && z.im.abs() >= HANKEL_VIA_K_IM && n >= 2 {
        // Forward recurrence of Y loses digits here; Y = −i(H⁽¹⁾ − J) is clean
        // in the upper half-plane, and Y(z̄) = conj Y(z).
        let zu = if z.im > 0.0 { z } else { z.conj() };
        let y = (hankel1(n, zu) - bessel_j(n, zu)) * c(0.0, -1.0);
        return if z.im > 0.0 { y } else { y.conj() };
    }
    let (y0, y1) = if r < SERIES_RADIUS {
        let j0 = j_series(0, z);
        let j1 = j_series(1, z);
        y01_series(z, j0, j1)
    } else {
        let h1 = [hankel1_asymptotic(0, z), hankel1_asymptotic(1, z)];
        let h2 = [
            hankel1_asymptotic(0, z.conj()).conj(),
            hankel1_asymptotic(1, z.conj()).conj(),
        ];
        let ii = c(0.0, 2.0);
        ((h1[0] - h2[0]) / ii, (h1[1] - h2[1]) / ii)
    };
    let mut prev = y0;
    let mut cur = y1;
    if n == 0 {
        return y0;
    }
    for k in 1..n {
        let next = cur * (2.0 * f64::from(k)) / z - prev;
        prev = cur;
        cur = next;
    }
    cur
}

fn hankel2_orders(nmax: u32, z: C) -> Vec<C> {
    let h0 = hankel1_asymptotic(0, z.conj()).conj();
    let h1 = hankel1_asymptotic(1, z.conj()).conj();
    let mut out = vec![h0, h1];
    for k in 1..nmax as usize {
        let next = out[k] * (2.0 * k as f64) / z - out[k - 1];
        out.push(next);
    }
    out.truncate(nmax as usize + 1);
    out
}

/// Miller's backward recurrence for `J_n`, normalised against the larger of `J_0`, `J_1`.
fn j_miller(n: u32, z: C) -> C {
    let start = n as usize + 30 + z.norm() as usize;
    let mut next = c(0.0, 0.0);
    let mut cur = c(1e-30, 0.0);
    let mut target = c(0.0, 0.0);
    let mut f0 = c(0.0, 0.0);
    let mut f1 = c(0.0, 0.0);
    for k in (1..=start).rev() {
        let prev = cur * (2.0 * k as f64) / z - next;
        next = cur;
        cur = prev;
        if k == n as usize + 1 {
            target = cur;
        }
        if cur.norm() > 1e250 {
            cur /= 1e250;
            next /= 1e250;
            target /= 1e250;
        }
        if k == 1 {
            f0 = cur;
            f1 = next;
        }
    }
    if n == 0 {
        target = f0;
    }
    let j0 = (hankel1_asymptotic(0, z) + hankel1_asymptotic(0, z.conj()).conj()) * 0.5;
    let j1 = (hankel1_asymptotic(1, z) + hankel1_asymptotic(1, z.conj()).conj()) * 0.5;
    if j0.norm() >= j1.norm() {
        target * j0 / f0
    } else {
        target * j1 / f1
    }
}
