//! Gauss–Legendre rules.

/// Nodes and weights on [−1, 1] (Newton iteration on P_n from Chebyshev guesses).
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    assert!(n >= 1, "a quadrature rule needs at least one node");
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

/// `(P_n(x), P_n'(x))`.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Composite rule over the panels delimited by sorted `breaks`.
pub fn composite<F: FnMut(f64) -> f64>(breaks: &[f64], rule: &[(f64, f64)], mut f: F) -> f64 {
    let mut sum = 0.0;
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        sum += rule.iter().map(|(x, wt)| wt * f(mid + half * x)).sum::<f64>() * half;
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomials_exactly() {
        for n in 1..12 {
            let rule = gauss_legendre(n);
            let wsum: f64 = rule.iter().map(|(_, w)| w).sum();
            assert!((wsum - 2.0).abs() < 1e-13);
            let deg = 2 * n - 1;
            let val: f64 = rule.iter().map(|(x, w)| w * x.powi(deg as i32 - 1)).sum();
            let exact = if (deg - 1) % 2 == 0 { 2.0 / deg as f64 } else { 0.0 };
            assert!((val - exact).abs() < 1e-13, "n={n}");
        }
    }

    #[test]
    fn composite_smooth_integral() {
        let rule = gauss_legendre(8);
        let breaks: Vec<f64> = (0..=10).map(|i| i as f64 * 0.3).collect();
        let v = composite(&breaks, &rule, f64::exp);
        assert!((v - (3.0f64.exp() - 1.0)).abs() < 1e-12);
    }
}
