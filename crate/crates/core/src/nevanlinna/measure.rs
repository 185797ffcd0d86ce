//! Finite Borel measures on ℝ built from atoms and polynomial densities, and
//! their Borel transforms in closed form.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeasureError {
    #[error("atom at {position} has non-positive or non-finite weight {weight}")]
    BadWeight { position: f64, weight: f64 },
    #[error("non-finite atom position {0}")]
    BadPosition(f64),
    #[error("density piece [{a}, {b}] is degenerate or non-finite")]
    BadInterval { a: f64, b: f64 },
    #[error("density pieces [{0}, {1}] and [{2}, {3}] overlap")]
    Overlap(f64, f64, f64, f64),
    #[error("density piece [{a}, {b}] has non-finite coefficients")]
    BadCoefficients { a: f64, b: f64 },
    #[error("Borel transform evaluated on the real axis (λ = {0})")]
    RealArgument(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub position: f64,
    pub weight: f64,
}

/// Density `ρ(t) = Σ_j coeffs[j]·(t − a)^j` on `[a, b]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityPiece {
    pub a: f64,
    pub b: f64,
    pub coeffs: Vec<f64>,
}

impl DensityPiece {
    pub fn density(&self, t: f64) -> f64 {
        if t < self.a || t > self.b {
            return 0.0;
        }
        let u = t - self.a;
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * u + c)
    }

    pub fn mass(&self) -> f64 {
        let len = self.b - self.a;
        self.coeffs
            .iter()
            .enumerate()
            .map(|(j, c)| c * len.powi(j as i32 + 1) / (j as f64 + 1.0))
            .sum()
    }

    /// `∫_a^b ρ(t)/(t − λ) dt`.
    fn transform(&self, lambda: Complex64) -> Complex64 {
        let len = self.b - self.a;
        let s = lambda - self.a;
        let deg = self.coeffs.len();
        if deg == 0 {
            return Complex64::new(0.0, 0.0);
        }
        // I_j = ∫_0^L u^j/(u − s) du
        let mut integrals = Vec::with_capacity(deg);
        if s.norm() > 2.0 * len {
            // Geometric expansion in u/s: I_j = −Σ_k L^{j+k+1}/((j+k+1) s^{k+1}).
            for j in 0..deg {
                let mut sum = Complex64::new(0.0, 0.0);
                let mut ratio = Complex64::new(1.0, 0.0) / s;
                let mut lp = len.powi(j as i32 + 1);
                for k in 0..400 {
                    let term = ratio * lp / ((j + k + 1) as f64);
                    sum -= term;
                    if term.norm() <= 1e-17 * sum.norm() {
                        break;
                    }
                    ratio /= s;
                    lp *= len;
                }
                integrals.push(sum);
            }
        } else {
            // Paths u − s for u ∈ [0, L] stay off the branch cut since Im s ≠ 0.
            let mut prev = (Complex64::new(len, 0.0) - s).ln() - (-s).ln();
            integrals.push(prev);
            for j in 1..deg {
                let next = len.powi(j as i32) / j as f64 + s * prev;
                integrals.push(next);
                prev = next;
            }
        }
        self.coeffs
            .iter()
            .zip(&integrals)
            .map(|(c, i)| i * *c)
            .sum()
    }
}

/// μ = Σ w_j δ_{t_j} + Σ ρ_k(t) dt.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MeasureModel {
    pub atoms: Vec<Atom>,
    pub density_pieces: Vec<DensityPiece>,
}

impl MeasureModel {
    pub fn new(atoms: Vec<Atom>, density_pieces: Vec<DensityPiece>) -> Result<Self, MeasureError> {
        let m = Self {
            atoms,
            density_pieces,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<(), MeasureError> {
        for a in &self.atoms {
            if !a.position.is_finite() {
                return Err(MeasureError::BadPosition(a.position));
            }
            if !(a.weight > 0.0 && a.weight.is_finite()) {
                return Err(MeasureError::BadWeight {
                    position: a.position,
                    weight: a.weight,
                });
            }
        }
        let mut pieces: Vec<&DensityPiece> = self.density_pieces.iter().collect();
        for p in &pieces {
            if !(p.a.is_finite() && p.b.is_finite() && p.a < p.b) {
                return Err(MeasureError::BadInterval { a: p.a, b: p.b });
            }
            if p.coeffs.iter().any(|c| !c.is_finite()) {
                return Err(MeasureError::BadCoefficients { a: p.a, b: p.b });
            }
        }
        pieces.sort_by(|x, y| x.a.total_cmp(&y.a));
        for w in pieces.windows(2) {
            if w[1].a < w[0].b {
                return Err(MeasureError::Overlap(w[0].a, w[0].b, w[1].a, w[1].b));
            }
        }
        Ok(())
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight).sum::<f64>()
            + self.density_pieces.iter().map(DensityPiece::mass).sum::<f64>()
    }

    /// Sum of the weights of atoms located exactly at `x`.
    pub fn atom_weight_at(&self, x: f64) -> f64 {
        self.atoms
            .iter()
            .filter(|a| a.position == x)
            .map(|a| a.weight)
            .sum()
    }

    /// Density of the absolutely continuous part at `x` (0 off the pieces).
    pub fn density_at(&self, x: f64) -> f64 {
        self.density_pieces.iter().map(|p| p.density(x)).sum()
    }
}

/// `F(λ) = ∫ dμ(t)/(t − λ)` for Im λ ≠ 0.
pub fn borel_transform(m: &MeasureModel, lambda: Complex64) -> Result<Complex64, MeasureError> {
    if lambda.im == 0.0 {
        return Err(MeasureError::RealArgument(lambda.re));
    }
    let atoms: Complex64 = m
        .atoms
        .iter()
        .map(|a| a.weight / (a.position - lambda))
        .sum();
    let dens: Complex64 = m.density_pieces.iter().map(|p| p.transform(lambda)).sum();
    Ok(atoms + dens)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Composite Gauss–Legendre (5-point) quadrature of ρ/(t−λ), test oracle.
    fn quad_oracle(p: &DensityPiece, lambda: Complex64) -> Complex64 {
        let nodes = [
            (0.0, 0.568_888_888_888_888_9),
            (-0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
            (0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
            (-0.906_179_845_938_664, 0.236_926_885_056_189_1),
            (0.906_179_845_938_664, 0.236_926_885_056_189_1),
        ];
        let panels = 4000;
        let h = (p.b - p.a) / panels as f64;
        let mut sum = c(0.0, 0.0);
        for k in 0..panels {
            let mid = p.a + (k as f64 + 0.5) * h;
            for (x, w) in nodes {
                let t = mid + 0.5 * h * x;
                sum += 0.5 * h * w * p.density(t) / (t - lambda);
            }
        }
        sum
    }

    #[test]
    fn single_atom_at_i() {
        let m = MeasureModel::new(vec![Atom { position: 0.0, weight: 1.0 }], vec![]).unwrap();
        let f = borel_transform(&m, c(0.0, 1.0)).unwrap();
        assert!((f - c(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn empty_measure_is_zero() {
        let f = borel_transform(&MeasureModel::default(), c(0.3, -2.0)).unwrap();
        assert_eq!(f, c(0.0, 0.0));
    }

    #[test]
    fn real_argument_rejected() {
        assert!(matches!(
            borel_transform(&MeasureModel::default(), c(1.0, 0.0)),
            Err(MeasureError::RealArgument(_))
        ));
    }

    #[test]
    fn closed_form_matches_quadrature() {
        let p = DensityPiece {
            a: -1.0,
            b: 2.0,
            coeffs: vec![0.5, 0.3, -0.1, 0.02],
        };
        for lambda in [c(0.5, 0.7), c(-3.0, 0.2), c(10.0, -1.0), c(1.9, 2.0), c(40.0, 5.0)] {
            let exact = p.transform(lambda);
            let q = quad_oracle(&p, lambda);
            assert!((exact - q).norm() < 1e-10 * q.norm().max(1e-3), "{lambda}: {exact} vs {q}");
        }
    }

    #[test]
    fn rejects_overlap_and_bad_weights() {
        let p1 = DensityPiece { a: 0.0, b: 1.0, coeffs: vec![1.0] };
        let p2 = DensityPiece { a: 0.5, b: 2.0, coeffs: vec![1.0] };
        assert!(matches!(
            MeasureModel::new(vec![], vec![p1.clone(), p2]),
            Err(MeasureError::Overlap(..))
        ));
        assert!(MeasureModel::new(vec![Atom { position: 0.0, weight: 0.0 }], vec![]).is_err());
        assert!(MeasureModel::new(vec![], vec![DensityPiece { a: 1.0, b: 1.0, coeffs: vec![] }]).is_err());
        assert!(MeasureModel::new(vec![], vec![p1]).is_ok());
    }

    #[test]
    fn mass_of_uniform_piece() {
        let p = DensityPiece { a: 0.0, b: 2.0, coeffs: vec![1.0, 1.0] };
        assert!((p.mass() - 4.0).abs() < 1e-15);
    }
}
