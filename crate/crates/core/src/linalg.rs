//! Small dense complex linear-algebra helpers shared by the models and tests.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

pub type CMatrix = DMatrix<Complex64>;

/// `max |A − A*|`.
pub fn hermitian_deviation(a: &CMatrix) -> f64 {
    let mut dev: f64 = 0.0;
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            dev = dev.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    dev
}

pub fn max_abs(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Singular triplets `(σ, u)` with `σ > abs_tol`, descending, from the
/// Hermitian embedding `[[0, A], [A*, 0]]` whose eigenvalues are `±σ` with
/// eigenvectors `[u; ±v]/√2`.
///
/// nalgebra's complex SVD can return an inconsistent factorisation for
/// nearly rank-deficient input (reconstruction error O(‖A‖)); its Hermitian
/// eigensolver is backward stable, and the embedding keeps the absolute
/// accuracy `eps·‖A‖` of a proper SVD.
fn left_singular(a: &CMatrix, abs_tol: f64) -> (Vec<f64>, Vec<DVector<Complex64>>) {
    let (m, n) = a.shape();
    let mut h = CMatrix::zeros(m + n, m + n);
    h.view_mut((0, m), (m, n)).copy_from(a);
    h.view_mut((m, 0), (n, m)).copy_from(&a.adjoint());
    let eig = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..m + n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let mut sigma = Vec::new();
    let mut u = Vec::new();
    for &i in order.iter().take(m.min(n)) {
        let s = eig.eigenvalues[i];
        sigma.push(s.max(0.0));
        if s > abs_tol {
            u.push(eig.eigenvectors.column(i).rows(0, m).into_owned());
        }
    }
    (sigma, u)
}

/// Singular values (descending).
pub fn singular_values(a: &CMatrix) -> Vec<f64> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Vec::new();
    }
    left_singular(a, f64::INFINITY).0
}

/// Number of singular values above `abs_tol`.
pub fn numerical_rank(a: &CMatrix, abs_tol: f64) -> usize {
    singular_values(a).into_iter().filter(|s| *s > abs_tol).count()
}

/// Orthonormal basis (as columns) of the column space of `a`, dropping
/// directions with singular value ≤ `abs_tol`.
pub fn column_basis(a: &CMatrix, abs_tol: f64) -> CMatrix {
    let rows = a.nrows();
    if rows == 0 || a.ncols() == 0 {
        return CMatrix::zeros(rows, 0);
    }
    let (_, u) = left_singular(a, abs_tol);
    if u.is_empty() {
        return CMatrix::zeros(rows, 0);
    }
    // The top blocks are orthogonal with norm 1/√2 up to rounding; QR restores
    // exact orthonormality without changing the span.
    let q = CMatrix::from_columns(&u).qr().q();
    q.columns(0, u.len()).into_owned()
}

/// Largest principal angle between the spans of two orthonormal column sets.
/// Subspaces of different dimension are at angle π/2.
pub fn subspace_angle(q1: &CMatrix, q2: &CMatrix) -> f64 {
    if q1.ncols() != q2.ncols() || q1.nrows() != q2.nrows() {
        return std::f64::consts::FRAC_PI_2;
    }
    if q1.ncols() == 0 {
        return 0.0;
    }
    let overlap = q1.adjoint() * q2;
    let smallest = singular_values(&overlap)
        .last()
        .copied()
        .unwrap_or(0.0)
        .min(1.0);
    smallest.acos()
}

pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn random_gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

/// Haar-distributed unitary (QR of a Ginibre matrix with phase correction).
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    let g = random_gaussian_matrix(rng, n, n);
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    let mut q = q;
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    let g = random_gaussian_matrix(rng, n, n);
    (&g + g.adjoint()) * Complex64::new(0.5, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let u = random_unitary(&mut rng, 6);
        let id = u.adjoint() * &u;
        assert!(max_abs(&(id - CMatrix::identity(6, 6))) < 1e-13);
    }

    #[test]
    fn rank_and_basis() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_gaussian_matrix(&mut rng, 5, 2);
        let b = &a * random_gaussian_matrix(&mut rng, 2, 4);
        assert_eq!(numerical_rank(&b, 1e-10), 2);
        let q = column_basis(&b, 1e-10);
        assert_eq!(q.ncols(), 2);
        let qa = column_basis(&a, 1e-10);
        assert!(subspace_angle(&q, &qa) < 1e-10);
    }

    #[test]
    fn near_rank_one_residue() {
        // A rank-one matrix with a slightly non-Hermitian perturbation, on
        // which a bidiagonalisation SVD returned σ₁ = 8.75 with a wrong vector.
        let c = Complex64::new;
        let a = CMatrix::from_row_slice(
            2,
            2,
            &[
                c(-3.670428938887237, 0.0003948198107327938),
                c(2.028500908566477, -3.777915389157968),
                c(2.029313625388567, 3.777478899147414),
                c(-5.009621686480076, 0.000538873771712171),
            ],
        );
        let s = singular_values(&a);
        let fro = a.norm();
        assert!((s[0] - fro).abs() < 1e-6 * fro, "{s:?} vs ‖A‖_F = {fro}");
        let q = column_basis(&a, 1e-6);
        assert_eq!(q.ncols(), 1);
        let resid = &a - &q * (q.adjoint() * &a);
        assert!(resid.norm() < 1e-6 * fro);
    }

    #[test]
    fn singular_values_match_gram_eigenvalues() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for (m, n) in [(1, 1), (3, 2), (2, 5), (6, 6)] {
            let a = random_gaussian_matrix(&mut rng, m, n);
            let s = singular_values(&a);
            assert_eq!(s.len(), m.min(n));
            let mut g: Vec<f64> = (a.adjoint() * &a).symmetric_eigenvalues().iter().map(|v| v.max(0.0).sqrt()).collect();
            g.sort_by(|x, y| y.total_cmp(x));
            for (x, y) in s.iter().zip(&g) {
                assert!((x - y).abs() < 1e-10, "{s:?} vs {g:?}");
            }
            let q = column_basis(&a, 1e-10);
            assert!(max_abs(&(q.adjoint() * &q - CMatrix::identity(q.ncols(), q.ncols()))) < 1e-13);
            assert!(max_abs(&(&a - &q * (q.adjoint() * &a))) < 1e-12);
        }
    }

    #[test]
    fn hermitian_check() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let h = random_hermitian(&mut rng, 4);
        assert!(hermitian_deviation(&h) < 1e-15);
        let g = random_gaussian_matrix(&mut rng, 4, 4);
        assert!(hermitian_deviation(&g) > 0.1);
    }
}
