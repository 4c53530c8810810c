//! Dense complex linear algebra used throughout the crate.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;

pub type C64 = Complex64;
pub type Mat = DMatrix<C64>;
pub type Vector = DVector<C64>;

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// Largest singular value; zero for empty matrices.
pub fn spectral_norm(m: &Mat) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    if m.iter().all(|z| *z == ZERO) {
        return 0.0;
    }
    // Singular values via the Hermitian square; cheaper and robust for small blocks.
    let gram = if m.nrows() >= m.ncols() { m.adjoint() * m } else { m * m.adjoint() };
    max_eigenvalue_hermitian(&gram).max(0.0).sqrt()
}

pub fn max_eigenvalue_hermitian(h: &Mat) -> f64 {
    if h.nrows() == 0 {
        return 0.0;
    }
    if h.nrows() == 1 {
        return h[(0, 0)].re;
    }
    let sym = hermitian_part(h);
    sym.symmetric_eigenvalues().iter().cloned().fold(f64::NEG_INFINITY, f64::max)
}

pub fn min_eigenvalue_hermitian(h: &Mat) -> f64 {
    if h.nrows() == 0 {
        return 0.0;
    }
    if h.nrows() == 1 {
        return h[(0, 0)].re;
    }
    let sym = hermitian_part(h);
    sym.symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min)
}

pub fn hermitian_part(h: &Mat) -> Mat {
    (h + h.adjoint()).scale(0.5)
}

pub fn max_abs(m: &Mat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_abs_diff(a: &Mat, b: &Mat) -> f64 {
    if a.shape() != b.shape() {
        return f64::INFINITY;
    }
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn vec_max_abs(v: &Vector) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Distance between `Ad(u)` and `Ad(v)`: `min_{|c|=1} ||u - c v||_max`.
pub fn phase_distance(u: &Mat, v: &Mat) -> f64 {
    if u.shape() != v.shape() {
        return f64::INFINITY;
    }
    let overlap: C64 = v.iter().zip(u.iter()).map(|(a, b)| a.conj() * b).sum();
    let phase = if overlap.norm() > 1e-300 { overlap / overlap.norm() } else { ONE };
    max_abs_diff(u, &v.map(|z| z * phase))
}

pub fn random_complex<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

pub fn random_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Mat {
    Mat::from_fn(rows, cols, |_, _| random_complex(rng))
}

/// Haar-ish random unitary: Gram-Schmidt on a random complex matrix.
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Mat {
    loop {
        let m = random_matrix(n, n, rng);
        if let Some(q) = orthonormalize_columns(&m) {
            return q;
        }
    }
}

fn orthonormalize_columns(m: &Mat) -> Option<Mat> {
    let n = m.ncols();
    let mut q = m.clone();
    for j in 0..n {
        for k in 0..j {
            let qk = q.column(k).clone_owned();
            let proj: C64 = qk.dotc(&q.column(j));
            let update = qk * proj;
            let mut col = q.column_mut(j);
            col -= update;
        }
        let norm = q.column(j).norm();
        if norm < 1e-8 {
            return None;
        }
        let mut col = q.column_mut(j);
        col /= C64::new(norm, 0.0);
    }
    Some(q)
}

/// Numerical rank of a set of vectors (as columns), relative tolerance on singular values.
pub fn rank(columns: &[Vector], tol: f64) -> usize {
    if columns.is_empty() {
        return 0;
    }
    let rows = columns[0].len();
    if rows == 0 {
        return 0;
    }
    let m = Mat::from_fn(rows, columns.len(), |r, c| columns[c][r]);
    let sv = m.singular_values();
    let top = sv.iter().cloned().fold(0.0, f64::max);
    sv.iter().filter(|&&s| s > tol * top.max(1.0)).count()
}

/// Unitary-invariant sanity check: `||u u* - 1||_max`.
pub fn unitarity_defect(u: &Mat) -> f64 {
    let n = u.nrows();
    max_abs_diff(&(u * u.adjoint()), &Mat::identity(n, n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn spectral_norm_of_diagonal() {
        let m = Mat::from_diagonal(&Vector::from_vec(vec![C64::new(3.0, 0.0), C64::new(-4.0, 0.0)]));
        assert!((spectral_norm(&m) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn random_unitaries_are_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 1..5 {
            let u = random_unitary(n, &mut rng);
            assert!(unitarity_defect(&u) < 1e-12);
        }
    }

    #[test]
    fn phase_distance_ignores_global_phase() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let u = random_unitary(3, &mut rng);
        let v = u.map(|z| z * C64::from_polar(1.0, 0.7));
        assert!(phase_distance(&u, &v) < 1e-12);
        let w = random_unitary(3, &mut rng);
        assert!(phase_distance(&u, &w) > 1e-3);
    }

    #[test]
    fn rank_of_dependent_columns() {
        let a = Vector::from_vec(vec![ONE, ZERO, ONE]);
        let b = Vector::from_vec(vec![ZERO, ONE, ZERO]);
        let c = &a + &b;
        assert_eq!(rank(&[a, b, c], 1e-10), 2);
    }
}
